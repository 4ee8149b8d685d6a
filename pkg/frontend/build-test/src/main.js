/**
 * Browser shell: binds the session state machine to the page and wires
 * buttons plus keyboard shortcuts (C = camera, A = other asset, S = skip,
 * N / Space = next after the verdict reveal).
 */
import { ApiClient } from './api.js';
import { LabelSession } from './controller.js';
import { renderDone, renderError, renderFrames, renderNotice, renderProgress, renderSource, renderVerdict, } from './render.js';
function labelerName() {
    const stored = window.localStorage.getItem('camscout-labeler');
    if (stored)
        return stored;
    const name = window.prompt('Labeler name?', 'anonymous') || 'anonymous';
    window.localStorage.setItem('camscout-labeler', name);
    return name;
}
function byId(id) {
    const el = document.getElementById(id);
    if (!el)
        throw new Error(`missing #${id}`);
    return el;
}
function render(state) {
    const stage = byId('stage');
    const status = byId('status');
    const controls = byId('controls');
    const verdictControls = byId('verdict-controls');
    controls.hidden = state.phase !== 'labeling';
    verdictControls.hidden = state.phase !== 'revealed';
    switch (state.phase) {
        case 'loading':
            stage.innerHTML = '<p class="loading">loading queue…</p>';
            status.innerHTML = '';
            break;
        case 'labeling': {
            const notice = state.notice ? renderNotice(state.notice) : '';
            stage.innerHTML = notice + renderFrames(state.candidate) + renderSource(state.candidate);
            status.innerHTML = renderProgress(state.position, state.total);
            break;
        }
        case 'revealed':
            stage.innerHTML =
                renderFrames(state.candidate) +
                    renderSource(state.candidate) +
                    renderVerdict(state.candidate);
            status.innerHTML = renderProgress(state.position, state.total);
            break;
        case 'done':
            stage.innerHTML = renderDone();
            status.innerHTML = `<span class="progress">labeled ${state.labeled}, skipped ${state.skipped}</span>`;
            break;
        case 'error':
            stage.innerHTML = renderError(state.message) + '<button id="retry">retry</button>';
            status.innerHTML = '';
            byId('retry').addEventListener('click', () => void session.retry());
            break;
    }
}
const session = new LabelSession(new ApiClient(''), labelerName());
session.onChange(render);
byId('btn-camera').addEventListener('click', () => void session.label('NetworkCamera'));
byId('btn-asset').addEventListener('click', () => void session.label('OtherWebAsset'));
byId('btn-skip').addEventListener('click', () => session.skip());
byId('btn-next').addEventListener('click', () => void session.next());
document.addEventListener('keydown', (event) => {
    if (event.target instanceof HTMLInputElement || event.target instanceof HTMLTextAreaElement) {
        return;
    }
    switch (event.key.toLowerCase()) {
        case 'c':
            void session.label('NetworkCamera');
            break;
        case 'a':
            void session.label('OtherWebAsset');
            break;
        case 's':
            session.skip();
            break;
        case 'n':
        case ' ':
            event.preventDefault();
            void session.next();
            break;
    }
});
void session.start();
