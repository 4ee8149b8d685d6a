/**
 * Labeling session state machine, UI-free so the flow is testable in node.
 *
 * States: loading -> labeling -> revealed -> labeling -> ... -> done, with
 * error as a retryable side track. The classifier's verdict is only exposed
 * in the revealed state, after the human has committed a label, so it cannot
 * anchor the decision. Labels are submitted exclusively from label(), i.e.
 * never without an explicit human action.
 */
import { ApiError } from './api.js';
import { LABELS } from './types.js';
export class LabelSession {
    api;
    labeler;
    queue = [];
    index = 0;
    skipped = new Set();
    labeled = 0;
    state = { phase: 'loading' };
    listeners = [];
    constructor(api, labeler) {
        this.api = api;
        this.labeler = labeler;
    }
    onChange(listener) {
        this.listeners.push(listener);
    }
    current() {
        return this.state;
    }
    setState(state) {
        this.state = state;
        for (const listener of this.listeners) {
            listener(state);
        }
    }
    async start() {
        this.setState({ phase: 'loading' });
        await this.refill();
    }
    async refill() {
        let queue;
        try {
            queue = await this.api.fetchUnlabeled();
        }
        catch (err) {
            this.setState({ phase: 'error', message: err instanceof ApiError ? err.message : String(err) });
            return;
        }
        this.queue = queue.filter((c) => !this.skipped.has(c.id));
        this.index = 0;
        this.emitCurrent();
    }
    emitCurrent(notice) {
        const candidate = this.queue[this.index];
        if (candidate === undefined) {
            this.setState({ phase: 'done', labeled: this.labeled, skipped: this.skipped.size });
            return;
        }
        this.setState({
            phase: 'labeling',
            candidate,
            position: this.index + 1,
            total: this.queue.length,
            ...(notice !== undefined ? { notice } : {}),
        });
    }
    /** Submit the human's label for the candidate on screen. */
    async label(label) {
        if (this.state.phase !== 'labeling')
            return;
        if (!LABELS.includes(label)) {
            throw new Error(`not a valid label: ${String(label)}`);
        }
        const { candidate, position, total } = this.state;
        let outcome;
        try {
            outcome = await this.api.submitLabel({
                frameset_id: candidate.id,
                label,
                labeler: this.labeler,
            });
        }
        catch (err) {
            // network trouble: keep the candidate, show a banner
            this.setState({
                phase: 'labeling',
                candidate,
                position,
                total,
                notice: err instanceof ApiError ? err.message : String(err),
            });
            return;
        }
        if (outcome.kind === 'ok') {
            this.labeled += 1;
            this.setState({ phase: 'revealed', candidate, position, total });
        }
        else if (outcome.kind === 'conflict') {
            // someone else got there first; move along
            this.index += 1;
            this.emitCurrent(`already labeled elsewhere: ${outcome.detail}`);
        }
        else {
            // server guard refused the label: surface inline, do not advance
            this.setState({
                phase: 'labeling',
                candidate,
                position,
                total,
                notice: `label rejected: ${outcome.detail}`,
            });
        }
    }
    /** Move on without labeling; the candidate stays in the server queue. */
    skip() {
        if (this.state.phase !== 'labeling')
            return;
        this.skipped.add(this.state.candidate.id);
        this.index += 1;
        this.emitCurrent();
    }
    /** Leave the verdict screen and pull up the next candidate. */
    async next() {
        if (this.state.phase !== 'revealed')
            return;
        this.index += 1;
        if (this.index >= this.queue.length) {
            this.setState({ phase: 'loading' });
            await this.refill();
        }
        else {
            this.emitCurrent();
        }
    }
    async retry() {
        if (this.state.phase !== 'error')
            return;
        await this.start();
    }
}
