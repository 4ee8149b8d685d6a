/**
 * End-to-end round trip against a real camscout server.
 *
 * The backend pipeline is driven through its public CLI over a recorded site,
 * then the UI's own client and session logic run against the live HTTP API:
 * fetch an unlabeled candidate, render its four frames in schedule order with
 * pixel-change counts, submit labels (including one the server's guard must
 * reject inline), and watch the candidate leave the queue.
 */
import { execFileSync, spawn } from 'node:child_process';
import { mkdtempSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import assert from 'node:assert/strict';
import { after, before, test } from 'node:test';
import { ApiClient } from '../src/api.js';
import { LabelSession } from '../src/controller.js';
import { renderFrames } from '../src/render.js';
const PORT = 8900 + (process.pid % 500);
const BASE = `http://127.0.0.1:${PORT}`;
let server;
let workDir;
function cli(args) {
    execFileSync('camscout', args, { cwd: workDir, stdio: 'pipe' });
}
async function waitForServer(timeoutMs = 15000) {
    const deadline = Date.now() + timeoutMs;
    while (Date.now() < deadline) {
        try {
            const resp = await fetch(`${BASE}/api/candidates?unlabeled=true`);
            if (resp.ok)
                return;
        }
        catch {
            // not up yet
        }
        await new Promise((resolve) => setTimeout(resolve, 200));
    }
    throw new Error('camscout server did not come up');
}
before(async () => {
    workDir = mkdtempSync(join(tmpdir(), 'camscout-ui-'));
    const fixture = join(workDir, 'site.json');
    // the recorded site ships with the backend's test fixtures
    execFileSync('python3', [
        '-c',
        'import sys; sys.path.insert(0, "/root/pkg/tests"); ' +
            'from sitefixtures import img_list_site; ' +
            `open(${JSON.stringify(fixture)}, "w").write(img_list_site().to_json())`,
    ]);
    const data = join(workDir, 'data');
    cli(['crawl', 'http://imglist.test/', '--fixture', fixture, '--virtual-clock', '--out', data]);
    cli(['sample', '--data', data, '--virtual-clock', '--fixture', fixture]);
    cli(['identify', '--data', data, '--fixture', fixture]);
    server = spawn('camscout', ['serve', '--data', data, '--addr', `127.0.0.1:${PORT}`], {
        stdio: 'ignore',
    });
    await waitForServer();
});
after(() => {
    server?.kill();
});
test('candidate renders four frames in schedule order with change counts', async () => {
    const api = new ApiClient(BASE);
    const queue = await api.fetchUnlabeled();
    assert.equal(queue.length, 5); // four cameras and one logo
    const candidate = queue[0];
    assert.equal(candidate.frames.length, 4);
    assert.deepEqual(candidate.offsets, [0, 300, 3600, 43200]);
    const html = renderFrames(candidate);
    const offsets = [...html.matchAll(/data-offset="(\d+)"/g)].map((m) => m[1]);
    assert.deepEqual(offsets, ['0', '300', '3600', '43200']);
    for (const caption of ['t0', 't0 + 5 min', 't0 + 60 min', 't0 + 12 h']) {
        assert.ok(html.includes(caption), `missing caption ${caption}`);
    }
    assert.match(html, /reference frame/);
    assert.match(html, /(\d+ pixels changed|change: n\/a)/);
    // the frame URLs the UI renders really serve image bytes
    const frame = candidate.frames[3];
    const resp = await fetch(BASE + frame.url);
    assert.equal(resp.status, 200);
    const bytes = new Uint8Array(await resp.arrayBuffer());
    assert.deepEqual([...bytes.slice(0, 4)], [0x89, 0x50, 0x4e, 0x47]); // PNG magic
});
test('guard-violating label is rejected inline; valid label drains the queue', async () => {
    const api = new ApiClient(BASE);
    const before_ = await api.fetchUnlabeled();
    const session = new LabelSession(api, 'ui-tester');
    await session.start();
    // walk to the static logo, whose bytes never change
    let state = session.current();
    while (!state.candidate.link.raw_url.includes('logo')) {
        session.skip();
        state = session.current();
    }
    const logoId = state.candidate.id;
    await session.label('NetworkCamera');
    state = session.current();
    assert.equal(state.phase, 'labeling'); // did not advance
    assert.equal(state.candidate.id, logoId);
    assert.match(state.notice ?? '', /rejected/i);
    await session.label('OtherWebAsset');
    assert.equal(session.current().phase, 'revealed');
    const after_ = await api.fetchUnlabeled();
    assert.equal(after_.length, before_.length - 1);
    assert.ok(!after_.some((c) => c.id === logoId)); // persisted, left the queue
});
test('verdict is available to show only after the label commits', async () => {
    const api = new ApiClient(BASE);
    const session = new LabelSession(api, 'ui-tester-2');
    await session.start();
    const state = session.current();
    assert.equal(state.phase, 'labeling');
    const candidate = state.candidate;
    assert.notEqual(candidate.classifier_verdict, null); // identify ran over the corpus
    assert.doesNotMatch(renderFrames(candidate), /classifier/);
    await session.label(candidate.classifier_verdict ? 'NetworkCamera' : 'OtherWebAsset');
    assert.equal(session.current().phase, 'revealed');
});
