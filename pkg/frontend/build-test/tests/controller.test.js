import assert from 'node:assert/strict';
import { test } from 'node:test';
import { ApiClient } from '../src/api.js';
import { LabelSession } from '../src/controller.js';
import { makeCandidate, mockServer } from './mockserver.js';
function session(server) {
    const s = new LabelSession(new ApiClient('', server.fetchFn), 'tester');
    const states = [];
    s.onChange((state) => states.push(state));
    return { s, states };
}
test('start shows the oldest unlabeled candidate', async () => {
    const server = mockServer([makeCandidate('first'), makeCandidate('second')]);
    const { s } = session(server);
    await s.start();
    const state = s.current();
    assert.equal(state.phase, 'labeling');
    assert.equal(state.candidate.id, 'first');
    assert.equal(state.total, 2);
});
test('empty queue lands in done', async () => {
    const server = mockServer([]);
    const { s } = session(server);
    await s.start();
    assert.deepEqual(s.current(), { phase: 'done', labeled: 0, skipped: 0 });
});
test('labeling persists then reveals the classifier verdict only after commit', async () => {
    const server = mockServer([makeCandidate('a')]);
    const { s, states } = session(server);
    await s.start();
    assert.equal(s.current().phase, 'labeling'); // verdict not on screen yet
    await s.label('NetworkCamera');
    const state = s.current();
    assert.equal(state.phase, 'revealed');
    assert.deepEqual(server.labels, [
        { frameset_id: 'a', label: 'NetworkCamera', labeler: 'tester' },
    ]);
    // no state before the reveal exposes the verdict
    assert.ok(states.every((st) => st.phase !== 'revealed' || st === state));
});
test('next after reveal advances and refetches at the end of the queue', async () => {
    const server = mockServer([makeCandidate('a'), makeCandidate('b')]);
    const { s } = session(server);
    await s.start();
    await s.label('OtherWebAsset');
    await s.next();
    assert.equal(s.current().candidate.id, 'b');
    await s.label('OtherWebAsset');
    await s.next();
    assert.equal(s.current().phase, 'done');
    assert.equal(s.current().labeled, 2);
});
test('guard rejection surfaces inline and does not advance', async () => {
    const server = mockServer([makeCandidate('static'), makeCandidate('other')], {
        guarded: new Set(['static']),
    });
    const { s } = session(server);
    await s.start();
    await s.label('NetworkCamera');
    const state = s.current();
    assert.equal(state.phase, 'labeling');
    assert.equal(state.candidate.id, 'static');
    assert.match(state.notice ?? '', /rejected.*never changed/);
    assert.equal(server.labels.length, 0);
    // the other label value is still accepted for the same candidate
    await s.label('OtherWebAsset');
    assert.equal(s.current().phase, 'revealed');
});
test('409 conflict skips forward automatically', async () => {
    const server = mockServer([makeCandidate('taken'), makeCandidate('free')]);
    const { s } = session(server);
    await s.start();
    server.labels.push({ frameset_id: 'taken', label: 'OtherWebAsset', labeler: 'tester' });
    await s.label('NetworkCamera');
    const state = s.current();
    assert.equal(state.phase, 'labeling');
    assert.equal(state.candidate.id, 'free');
    assert.match(state.notice ?? '', /already labeled/);
});
test('skip moves on without any label request', async () => {
    const server = mockServer([makeCandidate('a'), makeCandidate('b')]);
    const { s } = session(server);
    await s.start();
    const posts = () => server.requests.filter((r) => r.method === 'POST').length;
    s.skip();
    assert.equal(posts(), 0);
    assert.equal(s.current().candidate.id, 'b');
    s.skip();
    assert.equal(s.current().phase, 'done');
    assert.equal(s.current().skipped, 2);
    assert.equal(posts(), 0); // no label request without an explicit action
});
test('skipped candidates are not refetched into the session', async () => {
    const server = mockServer([makeCandidate('a'), makeCandidate('b')]);
    const { s } = session(server);
    await s.start();
    s.skip(); // a
    await s.label('OtherWebAsset'); // b
    await s.next(); // queue exhausted -> refill; a is skipped, b labeled
    assert.equal(s.current().phase, 'done');
});
test('network failure on load shows a retryable error state', async () => {
    const server = mockServer([makeCandidate('a')]);
    server.failNext();
    const { s } = session(server);
    await s.start();
    assert.equal(s.current().phase, 'error');
    await s.retry();
    assert.equal(s.current().phase, 'labeling');
});
test('network failure on submit keeps the candidate with a banner', async () => {
    const server = mockServer([makeCandidate('a')]);
    const { s } = session(server);
    await s.start();
    server.failNext();
    await s.label('NetworkCamera');
    const state = s.current();
    assert.equal(state.phase, 'labeling');
    assert.match(state.notice ?? '', /cannot reach server/);
    assert.equal(server.labels.length, 0);
});
test('label is a no-op outside the labeling phase', async () => {
    const server = mockServer([makeCandidate('a')]);
    const { s } = session(server);
    await s.start();
    await s.label('NetworkCamera'); // -> revealed
    await s.label('NetworkCamera'); // ignored
    assert.equal(server.labels.length, 1);
});
