import assert from 'node:assert/strict';
import { test } from 'node:test';

import { ApiClient, ApiError } from '../src/api.js';
import { makeCandidate, mockServer } from './mockserver.js';

test('fetchUnlabeled returns the queue oldest first', async () => {
  const server = mockServer([makeCandidate('old'), makeCandidate('new')]);
  const client = new ApiClient('', server.fetchFn);
  const queue = await client.fetchUnlabeled();
  assert.deepEqual(
    queue.map((c) => c.id),
    ['old', 'new'],
  );
});

test('fetchUnlabeled wraps network failure in ApiError', async () => {
  const server = mockServer([]);
  server.failNext();
  const client = new ApiClient('', server.fetchFn);
  await assert.rejects(() => client.fetchUnlabeled(), ApiError);
});

test('submitLabel reports created', async () => {
  const server = mockServer([makeCandidate('a')]);
  const client = new ApiClient('', server.fetchFn);
  const outcome = await client.submitLabel({
    frameset_id: 'a',
    label: 'NetworkCamera',
    labeler: 'me',
  });
  assert.deepEqual(outcome, { kind: 'ok' });
  assert.equal(server.labels.length, 1);
});

test('submitLabel surfaces 409 as conflict', async () => {
  const server = mockServer([makeCandidate('a')], { preLabeled: new Set(['a']) });
  const client = new ApiClient('', server.fetchFn);
  const outcome = await client.submitLabel({
    frameset_id: 'a',
    label: 'OtherWebAsset',
    labeler: 'me',
  });
  assert.equal(outcome.kind, 'conflict');
});

test('submitLabel surfaces 422 guard as rejected with the reason', async () => {
  const server = mockServer([makeCandidate('static')], { guarded: new Set(['static']) });
  const client = new ApiClient('', server.fetchFn);
  const outcome = await client.submitLabel({
    frameset_id: 'static',
    label: 'NetworkCamera',
    labeler: 'me',
  });
  assert.equal(outcome.kind, 'rejected');
  assert.match((outcome as { detail: string }).detail, /never changed/);
});

test('submitLabel throws ApiError on unexpected statuses', async () => {
  const server = mockServer([]);
  const client = new ApiClient('', server.fetchFn);
  await assert.rejects(
    () => client.submitLabel({ frameset_id: 'ghost', label: 'OtherWebAsset', labeler: 'me' }),
    (err: unknown) => err instanceof ApiError && err.status === 404,
  );
});

test('requests carry JSON bodies to the labels endpoint', async () => {
  const server = mockServer([makeCandidate('a')]);
  const client = new ApiClient('http://api.test', server.fetchFn);
  await client.submitLabel({ frameset_id: 'a', label: 'OtherWebAsset', labeler: 'me' });
  assert.deepEqual(server.requests.at(-1), {
    url: 'http://api.test/api/labels',
    method: 'POST',
  });
});
