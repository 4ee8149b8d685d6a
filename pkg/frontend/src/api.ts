/** Thin client for the camscout labeling endpoints. */

import type { CandidateView, Label, LabelSubmission } from './types.js';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export type SubmitOutcome =
  | { kind: 'ok' }
  | { kind: 'conflict'; detail: string }
  | { kind: 'rejected'; detail: string };

export class ApiError extends Error {
  constructor(message: string, public status?: number) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string = '',
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  /** Oldest-first queue of framesets nobody has labeled yet. */
  async fetchUnlabeled(): Promise<CandidateView[]> {
    let resp: Response;
    try {
      resp = await this.fetchFn(`${this.baseUrl}/api/candidates?unlabeled=true`);
    } catch (err) {
      throw new ApiError(`cannot reach server: ${String(err)}`);
    }
    if (!resp.ok) {
      throw new ApiError(`candidate fetch failed (${resp.status})`, resp.status);
    }
    return (await resp.json()) as CandidateView[];
  }

  /**
   * Submit one human label. Distinguishes the two expected rejections:
   * 409 (someone already labeled it; skip forward) and 422 (the server's
   * guard refused the label; show why, stay put).
   */
  async submitLabel(submission: LabelSubmission): Promise<SubmitOutcome> {
    let resp: Response;
    try {
      resp = await this.fetchFn(`${this.baseUrl}/api/labels`, {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify(submission),
      });
    } catch (err) {
      throw new ApiError(`cannot reach server: ${String(err)}`);
    }
    if (resp.status === 201) return { kind: 'ok' };
    const detail = await detailOf(resp);
    if (resp.status === 409) return { kind: 'conflict', detail };
    if (resp.status === 422) return { kind: 'rejected', detail };
    throw new ApiError(`label submit failed (${resp.status}): ${detail}`, resp.status);
  }
}

async function detailOf(resp: Response): Promise<string> {
  try {
    const body = (await resp.json()) as { detail?: unknown };
    if (typeof body.detail === 'string') return body.detail;
    return JSON.stringify(body.detail ?? body);
  } catch {
    return resp.statusText || `HTTP ${resp.status}`;
  }
}
