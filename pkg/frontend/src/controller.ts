/**
 * Labeling session state machine, UI-free so the flow is testable in node.
 *
 * States: loading -> labeling -> revealed -> labeling -> ... -> done, with
 * error as a retryable side track. The classifier's verdict is only exposed
 * in the revealed state, after the human has committed a label, so it cannot
 * anchor the decision. Labels are submitted exclusively from label(), i.e.
 * never without an explicit human action.
 */

import { ApiClient, ApiError } from './api.js';
import { LABELS, type CandidateView, type Label } from './types.js';

export type SessionState =
  | { phase: 'loading' }
  | { phase: 'labeling'; candidate: CandidateView; position: number; total: number; notice?: string }
  | { phase: 'revealed'; candidate: CandidateView; position: number; total: number }
  | { phase: 'done'; labeled: number; skipped: number }
  | { phase: 'error'; message: string };

export class LabelSession {
  private queue: CandidateView[] = [];
  private index = 0;
  private skipped = new Set<string>();
  private labeled = 0;
  private state: SessionState = { phase: 'loading' };
  private listeners: ((state: SessionState) => void)[] = [];

  constructor(private api: ApiClient, private labeler: string) {}

  onChange(listener: (state: SessionState) => void): void {
    this.listeners.push(listener);
  }

  current(): SessionState {
    return this.state;
  }

  private setState(state: SessionState): void {
    this.state = state;
    for (const listener of this.listeners) {
      listener(state);
    }
  }

  async start(): Promise<void> {
    this.setState({ phase: 'loading' });
    await this.refill();
  }

  private async refill(): Promise<void> {
    let queue: CandidateView[];
    try {
      queue = await this.api.fetchUnlabeled();
    } catch (err) {
      this.setState({ phase: 'error', message: err instanceof ApiError ? err.message : String(err) });
      return;
    }
    this.queue = queue.filter((c) => !this.skipped.has(c.id));
    this.index = 0;
    this.emitCurrent();
  }

  private emitCurrent(notice?: string): void {
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
  async label(label: Label): Promise<void> {
    if (this.state.phase !== 'labeling') return;
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
    } catch (err) {
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
    } else if (outcome.kind === 'conflict') {
      // someone else got there first; move along
      this.index += 1;
      this.emitCurrent(`already labeled elsewhere: ${outcome.detail}`);
    } else {
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
  skip(): void {
    if (this.state.phase !== 'labeling') return;
    this.skipped.add(this.state.candidate.id);
    this.index += 1;
    this.emitCurrent();
  }

  /** Leave the verdict screen and pull up the next candidate. */
  async next(): Promise<void> {
    if (this.state.phase !== 'revealed') return;
    this.index += 1;
    if (this.index >= this.queue.length) {
      this.setState({ phase: 'loading' });
      await this.refill();
    } else {
      this.emitCurrent();
    }
  }

  async retry(): Promise<void> {
    if (this.state.phase !== 'error') return;
    await this.start();
  }
}
