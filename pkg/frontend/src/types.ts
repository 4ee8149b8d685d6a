/** Wire types mirroring the camscout HTTP API. */

export type Label = 'NetworkCamera' | 'OtherWebAsset';

export const LABELS: readonly Label[] = ['NetworkCamera', 'OtherWebAsset'];

export interface FrameInfo {
  checksum: string;
  captured_at: number;
  decode_ok: boolean;
  pixel_change_count: number | null;
  offset: number;
  url: string;
}

export interface CandidateView {
  id: string;
  t0: number;
  offsets: number[];
  /** Aligned to offsets; null marks a frame whose fetch failed. */
  frames: (FrameInfo | null)[];
  link: { raw_url: string; source_page: string; kind: string };
  source_page: string;
  /** Hidden by the UI until the human has committed a label. */
  classifier_verdict: boolean | null;
  classifier_method: string | null;
  classifier_score: number | null;
}

export interface LabelSubmission {
  frameset_id: string;
  label: Label;
  labeler: string;
}
