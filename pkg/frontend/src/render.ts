/**
 * Pure HTML rendering, kept free of document/DOM so it is testable in node.
 * The browser shell assigns the returned strings to innerHTML.
 */

import { changeCaption, escapeHtml, offsetCaption } from './format.js';
import type { CandidateView } from './types.js';

/** Frames side by side in schedule order, each captioned with its offset and
 * the number of pixels that changed since the first frame. */
export function renderFrames(candidate: CandidateView): string {
  const cells = candidate.offsets.map((offset, i) => {
    const frame = candidate.frames[i] ?? null;
    const caption = offsetCaption(offset);
    if (frame === null) {
      return (
        `<figure class="frame missing" data-offset="${offset}">` +
        `<div class="placeholder">no frame</div>` +
        `<figcaption>${caption}</figcaption></figure>`
      );
    }
    const change = i === 0 ? 'reference frame' : changeCaption(frame.pixel_change_count);
    return (
      `<figure class="frame" data-offset="${offset}">` +
      `<img src="${escapeHtml(frame.url)}" alt="frame at ${caption}">` +
      `<figcaption>${caption}<span class="change">${change}</span></figcaption></figure>`
    );
  });
  return `<div class="frame-row">${cells.join('')}</div>`;
}

export function renderSource(candidate: CandidateView): string {
  const page = escapeHtml(candidate.source_page ?? candidate.link.source_page);
  const url = escapeHtml(candidate.link.raw_url);
  return (
    `<p class="source">link: <code>${url}</code><br>` +
    `found on: <a href="${page}" target="_blank" rel="noreferrer">${page}</a></p>`
  );
}

/** Classifier opinion; call only after the human has committed a label. */
export function renderVerdict(candidate: CandidateView): string {
  if (candidate.classifier_verdict === null) {
    return `<p class="verdict">classifier: no verdict recorded</p>`;
  }
  const word = candidate.classifier_verdict ? 'camera' : 'not a camera';
  const score =
    candidate.classifier_score !== null ? ` (score ${candidate.classifier_score.toFixed(3)})` : '';
  const method = candidate.classifier_method ?? 'unknown';
  return `<p class="verdict">classifier (${escapeHtml(method)}): ${word}${score}</p>`;
}

export function renderProgress(position: number, total: number): string {
  return `<span class="progress">${position} / ${total} unlabeled</span>`;
}

export function renderDone(): string {
  return `<div class="done"><h2>Queue empty</h2><p>Every sampled candidate has a label.</p></div>`;
}

export function renderError(message: string): string {
  return `<div class="banner error">${escapeHtml(message)}</div>`;
}

export function renderNotice(message: string): string {
  return `<div class="banner notice">${escapeHtml(message)}</div>`;
}
