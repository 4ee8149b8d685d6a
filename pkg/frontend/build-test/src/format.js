/** Caption helpers for schedule offsets and counts. */
/** 0 -> "t0", 300 -> "t0 + 5 min", 3600 -> "t0 + 60 min", 43200 -> "t0 + 12 h". */
export function offsetCaption(seconds) {
    if (seconds === 0)
        return 't0';
    if (seconds % 3600 === 0 && seconds >= 7200)
        return `t0 + ${seconds / 3600} h`;
    if (seconds % 60 === 0)
        return `t0 + ${seconds / 60} min`;
    return `t0 + ${seconds} s`;
}
export function changeCaption(count) {
    if (count === null)
        return 'change: n/a';
    return count === 1 ? '1 pixel changed' : `${count} pixels changed`;
}
export function escapeHtml(text) {
    return text
        .replace(/&/g, '&amp;')
        .replace(/</g, '&lt;')
        .replace(/>/g, '&gt;')
        .replace(/"/g, '&quot;');
}
