/** Presentation helpers. Table percentages follow the published
 *  convention: integer percent rounded half up, benefit-risk keeps one
 *  decimal when the mean is not integral. Exact service values are
 *  always shown alongside as raw lexemes. */

export function pctInt(fraction: number): string {
  return `${Math.floor(100 * fraction + 0.5)}%`;
}

export function pctBr(fraction: number): string {
  const tenth = Math.floor(1000 * fraction + 0.5) / 10;
  return Number.isInteger(tenth) ? `${tenth}%` : `${tenth.toFixed(1)}%`;
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

/** Width of a bar in percent for layout only. */
export function barWidth(fraction: number): string {
  const clamped = Math.min(Math.max(fraction, 0), 1);
  return `${(100 * clamped).toFixed(2)}%`;
}

/** Marker position for a criterion on a log-scaled risk axis. */
export function logPosition(value: number, lo = 1e-8, hi = 1): string {
  const v = Math.min(Math.max(value, lo), hi);
  const t = (Math.log10(v) - Math.log10(lo)) / (Math.log10(hi) - Math.log10(lo));
  return `${(100 * t).toFixed(2)}%`;
}
