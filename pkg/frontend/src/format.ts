/**
 * One-decimal percentage of an API probability. This is the only transform
 * the UI applies to a risk number: scale for display and round.
 */
export function formatPercent(value: number): string {
  return `${(value * 100).toFixed(1)}%`;
}

export function formatPlusMinus(se: number | null): string {
  return se === null ? "" : `± ${formatPercent(se)}`;
}
