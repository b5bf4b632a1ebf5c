/** Word-cloud layout data: top-N affinity terms with relative font scales. */

export interface CloudTerm {
  topic: string;
  weight: number;
  /** relative font scale in [1, 3]; the heaviest term gets 3 */
  scale: number;
}

export function wordCloudTerms(
  affinities: Record<string, number>,
  maxTerms: number,
): CloudTerm[] {
  const entries = Object.entries(affinities)
    .filter(([, weight]) => weight > 0)
    .sort(([ta, wa], [tb, wb]) => (wb - wa) || (ta < tb ? -1 : 1))
    .slice(0, Math.max(maxTerms, 0));
  if (entries.length === 0) {
    return [];
  }
  const weights = entries.map(([, w]) => w);
  const top = Math.max(...weights);
  const bottom = Math.min(...weights);
  const span = top - bottom;
  return entries.map(([topic, weight]) => ({
    topic,
    weight,
    scale: span === 0 ? 3 : 1 + (2 * (weight - bottom)) / span,
  }));
}
