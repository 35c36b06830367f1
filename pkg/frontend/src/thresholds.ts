/**
 * Threshold machinery: entropy-to-probability mappings and the nearest-rank
 * quantile. The quantile always returns an element of the history.
 */
import type { FKind } from "./config.js";

export function thresholdFunction(kind: FKind, x: number, vocabSize: number): number {
  if (!(x >= 0)) throw new RangeError(`entropy must be >= 0, got ${x}`);
  if (vocabSize < 2) throw new RangeError(`vocabSize must be >= 2, got ${vocabSize}`);
  let q: number;
  switch (kind) {
    case "exp":
      q = Math.exp(-x);
      break;
    case "linear":
      q = 1 - x / Math.log(vocabSize);
      break;
    case "reciprocal":
      q = x < 1 ? 1 : 1 / x;
      break;
    case "sigmoid":
      q = 1 / (1 + Math.exp(x - Math.log(vocabSize) / 2));
      break;
    default:
      throw new RangeError(`unknown threshold function kind ${String(kind)}`);
  }
  return Math.min(1, Math.max(0, q));
}

/** Nearest-rank quantile of an ascending-sorted non-empty array. */
export function quantileSorted(sortedValues: readonly number[], q: number): number {
  const n = sortedValues.length;
  if (n === 0) throw new RangeError("quantile of an empty history is undefined");
  let rank = Math.max(1, Math.ceil(q * n));
  if (rank > n) rank = n;
  return sortedValues[rank - 1];
}

export function quantile(history: readonly number[], q: number): number {
  if (!(q >= 0 && q <= 1)) {
    throw new RangeError(`cumulative probability must lie in [0, 1], got ${q}`);
  }
  return quantileSorted([...history].sort((a, b) => a - b), q);
}

/** Sequence-level detection threshold: history quantile at f(mean). */
export function detectionThreshold(
  entropies: readonly number[],
  kind: FKind,
  vocabSize: number,
): number {
  if (entropies.length === 0) {
    throw new RangeError("detection threshold of an empty sequence is undefined");
  }
  let sum = 0.0;
  for (const h of entropies) sum += h;
  return quantile(entropies, thresholdFunction(kind, sum / entropies.length, vocabSize));
}
