/**
 * Watermark detection over host-computed entropies.
 *
 * Mirrors the core detector's arithmetic exactly: sequential sums, strict
 * entropy gates, green lists rebuilt from the key and preceding tokens. An
 * undefined statistic is reported as an error state, never thrown.
 */
import { validateConfig, type RawConfig, type Scheme } from "./config.js";
import { deriveSeed, partitionVocab } from "./prng.js";
import { detectionThreshold } from "./thresholds.js";

export interface DetectionReport {
  scheme: Scheme;
  /** Gate threshold; null when the detector scores every token. */
  tau: number | null;
  nScored: number;
  weightedGreen: number;
  z: number | null;
  decision: boolean;
  mode: "no_prompt";
  error: string | null;
  scoredIndices: number[];
}

export function zScore(greenFlags: readonly boolean[], weights: readonly number[], gamma: number): number {
  if (greenFlags.length !== weights.length) {
    throw new RangeError(`got ${greenFlags.length} flags but ${weights.length} weights`);
  }
  if (weights.length === 0) {
    throw new RangeError("no scored tokens: z is undefined");
  }
  let weightSum = 0.0;
  let weightSq = 0.0;
  let greenSum = 0.0;
  for (let i = 0; i < weights.length; i++) {
    const w = weights[i];
    weightSum += w;
    weightSq += w * w;
    if (greenFlags[i]) greenSum += w;
  }
  if (weightSq <= 0) {
    throw new RangeError("zero weight mass: z is undefined");
  }
  return (greenSum - gamma * weightSum) / Math.sqrt(gamma * (1 - gamma) * weightSq);
}

export function detectTokens(
  tokens: readonly number[],
  entropies: readonly number[],
  config: RawConfig,
  vocabSize: number,
): DetectionReport {
  const cfg = validateConfig(config);
  if (tokens.length < 2) {
    throw new RangeError("need at least 2 tokens to score a sequence");
  }
  if (entropies.length !== tokens.length) {
    throw new RangeError(`got ${entropies.length} entropies for ${tokens.length} tokens`);
  }

  let tau: number;
  const indices: number[] = [];
  const weights: number[] = [];
  switch (cfg.scheme) {
    case "catmark":
      tau = detectionThreshold(entropies, cfg.fKind, vocabSize);
      for (let i = 0; i < entropies.length; i++) {
        if (entropies[i] > tau) {
          indices.push(i);
          weights.push(entropies[i]);
        }
      }
      break;
    case "ewd":
      tau = -Infinity;
      for (let i = 0; i < entropies.length; i++) {
        indices.push(i);
        weights.push(entropies[i]);
      }
      break;
    case "sweet":
      tau = cfg.sweetTau;
      for (let i = 0; i < entropies.length; i++) {
        if (entropies[i] > tau) {
          indices.push(i);
          weights.push(1.0);
        }
      }
      break;
    case "kgw":
      tau = -Infinity;
      for (let i = 0; i < entropies.length; i++) {
        indices.push(i);
        weights.push(1.0);
      }
      break;
    default:
      throw new RangeError(`scheme ${cfg.scheme} has no detector`);
  }

  const key = typeof cfg.key === "bigint" ? cfg.key : BigInt(cfg.key);
  const flags: boolean[] = [];
  for (const i of indices) {
    const prefix = tokens.slice(0, i);
    const seed = deriveSeed(key, prefix, cfg.contextWidth, vocabSize);
    const mask = partitionVocab(seed, vocabSize, cfg.gamma);
    flags.push(mask[tokens[i]] === 1);
  }

  let greenMass = 0.0;
  for (let i = 0; i < flags.length; i++) {
    if (flags[i]) greenMass += weights[i];
  }

  const base = {
    scheme: cfg.scheme,
    tau: Number.isFinite(tau) ? tau : null,
    nScored: indices.length,
    weightedGreen: greenMass,
    mode: "no_prompt" as const,
    scoredIndices: indices,
  };
  try {
    const z = zScore(flags, weights, cfg.gamma);
    return { ...base, z, decision: z > cfg.zThreshold, error: null };
  } catch (err) {
    return { ...base, z: null, decision: false, error: (err as Error).message };
  }
}
