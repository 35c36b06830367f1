/**
 * Step-wise watermarking session: the logits-processor callback for host
 * inference loops. Feed it the running prefix and the raw logits for the next
 * position; it returns the logits to sample from, updating categorization
 * state as a side effect. One session serves one sequence; sessions are fully
 * independent of each other.
 */
import { validateConfig, type RawConfig, type WatermarkConfig } from "./config.js";
import { entropyOfProbs, klSimilarity, softmaxParts } from "./numerics.js";
import { deriveSeed, greenCount, partitionVocab } from "./prng.js";
import { quantileSorted, thresholdFunction } from "./thresholds.js";

export const DEFAULT_MAX_CATEGORIES = 64;

class Category {
  prototype: Float64Array;
  logProto: Float64Array;
  count: number;
  history: number[] = [];
  sortedHistory: number[] = [];
  entropySum = 0.0;

  constructor(logits: Float64Array, logProbs: Float64Array) {
    this.prototype = logits.slice();
    this.logProto = logProbs.slice();
    this.count = 1;
  }

  /** Cumulative-moving-average prototype update. */
  absorb(logits: Float64Array): void {
    const n = this.count;
    for (let i = 0; i < this.prototype.length; i++) {
      this.prototype[i] = (n * this.prototype[i] + logits[i]) / (n + 1);
    }
    this.count = n + 1;
    this.logProto = softmaxParts(this.prototype).logProbs;
  }

  recordEntropy(h: number): void {
    this.history.push(h);
    // binary insertion keeps the sorted copy ready for quantile lookups
    let lo = 0;
    let hi = this.sortedHistory.length;
    while (lo < hi) {
      const mid = (lo + hi) >>> 1;
      if (this.sortedHistory[mid] < h) lo = mid + 1;
      else hi = mid;
    }
    this.sortedHistory.splice(lo, 0, h);
    this.entropySum += h;
  }

  generationThreshold(rho: number, kind: WatermarkConfig["fKind"], vocabSize: number): number {
    const n = this.history.length;
    if (n <= rho) return 0.0;
    const mean = this.entropySum / n;
    return quantileSorted(this.sortedHistory, thresholdFunction(kind, mean, vocabSize));
  }
}

export interface StepInfo {
  entropy: number;
  category: number | null;
  tau: number | null;
  applied: boolean;
}

export class Session {
  readonly config: WatermarkConfig;
  readonly vocabSize: number;
  readonly maxCategories: number;
  private readonly categories: Category[] = [];
  private readonly key: bigint;
  private closed = false;
  lastStep: StepInfo | null = null;

  constructor(config: WatermarkConfig, vocabSize: number, maxCategories = DEFAULT_MAX_CATEGORIES) {
    if (vocabSize < 2) throw new RangeError(`vocabSize must be >= 2, got ${vocabSize}`);
    if (config.scheme !== "none") greenCount(config.gamma, vocabSize); // fail fast
    this.config = config;
    this.vocabSize = vocabSize;
    this.maxCategories = maxCategories;
    this.key = typeof config.key === "bigint" ? config.key : BigInt(config.key);
  }

  get categoryCount(): number {
    return this.categories.length;
  }

  close(): void {
    this.closed = true;
  }

  greenMask(prefix: readonly number[]): Uint8Array {
    const seed = deriveSeed(this.key, prefix, this.config.contextWidth, this.vocabSize);
    return partitionVocab(seed, this.vocabSize, this.config.gamma);
  }

  private assign(x: Float64Array, probs: Float64Array, logProbs: Float64Array): number {
    if (this.categories.length === 0) {
      this.categories.push(new Category(x, logProbs));
      return 0;
    }
    let best = 0;
    let bestSim = -Infinity;
    for (let k = 0; k < this.categories.length; k++) {
      const sim = klSimilarity(probs, logProbs, this.categories[k].logProto);
      if (sim > bestSim) {
        bestSim = sim;
        best = k;
      }
    }
    const atCap = this.categories.length >= this.maxCategories;
    if (bestSim >= this.config.alpha || atCap) {
      this.categories[best].absorb(x);
      return best;
    }
    this.categories.push(new Category(x, logProbs));
    return this.categories.length - 1;
  }

  /** Process one position; returns the logits to sample from. */
  processLogits(prefix: readonly number[], logits: ArrayLike<number>): Float64Array {
    if (this.closed) throw new Error("session is closed");
    if (logits.length !== this.vocabSize) {
      throw new RangeError(
        `logits have length ${logits.length}, session vocabulary is ${this.vocabSize}`,
      );
    }
    const x = Float64Array.from(logits as ArrayLike<number>);
    const { probs, logProbs } = softmaxParts(x);
    const entropy = entropyOfProbs(probs);
    const cfg = this.config;

    let category: number | null = null;
    let tau: number | null = null;
    let applied = false;
    if (cfg.scheme === "catmark") {
      category = this.assign(x, probs, logProbs);
      const cat = this.categories[category];
      cat.recordEntropy(entropy);
      tau = cat.generationThreshold(cfg.rho, cfg.fKind, this.vocabSize);
      applied = entropy > tau;
    } else if (cfg.scheme === "kgw" || cfg.scheme === "ewd") {
      applied = true;
    } else if (cfg.scheme === "sweet") {
      tau = cfg.sweetTau;
      applied = entropy > tau;
    }

    this.lastStep = { entropy, category, tau, applied };
    if (!applied) return x;
    const mask = this.greenMask(prefix);
    const out = x.slice();
    if (cfg.delta !== 0) {
      for (let i = 0; i < out.length; i++) {
        if (mask[i]) out[i] += cfg.delta;
      }
    }
    return out;
  }
}

/** Open a fresh session with an empty category store. */
export function openSession(config: RawConfig, vocabSize: number): Session {
  return new Session(validateConfig(config), vocabSize);
}
