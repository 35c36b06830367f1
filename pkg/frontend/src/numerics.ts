/**
 * Scalar double-precision numerics for the session and detector.
 * Sums run left to right, matching the core package's reduction order on the
 * quantities that must agree bit for bit across the bridge.
 */

export const PROB_FLOOR = 1e-300;

export interface SoftmaxParts {
  probs: Float64Array;
  logProbs: Float64Array;
}

export function softmaxParts(logits: ArrayLike<number>): SoftmaxParts {
  const n = logits.length;
  let max = -Infinity;
  for (let i = 0; i < n; i++) {
    const v = logits[i];
    if (!Number.isFinite(v)) throw new RangeError(`logits[${i}] is not finite`);
    if (v > max) max = v;
  }
  const shifted = new Float64Array(n);
  const exps = new Float64Array(n);
  let z = 0.0;
  for (let i = 0; i < n; i++) {
    shifted[i] = logits[i] - max;
    exps[i] = Math.exp(shifted[i]);
    z += exps[i];
  }
  const logZ = Math.log(z);
  const probs = new Float64Array(n);
  const logProbs = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    probs[i] = exps[i] / z;
    logProbs[i] = shifted[i] - logZ;
  }
  return { probs, logProbs };
}

/** Shannon entropy in nats; entries below the floor contribute nothing. */
export function entropyOfProbs(probs: Float64Array): number {
  let h = 0.0;
  for (let i = 0; i < probs.length; i++) {
    const p = probs[i];
    if (p > PROB_FLOOR) h -= p * Math.log(p);
  }
  return h;
}

/**
 * Negative KL divergence of `probs` against a prototype's log-probabilities:
 * sum p_i (log p_i - log q_i), clamped so similarity never turns positive.
 */
export function klSimilarity(
  probs: Float64Array,
  logProbs: Float64Array,
  protoLogProbs: Float64Array,
): number {
  let div = 0.0;
  for (let i = 0; i < probs.length; i++) {
    if (probs[i] > PROB_FLOOR) {
      div += probs[i] * (logProbs[i] - protoLogProbs[i]);
    }
  }
  return div <= 0 ? 0 : -div;
}
