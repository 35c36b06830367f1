/**
 * Pinned integer mixing and the keyed vocabulary partition.
 *
 * Constants and operation order match the core package exactly; all 64-bit
 * arithmetic runs on BigInt so the partition is reproduced bit for bit.
 */

const MASK64 = (1n << 64n) - 1n;
const FOLD_MULT = 0x9e3779b97f4a7c15n;
const MIX_MULT_1 = 0xbf58476d1ce4e5b9n;
const MIX_MULT_2 = 0x94d049bb133111ebn;
const PERM_MULT = 0x2545f4914f6cdd1dn;

/** Avalanche finalizer spreading low-order structure across all 64 bits. */
export function finalize(state: bigint): bigint {
  let s = state & MASK64;
  s ^= s >> 30n;
  s = (s * MIX_MULT_1) & MASK64;
  s ^= s >> 27n;
  s = (s * MIX_MULT_2) & MASK64;
  s ^= s >> 31n;
  return s;
}

/**
 * Partition seed for the next position: fold the last `contextWidth` token
 * ids into the key (missing history padded with the sentinel id) and finalize.
 */
export function deriveSeed(
  key: bigint,
  prefix: readonly number[],
  contextWidth: number,
  sentinelId: number,
): bigint {
  if (contextWidth < 1) {
    throw new RangeError(`contextWidth must be >= 1, got ${contextWidth}`);
  }
  let ids = prefix.slice(-contextWidth);
  if (ids.length < contextWidth) {
    ids = [...Array(contextWidth - ids.length).fill(sentinelId), ...ids];
  }
  let state = key & MASK64;
  for (const id of ids) {
    state ^= (BigInt(id + 1) * FOLD_MULT) & MASK64;
  }
  return finalize(state);
}

function nextRand(state: bigint): [bigint, bigint] {
  let s = state;
  s ^= s >> 12n;
  s ^= (s << 25n) & MASK64;
  s ^= s >> 27n;
  s &= MASK64;
  return [s, (s * PERM_MULT) & MASK64];
}

/** Number of green entries for a fraction, rejecting degenerate partitions. */
export function greenCount(gamma: number, vocabSize: number): number {
  const count = Math.ceil(gamma * vocabSize);
  if (count < 1 || count >= vocabSize) {
    throw new RangeError(
      `gamma=${gamma} over ${vocabSize} entries leaves ${count} green; need 1 green and 1 red`,
    );
  }
  return count;
}

/**
 * Green membership flags: the first ceil(gamma*V) entries of a Fisher-Yates
 * shuffle driven by the pinned xorshift-multiply generator.
 */
export function partitionVocab(seed: bigint, vocabSize: number, gamma: number): Uint8Array {
  if (vocabSize < 2) {
    throw new RangeError(`vocabSize must be >= 2, got ${vocabSize}`);
  }
  const count = greenCount(gamma, vocabSize);
  // the generator has no zero state; remap the degenerate seed as the core does
  let state = seed & MASK64;
  if (state === 0n) state = FOLD_MULT;
  const perm = new Array<number>(vocabSize);
  for (let i = 0; i < vocabSize; i++) perm[i] = i;
  for (let i = vocabSize - 1; i > 0; i--) {
    const [nextState, out] = nextRand(state);
    state = nextState;
    const j = Number(out % BigInt(i + 1));
    const tmp = perm[i];
    perm[i] = perm[j];
    perm[j] = tmp;
  }
  const mask = new Uint8Array(vocabSize);
  for (let k = 0; k < count; k++) mask[perm[k]] = 1;
  return mask;
}
