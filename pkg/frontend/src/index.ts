export {
  DEFAULT_KEY,
  F_KINDS,
  SCHEMES,
  ValidationError,
  configFromJson,
  validateConfig,
  type FKind,
  type RawConfig,
  type Scheme,
  type WatermarkConfig,
} from "./config.js";
export { deriveSeed, finalize, greenCount, partitionVocab } from "./prng.js";
export { PROB_FLOOR, entropyOfProbs, klSimilarity, softmaxParts } from "./numerics.js";
export {
  detectionThreshold,
  quantile,
  quantileSorted,
  thresholdFunction,
} from "./thresholds.js";
export { DEFAULT_MAX_CATEGORIES, Session, openSession, type StepInfo } from "./session.js";
export { detectTokens, zScore, type DetectionReport } from "./detector.js";
