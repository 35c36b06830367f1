/**
 * Scheme configuration, mirroring the core package field for field.
 * Every invariant violation throws a ValidationError tagged with the field.
 */

export const F_KINDS = ["exp", "linear", "reciprocal", "sigmoid"] as const;
export const SCHEMES = ["catmark", "kgw", "sweet", "ewd", "none"] as const;

export type FKind = (typeof F_KINDS)[number];
export type Scheme = (typeof SCHEMES)[number];

export const DEFAULT_KEY = 15485863;
const MAX_KEY = (1n << 64n) - 1n;

export class ValidationError extends Error {
  readonly field: string;

  constructor(field: string, message: string) {
    super(`${field}: ${message}`);
    this.field = field;
    this.name = "ValidationError";
  }
}

export interface WatermarkConfig {
  gamma: number;
  delta: number;
  alpha: number;
  rho: number; // Infinity allowed: warmup branch pinned on
  fKind: FKind;
  scheme: Scheme;
  sweetTau: number;
  key: number | bigint;
  contextWidth: number;
  zThreshold: number;
}

export type RawConfig = Partial<WatermarkConfig>;

const DEFAULTS: WatermarkConfig = {
  gamma: 0.5,
  delta: 2.0,
  alpha: -2.0,
  rho: 5,
  fKind: "exp",
  scheme: "catmark",
  sweetTau: 0.6,
  key: DEFAULT_KEY,
  contextWidth: 1,
  zThreshold: 4.0,
};

function requireReal(field: string, value: unknown): number {
  if (typeof value !== "number" || Number.isNaN(value)) {
    throw new ValidationError(field, `expected a real number, got ${String(value)}`);
  }
  return value;
}

function requireInt(field: string, value: unknown): number {
  if (typeof value !== "number" || !Number.isInteger(value)) {
    throw new ValidationError(field, `expected an integer, got ${String(value)}`);
  }
  return value;
}

export function validateConfig(raw: RawConfig = {}): WatermarkConfig {
  const merged = { ...DEFAULTS, ...raw };

  const gamma = requireReal("gamma", merged.gamma);
  if (!(gamma > 0 && gamma < 1)) {
    throw new ValidationError("gamma", `must lie strictly in (0, 1), got ${gamma}`);
  }
  const delta = requireReal("delta", merged.delta);
  if (delta < 0 || !Number.isFinite(delta)) {
    throw new ValidationError("delta", `must be a finite value >= 0, got ${delta}`);
  }
  const alpha = requireReal("alpha", merged.alpha);
  if (alpha > 0) {
    throw new ValidationError("alpha", `must be <= 0, got ${alpha}`);
  }
  let rho = merged.rho;
  if (rho !== Infinity) {
    rho = requireInt("rho", rho);
    if (rho < 0) throw new ValidationError("rho", `must be a non-negative integer, got ${rho}`);
  }
  if (!F_KINDS.includes(merged.fKind)) {
    throw new ValidationError("f_kind", `must be one of ${F_KINDS.join(", ")}, got ${String(merged.fKind)}`);
  }
  if (!SCHEMES.includes(merged.scheme)) {
    throw new ValidationError("scheme", `must be one of ${SCHEMES.join(", ")}, got ${String(merged.scheme)}`);
  }
  const sweetTau = requireReal("sweet_tau", merged.sweetTau);
  if (sweetTau < 0 || !Number.isFinite(sweetTau)) {
    throw new ValidationError("sweet_tau", `must be a finite value >= 0, got ${sweetTau}`);
  }
  const keyBig = typeof merged.key === "bigint" ? merged.key : BigInt(requireInt("key", merged.key));
  if (keyBig < 0n || keyBig > MAX_KEY) {
    throw new ValidationError("key", "must fit in 64 unsigned bits");
  }
  const contextWidth = requireInt("context_width", merged.contextWidth);
  if (contextWidth < 1) {
    throw new ValidationError("context_width", `must be >= 1, got ${contextWidth}`);
  }
  const zThreshold = requireReal("z_threshold", merged.zThreshold);

  return {
    gamma, delta, alpha, rho,
    fKind: merged.fKind, scheme: merged.scheme,
    sweetTau, key: keyBig, contextWidth, zThreshold,
  };
}

/** Parse the snake_case JSON config echoed by the core package. */
export function configFromJson(data: Record<string, unknown>): WatermarkConfig {
  return validateConfig({
    gamma: data.gamma as number,
    delta: data.delta as number,
    alpha: data.alpha as number,
    rho: data.rho === "inf" ? Infinity : (data.rho as number),
    fKind: data.f_kind as FKind,
    scheme: data.scheme as Scheme,
    sweetTau: data.sweet_tau as number,
    key: data.key as number,
    contextWidth: data.context_width as number,
    zThreshold: data.z_threshold as number,
  });
}
