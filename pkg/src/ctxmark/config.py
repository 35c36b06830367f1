"""Scheme configuration: validated parameters and the config-file format.

The config file is plain ``key = value`` text, one field per line, with ``#``
comments. Field names match :class:`WatermarkConfig` one-to-one, e.g.::

    # strength and partition
    gamma = 0.5
    delta = 2.0
    alpha = -2.0
    rho = 5
    f_kind = exp
    scheme = catmark
    sweet_tau = 0.6
    key = 15485863
    context_width = 1
    z_threshold = 4.0
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Any

from .exceptions import ValidationError

F_KINDS = ("exp", "linear", "reciprocal", "sigmoid")
SCHEMES = ("catmark", "kgw", "sweet", "ewd", "none")

DEFAULT_KEY = 15485863
MAX_KEY = (1 << 64) - 1


@dataclass(frozen=True)
class WatermarkConfig:
    """All scheme parameters, immutable once validated.

    Build instances through :func:`validate_config`, which enforces every
    field invariant and reports the offending field on failure.
    """

    gamma: float = 0.5
    delta: float = 2.0
    alpha: float = -2.0
    rho: float = 5
    f_kind: str = "exp"
    scheme: str = "catmark"
    sweet_tau: float = 0.6
    key: int = DEFAULT_KEY
    context_width: int = 1
    z_threshold: float = 4.0

    def replace(self, **changes) -> "WatermarkConfig":
        """Return a validated copy with the given fields overridden."""
        merged = self.to_dict()
        merged.update(changes)
        return validate_config(**merged)

    def to_dict(self) -> dict[str, Any]:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            out[f.name] = value
        return out

    def to_json_dict(self) -> dict[str, Any]:
        """JSON-safe dict: infinite rho is spelled "inf"."""
        out = self.to_dict()
        if isinstance(out["rho"], float) and math.isinf(out["rho"]):
            out["rho"] = "inf"
        return out


def _require_real(field: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(field, f"expected a real number, got {value!r}")
    v = float(value)
    if math.isnan(v):
        raise ValidationError(field, "must not be NaN")
    return v


def _require_int(field: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(field, f"expected an integer, got {value!r}")
    return value


def validate_config(**raw) -> WatermarkConfig:
    """Validate raw parameters and return a :class:`WatermarkConfig`.

    Unknown keys and any invariant violation raise :class:`ValidationError`
    tagged with the field name. Omitted fields take their defaults.
    """
    known = {f.name for f in fields(WatermarkConfig)}
    for name in raw:
        if name not in known:
            raise ValidationError(name, "unknown configuration field")
    params = {f.name: f.default for f in fields(WatermarkConfig)}
    params.update(raw)

    gamma = _require_real("gamma", params["gamma"])
    if not 0.0 < gamma < 1.0 or math.isinf(gamma):
        raise ValidationError("gamma", f"must lie strictly in (0, 1), got {gamma!r}")

    delta = _require_real("delta", params["delta"])
    if delta < 0.0 or math.isinf(delta):
        raise ValidationError("delta", f"must be a finite value >= 0, got {delta!r}")

    alpha = _require_real("alpha", params["alpha"])
    if alpha > 0.0:
        raise ValidationError("alpha", f"must be <= 0 (similarity is never positive), got {alpha!r}")

    rho = params["rho"]
    if isinstance(rho, float) and math.isinf(rho) and rho > 0:
        rho = math.inf
    else:
        rho = _require_int("rho", rho)
        if rho < 0:
            raise ValidationError("rho", f"must be a non-negative integer, got {rho!r}")

    f_kind = params["f_kind"]
    if f_kind not in F_KINDS:
        raise ValidationError("f_kind", f"must be one of {F_KINDS}, got {f_kind!r}")

    scheme = params["scheme"]
    if scheme not in SCHEMES:
        raise ValidationError("scheme", f"must be one of {SCHEMES}, got {scheme!r}")

    sweet_tau = _require_real("sweet_tau", params["sweet_tau"])
    if sweet_tau < 0.0 or math.isinf(sweet_tau):
        raise ValidationError("sweet_tau", f"must be a finite value >= 0, got {sweet_tau!r}")

    key = _require_int("key", params["key"])
    if not 0 <= key <= MAX_KEY:
        raise ValidationError("key", "must fit in 64 unsigned bits")

    context_width = _require_int("context_width", params["context_width"])
    if context_width < 1:
        raise ValidationError("context_width", f"must be >= 1, got {context_width!r}")

    z_threshold = _require_real("z_threshold", params["z_threshold"])

    return WatermarkConfig(
        gamma=gamma, delta=delta, alpha=alpha, rho=rho, f_kind=f_kind,
        scheme=scheme, sweet_tau=sweet_tau, key=key,
        context_width=context_width, z_threshold=z_threshold,
    )


_INT_FIELDS = {"key", "context_width"}
_STR_FIELDS = {"f_kind", "scheme"}


def _parse_value(field: str, text: str):
    if field in _STR_FIELDS:
        return text
    if field == "rho":
        return math.inf if text in ("inf", "Infinity") else int(text)
    if field in _INT_FIELDS:
        return int(text)
    return float(text)


def parse_config_text(text: str) -> dict[str, Any]:
    """Parse ``key = value`` lines into a raw parameter dict."""
    out: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValidationError("config", f"line {lineno}: expected 'key = value', got {line!r}")
        name, _, value = stripped.partition("=")
        name = name.strip()
        value = value.strip()
        try:
            out[name] = _parse_value(name, value)
        except ValueError as exc:
            raise ValidationError(name, f"line {lineno}: cannot parse {value!r}") from exc
    return out


def load_config_file(path) -> WatermarkConfig:
    """Read and validate a key-value config file."""
    with open(path, "r", encoding="utf-8") as fh:
        return validate_config(**parse_config_text(fh.read()))


def config_from_json_dict(data: dict[str, Any]) -> WatermarkConfig:
    """Rebuild a config from :meth:`WatermarkConfig.to_json_dict` output."""
    raw = dict(data)
    if raw.get("rho") == "inf":
        raw["rho"] = math.inf
    return validate_config(**raw)
