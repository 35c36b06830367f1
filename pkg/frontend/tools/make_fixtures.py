#!/usr/bin/env python3
"""Regenerate the golden parity fixtures from the core Python package.

Run from the repository root with the core package installed:

    python frontend/tools/make_fixtures.py

Writes frontend/fixtures/process_logits.json (1000 session steps across five
scheme configurations) and frontend/fixtures/detect_tokens.json (100 detection
cases). Floats are serialized with shortest-round-trip repr, so both sides
parse identical IEEE 754 doubles; the TypeScript tests require bit-exact
agreement with the `expected` fields.
"""
import json
import pathlib

import numpy as np

from ctxmark import WatermarkSession, detect, validate_config
from ctxmark.engine import sample_token

VOCAB = 48
OUT_DIR = pathlib.Path(__file__).resolve().parent.parent / "fixtures"

SESSIONS = [
    {"name": "catmark-default", "seed": 1, "config": {"scheme": "catmark"}},
    {"name": "catmark-linear", "seed": 2,
     "config": {"scheme": "catmark", "f_kind": "linear", "alpha": -4.0, "rho": 2}},
    {"name": "kgw-quarter", "seed": 3,
     "config": {"scheme": "kgw", "gamma": 0.25, "delta": 1.5, "key": 99991}},
    {"name": "sweet-gated", "seed": 4,
     "config": {"scheme": "sweet", "sweet_tau": 1.0, "context_width": 2}},
    {"name": "none-passthrough", "seed": 5, "config": {"scheme": "none"}},
]
STEPS_PER_SESSION = 200

DETECT_SCHEMES = ("catmark", "kgw", "sweet", "ewd")
N_DETECT = 100


def mixture_row(rng) -> np.ndarray:
    """One logit vector: peaked (code-like) or diffuse (prose-like)."""
    if rng.random() < 0.4:
        row = np.zeros(VOCAB)
        row[rng.integers(VOCAB)] = rng.uniform(6.0, 10.0)
        return row
    return rng.normal(size=VOCAB) * rng.uniform(0.8, 1.6)


def make_process_logits() -> dict:
    sessions = []
    for spec in SESSIONS:
        cfg = validate_config(**spec["config"])
        rng = np.random.default_rng(spec["seed"])
        sampler = np.random.default_rng(1000 + spec["seed"])
        session = WatermarkSession(cfg, VOCAB)
        prompt = [0, 1]
        prefix = list(prompt)
        steps = []
        for _ in range(STEPS_PER_SESSION):
            raw = mixture_row(rng)
            out, outcome = session.step(prefix, raw)
            token = sample_token(outcome.out_probs, sampler)
            steps.append({
                "logits": raw.tolist(),
                "expected": out.tolist(),
                "token": token,
            })
            prefix.append(token)
        sessions.append({
            "name": spec["name"],
            "config": cfg.to_json_dict(),
            "vocab_size": VOCAB,
            "prompt": prompt,
            "steps": steps,
        })
    return {"sessions": sessions}


def make_detect_tokens() -> dict:
    rng = np.random.default_rng(777)
    cases = []
    for i in range(N_DETECT):
        scheme = DETECT_SCHEMES[i % len(DETECT_SCHEMES)]
        overrides = {
            "scheme": scheme,
            "gamma": float(rng.choice([0.25, 0.5])),
            "context_width": int(rng.choice([1, 2])),
            "key": int(rng.integers(1, 1 << 48)),
        }
        n = int(rng.integers(40, 121))
        tokens = [int(t) for t in rng.integers(0, VOCAB, size=n)]
        entropies = [
            float(rng.uniform(0.01, 0.2)) if rng.random() < 0.4
            else float(rng.uniform(0.3, 3.8))
            for _ in range(n)
        ]
        if i == 98:  # static threshold above every entropy: empty scored set
            overrides["scheme"] = "sweet"
            overrides["sweet_tau"] = 10.0
        if i == 99:  # zero weight mass under entropy weighting
            overrides["scheme"] = "ewd"
            entropies = [0.0] * n
        cfg = validate_config(**overrides)
        report = detect(tokens, cfg, entropies=entropies, vocab_size=VOCAB)
        cases.append({
            "config": cfg.to_json_dict(),
            "vocab_size": VOCAB,
            "tokens": tokens,
            "entropies": entropies,
            "expected": report.to_json_dict(),
        })
    return {"cases": cases}


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    for name, payload in (("process_logits", make_process_logits()),
                          ("detect_tokens", make_detect_tokens())):
        path = OUT_DIR / f"{name}.json"
        path.write_text(json.dumps(payload), encoding="utf-8")
        print(f"wrote {path} ({path.stat().st_size / 1e6:.2f} MB)")


if __name__ == "__main__":
    main()
