"""Deterministic seeded random streams.

Every stochastic operation in the toolkit draws from a numpy Philox
generator (a 64-bit counter-based PRNG) keyed by SHA-256 of the user seed
plus a tuple of purpose labels. Distinct (seed, labels) pairs get
independent, reproducible streams, so parallel settings and bootstrap
resamples never share state.

All sampling reduces to one primitive: binning Philox uniform doubles
against explicit cumulative thresholds. No numpy distribution methods are
used, so results are stable across numpy versions and platforms.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .errors import ValidationError

_CHUNK = 1 << 20


def substream(seed: int, *labels) -> np.random.Generator:
    """Philox generator for the given seed and purpose labels."""
    parts = [str(int(seed))] + [str(x) for x in labels]
    payload = "\x1f".join(parts).encode("utf-8")
    key = int.from_bytes(hashlib.sha256(payload).digest()[:16], "little")
    return np.random.Generator(np.random.Philox(key=key))


def draw_counts(
    probs: np.ndarray,
    total_trials: int,
    rng: np.random.Generator,
    efficiency: float = 1.0,
) -> np.ndarray:
    """Histogram of total_trials outcome draws, with per-trial detection loss.

    Each trial consumes one uniform double u: a detection occurs when
    u < efficiency, and the outcome is the CDF bin that u/efficiency lands
    in. Returns integer counts per outcome; their sum is the number of
    detections (== total_trials when efficiency is 1).
    """
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size < 2:
        raise ValidationError(f"probs must be a 1-d array of at least 2 outcomes, got shape {p.shape}")
    if np.any(p < -1e-9) or abs(float(p.sum()) - 1.0) > 1e-6:
        raise ValidationError("outcome probabilities must be nonnegative and sum to 1")
    if not (0.0 < efficiency <= 1.0):
        raise ValidationError(f"efficiency must be in (0, 1], got {efficiency}")
    if total_trials < 1:
        raise ValidationError(f"total_trials must be >= 1, got {total_trials}")
    p = np.clip(p, 0.0, None)
    thresholds = efficiency * np.cumsum(p / p.sum())
    thresholds[-1] = efficiency
    counts = np.zeros(p.size + 1, dtype=np.int64)
    remaining = int(total_trials)
    while remaining > 0:
        m = min(_CHUNK, remaining)
        u = rng.random(m)
        counts += np.bincount(
            np.searchsorted(thresholds, u, side="right"), minlength=p.size + 1
        )
        remaining -= m
    return counts[:-1]


def draw_bits(p_one: float, n_bits: int, rng: np.random.Generator) -> np.ndarray:
    """n_bits independent Bernoulli(p_one) draws as a uint8 0/1 array."""
    if not (0.0 <= p_one <= 1.0):
        raise ValidationError(f"p_one must be in [0, 1], got {p_one}")
    if n_bits < 0:
        raise ValidationError(f"n_bits must be >= 0, got {n_bits}")
    out = np.empty(int(n_bits), dtype=np.uint8)
    filled = 0
    while filled < n_bits:
        m = min(_CHUNK, n_bits - filled)
        out[filled : filled + m] = rng.random(m) < p_one
        filled += m
    return out
