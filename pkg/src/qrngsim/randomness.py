"""Randomness quantification: min-entropy measures, CHSH, bit generation.

The coherence-based bound -log2((1 + sqrt(1 - 4 C^2))/2) certifies the
min-entropy of an HV measurement from the reconstructed state alone; the
empirical min-entropy -log2 max(p0, p1) is what the observed frequencies
suggest. The bound never exceeds the empirical value on physical states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateSubspaceError,
    DimensionError,
    InvalidCoherenceError,
    ValidationError,
)
from . import linalg
from .states import DensityMatrix, as_state_array, coherence, fidelity, subspace_restrict
from .streams import draw_bits, substream

SCHEMES = ("single_HV", "coincidence_HH_VV")
CHSH_CANONICAL_ANGLES = (0.0, 45.0, 22.5, 67.5)

_EXACT_ONE_TOL = 1e-12


@dataclass(frozen=True)
class BitStream:
    """A 0/1 bit sequence with provenance metadata.

    bits are held unpacked (uint8 per bit); the file format packs them
    little-endian within bytes with a JSON sidecar, see serialize.
    """

    bits: np.ndarray
    provenance: str = "simulated"
    seed: int | None = None
    discard_rate: float | None = None

    def __post_init__(self):
        if self.provenance not in ("simulated", "external"):
            raise ValidationError(f"provenance must be 'simulated' or 'external', got {self.provenance!r}")
        bits = np.ascontiguousarray(self.bits, dtype=np.uint8)
        if bits.ndim != 1:
            raise ValidationError(f"bits must be one-dimensional, got shape {bits.shape}")
        if bits.size and int(bits.max()) > 1:
            raise ValidationError("bits must contain only 0 and 1")
        object.__setattr__(self, "bits", bits)

    @property
    def length(self) -> int:
        return int(self.bits.size)


def _neg_log2(x: float) -> float:
    # values within 1e-12 of 1 return exactly 0, avoiding -0.0 artifacts
    if abs(x - 1.0) <= _EXACT_ONE_TOL:
        return 0.0
    return -math.log2(x)


def min_entropy_empirical(p0: float, p1: float) -> float:
    """-log2 max(p0, p1) for a two-outcome distribution."""
    if p0 < 0.0 or p1 < 0.0:
        raise ValidationError(f"probabilities must be nonnegative, got ({p0}, {p1})")
    if abs((p0 + p1) - 1.0) > 1e-9:
        raise ValidationError(f"probabilities must sum to 1 within 1e-9, got {p0 + p1:.12g}")
    return _neg_log2(max(p0, p1))


def min_entropy_bound(c: float) -> float:
    """Min-entropy certified per HV measurement by the coherence c alone."""
    if c < -_EXACT_ONE_TOL or c > 0.5 + _EXACT_ONE_TOL:
        raise InvalidCoherenceError(f"coherence must lie in [0, 0.5], got {c}")
    c = min(max(c, 0.0), 0.5)
    p_max = (1.0 + math.sqrt(1.0 - 4.0 * c * c)) / 2.0
    return _neg_log2(p_max)


def min_entropy_pure(a_sq: float) -> float:
    """-log2 max(a^2, 1-a^2) for a pure state with |<H|psi>|^2 = a_sq.

    Equals min_entropy_bound(sqrt(a_sq (1 - a_sq))): for pure states the
    coherence bound is tight.
    """
    if a_sq < -_EXACT_ONE_TOL or a_sq > 1.0 + _EXACT_ONE_TOL:
        raise ValidationError(f"a_sq must lie in [0, 1], got {a_sq}")
    a_sq = min(max(a_sq, 0.0), 1.0)
    return _neg_log2(max(a_sq, 1.0 - a_sq))


def _polarizer_observable(theta_deg: float) -> np.ndarray:
    t = math.radians(theta_deg)
    k = np.array([math.cos(t), math.sin(t)])
    k_perp = np.array([-math.sin(t), math.cos(t)])
    return np.outer(k, k) - np.outer(k_perp, k_perp)


def chsh_s(
    rho: DensityMatrix | np.ndarray,
    angles: tuple[float, float, float, float] = CHSH_CANONICAL_ANGLES,
) -> float:
    """CHSH combination S = E(a,b) - E(a,b') + E(a',b) + E(a',b').

    E(alpha, beta) = Tr[rho (sigma(alpha) x sigma(beta))] with sigma(theta)
    the +1/-1 observable of a linear polarizer at theta. |S| <= 2 sqrt 2 for
    every physical state; separable states obey |S| <= 2.
    """
    m = as_state_array(rho)
    if m.shape != (4, 4):
        raise DimensionError(f"chsh_s needs a 4x4 state, got {m.shape}")
    a, a_prime, b, b_prime = angles

    def corr(alpha: float, beta: float) -> float:
        obs = np.kron(_polarizer_observable(alpha), _polarizer_observable(beta))
        return float(np.trace(m @ obs).real)

    return corr(a, b) - corr(a, b_prime) + corr(a_prime, b) + corr(a_prime, b_prime)


def _signal_reduced(rho: DensityMatrix | np.ndarray) -> np.ndarray:
    """One-photon state of the signal arm of a two-photon state."""
    m = as_state_array(rho)
    order = rho.tensor_order if isinstance(rho, DensityMatrix) else None
    traced = "second" if order == "signal_first" else "first"
    return linalg.partial_trace(m, traced)


def _hv_probabilities(m: np.ndarray) -> tuple[float, float]:
    return float(m[0, 0].real), float(m[1, 1].real)


def generate_bits(
    rho: DensityMatrix | np.ndarray,
    scheme: str,
    n_bits: int,
    seed: int,
) -> BitStream:
    """Seeded bit stream from HV measurements of a state.

    single_HV: bit 1 on a V detection (two-photon states are first reduced
    to the signal arm). coincidence_HH_VV: bit 0 on HH, bit 1 on VV, drawn
    conditionally; HV/VH events are discarded and do not count toward
    n_bits, and their rate is reported in the stream's discard_rate.
    """
    if scheme not in SCHEMES:
        raise ValidationError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    if n_bits < 0:
        raise ValidationError(f"n_bits must be >= 0, got {n_bits}")
    m = as_state_array(rho)
    discard_rate = None
    if scheme == "single_HV":
        if m.shape == (4, 4):
            m = _signal_reduced(rho)
        elif m.shape != (2, 2):
            raise DimensionError(f"single_HV needs a 2x2 or 4x4 state, got {m.shape}")
        _, p_one = _hv_probabilities(m)
    else:
        if m.shape != (4, 4):
            raise DimensionError(f"coincidence_HH_VV needs a 4x4 state, got {m.shape}")
        p_hh = float(m[0, 0].real)
        p_vv = float(m[3, 3].real)
        mass = p_hh + p_vv
        if mass <= 1e-9:
            raise DegenerateSubspaceError(
                f"HH/VV coincidence mass {mass:.3e} is too small to generate bits"
            )
        p_one = p_vv / mass
        discard_rate = max(0.0, 1.0 - mass)
    p_one = min(max(p_one, 0.0), 1.0)
    rng = substream(seed, "bits", scheme)
    bits = draw_bits(p_one, int(n_bits), rng)
    return BitStream(bits=bits, provenance="simulated", seed=int(seed), discard_rate=discard_rate)


@dataclass(frozen=True)
class AuditReport:
    """Derived randomness quantities for one state and generation scheme."""

    probabilities: tuple[float, ...]
    coherence_C: float
    min_entropy_bound: float
    empirical_min_entropy: float
    fidelity_to_target: float | None
    chsh_S: float | None
    extractable_bits: int


def audit(
    rho: DensityMatrix | np.ndarray,
    scheme: str,
    target: DensityMatrix | np.ndarray | None = None,
    convention: str = "root",
    chsh_angles: tuple[float, float, float, float] = CHSH_CANONICAL_ANGLES,
    raw_length: int = 0,
) -> AuditReport:
    """Assemble the certification report for a state under one scheme.

    For coincidence_HH_VV the coherence comes from the renormalized HH/VV
    subspace; for single_HV on a two-photon state it comes from the reduced
    signal-arm state. Fidelity is always evaluated on the full input state
    against the target. extractable_bits is floor(bound * raw_length).
    """
    if scheme not in SCHEMES:
        raise ValidationError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    if raw_length < 0:
        raise ValidationError(f"raw_length must be >= 0, got {raw_length}")
    m = as_state_array(rho)
    chsh_value = chsh_s(m, chsh_angles) if m.shape == (4, 4) else None
    if scheme == "single_HV":
        reduced = _signal_reduced(rho) if m.shape == (4, 4) else m
        if reduced.shape != (2, 2):
            raise DimensionError(f"single_HV needs a 2x2 or 4x4 state, got {m.shape}")
        probs = _hv_probabilities(reduced)
        c = coherence(reduced)
    else:
        if m.shape != (4, 4):
            raise DimensionError(f"coincidence_HH_VV needs a 4x4 state, got {m.shape}")
        sub = subspace_restrict(m, (0, 3))
        probs = _hv_probabilities(sub.matrix)
        c = coherence(sub)
    bound = min_entropy_bound(c)
    empirical = min_entropy_empirical(*probs)
    fid = fidelity(rho, target, convention) if target is not None else None
    return AuditReport(
        probabilities=probs,
        coherence_C=c,
        min_entropy_bound=bound,
        empirical_min_entropy=empirical,
        fidelity_to_target=fid,
        chsh_S=chsh_value,
        extractable_bits=int(math.floor(bound * raw_length)),
    )
