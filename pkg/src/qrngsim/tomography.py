"""Stokes-parameter state estimation and physical (PSD) projection.

Axis convention: sigma_z is diagonal in HV (S3 = pH - pV), sigma_x in DA
(S1 = pD - pA), sigma_y in RL (S2 = pR - pL), so rho[0,1] = (S1 - i S2)/2.
Outcome 0 of each basis is the +1 eigenstate (H, D, R).

Two-photon Stokes vectors are flat length-16 arrays indexed S[4*i + j];
S[0] = 1. Correlation terms come from the matching basis-pair record; the
marginal terms S_{i0} and S_{0j} pool the counts of every record that
measures the relevant single-arm basis (counts-proportional weighting).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ValidationError
from . import linalg
from .optics import (
    ArmSetting,
    CountRecord,
    DA_ARM,
    HV_ARM,
    MeasurementSetting,
    RL_ARM,
    exact_probabilities,
)
from .states import DensityMatrix, as_state_array, coherence, fidelity, subspace_restrict
from .streams import draw_counts, substream

PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

# Pauli index of each measurement basis and the arm settings that realize it.
BASIS_AXIS = {"DA": 1, "RL": 2, "HV": 3}
BASIS_ARMS = {"HV": HV_ARM, "DA": DA_ARM, "RL": RL_ARM}
BASIS_NAMES = ("HV", "DA", "RL")

_OUTCOME_SIGN = (1.0, -1.0)


def basis_of_arm(arm: ArmSetting) -> str:
    """Name of the canonical basis an arm setting realizes."""
    for name, ref in BASIS_ARMS.items():
        if abs(arm.hwp - ref.hwp) <= 1e-9 and abs(arm.qwp - ref.qwp) <= 1e-9:
            return name
    raise ValidationError(
        f"arm setting (hwp={arm.hwp}, qwp={arm.qwp}) is not one of the HV/DA/RL tomography settings"
    )


def single_setting(basis: str) -> MeasurementSetting:
    return MeasurementSetting(BASIS_ARMS[basis])


def pair_setting(basis1: str, basis2: str) -> MeasurementSetting:
    return MeasurementSetting(BASIS_ARMS[basis1], BASIS_ARMS[basis2])


def stokes_from_probabilities_single(probs: Mapping[str, Sequence[float]]) -> np.ndarray:
    """Length-4 Stokes vector from per-basis outcome probabilities."""
    missing = [b for b in BASIS_NAMES if b not in probs]
    if missing:
        raise ValidationError(f"missing tomography bases: {', '.join(missing)}")
    s = np.ones(4)
    for basis, axis in BASIS_AXIS.items():
        p0, p1 = probs[basis]
        s[axis] = float(p0) - float(p1)
    return s


def _frequencies(rec: CountRecord) -> np.ndarray:
    detected = rec.detected
    if detected == 0:
        raise ValidationError("count record has zero detected counts")
    return np.asarray(rec.counts, dtype=float) / detected


def _group_single(records: Iterable[CountRecord]) -> dict[str, np.ndarray]:
    pooled: dict[str, np.ndarray] = {}
    for rec in records:
        if rec.setting.n_arms != 1:
            raise ValidationError("single-photon tomography got a two-arm record")
        basis = basis_of_arm(rec.setting.arm1)
        pooled[basis] = pooled.get(basis, np.zeros(2, dtype=np.int64)) + np.asarray(rec.counts)
    return pooled


def stokes_from_counts_single(records: Iterable[CountRecord]) -> np.ndarray:
    """Stokes estimate from HV, DA, RL count records (pooled per basis)."""
    pooled = _group_single(records)
    missing = [b for b in BASIS_NAMES if b not in pooled]
    if missing:
        raise ValidationError(f"missing tomography bases: {', '.join(missing)}")
    probs = {}
    for basis, counts in pooled.items():
        total = int(counts.sum())
        if total == 0:
            raise ValidationError(f"zero detected counts in basis {basis}")
        probs[basis] = counts / total
    return stokes_from_probabilities_single(probs)


def reconstruct_single(s: np.ndarray) -> np.ndarray:
    """rho = 1/2 sum_i S_i sigma_i. Hermitian and unit trace; PSD not guaranteed."""
    s = np.asarray(s, dtype=float)
    if s.shape != (4,):
        raise ValidationError(f"single-photon Stokes vector must have length 4, got {s.shape}")
    m = np.zeros((2, 2), dtype=complex)
    for i in range(4):
        m += s[i] * PAULI[i]
    return m / 2.0


def stokes_from_probabilities_two(probs: Mapping[tuple[str, str], Sequence[float]]) -> np.ndarray:
    """Length-16 Stokes vector from per-basis-pair outcome probabilities.

    probs maps (basis1, basis2) to the 4 outcome probabilities ordered
    00, 01, 10, 11. With exact probabilities the marginal average over the
    three providing settings is exact as well.
    """
    missing = [
        f"{b1}x{b2}" for b1 in BASIS_NAMES for b2 in BASIS_NAMES if (b1, b2) not in probs
    ]
    if missing:
        raise ValidationError(f"missing tomography basis pairs: {', '.join(missing)}")
    s = np.zeros(16)
    s[0] = 1.0
    for (b1, b2), p in probs.items():
        p = np.asarray(p, dtype=float)
        i, j = BASIS_AXIS[b1], BASIS_AXIS[b2]
        s[4 * i + j] = p[0] - p[1] - p[2] + p[3]
    for b1 in BASIS_NAMES:
        i = BASIS_AXIS[b1]
        s[4 * i] = float(
            np.mean([probs[(b1, b2)][0] + probs[(b1, b2)][1]
                     - probs[(b1, b2)][2] - probs[(b1, b2)][3] for b2 in BASIS_NAMES])
        )
    for b2 in BASIS_NAMES:
        j = BASIS_AXIS[b2]
        s[j] = float(
            np.mean([probs[(b1, b2)][0] - probs[(b1, b2)][1]
                     + probs[(b1, b2)][2] - probs[(b1, b2)][3] for b1 in BASIS_NAMES])
        )
    return s


def _group_pairs(records: Iterable[CountRecord]) -> dict[tuple[str, str], np.ndarray]:
    pooled: dict[tuple[str, str], np.ndarray] = {}
    for rec in records:
        if rec.setting.n_arms != 2:
            raise ValidationError("two-photon tomography got a single-arm record")
        key = (basis_of_arm(rec.setting.arm1), basis_of_arm(rec.setting.arm2))
        pooled[key] = pooled.get(key, np.zeros(4, dtype=np.int64)) + np.asarray(rec.counts)
    return pooled


def stokes_from_counts_two(records: Iterable[CountRecord]) -> np.ndarray:
    """Stokes estimate from the 9 basis-pair coincidence records.

    Correlation terms use the matching record's frequencies; marginal terms
    pool raw counts over the three records that measure the same single-arm
    basis, which weights each record by its detected counts.
    """
    pooled = _group_pairs(records)
    missing = [
        f"{b1}x{b2}" for b1 in BASIS_NAMES for b2 in BASIS_NAMES if (b1, b2) not in pooled
    ]
    if missing:
        raise ValidationError(f"missing tomography basis pairs: {', '.join(missing)}")
    s = np.zeros(16)
    s[0] = 1.0
    sign = np.array([+1.0, -1.0, -1.0, +1.0])
    sign1 = np.array([+1.0, +1.0, -1.0, -1.0])  # arm1 marginal
    sign2 = np.array([+1.0, -1.0, +1.0, -1.0])  # arm2 marginal
    for (b1, b2), counts in pooled.items():
        total = int(counts.sum())
        if total == 0:
            raise ValidationError(f"zero detected counts in basis pair {b1}x{b2}")
        i, j = BASIS_AXIS[b1], BASIS_AXIS[b2]
        s[4 * i + j] = float(sign @ counts) / total
    for b1 in BASIS_NAMES:
        i = BASIS_AXIS[b1]
        signed = sum(float(sign1 @ pooled[(b1, b2)]) for b2 in BASIS_NAMES)
        total = sum(int(pooled[(b1, b2)].sum()) for b2 in BASIS_NAMES)
        s[4 * i] = signed / total
    for b2 in BASIS_NAMES:
        j = BASIS_AXIS[b2]
        signed = sum(float(sign2 @ pooled[(b1, b2)]) for b1 in BASIS_NAMES)
        total = sum(int(pooled[(b1, b2)].sum()) for b1 in BASIS_NAMES)
        s[j] = signed / total
    return s


def reconstruct_two(s: np.ndarray) -> np.ndarray:
    """rho = 1/4 sum_ij S_ij sigma_i (x) sigma_j."""
    s = np.asarray(s, dtype=float)
    if s.shape != (16,):
        raise ValidationError(f"two-photon Stokes vector must have length 16, got {s.shape}")
    m = np.zeros((4, 4), dtype=complex)
    for i in range(4):
        for j in range(4):
            m += s[4 * i + j] * np.kron(PAULI[i], PAULI[j])
    return m / 4.0


def exact_stokes(rho: DensityMatrix | np.ndarray) -> np.ndarray:
    """Stokes vector of a state from exact Born probabilities (no sampling)."""
    m = as_state_array(rho)
    if m.shape == (2, 2):
        probs = {b: exact_probabilities(m, single_setting(b)) for b in BASIS_NAMES}
        return stokes_from_probabilities_single(probs)
    if m.shape == (4, 4):
        probs = {
            (b1, b2): exact_probabilities(m, pair_setting(b1, b2))
            for b1 in BASIS_NAMES
            for b2 in BASIS_NAMES
        }
        return stokes_from_probabilities_two(probs)
    raise ValidationError(f"expected a 2x2 or 4x4 state, got {m.shape}")


def _truncate_spectrum(lam_desc: np.ndarray) -> np.ndarray:
    """Water-filling truncation of a descending, trace-1 spectrum.

    Repeatedly zeroes the most negative eigenvalue and spreads the deficit
    over the still-active ones so the trace stays 1; the result is the
    Euclidean-closest nonnegative spectrum with unit sum.
    """
    lam = lam_desc.astype(float).copy()
    active = lam.size
    while active > 0:
        shifted = lam[:active] + (1.0 - lam[:active].sum()) / active
        if shifted[active - 1] >= 0.0:
            out = np.zeros_like(lam)
            out[:active] = shifted
            return out
        active -= 1
    raise ValidationError("cannot project a spectrum with no positive weight")


def project_to_physical(
    raw: np.ndarray, label: str = "", tensor_order: str | None = None
) -> DensityMatrix:
    """Frobenius-closest unit-trace PSD matrix to a Hermitian trace-1 input."""
    m = linalg.as_complex_matrix(raw)
    linalg.require_hermitian(m, what="projection input")
    tr = float(np.trace(m).real)
    if abs(tr - 1.0) > 1e-9:
        raise ValidationError(f"projection input has trace {tr:.12g}, expected 1 within 1e-9")
    dec = linalg.hermitian_eig(m)
    lam_desc = dec.eigenvalues[::-1]
    vecs_desc = dec.eigenvectors[:, ::-1]
    lam_new = _truncate_spectrum(lam_desc)
    out = (vecs_desc * lam_new) @ vecs_desc.conj().T
    out = 0.5 * (out + out.conj().T)
    return DensityMatrix(out, label=label, tensor_order=tensor_order)


@dataclass(frozen=True)
class BootstrapResult:
    """Resampling spread of the reconstruction and its derived quantities."""

    n_resamples: int
    entry_std: np.ndarray
    coherence_mean: float
    coherence_std: float
    entropy_bound_mean: float
    entropy_bound_std: float
    fidelity_mean: float | None = None
    fidelity_std: float | None = None


@dataclass(frozen=True)
class ReconstructionReport:
    """Raw inversion, physical projection, and optional bootstrap spread."""

    dim: int
    stokes: np.ndarray
    raw: np.ndarray
    projected: DensityMatrix
    eigenvalues_raw: np.ndarray
    eigenvalues_projected: np.ndarray
    bootstrap: BootstrapResult | None = None
    fidelity_to_truth: float | None = None


def _reconstruct_raw(records: Sequence[CountRecord], dim: int) -> tuple[np.ndarray, np.ndarray]:
    if dim == 2:
        s = stokes_from_counts_single(records)
        return s, reconstruct_single(s)
    if dim == 4:
        s = stokes_from_counts_two(records)
        return s, reconstruct_two(s)
    raise ValidationError(f"dim must be 2 or 4, got {dim}")


def _derived_coherence(state: DensityMatrix) -> float:
    if state.dim == 2:
        return coherence(state)
    return coherence(subspace_restrict(state, (0, 3)))


def bootstrap_uncertainty(
    records: Sequence[CountRecord],
    n_resamples: int,
    seed: int,
    target: DensityMatrix | np.ndarray | None = None,
    convention: str = "root",
) -> BootstrapResult:
    """Multinomial-resampling spread of the full reconstruction pipeline.

    Each resample redraws every record's counts from its empirical outcome
    frequencies (same detected total), then reruns Stokes estimation,
    reconstruction, and projection. n_resamples = 0 disables resampling and
    reports zero spread; otherwise at least 100 resamples are required.
    """
    from .randomness import min_entropy_bound  # local import to avoid a cycle

    records = list(records)
    if not records:
        raise ValidationError("no count records given")
    dim = 2 if records[0].setting.n_arms == 1 else 4
    if n_resamples == 0:
        zero = np.zeros((dim, dim))
        _, raw = _reconstruct_raw(records, dim)
        state = project_to_physical(raw)
        c = _derived_coherence(state)
        f = fidelity(state, target, convention) if target is not None else None
        return BootstrapResult(
            n_resamples=0,
            entry_std=zero,
            coherence_mean=c,
            coherence_std=0.0,
            entropy_bound_mean=min_entropy_bound(min(c, 0.5)),
            entropy_bound_std=0.0,
            fidelity_mean=f,
            fidelity_std=0.0 if f is not None else None,
        )
    if n_resamples < 100:
        raise ValidationError(f"n_resamples must be 0 (disabled) or >= 100, got {n_resamples}")

    entries = np.empty((n_resamples, dim, dim), dtype=complex)
    cs = np.empty(n_resamples)
    hs = np.empty(n_resamples)
    fs = np.empty(n_resamples) if target is not None else None
    freqs = [_frequencies(rec) for rec in records]
    for r in range(n_resamples):
        rng = substream(seed, "bootstrap", r)
        resampled = []
        for rec, p in zip(records, freqs):
            counts = draw_counts(p, rec.detected, rng)
            resampled.append(
                CountRecord(
                    setting=rec.setting,
                    counts=tuple(int(c) for c in counts),
                    total_trials=rec.detected,
                    seed=rec.seed,
                )
            )
        _, raw = _reconstruct_raw(resampled, dim)
        state = project_to_physical(raw)
        entries[r] = state.matrix
        cs[r] = _derived_coherence(state)
        hs[r] = min_entropy_bound(min(cs[r], 0.5))
        if fs is not None:
            fs[r] = fidelity(state, target, convention)
    mean_entries = entries.mean(axis=0)
    entry_std = np.sqrt(np.mean(np.abs(entries - mean_entries) ** 2, axis=0))
    return BootstrapResult(
        n_resamples=n_resamples,
        entry_std=entry_std,
        coherence_mean=float(cs.mean()),
        coherence_std=float(cs.std()),
        entropy_bound_mean=float(hs.mean()),
        entropy_bound_std=float(hs.std()),
        fidelity_mean=float(fs.mean()) if fs is not None else None,
        fidelity_std=float(fs.std()) if fs is not None else None,
    )


def reconstruct_from_records(
    records: Sequence[CountRecord],
    dim: int,
    n_resamples: int = 0,
    seed: int = 0,
    truth: DensityMatrix | np.ndarray | None = None,
    convention: str = "root",
    label: str = "",
) -> ReconstructionReport:
    """Full pipeline: Stokes estimate, raw inversion, projection, bootstrap."""
    records = list(records)
    s, raw = _reconstruct_raw(records, dim)
    projected = project_to_physical(raw, label=label)
    boot = None
    if n_resamples:
        boot = bootstrap_uncertainty(records, n_resamples, seed, target=truth, convention=convention)
    return ReconstructionReport(
        dim=dim,
        stokes=s,
        raw=raw,
        projected=projected,
        eigenvalues_raw=linalg.hermitian_eig(raw).eigenvalues,
        eigenvalues_projected=linalg.hermitian_eig(projected.matrix).eigenvalues,
        bootstrap=boot,
        fidelity_to_truth=fidelity(projected, truth, convention) if truth is not None else None,
    )
