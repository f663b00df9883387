"""Validated polarization density matrices and derived state quantities."""

from __future__ import annotations

import numpy as np

from .errors import (
    DegenerateSubspaceError,
    DimensionError,
    NormalizationError,
    NotPsdError,
    ValidationError,
)
from . import linalg

TRACE_ATOL = 1e-9
_SUBSPACE_TRACE_FLOOR = 1e-9

TENSOR_ORDERS = ("signal_second", "signal_first")


class DensityMatrix:
    """Hermitian, unit-trace matrix of dimension 2 or 4.

    PSD is checked by default but can be waived with require_psd=False for
    raw tomographic estimates, which legitimately carry small negative
    eigenvalues before projection. Hermiticity and unit trace are always
    enforced.

    tensor_order records which tensor factor of a two-photon state is the
    signal photon ("signal_second" unless stated otherwise).
    """

    __slots__ = ("_matrix", "label", "tensor_order")

    def __init__(
        self,
        matrix: np.ndarray,
        label: str = "",
        tensor_order: str | None = None,
        require_psd: bool = True,
    ):
        m = linalg.as_complex_matrix(matrix)
        if m.shape[0] not in (2, 4):
            raise DimensionError(f"density matrix must be 2x2 or 4x4, got {m.shape}")
        linalg.require_hermitian(m, what="density matrix")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > TRACE_ATOL:
            raise NormalizationError(
                f"density matrix trace {tr:.12g} differs from 1 beyond {TRACE_ATOL:.1e}"
            )
        if require_psd:
            lam_min = float(linalg.hermitian_eig(m).eigenvalues[0])
            if lam_min < linalg.PSD_EIGENVALUE_FLOOR:
                raise NotPsdError(
                    f"density matrix has eigenvalue {lam_min:.3e} below {linalg.PSD_EIGENVALUE_FLOOR:.1e}"
                )
        if m.shape[0] == 4:
            tensor_order = tensor_order or "signal_second"
            if tensor_order not in TENSOR_ORDERS:
                raise ValidationError(f"tensor_order must be one of {TENSOR_ORDERS}, got {tensor_order!r}")
        elif tensor_order is not None:
            raise ValidationError("tensor_order applies only to 4x4 states")
        m.setflags(write=False)
        self._matrix = m
        self.label = label
        self.tensor_order = tensor_order

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim}, label={self.label!r})"


def as_state_array(rho: DensityMatrix | np.ndarray) -> np.ndarray:
    """Accept a DensityMatrix or a bare ndarray; return the ndarray."""
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    return linalg.as_complex_matrix(rho)


def from_pure(amplitudes, label: str = "", tensor_order: str | None = None) -> DensityMatrix:
    """Rank-1 projector |psi><psi| from a normalized amplitude vector."""
    psi = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if psi.size not in (2, 4):
        raise DimensionError(f"amplitude vector must have length 2 or 4, got {psi.size}")
    norm_sq = float(np.sum(np.abs(psi) ** 2))
    if abs(norm_sq - 1.0) > 1e-12:
        raise NormalizationError(f"amplitudes have squared norm {norm_sq:.12g}, expected 1 within 1e-12")
    return DensityMatrix(np.outer(psi, psi.conj()), label=label, tensor_order=tensor_order)


def coherence(rho: DensityMatrix | np.ndarray) -> float:
    """Magnitude of the HV off-diagonal element of a one-qubit state."""
    m = as_state_array(rho)
    if m.shape != (2, 2):
        raise DimensionError(f"coherence is defined for 2x2 states, got {m.shape}")
    return float(abs(m[0, 1]))


def purity(rho: DensityMatrix | np.ndarray) -> float:
    """Tr rho^2."""
    m = as_state_array(rho)
    return float(np.trace(m @ m).real)


def _pure_component(m: np.ndarray) -> np.ndarray | None:
    """Top eigenvector if m is rank one (largest eigenvalue within 1e-9 of 1)."""
    dec = linalg.hermitian_eig(m)
    if float(dec.eigenvalues[-1]) >= 1.0 - 1e-9:
        return dec.eigenvectors[:, -1]
    return None


def fidelity(
    rho: DensityMatrix | np.ndarray,
    sigma: DensityMatrix | np.ndarray,
    convention: str = "root",
) -> float:
    """Fidelity between two states, in [0, 1].

    convention "root" is Tr sqrt(sqrt(rho) sigma sqrt(rho)); "squared" is its
    square. When either argument is pure the exact rank-1 identity
    F_squared = <psi|other|psi> is used, which also covers raw tomographic
    matrices that are slightly non-PSD; the general mixed-mixed path goes
    through psd_sqrt and therefore requires PSD inputs.
    """
    if convention not in ("root", "squared"):
        raise ValidationError(f"convention must be 'root' or 'squared', got {convention!r}")
    a = as_state_array(rho)
    b = as_state_array(sigma)
    if a.shape != b.shape:
        raise DimensionError(f"fidelity needs equal dims, got {a.shape} and {b.shape}")
    psi = _pure_component(b)
    other = a
    if psi is None:
        psi = _pure_component(a)
        other = b
    if psi is not None:
        f_sq = float((psi.conj() @ other @ psi).real)
    else:
        root_a = linalg.psd_sqrt(a)
        inner = root_a @ b @ root_a
        lam = np.clip(linalg.hermitian_eig(inner).eigenvalues, 0.0, None)
        f_sq = float(np.sum(np.sqrt(lam))) ** 2
    f_sq = min(max(f_sq, 0.0), 1.0)
    return f_sq if convention == "squared" else float(np.sqrt(f_sq))


def subspace_restrict(rho: DensityMatrix | np.ndarray, indices: tuple[int, int]) -> DensityMatrix:
    """Renormalized 2x2 block of a 4x4 state at the given index pair."""
    m = as_state_array(rho)
    if m.shape != (4, 4):
        raise DimensionError(f"subspace_restrict needs a 4x4 state, got {m.shape}")
    i, j = int(indices[0]), int(indices[1])
    if i == j or not (0 <= i < 4 and 0 <= j < 4):
        raise ValidationError(f"indices must be a pair of distinct values in 0..3, got {indices}")
    block = m[np.ix_([i, j], [i, j])]
    block_trace = float(np.trace(block).real)
    if block_trace <= _SUBSPACE_TRACE_FLOOR:
        raise DegenerateSubspaceError(
            f"subspace ({i},{j}) has trace {block_trace:.3e}, below {_SUBSPACE_TRACE_FLOOR:.1e}"
        )
    label = ""
    if isinstance(rho, DensityMatrix) and rho.label:
        label = f"{rho.label} [{i},{j} subspace]"
    return DensityMatrix(block / block_trace, label=label)
