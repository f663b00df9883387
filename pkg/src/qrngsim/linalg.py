"""Dense complex linear algebra for 2- and 4-dimensional Hermitian matrices.

Everything here operates on plain complex ndarrays. The eigensolver is a
cyclic complex Jacobi iteration: at these dimensions it is fast, robust, and
bit-for-bit deterministic across runs and platforms, which the seeded
simulation contracts rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DimensionError, NotPsdError, ValidationError

HERMITIAN_ATOL = 1e-9
PSD_EIGENVALUE_FLOOR = -1e-9

_JACOBI_OFFDIAG_TOL = 1e-12
_JACOBI_MAX_SWEEPS = 100


def as_complex_matrix(m: np.ndarray) -> np.ndarray:
    """Return a square complex ndarray copy of m."""
    a = np.array(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    return a


def is_hermitian(m: np.ndarray, atol: float = HERMITIAN_ATOL) -> bool:
    """True if m equals its conjugate transpose within atol per entry."""
    return bool(np.max(np.abs(m - m.conj().T)) <= atol)


def require_hermitian(m: np.ndarray, atol: float = HERMITIAN_ATOL, what: str = "matrix") -> None:
    dev = float(np.max(np.abs(m - m.conj().T)))
    if dev > atol:
        raise ValidationError(f"{what} is not Hermitian: max |m - m^H| = {dev:.3e} > {atol:.1e}")


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with (i*db+k, j*db+l) = a[i,j]*b[k,l] ordering."""
    return np.kron(as_complex_matrix(a), as_complex_matrix(b))


def partial_trace(rho: np.ndarray, traced_factor: str) -> np.ndarray:
    """Trace out one qubit of a 4x4 two-qubit matrix.

    traced_factor "first": out[i,j] = sum_k rho[2k+i, 2k+j];
    traced_factor "second": out[i,j] = sum_k rho[2i+k, 2j+k].
    """
    a = as_complex_matrix(rho)
    if a.shape != (4, 4):
        raise DimensionError(f"partial_trace needs a 4x4 matrix, got {a.shape}")
    if traced_factor not in ("first", "second"):
        raise ValidationError(f"traced_factor must be 'first' or 'second', got {traced_factor!r}")
    t = a.reshape(2, 2, 2, 2)  # indices: (i1, i2, j1, j2) for rho[2*i1+i2, 2*j1+j2]
    if traced_factor == "first":
        return np.einsum("kikj->ij", t)
    return np.einsum("ikjk->ij", t)


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in ascending order; eigenvector columns match by index."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _jacobi_rotation(a: np.ndarray, p: int, q: int) -> np.ndarray | None:
    """Unitary G such that (G^H a G)[p,q] = 0, or None if already zero."""
    apq = a[p, q]
    r = abs(apq)
    if r == 0.0:
        return None
    phase = apq / r
    tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
    t = (1.0 if tau >= 0.0 else -1.0) / (abs(tau) + math.hypot(1.0, tau))
    c = 1.0 / math.hypot(1.0, t)
    s = t * c
    g = np.eye(a.shape[0], dtype=complex)
    g[p, p] = c
    g[q, q] = c
    g[p, q] = s * phase
    g[q, p] = -s * phase.conjugate()
    return g


def _offdiag_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def hermitian_eig(m: np.ndarray) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Converges when the off-diagonal Frobenius norm drops below 1e-12, with a
    hard cap of 100 sweeps. Raises ValidationError for non-Hermitian input
    (beyond 1e-9) and ConvergenceError if the cap is hit.
    """
    a = as_complex_matrix(m)
    require_hermitian(a, what="eigensolver input")
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    pairs = [(p, q) for p in range(n) for q in range(p + 1, n)]
    for _ in range(_JACOBI_MAX_SWEEPS):
        if _offdiag_norm(a) < _JACOBI_OFFDIAG_TOL:
            break
        for p, q in pairs:
            g = _jacobi_rotation(a, p, q)
            if g is None:
                continue
            a = g.conj().T @ a @ g
            v = v @ g
    else:
        raise ConvergenceError(
            f"Jacobi eigensolver did not converge in {_JACOBI_MAX_SWEEPS} sweeps"
        )
    eigenvalues = np.diag(a).real.copy()
    order = np.argsort(eigenvalues, kind="stable")
    return EigenDecomposition(
        eigenvalues=eigenvalues[order],
        eigenvectors=np.ascontiguousarray(v[:, order]),
    )


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    """Hermitian square root of a PSD matrix.

    Eigenvalues in [-1e-9, 0) are clamped to zero; anything lower raises
    NotPsdError. The result R satisfies R @ R = m within 1e-8 per entry.
    """
    dec = hermitian_eig(m)
    lam = dec.eigenvalues
    if float(lam.min()) < PSD_EIGENVALUE_FLOOR:
        raise NotPsdError(
            f"matrix is not PSD: smallest eigenvalue {float(lam.min()):.3e} < {PSD_EIGENVALUE_FLOOR:.1e}"
        )
    lam = np.clip(lam, 0.0, None)
    v = dec.eigenvectors
    root = (v * np.sqrt(lam)) @ v.conj().T
    return 0.5 * (root + root.conj().T)
