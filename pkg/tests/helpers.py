"""Shared generators for seeded property tests."""

import numpy as np


def random_density(rng, dim, dof=None):
    """Full-rank random density matrix from a complex Ginibre factor."""
    if dof is None:
        dof = dim
    g = rng.normal(size=(dim, dof)) + 1j * rng.normal(size=(dim, dof))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_pure(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_hermitian(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (g + g.conj().T) / 2.0


_PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
_PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def bloch_matrix(r):
    return 0.5 * (
        np.eye(2, dtype=complex) + r[0] * _PAULI_X + r[1] * _PAULI_Y + r[2] * _PAULI_Z
    )


def bloch_vector(m):
    m = np.asarray(m)
    return np.array(
        [2.0 * m[0, 1].real, -2.0 * m[0, 1].imag, (m[0, 0] - m[1, 1]).real]
    )


def ball_nearest_grid(r_raw, n_stages=12, n_axis=121):
    """Brute-force nearest point of the unit ball to an outside point r_raw.

    The squared distance from r_raw (length R) to a ball point at radius
    rho and angle psi from the r_raw direction is
    R^2 + rho^2 - 2 R rho cos(psi), independent of the azimuth. That is a
    coordinate identity, so a uniform 2-d grid over (rho, psi) is an exact
    reduction of the 3-d search, not an assumption about the minimizer.

    Staged refinement with windows wide enough to provably keep the global
    optimum: a grid with cell c contains a feasible point within ~2c of the
    optimum, so its best value is within eps = 3c of optimal; the distance
    rises linearly in rho (slope ~1) and quadratically in psi (curvature
    (R-1)/R), so the optimum sits within eps and sqrt(2 eps (R-1)/R) of the
    best grid point along the two axes.

    Returns (rho, psi, distance) of the best grid point, all in Bloch
    coordinates (Frobenius distance = Bloch distance / sqrt(2)).
    """
    r_raw = np.asarray(r_raw, dtype=float)
    big_r = float(np.linalg.norm(r_raw))
    assert big_r > 1.0, "oracle expects an unphysical (outside-ball) input"
    k = (big_r - 1.0) / big_r
    rho_lo, rho_hi = 0.0, 1.0
    psi_lo, psi_hi = 0.0, np.pi
    best = None
    for _ in range(n_stages):
        rho = np.linspace(rho_lo, rho_hi, n_axis)
        psi = np.linspace(psi_lo, psi_hi, n_axis)
        cell = max(
            (rho_hi - rho_lo) / (n_axis - 1), (psi_hi - psi_lo) / (n_axis - 1)
        )
        rr, pp = np.meshgrid(rho, psi, indexing="ij")
        d2 = big_r**2 + rr**2 - 2.0 * big_r * rr * np.cos(pp)
        idx = np.unravel_index(np.argmin(d2), d2.shape)
        best = (float(rr[idx]), float(pp[idx]), float(np.sqrt(max(d2[idx], 0.0))))
        eps = 3.0 * cell
        if eps < 3e-5:
            break
        rho_hw = 1.3 * eps + 2.0 * cell
        psi_hw = 1.3 * np.sqrt(2.0 * eps * max(k, 1e-12)) + 2.0 * cell
        rho_lo = max(0.0, best[0] - rho_hw)
        rho_hi = min(1.0, best[0] + rho_hw)
        psi_lo = max(0.0, best[1] - psi_hw)
        psi_hi = min(np.pi, best[1] + psi_hw)
    return best


def ball_oracle_position_gap(r_impl, r_raw, oracle):
    """Largest Bloch distance from r_impl to the oracle's minimizer set.

    The oracle pins (rho, psi); by symmetry its answer is a full circle of
    azimuths around the r_raw direction. Returns the distance from r_impl
    to the farthest point of that circle, an upper bound on the mismatch
    against every way of completing the oracle's answer to a 3-d point.
    """
    rho, psi, _ = oracle
    r_raw = np.asarray(r_raw, dtype=float)
    u = r_raw / np.linalg.norm(r_raw)
    r_impl = np.asarray(r_impl, dtype=float)
    par = float(r_impl @ u)
    perp = float(np.linalg.norm(r_impl - par * u))
    axial = par - rho * np.cos(psi)
    radial = perp + rho * np.sin(psi)
    return float(np.hypot(axial, radial))
