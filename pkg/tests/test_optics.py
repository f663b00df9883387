"""Waveplate model, projectors, measurement settings, and count simulation."""

import numpy as np
import pytest

from helpers import random_density
from qrngsim import (
    DA_ARM,
    HV_ARM,
    RL_ARM,
    ArmSetting,
    CountRecord,
    DensityMatrix,
    MeasurementSetting,
    SourceModel,
    ValidationError,
    analyzer_unitary,
    bell_phi_plus_state,
    exact_probabilities,
    from_pure,
    make_source,
    setting_projectors,
    simulate_counts,
    waveplate_unitary,
)

H = np.array([1.0, 0.0], dtype=complex)
V = np.array([0.0, 1.0], dtype=complex)
D = (H + V) / np.sqrt(2.0)
A = (H - V) / np.sqrt(2.0)
R = (H + 1j * V) / np.sqrt(2.0)
L = (H - 1j * V) / np.sqrt(2.0)


def _pure(vec):
    return np.outer(vec, vec.conj())


def test_arm_setting_angle_range():
    ArmSetting(0.0, 179.9)
    with pytest.raises(ValidationError):
        ArmSetting(180.0, 0.0)
    with pytest.raises(ValidationError):
        ArmSetting(0.0, -1.0)


def test_waveplates_are_unitary():
    for kind in ("half", "quarter"):
        for theta in np.arange(0.0, 180.0, 7.5):
            u = waveplate_unitary(kind, theta)
            assert np.max(np.abs(u @ u.conj().T - np.eye(2))) < 1e-12


def test_waveplate_kind_validation():
    with pytest.raises(ValidationError):
        waveplate_unitary("third", 10.0)


def test_half_wave_plate_rotates_linear_polarization():
    # HWP at theta maps H onto the linear state at 2*theta, up to phase
    for theta in (0.0, 10.0, 22.5, 45.0, 60.0):
        u = waveplate_unitary("half", theta)
        out = u @ H
        angle = np.deg2rad(2.0 * theta)
        expected = np.array([np.cos(angle), np.sin(angle)], dtype=complex)
        assert abs(abs(np.vdot(expected, out)) - 1.0) < 1e-12


def test_standard_arms_select_the_right_bases():
    # outcome 0 of each tomography arm clicks with certainty on H, D, R
    cases = [
        (HV_ARM, _pure(H), _pure(V)),
        (DA_ARM, _pure(D), _pure(A)),
        (RL_ARM, _pure(R), _pure(L)),
    ]
    for arm, plus_state, minus_state in cases:
        setting = MeasurementSetting(arm)
        p_plus = exact_probabilities(plus_state, setting)
        p_minus = exact_probabilities(minus_state, setting)
        assert np.allclose(p_plus, [1.0, 0.0], atol=1e-12)
        assert np.allclose(p_minus, [0.0, 1.0], atol=1e-12)


def test_unbiased_bases_give_half_half():
    setting = MeasurementSetting(DA_ARM)
    assert np.allclose(exact_probabilities(_pure(H), setting), [0.5, 0.5], atol=1e-12)
    setting = MeasurementSetting(RL_ARM)
    assert np.allclose(exact_probabilities(_pure(D), setting), [0.5, 0.5], atol=1e-12)


def test_projector_completeness_across_the_full_plate_range():
    # one-degree sweep of both plates: the two outcome projectors always
    # resolve the identity
    eye = np.eye(2)
    for hwp in range(0, 180):
        for qwp in range(0, 180, 15):
            u = analyzer_unitary(ArmSetting(float(hwp), float(qwp)))
            p0 = u.conj().T @ np.diag([1.0, 0.0]).astype(complex) @ u
            p1 = u.conj().T @ np.diag([0.0, 1.0]).astype(complex) @ u
            assert np.max(np.abs(p0 + p1 - eye)) < 1e-12
    for qwp in range(0, 180):
        u = analyzer_unitary(ArmSetting(11.0, float(qwp)))
        p0 = u.conj().T @ np.diag([1.0, 0.0]).astype(complex) @ u
        p1 = u.conj().T @ np.diag([0.0, 1.0]).astype(complex) @ u
        assert np.max(np.abs(p0 + p1 - eye)) < 1e-12


def test_pair_projectors_resolve_identity_and_order():
    setting = MeasurementSetting(HV_ARM, DA_ARM)
    projs = setting_projectors(setting)
    assert len(projs) == 4
    total = sum(projs)
    assert np.max(np.abs(total - np.eye(4))) < 1e-12
    # outcome order 00, 01, 10, 11 with arm 1 on the first tensor factor
    hd = np.kron(_pure(H), _pure(D))
    p = [np.trace(pk @ hd).real for pk in projs]
    assert np.allclose(p, [1.0, 0.0, 0.0, 0.0], atol=1e-12)
    va = np.kron(_pure(V), _pure(A))
    p = [np.trace(pk @ va).real for pk in projs]
    assert np.allclose(p, [0.0, 0.0, 0.0, 1.0], atol=1e-12)


def test_exact_probabilities_sum_to_one():
    for seed in range(5):
        rng = np.random.default_rng(500 + seed)
        rho = random_density(rng, 4)
        setting = MeasurementSetting(DA_ARM, RL_ARM)
        p = exact_probabilities(rho, setting)
        assert abs(p.sum() - 1.0) < 1e-12
        assert np.all(p >= -1e-12)


def test_count_record_validation():
    setting = MeasurementSetting(HV_ARM)
    CountRecord(setting=setting, counts=(40, 60), total_trials=100, seed=0)
    with pytest.raises(ValidationError):
        CountRecord(setting=setting, counts=(40, 70), total_trials=100, seed=0)
    with pytest.raises(ValidationError):
        CountRecord(setting=setting, counts=(-1, 50), total_trials=100, seed=0)
    with pytest.raises(ValidationError):
        CountRecord(setting=setting, counts=(10, 10, 10, 10), total_trials=100, seed=0)


def test_simulate_counts_is_deterministic():
    rho = from_pure(D)
    setting = MeasurementSetting(HV_ARM)
    a = simulate_counts(rho, setting, 50000, seed=3)
    b = simulate_counts(rho, setting, 50000, seed=3)
    c = simulate_counts(rho, setting, 50000, seed=4)
    assert a.counts == b.counts
    assert a.counts != c.counts
    assert a.seed == 3 and a.total_trials == 50000


def test_simulate_counts_tracks_probabilities():
    rho = DensityMatrix(np.array([[0.3, 0.0], [0.0, 0.7]], dtype=complex))
    setting = MeasurementSetting(HV_ARM)
    n = 10**6
    rec = simulate_counts(rho, setting, n, seed=12)
    assert sum(rec.counts) == n
    for k, p in enumerate((0.3, 0.7)):
        margin = 4.0 * np.sqrt(p * (1.0 - p) / n)
        assert abs(rec.counts[k] / n - p) < margin


def test_simulate_counts_efficiency_drops_trials():
    rho = from_pure(H)
    setting = MeasurementSetting(HV_ARM)
    n = 10**6
    rec = simulate_counts(rho, setting, n, efficiency=0.8, seed=5)
    assert rec.total_trials == n
    margin = 4.0 * np.sqrt(0.8 * 0.2 / n)
    assert abs(rec.detected / n - 0.8) < margin


def test_simulate_counts_background_mixes_toward_uniform():
    rho = from_pure(H)
    setting = MeasurementSetting(HV_ARM)
    n = 10**6
    rec = simulate_counts(rho, setting, n, seed=6, background=0.96)
    expected = (0.04 * 1.0 + 0.96 * 0.5, 0.04 * 0.0 + 0.96 * 0.5)
    for count, p in zip(rec.counts, expected):
        assert abs(count / n - p) < 4.0 * np.sqrt(p * (1.0 - p) / n)
    with pytest.raises(ValidationError):
        simulate_counts(rho, setting, n, seed=6, background=1.0)


def test_bell_source_limits():
    pure = bell_phi_plus_state(0.0, 1.0)
    psi = np.zeros(4, dtype=complex)
    psi[0] = psi[3] = 1.0 / np.sqrt(2.0)
    assert np.max(np.abs(pure.matrix - np.outer(psi, psi.conj()))) < 1e-12
    mixed = bell_phi_plus_state(0.3, 0.0)
    assert np.max(np.abs(mixed.matrix - np.diag([0.5, 0.0, 0.0, 0.5]))) < 1e-12
    with pytest.raises(ValidationError):
        bell_phi_plus_state(0.0, 1.5)


def test_make_source_kinds():
    pure = make_source(SourceModel(kind="pure", amplitudes=(1.0, 0.0)))
    assert np.max(np.abs(pure.matrix - np.diag([1.0, 0.0]))) < 1e-12

    mix = make_source(
        SourceModel(
            kind="classical_mixture",
            components=(((1.0, 0.0), 0.25), ((0.0, 1.0), 0.75)),
        )
    )
    assert np.max(np.abs(mix.matrix - np.diag([0.25, 0.75]))) < 1e-12

    custom = make_source(SourceModel(kind="custom", matrix=np.eye(4, dtype=complex) / 4.0))
    assert custom.dim == 4


def test_make_source_validation():
    with pytest.raises(ValidationError, match=r"components\[1\]\.weight"):
        make_source(
            SourceModel(
                kind="classical_mixture",
                components=(((1.0, 0.0), 1.2), ((0.0, 1.0), -0.2)),
            )
        )
    with pytest.raises(ValidationError, match="sum"):
        make_source(
            SourceModel(
                kind="classical_mixture",
                components=(((1.0, 0.0), 0.3), ((0.0, 1.0), 0.3)),
            )
        )
    with pytest.raises(ValidationError):
        make_source(SourceModel(kind="pure"))
    with pytest.raises(ValidationError):
        make_source(SourceModel(kind="smooth"))
    # a custom source must be a physical state
    with pytest.raises(ValidationError):
        make_source(SourceModel(kind="custom", matrix=np.diag([1.2, -0.2]).astype(complex)))
