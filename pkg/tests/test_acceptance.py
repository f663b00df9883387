"""Acceptance checks, one test per criterion.

Each test prints a single PASS or FAIL line (visible with pytest -s) and
fails the suite if any sub-check inside the criterion misses its stated
tolerance. Tolerances are written next to the asserts they guard.
"""

import math

import numpy as np
import pytest

from helpers import (
    ball_nearest_grid,
    ball_oracle_position_gap,
    bloch_matrix,
    bloch_vector,
    random_density,
)
from qrngsim import (
    BASIS_NAMES,
    BudgetError,
    DensityMatrix,
    audit,
    bell_target,
    chsh_s,
    diagonal_target,
    exact_stokes,
    extract_toeplitz,
    extract_von_neumann,
    fidelity,
    generate_bits,
    measured_pair_state,
    measured_single_state,
    min_entropy_bound,
    min_entropy_pure,
    pair_setting,
    partial_trace,
    project_to_physical,
    reconstruct_from_records,
    reconstruct_single,
    reconstruct_two,
    simulate_counts,
    single_setting,
    subspace_restrict,
    tensor_product,
)
from qrngsim.cli import main
from qrngsim.reference import (
    PUBLISHED,
    PUBLISHED_PAIR_REDUCED,
    PUBLISHED_PAIR_SUBSPACE,
    reference_rows,
)


class Criterion:
    """Collects named sub-checks and reports one PASS/FAIL line."""

    def __init__(self, number, title):
        self.number = number
        self.title = title
        self.failures = []

    def check(self, name, ok):
        if not ok:
            self.failures.append(name)

    def close(self, tol):
        def inner(name, value, expected):
            self.check(f"{name} ({value} vs {expected})", abs(value - expected) <= tol)

        return inner

    def done(self):
        verdict = "FAIL" if self.failures else "PASS"
        print(f"criterion {self.number} ({self.title}): {verdict}")
        assert not self.failures, f"criterion {self.number}: {self.failures}"


def test_criterion_1_published_values_reproduce():
    crit = Criterion(1, "published values within 0.002")
    close = crit.close(0.002)

    single = audit(measured_single_state(), "single_HV", target=diagonal_target())
    close("single p_H", single.probabilities[0], PUBLISHED["single"]["p"][0])
    close("single p_V", single.probabilities[1], PUBLISHED["single"]["p"][1])
    close("single C", single.coherence_C, PUBLISHED["single"]["C"])
    close("single F", single.fidelity_to_target, PUBLISHED["single"]["F"])
    # published entropy numbers round the coherence first
    close("single H", min_entropy_bound(PUBLISHED["single"]["C"]), PUBLISHED["single"]["H"])

    pair = audit(measured_pair_state(), "coincidence_HH_VV", target=bell_target())
    sub = subspace_restrict(measured_pair_state().matrix, (0, 3))
    for i in range(2):
        for j in range(2):
            crit.check(
                f"subspace entry {i}{j}",
                abs(sub.matrix[i, j] - PUBLISHED_PAIR_SUBSPACE[i, j]) <= 0.002,
            )
    close("pair C", pair.coherence_C, PUBLISHED["pair"]["C"])
    close("pair F", pair.fidelity_to_target, PUBLISHED["pair"]["F"])
    close("pair H", min_entropy_bound(PUBLISHED["pair"]["C"]), PUBLISHED["pair"]["H"])

    reduced = partial_trace(measured_pair_state().matrix, "first")
    for i in range(2):
        for j in range(2):
            crit.check(
                f"reduced entry {i}{j}",
                abs(reduced[i, j] - PUBLISHED_PAIR_REDUCED[i, j]) <= 0.002,
            )
    close("reduced C", abs(reduced[0, 1]), PUBLISHED["reduced"]["C"])
    close(
        "reduced H", min_entropy_bound(PUBLISHED["reduced"]["C"]), PUBLISHED["reduced"]["H"]
    )

    rows = reference_rows("root")
    crit.check("no failing summary rows", all(r.status != "fail" for r in rows))
    crit.done()


def test_criterion_2_entropy_bound_function():
    crit = Criterion(2, "entropy bound endpoints, monotonicity, pure identity")
    crit.check("H(0) = 0", abs(min_entropy_bound(0.0)) <= 1e-12)
    crit.check("H(0.5) = 1", abs(min_entropy_bound(0.5) - 1.0) <= 1e-12)
    grid = np.linspace(0.0, 0.5, 10_000)
    values = np.array([min_entropy_bound(float(c)) for c in grid])
    crit.check("strictly increasing on 10^4 grid", bool(np.all(np.diff(values) > 0.0)))
    pure_ok = all(
        abs(
            min_entropy_pure(float(a_sq))
            - min_entropy_bound(math.sqrt(max(float(a_sq) * (1.0 - float(a_sq)), 0.0)))
        )
        <= 1e-12
        for a_sq in np.linspace(0.0, 1.0, 100)
    )
    crit.check("pure identity on 100 grid", pure_ok)
    crit.done()


def test_criterion_3_tomography_round_trips():
    crit = Criterion(3, "exact and Monte Carlo reconstruction")
    worst_exact = 0.0
    for index in range(500):
        dim = 2 if index < 250 else 4
        rng = np.random.default_rng(100_000 + index)
        rho = random_density(rng, dim)
        rebuilt = (reconstruct_single if dim == 2 else reconstruct_two)(
            exact_stokes(rho)
        )
        worst_exact = max(worst_exact, float(np.max(np.abs(rebuilt - rho))))
    crit.check(f"exact round trip (worst {worst_exact:.2e})", worst_exact <= 1e-12)

    worst_fid = 1.0
    for index in range(50):
        dim = 2 if index < 25 else 4
        rng = np.random.default_rng(200_000 + index)
        rho = random_density(rng, dim)
        truth = DensityMatrix(rho)
        if dim == 2:
            settings = [single_setting(b) for b in BASIS_NAMES]
        else:
            settings = [pair_setting(a, b) for a in BASIS_NAMES for b in BASIS_NAMES]
        records = [
            simulate_counts(truth, setting, 1_000_000, seed=300_000 + index)
            for setting in settings
        ]
        report = reconstruct_from_records(records, dim, truth=truth)
        worst_fid = min(worst_fid, report.fidelity_to_truth)
    crit.check(f"MC fidelity >= 0.995 (worst {worst_fid:.6f})", worst_fid >= 0.995)
    crit.done()


def test_criterion_4_projection_against_brute_force():
    crit = Criterion(4, "physicality projection")
    for dim in (2, 4):
        for seed in range(25):
            rng = np.random.default_rng(400_000 + 100 * dim + seed)
            g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            raw = (g + g.conj().T) / 2.0
            raw += np.eye(dim) * (1.0 - np.trace(raw).real) / dim
            proj = project_to_physical(raw)  # constructor enforces PSD
            crit.check(
                f"unit trace dim {dim} seed {seed}",
                abs(np.trace(proj.matrix).real - 1.0) <= 1e-9,
            )

    worst = 0.0
    for seed in range(100):
        rng = np.random.default_rng(500_000 + seed)
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        radius = float(rng.uniform(1.002, 1.05 if seed < 50 else 2.2))
        r_raw = radius * direction
        proj = project_to_physical(bloch_matrix(r_raw))
        r_impl = bloch_vector(proj.matrix)
        oracle = ball_nearest_grid(r_raw)
        gap = ball_oracle_position_gap(r_impl, r_raw, oracle) / math.sqrt(2.0)
        dist_gap = abs(np.linalg.norm(r_impl - r_raw) - oracle[2]) / math.sqrt(2.0)
        worst = max(worst, gap, dist_gap)
    crit.check(f"matches ball oracle within 2e-3 (worst {worst:.2e})", worst <= 2e-3)
    crit.done()


def test_criterion_5_chsh_witness():
    crit = Criterion(5, "CHSH values and bounds")
    crit.check(
        "maximally entangled S = 2 sqrt 2",
        abs(chsh_s(bell_target()) - 2.0 * math.sqrt(2.0)) <= 1e-9,
    )
    rng = np.random.default_rng(20_240_817)
    worst = 0.0
    for _ in range(10_000):
        w = float(rng.uniform(0.0, 1.0))
        rho = w * tensor_product(random_density(rng, 2), random_density(rng, 2))
        rho += (1.0 - w) * tensor_product(
            random_density(rng, 2), random_density(rng, 2)
        )
        worst = max(worst, abs(chsh_s(rho)))
    crit.check(f"separable |S| <= 2 (worst {worst:.6f})", worst <= 2.0 + 1e-9)
    crit.check("measured pair violates S = 2", chsh_s(measured_pair_state()) > 2.0)
    crit.done()


def test_criterion_6_extractors():
    crit = Criterion(6, "extractor behavior")
    rng = np.random.default_rng(616)
    from qrngsim import BitStream

    raw = BitStream(bits=(rng.random(1_000_000) < 0.75).astype(np.uint8))
    out = extract_von_neumann(raw)
    n_out = out.bits.size
    sigma = 0.5 / math.sqrt(n_out)
    bias = abs(float(out.bits.mean()) - 0.5)
    crit.check(
        f"von Neumann bias {bias:.2e} < 5 sigma ({5 * sigma:.2e})", bias < 5.0 * sigma
    )

    state = measured_single_state()
    n_raw = 1_000_000
    raw = generate_bits(state, "single_HV", n_raw, seed=61)
    report = audit(state, "single_HV", raw_length=n_raw)
    budget = report.min_entropy_bound * n_raw
    accepted = extract_toeplitz(raw, 580_000, seed=62, entropy_budget_bits=budget)
    crit.check("0.58 n output accepted", accepted.bits.size == 580_000)
    try:
        extract_toeplitz(raw, 600_000, seed=62, entropy_budget_bits=budget)
        crit.check("0.60 n output rejected", False)
    except BudgetError:
        crit.check("0.60 n output rejected", True)
    crit.done()


def test_criterion_7_reruns_are_byte_identical(tmp_path):
    crit = Criterion(7, "seeded pipelines rerun byte-identically")
    config = {
        "source": {"kind": "bell_phi_plus", "visibility": 0.95},
        "settings": [f"{a}x{b}" for a in BASIS_NAMES for b in BASIS_NAMES],
        "trials_per_setting": 50_000,
        "efficiency": 0.9,
        "seed": 77,
    }
    from qrngsim.serialize import dump_json

    config_path = tmp_path / "run.json"
    dump_json(config, config_path)

    def run_pipeline(tag):
        base = tmp_path / tag
        out = base / "sim"
        assert main(["simulate", "--config", str(config_path), "--out", str(out)]) == 0
        assert (
            main(
                [
                    "simulate",
                    "--config",
                    str(config_path),
                    "--out",
                    str(base / "sim_csv"),
                    "--format",
                    "csv",
                ]
            )
            == 0
        )
        assert (
            main(
                [
                    "tomo",
                    "--records",
                    str(out / "counts.json"),
                    "--truth",
                    str(out / "state.json"),
                    "--bootstrap",
                    "100",
                    "--out",
                    str(base / "report.json"),
                ]
            )
            == 0
        )
        assert (
            main(
                [
                    "audit",
                    "--state",
                    str(out / "state.json"),
                    "--raw-length",
                    "10000",
                    "--out",
                    str(base / "audit.json"),
                ]
            )
            == 0
        )
        for extractor in ("none", "von_neumann", "toeplitz"):
            assert (
                main(
                    [
                        "bits",
                        "--state",
                        str(out / "state.json"),
                        "--scheme",
                        "single_HV",
                        "--n-bits",
                        "20000",
                        "--seed",
                        "9",
                        "--extractor",
                        extractor,
                        "--out",
                        str(base / f"{extractor}.bin"),
                    ]
                )
                == 0
            )
        assert main(["reproduce-paper", "--out", str(base / "table.json")]) == 0
        names = [
            "sim/counts.json",
            "sim/state.json",
            "sim/manifest.json",
            "sim_csv/counts.csv",
            "report.json",
            "audit.json",
            "table.json",
        ]
        names += [f"{e}.bin" for e in ("none", "von_neumann", "toeplitz")]
        names += [f"{e}.bin.json" for e in ("none", "von_neumann", "toeplitz")]
        return {name: (base / name).read_bytes() for name in names}

    first = run_pipeline("first")
    second = run_pipeline("second")
    for name in first:
        crit.check(f"{name} identical", first[name] == second[name])
    crit.done()
