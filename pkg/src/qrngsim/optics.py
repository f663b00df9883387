"""Jones-calculus analyzer model, source models, and seeded count simulation.

The analyzer in each arm is a quarter-wave plate followed by a half-wave
plate and a polarizing beam splitter. A retarder with fast axis at angle
theta is R(theta) = Rot(-theta) diag(1, e^{i delta}) Rot(theta) with
delta = pi for a half-wave plate and pi/2 for a quarter-wave plate. The
projective outcomes of a setting are P_k = U^H |k><k| U with
U = HWP(theta_h) QWP(theta_q), i.e. the plates applied in beam order.

Angle-to-basis table reproduced by this convention:
(0, 0) measures HV, (22.5, 45) measures DA, (0, 45) measures RL.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ValidationError
from .states import DensityMatrix, as_state_array, from_pure
from .linalg import tensor_product
from .streams import draw_counts, substream


@dataclass(frozen=True)
class ArmSetting:
    """Wave-plate angles (degrees) for one analyzer arm."""

    hwp: float
    qwp: float

    def __post_init__(self):
        for name, value in (("hwp", self.hwp), ("qwp", self.qwp)):
            if not (0.0 <= value < 180.0):
                raise ValidationError(f"{name} angle must be in [0, 180), got {value}")

    def key(self) -> str:
        return f"{self.hwp:.9f}/{self.qwp:.9f}"


@dataclass(frozen=True)
class MeasurementSetting:
    """One analyzer arm (singles) or two (coincidence measurements)."""

    arm1: ArmSetting
    arm2: ArmSetting | None = None

    @property
    def n_arms(self) -> int:
        return 1 if self.arm2 is None else 2

    @property
    def n_outcomes(self) -> int:
        return 2 if self.arm2 is None else 4

    def key(self) -> str:
        if self.arm2 is None:
            return self.arm1.key()
        return f"{self.arm1.key()}|{self.arm2.key()}"


HV_ARM = ArmSetting(0.0, 0.0)
DA_ARM = ArmSetting(22.5, 45.0)
RL_ARM = ArmSetting(0.0, 45.0)


def waveplate_unitary(kind: str, theta_deg: float) -> np.ndarray:
    """Jones matrix of a half- or quarter-wave plate with fast axis at theta."""
    if kind == "half":
        delta = math.pi
    elif kind == "quarter":
        delta = math.pi / 2.0
    else:
        raise ValidationError(f"kind must be 'half' or 'quarter', got {kind!r}")
    t = math.radians(theta_deg)
    c, s = math.cos(t), math.sin(t)
    rot = np.array([[c, s], [-s, c]], dtype=complex)
    retard = np.array([[1.0, 0.0], [0.0, np.exp(1j * delta)]], dtype=complex)
    return rot.T @ retard @ rot


def analyzer_unitary(arm: ArmSetting) -> np.ndarray:
    """Composed Jones action of one arm: QWP first in the beam, then HWP."""
    return waveplate_unitary("half", arm.hwp) @ waveplate_unitary("quarter", arm.qwp)


def _arm_projectors(arm: ArmSetting) -> list[np.ndarray]:
    u = analyzer_unitary(arm)
    uh = u.conj().T
    return [np.outer(uh[:, k], uh[:, k].conj()) for k in (0, 1)]


def setting_projectors(setting: MeasurementSetting) -> list[np.ndarray]:
    """Rank-1 outcome projectors: 2 for one arm, 4 (tensor products) for two.

    Two-arm outcomes are ordered 00, 01, 10, 11 with the arm1 outcome first.
    """
    p1 = _arm_projectors(setting.arm1)
    if setting.arm2 is None:
        return p1
    p2 = _arm_projectors(setting.arm2)
    return [tensor_product(a, b) for a in p1 for b in p2]


def outcome_probabilities(rho: DensityMatrix | np.ndarray, projectors) -> np.ndarray:
    """Born-rule probabilities Tr(rho P_k) for a complete projector set."""
    m = as_state_array(rho)
    total = np.zeros_like(projectors[0])
    for p in projectors:
        total = total + p
    if np.max(np.abs(total - np.eye(total.shape[0]))) > 1e-9:
        raise ValidationError("projector set is not complete (does not sum to identity)")
    if m.shape != total.shape:
        raise DimensionError(f"state dim {m.shape} does not match projector dim {total.shape}")
    return np.array([float(np.trace(m @ p).real) for p in projectors])


def exact_probabilities(rho: DensityMatrix | np.ndarray, setting: MeasurementSetting) -> np.ndarray:
    """Born probabilities of rho under one measurement setting."""
    return outcome_probabilities(rho, setting_projectors(setting))


@dataclass(frozen=True)
class CountRecord:
    """Detector counts for one setting, with trial and seed metadata."""

    setting: MeasurementSetting
    counts: tuple[int, ...]
    total_trials: int
    seed: int

    def __post_init__(self):
        if len(self.counts) != self.setting.n_outcomes:
            raise ValidationError(
                f"expected {self.setting.n_outcomes} outcome counts, got {len(self.counts)}"
            )
        if any(c < 0 for c in self.counts):
            raise ValidationError("counts must be nonnegative")
        if self.total_trials < 1:
            raise ValidationError(f"total_trials must be >= 1, got {self.total_trials}")
        if sum(self.counts) > self.total_trials:
            raise ValidationError("counts sum exceeds total_trials")

    @property
    def detected(self) -> int:
        return int(sum(self.counts))


def simulate_counts(
    rho: DensityMatrix | np.ndarray,
    setting: MeasurementSetting,
    total_trials: int,
    efficiency: float = 1.0,
    seed: int = 0,
    background: float = 0.0,
) -> CountRecord:
    """Seeded stochastic counts for one setting.

    Each trial registers a detection with probability `efficiency`; detected
    outcomes follow the Born probabilities, optionally mixed with a uniform
    accidental background rate. The stream is keyed by (seed, setting), so
    distinct settings draw independently and reruns are identical.
    """
    if not (0.0 <= background < 1.0):
        raise ValidationError(f"background must be in [0, 1), got {background}")
    probs = exact_probabilities(rho, setting)
    probs = np.clip(probs, 0.0, None)
    probs = probs / probs.sum()
    if background > 0.0:
        probs = (1.0 - background) * probs + background / probs.size
    rng = substream(seed, "counts", setting.key())
    counts = draw_counts(probs, total_trials, rng, efficiency=efficiency)
    return CountRecord(
        setting=setting,
        counts=tuple(int(c) for c in counts),
        total_trials=int(total_trials),
        seed=int(seed),
    )


@dataclass(frozen=True)
class SourceModel:
    """Declarative source description consumed by make_source.

    kinds:
      pure              amplitudes (length 2 or 4)
      classical_mixture components: sequence of (amplitudes, weight)
      bell_phi_plus     phase (radians), visibility in [0, 1]
      custom            matrix passthrough (validated), optional tensor_order
    """

    kind: str
    amplitudes: tuple | None = None
    components: tuple | None = None
    phase: float = 0.0
    visibility: float = 1.0
    matrix: np.ndarray | None = None
    tensor_order: str | None = None


def bell_phi_plus_state(phase: float = 0.0, visibility: float = 1.0) -> DensityMatrix:
    """v |Phi+(phase)><Phi+(phase)| + (1-v) diag(1/2, 0, 0, 1/2).

    The second term is the fully dephased two-crystal output: HH and VV
    pairs with no mutual coherence.
    """
    if not (0.0 <= visibility <= 1.0):
        raise ValidationError(f"visibility must be in [0, 1], got {visibility}")
    psi = np.zeros(4, dtype=complex)
    psi[0] = 1.0 / math.sqrt(2.0)
    psi[3] = np.exp(1j * phase) / math.sqrt(2.0)
    coherent = np.outer(psi, psi.conj())
    dephased = np.diag([0.5, 0.0, 0.0, 0.5]).astype(complex)
    m = visibility * coherent + (1.0 - visibility) * dephased
    return DensityMatrix(m, label=f"bell_phi_plus(phase={phase:g}, v={visibility:g})")


def make_source(model: SourceModel) -> DensityMatrix:
    """Build the emitted state for a source model; output passes validation."""
    if model.kind == "pure":
        if model.amplitudes is None:
            raise ValidationError("source.amplitudes is required for kind 'pure'")
        return from_pure(model.amplitudes, label="pure source", tensor_order=model.tensor_order)
    if model.kind == "classical_mixture":
        if not model.components:
            raise ValidationError("source.components is required for kind 'classical_mixture'")
        weights = [float(w) for _, w in model.components]
        for idx, w in enumerate(weights):
            if w < 0.0:
                raise ValidationError(f"source.components[{idx}].weight is negative: {w}")
        if abs(sum(weights) - 1.0) > 1e-9:
            raise ValidationError(
                f"source.components weights sum to {sum(weights):.12g}, expected 1"
            )
        parts = []
        for amplitudes, w in model.components:
            psi = np.asarray(amplitudes, dtype=complex).reshape(-1)
            norm = float(np.sum(np.abs(psi) ** 2))
            if abs(norm - 1.0) > 1e-12:
                raise ValidationError("each mixture component must be a normalized amplitude vector")
            parts.append(w * np.outer(psi, psi.conj()))
        m = sum(parts)
        return DensityMatrix(m, label="classical mixture", tensor_order=model.tensor_order)
    if model.kind == "bell_phi_plus":
        return bell_phi_plus_state(model.phase, model.visibility)
    if model.kind == "custom":
        if model.matrix is None:
            raise ValidationError("source.matrix is required for kind 'custom'")
        return DensityMatrix(model.matrix, label="custom source", tensor_order=model.tensor_order)
    raise ValidationError(f"unknown source kind {model.kind!r}")
