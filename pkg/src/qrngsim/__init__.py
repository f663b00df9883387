"""Polarization-based quantum RNG: simulation, tomography, certification."""

from .errors import (
    BudgetError,
    ContractError,
    ConvergenceError,
    DegenerateSubspaceError,
    DimensionError,
    InvalidCoherenceError,
    NormalizationError,
    NotPsdError,
    QrngSimError,
    ValidationError,
)
from .extractors import (
    extract_toeplitz,
    extract_von_neumann,
    gf2_toeplitz_apply,
    toeplitz_generator_bits,
)
from .linalg import (
    EigenDecomposition,
    hermitian_eig,
    partial_trace,
    psd_sqrt,
    tensor_product,
)
from .optics import (
    DA_ARM,
    HV_ARM,
    RL_ARM,
    ArmSetting,
    CountRecord,
    MeasurementSetting,
    SourceModel,
    analyzer_unitary,
    bell_phi_plus_state,
    exact_probabilities,
    make_source,
    setting_projectors,
    simulate_counts,
    waveplate_unitary,
)
from .randomness import (
    CHSH_CANONICAL_ANGLES,
    SCHEMES,
    AuditReport,
    BitStream,
    audit,
    chsh_s,
    generate_bits,
    min_entropy_bound,
    min_entropy_empirical,
    min_entropy_pure,
)
from .reference import (
    ReferenceRow,
    bell_target,
    diagonal_target,
    measured_pair_state,
    measured_single_state,
    reference_rows,
)
from .states import (
    DensityMatrix,
    coherence,
    fidelity,
    from_pure,
    purity,
    subspace_restrict,
)
from .streams import draw_bits, draw_counts, substream
from .tomography import (
    BASIS_NAMES,
    BootstrapResult,
    ReconstructionReport,
    bootstrap_uncertainty,
    exact_stokes,
    pair_setting,
    project_to_physical,
    reconstruct_from_records,
    reconstruct_single,
    reconstruct_two,
    single_setting,
    stokes_from_counts_single,
    stokes_from_counts_two,
)

__version__ = "0.1.0"

__all__ = [
    "ArmSetting",
    "AuditReport",
    "BitStream",
    "BASIS_NAMES",
    "BootstrapResult",
    "BudgetError",
    "CHSH_CANONICAL_ANGLES",
    "ContractError",
    "ConvergenceError",
    "CountRecord",
    "DA_ARM",
    "DegenerateSubspaceError",
    "DensityMatrix",
    "DimensionError",
    "EigenDecomposition",
    "HV_ARM",
    "InvalidCoherenceError",
    "MeasurementSetting",
    "NormalizationError",
    "NotPsdError",
    "QrngSimError",
    "RL_ARM",
    "ReconstructionReport",
    "ReferenceRow",
    "SCHEMES",
    "SourceModel",
    "ValidationError",
    "analyzer_unitary",
    "audit",
    "bell_phi_plus_state",
    "bell_target",
    "bootstrap_uncertainty",
    "chsh_s",
    "coherence",
    "diagonal_target",
    "draw_bits",
    "draw_counts",
    "exact_probabilities",
    "exact_stokes",
    "extract_toeplitz",
    "extract_von_neumann",
    "fidelity",
    "from_pure",
    "generate_bits",
    "gf2_toeplitz_apply",
    "hermitian_eig",
    "make_source",
    "measured_pair_state",
    "measured_single_state",
    "min_entropy_bound",
    "min_entropy_empirical",
    "min_entropy_pure",
    "pair_setting",
    "partial_trace",
    "project_to_physical",
    "psd_sqrt",
    "purity",
    "reconstruct_from_records",
    "reconstruct_single",
    "reconstruct_two",
    "reference_rows",
    "setting_projectors",
    "simulate_counts",
    "single_setting",
    "stokes_from_counts_single",
    "stokes_from_counts_two",
    "subspace_restrict",
    "substream",
    "tensor_product",
    "toeplitz_generator_bits",
    "waveplate_unitary",
]
