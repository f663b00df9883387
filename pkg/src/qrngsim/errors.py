"""Exception hierarchy shared by all qrngsim modules.

ValidationError and its subclasses mean the input itself is bad (CLI exit
code 2); ContractError and its subclasses mean a runtime contract was
violated, such as an entropy budget (CLI exit code 3).
"""

from __future__ import annotations


class QrngSimError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(QrngSimError):
    """Input failed validation (bad matrix, bad config, bad distribution)."""


class DimensionError(ValidationError):
    """Matrix or state has the wrong dimension for the operation."""


class NotPsdError(ValidationError):
    """Matrix has an eigenvalue below the PSD tolerance."""


class NormalizationError(ValidationError):
    """Amplitude vector is not normalized."""


class InvalidCoherenceError(ValidationError):
    """Coherence value outside [0, 1/2] beyond tolerance."""


class ContractError(QrngSimError):
    """A runtime contract between components was violated."""


class DegenerateSubspaceError(ContractError):
    """Requested subspace carries (near-)zero probability mass."""


class BudgetError(ContractError):
    """Requested extractor output exceeds the certified entropy budget."""


class ConvergenceError(QrngSimError):
    """An iterative solver hit its sweep cap without converging."""
