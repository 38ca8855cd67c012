"""Exception types raised across the package."""

from __future__ import annotations

__all__ = [
    "CohStatesError",
    "NonMonotoneSpectrum",
    "UnshiftedSpectrum",
    "NonConvergent",
    "OutsideConvergenceDomain",
    "NoClosedForm",
    "PrecisionLoss",
    "QuadratureFailure",
    "TestFunctionOutOfClass",
    "SpectrumMismatch",
    "BranchOutOfRange",
    "DegeneracyViolation",
    "NotHermitian",
    "TruncationUnsafe",
    "GridTooCoarse",
    "ConfigError",
]


class CohStatesError(Exception):
    """Base class for every error raised by this package."""


class NonMonotoneSpectrum(CohStatesError, ValueError):
    """Levels are not strictly increasing."""


class UnshiftedSpectrum(CohStatesError, ValueError):
    """An operation needs the ground level at zero."""


class NonConvergent(CohStatesError, ArithmeticError):
    """A series did not reach its tolerance within the term budget."""


class OutsideConvergenceDomain(CohStatesError, ValueError):
    """The action variable lies at or beyond the radius of convergence."""


class NoClosedForm(CohStatesError, LookupError):
    """No closed-form measure is known for the requested model."""


class PrecisionLoss(CohStatesError, ValueError):
    """A float could not be lifted to an exact rational."""


class QuadratureFailure(CohStatesError, ArithmeticError):
    """Two quadrature resolutions disagree beyond tolerance."""


class TestFunctionOutOfClass(CohStatesError, ValueError):
    """A test function violates the derivative L1 bounds."""

    __test__ = False


class SpectrumMismatch(CohStatesError, ValueError):
    """A ket is evolved with a spectrum it was not built from."""


class BranchOutOfRange(CohStatesError, IndexError):
    """Branch index outside 0..N-1."""


class DegeneracyViolation(CohStatesError, ValueError):
    """Merged branch levels collide or reorder."""


class NotHermitian(CohStatesError, ValueError):
    """Coupling matrix is not hermitian."""


class TruncationUnsafe(CohStatesError, ValueError):
    """Fock cutoff too small for the requested displacement."""


class GridTooCoarse(CohStatesError, ValueError):
    """Finite-difference step exceeds the accuracy rule."""


class ConfigError(CohStatesError, ValueError):
    """Invalid CLI configuration."""
