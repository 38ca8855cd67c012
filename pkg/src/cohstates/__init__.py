"""Coherent states for discrete spectra with degeneracies, and a truncated
double-Fock model of a planar charge in a magnetic field."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .spectrum import (  # noqa: F401
    BranchSet,
    DegeneracySequence,
    EnergySpectrum,
    normalization,
    radius_of_convergence,
    shift_to_zero,
)
from .states import LabeledKet, bcs, branch_vcs, degenerate_state, energy_expectation, evolve, gk_state, vcs1, vcs2  # noqa: F401
from .models import build_model  # noqa: F401
