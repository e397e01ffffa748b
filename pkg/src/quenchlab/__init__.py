"""Fidelity susceptibility and irreversible work for sudden quenches of the
periodic transverse-field Ising chain: free-fermion mode sums, continuum and
elliptic-integral forms, a dense exact-diagonalization oracle, and
finite-size scaling tools."""

from .errors import (
    BracketingError, ConfigurationError, DegeneracyError, DomainError, InputError,
    NumericalError, QuenchLabError, ResourceError,
)
from .ising import ChainParams, build_grid, ground_energy_sum
from .observables import chi_f_sum, evaluate, riw_elliptic, riw_sum, sample_curve
from .scaling import collapse_algebraic, collapse_logarithmic, find_peak, fit_peak_scaling

__version__ = "0.1.0"

__all__ = [
    "QuenchLabError", "DomainError", "ConfigurationError", "InputError", "ResourceError",
    "NumericalError", "BracketingError", "DegeneracyError",
    "ChainParams", "build_grid", "ground_energy_sum",
    "chi_f_sum", "riw_sum", "riw_elliptic", "evaluate", "sample_curve",
    "find_peak", "fit_peak_scaling", "collapse_algebraic", "collapse_logarithmic",
]
