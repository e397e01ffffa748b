"""Fidelity susceptibility and rescaled irreversible work of the Ising chain.

Each observable comes in several flavours (``method``):

* ``mode_sum`` - exact finite-N sum over the even-sector momenta;
* ``continuum_integral`` - the sum replaced by an integral over the
  truncated zone ``[pi/N, pi(N-1)/N]`` with ``dk = 2 pi / N``;
* ``elliptic_closed_form`` - thermodynamic-limit expression through K and E;
* ``asymptotic`` - large-N law away from the critical point.

Mode sums are vectorized over ``lam``: pass an array to get an array back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError
from .ising import (
    _over_grid, check_field, check_sites, dispersion_sq, elliptic_parameter,
    ground_energy_elliptic, ground_energy_integral, ground_energy_sum,
)
from .quadrature import continuum_integral
from .specfun import ellip_e, ellip_k

FIDELITY_SUSCEPTIBILITY = "fidelity_susceptibility"
RESCALED_IRREVERSIBLE_WORK = "rescaled_irreversible_work"
GROUND_ENERGY = "ground_energy"
KINDS = (FIDELITY_SUSCEPTIBILITY, RESCALED_IRREVERSIBLE_WORK, GROUND_ENERGY)

MODE_SUM = "mode_sum"
CONTINUUM_INTEGRAL = "continuum_integral"
ELLIPTIC_CLOSED_FORM = "elliptic_closed_form"
ASYMPTOTIC = "asymptotic"
METHODS = (MODE_SUM, CONTINUUM_INTEGRAL, ELLIPTIC_CLOSED_FORM, ASYMPTOTIC)


def _chi_f_integrand(lam, k):
    s = math.sin(k)
    g = dispersion_sq(lam, k)
    return s * s / (g * g)


def _riw_integrand(lam, k):
    s = math.sin(k)
    g = dispersion_sq(lam, k)
    return s * s / (g * math.sqrt(g))


def chi_f_sum(n_sites, lam):
    """``(1/4) sum_{k>0} sin^2 k / (1 + lam^2 - 2 lam cos k)^2``.

    Finite at ``lam = 1`` for every finite N since ``k = 0`` is not on the grid.
    """
    return _over_grid(n_sites, lam, lambda l, k: 0.25 * np.sin(k) ** 2 / dispersion_sq(l, k) ** 2)


def chi_f_integral(n_sites, lam):
    """Continuum estimate ``(N / 8 pi) R_F(lam, N)``.

    ``R_F`` is the integral of ``sin^2 k / (1 + lam^2 - 2 lam cos k)^2`` over
    the truncated zone. The ``1/(8 pi)`` prefactor follows from summing over
    the N/2 positive momenta with spacing ``2 pi / N``; it reproduces both the
    mode sum and the large-N law ``N / (16 (1 - lam^2))``.
    """
    n_sites = check_sites(n_sites)
    return continuum_integral(n_sites, lam, _chi_f_integrand, n_sites / (8.0 * math.pi))


def chi_f_asymptotic(lam):
    """Per-site large-N susceptibility ``chi_F / N`` away from ``lam = 1``.

    ``1/(16 (1 - lam^2))`` below the critical field, ``1/(16 lam^2 (lam^2 - 1))``
    above it.
    """
    lam = float(check_field(lam))
    if lam == 1.0:
        raise DomainError("chi_F / N diverges at lam = 1")
    if lam < 1.0:
        return 1.0 / (16.0 * (1.0 - lam * lam))
    return 1.0 / (16.0 * lam * lam * (lam * lam - 1.0))


def riw_sum(n_sites, lam):
    """Rescaled irreversible work ``4 sum_{k in K} sin^2 k / eps_k^3``.

    Equal to ``-(1/2) d^2 E_0 / d lam^2``; the full N-momentum sum is twice the
    sum over positive momenta.
    """
    return _over_grid(n_sites, lam, lambda l, k: np.sin(k) ** 2 / dispersion_sq(l, k) ** 1.5)


def riw_integral(n_sites, lam):
    """Continuum estimate ``(N / 2 pi) R(lam, N)`` with R the truncated-zone
    integral of ``sin^2 k / (1 + lam^2 - 2 lam cos k)^{3/2}``."""
    n_sites = check_sites(n_sites)
    return continuum_integral(n_sites, lam, _riw_integrand, n_sites / (2.0 * math.pi))


def riw_elliptic_signed(n_sites, lam):
    """The closed form exactly as usually printed, sign included:

        -(N/pi) [(1 + lam^2) K(m) - (1 + lam)^2 E(m)] / (2 lam^2 (1 + lam))

    with ``m = 4 lam / (1 + lam)^2``. This is negative for every ``lam > 0``;
    see :func:`riw_elliptic` for the physical (positive) value.
    """
    n_sites = check_sites(n_sites)
    lam = float(check_field(lam))
    if lam == 0.0:
        return -n_sites / 4.0
    if lam == 1.0:
        raise DomainError("K(m) diverges at lam = 1")
    m = elliptic_parameter(lam)
    bracket = (1.0 + lam * lam) * ellip_k(m) - (1.0 + lam) ** 2 * ellip_e(m)
    return -(n_sites / math.pi) * bracket / (2.0 * lam * lam * (1.0 + lam))


def riw_elliptic(n_sites, lam):
    """Thermodynamic-limit rescaled irreversible work from K and E.

    Returns the magnitude of :func:`riw_elliptic_signed`: the work is a sum of
    ``|<n|H1|0>|^2 / (E_n - E_0)`` terms and therefore positive, while the
    closed form carries an overall minus sign. ``lam = 0`` returns the limit
    ``N/4``. Accepts scalar or array ``lam``.
    """
    lam_arr = check_field(lam)
    if lam_arr.ndim == 0:
        return abs(riw_elliptic_signed(n_sites, float(lam_arr)))
    return np.array([abs(riw_elliptic_signed(n_sites, float(l))) for l in lam_arr.ravel()]).reshape(lam_arr.shape)


def riw_log_slope():
    """Coefficient ``c`` in ``W / N ~ -c ln|1 - lam| + const`` as ``lam -> 1``.

    From ``K(m) ~ -ln(1 - m)/2`` with ``1 - m = ((1 - lam)/(1 + lam))^2``:
    ``W / N ~ K / (2 pi) ~ -ln|1 - lam| / (2 pi)``.
    """
    return 1.0 / (2.0 * math.pi)


_EVALUATORS = {
    (FIDELITY_SUSCEPTIBILITY, MODE_SUM): chi_f_sum,
    (FIDELITY_SUSCEPTIBILITY, CONTINUUM_INTEGRAL): chi_f_integral,
    (FIDELITY_SUSCEPTIBILITY, ASYMPTOTIC): lambda n, l: n * np.vectorize(chi_f_asymptotic, otypes=[float])(l),
    (RESCALED_IRREVERSIBLE_WORK, MODE_SUM): riw_sum,
    (RESCALED_IRREVERSIBLE_WORK, CONTINUUM_INTEGRAL): riw_integral,
    (RESCALED_IRREVERSIBLE_WORK, ELLIPTIC_CLOSED_FORM): riw_elliptic,
    (GROUND_ENERGY, MODE_SUM): ground_energy_sum,
    (GROUND_ENERGY, CONTINUUM_INTEGRAL): ground_energy_integral,
    (GROUND_ENERGY, ELLIPTIC_CLOSED_FORM): ground_energy_elliptic,
}


def evaluate(kind, method, n_sites, lam):
    """Dispatch to the evaluator for ``(kind, method)``."""
    try:
        fn = _EVALUATORS[kind, method]
    except KeyError:
        raise ConfigurationError(f"no {method!r} evaluator for {kind!r}") from None
    out = fn(check_sites(n_sites), lam)
    return float(out) if np.ndim(out) == 0 else np.asarray(out, dtype=float)


def rescale_factor(kind, n_sites):
    """Figure normalisation: ``4 pi / N`` for chi_F, ``2 pi / N`` for the RIW, ``1/N`` for E_0."""
    if kind == FIDELITY_SUSCEPTIBILITY:
        return 4.0 * math.pi / n_sites
    if kind == RESCALED_IRREVERSIBLE_WORK:
        return 2.0 * math.pi / n_sites
    if kind == GROUND_ENERGY:
        return 1.0 / n_sites
    raise ConfigurationError(f"unknown observable kind {kind!r}")


@dataclass(frozen=True)
class ObservablePoint:
    n_sites: int
    field: float
    kind: str
    method: str
    value: float


@dataclass(frozen=True)
class ObservableCurve:
    """Samples ``lam -> value`` of one observable at fixed N."""

    n_sites: int
    kind: str
    method: str
    lambdas: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        val = np.asarray(self.values, dtype=float)
        if lam.ndim != 1 or lam.shape != val.shape:
            raise ConfigurationError("lambdas and values must be 1-d arrays of equal length")
        if lam.size > 1 and np.any(np.diff(lam) <= 0):
            raise ConfigurationError("lambda samples must be strictly increasing")
        if not np.all(np.isfinite(val)):
            raise ConfigurationError("curve contains non-finite values")
        lam.flags.writeable = False
        val.flags.writeable = False
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "values", val)

    @property
    def samples(self):
        return list(zip(self.lambdas.tolist(), self.values.tolist()))

    @property
    def rescaled(self):
        return self.values * rescale_factor(self.kind, self.n_sites)


def sample_curve(kind, n_sites, lambdas, method=MODE_SUM):
    """Evaluate one observable on a strictly increasing lambda grid."""
    lam = np.asarray(lambdas, dtype=float)
    values = evaluate(kind, method, n_sites, lam)
    return ObservableCurve(check_sites(n_sites), kind, method, lam, np.atleast_1d(values))


def critical_peak_values(n_list):
    """``(N, chi_F peak, RIW peak)`` for each N, peaks located on the mode sums."""
    from .scaling import find_peak

    out = []
    for n in n_list:
        n = check_sites(n)
        if n < 8:
            raise ConfigurationError(f"peak scaling needs N >= 8, got {n}")
        chi = find_peak(FIDELITY_SUSCEPTIBILITY, n)
        riw = find_peak(RESCALED_IRREVERSIBLE_WORK, n)
        out.append((n, chi.peak_value, riw.peak_value))
    return out
