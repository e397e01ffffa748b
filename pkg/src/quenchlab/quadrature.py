"""Adaptive quadrature over the truncated Brillouin zone ``[pi/N, pi(N-1)/N]``."""

import math
import warnings

import numpy as np
from scipy import integrate

from .errors import NumericalError

EPSABS = 1e-10
# Peaked integrands near lam=1 reach ~N^2; a tiny relative floor lets those
# converge once the absolute target drops below double-precision resolution.
EPSREL = 1e-13
MAX_SUBINTERVALS = 100_000


def truncated_zone(n_sites):
    return math.pi / n_sites, math.pi * (n_sites - 1) / n_sites


def continuum_integral(n_sites, lam, integrand, prefactor, *, epsabs=EPSABS, limit=MAX_SUBINTERVALS):
    """``prefactor * int_{pi/N}^{pi(N-1)/N} integrand(lam, k) dk`` for scalar or array lam.

    ``integrand`` is called as ``integrand(lam, k)`` with scalar arguments.
    Raises NumericalError when QUADPACK reports a failure.
    """
    from .ising import check_field, check_sites

    n_sites = check_sites(n_sites)
    lam = check_field(lam)
    lo, hi = truncated_zone(n_sites)

    def one(l):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            value, err, info, *msg = integrate.quad(
                lambda k: integrand(l, k), lo, hi,
                epsabs=epsabs, epsrel=EPSREL, limit=limit, full_output=1,
            )
        if msg:
            raise NumericalError(
                f"quadrature failed at N={n_sites}, lam={l}: {msg[0]} "
                f"(estimate {value!r}, error {err!r}, {info['last']} subintervals)"
            )
        return prefactor * value

    if lam.ndim == 0:
        return one(float(lam))
    return np.array([one(float(l)) for l in lam.ravel()]).reshape(lam.shape)
