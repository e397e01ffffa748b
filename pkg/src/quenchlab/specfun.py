"""Complete elliptic integrals via the arithmetic-geometric mean.

Parameter convention: ``m = k**2`` (the "parameter", not the modulus), so
``K(m) = int_0^{pi/2} dtheta / sqrt(1 - m sin^2 theta)`` and
``E(m) = int_0^{pi/2} dtheta sqrt(1 - m sin^2 theta)``.
"""

import math

from .errors import DomainError, NumericalError

AGM_RTOL = 1e-15
AGM_MAX_ITER = 60


def agm(a, b):
    """Arithmetic-geometric mean of two positive numbers."""
    a = float(a)
    b = float(b)
    if not (a > 0.0 and b > 0.0):
        raise DomainError(f"agm requires positive arguments, got ({a}, {b})")
    for _ in range(AGM_MAX_ITER):
        if abs(a - b) <= AGM_RTOL * a:
            return a
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    raise NumericalError(f"agm did not converge in {AGM_MAX_ITER} iterations")


def ellip_k(m):
    """Complete elliptic integral of the first kind, ``0 <= m < 1``.

    Diverges logarithmically as ``m -> 1``: ``K(m) ~ 2 ln 2 - ln(1 - m)/2``.
    That asymptote is left to callers; this function never switches branch.
    """
    m = float(m)
    if not 0.0 <= m < 1.0:
        raise DomainError(f"ellip_k requires 0 <= m < 1, got {m}")
    return math.pi / (2.0 * agm(1.0, math.sqrt(1.0 - m)))


def ellip_e(m):
    """Complete elliptic integral of the second kind, ``0 <= m <= 1``.

    Uses the AGM sequence together with the accumulated sum of
    ``2**(n-1) c_n**2`` (``c_0 = sqrt(m)``, ``c_{n+1} = (a_n - b_n)/2``), so
    ``E = K * (1 - sum)``. ``E(1)`` is returned as exactly 1.
    """
    m = float(m)
    if not 0.0 <= m <= 1.0:
        raise DomainError(f"ellip_e requires 0 <= m <= 1, got {m}")
    if m == 1.0:
        return 1.0
    a = 1.0
    b = math.sqrt(1.0 - m)
    total = 0.5 * m
    weight = 0.5
    for _ in range(AGM_MAX_ITER):
        if abs(a - b) <= AGM_RTOL * a:
            break
        c = 0.5 * (a - b)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        weight *= 2.0
        total += weight * c * c
    else:
        raise NumericalError(f"agm did not converge in {AGM_MAX_ITER} iterations")
    return math.pi / (2.0 * a) * (1.0 - total)


def ellip_e_derivs(m):
    """First and second derivatives of ``E(m)`` for ``0 < m < 1``.

    Returns ``(dE/dm, d2E/dm2)`` with

        dE/dm   = (E - K) / (2m)
        d2E/dm2 = (2(m-1)K - (m-2)E) / (4(m-1)m^2)
    """
    m = float(m)
    if not 0.0 < m < 1.0:
        raise DomainError(f"ellip_e_derivs requires 0 < m < 1, got {m}")
    k = ellip_k(m)
    e = ellip_e(m)
    first = (e - k) / (2.0 * m)
    second = (2.0 * (m - 1.0) * k - (m - 2.0) * e) / (4.0 * (m - 1.0) * m * m)
    return first, second
