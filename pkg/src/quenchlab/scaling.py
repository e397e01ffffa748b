"""Finite-size scaling: pseudo-critical peaks, peak-growth fits, data collapse.

Two collapse Ansaetze, both with ``x = N^{1/nu} (lam - lam_m)``:

* algebraic (fidelity susceptibility):  ``y = [R(lam) - R(lam_m)] / R(lam_m)``
* logarithmic (irreversible work):      ``y = 1 - exp[R(lam) - R(lam_m)]``

For the logarithmic form ``R = 2 pi W / N``; the algebraic form is invariant
under rescaling of R.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, stats

from .errors import BracketingError, InputError
from .ising import check_sites
from .observables import (
    FIDELITY_SUSCEPTIBILITY, MODE_SUM, RESCALED_IRREVERSIBLE_WORK,
    ObservableCurve, evaluate, rescale_factor,
)

COARSE_POINTS = 401
PEAK_XTOL = 1e-8
DEFAULT_WINDOW = 2.0


@dataclass(frozen=True)
class PeakResult:
    kind: str
    n_sites: int
    lambda_m: float
    peak_value: float

    @property
    def one_minus_lambda_m(self):
        return 1.0 - self.lambda_m


def default_bracket(n_sites):
    return 0.5, 1.0 + 10.0 / n_sites


def find_peak(kind, n_sites, bracket=None):
    """Locate the lambda-maximum of a mode-sum observable.

    A 401-point scan picks the best grid point and checks that it is the only
    interior local maximum; golden-section search then refines it to
    ``|d lam| <= 1e-8``.
    """
    n_sites = check_sites(n_sites)
    lo, hi = default_bracket(n_sites) if bracket is None else map(float, bracket)
    if not lo < hi:
        raise InputError(f"empty bracket ({lo}, {hi})")
    grid = np.linspace(lo, hi, COARSE_POINTS)
    values = evaluate(kind, MODE_SUM, n_sites, grid)
    i = int(np.argmax(values))
    if i == 0 or i == grid.size - 1:
        raise BracketingError(
            f"{kind} at N={n_sites} has no interior maximum in ({lo}, {hi}); "
            f"largest value at the {'lower' if i == 0 else 'upper'} end"
        )
    rising = np.diff(values) > 0
    n_max = int(np.count_nonzero(rising[:-1] & ~rising[1:]))
    if n_max != 1:
        raise BracketingError(f"{kind} at N={n_sites} is not unimodal on ({lo}, {hi}): {n_max} local maxima")

    def neg(lam):
        return -evaluate(kind, MODE_SUM, n_sites, lam)

    # golden's xtol is relative to |lam|, which sits near 1 here
    res = optimize.minimize_scalar(
        neg, bracket=(grid[i - 1], grid[i], grid[i + 1]), method="golden",
        options={"xtol": PEAK_XTOL / max(1.0, 2.0 * abs(grid[i]))},
    )
    lam_m = float(res.x)
    return PeakResult(kind, n_sites, lam_m, float(evaluate(kind, MODE_SUM, n_sites, lam_m)))


def peak_refined_grid(lambda_m, lo=0.8, hi=1.2, count=2001, refine=400, closest=1e-9):
    """Uniform grid on [lo, hi] merged with points geometrically clustered at lambda_m.

    The clustering resolves every scale from ``closest`` up to the grid span,
    so a collapse window ``|x| <= 2`` holds points for any trial exponent.
    lambda_m itself is included, giving a point at exactly ``x = 0``.
    """
    d = np.geomspace(closest, hi - lo, refine)
    lam = np.concatenate([np.linspace(lo, hi, count), [lambda_m], lambda_m - d, lambda_m + d])
    lam = np.unique(lam)
    return lam[(lam >= lo) & (lam <= hi)]


@dataclass(frozen=True)
class CollapseResult:
    """Transformed points ``(x, y, N)`` and the collapse score.

    ``quality`` is the mean squared deviation from the master curve divided
    by the variance of all y in the window (0 = perfect, ~1 = no collapse).
    ``mse`` is the undivided mean squared deviation.
    """

    ansatz: str
    nu: float
    window: float
    points: list = field(repr=False)
    quality: float
    mse: float


def algebraic_transform(values, peak_value):
    return (np.asarray(values) - peak_value) / peak_value


def logarithmic_transform(values, peak_value, factor):
    """``1 - exp[R - R_m]`` with ``R = factor * value``; zero at the peak."""
    return -np.expm1(factor * (np.asarray(values) - peak_value))


def _master_deviation(groups):
    """Residuals of every group against the mean of all groups' linear interpolants.

    At each x the master curve averages those groups whose x-range covers it,
    so a single group collapses exactly onto itself.
    """
    residuals = []
    for x, y in groups:
        stack = np.full((len(groups), x.size), np.nan)
        for j, (x2, y2) in enumerate(groups):
            inside = (x >= x2[0]) & (x <= x2[-1])
            stack[j, inside] = np.interp(x[inside], x2, y2)
        residuals.append(y - np.nanmean(stack, axis=0))
    return np.concatenate(residuals)


def _collapse(ansatz, curves, peaks, nu, window, transform):
    if len(curves) != len(peaks) or not curves:
        raise InputError(f"need one peak per curve, got {len(curves)} curves and {len(peaks)} peaks")
    if not nu > 0:
        raise InputError(f"nu must be positive, got {nu}")
    points = []
    groups = []
    for curve, peak in zip(curves, peaks):
        if curve.n_sites != peak.n_sites:
            raise InputError(f"curve N={curve.n_sites} paired with peak N={peak.n_sites}")
        x = curve.n_sites ** (1.0 / nu) * (curve.lambdas - peak.lambda_m)
        y = transform(curve, peak)
        keep = np.abs(x) <= window
        if np.count_nonzero(keep) < 2:
            raise InputError(
                f"curve N={curve.n_sites} has {np.count_nonzero(keep)} points with |x| <= {window} at nu={nu}; "
                "sample it more densely near lambda_m"
            )
        x, y = x[keep], y[keep]
        groups.append((x, y))
        points.extend(zip(x.tolist(), y.tolist(), [curve.n_sites] * x.size))
    resid = _master_deviation(groups)
    all_y = np.concatenate([g[1] for g in groups])
    mse = float(np.mean(resid * resid))
    var = float(np.var(all_y))
    quality = mse / var if var > 0 else 0.0
    return CollapseResult(ansatz, float(nu), float(window), points, quality, mse)


def collapse_algebraic(curves, peaks, nu=1.0, window=DEFAULT_WINDOW):
    """Collapse under ``[R(lam) - R(lam_m)] / R(lam_m) = g(N^{1/nu}(lam - lam_m))``."""
    return _collapse("algebraic", curves, peaks, nu, window,
                     lambda c, p: algebraic_transform(c.values, p.peak_value))


def collapse_logarithmic(curves, peaks, nu=1.0, window=DEFAULT_WINDOW):
    """Collapse under ``1 - exp[R(lam) - R(lam_m)] = f(N^{1/nu}(lam - lam_m))``.

    R is the rescaled work ``2 pi W / N`` (for any curve kind, the figure
    normalisation from :func:`~quenchlab.observables.rescale_factor`).
    """
    return _collapse("logarithmic", curves, peaks, nu, window,
                     lambda c, p: logarithmic_transform(c.values, p.peak_value, rescale_factor(c.kind, c.n_sites)))


def scan_nu(collapse, curves, peaks, nus=None, window=DEFAULT_WINDOW):
    """Collapse quality over a grid of exponents; returns ``(best_nu, [(nu, quality)])``."""
    nus = np.linspace(0.5, 2.0, 31) if nus is None else nus
    scores = [(float(nu), collapse(curves, peaks, nu, window).quality) for nu in nus]
    best = min(scores, key=lambda s: s[1])[0]
    return best, scores


@dataclass(frozen=True)
class ScalingFit:
    law: str
    slope: float
    intercept: float
    r_squared: float

    def as_dict(self):
        return {"law": self.law, "slope": self.slope, "intercept": self.intercept, "r_squared": self.r_squared}


def fit_peak_scaling(peaks, law):
    """Least-squares fit of peak growth with N.

    ``law="power"``: slope of ``log(peak)`` against ``log N`` (the exponent).
    ``law="n_log_n"``: slope of ``peak / N`` against ``ln N``.
    Needs at least four peaks spanning a factor of 8 in N.
    """
    ns = np.array([p.n_sites for p in peaks], dtype=float)
    vals = np.array([p.peak_value for p in peaks], dtype=float)
    if ns.size < 4 or ns.max() < 8 * ns.min():
        raise InputError(f"need >= 4 peaks spanning a factor 8 in N, got N={ns.astype(int).tolist()}")
    if law == "power":
        if np.any(vals <= 0):
            raise InputError("power-law fit needs positive peak values")
        fit = stats.linregress(np.log(ns), np.log(vals))
    elif law == "n_log_n":
        fit = stats.linregress(np.log(ns), vals / ns)
    else:
        raise InputError(f"unknown scaling law {law!r}")
    return ScalingFit(law, float(fit.slope), float(fit.intercept), float(fit.rvalue ** 2))


def peak_table(n_list, kinds=(FIDELITY_SUSCEPTIBILITY, RESCALED_IRREVERSIBLE_WORK)):
    return {kind: [find_peak(kind, n) for n in n_list] for kind in kinds}


def convergence_exponent(peaks):
    """Log-log slope of ``1 - lam_m`` against N (reported, not asserted)."""
    ns = np.array([p.n_sites for p in peaks], dtype=float)
    d = np.array([p.one_minus_lambda_m for p in peaks])
    return float(stats.linregress(np.log(ns), np.log(d)).slope)


def collapse_curves(kind, n_list, lo=0.8, hi=1.2, count=2001, workers=None):
    """Mode-sum curves on peak-refined grids plus their peaks, ready to collapse."""
    from .parallel import ordered_map

    def one(n):
        peak = find_peak(kind, n)
        lam = peak_refined_grid(peak.lambda_m, lo, hi, count)
        return ObservableCurve(n, kind, MODE_SUM, lam, evaluate(kind, MODE_SUM, n, lam)), peak

    pairs = ordered_map(one, list(n_list), workers)
    return [c for c, _ in pairs], [p for _, p in pairs]


__all__ = [
    "PeakResult", "CollapseResult", "ScalingFit", "find_peak", "default_bracket",
    "peak_refined_grid", "collapse_algebraic", "collapse_logarithmic", "scan_nu",
    "fit_peak_scaling", "peak_table", "convergence_exponent", "collapse_curves",
    "algebraic_transform", "logarithmic_transform",
]
