"""Confidence sets for peptide means and mean differences

A single observation Y ~ N(mu, h(theta, mu)) yields the pivot

.. code::

    g_Y(mu) = (Y - mu)² / h(theta, mu) ~ chi²(1)

and a pair (Y1, Y2) with means (mu1, mu2) yields the chi²(2) pivot

.. code::

    (Y1 - mu1)² / h(theta, mu1) + (Y2 - mu2)² / h(theta, mu2)

which is the quadratic form of the correlated standardized residuals
of Y1 - Y2 and Y1 + Y2 in the parametrization nu1 = mu1 - mu2,
nu2 = mu1 + mu2. Projecting the chi²(2) region onto nu1 gives a
conservative confidence set for the log-ratio nu1.
"""
from dataclasses import dataclass
from typing import Tuple
import warnings

import numpy as np
import scipy.optimize
import scipy.stats

from .excpt import (DegenerateSetError, GridInversionWarning,
                    NumericalError, UnsupportedFormError)

#: Default resolution of the projection lattice (log units)
DEFAULT_GRID_RES = 0.005
#: Number of grid points for dense-grid inversion
INVERSION_POINTS = 20001
#: Number of nu2 points for the continuous profile scan
PROFILE_POINTS = 2001
#: Maximum number of bisection steps
BISECT_STEPS = 200


@dataclass(frozen=True)
class ConfidenceSet:
    """Union of disjoint intervals

    Endpoints may be infinite if no bounds were enforced.
    """
    #: sorted, disjoint (lo, hi) tuples
    components: Tuple[Tuple[float, float], ...]
    #: confidence level 1 - alpha
    level: float
    #: whether the set was obtained from a finite grid
    approximate: bool = False

    def __post_init__(self):
        comps = tuple(sorted((float(lo), float(hi))
                             for lo, hi in self.components))
        if not comps:
            raise DegenerateSetError("Confidence set is empty!")
        for lo, hi in comps:
            if lo > hi:
                raise ValueError("Invalid component ({}, {})!".format(lo, hi))
        for (_, hi0), (lo1, _) in zip(comps[:-1], comps[1:]):
            if not hi0 < lo1:
                raise ValueError("Components must be disjoint!")
        object.__setattr__(self, "components", comps)

    @property
    def hull(self):
        return (self.components[0][0], self.components[-1][1])

    @property
    def disconnected(self):
        return len(self.components) > 1

    @property
    def ratio_hull(self):
        """Hull on the ratio scale (exponentiated log-scale endpoints)"""
        return tuple(float(x) for x in np.exp(self.hull))

    def contains(self, x):
        return any(lo <= x <= hi for lo, hi in self.components)

    def to_ratio(self):
        return ConfidenceSet(components=[tuple(np.exp(cc))
                                         for cc in self.components],
                             level=self.level,
                             approximate=self.approximate)


@dataclass(frozen=True)
class DifferencePivot:
    """Standardized residuals of Y1 - Y2 and Y1 + Y2 at (nu1, nu2)"""
    g_diff: np.ndarray
    g_sum: np.ndarray
    rho: np.ndarray
    g_quad: np.ndarray


def _check_alpha(alpha):
    if not 0 < alpha < 1:
        raise ValueError("`alpha` must be in (0, 1), got {}!".format(alpha))


def chi2_quantile(alpha, df):
    """Upper alpha quantile of the chi-squared distribution"""
    _check_alpha(alpha)
    if df == 2:
        return -2 * np.log(alpha)
    return scipy.stats.chi2.isf(alpha, df)


def exact_pivot(y, mu, model):
    """Single-observation pivot (y - mu)² / h(theta, mu) (vectorized)"""
    y = np.asarray(y, dtype=float)
    mu = np.asarray(mu, dtype=float)
    return (y - mu)**2 / model.variance(mu)


def region_pivot(y1, y2, mu1, mu2, model):
    """Chi²(2) pivot of a pair at the means (mu1, mu2) (vectorized)"""
    return exact_pivot(y1, mu1, model) + exact_pivot(y2, mu2, model)


def difference_pivot(y1, y2, nu1, nu2, model):
    """Evaluate the pivot in the (nu1, nu2) parametrization

    Parameters
    ----------
    y1, y2: float or ndarray
        Observations
    nu1, nu2: float or ndarray
        Difference and sum of the means
    model: pairvar.model.VarianceModel

    Returns
    -------
    pivot: DifferencePivot
        `g_quad = (g_diff² - 2 rho g_diff g_sum + g_sum²) / (1 - rho²)`
    """
    nu1 = np.asarray(nu1, dtype=float)
    nu2 = np.asarray(nu2, dtype=float)
    h1 = model.variance((nu2 + nu1) / 2)
    h2 = model.variance((nu2 - nu1) / 2)
    sd = np.sqrt(h1 + h2)
    g_diff = (np.asarray(y1) - np.asarray(y2) - nu1) / sd
    g_sum = (np.asarray(y1) + np.asarray(y2) - nu2) / sd
    rho = (h1 - h2) / (h1 + h2)
    g_quad = (g_diff**2 - 2 * rho * g_diff * g_sum + g_sum**2) / (1 - rho**2)
    return DifferencePivot(g_diff=g_diff, g_sum=g_sum, rho=rho, g_quad=g_quad)


def _explinear_pivot(y, mu, t1, t2):
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        return (y - mu)**2 * np.exp(-t1 - t2 * mu)


def _bisect(func, lo, hi, q, increasing):
    """Vectorized bisection for func(x) = q with a monotone bracket"""
    for _ in range(BISECT_STEPS):
        if np.all(hi - lo <= 1e-13 * np.maximum(1, np.abs(lo))):
            break
        mid = (lo + hi) / 2
        above = func(mid) > q
        if increasing:
            lo, hi = np.where(above, lo, mid), np.where(above, mid, hi)
        else:
            lo, hi = np.where(above, mid, lo), np.where(above, hi, mid)
    return (lo + hi) / 2


def _expand(func, start, direction, q, above=True):
    """Double the distance from `start` until func exceeds q

    With `above=False`, expand until func falls to q or below.
    """
    step = np.ones_like(start)
    for _ in range(1100):
        outer = start + direction * step
        pending = (func(outer) > q) != above
        if not np.any(pending):
            return outer
        step = np.where(pending, 2 * step, step)
    raise NumericalError("Could not bracket the confidence set endpoint!")


def _explinear_roots(y, t1, t2, q):
    """Endpoints of {mu: g_y(mu) <= q} for h = exp(t1 + t2 mu), t2 < 0

    On (-inf, mu*] the pivot increases from 0 to its local maximum at
    mu* = y + 2/t2, on [mu*, y] it decreases to 0 and on [y, inf) it
    increases without bound.

    Returns
    -------
    r1, l2, r2: 1d ndarrays
        The set is (-inf, r1] ∪ [l2, r2] where r1 and l2 are finite
        and (-inf, r2] where they are nan.
    """
    mustar = y + 2 / t2
    with np.errstate(over="ignore"):
        gstar = 4 / t2**2 * np.exp(-(2 + t1 + t2 * y))
    two = gstar > q

    def right(x):
        return _explinear_pivot(y, x, t1, t2)

    hi = _expand(right, y, 1, q)
    r2 = _bisect(right, y.copy(), hi, q, increasing=True)
    r1 = np.full_like(y, np.nan)
    l2 = np.full_like(y, np.nan)
    if np.any(two):
        ys = y[two]
        ms = mustar[two]

        def left(x):
            return _explinear_pivot(ys, x, t1, t2)

        lo = _expand(left, ms, -1, q, above=False)
        r1[two] = _bisect(left, lo, ms.copy(), q, increasing=True)
        l2[two] = _bisect(left, ms.copy(), ys.copy(), q, increasing=False)
    return r1, l2, r2


def exact_components(y, model, alpha):
    """Unbounded exact confidence sets for exp-linear models (vectorized)

    Parameters
    ----------
    y: float or 1d ndarray
        Observations
    model: pairvar.model.VarianceModel
        Exp-linear variance model (any sign of the slope)
    alpha: float
        Significance level

    Returns
    -------
    comps: ndarray of shape (n, 2, 2)
        `comps[i, k] = (lo, hi)` of the k-th component for
        observation i; a missing second component is nan.
    """
    if model.form != "exp-linear":
        raise UnsupportedFormError("Closed-form inversion requires the "
                                   + "exp-linear form, got "
                                   + "'{}'!".format(model.form))
    q = chi2_quantile(alpha, 1)
    y = np.array(y, dtype=float).reshape(-1)
    t1, t2 = model.theta
    comps = np.full((y.size, 2, 2), np.nan)
    if t2 == 0:
        half = np.sqrt(q * np.exp(t1))
        comps[:, 0, 0] = y - half
        comps[:, 0, 1] = y + half
    elif t2 < 0:
        r1, l2, r2 = _explinear_roots(y, t1, t2, q)
        two = np.isfinite(r1)
        comps[:, 0, 0] = -np.inf
        comps[:, 0, 1] = np.where(two, r1, r2)
        comps[two, 1, 0] = l2[two]
        comps[two, 1, 1] = r2[two]
    else:
        # mirror mu -> -mu
        r1, l2, r2 = _explinear_roots(-y, t1, -t2, q)
        two = np.isfinite(r1)
        comps[:, 0, 0] = -r2
        comps[:, 0, 1] = np.where(two, -l2, np.inf)
        comps[two, 1, 0] = -r1[two]
        comps[two, 1, 1] = np.inf
    return comps


def bounded_hull(comps, bounds):
    """Hull of the components intersected with bounds (vectorized)

    Returns arrays `lo`, `hi`, both nan where the intersection is empty.
    """
    a, b = bounds
    lo = np.maximum(comps[..., 0], a)
    hi = np.minimum(comps[..., 1], b)
    valid = lo <= hi
    with np.errstate(invalid="ignore"):
        hlo = np.min(np.where(valid, lo, np.inf), axis=-1)
        hhi = np.max(np.where(valid, hi, -np.inf), axis=-1)
    empty = ~np.any(valid, axis=-1)
    hlo[empty] = np.nan
    hhi[empty] = np.nan
    return hlo, hhi


def _intersect(components, bounds):
    if bounds is None:
        return list(components)
    a, b = bounds
    out = []
    for lo, hi in components:
        lo = max(lo, a)
        hi = min(hi, b)
        if lo <= hi:
            out.append((lo, hi))
    return out


def invert_on_grid(pivot, a, b, q, points=INVERSION_POINTS):
    """Invert a scalar pivot on a dense grid over [a, b]

    Parameters
    ----------
    pivot: callable
        Vectorized function of mu
    a, b: float
        Finite search interval
    q: float
        Critical value; mu is accepted if `pivot(mu) <= q`
    points: int
        Number of grid points

    Returns
    -------
    components: list of (lo, hi) tuples
        Endpoints in the interior of [a, b] are refined with
        Brent's method.
    """
    if not (np.isfinite(a) and np.isfinite(b)):
        raise UnsupportedFormError("Grid inversion requires finite bounds!")
    grid = np.linspace(a, b, points)
    accepted = pivot(grid) <= q
    comps = []
    for start, stop in _runs(accepted):
        lo = grid[start]
        hi = grid[stop]
        if start > 0:
            lo = scipy.optimize.brentq(lambda x: pivot(x) - q,
                                       grid[start - 1], grid[start],
                                       xtol=1e-14)
        if stop < points - 1:
            hi = scipy.optimize.brentq(lambda x: pivot(x) - q,
                                       grid[stop], grid[stop + 1],
                                       xtol=1e-14)
        comps.append((float(lo), float(hi)))
    return comps


def _runs(mask):
    """(first, last) indices of runs of True values"""
    padded = np.concatenate([[False], mask, [False]]).astype(int)
    edges = np.diff(padded)
    starts = np.where(edges == 1)[0]
    stops = np.where(edges == -1)[0] - 1
    return list(zip(starts, stops))


def ci_mu_exact(y, model, alpha=0.05, bounds=None):
    """Exact confidence set for a single mean by pivot inversion

    Parameters
    ----------
    y: float
        Observation
    model: pairvar.model.VarianceModel
        Variance model
    alpha: float
        Significance level
    bounds: tuple (a, b) or None
        Support of the mean; each component is intersected with it

    Returns
    -------
    cset: pairvar.intervals.ConfidenceSet

    Notes
    -----
    For the exp-linear form, the endpoints are found with bracket
    expansion and bisection using the known local extrema of the
    pivot. Other forms are inverted on a dense grid over the bounds
    which issues a :class:`pairvar.excpt.GridInversionWarning` and
    flags the set as approximate.
    """
    _check_alpha(alpha)
    y = float(y)
    if model.form == "exp-linear":
        comps = exact_components(y, model, alpha)[0]
        components = [tuple(cc) for cc in comps if not np.isnan(cc[0])]
        approximate = False
    else:
        if bounds is None:
            raise UnsupportedFormError(
                "Form '{}' requires finite bounds ".format(model.form)
                + "for confidence set inversion!")
        warnings.warn("Inverting the pivot for form "
                      + "'{}' on a dense grid.".format(model.form),
                      GridInversionWarning)
        components = invert_on_grid(lambda mu: exact_pivot(y, mu, model),
                                    bounds[0], bounds[1],
                                    chi2_quantile(alpha, 1))
        approximate = True
    components = _intersect(components, bounds)
    if not components:
        raise DegenerateSetError("Confidence set for y={} ".format(y)
                                 + "does not intersect the bounds "
                                 + "{}!".format(bounds))
    return ConfidenceSet(components=components, level=1 - alpha,
                         approximate=approximate)


def ci_mu_naive(y, model, alpha=0.05):
    """Plug-in interval y ± z_(1-alpha/2) sqrt(h(theta, y))"""
    _check_alpha(alpha)
    z = scipy.stats.norm.isf(alpha / 2)
    half = z * np.sqrt(model.variance(float(y)))
    return ConfidenceSet(components=[(y - half, y + half)], level=1 - alpha)


def region_profile(y1, y2, nu1, model, bounds, points=PROFILE_POINTS,
                   refine=False):
    """Minimum of the chi²(2) pivot over the nuisance mean

    Parameters
    ----------
    y1, y2: float or 1d ndarray
        Observations (vectorized for simulations)
    nu1: float
        Log-ratio mu1 - mu2
    model: pairvar.model.VarianceModel
    bounds: tuple (a, b)
        Support of both means
    points: int
        Number of points of the dense scan
    refine: bool
        Refine the scan minimum with bounded scalar minimization
        (scalar observations only)

    Returns
    -------
    qmin: float or 1d ndarray
        Minimum of the pivot over all (mu1, mu2) in [a, b]² with
        mu1 - mu2 = nu1 (inf if there is no such pair)
    """
    a, b = bounds
    lo = max(a, a - nu1)
    hi = min(b, b - nu1)
    scalar = np.ndim(y1) == 0
    y1 = np.atleast_1d(np.asarray(y1, dtype=float))
    y2 = np.atleast_1d(np.asarray(y2, dtype=float))
    if lo > hi:
        qmin = np.full(y1.shape, np.inf)
        return float(qmin[0]) if scalar else qmin
    mu2 = np.linspace(lo, hi, points)
    mu1 = mu2 + nu1
    h1 = model.variance(mu1)
    h2 = model.variance(mu2)
    qq = ((y1[:, np.newaxis] - mu1)**2 / h1
          + (y2[:, np.newaxis] - mu2)**2 / h2)
    idx = np.argmin(qq, axis=1)
    qmin = qq[np.arange(y1.size), idx]
    if refine and scalar and points > 1:
        kk = idx[0]
        left = mu2[max(kk - 1, 0)]
        right = mu2[min(kk + 1, points - 1)]
        if right > left:
            res = scipy.optimize.minimize_scalar(
                lambda m: float(region_pivot(y1[0], y2[0], m + nu1, m,
                                             model)),
                bounds=(left, right),
                method="bounded",
                options={"xatol": 1e-12})
            qmin[0] = min(qmin[0], res.fun)
    return float(qmin[0]) if scalar else qmin


def _refine_endpoint(profile, nu_in, nu_out, limit, q, step):
    """Boundary of {nu: profile(nu) <= q} between nu_in and nu_out"""
    direction = np.sign(nu_out - nu_in)
    # the continuous profile may accept beyond the lattice point
    while profile(nu_out) <= q:
        nu_in = nu_out
        if direction * (limit - nu_out) <= 0:
            return nu_in
        nu_out = nu_out + direction * step
        if direction * (nu_out - limit) > 0:
            nu_out = limit
    for _ in range(60):
        if abs(nu_out - nu_in) <= 1e-12:
            break
        mid = (nu_in + nu_out) / 2
        if profile(mid) <= q:
            nu_in = mid
        else:
            nu_out = mid
    return nu_in


def ci_diff_region(y1, y2, model, alpha=0.05, bounds=(7.3, 13.9),
                   grid_res=DEFAULT_GRID_RES):
    """Conservative confidence set for nu1 = mu1 - mu2

    The exact chi²(2) confidence region for (mu1, mu2) restricted to
    [a, b]² is projected onto nu1.

    Parameters
    ----------
    y1, y2: float
        Observations
    model: pairvar.model.VarianceModel
        Variance model
    alpha: float
        Significance level
    bounds: tuple (a, b)
        Finite support of the means
    grid_res: float
        Lattice resolution (log units) in nu1 and nu2

    Returns
    -------
    cset: pairvar.intervals.ConfidenceSet
        Set of nu1 values (log scale); use `cset.ratio_hull` for the
        ratio scale.

    Notes
    -----
    The means are discretized with half the lattice resolution, so
    every (nu1, nu2) lattice point corresponds to a pair of grid
    means. A nu1 lattice value is accepted if the pivot is below the
    critical value for any admissible nu2. The endpoints of each
    accepted run are then refined by bisection on the continuous
    profile of the pivot over nu2.
    """
    _check_alpha(alpha)
    if not grid_res > 0:
        raise ValueError("`grid_res` must be positive, got "
                         + "{}!".format(grid_res))
    a, b = float(bounds[0]), float(bounds[1])
    if not (np.isfinite(a) and np.isfinite(b)) or a > b:
        raise ValueError("Finite bounds a <= b are required, got "
                         + "{}!".format(bounds))
    q = chi2_quantile(alpha, 2)
    if a == b:
        if region_pivot(y1, y2, a, a, model) <= q:
            return ConfidenceSet(components=[(0., 0.)], level=1 - alpha)
        raise DegenerateSetError("Confidence region does not intersect "
                                 + "the degenerate bounds {}!".format(bounds))
    mm = max(1, int(round((b - a) / grid_res)))
    half = (b - a) / mm / 2
    mu = a + half * np.arange(2 * mm + 1)
    g1 = exact_pivot(y1, mu, model)
    g2 = exact_pivot(y2, mu, model)
    n = mu.size
    # minimum over the diagonals k1 - k2 = m
    diagmin = np.empty(2 * n - 1)
    for m in range(-(n - 1), n):
        if m >= 0:
            diagmin[m + n - 1] = np.min(g1[m:] + g2[:n - m])
        else:
            diagmin[m + n - 1] = np.min(g1[:n + m] + g2[-m:])
    nu = half * np.arange(-(n - 1), n)
    accepted = diagmin <= q
    if not np.any(accepted):
        raise DegenerateSetError("Confidence region for ({}, {}) ".format(
            y1, y2) + "is empty within the bounds {}!".format(bounds))

    def profile(nu1):
        return region_profile(y1, y2, nu1, model, (a, b), refine=True)

    lim = b - a
    components = []
    for start, stop in _runs(accepted):
        lo = nu[start]
        hi = nu[stop]
        if start > 0:
            lo = _refine_endpoint(profile, lo, nu[start - 1], -lim, q, half)
        if stop < nu.size - 1:
            hi = _refine_endpoint(profile, hi, nu[stop + 1], lim, q, half)
        if components and lo <= components[-1][1]:
            components[-1] = (components[-1][0], hi)
        else:
            components.append((lo, hi))
    return ConfidenceSet(components=components, level=1 - alpha)


def ci_diff_bonferroni(y1, y2, model, alpha=0.05, bounds=(7.3, 13.9)):
    """Difference interval from two exact 1 - alpha/2 sets for the means"""
    _check_alpha(alpha)
    lo1, hi1 = ci_mu_exact(y1, model, alpha / 2, bounds).hull
    lo2, hi2 = ci_mu_exact(y2, model, alpha / 2, bounds).hull
    return ConfidenceSet(components=[(lo1 - hi2, hi1 - lo2)],
                         level=1 - alpha)


def ci_diff_naive(y1, y2, model, alpha=0.05):
    """Plug-in interval for the difference of the means

    y1 - y2 ± z_(1-alpha/2) sqrt(h(theta, y1) + h(theta, y2))
    """
    _check_alpha(alpha)
    z = scipy.stats.norm.isf(alpha / 2)
    half = z * np.sqrt(model.variance(float(y1))
                       + model.variance(float(y2)))
    diff = y1 - y2
    return ConfidenceSet(components=[(diff - half, diff + half)],
                         level=1 - alpha)


def naive_half_width(y, model, alpha, pair=False):
    """Vectorized half widths of the naive intervals

    For `pair=True`, `y` is a tuple (y1, y2) and the half width of the
    difference interval is returned.
    """
    z = scipy.stats.norm.isf(alpha / 2)
    if pair:
        return z * np.sqrt(model.variance(y[0]) + model.variance(y[1]))
    return z * np.sqrt(model.variance(y))
