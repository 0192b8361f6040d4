"""p-values for equal means of a pair of observations

Under H0: mu1 = mu2 = mu, the statistic

.. code::

    (Y1 - Y2)² / (2 h(theta, mu))

follows the chi²(1) distribution. The nuisance mean mu is handled
by plugging in the pair mean (naive), by the supremum over [a, b]
(conservative) or by the supremum over a 1 - beta confidence set
for mu plus beta (Berger-Boos).
"""
from dataclasses import dataclass
from typing import Optional
import warnings

import numpy as np
import scipy.optimize
import scipy.stats

from .excpt import DegenerateSetError, EmptyNuisanceSetWarning
from .intervals import (bounded_hull, chi2_quantile, ci_mu_exact,
                        exact_components, invert_on_grid)
from .model import DEFAULT_BOUNDS

#: Default beta for data analysis
DEFAULT_BETA = 1e-6
#: Default beta for power simulations
DEFAULT_BETA_POWER = 1e-3
#: Number of grid points for the supremum search
SUP_GRID_POINTS = 1000

#: Available pivots for the nuisance confidence set
available_cbeta_pivots = ["mean", "pair"]


@dataclass(frozen=True)
class TestResult:
    #: "naive", "conservative" or "berger-boos"
    method: str
    #: p-value in [0, 1]
    p_value: float
    #: test statistic at `mu_sup`
    statistic: float
    #: nuisance mean at which the statistic was evaluated
    mu_sup: float
    #: beta of the Berger-Boos construction
    beta: Optional[float] = None
    #: whether the nuisance confidence set was empty
    empty_nuisance_set: bool = False

    # not a test class
    __test__ = False


def _statistic(y1, y2, h):
    return (y1 - y2)**2 / (2 * h)


def argmax_variance(model, lo, hi):
    """Mean in [lo, hi] at which the variance function is largest

    For the exp-linear form, the maximum is attained at an endpoint
    determined by the sign of the slope. Other forms are searched on
    a grid with subsequent bounded refinement.
    """
    if lo == hi:
        return float(lo)
    if model.form == "exp-linear":
        return float(lo) if model.theta[1] <= 0 else float(hi)
    grid = np.linspace(lo, hi, SUP_GRID_POINTS)
    hh = model.variance(grid)
    kk = int(np.argmax(hh))
    left = grid[max(kk - 1, 0)]
    right = grid[min(kk + 1, grid.size - 1)]
    res = scipy.optimize.minimize_scalar(lambda m: -model.variance(m),
                                         bounds=(left, right),
                                         method="bounded",
                                         options={"xatol": 1e-10})
    if -res.fun > hh[kk]:
        return float(res.x)
    return float(grid[kk])


def pvalue_naive(y1, y2, model):
    """Naive p-value with the variance at the pair mean"""
    ybar = (y1 + y2) / 2
    stat = _statistic(y1, y2, model.variance(ybar))
    return TestResult(method="naive",
                      p_value=float(scipy.stats.chi2.sf(stat, 1)),
                      statistic=float(stat),
                      mu_sup=float(ybar))


def _sup_result(y1, y2, model, lo, hi, method, beta=None):
    mu_sup = argmax_variance(model, lo, hi)
    stat = _statistic(y1, y2, model.variance(mu_sup))
    pval = scipy.stats.chi2.sf(stat, 1)
    if beta is not None:
        pval = min(1., pval + beta)
    return TestResult(method=method,
                      p_value=float(pval),
                      statistic=float(stat),
                      mu_sup=mu_sup,
                      beta=beta)


def pvalue_conservative(y1, y2, model, bounds=DEFAULT_BOUNDS):
    """Supremum of the p-value over all means in [a, b]"""
    return _sup_result(y1, y2, model, bounds[0], bounds[1], "conservative")


def nuisance_set(y1, y2, model, beta, bounds=DEFAULT_BOUNDS,
                 cbeta_pivot="mean"):
    """Hull of a 1 - beta confidence set for the common mean under H0

    Parameters
    ----------
    y1, y2: float
        Observations
    model: pairvar.model.VarianceModel
    beta: float
        Significance level of the nuisance set
    bounds: tuple (a, b)
        Support of the mean
    cbeta_pivot: str
        "mean" inverts (Ybar - mu)² / (h(theta, mu) / 2) against
        chi²(1); "pair" inverts ((Y1 - mu)² + (Y2 - mu)²) / h(theta, mu)
        against chi²(2).

    Returns
    -------
    hull: tuple (lo, hi) or None
        None if the set does not intersect the bounds
    """
    if cbeta_pivot not in available_cbeta_pivots:
        raise ValueError("Unknown nuisance pivot '{}', ".format(cbeta_pivot)
                         + "expected one of {}!".format(
                             available_cbeta_pivots))
    if cbeta_pivot == "mean":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            try:
                cset = ci_mu_exact((y1 + y2) / 2, model.scaled(0.5),
                                   alpha=beta, bounds=bounds)
            except DegenerateSetError:
                return None
        return cset.hull
    else:
        def pivot(mu):
            return ((y1 - mu)**2 + (y2 - mu)**2) / model.variance(mu)
        comps = invert_on_grid(pivot, bounds[0], bounds[1],
                               chi2_quantile(beta, 2))
        if not comps:
            return None
        return comps[0][0], comps[-1][1]


def pvalue_berger_boos(y1, y2, model, bounds=DEFAULT_BOUNDS,
                       beta=DEFAULT_BETA, cbeta_pivot="mean"):
    """Berger-Boos p-value

    The supremum of the p-value over a 1 - beta confidence set for
    the common mean, intersected with the bounds, plus beta. The
    result is capped at 1 and never smaller than beta.

    If the nuisance set does not intersect the bounds, the supremum
    is taken as 0, an :class:`pairvar.excpt.EmptyNuisanceSetWarning`
    is issued and the p-value is beta.
    """
    if not 0 < beta < 1:
        raise ValueError("`beta` must be in (0, 1), got {}!".format(beta))
    hull = nuisance_set(y1, y2, model, beta, bounds=bounds,
                        cbeta_pivot=cbeta_pivot)
    if hull is None:
        warnings.warn("Nuisance confidence set for ({}, {}) ".format(y1, y2)
                      + "does not intersect the bounds {}.".format(bounds),
                      EmptyNuisanceSetWarning)
        return TestResult(method="berger-boos",
                          p_value=float(beta),
                          statistic=np.nan,
                          mu_sup=np.nan,
                          beta=beta,
                          empty_nuisance_set=True)
    return _sup_result(y1, y2, model, hull[0], hull[1], "berger-boos",
                       beta=beta)


#: Dictionary of the p-value methods
pvalue_dict = {
    "naive": lambda y1, y2, model, bounds, beta, cbeta_pivot:
        pvalue_naive(y1, y2, model),
    "conservative": lambda y1, y2, model, bounds, beta, cbeta_pivot:
        pvalue_conservative(y1, y2, model, bounds),
    "berger-boos": lambda y1, y2, model, bounds, beta, cbeta_pivot:
        pvalue_berger_boos(y1, y2, model, bounds, beta, cbeta_pivot),
}

#: Available p-value methods
available_methods = sorted(pvalue_dict.keys())


def compute_pvalue(y1, y2, model, method, bounds=DEFAULT_BOUNDS,
                   beta=DEFAULT_BETA, cbeta_pivot="mean"):
    """Compute a p-value with the method given by name"""
    if method not in pvalue_dict:
        raise ValueError("Unknown p-value method '{}', ".format(method)
                         + "expected one of {}!".format(available_methods))
    return pvalue_dict[method](y1, y2, model, bounds, beta, cbeta_pivot)


def batch_pvalues(y1, y2, model, method, bounds=DEFAULT_BOUNDS,
                  beta=DEFAULT_BETA_POWER, cbeta_pivot="mean"):
    """p-values for arrays of pairs

    Exp-linear models with the "mean" nuisance pivot are processed
    fully vectorized; all other cases fall back to
    :func:`compute_pvalue` pair by pair.

    Returns
    -------
    pvals: 1d ndarray
    """
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    if method == "naive":
        stat = _statistic(y1, y2, model.variance((y1 + y2) / 2))
        return scipy.stats.chi2.sf(stat, 1)
    elif method == "conservative":
        mu_sup = argmax_variance(model, bounds[0], bounds[1])
        stat = _statistic(y1, y2, model.variance(mu_sup))
        return scipy.stats.chi2.sf(stat, 1)
    elif (method == "berger-boos" and model.form == "exp-linear"
          and cbeta_pivot == "mean"):
        comps = exact_components((y1 + y2) / 2, model.scaled(0.5), beta)
        lo, hi = bounded_hull(comps, bounds)
        empty = np.isnan(lo)
        mu_sup = lo if model.theta[1] <= 0 else hi
        mu_sup = np.where(empty, bounds[0], mu_sup)
        stat = _statistic(y1, y2, model.variance(mu_sup))
        sup = np.where(empty, 0, scipy.stats.chi2.sf(stat, 1))
        return np.minimum(1, sup + beta)
    pvals = np.empty(y1.size)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EmptyNuisanceSetWarning)
        for ii in range(y1.size):
            pvals[ii] = compute_pvalue(y1[ii], y2[ii], model, method,
                                       bounds=bounds, beta=beta,
                                       cbeta_pivot=cbeta_pivot).p_value
    return pvals
