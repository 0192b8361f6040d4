"""Mixture model estimation of the variance function

The latent means are treated as draws from an unknown distribution G0
on [a, b] which is discretized on a variance-adaptive support grid.
The coefficients of the variance function and the grid weights are
then estimated jointly by maximum likelihood with the EM algorithm.
"""
from dataclasses import dataclass, field
from typing import List

import numpy as np
import pandas as pd
from scipy.special import logsumexp

from .excpt import (ConvergenceError, DataError, EMAscentError,
                    GridExplosionError, ResponsibilityUnderflowError)
from .macl import DEFAULT_TOL as DEFAULT_INNER_TOL
from .macl import macl_fit, solve_score
from .model import VarianceModel

#: Default maximal distance between support points in standard deviations
DEFAULT_D = 0.25
#: Default tolerance for the relative change of the log-likelihood
DEFAULT_EM_TOL = 1e-8
#: Default maximum number of EM iterations
DEFAULT_EM_MAX_ITER = 2000
#: Maximum number of support points
MAX_GRID_POINTS = 1000000
#: Absolute slack for the log-likelihood ascent check
ASCENT_SLACK = 1e-8


@dataclass(frozen=True)
class SupportGrid:
    """Support points of the discretized mixing distribution"""
    #: strictly increasing support points in [a, b]
    points: np.ndarray
    #: maximal distance between points in standard deviations
    spacing_d: float

    def __len__(self):
        return self.points.size

    @property
    def J(self):
        return self.points.size


@dataclass(frozen=True)
class ResponsibilityMatrix:
    """Posterior probabilities w_ij of pair i belonging to grid point j"""
    w: np.ndarray

    @property
    def shape(self):
        return self.w.shape


@dataclass(frozen=True)
class MixtureEstimate:
    #: fitted variance model
    model: VarianceModel
    #: support grid used for the fit
    grid: SupportGrid
    #: estimated weights of the grid points
    pi_hat: np.ndarray
    #: mixture log-likelihood at (theta_hat, pi_hat)
    log_lik: float
    iterations: int
    converged: bool
    #: log-likelihood after each iteration (starting with the initial value)
    log_lik_trace: List[float] = field(default_factory=list)

    @property
    def theta_hat(self):
        return self.model.theta

    def support_table(self):
        """Estimated mixing distribution as a table with columns mu and pi"""
        return pd.DataFrame({"mu": self.grid.points, "pi": self.pi_hat})


def build_support(theta_tilde, a, b, d=DEFAULT_D):
    """Build a variance-adaptive support grid on [a, b]

    Starting at the maximal support point b, the points are computed
    recursively via mu_(j-1) = mu_j - d * sqrt(h(theta_tilde, mu_j))
    until a is reached. The smallest point is clamped to a.

    Parameters
    ----------
    theta_tilde: pairvar.model.VarianceModel
        Variance model used for the spacing (e.g. a MACL estimate)
    a, b: float
        Support interval of the latent means
    d: float
        Maximal distance between neighboring points in standard
        deviations

    Returns
    -------
    grid: SupportGrid
    """
    a = float(a)
    b = float(b)
    if a > b:
        raise ValueError("Bounds must satisfy a <= b, got "
                         + "({}, {})!".format(a, b))
    if not d > 0:
        raise ValueError("`d` must be positive, got {}!".format(d))
    if a == b:
        return SupportGrid(points=np.array([b]), spacing_d=float(d))
    eps = 1e-12 * (b - a)
    points = [b]
    mu = b
    while True:
        nxt = mu - d * np.sqrt(theta_tilde.variance(mu))
        if nxt <= a + eps:
            points.append(a)
            break
        if nxt >= mu or len(points) >= MAX_GRID_POINTS:
            raise GridExplosionError(
                "Support grid exceeds {} points at ".format(MAX_GRID_POINTS)
                + "mu={:.6g} (variance too small or d ".format(mu)
                + "too small)!")
        points.append(float(nxt))
        mu = nxt
    pts = np.array(points[::-1])
    pts.setflags(write=False)
    return SupportGrid(points=pts, spacing_d=float(d))


def _squared_distances(data, grid):
    """(y1 - mu_j)² + (y2 - mu_j)² with shape (N, J)"""
    mu = grid.points[np.newaxis, :]
    return ((data.y1[:, np.newaxis] - mu)**2
            + (data.y2[:, np.newaxis] - mu)**2)


def _log_joint(dist, model, grid, pi):
    """log(pi_j) + log f(y_i; theta | mu_j), shape (N, J)"""
    h = model.variance(grid.points)[np.newaxis, :]
    with np.errstate(divide="ignore"):
        logpi = np.log(np.asarray(pi, dtype=float))
    return logpi[np.newaxis, :] - np.log(2 * np.pi) - np.log(h) \
        - dist / (2 * h)


def _row_norm(logj, ids):
    lse = logsumexp(logj, axis=1)
    bad = ~np.isfinite(lse)
    if np.any(bad):
        idx = np.where(bad)[0][0]
        raise ResponsibilityUnderflowError(
            "All mixture components underflow for pair "
            + "'{}'!".format(ids[idx]))
    return lse


def _check_pi(pi, grid):
    pi = np.asarray(pi, dtype=float)
    if pi.shape != (grid.J,):
        raise ValueError("`pi` must have length {}, got {}!".format(
            grid.J, pi.size))
    if np.any(pi < 0) or not np.isclose(np.sum(pi), 1, rtol=0, atol=1e-10):
        raise ValueError("`pi` must be a probability vector!")
    return pi


def responsibilities(data, model, grid, pi):
    """E-step: posterior probabilities of the grid points

    Parameters
    ----------
    data: pairvar.model.PairedDataset
    model: pairvar.model.VarianceModel
    grid: SupportGrid
    pi: 1d ndarray
        Weights of the grid points

    Returns
    -------
    resp: ResponsibilityMatrix
        w_ij = pi_j f(y_i|mu_j) / sum_k pi_k f(y_i|mu_k), computed
        in log space
    """
    pi = _check_pi(pi, grid)
    logj = _log_joint(_squared_distances(data, grid), model, grid, pi)
    lse = _row_norm(logj, data.ids)
    return ResponsibilityMatrix(w=np.exp(logj - lse[:, np.newaxis]))


def mixture_log_lik(data, model, grid, pi):
    """Log-likelihood of the discretized mixture model"""
    pi = _check_pi(pi, grid)
    logj = _log_joint(_squared_distances(data, grid), model, grid, pi)
    return float(np.sum(_row_norm(logj, data.ids)))


def check_ascent(ll, ll_new, iteration):
    """Raise an EMAscentError if the log-likelihood decreased

    Decreases of up to :data:`ASCENT_SLACK` (absolute) are rounding.
    """
    if ll_new < ll - ASCENT_SLACK:
        raise EMAscentError(
            "Log-likelihood decreased from {!r} to {!r} in ".format(
                ll, ll_new)
            + "EM iteration {}!".format(iteration))


def em_fit(data, grid, init_theta, tol=DEFAULT_EM_TOL,
           max_iter=DEFAULT_EM_MAX_ITER, inner_tol=DEFAULT_INNER_TOL,
           pi_init=None):
    """Fit the mixture model with the EM algorithm

    Parameters
    ----------
    data: pairvar.model.PairedDataset
        At least three pairs
    grid: SupportGrid
        Support grid (kept fixed during the iterations)
    init_theta: pairvar.model.VarianceModel
        Initial variance model; its form is the form of the fit
    tol: float
        The iteration stops when the relative change of the
        log-likelihood falls below `tol`
    max_iter: int
        Maximum number of EM iterations
    inner_tol: float
        Tolerance of the weighted estimating equations in the M-step
    pi_init: 1d ndarray or None
        Initial grid weights; defaults to uniform weights

    Returns
    -------
    estimate: MixtureEstimate

    Notes
    -----
    The M-step updates the weights with pi_j = N⁻¹ Σ_i w_ij. The
    coefficients maximize Σ_ij w_ij log f(y_i; theta | mu_j), which
    only depends on the pooled weights W_j = Σ_i w_ij and the pooled
    squared distances R_j = Σ_i w_ij [(y_i1-mu_j)² + (y_i2-mu_j)²].
    It is solved with :func:`pairvar.macl.solve_score` using the
    variance statistics R_j / (2 W_j) and weights W_j.
    """
    if len(data) < 3:
        raise DataError("At least 3 pairs are required, got "
                        + "{}!".format(len(data)))
    if len(grid) < 1:
        raise ValueError("The support grid is empty!")
    model = init_theta
    if pi_init is None:
        pi = np.full(grid.J, 1 / grid.J)
    else:
        pi = _check_pi(pi_init, grid).copy()
    dist = _squared_distances(data, grid)
    logj = _log_joint(dist, model, grid, pi)
    lse = _row_norm(logj, data.ids)
    ll = float(np.sum(lse))
    trace = [ll]
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        w = np.exp(logj - lse[:, np.newaxis])
        # M-step
        pi = np.mean(w, axis=0)
        pi /= np.sum(pi)
        wsum = np.sum(w, axis=0)
        rsum = np.sum(w * dist, axis=0)
        used = wsum > 0
        fit = solve_score(x=grid.points[used],
                          v=rsum[used] / (2 * wsum[used]),
                          c=wsum[used],
                          form=model.form,
                          init=model.theta,
                          tol=inner_tol)
        model = fit.model
        # E-step
        logj = _log_joint(dist, model, grid, pi)
        lse = _row_norm(logj, data.ids)
        ll_new = float(np.sum(lse))
        trace.append(ll_new)
        check_ascent(ll, ll_new, iterations)
        change = abs(ll_new - ll) / max(abs(ll), np.finfo(float).tiny)
        ll = ll_new
        if change < tol:
            converged = True
            break
    pi.setflags(write=False)
    return MixtureEstimate(model=model,
                           grid=grid,
                           pi_hat=pi,
                           log_lik=ll,
                           iterations=iterations,
                           converged=converged,
                           log_lik_trace=trace)


def fit_mixture(data, form="exp-linear", d=DEFAULT_D, init=None,
                tol=DEFAULT_EM_TOL, max_iter=DEFAULT_EM_MAX_ITER,
                inner_tol=DEFAULT_INNER_TOL, regrid=False):
    """MACL start, support grid and EM fit in one call

    Parameters
    ----------
    data: pairvar.model.PairedDataset
    form: str
        Variance function form
    d: float
        Grid spacing in standard deviations
    init: pairvar.model.VarianceModel or None
        Initial model; defaults to the MACL estimate
    tol, max_iter, inner_tol:
        See :func:`em_fit`
    regrid: bool
        Rebuild the support grid once from the EM estimate and refit

    Returns
    -------
    estimate: MixtureEstimate
    """
    if init is None:
        try:
            init = macl_fit(data, form=form).model
        except ConvergenceError as e:
            # best iterate is a valid starting point
            init = VarianceModel(form, e.theta)
    a, b = data.bounds
    grid = build_support(init, a, b, d)
    est = em_fit(data, grid, init, tol=tol, max_iter=max_iter,
                 inner_tol=inner_tol)
    if regrid:
        grid = build_support(est.model, a, b, d)
        est = em_fit(data, grid, est.model, tol=tol, max_iter=max_iter,
                     inner_tol=inner_tol)
    return est
