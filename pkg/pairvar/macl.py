"""Maximum approximate conditional likelihood (MACL) fits

The approximate conditional likelihood plugs the pair means into the
variance function and leads to the estimating equations

.. code::

    Σ_i [∂h(θ, Ybar_i)/∂θ_j / h²(θ, Ybar_i)] (S²_i - h(θ, Ybar_i)) = 0

which are the score equations of the objective

.. code::

    L(θ) = -Σ_i c_i [log h(θ, x_i) + v_i / h(θ, x_i)]

with unit weights c_i, x_i = Ybar_i and v_i = S²_i. The same objective
with grid points x_j, pooled weights and pooled variance statistics
is the θ-part of the EM M-step (see :mod:`pairvar.mixture_em`), so
:func:`solve_score` serves both estimators.
"""
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .excpt import (ConvergenceError, DataError, DomainError,
                    EvaluationError)
from .model import VarianceModel


#: Default convergence tolerance (max-norm of the estimating equations)
DEFAULT_TOL = 1e-9
#: Default maximum number of Newton iterations
DEFAULT_MAX_ITER = 200
#: Offset for the logarithm of the variance statistics (initial values)
LOG_OFFSET = 1e-12


@dataclass(frozen=True)
class FitResult:
    """Solution of the (weighted) estimating equations"""
    #: fitted variance model (form and coefficients)
    model: VarianceModel
    #: whether the residual norm is below the tolerance
    converged: bool
    #: number of iterations (Newton steps or simplex iterations)
    iterations: int
    #: max-norm of the estimating equations at the solution
    residual_norm: float
    #: "newton" or "simplex" (derivative-free fallback)
    solver: str = "newton"

    @property
    def theta_hat(self):
        return self.model.theta


def _weights(c):
    c = np.asarray(c, dtype=float)
    return c / np.sum(c)


def objective(model, x, v, w):
    """Weighted approximate conditional log-likelihood (per unit weight)"""
    h = model.variance(x)
    return -np.sum(w * (np.log(h) + v / h))


def residual(model, x, v, w):
    """Weighted estimating equations (gradient of :func:`objective`)"""
    h = model.variance(x)
    dh = model.gradient(x)
    return dh @ (w * (v - h) / h**2)


def jacobian(model, x, v, w):
    """Analytic Jacobian of :func:`residual` with respect to theta"""
    h = model.variance(x)
    dh = model.gradient(x)
    d2h = model.hessian(x)
    a = w * (v - h) / h**2
    b = w * (2 * v - h) / h**3
    return (np.einsum("ijn,n->ij", d2h, a)
            - np.einsum("in,jn,n->ij", dh, dh, b))


def fisher_information(model, x, w):
    h = model.variance(x)
    dh = model.gradient(x)
    return np.einsum("in,jn,n->ij", dh, dh, w / h**2)


def _safe(func, *args):
    try:
        with np.errstate(over="raise", invalid="raise", divide="raise"):
            val = func(*args)
    except (EvaluationError, DomainError, FloatingPointError, ValueError):
        return None
    if not np.all(np.isfinite(val)):
        return None
    return val


def default_init(data, form):
    """Moment-matching start from a least-squares line

    The slope and intercept of the least-squares line of
    log(S² + 1e-12) on Ybar (on log(Ybar) for the power form)
    serve as initial coefficients. For "exp-linear-const", the
    constant term starts at half of the smallest fitted variance.
    """
    ybar = data.ybar
    logs2 = np.log(data.s2 + LOG_OFFSET)
    xx = np.log(ybar) if form == "power" else ybar
    if np.ptp(xx) == 0:
        slope = 0.
        intercept = np.mean(logs2)
    else:
        slope, intercept = np.polyfit(xx, logs2, deg=1)
    if form == "exp-linear-const":
        hmin = np.min(np.exp(intercept + slope * xx))
        return np.array([intercept, slope, np.log(hmin / 2)])
    return np.array([intercept, slope])


def solve_score(x, v, c, form, init, tol=DEFAULT_TOL,
                max_iter=DEFAULT_MAX_ITER, fixed=None):
    """Solve weighted estimating equations with damped Newton iterations

    Parameters
    ----------
    x: 1d ndarray
        Locations at which the variance function is evaluated
    v: 1d ndarray
        Variance statistics at `x`
    c: 1d ndarray
        Nonnegative weights
    form: str
        Variance function form
    init: list-like of float
        Initial coefficients
    tol: float
        Tolerance for the max-norm of the (normalized) estimating
        equations of the free coefficients
    max_iter: int
        Maximum number of Newton iterations
    fixed: dict or None
        Coefficients pinned to a value, e.g. `{1: 0.0}` pins the slope
        of the exp-linear form (homoscedastic model)

    Returns
    -------
    fit: FitResult
        The returned coefficients never have a lower objective
        than `init`.

    Notes
    -----
    Each iteration takes a Newton step on the estimating equations
    with the analytic Jacobian. If the Newton direction is not an
    ascent direction of the objective, the Fisher-scoring direction
    (iteratively reweighted least squares) is used instead. Steps are
    halved until the objective does not decrease. If the Jacobian is
    singular, Nelder-Mead minimization of the squared residual norm
    takes over.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    w = _weights(c)
    theta = np.array(init, dtype=float)
    fixed = fixed or {}
    for key in fixed:
        theta[key] = fixed[key]
    free = np.array([ii for ii in range(theta.size) if ii not in fixed],
                    dtype=int)

    def model_of(th):
        return VarianceModel(form, th)

    model = model_of(theta)
    obj = _safe(objective, model, x, v, w)
    res = _safe(residual, model, x, v, w)
    if obj is None or res is None:
        raise EvaluationError("Variance function cannot be evaluated "
                              + "at the initial coefficients "
                              + "{}!".format(theta))
    res = res[free]
    obj_init = obj
    theta_init = theta.copy()
    singular = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        if np.max(np.abs(res)) <= tol:
            break
        jac = _safe(jacobian, model, x, v, w)
        if jac is None:
            singular = True
            break
        jac = jac[np.ix_(free, free)]
        if np.linalg.cond(jac) > 1e12:
            singular = True
            break
        step = -np.linalg.solve(jac, res)
        if np.dot(res, step) <= 0:
            fim = fisher_information(model, x, w)[np.ix_(free, free)]
            step = np.linalg.solve(fim, res)
        slack = 1e-14 * max(1, abs(obj))
        tt = 1.
        for _ in range(60):
            cand = theta.copy()
            cand[free] += tt * step
            cmodel = model_of(cand)
            cobj = _safe(objective, cmodel, x, v, w)
            if cobj is not None and cobj >= obj - slack:
                cres = _safe(residual, cmodel, x, v, w)
                if cres is not None:
                    break
            tt /= 2
        else:
            # line search stalled
            singular = True
            break
        theta, model, obj, res = cand, cmodel, cobj, cres[free]

    resnorm = float(np.max(np.abs(res))) if res.size else 0.
    if resnorm <= tol:
        return FitResult(model=model, converged=True, iterations=iterations,
                         residual_norm=resnorm, solver="newton")
    if not singular:
        return FitResult(model=model, converged=False, iterations=iterations,
                         residual_norm=resnorm, solver="newton")

    # derivative-free fallback
    def sqnorm(tfree):
        th = theta.copy()
        th[free] = tfree
        rr = _safe(residual, model_of(th), x, v, w)
        if rr is None:
            return np.inf
        return float(np.sum(rr[free]**2))

    opt = scipy.optimize.minimize(sqnorm, theta[free], method="Nelder-Mead",
                                  options={"xatol": 1e-12,
                                           "fatol": tol**2 / 100,
                                           "maxiter": 20 * max_iter,
                                           "maxfev": 40 * max_iter,
                                           })
    cand = theta.copy()
    cand[free] = opt.x
    cmodel = model_of(cand)
    cobj = _safe(objective, cmodel, x, v, w)
    cres = _safe(residual, cmodel, x, v, w)
    if (cobj is None or cres is None
            or cobj < max(obj, obj_init) - 1e-14 * max(1, abs(obj))):
        # keep the best point of the Newton phase
        if obj < obj_init:
            model = model_of(theta_init)
        return FitResult(model=model, converged=False,
                         iterations=iterations + opt.nit,
                         residual_norm=resnorm, solver="simplex")
    cresnorm = float(np.max(np.abs(cres[free])))
    return FitResult(model=cmodel, converged=cresnorm <= tol,
                     iterations=iterations + opt.nit,
                     residual_norm=cresnorm, solver="simplex")


def estimating_equations(data, model):
    """Left-hand sides of the two exp-linear estimating equations

    .. code::

        1 - N⁻¹ Σ S²_i exp(-t1 - t2 Ybar_i)
        N⁻¹ Σ Ybar_i - N⁻¹ Σ Ybar_i S²_i exp(-t1 - t2 Ybar_i)

    Parameters
    ----------
    data: pairvar.model.PairedDataset
    model: pairvar.model.VarianceModel
        Exp-linear variance model

    Returns
    -------
    lhs: tuple of two floats
    """
    if model.form != "exp-linear":
        raise ValueError("Only the exp-linear form is supported!")
    ybar = data.ybar
    ratio = data.s2 / model.variance(ybar)
    return (float(1 - np.mean(ratio)),
            float(np.mean(ybar) - np.mean(ybar * ratio)))


def macl_fit(data, form="exp-linear", init=None, tol=DEFAULT_TOL,
             max_iter=DEFAULT_MAX_ITER, fixed=None):
    """Fit a variance function by maximum approximate conditional likelihood

    Parameters
    ----------
    data: pairvar.model.PairedDataset
        At least three pairs
    form: str
        Variance function form (see :data:`pairvar.model.available_forms`)
    init: list-like of float or None
        Initial coefficients; defaults to :func:`default_init`
    tol: float
        Convergence tolerance (max-norm of the estimating equations)
    max_iter: int
        Maximum number of iterations
    fixed: dict or None
        Pinned coefficients; `form="exp-linear", fixed={1: 0}` yields
        the homoscedastic model h = exp(t1)

    Returns
    -------
    fit: FitResult

    Raises
    ------
    pairvar.excpt.ConvergenceError
        If the estimating equations could not be solved; the error
        carries the best iterate and its residual.
    """
    if len(data) < 3:
        raise DataError("At least 3 pairs are required, got "
                        + "{}!".format(len(data)))
    s2 = data.s2
    if np.all(s2 == 0):
        raise DataError("Degenerate data: all pairs have identical "
                        + "replicate values!")
    if form == "power" and np.any(data.ybar <= 0):
        raise DomainError("The power form requires positive pair means!")
    if init is None:
        init = default_init(data, form)
    fit = solve_score(x=data.ybar,
                      v=s2,
                      c=np.ones(len(data)),
                      form=form,
                      init=init,
                      tol=tol,
                      max_iter=max_iter,
                      fixed=fixed)
    if not fit.converged:
        raise ConvergenceError(
            "MACL fit did not converge after {} iterations ".format(
                fit.iterations)
            + "(residual {:.3g}, tolerance {:.3g})!".format(
                fit.residual_norm, tol),
            theta=np.array(fit.theta_hat),
            residual=fit.residual_norm,
            iterations=fit.iterations)
    return fit


def mle_homoscedastic(data):
    """Naive maximum likelihood estimate of a constant variance

    Returns N⁻¹ Σ (y_i1 - y_i2)² / 4, which has expectation θ/2 for the
    true variance θ (Neyman-Scott problem). This estimator is biased
    by construction and only serves as a diagnostic baseline.
    """
    if len(data) < 1:
        raise DataError("At least one pair is required!")
    return float(np.mean((data.y1 - data.y2)**2) / 4)
