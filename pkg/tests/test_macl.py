import numpy as np
import pytest

from pairvar import macl
from pairvar.excpt import ConvergenceError, DataError, DomainError
from pairvar.model import PairedDataset, VarianceModel
from pairvar.simulate import Scenario, generate_dataset


def simulated(theta=(5., -1.), n=2000, seed=7, form="exp-linear"):
    scenario = Scenario(kind="uniform-continuous", n=n, seed=seed)
    return generate_dataset(scenario, VarianceModel(form, theta))


def test_macl_exp_linear():
    data = simulated()
    fit = macl.macl_fit(data)
    assert fit.converged
    assert fit.residual_norm <= macl.DEFAULT_TOL
    assert fit.solver == "newton"
    # the variance at the center of the data is well determined
    assert abs(np.log(fit.model.variance(10.)) + 5) < 0.15
    assert abs(fit.theta_hat[1] + 1) < 0.2


def test_macl_solves_estimating_equations():
    data = simulated(seed=3)
    fit = macl.macl_fit(data)
    eq1, eq2 = macl.estimating_equations(data, fit.model)
    assert np.allclose([eq1, eq2], 0, atol=1e-7)


def test_macl_init_independent():
    data = simulated(seed=11, n=500)
    fit1 = macl.macl_fit(data)
    fit2 = macl.macl_fit(data, init=[3., -0.5])
    assert np.allclose(fit1.theta_hat, fit2.theta_hat, rtol=0, atol=1e-6)


def test_macl_shift_equivariant():
    data = simulated(seed=5, n=1000)
    fit = macl.macl_fit(data)
    offset = 1.5
    shifted = macl.macl_fit(data.shifted(offset))
    t1, t2 = fit.theta_hat
    # h_shifted(mu + offset) = h(mu)
    assert np.allclose(shifted.theta_hat, [t1 - t2 * offset, t2],
                       rtol=0, atol=1e-4)
    mu = np.linspace(7.3, 13.9, 12)
    assert np.allclose(shifted.model.variance(mu + offset),
                       fit.model.variance(mu), rtol=1e-3, atol=0)


def test_macl_deterministic():
    data = simulated(seed=6, n=500)
    fit1 = macl.macl_fit(data)
    fit2 = macl.macl_fit(data)
    assert np.array_equal(fit1.theta_hat, fit2.theta_hat)
    assert fit1.iterations == fit2.iterations


def test_macl_homoscedastic_closed_form():
    # with a pinned slope, exp(t1) is the mean of the pair statistics
    data = simulated(theta=(-4., 0.), seed=5, n=300)
    fit = macl.macl_fit(data, fixed={1: 0.})
    assert fit.theta_hat[1] == 0
    assert np.allclose(np.exp(fit.theta_hat[0]), np.mean(data.s2),
                       rtol=1e-8)


def test_macl_other_forms():
    data = simulated(theta=(15.7, -9.), form="power", seed=2)
    fit = macl.macl_fit(data, form="power")
    assert fit.converged
    assert abs(np.log(fit.model.variance(10.))
               - np.log(VarianceModel("power", (15.7, -9.)).variance(10.))
               ) < 0.15


def test_macl_data_errors():
    data = PairedDataset(y1=[8., 9.], y2=[8.1, 9.2])
    with pytest.raises(DataError):
        macl.macl_fit(data)
    ties = PairedDataset(y1=[8., 9., 10.], y2=[8., 9., 10.],
                         drop_ties=False)
    with pytest.raises(DataError):
        macl.macl_fit(ties)
    neg = PairedDataset(y1=[-1., 9., 10.], y2=[-1.2, 9.1, 10.4],
                        bounds=(-2, 13.9))
    with pytest.raises(DomainError):
        macl.macl_fit(neg, form="power")


def test_macl_convergence_error():
    data = simulated(seed=1, n=200)
    with pytest.raises(ConvergenceError) as exc:
        macl.macl_fit(data, init=[0., 0.], max_iter=1)
    assert exc.value.theta is not None
    assert exc.value.residual > macl.DEFAULT_TOL


def test_solve_score_never_decreases_objective():
    data = simulated(seed=9, n=300)
    w = np.ones(len(data)) / len(data)
    init = macl.default_init(data, "exp-linear")
    fit = macl.solve_score(data.ybar, data.s2, np.ones(len(data)),
                           "exp-linear", init)
    obj_init = macl.objective(VarianceModel("exp-linear", init),
                              data.ybar, data.s2, w)
    obj_fit = macl.objective(fit.model, data.ybar, data.s2, w)
    assert obj_fit >= obj_init


def test_neyman_scott_bias():
    rng = np.random.default_rng(1)
    mus = rng.uniform(8, 12, size=100000)
    y = mus[:, np.newaxis] + 2 * rng.standard_normal((mus.size, 2))
    data = PairedDataset(y1=y[:, 0], y2=y[:, 1], drop_ties=False)
    # true variance 4, expectation of the naive MLE is 2
    assert abs(macl.mle_homoscedastic(data) - 2) < 0.03


if __name__ == "__main__":
    # Run all tests
    loc = locals()
    for key in list(loc.keys()):
        if key.startswith("test_") and hasattr(loc[key], "__call__"):
            loc[key]()
