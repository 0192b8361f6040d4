import warnings

import numpy as np
import pytest

from pairvar import hypothesis
from pairvar.excpt import EmptyNuisanceSetWarning
from pairvar.model import VarianceModel

MODEL = VarianceModel("exp-linear", [4.84, -0.927])
BOUNDS = (7.3, 13.9)

PAIRS = [(10.21, 10.78), (13.62, 11.89), (11.19, 9.92), (10.83, 9.80),
         (11.45, 13.36)]


def test_naive():
    res = hypothesis.pvalue_naive(10.21, 10.78, MODEL)
    assert res.method == "naive"
    assert np.allclose(res.mu_sup, 10.495)
    assert np.allclose(res.statistic, 21.58, atol=0.01)
    assert 3e-6 < res.p_value < 4e-6


def test_conservative():
    res = hypothesis.pvalue_conservative(10.21, 10.78, MODEL, BOUNDS)
    # the variance is largest at the lower bound
    assert res.mu_sup == 7.3
    assert np.allclose(MODEL.variance(7.3), 0.1456, atol=1e-4)
    assert np.allclose(res.statistic, 1.1157, atol=1e-3)
    assert np.allclose(res.p_value, 0.291, atol=2e-3)


def test_berger_boos_ordering():
    beta = 1e-6
    for y1, y2 in PAIRS:
        naive = hypothesis.pvalue_naive(y1, y2, MODEL).p_value
        bb = hypothesis.pvalue_berger_boos(y1, y2, MODEL, BOUNDS,
                                           beta=beta)
        cons = hypothesis.pvalue_conservative(y1, y2, MODEL, BOUNDS).p_value
        assert bb.beta == beta
        assert not bb.empty_nuisance_set
        assert BOUNDS[0] <= bb.mu_sup <= (y1 + y2) / 2
        assert naive <= bb.p_value <= cons + beta
        assert bb.p_value >= beta


def test_berger_boos_pair_pivot():
    y1, y2 = PAIRS[0]
    lo, hi = hypothesis.nuisance_set(y1, y2, MODEL, 1e-6, BOUNDS,
                                     cbeta_pivot="pair")
    assert lo <= (y1 + y2) / 2 <= hi
    bb = hypothesis.pvalue_berger_boos(y1, y2, MODEL, BOUNDS,
                                       beta=1e-6, cbeta_pivot="pair")
    naive = hypothesis.pvalue_naive(y1, y2, MODEL).p_value
    cons = hypothesis.pvalue_conservative(y1, y2, MODEL, BOUNDS).p_value
    assert naive <= bb.p_value <= cons + 1e-6
    with pytest.raises(ValueError):
        hypothesis.nuisance_set(10., 11., MODEL, 1e-3, cbeta_pivot="sum")


def test_equal_pair():
    for method in hypothesis.available_methods:
        res = hypothesis.compute_pvalue(10., 10., MODEL, method,
                                        bounds=BOUNDS)
        assert res.statistic == 0
        assert res.p_value == 1


def test_empty_nuisance_set():
    with pytest.warns(EmptyNuisanceSetWarning):
        res = hypothesis.pvalue_berger_boos(19.9, 20.1, MODEL, BOUNDS,
                                            beta=1e-3)
    assert res.empty_nuisance_set
    assert res.p_value == 1e-3
    assert np.isnan(res.mu_sup)


def test_beta_validation():
    with pytest.raises(ValueError):
        hypothesis.pvalue_berger_boos(10., 11., MODEL, beta=0)
    with pytest.raises(ValueError):
        hypothesis.compute_pvalue(10., 11., MODEL, "bayes")


def test_batch_matches_scalar():
    y1 = np.array([p[0] for p in PAIRS] + [10., 19.9])
    y2 = np.array([p[1] for p in PAIRS] + [10., 20.1])
    for method in hypothesis.available_methods:
        batch = hypothesis.batch_pvalues(y1, y2, MODEL, method,
                                         bounds=BOUNDS, beta=1e-3)
        for ii in range(y1.size):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", EmptyNuisanceSetWarning)
                ref = hypothesis.compute_pvalue(y1[ii], y2[ii], MODEL,
                                                method, bounds=BOUNDS,
                                                beta=1e-3)
            assert np.allclose(batch[ii], ref.p_value, rtol=1e-6)


def test_batch_generic_form():
    power = VarianceModel("power", [15.7, -9.])
    y1 = np.array([10.21, 13.62])
    y2 = np.array([10.78, 11.89])
    batch = hypothesis.batch_pvalues(y1, y2, power, "berger-boos",
                                     bounds=BOUNDS, beta=1e-3)
    assert batch.shape == (2,)
    assert np.all((batch >= 1e-3) & (batch <= 1))


def test_argmax_variance():
    assert hypothesis.argmax_variance(MODEL, 7.3, 13.9) == 7.3
    rising = VarianceModel("exp-linear", [-4., 0.5])
    assert hypothesis.argmax_variance(rising, 7.3, 13.9) == 13.9
    assert hypothesis.argmax_variance(MODEL, 9., 9.) == 9.
    power = VarianceModel("power", [1., 2.])
    assert np.isclose(hypothesis.argmax_variance(power, 7.3, 13.9), 13.9)
    const = VarianceModel("exp-linear-const", [5., -1., -8.])
    assert np.isclose(hypothesis.argmax_variance(const, 7.3, 13.9), 7.3)


if __name__ == "__main__":
    # Run all tests
    loc = locals()
    for key in list(loc.keys()):
        if key.startswith("test_") and hasattr(loc[key], "__call__"):
            loc[key]()
