"""Paired-replicate data model and intensity-dependent variance functions

All intensities are natural-log intensities. A pair
:math:`(y_1, y_2)` is modeled as two independent draws from
:math:`N(\\mu, h(\\theta, \\mu))` with the latent mean :math:`\\mu`.
"""
from dataclasses import dataclass
import pathlib
import warnings

import numpy as np
import pandas as pd

from .excpt import DataError, DomainError, EvaluationError, TiedPairsWarning

#: Assumed support [a, b] of the latent means if not specified otherwise
DEFAULT_BOUNDS = (7.3, 13.9)


class VarianceForm(object):
    #: name of the functional form
    name = None
    #: number of coefficients
    n_params = None
    #: whether h is monotone in mu for all coefficients
    monotone = True

    def check_domain(self, mu):
        pass

    def value(self, theta, mu):
        raise NotImplementedError("Implement in subclass!")

    def gradient(self, theta, mu):
        """Derivatives of h with respect to theta, shape (k,) + mu.shape"""
        raise NotImplementedError("Implement in subclass!")

    def hessian(self, theta, mu):
        """Second derivatives of h, shape (k, k) + mu.shape"""
        raise NotImplementedError("Implement in subclass!")


class ExpLinear(VarianceForm):
    """h = exp(t1 + t2*mu)"""
    name = "exp-linear"
    n_params = 2

    def value(self, theta, mu):
        return np.exp(theta[0] + theta[1] * mu)

    def gradient(self, theta, mu):
        h = self.value(theta, mu)
        return np.array([h, h * mu])

    def hessian(self, theta, mu):
        h = self.value(theta, mu)
        return np.array([[h, h * mu],
                         [h * mu, h * mu**2]])


class Power(VarianceForm):
    """h = exp(t1) * mu**t2, defined for mu > 0"""
    name = "power"
    n_params = 2

    def check_domain(self, mu):
        if np.any(np.asarray(mu) <= 0):
            raise DomainError("The power variance function requires "
                              + "positive means, got min(mu)="
                              + "{}!".format(np.min(mu)))

    def value(self, theta, mu):
        return np.exp(theta[0] + theta[1] * np.log(mu))

    def gradient(self, theta, mu):
        h = self.value(theta, mu)
        lm = np.log(mu)
        return np.array([h, h * lm])

    def hessian(self, theta, mu):
        h = self.value(theta, mu)
        lm = np.log(mu)
        return np.array([[h, h * lm],
                         [h * lm, h * lm**2]])


class ExpLinearPlusConst(VarianceForm):
    """h = exp(t1 + t2*mu) + exp(t3)"""
    name = "exp-linear-const"
    n_params = 3

    def value(self, theta, mu):
        return np.exp(theta[0] + theta[1] * mu) + np.exp(theta[2])

    def gradient(self, theta, mu):
        e = np.exp(theta[0] + theta[1] * mu)
        c = np.exp(theta[2]) * np.ones_like(e)
        return np.array([e, e * mu, c])

    def hessian(self, theta, mu):
        e = np.exp(theta[0] + theta[1] * mu)
        c = np.exp(theta[2]) * np.ones_like(e)
        z = np.zeros_like(e)
        return np.array([[e, e * mu, z],
                         [e * mu, e * mu**2, z],
                         [z, z, c]])


#: Dictionary containing all variance function forms
form_dict = {
    "exp-linear": ExpLinear(),
    "exp-linear-const": ExpLinearPlusConst(),
    "power": Power(),
}

#: Available variance function form names
available_forms = sorted(form_dict.keys())


class VarianceModel(object):
    def __init__(self, form, theta):
        """A parametric variance function h(theta, mu)

        Parameters
        ----------
        form: str
            Name of the functional form, one of :data:`available_forms`
        theta: list-like of float
            Coefficients (two for "exp-linear" and "power", three
            for "exp-linear-const")
        """
        if form not in form_dict:
            raise ValueError("Unknown variance form '{}', ".format(form)
                             + "expected one of {}!".format(available_forms))
        theta = np.array(theta, dtype=float).reshape(-1)
        impl = form_dict[form]
        if theta.size != impl.n_params:
            raise ValueError("Form '{}' requires {} coefficients, ".format(
                form, impl.n_params) + "got {}!".format(theta.size))
        if not np.all(np.isfinite(theta)):
            raise ValueError("Coefficients must be finite, got "
                             + "{}!".format(theta))
        theta.setflags(write=False)
        self.form = form
        self.theta = theta
        self._impl = impl

    def __eq__(self, other):
        return (isinstance(other, VarianceModel)
                and self.form == other.form
                and np.array_equal(self.theta, other.theta))

    def __hash__(self):
        return hash((self.form, tuple(self.theta)))

    def __repr__(self):
        coef = ", ".join("{:.6g}".format(t) for t in self.theta)
        return "VarianceModel('{}', [{}])".format(self.form, coef)

    @property
    def n_params(self):
        return self._impl.n_params

    @property
    def monotone(self):
        return self._impl.monotone

    def _prepare(self, mu):
        mu = np.asarray(mu, dtype=float)
        self._impl.check_domain(mu)
        return mu

    def gradient(self, mu):
        mu = self._prepare(mu)
        return self._impl.gradient(self.theta, mu)

    def hessian(self, mu):
        mu = self._prepare(mu)
        return self._impl.hessian(self.theta, mu)

    def scaled(self, factor):
        """Return the model of `factor * h(theta, mu)`"""
        if factor <= 0:
            raise ValueError("Scaling factor must be positive!")
        theta = np.array(self.theta)
        theta[0] += np.log(factor)
        if self.form == "exp-linear-const":
            theta[2] += np.log(factor)
        return VarianceModel(self.form, theta)

    def variance(self, mu):
        """Evaluate h(theta, mu) (vectorized)"""
        mu = self._prepare(mu)
        with np.errstate(over="ignore", invalid="ignore"):
            h = self._impl.value(self.theta, mu)
        if not np.all(np.isfinite(h) & (h > 0)):
            raise EvaluationError("Non-positive or non-finite variance "
                                  + "for {} ".format(self)
                                  + "in mu range [{}, {}]!".format(
                                      np.min(mu), np.max(mu)))
        return h

    def with_theta(self, theta):
        return VarianceModel(self.form, theta)


@dataclass(frozen=True)
class PairedObservation:
    """Two natural-log intensities of the same peptide"""
    id: str
    y1: float
    y2: float

    def __post_init__(self):
        if not (np.isfinite(self.y1) and np.isfinite(self.y2)):
            raise DataError("Pair '{}' has non-finite values ({}, {})!".format(
                self.id, self.y1, self.y2))


@dataclass(frozen=True)
class PairStats:
    """Pair mean `ybar` and variance statistic `s2`"""
    ybar: float
    s2: float


class PairedDataset(object):
    def __init__(self, y1, y2, ids=None, bounds=None, drop_ties=True):
        """N pairs of log-intensities with the support [a, b] of the means

        Parameters
        ----------
        y1, y2: list-like of float
            Replicate log-intensities
        ids: list of str or None
            Pair identifiers (e.g. peptide sequences); defaults to
            "pair_1", "pair_2", ...
        bounds: tuple (a, b) or None
            Assumed support of the latent means; defaults to
            :data:`DEFAULT_BOUNDS`
        drop_ties: bool
            Drop pairs with `y1 == y2` and issue a
            :class:`pairvar.excpt.TiedPairsWarning`
        """
        y1 = np.array(y1, dtype=float).reshape(-1)
        y2 = np.array(y2, dtype=float).reshape(-1)
        if y1.size != y2.size:
            raise DataError("`y1` and `y2` must have the same length!")
        if ids is None:
            ids = ["pair_{}".format(ii + 1) for ii in range(y1.size)]
        ids = np.array([str(ii) for ii in ids], dtype=object)
        if ids.size != y1.size:
            raise DataError("`ids` must have the same length as `y1`!")
        bad = ~(np.isfinite(y1) & np.isfinite(y2))
        if np.any(bad):
            idx = np.where(bad)[0][0]
            raise DataError("Pair {} ('{}') has non-finite values!".format(
                idx + 1, ids[idx]))
        if bounds is None:
            bounds = DEFAULT_BOUNDS
        a, b = float(bounds[0]), float(bounds[1])
        if not a < b:
            raise DataError("Bounds must satisfy a < b, got "
                            + "({}, {})!".format(a, b))
        if drop_ties:
            ties = y1 == y2
            if np.any(ties):
                warnings.warn("Dropped {} pairs with ".format(np.sum(ties))
                              + "exactly equal replicate values.",
                              TiedPairsWarning)
                y1, y2, ids = y1[~ties], y2[~ties], ids[~ties]
        for arr in [y1, y2, ids]:
            arr.setflags(write=False)
        self.y1 = y1
        self.y2 = y2
        self.ids = ids
        self.bounds = (a, b)

    def __getitem__(self, index):
        return PairedObservation(id=self.ids[index],
                                 y1=float(self.y1[index]),
                                 y2=float(self.y2[index]))

    def __iter__(self):
        for ii in range(len(self)):
            yield self[ii]

    def __len__(self):
        return self.y1.size

    @property
    def s2(self):
        """Pair variance statistics (y1-y2)²/2"""
        return (self.y1 - self.y2)**2 / 2

    @property
    def ybar(self):
        """Pair means (y1+y2)/2"""
        return (self.y1 + self.y2) / 2

    def shifted(self, offset):
        """Return a copy with `offset` added to all intensities and bounds"""
        return PairedDataset(y1=self.y1 + offset,
                             y2=self.y2 + offset,
                             ids=self.ids,
                             bounds=(self.bounds[0] + offset,
                                     self.bounds[1] + offset),
                             drop_ties=False)


def estimating_equation_bias(theta, mus):
    """Exact expectation of the exp-linear estimating equations

    For the model h = exp(t1 + t2*mu), the two estimating equations
    of the approximate conditional likelihood

    .. code::

        1 - N⁻¹ Σ S²_i exp(-t1 - t2 Ybar_i) = 0
        N⁻¹ Σ Ybar_i - N⁻¹ Σ Ybar_i S²_i exp(-t1 - t2 Ybar_i) = 0

    do not have expectation zero at the true theta unless t2 = 0.
    Their expectations are

    .. code::

        1 - N⁻¹ Σ exp(t2²/4 h_i)
        N⁻¹ Σ mu_i - N⁻¹ Σ (mu_i - t2/2 h_i) exp(t2²/4 h_i)

    with h_i = exp(t1 + t2*mu_i).

    Parameters
    ----------
    theta: list-like of two floats or VarianceModel
        True exp-linear coefficients
    mus: list-like of float
        Latent means of the pairs

    Returns
    -------
    bias: tuple of two floats
        Expectations of the left-hand sides of both equations
    """
    if isinstance(theta, VarianceModel):
        if theta.form != "exp-linear":
            raise ValueError("Only the exp-linear form is supported!")
        theta = theta.theta
    t1, t2 = np.array(theta, dtype=float)
    mus = np.array(mus, dtype=float).reshape(-1)
    if mus.size == 0:
        raise ValueError("`mus` must not be empty!")
    h = np.exp(t1 + t2 * mus)
    mgf = np.exp(t2**2 / 4 * h)
    first = 1 - np.mean(mgf)
    second = np.mean(mus) - np.mean((mus - t2 / 2 * h) * mgf)
    return float(first), float(second)


def load_pairs(path, bounds=None, raw=False, drop_ties=True):
    """Load paired intensities from a CSV file with header "id,y1,y2"

    Parameters
    ----------
    path: str or pathlib.Path
        Path to the UTF-8 encoded CSV file
    bounds: tuple (a, b) or None
        Assumed support of the latent means
    raw: bool
        If True, the file contains raw intensities and the natural
        logarithm is applied on ingestion.
    drop_ties: bool
        Drop pairs with identical values (with a warning)

    Returns
    -------
    data: PairedDataset
    """
    path = pathlib.Path(path)
    try:
        df = pd.read_csv(path, dtype=str, keep_default_na=False,
                         encoding="utf-8", skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise DataError("File '{}' is empty!".format(path))
    missing = [cc for cc in ["id", "y1", "y2"] if cc not in df.columns]
    if missing:
        raise DataError("File '{}' lacks the column(s) {}!".format(
            path, ", ".join(missing)))
    if len(df) == 0:
        raise DataError("File '{}' does not contain any pairs!".format(path))
    values = {}
    for col in ["y1", "y2"]:
        vals = pd.to_numeric(df[col].str.strip(), errors="coerce")
        vals = vals.to_numpy(dtype=float)
        bad = ~np.isfinite(vals)
        if raw:
            with np.errstate(invalid="ignore"):
                bad |= vals <= 0
        if np.any(bad):
            idx = np.where(bad)[0][0]
            # header is line 1
            raise DataError("'{}', row {}: invalid value '{}' ".format(
                path.name, idx + 2, df[col].iloc[idx])
                + "in column '{}'!".format(col))
        values[col] = np.log(vals) if raw else vals
    return PairedDataset(y1=values["y1"],
                         y2=values["y2"],
                         ids=df["id"].tolist(),
                         bounds=bounds,
                         drop_ties=drop_ties)


def pair_stats(pair):
    """Compute the pair mean and the pair variance statistic

    Parameters
    ----------
    pair: PairedObservation or tuple (y1, y2)

    Returns
    -------
    stats: PairStats
        `ybar = (y1+y2)/2` and `s2 = (y1-y2)²/2`
    """
    if isinstance(pair, PairedObservation):
        y1, y2 = pair.y1, pair.y2
    else:
        y1, y2 = pair
    y1 = float(y1)
    y2 = float(y2)
    if not (np.isfinite(y1) and np.isfinite(y2)):
        raise DataError("Non-finite pair ({}, {})!".format(y1, y2))
    return PairStats(ybar=(y1 + y2) / 2, s2=(y1 - y2)**2 / 2)


def variance_at(model, mu):
    """Evaluate the variance function h(theta, mu) at a scalar mu

    Raises :class:`pairvar.excpt.DomainError` for nonpositive `mu`
    with the power form and :class:`pairvar.excpt.EvaluationError`
    if the result is not finite.
    """
    return float(model.variance(float(mu)))
