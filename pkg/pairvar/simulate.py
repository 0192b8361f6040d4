"""Seeded Monte Carlo studies

All random numbers are drawn from numpy's counter-based Philox
generator. Each replicate (or study cell) uses the independent stream
`SeedSequence(seed, spawn_key=(index,))`, so that results do not
depend on the number of worker processes.
"""
from dataclasses import dataclass, field
import multiprocessing as mp
import time
from typing import Optional, Sequence
import warnings

import numpy as np
import pandas as pd

from .excpt import (DataError, DegenerateSetError, NumericalError,
                    StudyError, UnconvergedFitWarning)
from .hypothesis import DEFAULT_BETA_POWER, batch_pvalues
from .intervals import (bounded_hull, chi2_quantile, ci_diff_bonferroni,
                        exact_components, exact_pivot, naive_half_width,
                        region_profile)
from .macl import macl_fit
from .mixture_em import DEFAULT_D, DEFAULT_EM_MAX_ITER, fit_mixture
from .model import DEFAULT_BOUNDS, PairedDataset

#: Identifier of the random number generator
RNG_ALGORITHM = "numpy.random.Philox(SeedSequence(seed, spawn_key=(i,)))"
#: Maximum fraction of failing replicates in estimator studies
MAX_FAILURE_FRACTION = 0.1

#: Available scenario kinds
scenario_kinds = ["fixed-resample", "random-resample",
                  "uniform-continuous", "uniform-discrete"]

#: Available estimation methods
estimator_methods = ["macl", "mixture"]

#: Available methods of the coverage study per mode
coverage_methods = {"single": ["exact", "naive"],
                    "pair": ["bonferroni", "naive", "region"]}


@dataclass(frozen=True)
class Scenario:
    """Generation of the latent means of a simulated dataset"""
    #: one of :data:`scenario_kinds`
    kind: str
    #: number of pairs per dataset
    n: int
    #: study seed
    seed: int = 0
    #: support of the uniform scenarios
    lo: float = 8.
    hi: float = 12.
    #: means to resample from (resample kinds only)
    source_means: Optional[Sequence[float]] = None
    #: bounds attached to generated datasets
    bounds: tuple = DEFAULT_BOUNDS

    def __post_init__(self):
        if self.kind not in scenario_kinds:
            raise ValueError("Unknown scenario '{}', ".format(self.kind)
                             + "expected one of {}!".format(scenario_kinds))
        if self.n < 1:
            raise ValueError("`n` must be positive, got {}!".format(self.n))
        if self.seed < 0:
            raise ValueError("`seed` must be nonnegative!")
        if self.kind.endswith("resample"):
            if self.source_means is None or len(self.source_means) == 0:
                raise ValueError("Scenario '{}' requires ".format(self.kind)
                                 + "nonempty `source_means`!")
        elif self.kind == "uniform-continuous":
            if not self.lo < self.hi:
                raise ValueError("`lo` must be smaller than `hi`!")
        elif (self.kind == "uniform-discrete"
              and not int(self.lo) <= int(self.hi)):
            raise ValueError("`lo` must not exceed `hi`!")


@dataclass
class StudyReport:
    """Result of a simulation study"""
    #: "estimator", "coverage" or "power"
    study: str
    #: result table with one row per cell
    table: pd.DataFrame
    #: number of replicates per cell
    reps: int
    seed: int
    rng_algorithm: str = RNG_ALGORITHM
    #: wall-clock time in seconds
    wall_clock: float = 0.
    #: number of failed replicates
    failures: int = 0
    #: number of replicates whose fit stopped at the iteration limit
    unconverged: int = 0
    #: study parameters
    parameters: dict = field(default_factory=dict)

    def to_frame(self):
        return self.table.copy()

    def to_csv(self, path=None):
        """Write the table as CSV (returns the CSV string if `path` is None)"""
        return self.table.to_csv(path, index=False, float_format="%.10g",
                                 lineterminator="\n")


def make_rng(seed, index=None):
    """Philox generator for the stream `index` of a study seed"""
    key = () if index is None else (int(index),)
    ss = np.random.SeedSequence(int(seed), spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


def study_means(scenario):
    """Means drawn once per study (fixed-resample scenario)"""
    rng = make_rng(scenario.seed)
    return rng.choice(np.asarray(scenario.source_means, dtype=float),
                      size=scenario.n, replace=True)


def draw_means(scenario, rng):
    kind = scenario.kind
    if kind == "fixed-resample":
        return study_means(scenario)
    elif kind == "random-resample":
        return rng.choice(np.asarray(scenario.source_means, dtype=float),
                          size=scenario.n, replace=True)
    elif kind == "uniform-continuous":
        return rng.uniform(scenario.lo, scenario.hi, size=scenario.n)
    else:
        return rng.integers(int(scenario.lo), int(scenario.hi) + 1,
                            size=scenario.n).astype(float)


def generate_dataset(scenario, model, replicate=0):
    """Simulate a dataset of pairs with equal means

    Parameters
    ----------
    scenario: Scenario
        Generation of the latent means
    model: pairvar.model.VarianceModel
        True variance model
    replicate: int
        Replicate index (selects the random stream)

    Returns
    -------
    data: pairvar.model.PairedDataset
        Pairs y_i1, y_i2 ~ N(mu_i, h(theta, mu_i)) drawn independently
    """
    rng = make_rng(scenario.seed, replicate)
    mus = draw_means(scenario, rng)
    sd = np.sqrt(model.variance(mus))
    noise = rng.standard_normal(size=(scenario.n, 2))
    y = mus[:, np.newaxis] + sd[:, np.newaxis] * noise
    return PairedDataset(y1=y[:, 0],
                         y2=y[:, 1],
                         ids=["sim_{}".format(ii + 1)
                              for ii in range(scenario.n)],
                         bounds=scenario.bounds,
                         drop_ties=False)


def run_jobs(func, jobs, threads=1, count=None, max_count=None):
    """Map `func` over `jobs` (in order) with optional worker processes"""
    if max_count is not None:
        with max_count.get_lock():
            max_count.value += len(jobs)
    results = []
    if threads > 1 and len(jobs) > 1:
        with mp.Pool(min(threads, len(jobs))) as pool:
            for res in pool.imap(func, jobs):
                results.append(res)
                if count is not None:
                    with count.get_lock():
                        count.value += 1
    else:
        for job in jobs:
            results.append(func(job))
            if count is not None:
                with count.get_lock():
                    count.value += 1
    return results


def _estimator_job(args):
    scenario, model, rep, method, d, em_max_iter = args
    data = generate_dataset(scenario, model, rep)
    try:
        if method == "macl":
            est = macl_fit(data, form=model.form)
        else:
            est = fit_mixture(data, form=model.form, d=d,
                              max_iter=em_max_iter)
    except (NumericalError, DataError) as e:
        return "replicate {}: {}".format(rep, e)
    return np.array(est.theta_hat), bool(est.converged)


def estimator_study(scenario, model, reps, method="macl", d=DEFAULT_D,
                    em_max_iter=DEFAULT_EM_MAX_ITER, threads=1, count=None,
                    max_count=None):
    """Bias and standard deviation of the variance function estimates

    Parameters
    ----------
    scenario: Scenario
        Generation of the datasets
    model: pairvar.model.VarianceModel
        True variance model
    reps: int
        Number of replicates (at least 2)
    method: str
        "macl" or "mixture"
    d: float
        Support grid spacing of the mixture method
    em_max_iter: int
        Maximum number of EM iterations of the mixture method
    threads: int
        Number of worker processes
    count, max_count: multiprocessing.Value
        Progress counters; `max_count.value` is incremented by the
        number of replicates and `count.value` by one per replicate

    Returns
    -------
    report: StudyReport
        One row per coefficient with the columns parameter, true,
        bias, std, n_ok, n_unconverged and failures. EM fits that
        stopped at `em_max_iter` are included in the estimates and
        counted in n_unconverged (a
        :class:`pairvar.excpt.UnconvergedFitWarning` is issued).

    Raises
    ------
    pairvar.excpt.StudyError
        If more than 10% of the replicates failed
    """
    if reps < 2:
        raise ValueError("At least 2 replicates are required!")
    if method not in estimator_methods:
        raise ValueError("Unknown method '{}', ".format(method)
                         + "expected one of {}!".format(estimator_methods))
    t0 = time.perf_counter()
    jobs = [(scenario, model, rep, method, d, em_max_iter)
            for rep in range(reps)]
    results = run_jobs(_estimator_job, jobs, threads=threads, count=count,
                       max_count=max_count)
    errors = [res for res in results if isinstance(res, str)]
    if len(errors) > MAX_FAILURE_FRACTION * reps:
        raise StudyError("{} of {} replicates failed; ".format(
            len(errors), reps) + "first failure: {}".format(errors[0]))
    fits = [res for res in results if not isinstance(res, str)]
    est = np.array([theta for theta, _ in fits])
    unconverged = sum(not conv for _, conv in fits)
    if unconverged:
        warnings.warn("{} of {} fits stopped at the iteration ".format(
            unconverged, reps) + "limit {}.".format(em_max_iter),
            UnconvergedFitWarning)
    true = np.array(model.theta)
    rows = []
    for ii in range(true.size):
        rows.append({"parameter": "theta{}".format(ii + 1),
                     "true": true[ii],
                     "bias": np.mean(est[:, ii]) - true[ii],
                     "std": np.std(est[:, ii], ddof=1),
                     "n_ok": est.shape[0],
                     "n_unconverged": unconverged,
                     "failures": len(errors),
                     })
    return StudyReport(study="estimator",
                       table=pd.DataFrame(rows),
                       reps=reps,
                       seed=scenario.seed,
                       wall_clock=time.perf_counter() - t0,
                       failures=len(errors),
                       unconverged=unconverged,
                       parameters={"method": method,
                                   "scenario": scenario.kind,
                                   "n": scenario.n,
                                   "form": model.form,
                                   "theta": list(model.theta)})


def _single_job(args):
    model_true, model_fit, mu, index, alphas, methods, reps, seed = args
    rng = make_rng(seed, index)
    y = mu + np.sqrt(model_true.variance(mu)) * rng.standard_normal(reps)
    rows = []
    for alpha in alphas:
        for meth in methods:
            if meth == "exact":
                covered = exact_pivot(y, mu, model_fit) <= chi2_quantile(
                    alpha, 1)
            else:
                covered = np.abs(y - mu) <= naive_half_width(y, model_fit,
                                                             alpha)
            rows.append((mu, 1 - alpha, meth, np.mean(covered)))
    return rows


def _pair_job(args):
    (scenario, model_true, model_fit, rep, alpha, methods, bounds) = args
    data = generate_dataset(scenario, model_true, rep)
    y1, y2 = data.y1, data.y2
    miss = {}
    for meth in methods:
        if meth == "naive":
            half = naive_half_width((y1, y2), model_fit, alpha, pair=True)
            covered = np.abs(y1 - y2) <= half
        elif meth == "region":
            qmin = region_profile(y1, y2, 0., model_fit, bounds)
            covered = qmin <= chi2_quantile(alpha, 2)
        else:
            covered = _bonferroni_covers_zero(y1, y2, model_fit, alpha,
                                              bounds)
        miss[meth] = int(np.sum(~covered))
    return miss


def _bonferroni_covers_zero(y1, y2, model, alpha, bounds):
    if model.form == "exp-linear":
        lo1, hi1 = bounded_hull(exact_components(y1, model, alpha / 2),
                                bounds)
        lo2, hi2 = bounded_hull(exact_components(y2, model, alpha / 2),
                                bounds)
        with np.errstate(invalid="ignore"):
            return (lo1 <= hi2) & (lo2 <= hi1)
    covered = np.zeros(y1.size, dtype=bool)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for ii in range(y1.size):
            try:
                cset = ci_diff_bonferroni(y1[ii], y2[ii], model, alpha,
                                          bounds)
            except DegenerateSetError:
                continue
            covered[ii] = cset.contains(0)
    return covered


def coverage_study(model_true, reps, model_fit=None, mode="single",
                   mu_values=(7.5, 9, 11, 13), alphas=(0.05,),
                   scenario=None, methods=None, bounds=DEFAULT_BOUNDS,
                   seed=0, threads=1, count=None, max_count=None):
    """Coverage of confidence sets under the true model

    Parameters
    ----------
    model_true: pairvar.model.VarianceModel
        Model used to simulate the data
    reps: int
        Number of replicates per cell ("single") or number of
        simulated datasets ("pair")
    model_fit: pairvar.model.VarianceModel or None
        Model used to construct the intervals (defaults to
        `model_true`)
    mode: str
        "single": coverage of the single-mean sets for every mean
        in `mu_values` and every level in `alphas`;
        "pair": non-coverage of the true difference 0 for null
        pairs generated by `scenario`
    mu_values: list of float
        Means ("single" mode)
    alphas: list of float
        Significance levels; "pair" mode uses the first one
    scenario: Scenario
        Generation of the null pairs ("pair" mode)
    methods: list of str
        Subset of :data:`coverage_methods` for the mode
    bounds: tuple (a, b)
        Bounds of the means ("pair" mode)
    seed: int
        Seed ("single" mode; "pair" mode uses the scenario seed)
    threads: int
        Number of worker processes
    count, max_count: multiprocessing.Value
        Progress counters

    Returns
    -------
    report: StudyReport
        "single": columns mu, level, method, coverage, non_coverage,
        mc_se; "pair": columns method, level, pairs, non_covered,
        non_coverage, mean_per_dataset, mc_se
    """
    if mode not in coverage_methods:
        raise ValueError("Unknown coverage mode '{}'!".format(mode))
    if reps < 1:
        raise ValueError("`reps` must be positive!")
    if methods is None:
        methods = coverage_methods[mode]
    for meth in methods:
        if meth not in coverage_methods[mode]:
            raise ValueError("Method '{}' not available in ".format(meth)
                             + "mode '{}'!".format(mode))
    if model_fit is None:
        model_fit = model_true
    t0 = time.perf_counter()
    if mode == "single":
        jobs = [(model_true, model_fit, float(mu), ii, list(alphas),
                 list(methods), reps, seed)
                for ii, mu in enumerate(mu_values)]
        results = run_jobs(_single_job, jobs, threads=threads, count=count,
                           max_count=max_count)
        rows = []
        for res in results:
            for mu, level, meth, cov in res:
                rows.append({"mu": mu,
                             "level": level,
                             "method": meth,
                             "coverage": cov,
                             "non_coverage": 1 - cov,
                             "mc_se": np.sqrt(cov * (1 - cov) / reps),
                             })
        parameters = {"mode": mode, "mu_values": list(mu_values),
                      "alphas": list(alphas)}
    else:
        if scenario is None:
            raise ValueError("Mode 'pair' requires a scenario!")
        seed = scenario.seed
        alpha = alphas[0]
        jobs = [(scenario, model_true, model_fit, rep, alpha, list(methods),
                 tuple(bounds)) for rep in range(reps)]
        results = run_jobs(_pair_job, jobs, threads=threads, count=count,
                           max_count=max_count)
        total = reps * scenario.n
        rows = []
        for meth in methods:
            missed = sum(res[meth] for res in results)
            rate = missed / total
            rows.append({"method": meth,
                         "level": 1 - alpha,
                         "pairs": total,
                         "non_covered": missed,
                         "non_coverage": rate,
                         "mean_per_dataset": missed / reps,
                         "mc_se": np.sqrt(rate * (1 - rate) / total),
                         })
        parameters = {"mode": mode, "scenario": scenario.kind,
                      "n": scenario.n, "alpha": alpha}
    parameters.update({"theta_true": list(model_true.theta),
                       "theta_fit": list(model_fit.theta),
                       "form": model_true.form})
    return StudyReport(study="coverage",
                       table=pd.DataFrame(rows),
                       reps=reps,
                       seed=seed,
                       wall_clock=time.perf_counter() - t0,
                       parameters=parameters)


def _power_job(args):
    model, mu, k, index, reps, methods, beta, bounds, level, seed = args
    rng = make_rng(seed, index)
    sd = np.sqrt(model.variance(mu))
    mu_k = mu + k * sd
    z = rng.standard_normal(size=(2, reps))
    y1 = mu + sd * z[0]
    y2 = mu_k + np.sqrt(model.variance(mu_k)) * z[1]
    rows = []
    for meth in methods:
        pvals = batch_pvalues(y1, y2, model, meth, bounds=bounds, beta=beta)
        rate = np.mean(pvals <= level)
        rows.append({"mu": mu,
                     "k": k,
                     "method": meth,
                     "rejection_rate": rate,
                     "mc_se": np.sqrt(rate * (1 - rate) / reps),
                     })
    return rows


def power_study(model, mu_grid, k_grid, reps, beta=DEFAULT_BETA_POWER,
                methods=("naive", "conservative", "berger-boos"),
                bounds=None, level=0.05, seed=0, threads=1,
                count=None, max_count=None):
    """Rejection rates of the p-values for shifted pairs

    For every mean mu and shift k, Y1 ~ N(mu, h(theta, mu)) and
    Y2 ~ N(mu_k, h(theta, mu_k)) with mu_k = mu + k sqrt(h(theta, mu))
    are drawn `reps` times and the fraction of p-values not larger
    than `level` is reported. k = 0 gives the level of the tests.

    The conservative and Berger-Boos p-values are only valid if the
    bounds contain all simulated means. The bounds are therefore
    widened to [min(mu, mu_k), max(mu, mu_k)] over the grids (or set
    to this range if `bounds` is None). The bounds used are stored
    in `report.parameters["bounds"]`.

    Returns
    -------
    report: StudyReport
        Columns mu, k, method, rejection_rate, mc_se
    """
    if reps < 1:
        raise ValueError("`reps` must be positive!")
    t0 = time.perf_counter()
    grid = np.asarray(mu_grid, dtype=float)
    sd = np.sqrt(model.variance(grid))
    means = np.concatenate([grid] + [grid + k * sd for k in k_grid])
    if bounds is None:
        bounds = (means.min(), means.max())
    bounds = (float(min(bounds[0], means.min())),
              float(max(bounds[1], means.max())))
    jobs = []
    for mu in mu_grid:
        for k in k_grid:
            jobs.append((model, float(mu), float(k), len(jobs), reps,
                         list(methods), beta, bounds, level, seed))
    results = run_jobs(_power_job, jobs, threads=threads, count=count,
                       max_count=max_count)
    rows = [row for res in results for row in res]
    return StudyReport(study="power",
                       table=pd.DataFrame(rows),
                       reps=reps,
                       seed=seed,
                       wall_clock=time.perf_counter() - t0,
                       parameters={"mu_grid": list(mu_grid),
                                   "k_grid": list(k_grid),
                                   "beta": beta,
                                   "level": level,
                                   "bounds": list(bounds),
                                   "form": model.form,
                                   "theta": list(model.theta)})
