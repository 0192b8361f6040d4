import warnings

import numpy as np

from ..excpt import ConfigError, DegenerateSetError, EmptyConfidenceSetWarning
from ..hypothesis import DEFAULT_BETA, available_methods, compute_pvalue
from ..intervals import (ci_diff_bonferroni, ci_diff_naive, ci_diff_region,
                         ci_mu_exact, ci_mu_naive)
from ..model import estimating_equation_bias, load_pairs

from .common import (bounds_from_config, finish, load_config,
                     model_from_config, status)
from . import parse_funcs
from .task_watcher import TaskWatcher

#: Command line arguments mapped to configuration keys
OVERRIDES = {"form": ("model", "form"),
             "theta": ("model", "theta"),
             "a": ("bounds", "a"),
             "b": ("bounds", "b"),
             "alpha": ("intervals", "alpha"),
             "grid_res": ("intervals", "grid res"),
             "beta": ("test", "beta"),
             "cbeta_pivot": ("test", "cbeta pivot"),
             }

#: Single-mean interval methods
SINGLE_METHODS = ["exact", "naive"]
#: Difference interval methods
DIFF_METHODS = ["bonferroni", "naive", "region"]


def difference_interval(y1, y2, model, method, alpha, bounds, grid_res):
    """Confidence set for mu1 - mu2 with the method given by name"""
    if method == "region":
        return ci_diff_region(y1, y2, model, alpha=alpha, bounds=bounds,
                              grid_res=grid_res)
    elif method == "bonferroni":
        return ci_diff_bonferroni(y1, y2, model, alpha=alpha, bounds=bounds)
    elif method == "naive":
        return ci_diff_naive(y1, y2, model, alpha=alpha)
    raise ConfigError("Method '{}' is not available for ".format(method)
                      + "differences; use one of {}!".format(DIFF_METHODS))


def batch_interval(pair, model, method, alpha, bounds, grid_res):
    """Confidence set of one pair of a batch

    Returns None (with an :class:`EmptyConfidenceSetWarning`) if the
    set is empty within the bounds, so that the other pairs of the
    batch are still reported.
    """
    try:
        return difference_interval(pair.y1, pair.y2, model, method, alpha,
                                   bounds, grid_res)
    except DegenerateSetError as e:
        warnings.warn("Pair '{}', method '{}': {}".format(
            pair.id, method, ", ".join(str(a) for a in e.args)),
            EmptyConfidenceSetWarning)
        return None
    except BaseException as e:
        e.args = ("Pair '{}': ".format(pair.id)
                  + ", ".join(str(a) for a in e.args),)
        raise


def interval_endpoints(cset, scale):
    """Hull endpoints on the log or ratio scale (NaN for empty sets)"""
    if cset is None:
        return np.nan, np.nan
    lo, hi = cset.hull
    if scale == "ratio":
        lo, hi = float(np.exp(lo)), float(np.exp(hi))
    return lo, hi


def _interval_record(cset, scale, method):
    lo, hi = interval_endpoints(cset, scale)
    return {"lo": lo,
            "hi": hi,
            "disconnected": cset is not None and cset.disconnected,
            "empty": cset is None,
            "method": method}


def cli_ci(args):
    """Confidence sets (subcommand `ci`)"""
    cfg = load_config(args, OVERRIDES)
    model = model_from_config(cfg)
    bounds = bounds_from_config(cfg)
    alpha = cfg["intervals"]["alpha"]
    grid_res = cfg["intervals"]["grid res"]
    method = args.method
    inputs = []
    records = []
    if args.input is not None:
        if method not in DIFF_METHODS:
            raise ConfigError("Batch mode requires a difference method "
                              + "({})!".format(", ".join(DIFF_METHODS)))
        data = load_pairs(args.input, bounds=bounds)
        inputs.append(args.input)
        n_empty = 0
        with TaskWatcher("Computing confidence sets... ",
                         quiet=args.quiet) as tw:
            tw.max_count.value = len(data)
            for pair in data:
                cset = batch_interval(pair, model, method, alpha, bounds,
                                      grid_res)
                n_empty += cset is None
                rec = {"id": pair.id, "y1": pair.y1, "y2": pair.y2}
                rec.update(_interval_record(cset, args.scale, method))
                records.append(rec)
                with tw.count.get_lock():
                    tw.count.value += 1
        if n_empty:
            status(args, "{} of {} confidence sets are empty".format(
                n_empty, len(data)))
    elif args.y1 is None:
        raise ConfigError("Either --y1 or --input is required!")
    elif args.y2 is None:
        if method == "exact":
            cset = ci_mu_exact(args.y1, model, alpha=alpha, bounds=bounds)
        elif method == "naive":
            cset = ci_mu_naive(args.y1, model, alpha=alpha)
        else:
            raise ConfigError("Method '{}' requires --y2!".format(method))
        rec = {"y1": args.y1, "y2": None}
        rec.update(_interval_record(cset, args.scale, method))
        records.append(rec)
    else:
        if method == "exact":
            raise ConfigError("Method 'exact' is a single-mean method; "
                              + "omit --y2!")
        cset = difference_interval(args.y1, args.y2, model, method, alpha,
                                   bounds, grid_res)
        rec = {"y1": args.y1, "y2": args.y2}
        rec.update(_interval_record(cset, args.scale, method))
        records.append(rec)
    return finish(args, records, cfg, "ci", inputs=inputs)


def cli_pvalue(args):
    """p-values for equal means (subcommand `pvalue`)"""
    cfg = load_config(args, OVERRIDES)
    model = model_from_config(cfg)
    bounds = bounds_from_config(cfg)
    if cfg["test"]["beta"] is None:
        cfg["test"]["beta"] = DEFAULT_BETA
    beta = cfg["test"]["beta"]
    cbeta_pivot = cfg["test"]["cbeta pivot"]
    if args.method == "all":
        methods = available_methods
    else:
        methods = [args.method]
    inputs = []
    if args.input is not None:
        data = load_pairs(args.input, bounds=bounds, drop_ties=False)
        inputs.append(args.input)
        pairs = [(p.id, p.y1, p.y2) for p in data]
    elif args.y1 is not None and args.y2 is not None:
        pairs = [("pair_1", args.y1, args.y2)]
    else:
        raise ConfigError("Either --y1 and --y2 or --input is required!")
    threshold = 0.05 / len(pairs)
    records = []
    counts = {meth: 0 for meth in methods}
    with TaskWatcher("Computing p-values... ", quiet=args.quiet) as tw:
        tw.max_count.value = len(pairs) * len(methods)
        for pid, y1, y2 in pairs:
            for meth in methods:
                res = compute_pvalue(y1, y2, model, meth, bounds=bounds,
                                     beta=beta, cbeta_pivot=cbeta_pivot)
                rec = {"id": pid,
                       "y1": y1,
                       "y2": y2,
                       "method": meth,
                       "statistic": res.statistic,
                       "p_value": res.p_value,
                       "mu_sup": res.mu_sup,
                       }
                if args.bonferroni:
                    rec["significant"] = res.p_value <= threshold
                    counts[meth] += int(rec["significant"])
                records.append(rec)
                with tw.count.get_lock():
                    tw.count.value += 1
    summary = {}
    if args.bonferroni:
        for meth in methods:
            status(args, "{}: {} of {} p-values below 0.05/N".format(
                meth, counts[meth], len(pairs)))
            summary["significant_{}".format(meth)] = counts[meth]
        summary["threshold"] = threshold
    return finish(args, records, cfg, "pvalue", inputs=inputs,
                  summary=summary)


def cli_bias_oracle(args):
    """Expectations of the estimating equations (subcommand `bias-oracle`)"""
    cfg = load_config(args, OVERRIDES)
    model = model_from_config(cfg)
    inputs = []
    if args.mus is not None:
        mus = args.mus
    elif args.input is not None:
        mus = load_pairs(args.input, drop_ties=False).ybar
        inputs.append(args.input)
    else:
        raise ConfigError("Either --mus or --input is required!")
    if model.form != "exp-linear":
        raise ConfigError("The bias oracle requires the exp-linear form!")
    first, second = estimating_equation_bias(model, mus)
    record = {"theta": list(model.theta),
              "n_means": len(mus),
              "equation_1": first,
              "equation_2": second,
              }
    return finish(args, [record], cfg, "bias-oracle", inputs=inputs,
                  default_format="jsonl")


def _add_model_args(parser):
    parser.add_argument("--theta", type=parse_funcs.theta,
                        help="variance coefficients, e.g. '4.84,-0.927'")
    parser.add_argument("--form", type=parse_funcs.form_name,
                        help="variance function form")


def _add_bounds_args(parser):
    parser.add_argument("--a", type=float, help="lower bound of the means")
    parser.add_argument("--b", type=float, help="upper bound of the means")


def add_parsers(subparsers, parents):
    t_ci = "confidence sets for a mean or a difference of means"
    p_ci = subparsers.add_parser("ci", help=t_ci, description=t_ci,
                                 parents=parents)
    _add_model_args(p_ci)
    _add_bounds_args(p_ci)
    p_ci.add_argument("--y1", type=float, help="first observation")
    p_ci.add_argument("--y2", type=float, help="second observation")
    p_ci.add_argument("--input", type=str,
                      help="CSV file with columns id, y1, y2 (batch mode)")
    p_ci.add_argument("--alpha", type=parse_funcs.float01,
                      help="significance level")
    p_ci.add_argument("--method", type=parse_funcs.lcstr, default="region",
                      choices=sorted(set(SINGLE_METHODS + DIFF_METHODS)),
                      help="interval method")
    p_ci.add_argument("--grid-res", type=parse_funcs.fposfloat,
                      help="lattice resolution of the region method")
    p_ci.add_argument("--scale", type=parse_funcs.lcstr, default="log",
                      choices=["log", "ratio"],
                      help="report log-scale or ratio-scale endpoints")
    p_ci.set_defaults(func=cli_ci)

    t_pv = "p-values for equal means of a pair"
    p_pv = subparsers.add_parser("pvalue", help=t_pv, description=t_pv,
                                 parents=parents)
    _add_model_args(p_pv)
    _add_bounds_args(p_pv)
    p_pv.add_argument("--y1", type=float, help="first observation")
    p_pv.add_argument("--y2", type=float, help="second observation")
    p_pv.add_argument("--input", type=str,
                      help="CSV file with columns id, y1, y2")
    p_pv.add_argument("--method", type=parse_funcs.lcstr,
                      default="berger-boos",
                      choices=available_methods + ["all"],
                      help="p-value method")
    p_pv.add_argument("--beta", type=parse_funcs.float01,
                      help="level of the Berger-Boos nuisance set")
    p_pv.add_argument("--cbeta-pivot", type=parse_funcs.cbeta_pivot_name,
                      help="pivot of the Berger-Boos nuisance set")
    p_pv.add_argument("--bonferroni", action="store_true",
                      help="flag p-values below 0.05/N")
    p_pv.set_defaults(func=cli_pvalue)

    t_bo = "exact expectations of the exp-linear estimating equations"
    p_bo = subparsers.add_parser("bias-oracle", help=t_bo, description=t_bo,
                                 parents=parents)
    _add_model_args(p_bo)
    p_bo.add_argument("--mus", type=parse_funcs.floatlist,
                      help="latent means, e.g. '8,9,10'")
    p_bo.add_argument("--input", type=str,
                      help="CSV file whose pair means are used")
    p_bo.set_defaults(func=cli_bias_oracle)
