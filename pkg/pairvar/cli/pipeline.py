import numpy as np

from ..hypothesis import DEFAULT_BETA, available_methods, batch_pvalues
from ..mixture_em import fit_mixture
from ..model import load_pairs

from .common import bounds_from_config, finish, load_config, status
from .inferring import batch_interval, interval_endpoints
from . import parse_funcs
from .task_watcher import TaskWatcher


#: Command line arguments mapped to configuration keys
OVERRIDES = {"form": ("model", "form"),
             "a": ("bounds", "a"),
             "b": ("bounds", "b"),
             "d": ("mixture", "d"),
             "alpha": ("intervals", "alpha"),
             "grid_res": ("intervals", "grid res"),
             "beta": ("test", "beta"),
             "cbeta_pivot": ("test", "cbeta pivot"),
             }

#: Interval methods reported by the pipeline
INTERVAL_METHODS = ["region", "bonferroni", "naive"]


def cli_pipeline(args):
    """Fit on control data, infer on experiment data (subcommand `pipeline`)

    The mixture model is fitted to the control pairs. With the
    fitted variance function, region, Bonferroni and naive confidence
    sets for log(mu1/mu2) and p-values of all methods are computed for every
    experiment pair. Significance is judged against 0.05/N.
    """
    cfg = load_config(args, OVERRIDES)
    bounds = bounds_from_config(cfg)
    if cfg["test"]["beta"] is None:
        cfg["test"]["beta"] = DEFAULT_BETA
    alpha = cfg["intervals"]["alpha"]
    control = load_pairs(args.control, bounds=bounds)
    experiment = load_pairs(args.experiment, bounds=bounds, drop_ties=False)
    form = cfg["model"]["form"]

    status(args, "Fitting '{}' mixture model to {} control pairs...".format(
        form, len(control)))
    est = fit_mixture(control,
                      form=form,
                      d=cfg["mixture"]["d"],
                      tol=cfg["mixture"]["em tol"],
                      max_iter=cfg["mixture"]["em max iter"],
                      inner_tol=cfg["mixture"]["inner tol"],
                      regrid=cfg["mixture"]["regrid"])
    model = est.model
    # the fitted coefficients are part of the manifest
    cfg["model"]["theta"] = [float(t) for t in model.theta]
    status(args, "theta_hat = ({})".format(
        ", ".join("{:.6g}".format(t) for t in model.theta)))

    n = len(experiment)
    threshold = 0.05 / n
    pvals = {}
    for meth in available_methods:
        pvals[meth] = batch_pvalues(experiment.y1, experiment.y2, model,
                                    meth, bounds=bounds,
                                    beta=cfg["test"]["beta"],
                                    cbeta_pivot=cfg["test"]["cbeta pivot"])

    records = []
    excluding = {meth: 0 for meth in INTERVAL_METHODS}
    empty = {meth: 0 for meth in INTERVAL_METHODS}
    with TaskWatcher("Computing confidence sets... ", quiet=args.quiet) as tw:
        tw.max_count.value = n
        for ii, pair in enumerate(experiment):
            rec = {"id": pair.id, "y1": pair.y1, "y2": pair.y2}
            for meth in INTERVAL_METHODS:
                cset = batch_interval(pair, model, meth, alpha, bounds,
                                      cfg["intervals"]["grid res"])
                lo, hi = interval_endpoints(cset, args.scale)
                rec["{}_lo".format(meth)] = lo
                rec["{}_hi".format(meth)] = hi
                rec["{}_empty".format(meth)] = cset is None
                if cset is None:
                    empty[meth] += 1
                elif not cset.contains(0):
                    excluding[meth] += 1
                if meth == "region":
                    rec["region_disconnected"] = \
                        cset is not None and cset.disconnected
            for meth in available_methods:
                pv = float(pvals[meth][ii])
                rec["p_{}".format(meth.replace("-", "_"))] = pv
                rec["significant_{}".format(meth.replace("-", "_"))] = \
                    pv <= threshold
            records.append(rec)
            with tw.count.get_lock():
                tw.count.value += 1

    summary = {"n_control": len(control),
               "n_experiment": n,
               "threshold": threshold,
               "theta_hat": cfg["model"]["theta"],
               "J": est.grid.J,
               }
    for meth in available_methods:
        count = int(np.sum(pvals[meth] <= threshold))
        summary["significant_{}".format(meth)] = count
        status(args, "{}: {} of {} p-values below 0.05/N".format(
            meth, count, n))
    for meth in INTERVAL_METHODS:
        summary["excluding_zero_{}".format(meth)] = excluding[meth]
        summary["empty_{}".format(meth)] = empty[meth]
        status(args, "{}: {} of {} intervals do not cover 0".format(
            meth, excluding[meth], n))
    return finish(args, records, cfg, "pipeline",
                  inputs=[args.control, args.experiment], summary=summary)


def add_parser(subparsers, parents):
    t_pipe = "fit the mixture model on control data and compute " \
             + "confidence sets and p-values for experiment data"
    parser = subparsers.add_parser("pipeline", help=t_pipe,
                                   description=t_pipe, parents=parents)
    parser.add_argument("--control", type=str, required=True,
                        help="CSV file with control pairs (id, y1, y2)")
    parser.add_argument("--experiment", type=str, required=True,
                        help="CSV file with experiment pairs (id, y1, y2); "
                             "a second control file gives the "
                             "cross-validation counts")
    parser.add_argument("--form", type=parse_funcs.form_name,
                        help="variance function form")
    parser.add_argument("--d", type=parse_funcs.fposfloat,
                        help="support grid spacing in standard deviations")
    parser.add_argument("--a", type=float, help="lower bound of the means")
    parser.add_argument("--b", type=float, help="upper bound of the means")
    parser.add_argument("--alpha", type=parse_funcs.float01,
                        help="significance level of the confidence sets")
    parser.add_argument("--grid-res", type=parse_funcs.fposfloat,
                        help="lattice resolution of the region method")
    parser.add_argument("--beta", type=parse_funcs.float01,
                        help="level of the Berger-Boos nuisance set")
    parser.add_argument("--cbeta-pivot", type=parse_funcs.cbeta_pivot_name,
                        help="pivot of the Berger-Boos nuisance set")
    parser.add_argument("--scale", type=parse_funcs.lcstr, default="log",
                        choices=["log", "ratio"],
                        help="report log-scale or ratio-scale endpoints")
    parser.set_defaults(func=cli_pipeline)
    return parser
