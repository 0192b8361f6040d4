from ..macl import estimating_equations, macl_fit, mle_homoscedastic
from ..mixture_em import fit_mixture
from ..model import load_pairs

from .common import bounds_from_config, finish, load_config, status
from . import parse_funcs


#: Command line arguments mapped to configuration keys
MACL_OVERRIDES = {"form": ("model", "form"),
                  "a": ("bounds", "a"),
                  "b": ("bounds", "b"),
                  "init": ("macl", "init"),
                  "tol": ("macl", "tol"),
                  "max_iter": ("macl", "max iter"),
                  }

MIXTURE_OVERRIDES = {"form": ("model", "form"),
                     "a": ("bounds", "a"),
                     "b": ("bounds", "b"),
                     "d": ("mixture", "d"),
                     "tol": ("mixture", "em tol"),
                     "max_iter": ("mixture", "em max iter"),
                     "regrid": ("mixture", "regrid"),
                     }


def _add_data_args(parser):
    parser.add_argument("--input", type=str, required=True,
                        help="CSV file with columns id, y1, y2 "
                             "(natural-log intensities)")
    parser.add_argument("--raw", action="store_true",
                        help="the input contains raw intensities; the "
                             "natural logarithm is applied")
    parser.add_argument("--form", type=parse_funcs.form_name,
                        help="variance function form")
    parser.add_argument("--a", type=float, help="lower bound of the means")
    parser.add_argument("--b", type=float, help="upper bound of the means")


def cli_fit_macl(args):
    """Fit a variance function by MACL (subcommand `fit-macl`)"""
    cfg = load_config(args, MACL_OVERRIDES)
    bounds = bounds_from_config(cfg)
    data = load_pairs(args.input, bounds=bounds, raw=args.raw)
    form = cfg["model"]["form"]
    status(args, "Fitting '{}' model to {} pairs...".format(form, len(data)))
    fit = macl_fit(data,
                   form=form,
                   init=cfg["macl"]["init"],
                   tol=cfg["macl"]["tol"],
                   max_iter=cfg["macl"]["max iter"])
    record = {"form": form,
              "theta_hat": list(fit.theta_hat),
              "converged": fit.converged,
              "iterations": fit.iterations,
              "residual_norm": fit.residual_norm,
              "n_pairs": len(data),
              "sigma2_naive": mle_homoscedastic(data),
              }
    if form == "exp-linear":
        eq1, eq2 = estimating_equations(data, fit.model)
        record["equation_1"] = eq1
        record["equation_2"] = eq2
    return finish(args, [record], cfg, "fit-macl", inputs=[args.input],
                  default_format="jsonl")


def cli_fit_mixture(args):
    """Fit the mixture model by EM (subcommand `fit-mixture`)"""
    cfg = load_config(args, MIXTURE_OVERRIDES)
    bounds = bounds_from_config(cfg)
    data = load_pairs(args.input, bounds=bounds, raw=args.raw)
    form = cfg["model"]["form"]
    status(args, "Fitting '{}' mixture model to {} pairs...".format(
        form, len(data)))
    est = fit_mixture(data,
                      form=form,
                      d=cfg["mixture"]["d"],
                      tol=cfg["mixture"]["em tol"],
                      max_iter=cfg["mixture"]["em max iter"],
                      inner_tol=cfg["mixture"]["inner tol"],
                      regrid=cfg["mixture"]["regrid"])
    if not est.converged:
        status(args, "EM did not converge after {} iterations.".format(
            est.iterations))
    record = {"form": form,
              "theta_hat": list(est.theta_hat),
              "J": est.grid.J,
              "log_lik": est.log_lik,
              "iterations": est.iterations,
              "converged": est.converged,
              "n_pairs": len(data),
              }
    if not args.no_weights:
        record["mu_grid"] = list(est.grid.points)
        record["pi_hat"] = list(est.pi_hat)
    return finish(args, [record], cfg, "fit-mixture", inputs=[args.input],
                  default_format="jsonl")


def add_parsers(subparsers, parents):
    t_macl = "fit a variance function by maximum approximate " \
             + "conditional likelihood"
    p_macl = subparsers.add_parser("fit-macl", help=t_macl,
                                   description=t_macl, parents=parents)
    _add_data_args(p_macl)
    p_macl.add_argument("--init", type=parse_funcs.theta,
                        help="initial coefficients, e.g. '5,-1'")
    p_macl.add_argument("--tol", type=parse_funcs.fposfloat,
                        help="tolerance of the estimating equations")
    p_macl.add_argument("--max-iter", type=parse_funcs.fposint,
                        help="maximum number of iterations")
    p_macl.set_defaults(func=cli_fit_macl)

    t_mix = "fit the mixture model with a variance-adaptive support grid"
    p_mix = subparsers.add_parser("fit-mixture", help=t_mix,
                                  description=t_mix, parents=parents)
    _add_data_args(p_mix)
    p_mix.add_argument("--d", type=parse_funcs.fposfloat,
                       help="support grid spacing in standard deviations")
    p_mix.add_argument("--tol", type=parse_funcs.fposfloat,
                       help="relative log-likelihood change for stopping")
    p_mix.add_argument("--max-iter", type=parse_funcs.fposint,
                       help="maximum number of EM iterations")
    p_mix.add_argument("--regrid", action="store_const", const=True,
                       help="rebuild the support grid once and refit")
    p_mix.add_argument("--no-weights", action="store_true",
                       help="do not report the support grid and weights")
    p_mix.set_defaults(func=cli_fit_mixture)
