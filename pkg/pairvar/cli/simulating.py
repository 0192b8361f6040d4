from ..excpt import ConfigError
from ..hypothesis import DEFAULT_BETA_POWER
from ..model import VarianceModel, load_pairs
from ..simulate import (Scenario, coverage_methods, coverage_study,
                        estimator_study, power_study)

from .common import (bounds_from_config, finish, load_config,
                     model_from_config, status)
from . import parse_funcs
from .records import write_output
from .manifest import make_manifest
from .task_watcher import TaskWatcher

#: Command line arguments mapped to configuration keys
OVERRIDES = {"study": ("simulation", "study"),
             "reps": ("simulation", "reps"),
             "seed": ("simulation", "seed"),
             }

#: Default replicate counts
DEFAULT_REPS = {"macl": 1000,
                "mixture": 200,
                "coverage": 100000,
                "power": 10000,
                }


def _scenario(cfg, bounds):
    sim = cfg["simulation"]
    means = None
    inputs = []
    if sim["scenario"].endswith("resample"):
        if sim["means file"] is None:
            raise ConfigError("Scenario '{}' requires ".format(
                sim["scenario"]) + "the key 'means file'!")
        means = load_pairs(sim["means file"], drop_ties=False).ybar
        inputs.append(sim["means file"])
    try:
        scenario = Scenario(kind=sim["scenario"],
                            n=sim["n"],
                            seed=sim["seed"],
                            lo=sim["lo"],
                            hi=sim["hi"],
                            source_means=means,
                            bounds=bounds)
    except ValueError as e:
        raise ConfigError(*e.args)
    return scenario, inputs


def run_study(cfg, threads=1, count=None, max_count=None):
    """Run the simulation study described by a resolved configuration

    Returns
    -------
    report: pairvar.simulate.StudyReport
    inputs: list of str
        Input files used (means file)
    """
    sim = cfg["simulation"]
    study = sim["study"]
    model = model_from_config(cfg)
    bounds = bounds_from_config(cfg)
    if sim["theta fit"] is not None:
        model_fit = VarianceModel(model.form, sim["theta fit"])
    else:
        model_fit = model
    kwargs = {"threads": threads, "count": count, "max_count": max_count}
    inputs = []
    if study == "estimator":
        reps = sim["reps"] or DEFAULT_REPS[sim["method"]]
        scenario, inputs = _scenario(cfg, bounds)
        report = estimator_study(scenario, model, reps, method=sim["method"],
                                 d=cfg["mixture"]["d"],
                                 em_max_iter=cfg["mixture"]["em max iter"],
                                 **kwargs)
    elif study == "coverage":
        reps = sim["reps"] or DEFAULT_REPS["coverage"]
        mode = sim["mode"]
        methods = sim["methods"] or coverage_methods[mode]
        alphas = sim["alphas"] or [cfg["intervals"]["alpha"]]
        scenario = None
        if mode == "pair":
            scenario, inputs = _scenario(cfg, bounds)
        try:
            report = coverage_study(model, reps, model_fit=model_fit,
                                    mode=mode, mu_values=sim["mu grid"],
                                    alphas=alphas, scenario=scenario,
                                    methods=methods, bounds=bounds,
                                    seed=sim["seed"], **kwargs)
        except ValueError as e:
            raise ConfigError(*e.args)
    else:
        reps = sim["reps"] or DEFAULT_REPS["power"]
        methods = sim["methods"] or ["berger-boos", "conservative", "naive"]
        if cfg["test"]["beta"] is None:
            cfg["test"]["beta"] = DEFAULT_BETA_POWER
        report = power_study(model, sim["mu grid"], sim["k grid"], reps,
                             beta=cfg["test"]["beta"], methods=methods,
                             bounds=bounds, seed=sim["seed"], **kwargs)
    return report, inputs


def cli_simulate(args):
    """Monte Carlo studies (subcommand `simulate`)"""
    cfg = load_config(args, OVERRIDES)
    status(args, "Running {} study (seed {})...".format(
        cfg["simulation"]["study"], cfg["simulation"]["seed"]))
    with TaskWatcher("Simulating... ", quiet=args.quiet) as tw:
        report, inputs = run_study(cfg, threads=args.threads, count=tw.count,
                                   max_count=tw.max_count)
    if args.format == "jsonl":
        return finish(args, report.table.to_dict(orient="records"), cfg,
                      "simulate", inputs=inputs, default_format="jsonl",
                      seed=report.seed)
    manifest = make_manifest(subcommand="simulate",
                             config=cfg,
                             inputs=inputs,
                             seed=report.seed,
                             argv=getattr(args, "argv", []))
    manifest.summary.update({"reps": report.reps,
                             "rng_algorithm": report.rng_algorithm,
                             "failures": report.failures,
                             "unconverged": report.unconverged,
                             "wall_clock": report.wall_clock})
    write_output(report.to_csv(), out=args.out, manifest=manifest)
    return 0


def add_parsers(subparsers, parents):
    t_sim = "seeded Monte Carlo studies (estimator bias, coverage, power)"
    p_sim = subparsers.add_parser("simulate", help=t_sim, description=t_sim,
                                  parents=parents)
    p_sim.add_argument("--study", type=parse_funcs.study_name,
                       help="study to run (overrides the configuration)")
    p_sim.add_argument("--reps", type=parse_funcs.fposint,
                       help="number of replicates")
    p_sim.set_defaults(func=cli_simulate)
