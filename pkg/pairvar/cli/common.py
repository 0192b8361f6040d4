"""Shared command-line helpers: global flags, configuration resolution"""
import argparse
import sys

from ..excpt import ConfigError
from ..model import VarianceModel

from . import definitions
from .config import ConfigFile
from .manifest import make_manifest
from .parse_funcs import fposint
from .profile import get_profile_path
from .records import available_formats, emit_records, write_output


def global_parser():
    """Parent parser with the flags shared by all subcommands"""
    parser = argparse.ArgumentParser(add_help=False)
    group = parser.add_argument_group("global options")
    group.add_argument("--config", type=str, default=None,
                       help="configuration file or name of a profile "
                            "in the local library")
    group.add_argument("--seed", type=int, default=None,
                       help="seed of the random number generator")
    group.add_argument("--out", type=str, default=None,
                       help="output file (default: standard output); "
                            "a manifest is written to OUT.manifest.json")
    group.add_argument("--format", type=str, default=None,
                       choices=available_formats,
                       help="output format")
    group.add_argument("--threads", type=fposint, default=1,
                       help="number of worker processes")
    group.add_argument("--quiet", action="store_true",
                       help="do not print progress or warnings")
    return parser


def load_config(args, overrides):
    """Resolve the configuration of a subcommand

    Defaults are overridden by the configuration file (`--config`)
    which in turn is overridden by command line arguments.

    Parameters
    ----------
    args: argparse.Namespace
        Parsed command line
    overrides: dict
        Maps argument names to (section, key) tuples

    Returns
    -------
    cfg: dict of dicts
        Complete configuration
    """
    if args.config is not None:
        path = get_profile_path(args.config)
        cfg = ConfigFile(path).resolved()
    else:
        cfg = definitions.defaults()
    for name, (sec, key) in overrides.items():
        value = getattr(args, name, None)
        if value is not None:
            cfg[sec][key] = value
    return cfg


def model_from_config(cfg, key="theta"):
    """Variance model from the [model] section"""
    theta = cfg["model"][key] if key == "theta" else cfg["simulation"][key]
    if theta is None:
        raise ConfigError("Variance coefficients are required "
                          + "(use --theta or the configuration key "
                          + "'{}')!".format(key))
    try:
        return VarianceModel(cfg["model"]["form"], theta)
    except ValueError as e:
        raise ConfigError(*e.args)


def bounds_from_config(cfg):
    a, b = cfg["bounds"]["a"], cfg["bounds"]["b"]
    if not a < b:
        raise ConfigError("Bounds must satisfy a < b, got "
                          + "({}, {})!".format(a, b))
    return a, b


def status(args, msg):
    """Print a status line on stderr unless `--quiet` is set"""
    if not args.quiet:
        print(msg, file=sys.stderr, flush=True)


def finish(args, records, cfg, subcommand, inputs=(), default_format="csv",
           seed=None, summary=None):
    """Emit records and write the run manifest"""
    fmt = args.format or default_format
    manifest = make_manifest(subcommand=subcommand,
                             config=cfg,
                             inputs=inputs,
                             seed=seed,
                             argv=getattr(args, "argv", []))
    if summary:
        manifest.summary.update(summary)
    write_output(emit_records(records, fmt), out=args.out, manifest=manifest)
    return 0
