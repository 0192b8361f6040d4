"""Entry point of the `pairvar` command"""
import argparse
import sys
import warnings

from .._version import version
from ..excpt import (ConfigError, ConvergenceError, DataError, DomainError,
                     NumericalError)

from . import fitting, inferring, pipeline, profile, simulating
from .common import global_parser

#: Exit codes of the command line interface
EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pairvar",
        description="Variance functions, confidence sets and p-values "
                    "for paired-replicate intensity data.")
    parser.add_argument("--version", action="version",
                        version="pairvar {}".format(version))
    subparsers = parser.add_subparsers(
        title="subcommands",
        description="Run `pairvar subcommand --help` for more "
                    "information.",
        dest="subcommand")
    parents = [global_parser()]
    fitting.add_parsers(subparsers, parents)
    inferring.add_parsers(subparsers, parents)
    simulating.add_parsers(subparsers, parents)
    pipeline.add_parser(subparsers, parents)
    profile.add_parser(subparsers)
    return parser


def _error(msg):
    print("Error: {}".format(msg), file=sys.stderr, flush=True)


def _message(exc):
    return ", ".join(str(a) for a in exc.args) or exc.__class__.__name__


def run(argv=None):
    """Run the command line interface

    Parameters
    ----------
    argv: list of str or None
        Command line arguments; defaults to `sys.argv[1:]`

    Returns
    -------
    exit_code: int
        0 on success, 2 for usage errors, 3 for data errors and
        4 for numerical failures
    """
    if argv is None:
        argv = sys.argv[1:]
    argv = [str(a) for a in argv]
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits with 2 on usage errors and 0 for --help
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    if args.subcommand is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    args.argv = argv
    with warnings.catch_warnings():
        if getattr(args, "quiet", False):
            warnings.simplefilter("ignore")
        try:
            return args.func(args)
        except ConfigError as e:
            _error(_message(e))
            return EXIT_USAGE
        except (DataError, DomainError, FileNotFoundError) as e:
            _error(_message(e))
            return EXIT_DATA
        except NumericalError as e:
            _error("{}: {}".format(e.__class__.__name__, _message(e)))
            if isinstance(e, ConvergenceError) and e.theta is not None:
                print("  best iterate: {}".format(list(e.theta)),
                      file=sys.stderr)
                print("  residual norm: {}".format(e.residual),
                      file=sys.stderr)
                print("  iterations: {}".format(e.iterations),
                      file=sys.stderr)
            return EXIT_NUMERICAL
        except ValueError as e:
            _error(_message(e))
            return EXIT_USAGE


def main():
    sys.exit(run())
