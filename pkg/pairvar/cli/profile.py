"""Local library of pairvar configuration files ("profiles")"""
import pathlib
import shutil

import appdirs

from ..excpt import ConfigError

from .config import ConfigFile


APP_DIR = pathlib.Path(appdirs.user_config_dir(appname="pairvar"))


def _library_path(name):
    return APP_DIR / "profile_{}.cfg".format(name)


def profile_name(path):
    """Name of a profile from its path in the library"""
    return pathlib.Path(path).stem[len("profile_"):]


def get_profiles():
    """Return the paths to all profiles in the local library"""
    return sorted(APP_DIR.glob("profile_*.cfg"))


def get_profile_path(name):
    """Resolve the value of `--config`

    `name` is either the path to a configuration file or the
    name of a profile in the local library.
    """
    for path in [pathlib.Path(name), _library_path(name)]:
        if path.is_file():
            return path
    raise ConfigError("Configuration '{}' is neither a file ".format(name)
                      + "nor a profile in the local library!")


def add_profile(name, path):
    """Validate the configuration file `path` and store it as `name`"""
    dst = _library_path(name)
    if dst.exists():
        raise ConfigError("Profile '{}' already exists!".format(name))
    src = pathlib.Path(path)
    if not src.is_file():
        raise ConfigError("File '{}' does not exist!".format(src))
    ConfigFile(src).resolved()
    APP_DIR.mkdir(parents=True, exist_ok=True)
    shutil.copy(src, dst)
    return dst


def remove_profile(name):
    path = _library_path(name)
    if not path.exists():
        raise ConfigError("Profile '{}' does not exist!".format(name))
    path.unlink()


def export_profiles(path):
    """Copy all profiles to the directory `path`"""
    out = pathlib.Path(path)
    out.mkdir(parents=True, exist_ok=True)
    for pp in get_profiles():
        shutil.copy(pp, out)
    return out


def list_profiles():
    profiles = get_profiles()
    if not profiles:
        print("No profiles in local library.")
        return
    print("Available profiles:")
    for pp in profiles:
        print(" - {}: {}".format(profile_name(pp), pp))


def cli_profile(args):
    """Manage the local profile library (subcommand `profile`)"""
    actions = {
        None: list_profiles,
        "list": list_profiles,
        "add": lambda: add_profile(args.name, args.path),
        "remove": lambda: remove_profile(args.name),
        "export": lambda: export_profiles(args.path),
    }
    if args.profile_cmd not in actions:
        raise ConfigError("Invalid command '{}'!".format(args.profile_cmd))
    actions[args.profile_cmd]()
    return 0


def add_parser(subparsers):
    parser = subparsers.add_parser(
        "profile",
        help="manage profiles in the local library",
        description="Profiles are pairvar configuration files stored in "
                    "the user's configuration directory. They can be "
                    "passed to `--config` by name.")
    psub = parser.add_subparsers(
        title="subcommands",
        description="Run `pairvar profile subcommand --help` for "
        "more information.",
        dest="profile_cmd")

    p_add = psub.add_parser("add", help="store a configuration file")
    p_add.add_argument("name", help="profile name")
    p_add.add_argument("path", help="path to configuration file")

    p_rem = psub.add_parser("remove", help="remove a profile")
    p_rem.add_argument("name", help="profile name")

    psub.add_parser("list", help="list all profiles")

    p_exp = psub.add_parser("export", help="copy all profiles to a folder")
    p_exp.add_argument("path", help="export directory")
    parser.set_defaults(func=cli_profile)
    return parser
