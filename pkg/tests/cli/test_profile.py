import argparse
import pathlib
import tempfile

import pytest

from pairvar.cli import config, profile
from pairvar.excpt import ConfigError


def setup_config(theta="4.84, -0.927", d=0.5):
    _, path = tempfile.mkstemp(prefix="pairvar_test_config_", suffix=".cfg")
    cfg = config.ConfigFile(path=path)
    cfg.set_value("model", "theta", theta)
    cfg.set_value("mixture", "d", d)
    return cfg.path


@pytest.fixture
def stored():
    """A profile in the local library that is removed afterwards"""
    name = "test_8472_prof"
    path = profile.add_profile(name, setup_config())
    yield name, path
    if path.exists():
        profile.remove_profile(name)


def test_add(stored):
    name, path = stored
    assert profile.get_profile_path(name) == path
    assert profile.profile_name(path) == name
    cfg = config.ConfigFile(path)
    assert cfg["model"]["theta"] == [4.84, -0.927]
    assert cfg["mixture"]["d"] == 0.5


def test_add_twice(stored):
    name, _ = stored
    with pytest.raises(ConfigError, match="already exists"):
        profile.add_profile(name, setup_config())


def test_add_invalid_file():
    _, path = tempfile.mkstemp(prefix="pairvar_test_config_", suffix=".cfg")
    pathlib.Path(path).write_text("[model]\nform = quadratic\n")
    with pytest.raises(ConfigError):
        profile.add_profile("test_8475_prof", path)
    assert not (profile.APP_DIR / "profile_test_8475_prof.cfg").exists()
    with pytest.raises(ConfigError, match="does not exist"):
        profile.add_profile("test_8476_prof", path + "_missing")


def test_cli_add_remove():
    path = setup_config(theta="5, -1")
    args = argparse.Namespace(profile_cmd="add", name="test_8473_prof",
                              path=path)
    assert profile.cli_profile(args) == 0
    stored = profile.get_profile_path("test_8473_prof")
    assert config.ConfigFile(stored)["model"]["theta"] == [5., -1.]
    args = argparse.Namespace(profile_cmd="remove", name="test_8473_prof")
    assert profile.cli_profile(args) == 0
    assert not stored.exists()


def test_cli_invalid_command():
    with pytest.raises(ConfigError):
        profile.cli_profile(argparse.Namespace(profile_cmd="rename"))


def test_export(stored):
    name, _ = stored
    tdir = tempfile.mkdtemp(prefix="test_pairvar_profile_export_")
    profile.cli_profile(argparse.Namespace(profile_cmd="export", path=tdir))
    assert (pathlib.Path(tdir) / "profile_{}.cfg".format(name)).exists()


def test_get_profile_path():
    path = setup_config()
    assert profile.get_profile_path(path) == path
    with pytest.raises(ConfigError):
        profile.get_profile_path("test_8492_prof_missing")


def test_list(stored, capsys):
    name, _ = stored
    profile.cli_profile(argparse.Namespace(profile_cmd="list"))
    captured = capsys.readouterr()
    assert "- {}:".format(name) in captured.out
    # listing is the default
    profile.cli_profile(argparse.Namespace(profile_cmd=None))
    assert "- {}:".format(name) in capsys.readouterr().out


def test_list_empty(capsys, monkeypatch):
    monkeypatch.setattr(profile, "APP_DIR", pathlib.Path(
        tempfile.mkdtemp(prefix="pairvar_test_profiles_")))
    profile.list_profiles()
    assert "No profiles in local library." in capsys.readouterr().out


def test_remove_missing():
    with pytest.raises(ConfigError, match="does not exist"):
        profile.remove_profile("test_8474_prof")


if __name__ == "__main__":
    # Run all tests
    print("Cannot run all tests b/c of usage of fixtures! "
          "Please use py.test.")
