import pathlib
import tempfile

import numpy as np
import pytest

from pairvar.cli import config
from pairvar.excpt import ConfigError


def new_config(text=None):
    path = tempfile.mkdtemp(prefix="pairvar_test_config_")
    cfg = config.ConfigFile(path=path)
    if text is not None:
        cfg.path.write_text(text)
    return cfg


def test_basic():
    cfg = new_config()
    assert isinstance(cfg["model"], dict)
    assert cfg["model"]["form"] == "exp-linear"
    assert cfg["model"]["theta"] is None
    assert cfg.path.name == config.FILE_CONFIG


def test_dtype():
    cfg = new_config()
    cfg["intervals"] = {"alpha": "0.01"}
    assert np.allclose(cfg["intervals"]["alpha"], 0.01)
    # the section is completed with defaults
    assert cfg["intervals"]["grid res"] == 0.005

    cfg.set_value(section="simulation", key="n", value=6.3)
    assert isinstance(cfg["simulation"]["n"], int)
    assert cfg["simulation"]["n"] == 6

    cfg.set_value("model", "theta", "4.84, -0.927")
    assert cfg["model"]["theta"] == [4.84, -0.927]
    cfg.set_value("simulation", "mu grid", [8, 9.5])
    assert cfg["simulation"]["mu grid"] == [8., 9.5]


def test_invalid_1():
    cfg = new_config()
    with pytest.raises(ConfigError):
        cfg["invalid section"]
    with pytest.raises(ConfigError):
        cfg["invalid section"] = {"key": "value"}
    with pytest.raises(ConfigError):
        cfg.set_value("invalid section", "key", "value")
    with pytest.raises(ConfigError):
        cfg.set_value("model", "invalid key", "value")
    with pytest.raises(ConfigError):
        cfg.set_value("intervals", "alpha", 2)
    with pytest.raises(ConfigError):
        cfg.set_value("model", "form", "quadratic")
    with pytest.raises(ConfigError):
        cfg.set_value("model", "theta", "1, 2, 3, 4")
    with pytest.raises(ConfigError):
        # only keys with default None may be unset
        cfg.set_value("bounds", "a", None)


def test_invalid_2():
    cfg = new_config("[model]\nform = bad value\n")
    with pytest.raises(ConfigError, match="form"):
        cfg["model"]
    cfg.path.write_text("[nonexistent]\na = 1\n")
    with pytest.raises(ConfigError, match="line 1"):
        cfg["model"]
    cfg.path.write_text("[bounds]\na = 7\njust text\n")
    with pytest.raises(ConfigError, match="line 3"):
        cfg["bounds"]


def test_flat():
    text = "# study\ntheta = 4.84, -0.927\nmu_grid = 8, 9\nstudy = power\n" \
           + "reps = 50\n"
    cfg = new_config(text)
    res = cfg.resolved()
    assert res["model"]["theta"] == [4.84, -0.927]
    assert res["simulation"]["mu grid"] == [8., 9.]
    assert res["simulation"]["study"] == "power"
    assert res["simulation"]["reps"] == 50
    # untouched keys have default values
    assert res["bounds"]["a"] == 7.3
    assert cfg["simulation"]["seed"] == 0
    assert cfg["bounds"]["b"] == 13.9
    # flat files are never rewritten
    assert cfg.path.read_text() == text


def test_flat_unknown_key():
    cfg = new_config("theta = 5, -1\nbogus = 1\n")
    with pytest.raises(ConfigError, match="line 2"):
        cfg.resolved()


def test_resolved_keeps_file():
    cfg = new_config("[mixture]\nd = 0.5\n")
    res = cfg.resolved()
    assert res["mixture"]["d"] == 0.5
    assert res["mixture"]["em tol"] == 1e-8
    assert set(res.keys()) == set(config.definitions.config.keys())
    assert cfg.path.read_text() == "[mixture]\nd = 0.5\n"


def test_remove_section():
    cfg = new_config()
    cfg.set_value("mixture", "d", 0.5)
    cfg.set_value("bounds", "a", 7.)
    cfg.remove_section("mixture")
    assert "[mixture]" not in cfg.path.read_text()
    assert cfg["bounds"]["a"] == 7.


def test_update():
    cfg1 = new_config("[mixture]\nd = 0.5\n")
    cfg2 = new_config()
    assert cfg2["mixture"]["d"] == 0.25, "defaults"
    cfg2.update(cfg1)
    assert cfg2["mixture"]["d"] == 0.5


def test_write_complete():
    cfg = new_config("[model]\nform = power\n")
    # This triggers a completion of the configuration section [model]
    assert cfg["model"]["theta"] is None
    text = cfg.path.read_text()
    assert "theta = None" in text
    assert "form = power" in text
    # the completed file is read back identically
    cfg2 = config.ConfigFile(pathlib.Path(cfg.path))
    assert cfg2["model"] == cfg["model"]


if __name__ == "__main__":
    # Run all tests
    loc = locals()
    for key in list(loc.keys()):
        if key.startswith("test_") and hasattr(loc[key], "__call__"):
            loc[key]()
