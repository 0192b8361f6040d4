import pathlib
import tempfile

import numpy as np
import pandas as pd
import pytest

import importlib

from pairvar.cli import inferring, records
from pairvar.cli.manifest import RunManifest, manifest_path
from pairvar.excpt import EmptyConfidenceSetWarning
from pairvar.model import VarianceModel, load_pairs
from pairvar.simulate import Scenario, generate_dataset
from pairvar.util import hash_file

# pairvar.cli re-exports the main() function, shadowing the submodule
main = importlib.import_module("pairvar.cli.main")

REFERENCE_PAIRS = pathlib.Path(__file__).parent.parent / "data" \
    / "reference_pairs.csv"


def setup_pairs(theta=(5., -1.), n=300, seed=1):
    scenario = Scenario(kind="uniform-continuous", n=n, seed=seed)
    data = generate_dataset(scenario, VarianceModel("exp-linear", theta))
    _, path = tempfile.mkstemp(prefix="pairvar_test_cli_", suffix=".csv")
    pd.DataFrame({"id": data.ids, "y1": data.y1, "y2": data.y2}).to_csv(
        path, index=False)
    return pathlib.Path(path)


def write_text(text, suffix=".csv"):
    _, path = tempfile.mkstemp(prefix="pairvar_test_cli_", suffix=suffix)
    path = pathlib.Path(path)
    path.write_text(text, encoding="utf-8")
    return path


def out_path(suffix=".csv"):
    return pathlib.Path(tempfile.mkdtemp(prefix="pairvar_test_cli_")) \
        / ("result" + suffix)


def read_records(path, fmt="csv"):
    return records.parse_records(pathlib.Path(path).read_text(), fmt)


def test_fit_macl():
    path = setup_pairs()
    out = out_path(".jsonl")
    assert main.run(["fit-macl", "--input", path, "--out", out,
                     "--quiet"]) == main.EXIT_OK
    rec, = read_records(out, "jsonl")
    assert rec["converged"]
    assert rec["form"] == "exp-linear"
    assert len(rec["theta_hat"]) == 2
    assert abs(rec["equation_1"]) < 1e-6
    assert rec["n_pairs"] == 300
    manifest = RunManifest.from_file(manifest_path(out))
    assert manifest.subcommand == "fit-macl"
    assert manifest.inputs == {str(path): hash_file(path)}
    assert manifest.config["macl"]["tol"] == 1e-9
    assert manifest.config["bounds"]["a"] == 7.3


def test_fit_mixture():
    path = setup_pairs(n=200)
    out = out_path(".jsonl")
    assert main.run(["fit-mixture", "--input", path, "--d", "1",
                     "--max-iter", "20", "--no-weights", "--out", out,
                     "--quiet"]) == main.EXIT_OK
    rec, = read_records(out, "jsonl")
    assert rec["J"] > 1
    assert rec["iterations"] <= 20
    assert "pi_hat" not in rec
    manifest = RunManifest.from_file(manifest_path(out))
    assert manifest.config["mixture"]["d"] == 1


def test_ci_naive_ratio():
    out = out_path()
    assert main.run(["ci", "--theta", "4.84,-0.927", "--y1", "10.21",
                     "--y2", "10.78", "--method", "naive", "--scale",
                     "ratio", "--out", out]) == main.EXIT_OK
    rec, = read_records(out)
    assert np.allclose([rec["lo"], rec["hi"]], [0.44, 0.72], atol=0.01)
    assert rec["method"] == "naive"
    assert not rec["disconnected"]


def test_ci_region_batch():
    out = out_path()
    assert main.run(["ci", "--theta", "4.84,-0.927", "--input",
                     REFERENCE_PAIRS, "--method", "region", "--scale",
                     "ratio", "--out", out, "--quiet"]) == main.EXIT_OK
    recs = read_records(out)
    assert [r["id"] for r in recs] == ["peptide_{}".format(ii)
                                       for ii in range(1, 6)]
    assert np.allclose([recs[0]["lo"], recs[0]["hi"]], [0.41, 0.76],
                       atol=0.01)
    assert all(r["lo"] < np.exp(r["y1"] - r["y2"]) < r["hi"] for r in recs)


def test_ci_exact_single():
    out = out_path()
    assert main.run(["ci", "--theta", "4.84,-0.927", "--y1", "8",
                     "--method", "exact", "--out", out]) == main.EXIT_OK
    rec, = read_records(out)
    assert rec["y2"] is None
    assert 7.3 <= rec["lo"] < 8 < rec["hi"] <= 13.9
    # --y2 is not allowed for single-mean sets
    assert main.run(["ci", "--theta", "4.84,-0.927", "--y1", "8", "--y2",
                     "9", "--method", "exact"]) == main.EXIT_USAGE


def test_ci_batch_empty_row():
    text = REFERENCE_PAIRS.read_text() + "far,14.0,14.2\n"
    path = write_text(text)
    for method in ["region", "bonferroni"]:
        out = out_path()
        assert main.run(["ci", "--theta", "4.84,-0.927", "--input", path,
                         "--method", method, "--out", out,
                         "--quiet"]) == main.EXIT_OK
        recs = read_records(out)
        assert len(recs) == 6
        assert not any(r["empty"] for r in recs[:5])
        assert all(r["lo"] < r["y1"] - r["y2"] < r["hi"] for r in recs[:5])
        far = recs[5]
        assert far["id"] == "far"
        assert far["empty"]
        assert not far["disconnected"]
        assert np.isnan(far["lo"]) and np.isnan(far["hi"])


def test_batch_interval_warns():
    path = write_text("id,y1,y2\nfar,14.0,14.2\n")
    pair, = load_pairs(path)
    model = VarianceModel("exp-linear", [4.84, -0.927])
    with pytest.warns(EmptyConfidenceSetWarning, match="far"):
        cset = inferring.batch_interval(pair, model, "region", 0.05,
                                        (7.3, 13.9), 0.01)
    assert cset is None
    assert np.all(np.isnan(inferring.interval_endpoints(cset, "ratio")))
    # the naive interval does not depend on the bounds
    cset = inferring.batch_interval(pair, model, "naive", 0.05,
                                    (7.3, 13.9), 0.01)
    assert cset.contains(-0.2)


def test_ci_config_file():
    cfg = write_text("theta = 4.84, -0.927\nalpha = 0.05\n", suffix=".cfg")
    out1 = out_path()
    out2 = out_path()
    assert main.run(["ci", "--config", cfg, "--y1", "11.45", "--y2",
                     "13.36", "--method", "naive", "--out", out1]) == 0
    assert main.run(["ci", "--theta", "4.84,-0.927", "--y1", "11.45",
                     "--y2", "13.36", "--method", "naive", "--out",
                     out2]) == 0
    assert records.records_equal(read_records(out1), read_records(out2))
    manifest = RunManifest.from_file(manifest_path(out1))
    assert manifest.config["model"]["theta"] == [4.84, -0.927]


def test_pvalue_equal_pairs():
    path = write_text("id,y1,y2\na,10,10\nb,11.5,11.5\n")
    out = out_path()
    assert main.run(["pvalue", "--theta", "4.84,-0.927", "--input", path,
                     "--method", "all", "--out", out,
                     "--quiet"]) == main.EXIT_OK
    recs = read_records(out)
    assert len(recs) == 6
    assert all(r["p_value"] == 1 for r in recs)


def test_pvalue_bonferroni():
    out = out_path()
    assert main.run(["pvalue", "--theta", "4.84,-0.927", "--input",
                     REFERENCE_PAIRS, "--method", "all", "--bonferroni",
                     "--out", out, "--quiet"]) == main.EXIT_OK
    recs = read_records(out)
    assert len(recs) == 15
    manifest = RunManifest.from_file(manifest_path(out))
    assert manifest.summary["threshold"] == 0.05 / 5
    assert manifest.config["test"]["beta"] == 1e-6
    for meth in ["naive", "conservative", "berger-boos"]:
        flagged = [r for r in recs if r["method"] == meth
                   and r["significant"]]
        assert manifest.summary["significant_{}".format(meth)] == \
            len(flagged)
    # the naive test is never more conservative
    assert manifest.summary["significant_naive"] >= \
        manifest.summary["significant_berger-boos"]


def test_bias_oracle():
    out = out_path(".jsonl")
    assert main.run(["bias-oracle", "--theta", "5,-1", "--mus", "10",
                     "--out", out]) == main.EXIT_OK
    rec, = read_records(out, "jsonl")
    assert np.allclose(rec["equation_1"], -0.001686, atol=1e-6)
    assert rec["n_means"] == 1
    assert main.run(["bias-oracle", "--theta", "5,-1",
                     "--form", "power", "--mus", "10"]) == main.EXIT_USAGE


def test_simulate_deterministic():
    cfg = write_text("study = power\ntheta = 4.84, -0.927\nmu_grid = 9, 11\n"
                     + "k_grid = 0, 2\nreps = 200\nseed = 5\n",
                     suffix=".cfg")
    out1 = out_path()
    out2 = out_path()
    for out in [out1, out2]:
        assert main.run(["simulate", "--config", cfg, "--out", out,
                         "--quiet"]) == main.EXIT_OK
    assert out1.read_text() == out2.read_text()
    recs = read_records(out1)
    assert len(recs) == 2 * 2 * 3
    manifest = RunManifest.from_file(manifest_path(out1))
    assert manifest.seed == 5
    assert manifest.summary["reps"] == 200
    assert manifest.config["test"]["beta"] == 1e-3
    # a different seed gives different rates
    out3 = out_path()
    assert main.run(["simulate", "--config", cfg, "--seed", "6", "--out",
                     out3, "--quiet"]) == main.EXIT_OK
    assert out3.read_text() != out1.read_text()


def test_simulate_estimator():
    cfg = write_text("study = estimator\ntheta = 5, -1\nn = 200\nreps = 3\n",
                     suffix=".cfg")
    out = out_path()
    assert main.run(["simulate", "--config", cfg, "--out", out,
                     "--quiet"]) == main.EXIT_OK
    recs = read_records(out)
    assert [r["parameter"] for r in recs] == ["theta1", "theta2"]
    assert all(r["n_ok"] == 3 for r in recs)


def test_pipeline():
    control = setup_pairs(theta=(4.84, -0.927), n=300, seed=3)
    out = out_path()
    assert main.run(["pipeline", "--control", control, "--experiment",
                     REFERENCE_PAIRS, "--d", "1", "--scale", "ratio",
                     "--out", out, "--quiet"]) == main.EXIT_OK
    recs = read_records(out)
    assert len(recs) == 5
    for rec in recs:
        assert rec["region_lo"] <= rec["naive_lo"] + 1e-3
        assert rec["region_hi"] >= rec["naive_hi"] - 1e-3
        assert rec["p_naive"] <= rec["p_berger_boos"]
        assert rec["bonferroni_lo"] < rec["bonferroni_hi"]
        assert not rec["bonferroni_empty"]
    manifest = RunManifest.from_file(manifest_path(out))
    assert manifest.summary["n_experiment"] == 5
    for meth in ["region", "bonferroni", "naive"]:
        assert manifest.summary["empty_{}".format(meth)] == 0
        assert 0 <= manifest.summary["excluding_zero_{}".format(meth)] <= 5
    assert manifest.summary["n_control"] == 300
    assert len(manifest.config["model"]["theta"]) == 2
    assert set(manifest.inputs) == {str(control), str(REFERENCE_PAIRS)}


def test_pipeline_empty_row():
    control = setup_pairs(theta=(4.84, -0.927), n=300, seed=3)
    experiment = write_text(REFERENCE_PAIRS.read_text() + "far,14.0,14.2\n")
    out = out_path()
    assert main.run(["pipeline", "--control", control, "--experiment",
                     experiment, "--d", "1", "--out", out,
                     "--quiet"]) == main.EXIT_OK
    recs = read_records(out)
    assert len(recs) == 6
    far = recs[5]
    for meth in ["region", "bonferroni"]:
        assert far["{}_empty".format(meth)]
        assert np.isnan(far["{}_lo".format(meth)])
        assert not any(r["{}_empty".format(meth)] for r in recs[:5])
    assert not far["naive_empty"]
    assert not far["region_disconnected"]
    summary = RunManifest.from_file(manifest_path(out)).summary
    assert summary["empty_region"] == 1
    assert summary["empty_bonferroni"] == 1
    assert summary["empty_naive"] == 0
    assert summary["excluding_zero_region"] <= 5


def test_pipeline_null_and_shifted():
    theta = (5., -1.)
    control = setup_pairs(theta=theta, n=300, seed=5)
    # one pair with a difference of 6 null standard deviations
    mu = 7.4
    shift = 6 * np.sqrt(2 * np.exp(theta[0] + theta[1] * mu))
    experiment = write_text(control.read_text()
                            + "shifted,{!r},{!r}\n".format(float(mu + shift), float(mu)))
    out = out_path()
    assert main.run(["pipeline", "--control", control, "--experiment",
                     experiment, "--d", "1", "--out", out,
                     "--quiet"]) == main.EXIT_OK
    recs = read_records(out)
    assert len(recs) == 301
    null, shifted = recs[:300], recs[300]
    assert shifted["id"] == "shifted"
    for meth in ["naive", "conservative", "berger_boos"]:
        assert shifted["significant_{}".format(meth)]
    for meth in ["region", "bonferroni", "naive"]:
        assert shifted["{}_lo".format(meth)] > 0
    # the null pairs are the control pairs
    assert sum(r["significant_berger_boos"] for r in null) <= 1
    assert sum(r["significant_conservative"] for r in null) <= 1


def test_pipeline_empty_experiment():
    control = setup_pairs(n=50)
    empty = write_text("id,y1,y2\n")
    assert main.run(["pipeline", "--control", control, "--experiment",
                     empty, "--quiet"]) == main.EXIT_DATA


def test_exit_codes():
    assert main.run([]) == main.EXIT_USAGE
    assert main.run(["nonsense"]) == main.EXIT_USAGE
    # coefficients are required
    assert main.run(["ci", "--y1", "10", "--method", "naive"]) == \
        main.EXIT_USAGE
    assert main.run(["fit-macl", "--input", "/nonexistent/file.csv",
                     "--quiet"]) == main.EXIT_DATA
    bad = write_text("id,y1,y2\na,10,abc\n")
    assert main.run(["fit-macl", "--input", bad, "--quiet"]) == \
        main.EXIT_DATA
    path = setup_pairs(n=200, seed=1)
    assert main.run(["fit-macl", "--input", path, "--init", "0,0",
                     "--max-iter", "1", "--quiet"]) == main.EXIT_NUMERICAL


def test_records_round_trip():
    recs = [{"id": "1234", "method": "True", "note": "nan", "lo": 0.1,
             "hi": 2.5, "n": 3, "flag": True, "theta": [4.84, -0.927],
             "y2": None, "tag": "[x", "empty": ""},
            {"id": "b", "method": "naive", "note": " 12", "lo": -1.5,
             "hi": 3., "n": 0, "flag": False, "theta": [5., -1.],
             "y2": 11.89, "tag": '"q"', "empty": "text"}]
    for fmt in records.available_formats:
        back = records.parse_records(records.emit_records(recs, fmt), fmt)
        assert records.records_equal(back, recs)
        assert back[0]["id"] == "1234"
        assert back[0]["method"] == "True"


def test_records_numpy_values():
    recs = [{"id": "a", "hi": np.float64(2.5), "flag": np.bool_(False),
             "theta": np.array([4.84, -0.927]), "mu": np.nan}]
    for fmt in records.available_formats:
        back = records.parse_records(records.emit_records(recs, fmt), fmt)
        assert records.records_equal(back, [{"id": "a", "hi": 2.5,
                                             "flag": False,
                                             "theta": [4.84, -0.927],
                                             "mu": np.nan}])
        assert back[0]["flag"] is False
    # types are compared as well
    assert not records.records_equal([{"id": "1"}], [{"id": 1}])
    assert not records.records_equal([{"n": 1}], [{"n": True}])


if __name__ == "__main__":
    # Run all tests
    loc = locals()
    for key in list(loc.keys()):
        if key.startswith("test_") and hasattr(loc[key], "__call__"):
            loc[key]()
