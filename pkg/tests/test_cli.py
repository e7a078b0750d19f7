import json
import math
import subprocess
import sys

import numpy as np
import pytest

from frft_stoch import io
from frft_stoch.cli import ExperimentConfig, main
from frft_stoch.errors import ValidationError
from frft_stoch.frfs import FrfsConfig, frfs_basis
from frft_stoch.frft_kernel import TimeGrid
from frft_stoch.processes import Ensemble

WHITE = {"model": {"kind": "WhiteProperComplex"}, "grid": {"start": 0, "step": 1, "count": 64},
         "order": 0.5, "transform": "DFRFT", "M": 1000, "seed": 7}


def write_config(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def run(*args):
    return main([str(a) for a in args])


def test_gen_shape_and_determinism(tmp_path):
    cfg = write_config(tmp_path, WHITE)
    assert run("gen", "--config", cfg, "--out", tmp_path / "a") == 0
    assert run("gen", "--config", cfg, "--out", tmp_path / "b") == 0
    a = (tmp_path / "a" / "ensemble.csv").read_bytes()
    assert a == (tmp_path / "b" / "ensemble.csv").read_bytes()
    assert len(a.decode().splitlines()) == 64000 + 1
    man = json.loads((tmp_path / "a" / "ensemble.json").read_text())
    assert man["seed"] == 7 and man["config"]["seed"] == 7


def test_flags_override_config(tmp_path):
    cfg = write_config(tmp_path, WHITE)
    assert run("gen", "--config", cfg, "--out", tmp_path, "--seed", 99, "-M", 3) == 0
    man = json.loads((tmp_path / "ensemble.json").read_text())
    assert man["seed"] == 99 and man["M"] == 3


def test_zero_realizations_is_validation_error(tmp_path):
    cfg = write_config(tmp_path, dict(WHITE, M=0))
    assert run("gen", "--config", cfg, "--out", tmp_path) == 2


def test_exit_codes(tmp_path):
    cfg = write_config(tmp_path, WHITE)
    assert run("theory", "--config", cfg, "--out", tmp_path, "--order", 2.0) == 3
    assert run("gen", "--config", cfg, "--out", "/proc/forbidden") == 4
    assert run("gen", "--config", write_config(tmp_path, {"grid": WHITE["grid"]}, "bad.json")) == 2
    (tmp_path / "broken.json").write_text("{")
    assert run("gen", "--config", tmp_path / "broken.json") == 2
    assert run("gen", "--config", write_config(tmp_path, dict(WHITE, extra=1), "x.json")) == 2


def test_identity_transform_is_exact(tmp_path):
    cfg = write_config(tmp_path, dict(WHITE, order=0.0, M=20))
    assert run("gen", "--config", cfg, "--out", tmp_path) == 0
    assert run("transform", "--config", cfg, "--out", tmp_path) == 0
    assert (tmp_path / "ensemble.csv").read_bytes() == (tmp_path / "transformed.csv").read_bytes()
    man = json.loads((tmp_path / "transformed.json").read_text())
    assert man["transform"] == {"a": 0.0, "kind": "DFRFT"}


def _write_ensemble(tmp_path, grid, values):
    return io.write_ensemble(tmp_path / "ensemble", Ensemble(grid, np.atleast_2d(values)))


def test_dft_of_impulse(tmp_path):
    n = 16
    grid = TimeGrid(0, 1, n)
    e0 = np.zeros(n, complex)
    e0[0] = 1
    path = _write_ensemble(tmp_path, grid, e0)
    cfg = write_config(tmp_path, dict(WHITE, grid=grid.to_dict(), order=1.0))
    assert run("transform", "--config", cfg, "--out", tmp_path, "--ensemble", path) == 0
    out, _ = io.read_ensemble(tmp_path / "transformed.json")
    assert np.max(np.abs(out.realizations - 1 / math.sqrt(n))) < 1e-11


def test_frfs_unit_coefficient(tmp_path):
    grid = TimeGrid.symmetric(4, 1 / 64)
    conf = FrfsConfig(0.5, 8.0, -5, 5)
    path = _write_ensemble(tmp_path, grid, frfs_basis(conf, 3, grid.points))
    cfg = write_config(tmp_path, dict(WHITE, grid=grid.to_dict(), transform="FRFS",
                                      frfs={"n_min": -5, "n_max": 5}))
    assert run("transform", "--config", cfg, "--out", tmp_path, "--ensemble", path) == 0
    idx, vals = io.read_coefficients(tmp_path / "coefficients.csv")
    assert list(idx) == list(range(-5, 6))
    target = (idx == 3).astype(float)
    assert np.max(np.abs(vals - target)) < 1e-3


def test_estimate_writes_report(tmp_path):
    cfg = write_config(tmp_path, dict(WHITE, M=300))
    for cmd in ("gen", "transform", "estimate"):
        assert run(cmd, "--config", cfg, "--out", tmp_path) == 0
    rep = json.loads((tmp_path / "estimate.json").read_text())
    assert rep["stationarity"]["verdict"] == "Stationary"
    for name in ("mean.csv", "acf.csv", "acf.json", "pacf.csv"):
        assert (tmp_path / name).exists()


def test_verify_proper_white(tmp_path):
    cfg = write_config(tmp_path, dict(WHITE, M=2000))
    assert run("verify", "--config", cfg, "--out", tmp_path) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["verdict"] == "Stationary"
    assert rep["delta_check"]["passed"]
    assert rep["theory_vs_mc"]["acf"]["max_z"] < 5


def test_verify_real_white(tmp_path):
    cfg = write_config(tmp_path, dict(WHITE, M=2000, model={"kind": "WhiteReal"}))
    assert run("verify", "--config", cfg, "--out", tmp_path) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["pseudo_nonzero"]
    assert rep["delta_check"]["passed"]
    assert rep["theory_vs_mc"]["pacf"]["max_z"] < 5


def test_verify_colored(tmp_path):
    cfg = write_config(tmp_path, {"model": {"kind": "ColoredGaussian", "acf": "exp"},
                                  "grid": {"half_width": 12, "step": 0.1},
                                  "u_grid": {"half_width": 3, "step": 0.25},
                                  "order": 0.5, "transform": "FRFT_QUAD", "M": 1000, "seed": 3})
    assert run("verify", "--config", cfg, "--out", tmp_path) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["verdict"] == "NonstationaryACF"
    assert len(rep["overlay"]) == 25
    assert rep["oracle_discrepancy"]["closed_vs_oracle_max_rel"] < 0.02


def test_theory_tables(tmp_path):
    cfg = write_config(tmp_path, dict(WHITE, model={"kind": "WhiteProperComplex", "mean": [1, 0]}))
    assert run("theory", "--config", cfg, "--out", tmp_path) == 0
    data = np.loadtxt(tmp_path / "theory_mean.csv", delimiter=",", skiprows=1)
    u = data[:, 0]
    assert u[0] == -4 and u[-1] == 4
    mu = data[:, 1] + 1j * data[:, 2]
    assert np.allclose(mu, np.sqrt(1 + 1j) * np.exp(-0.5j * u * u), atol=1e-11)
    delta = json.loads((tmp_path / "theory_acf_delta.json").read_text())
    assert delta["type"] == "delta" and delta["weight"] == [1.0, 0.0]


def test_theory_psd_at_fourier_order(tmp_path):
    cfg = write_config(tmp_path, dict(WHITE, order=1.0, model={"kind": "ColoredGaussian", "acf": "gauss"}))
    assert run("theory", "--config", cfg, "--out", tmp_path) == 0
    data = np.loadtxt(tmp_path / "theory_psd.csv", delimiter=",", skiprows=1)
    # FT of exp(-t^2/2) divided by sqrt(2 pi)
    assert np.max(np.abs(data[:, 1] + 1j * data[:, 2] - np.exp(-data[:, 0] ** 2 / 2))) < 1e-8
    doc = json.loads((tmp_path / "theory.json").read_text())
    assert "acf" in doc["skipped"]


def test_config_validation():
    with pytest.raises(ValidationError):
        ExperimentConfig.from_dict(dict(WHITE, transform="WAVELET"))
    with pytest.raises(ValidationError):
        ExperimentConfig.from_dict(dict(WHITE, seed=-3))
    with pytest.raises(ValidationError):
        ExperimentConfig.from_dict(dict(WHITE, grid={"step": 1}))


def test_module_entry_point(tmp_path):
    cfg = write_config(tmp_path, dict(WHITE, M=5))
    out = subprocess.run([sys.executable, "-m", "frft_stoch", "gen", "--config", cfg, "--out", str(tmp_path)],
                         capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
    assert json.loads(out.stdout)["ensemble"].endswith("ensemble.json")
