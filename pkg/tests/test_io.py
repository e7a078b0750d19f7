import json

import numpy as np
import pytest

from frft_stoch import io
from frft_stoch.dfrft import build_dfrft
from frft_stoch.errors import ValidationError
from frft_stoch.estimators import estimate_autocorr
from frft_stoch.frft_kernel import SampledSignal, TimeGrid
from frft_stoch.processes import StationaryModel, generate


def test_signal_round_trip(tmp_path):
    g = TimeGrid.symmetric(1, 0.25)
    sig = SampledSignal(g, np.exp(1j * g.points))
    io.write_signal(tmp_path / "s.csv", sig)
    back = io.read_signal(tmp_path / "s.csv")
    assert back.grid.count == g.count
    assert np.max(np.abs(back.values - sig.values)) < 1e-11
    assert (tmp_path / "s.csv").read_text().splitlines()[0] == "t,re,im"


def test_twelve_digits(tmp_path):
    g = TimeGrid(0, 1, 2)
    io.write_signal(tmp_path / "s.csv", SampledSignal(g, [1 / 3, 0]))
    assert "0.333333333333," in (tmp_path / "s.csv").read_text()


def test_ensemble_round_trip(tmp_path):
    model = StationaryModel.white_proper()
    ens = generate(model, TimeGrid(0, 1, 4), 3, seed=5)
    path = io.write_ensemble(tmp_path / "e", ens, {"note": "x"})
    back, man = io.read_ensemble(path)
    assert man["seed"] == 5 and man["M"] == 3 and man["note"] == "x"
    assert back.model == model
    assert np.max(np.abs(back.realizations - ens.realizations)) < 1e-10


def test_surface_round_trip(tmp_path, rng):
    z = rng.standard_normal((10, 3)) + 0j
    s = estimate_autocorr(z)
    io.write_surface(tmp_path / "acf.csv", s)
    back = io.read_surface(tmp_path / "acf.csv")
    assert np.max(np.abs(back.values - s.values)) < 1e-10
    assert back.kind == s.kind
    assert (tmp_path / "acf.csv").read_text().startswith("j,k,re,im,stderr\n")


def test_matrix_round_trip(tmp_path):
    f = build_dfrft(5, 0.4)
    io.write_matrix(tmp_path / "m", f)
    man, mat = io.read_matrix(tmp_path / "m.json")
    assert man == {"n": 5, "a": 0.4, "format": "csv", "data": "m.csv"}
    assert np.max(np.abs(mat - f.matrix)) < 1e-11
    assert np.array_equal(io.rebuild_matrix(tmp_path / "m.json").matrix, f.matrix)


def test_header_checked(tmp_path):
    (tmp_path / "bad.csv").write_text("x,y,z\n1,2,3\n")
    with pytest.raises(ValidationError):
        io.read_signal(tmp_path / "bad.csv")


def test_atomic_write_leaves_no_temp_on_error(tmp_path):
    with pytest.raises(RuntimeError):
        with io.atomic_open(tmp_path / "x.txt") as fh:
            fh.write("partial")
            raise RuntimeError
    assert list(tmp_path.iterdir()) == []


def test_json_complex(tmp_path):
    io.write_json(tmp_path / "r.json", {"z": 1 + 2j, "a": np.arange(2), "f": np.float64(0.1)})
    assert json.loads((tmp_path / "r.json").read_text()) == {"a": [0, 1], "f": 0.1, "z": [1.0, 2.0]}
