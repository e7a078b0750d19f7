"""CSV/JSON interchange formats. Floats are written with 12 significant digits.

* signal:        ``t,re,im``
* coefficients:  ``n,re,im``
* ensemble:      JSON manifest + ``m,n,re,im``
* surface:       ``j,k,re,im,stderr`` (+ optional JSON manifest)
* DFRFT matrix:  JSON manifest ``{n, a, format: "csv"}`` + CSV rows of
  adjacent ``re,im`` column pairs
"""

import contextlib
import csv
import io as _io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .dfrft import DfrftMatrix, build_dfrft
from .errors import ValidationError
from .estimators import CorrelationSurface, SurfaceKind, SurfaceSource
from .frfs import FrfsCoefficients
from .frft_kernel import SampledSignal, TimeGrid
from .processes import Ensemble, StationaryModel

FLOAT_FMT = "%.12g"


def fmt(x):
    return FLOAT_FMT % x


@contextlib.contextmanager
def atomic_open(path, mode="w"):
    """Write to a temp file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode, newline="" if "b" not in mode else None) as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


def _to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(fmt(obj.real)), float(fmt(obj.imag))]
    if isinstance(obj, (np.floating, float)):
        return float(fmt(obj)) if np.isfinite(obj) else str(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, obj):
    with atomic_open(path) as fh:
        json.dump(_to_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def _write_rows(path, header, rows):
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(header)
    w.writerows(rows)
    with atomic_open(path) as fh:
        fh.write(buf.getvalue())


def _read_table(path, header):
    data = np.loadtxt(path, delimiter=",", skiprows=1 if header else 0, ndmin=2)
    if header:
        with open(path) as fh:
            got = fh.readline().strip().split(",")
        if got != list(header):
            raise ValidationError(f"{path}: expected header {','.join(header)}, got {','.join(got)}")
    return data


# -- signals ---------------------------------------------------------------

def write_signal(path, signal):
    t = signal.grid.points
    rows = ((fmt(ti), fmt(v.real), fmt(v.imag)) for ti, v in zip(t, signal.values))
    _write_rows(path, ("t", "re", "im"), rows)


def read_signal(path):
    data = _read_table(path, ("t", "re", "im"))
    grid = TimeGrid.from_points(data[:, 0])
    return SampledSignal(grid, data[:, 1] + 1j * data[:, 2])


# -- FRFS coefficients -----------------------------------------------------

def write_coefficients(path, coeffs):
    vals = np.atleast_2d(coeffs.values)
    if vals.shape[0] == 1:
        rows = ((int(n), fmt(v.real), fmt(v.imag)) for n, v in zip(coeffs.config.indices, vals[0]))
        _write_rows(path, ("n", "re", "im"), rows)
    else:
        rows = ((m, int(n), fmt(v.real), fmt(v.imag))
                for m, row in enumerate(vals) for n, v in zip(coeffs.config.indices, row))
        _write_rows(path, ("m", "n", "re", "im"), rows)


def read_coefficients(path):
    """Return ``(indices, values)``; values are 2-D when the file has an ``m`` column."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    if header == ["n", "re", "im"]:
        data = _read_table(path, ("n", "re", "im"))
        return data[:, 0].astype(int), data[:, 1] + 1j * data[:, 2]
    data = _read_table(path, ("m", "n", "re", "im"))
    m = int(data[:, 0].max()) + 1
    idx = np.unique(data[:, 1].astype(int))
    vals = (data[:, 2] + 1j * data[:, 3]).reshape(m, idx.size)
    return idx, vals


# -- ensembles -------------------------------------------------------------

def write_ensemble(stem, ensemble, extra=None):
    """Write ``<stem>.json`` and ``<stem>.csv``; returns the manifest path."""
    stem = Path(stem)
    csv_path = stem.with_suffix(".csv")
    z = ensemble.realizations
    rows = ((m, n, fmt(z[m, n].real), fmt(z[m, n].imag)) for m in range(z.shape[0]) for n in range(z.shape[1]))
    _write_rows(csv_path, ("m", "n", "re", "im"), rows)
    manifest = {
        "model": ensemble.model.to_dict() if ensemble.model is not None else None,
        "grid": ensemble.grid.to_dict(),
        "M": int(z.shape[0]),
        "seed": ensemble.seed,
        "data": csv_path.name,
    }
    if extra:
        manifest.update(extra)
    write_json(stem.with_suffix(".json"), manifest)
    return stem.with_suffix(".json")


def read_ensemble(manifest_path):
    manifest_path = Path(manifest_path)
    man = read_json(manifest_path)
    data = _read_table(manifest_path.parent / man["data"], ("m", "n", "re", "im"))
    grid = TimeGrid(**man["grid"])
    m = int(man["M"])
    z = (data[:, 2] + 1j * data[:, 3]).reshape(m, grid.count)
    model = StationaryModel.from_dict(man["model"]) if man.get("model") else None
    return Ensemble(grid, z, model, man.get("seed")), man


# -- surfaces --------------------------------------------------------------

def write_surface(path, surface):
    v = surface.values
    se = surface.stderr
    n = v.shape[0]
    rows = ((j, k, fmt(v[j, k].real), fmt(v[j, k].imag), fmt(se[j, k])) for j in range(n) for k in range(n))
    _write_rows(path, ("j", "k", "re", "im", "stderr"), rows)
    write_json(Path(path).with_suffix(".json"), {
        "u_grid": surface.u_grid.to_dict(),
        "kind": surface.kind.value,
        "source": surface.source.value,
        "data": Path(path).name,
    })


def read_surface(path):
    path = Path(path)
    man = read_json(path.with_suffix(".json"))
    data = _read_table(path, ("j", "k", "re", "im", "stderr"))
    grid = TimeGrid(**man["u_grid"])
    n = grid.count
    vals = np.zeros((n, n), dtype=np.complex128)
    se = np.zeros((n, n))
    j = data[:, 0].astype(int)
    k = data[:, 1].astype(int)
    vals[j, k] = data[:, 2] + 1j * data[:, 3]
    se[j, k] = data[:, 4]
    return CorrelationSurface(grid, vals, se, SurfaceKind(man["kind"]), SurfaceSource(man["source"]))


# -- DFRFT matrices --------------------------------------------------------

def write_matrix(stem, f):
    stem = Path(stem)
    csv_path = stem.with_suffix(".csv")
    m = f.matrix
    rows = ([fmt(x) for z in row for x in (z.real, z.imag)] for row in m)
    _write_rows(csv_path, None, rows)
    write_json(stem.with_suffix(".json"), {"n": f.n, "a": f.order.a, "format": "csv", "data": csv_path.name})


def read_matrix(manifest_path):
    """Return ``(manifest, matrix)`` as stored (not rebuilt)."""
    manifest_path = Path(manifest_path)
    man = read_json(manifest_path)
    data = _read_table(manifest_path.parent / man["data"], None)
    return man, data[:, 0::2] + 1j * data[:, 1::2]


def rebuild_matrix(manifest_path) -> DfrftMatrix:
    man = read_json(manifest_path)
    return build_dfrft(int(man["n"]), float(man["a"]))


def coefficients_from_values(config, values):
    return FrfsCoefficients(config, values)
