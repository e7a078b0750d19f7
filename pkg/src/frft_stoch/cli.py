"""``frft-stoch`` command-line front end.

Pipelines are driven by a single JSON config; command-line flags override the
matching config fields (flag > config file > built-in default). Every manifest
embeds the resolved config and seed, so any run can be repeated exactly.

Exit codes: 0 success, 2 validation error, 3 numerical error, 4 I/O error.
"""

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, io
from .dfrft import apply, build_dfrft
from .errors import FrftError, NumericalError, SingularAngle, ValidationError
from .estimators import (
    DEFAULT_TOL_SIGMA,
    estimate_autocorr,
    estimate_mean,
    estimate_pseudo_autocorr,
    stationarity_verdict,
)
from .frfs import FrfsCoefficients, FrfsConfig, dtfrft, frfs_analyze
from .frft_kernel import TimeGrid, as_order, frft_points, plateau_window
from .processes import StationaryModel, generate, model_acf
from .theory import (
    DeltaAcf,
    fractional_psd,
    numeric_output_autocorr,
    predicted_autocorr,
    predicted_mean,
    pseudo_autocorr_report,
    theory_surface,
)

TRANSFORMS = ("DFRFT", "FRFT_QUAD", "FRFS", "DTFRFT")
EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4
_CONFIG_KEYS = {"model", "grid", "order", "transform", "M", "seed", "out", "tol_sigma",
                "u_grid", "window", "frfs", "theory"}


@dataclass
class ExperimentConfig:
    """Resolved experiment description.

    ``grid`` and ``u_grid`` accept ``{start, step, count}`` or
    ``{half_width, step}``. ``u_grid`` (FRFT_QUAD output points) defaults to
    the input grid. ``window`` is ``{plateau, taper}`` applied before the
    quadrature. ``frfs`` holds ``{n_min, n_max, interval_width}`` overrides.
    ``theory`` holds ``{u_half_width, u_step}`` for the theory tables.
    """

    model: StationaryModel
    grid: TimeGrid
    order: float = 0.5
    transform: str = "DFRFT"
    M: int = 1000
    seed: int = None
    out: str = "out"
    tol_sigma: float = DEFAULT_TOL_SIGMA
    u_grid: TimeGrid = None
    window: dict = None
    frfs: dict = field(default_factory=dict)
    theory: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.transform not in TRANSFORMS:
            raise ValidationError(f"transform must be one of {TRANSFORMS}, got {self.transform!r}")
        if not math.isfinite(self.order):
            raise ValidationError(f"order must be finite, got {self.order}")
        if int(self.M) != self.M or self.M < 1:
            raise ValidationError(f"M must be a positive integer, got {self.M}")
        self.M = int(self.M)
        if self.seed is not None:
            if int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
                raise ValidationError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
            self.seed = int(self.seed)
        if not self.tol_sigma > 0:
            raise ValidationError(f"tol_sigma must be positive, got {self.tol_sigma}")
        if self.window is not None and set(self.window) != {"plateau", "taper"}:
            raise ValidationError("window needs exactly 'plateau' and 'taper'")

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - _CONFIG_KEYS
        if unknown:
            raise ValidationError(f"unknown config fields: {sorted(unknown)}")
        if "model" not in d or "grid" not in d:
            raise ValidationError("config needs 'model' and 'grid'")
        kw = dict(d)
        kw["model"] = StationaryModel.from_dict(d["model"])
        kw["grid"] = parse_grid(d["grid"])
        if d.get("u_grid") is not None:
            kw["u_grid"] = parse_grid(d["u_grid"])
        return cls(**kw)

    def to_dict(self):
        d = asdict(self)
        d["model"] = self.model.to_dict()
        d["grid"] = self.grid.to_dict()
        d["u_grid"] = self.u_grid.to_dict() if self.u_grid is not None else None
        return d

    @property
    def out_grid(self):
        return self.u_grid if self.u_grid is not None else self.grid

    def frfs_config(self):
        width = self.frfs.get("interval_width", self.grid.stop - self.grid.start)
        order = as_order(self.order) + (1.0 if self.transform == "DTFRFT" else 0.0)
        base = FrfsConfig.for_samples(order, width, self.grid.count)
        return FrfsConfig(order, width, self.frfs.get("n_min", base.n_min), self.frfs.get("n_max", base.n_max))


def parse_grid(d):
    try:
        if "half_width" in d:
            return TimeGrid.symmetric(float(d["half_width"]), float(d["step"]))
        return TimeGrid(float(d["start"]), float(d["step"]), int(d["count"]))
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"bad grid spec {d!r}: needs start/step/count or half_width/step") from exc


def load_config(args):
    """Config file (if any) with command-line overrides applied."""
    raw = {}
    if args.config:
        try:
            raw = io.read_json(args.config)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{args.config}: invalid JSON ({exc})") from exc
    overrides = {"seed": args.seed, "order": args.order, "out": args.out, "tol_sigma": args.tol_sigma,
                 "M": getattr(args, "realizations", None), "transform": getattr(args, "transform", None)}
    raw.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.from_dict(raw)


# -- transforms ---------------------------------------------------------------

def transform_values(cfg, z, grid):
    """Apply the configured transform to every row of ``z``; returns ``(values, out_grid)``."""
    kind = cfg.transform
    if kind == "DFRFT":
        return apply(build_dfrft(grid.count, cfg.order), z), grid
    if kind == "FRFT_QUAD":
        if cfg.window is not None:
            z = z * plateau_window(grid, cfg.window["plateau"], cfg.window["taper"])
        out = cfg.out_grid
        return frft_points(z, grid, cfg.order, out.points), out
    fc = cfg.frfs_config()
    if kind == "FRFS":
        coeffs = frfs_analyze((grid, z), fc)
    else:
        coeffs = dtfrft((grid, z), cfg.order, (fc.n_min, fc.n_max), fc.interval_width)
    return coeffs.values, TimeGrid(float(fc.n_min), 1.0, fc.indices.size)


def transform_matrix(cfg, grid):
    """The transform as a matrix ``T`` acting on row vectors: ``Z = z @ T``."""
    eye = np.eye(grid.count, dtype=np.complex128)
    return transform_values(cfg, eye, grid)[0]


def input_statistics(model, grid):
    """Per-sample mean, covariance ``E[z z^H]`` and pseudo-covariance of the input."""
    n = grid.count
    mean = np.full(n, model.mean, dtype=np.complex128)
    lags = grid.step * (np.arange(n)[:, None] - np.arange(n)[None, :])
    if model.is_white:
        cov = (model.delta_weight / grid.step) * np.eye(n, dtype=np.complex128)
    else:
        cov = np.asarray(model_acf(model, lags), dtype=np.complex128)
    return mean, cov, model.pseudo_param * cov


# -- commands -----------------------------------------------------------------

def cmd_gen(cfg):
    out = Path(cfg.out)
    ens = generate(cfg.model, cfg.grid, cfg.M, cfg.seed)
    path = io.write_ensemble(out / "ensemble", ens, {"config": cfg.to_dict()})
    return {"ensemble": str(path)}


def cmd_transform(cfg, ensemble_path=None):
    out = Path(cfg.out)
    ens, man = io.read_ensemble(ensemble_path or out / "ensemble.json")
    values, out_grid = transform_values(cfg, ens.realizations, ens.grid)
    result = ens.with_values(values, out_grid)
    extra = {"config": cfg.to_dict(), "transform": {"kind": cfg.transform, "a": cfg.order},
             "input_grid": ens.grid.to_dict(), "source": man.get("data")}
    path = io.write_ensemble(out / "transformed", result, extra)
    files = {"transformed": str(path)}
    if cfg.transform in ("FRFS", "DTFRFT"):
        fc = cfg.frfs_config()
        vals = values[0] if values.shape[0] == 1 else values
        io.write_coefficients(out / "coefficients.csv", FrfsCoefficients(fc, vals))
        files["coefficients"] = str(out / "coefficients.csv")
    return files


def _write_mean(path, mean):
    rows = zip(range(mean.u_grid.count), mean.u_grid.points, mean.values, mean.stderr)
    io._write_rows(path, ("j", "u", "re", "im", "stderr"),
                   ((j, io.fmt(u), io.fmt(v.real), io.fmt(v.imag), io.fmt(s)) for j, u, v, s in rows))


def _estimate(cfg, ens, out):
    mean = estimate_mean(ens)
    acf = estimate_autocorr(ens)
    pacf = estimate_pseudo_autocorr(ens)
    report = stationarity_verdict(mean, acf, pacf, cfg.model.is_complex, cfg.tol_sigma)
    _write_mean(out / "mean.csv", mean)
    io.write_surface(out / "acf.csv", acf)
    io.write_surface(out / "pacf.csv", pacf)
    return mean, acf, pacf, report


def cmd_estimate(cfg, ensemble_path=None):
    out = Path(cfg.out)
    ens, man = io.read_ensemble(ensemble_path or out / "transformed.json")
    *_, report = _estimate(cfg, ens, out)
    doc = {"config": cfg.to_dict(), "seed": man.get("seed"), "stationarity": report.to_dict()}
    io.write_json(out / "estimate.json", doc)
    return doc


def _theory_u_grid(cfg):
    th = cfg.theory
    return TimeGrid.symmetric(float(th.get("u_half_width", 4.0)), float(th.get("u_step", 0.25)))


def cmd_theory(cfg):
    """Closed-form tables: output mean, autocorrelation surface and fractional PSD."""
    out = Path(cfg.out)
    u_grid = _theory_u_grid(cfg)
    u = u_grid.points
    model = cfg.model
    doc = {"config": cfg.to_dict(), "files": {}, "skipped": {}}

    try:
        mu = predicted_mean(model.mean, cfg.order, u)
        io._write_rows(out / "theory_mean.csv", ("u", "re", "im"),
                       ((io.fmt(x), io.fmt(v.real), io.fmt(v.imag)) for x, v in zip(u, mu)))
        doc["files"]["mean"] = "theory_mean.csv"
    except SingularAngle as exc:
        doc["skipped"]["mean"] = str(exc)

    acf = DeltaAcf(model.delta_weight) if model.is_white else model.acf_fn()
    try:
        surf = theory_surface(acf, cfg.order, u_grid)
        if model.is_white:
            io.write_json(out / "theory_acf_delta.json", surf.to_dict())
            doc["files"]["acf"] = "theory_acf_delta.json"
        else:
            io.write_surface(out / "theory_acf.csv", surf)
            doc["files"]["acf"] = "theory_acf.csv"
    except SingularAngle as exc:
        doc["skipped"]["acf"] = str(exc)

    psd = fractional_psd(acf, cfg.order, u_grid)
    io._write_rows(out / "theory_psd.csv", ("u", "re", "im"),
                   ((io.fmt(x), io.fmt(v.real), io.fmt(v.imag)) for x, v in zip(u, psd.values)))
    doc["files"]["psd"] = "theory_psd.csv"

    if not model.is_white and model.pseudo_param != 0:
        lattice = np.linspace(-1.0, 1.0, 5)
        rep = pseudo_autocorr_report(model.pacf_fn(), cfg.order, lattice)
        doc["pseudo_autocorr"] = {k: v for k, v in rep.items() if k not in ("oracle", "closed_form", "reduced")}
    io.write_json(out / "theory.json", doc)
    return doc


def _zscore_table(mc, se, pred):
    diff = np.abs(mc - pred)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(diff == 0, 0.0, diff / se)
    return {"max_abs_diff": float(diff.max()), "max_z": float(np.max(z)),
            "frac_over_4sigma": float(np.mean(z > 4.0))}


def _interior_indices(grid, count=5, fraction=0.6):
    lo = int(round(0.5 * (1 - fraction) * (grid.count - 1)))
    return np.unique(np.linspace(lo, grid.count - 1 - lo, count).round().astype(int))


def cmd_verify(cfg):
    """Full pipeline: generate, transform, estimate, then compare against theory."""
    out = Path(cfg.out)
    ens = generate(cfg.model, cfg.grid, cfg.M, cfg.seed)
    io.write_ensemble(out / "ensemble", ens, {"config": cfg.to_dict()})
    values, out_grid = transform_values(cfg, ens.realizations, ens.grid)
    tens = ens.with_values(values, out_grid)
    io.write_ensemble(out / "transformed", tens, {"config": cfg.to_dict(),
                                                  "transform": {"kind": cfg.transform, "a": cfg.order}})
    mean, acf, pacf, report = _estimate(cfg, tens, out)

    # exact second-order image of the sampled input under the discretized transform
    tmat = transform_matrix(cfg, cfg.grid)
    mu_in, cov_in, pcov_in = input_statistics(cfg.model, cfg.grid)
    pred_mean = mu_in @ tmat
    pred_acf = tmat.T @ cov_in @ tmat.conj() + np.outer(pred_mean, pred_mean.conj())
    pred_pacf = tmat.T @ pcov_in @ tmat + np.outer(pred_mean, pred_mean)
    tables = {
        "mean": _zscore_table(mean.values, mean.stderr, pred_mean),
        "acf": _zscore_table(acf.values, acf.stderr, pred_acf),
        "pacf": _zscore_table(pacf.values, pacf.stderr, pred_pacf),
    }
    doc = {
        "config": cfg.to_dict(),
        "seed": cfg.seed,
        "verdict": report.verdict.value,
        "stationarity": report.to_dict(),
        "theory_vs_mc": tables,
        "pseudo_nonzero": bool(pacf.values.size and report.pseudo_max_sigma > cfg.tol_sigma),
        "oracle": {},
    }

    if cfg.model.is_white and cfg.transform == "DFRFT":
        var = cfg.model.delta_weight / cfg.grid.step
        diag = np.real(np.diag(acf.values))
        off = acf.values - np.diag(np.diag(acf.values))
        bound = 5.0 / math.sqrt(cfg.M) * var
        zdiag = float(np.max(np.abs(diag - var) / np.diag(acf.stderr)))
        doc["delta_check"] = {"diag_max_z": zdiag, "offdiag_max": float(np.abs(off).max()),
                              "offdiag_bound": bound,
                              "passed": bool(zdiag <= cfg.tol_sigma and np.abs(off).max() < bound)}

    if cfg.transform == "FRFT_QUAD" and not cfg.model.is_white and cfg.window is None:
        doc.update(_closed_form_overlay(cfg, acf))
    io.write_json(out / "report.json", doc)
    return doc


def _closed_form_overlay(cfg, acf):
    """Closed-form output autocorrelation against Monte Carlo and the quadrature oracle."""
    idx = _interior_indices(acf.u_grid)
    u = acf.u_grid.points[idx]
    r = cfg.model.acf_fn()
    try:
        closed = predicted_autocorr(r, cfg.order, u[:, None], u[None, :])
    except SingularAngle as exc:
        return {"overlay_skipped": str(exc)}
    oracle = numeric_output_autocorr(r, cfg.order, u, u)
    mc = acf.values[np.ix_(idx, idx)]
    se = acf.stderr[np.ix_(idx, idx)]
    rows = []
    for i, u1 in enumerate(u):
        for j, u2 in enumerate(u):
            rows.append({"u1": u1, "u2": u2, "mc": mc[i, j], "stderr": se[i, j], "closed_form": closed[i, j],
                         "oracle": oracle[i, j], "z": abs(mc[i, j] - closed[i, j]) / se[i, j]})
    rel = np.abs(closed - oracle) / np.abs(oracle)
    return {"overlay": rows,
            "oracle_discrepancy": {"closed_vs_oracle_max_rel": float(rel.max()),
                                   "mc_vs_closed_max_z": float(max(row["z"] for row in rows))}}


# -- entry point ----------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="frft-stoch", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON experiment config")
    common.add_argument("--seed", type=int, metavar="U64", help="RNG seed (overrides config)")
    common.add_argument("--order", type=float, metavar="FLOAT", help="transform order a (overrides config)")
    common.add_argument("--out", metavar="DIR", help="output directory (overrides config)")
    common.add_argument("--tol-sigma", type=float, metavar="FLOAT", help="verdict threshold in standard errors")
    common.add_argument("--realizations", "-M", type=int, metavar="M", help="ensemble size (overrides config)")
    common.add_argument("--transform", choices=TRANSFORMS, help="transform kind (overrides config)")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("gen", parents=[common], help="generate an input ensemble")
    for name, helptext in (("transform", "transform an ensemble"), ("estimate", "estimate output statistics")):
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("--ensemble", metavar="PATH", help="ensemble manifest (default: inside --out)")
    sub.add_parser("theory", parents=[common], help="write closed-form tables")
    sub.add_parser("verify", parents=[common], help="run the full pipeline and write a report")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        if args.command == "gen":
            result = cmd_gen(cfg)
        elif args.command == "transform":
            result = cmd_transform(cfg, args.ensemble)
        elif args.command == "estimate":
            result = cmd_estimate(cfg, args.ensemble)["stationarity"]
        elif args.command == "theory":
            result = cmd_theory(cfg)["files"]
        else:
            doc = cmd_verify(cfg)
            result = {"verdict": doc["verdict"], "report": str(Path(cfg.out) / "report.json")}
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except FrftError as exc:  # pragma: no cover - every subclass is handled above
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    print(json.dumps(io._to_jsonable(result), sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
