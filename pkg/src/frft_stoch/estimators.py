"""Monte Carlo output statistics and sigma-threshold stationarity verdicts.

The verdict is a heuristic of this package, not a formal test: an entry is
"consistent" when it lies within ``tol_sigma`` Monte Carlo standard errors
of the reference it is compared against.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import GridMismatch, TooFewRealizations
from .frft_kernel import TimeGrid

__all__ = [
    "SurfaceKind",
    "SurfaceSource",
    "Verdict",
    "MeanEstimate",
    "CorrelationSurface",
    "DeltaSurface",
    "StationarityReport",
    "estimate_mean",
    "estimate_autocorr",
    "estimate_pseudo_autocorr",
    "toeplitz_deviation",
    "stationarity_verdict",
]

DEFAULT_TOL_SIGMA = 4.0


class SurfaceKind(enum.Enum):
    AUTO = "Auto"
    PSEUDO = "Pseudo"


class SurfaceSource(enum.Enum):
    MONTE_CARLO = "MonteCarlo"
    THEORY = "Theory"


class Verdict(enum.Enum):
    STATIONARY = "Stationary"
    NONSTATIONARY_MEAN = "NonstationaryMean"
    NONSTATIONARY_ACF = "NonstationaryACF"
    IMPROPER_OUTPUT = "ImproperOutput"


@dataclass(frozen=True)
class MeanEstimate:
    u_grid: TimeGrid
    values: np.ndarray = field(repr=False)
    stderr: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class CorrelationSurface:
    """Two-index correlation ``values[j, k] ~ E{Z(u_j) Z(u_k)^(*)}`` on ``u_grid``."""

    u_grid: TimeGrid
    values: np.ndarray = field(repr=False)
    stderr: np.ndarray = field(repr=False)
    kind: SurfaceKind = SurfaceKind.AUTO
    source: SurfaceSource = SurfaceSource.MONTE_CARLO

    def __post_init__(self):
        n = self.u_grid.count
        if np.shape(self.values) != (n, n) or np.shape(self.stderr) != (n, n):
            raise GridMismatch(f"surface arrays must be {n}x{n}")

    def diagonal_means(self):
        """Mean of each diagonal ``k - j = d``, for d = -(n-1)..n-1."""
        n = self.u_grid.count
        return np.array([np.mean(np.diagonal(self.values, d)) for d in range(-(n - 1), n)])


@dataclass(frozen=True)
class DeltaSurface:
    """Analytic surface ``weight * delta(u1 - u2)``.

    On a lattice of spacing ``du`` it samples as ``weight/du`` on the
    diagonal, matching the per-sample variance convention of white noise.
    """

    weight: complex
    kind: SurfaceKind = SurfaceKind.AUTO

    def on_lattice(self, n, spacing):
        return (self.weight / spacing) * np.eye(n, dtype=np.complex128)

    def to_dict(self):
        w = complex(self.weight)
        return {"type": "delta", "kind": self.kind.value, "weight": [w.real, w.imag],
                "expression": "weight * delta(u1 - u2)"}


def _values(ensemble):
    z = getattr(ensemble, "realizations", ensemble)
    z = np.asarray(z, dtype=np.complex128)
    if z.ndim != 2:
        raise GridMismatch("expected an (M, N) array of realizations")
    if z.shape[0] < 2:
        raise TooFewRealizations(f"need at least 2 realizations, got {z.shape[0]}")
    return z


def _grid_of(ensemble, u_grid):
    if u_grid is not None:
        return u_grid
    grid = getattr(ensemble, "grid", None)
    if grid is None:
        n = np.shape(getattr(ensemble, "realizations", ensemble))[1]
        grid = TimeGrid(0.0, 1.0, n)
    return grid


def estimate_mean(ensemble, u_grid=None):
    """Per-index sample mean and its standard error ``std/sqrt(M)``."""
    z = _values(ensemble)
    grid = _grid_of(ensemble, u_grid)
    if grid.count != z.shape[1]:
        raise GridMismatch(f"grid has {grid.count} points, data has {z.shape[1]}")
    m = z.shape[0]
    mean = z.mean(axis=0)
    var = np.sum(np.abs(z - mean) ** 2, axis=0) / (m - 1)
    return MeanEstimate(grid, mean, np.sqrt(var / m))


def _surface(ensemble, u_grid, conjugate):
    z = _values(ensemble)
    grid = _grid_of(ensemble, u_grid)
    if grid.count != z.shape[1]:
        raise GridMismatch(f"grid has {grid.count} points, data has {z.shape[1]}")
    m = z.shape[0]
    first, second = _kernels.product_moments(np.ascontiguousarray(z), conjugate)
    mean = first / m
    # enforce the structural symmetry exactly
    if conjugate:
        mean = 0.5 * (mean + mean.conj().T)
    else:
        mean = 0.5 * (mean + mean.T)
    second = 0.5 * (second + second.T)
    var = np.clip(second - m * np.abs(mean) ** 2, 0.0, None) / (m - 1)
    kind = SurfaceKind.AUTO if conjugate else SurfaceKind.PSEUDO
    return CorrelationSurface(grid, mean, np.sqrt(var / m), kind, SurfaceSource.MONTE_CARLO)


def estimate_autocorr(ensemble, u_grid=None):
    """Sample ``E{Z_j Z_k^*}`` with per-entry standard errors."""
    return _surface(ensemble, u_grid, True)


def estimate_pseudo_autocorr(ensemble, u_grid=None):
    """Sample ``E{Z_j Z_k}`` with per-entry standard errors."""
    return _surface(ensemble, u_grid, False)


def toeplitz_deviation(values, stderr):
    """Largest within-diagonal deviation in units of the diagonal's pooled stderr."""
    n = values.shape[0]
    worst = 0.0
    for d in range(-(n - 1), n):
        v = np.diagonal(values, d)
        if v.size < 2:
            continue
        se = math.sqrt(float(np.mean(np.diagonal(stderr, d) ** 2)))
        dev = float(np.max(np.abs(v - v.mean())))
        if se == 0:
            if dev > 0:
                return math.inf
            continue
        worst = max(worst, dev / se)
    return worst


@dataclass
class StationarityReport:
    mean_constant: bool
    mean_max_deviation: float
    acf_toeplitz: bool
    acf_max_deviation: float
    acf_amplitude_toeplitz: bool
    acf_amplitude_deviation: float
    pseudo_vanishes: bool
    pseudo_max_magnitude: float
    pseudo_max_sigma: float
    verdict: Verdict
    tol_sigma: float
    input_is_complex: bool
    note: str = ("sigma-threshold heuristic: each statistic is compared against tol_sigma "
                 "Monte Carlo standard errors; not a formal hypothesis test")

    def to_dict(self):
        d = dict(self.__dict__)
        d["verdict"] = self.verdict.value
        return d


def stationarity_verdict(mean, acf, pacf, input_is_complex, tol_sigma=DEFAULT_TOL_SIGMA):
    """Operational stationarity check of an output ensemble.

    Deviations are in units of standard errors: the mean against its average
    over ``u``, each correlation diagonal against its own mean (Toeplitz
    structure), and the pseudo-surface against zero.
    """
    n = mean.u_grid.count
    if acf.u_grid != mean.u_grid or pacf.u_grid != mean.u_grid:
        raise GridMismatch("mean, acf and pacf must share a grid")
    if acf.values.shape != (n, n):
        raise GridMismatch("surface size does not match the mean")

    avg = np.mean(mean.values)
    with np.errstate(divide="ignore", invalid="ignore"):
        mdev = np.abs(mean.values - avg) / mean.stderr
    mdev = np.where(np.abs(mean.values - avg) == 0, 0.0, mdev)
    mean_dev = float(np.max(mdev))

    acf_dev = toeplitz_deviation(acf.values, acf.stderr)
    amp_dev = toeplitz_deviation(np.abs(acf.values), acf.stderr)

    mag = np.abs(pacf.values)
    with np.errstate(divide="ignore", invalid="ignore"):
        psig = np.where(mag == 0, 0.0, mag / pacf.stderr)
    pseudo_sigma = float(np.max(psig))

    mean_ok = mean_dev <= tol_sigma
    acf_ok = acf_dev <= tol_sigma
    pseudo_ok = pseudo_sigma <= tol_sigma
    if not mean_ok:
        verdict = Verdict.NONSTATIONARY_MEAN
    elif not acf_ok:
        verdict = Verdict.NONSTATIONARY_ACF
    elif input_is_complex and not pseudo_ok:
        verdict = Verdict.IMPROPER_OUTPUT
    else:
        verdict = Verdict.STATIONARY
    return StationarityReport(
        mean_constant=bool(mean_ok),
        mean_max_deviation=mean_dev,
        acf_toeplitz=bool(acf_ok),
        acf_max_deviation=float(acf_dev),
        acf_amplitude_toeplitz=bool(amp_dev <= tol_sigma),
        acf_amplitude_deviation=float(amp_dev),
        pseudo_vanishes=bool(pseudo_ok),
        pseudo_max_magnitude=float(mag.max()),
        pseudo_max_sigma=pseudo_sigma,
        verdict=verdict,
        tol_sigma=float(tol_sigma),
        input_is_complex=bool(input_is_complex),
    )
