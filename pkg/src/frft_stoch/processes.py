"""Seeded Gaussian ensembles for the stationary input classes.

RNG contract (fixed so runs are bit-reproducible): realization ``m`` draws
from ``numpy.random.Generator(Philox(key=seed, counter=[0, m, 0, 0]))``, i.e.
Philox4x64-10 with a per-realization counter block of 2**64 draws. Each
realization takes ``2*N`` standard normals (``Generator.standard_normal``):
the first N feed the in-phase component, the next N the quadrature one.

Every kind is built from the same unit white vector

    w = A*g1 + B*g2,   E|w|^2 = 1,   E w^2 = rho,

with ``A = e^{i*theta/2} sqrt((1+|rho|)/2)``, ``B = i*e^{i*theta/2} sqrt((1-|rho|)/2)``
(``rho = |rho| e^{i*theta}``), then scaled by ``sqrt((N_o/2)/dt)`` for white
kinds or by a Cholesky factor of the Toeplitz covariance for colored ones.
Real white noise is ``rho = 1`` and proper noise ``rho = 0``.

White-noise delta weights: a continuous ``(N_o/2) delta(tau)`` becomes a
per-sample variance ``(N_o/2)/dt``, so trapezoid sums reproduce the
continuous integral identities.
"""

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NotPSD, SeedRequired, ValidationError
from .frft_kernel import TimeGrid

__all__ = [
    "ProcessKind",
    "ACF_FAMILIES",
    "StationaryModel",
    "Ensemble",
    "generate",
    "model_acf",
    "model_pacf",
    "realization_rng",
]


class ProcessKind(enum.Enum):
    WHITE_REAL = "WhiteReal"
    WHITE_PROPER_COMPLEX = "WhiteProperComplex"
    WHITE_IMPROPER_COMPLEX = "WhiteImproperComplex"
    COLORED_GAUSSIAN = "ColoredGaussian"


# named autocorrelation families, parameterised by a correlation length
ACF_FAMILIES = {
    "exp": lambda tau, ell: np.exp(-np.abs(tau) / ell),
    "gauss": lambda tau, ell: np.exp(-0.5 * (np.asarray(tau) / ell) ** 2),
}


@dataclass(frozen=True)
class StationaryModel:
    """Wide-sense stationary Gaussian input model.

    For colored models ``acf`` is a family name from :data:`ACF_FAMILIES` or
    a callable ``R(tau)``; the pseudo-autocorrelation is ``rho * R(tau)``.
    Callables cannot be written to manifests.
    """

    kind: ProcessKind
    mean: complex = 0j
    noise_level: float = 2.0
    acf: object = None
    acf_scale: float = 1.0
    variance: float = 1.0
    pseudo_param: complex = 0j

    def __post_init__(self):
        kind = ProcessKind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "mean", complex(self.mean))
        rho = complex(self.pseudo_param)
        if kind is ProcessKind.WHITE_REAL:
            rho = 1 + 0j
        elif kind is ProcessKind.WHITE_PROPER_COMPLEX:
            rho = 0j
        if abs(rho) > 1 + 1e-12:
            raise ValidationError(f"|pseudo_param| must be <= 1, got {abs(rho)}")
        object.__setattr__(self, "pseudo_param", rho)
        if kind is ProcessKind.COLORED_GAUSSIAN:
            if self.acf is None:
                raise ValidationError("colored model needs an acf")
            if isinstance(self.acf, str) and self.acf not in ACF_FAMILIES:
                raise ValidationError(f"unknown acf family {self.acf!r}; known: {sorted(ACF_FAMILIES)}")
            if not self.variance > 0 or not self.acf_scale > 0:
                raise ValidationError("variance and acf_scale must be positive")
        elif not self.noise_level >= 0:
            raise ValidationError(f"noise level must be >= 0, got {self.noise_level}")

    # convenience constructors
    @classmethod
    def white_real(cls, noise_level=2.0, mean=0.0):
        return cls(ProcessKind.WHITE_REAL, mean=mean, noise_level=noise_level)

    @classmethod
    def white_proper(cls, noise_level=2.0, mean=0j):
        return cls(ProcessKind.WHITE_PROPER_COMPLEX, mean=mean, noise_level=noise_level)

    @classmethod
    def white_improper(cls, rho, noise_level=2.0, mean=0j):
        return cls(ProcessKind.WHITE_IMPROPER_COMPLEX, mean=mean, noise_level=noise_level, pseudo_param=rho)

    @classmethod
    def colored(cls, acf="exp", acf_scale=1.0, variance=1.0, rho=0j, mean=0j):
        return cls(ProcessKind.COLORED_GAUSSIAN, mean=mean, acf=acf, acf_scale=acf_scale,
                   variance=variance, pseudo_param=rho)

    @property
    def is_white(self):
        return self.kind is not ProcessKind.COLORED_GAUSSIAN

    @property
    def is_complex(self):
        return self.kind is not ProcessKind.WHITE_REAL and not (
            self.kind is ProcessKind.COLORED_GAUSSIAN and self.pseudo_param == 1 and self.mean.imag == 0
        )

    @property
    def delta_weight(self):
        """Weight ``N_o/2`` of the white autocorrelation delta."""
        return 0.5 * self.noise_level

    def acf_fn(self):
        """Autocorrelation ``R(tau)`` of a colored model as a vectorised callable."""
        if self.is_white:
            raise ValidationError("white models have a delta autocorrelation; use delta_weight")
        if callable(self.acf):
            base = self.acf
            return lambda tau: self.variance * np.asarray(base(tau))
        fam = ACF_FAMILIES[self.acf]
        return lambda tau: self.variance * fam(tau, self.acf_scale)

    def pacf_fn(self):
        r = self.acf_fn()
        rho = self.pseudo_param
        return lambda tau: rho * r(tau)

    def to_dict(self):
        if callable(self.acf):
            raise ValidationError("models with a callable acf cannot be serialized")
        return {
            "kind": self.kind.value,
            "mean": [self.mean.real, self.mean.imag],
            "noise_level": self.noise_level,
            "acf": self.acf,
            "acf_scale": self.acf_scale,
            "variance": self.variance,
            "pseudo_param": [self.pseudo_param.real, self.pseudo_param.imag],
        }

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        for key in ("mean", "pseudo_param"):
            if key in d and isinstance(d[key], (list, tuple)):
                d[key] = complex(*d[key])
        known = {"kind", "mean", "noise_level", "acf", "acf_scale", "variance", "pseudo_param"}
        unknown = set(d) - known
        if unknown:
            raise ValidationError(f"unknown model fields: {sorted(unknown)}")
        if "kind" not in d:
            raise ValidationError("model needs a 'kind'")
        return cls(**d)


def model_acf(model, tau):
    """Closed-form ``R(tau)``. White kinds return the delta *weight* at ``tau == 0``."""
    tau = np.asarray(tau, dtype=float)
    if model.is_white:
        out = np.where(tau == 0, model.delta_weight, 0.0).astype(np.complex128)
    else:
        out = np.asarray(model.acf_fn()(tau), dtype=np.complex128)
    return complex(out) if out.ndim == 0 else out


def model_pacf(model, tau):
    """Closed-form pseudo-autocorrelation (delta weight for white kinds)."""
    return model.pseudo_param * model_acf(model, tau)


@dataclass(frozen=True)
class Ensemble:
    grid: TimeGrid
    realizations: np.ndarray = field(repr=False)
    model: StationaryModel = None
    seed: int = None

    def __post_init__(self):
        z = np.asarray(self.realizations)
        if z.ndim != 2 or z.shape[0] < 1 or z.shape[1] != self.grid.count:
            raise ValidationError(f"realizations must have shape (M>=1, {self.grid.count}), got {z.shape}")

    @property
    def m(self):
        return self.realizations.shape[0]

    @property
    def n(self):
        return self.realizations.shape[1]

    def with_values(self, values, grid=None):
        return replace(self, realizations=values, grid=grid or self.grid)


def realization_rng(seed, m):
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, m, 0, 0]))


def _unit_white_coeffs(rho):
    mag = abs(rho)
    phase = np.exp(0.5j * np.angle(rho)) if mag > 0 else 1.0
    a = phase * math.sqrt((1 + mag) / 2)
    b = 1j * phase * math.sqrt(max(0.0, (1 - mag) / 2))
    return a, b


def _toeplitz_factor(model, grid):
    lags = grid.step * np.arange(grid.count)
    col = np.asarray(model.acf_fn()(lags), dtype=np.complex128)
    if np.any(np.abs(col.imag) > 1e-12 * abs(col[0])):
        cov = _hermitian_toeplitz(col)
    else:
        cov = _hermitian_toeplitz(col.real)
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        pass
    # smooth ACFs (e.g. gaussian) are numerically singular at fine steps
    w, v = np.linalg.eigh(cov)
    if w.min() < -1e-8 * w.max():
        raise NotPSD(f"covariance has eigenvalue {w.min():.3g} (max {w.max():.3g})")
    return v * np.sqrt(np.clip(w, 0.0, None))


def _hermitian_toeplitz(col):
    n = col.size
    idx = np.arange(n)[:, None] - np.arange(n)[None, :]
    out = col[np.abs(idx)]
    return np.where(idx < 0, np.conj(out), out)


def generate(model, grid, m, seed, chunk=2048):
    """Draw ``m`` realizations of ``model`` on ``grid``."""
    if seed is None:
        raise SeedRequired("a 64-bit integer seed is required")
    seed = int(seed)
    if not 0 <= seed < 2 ** 64:
        raise ValidationError(f"seed must fit in 64 unsigned bits, got {seed}")
    if int(m) != m or m < 1:
        raise ValidationError(f"number of realizations must be >= 1, got {m}")
    m = int(m)
    n = grid.count
    a, b = _unit_white_coeffs(model.pseudo_param)
    real_only = model.pseudo_param == 1

    factor = None if model.is_white else _toeplitz_factor(model, grid)
    scale = math.sqrt(model.delta_weight / grid.step) if model.is_white else 1.0

    out = np.empty((m, n), dtype=np.complex128)
    g = np.empty((min(chunk, m), 2 * n))
    for lo in range(0, m, chunk):
        hi = min(m, lo + chunk)
        for i in range(lo, hi):
            g[i - lo] = realization_rng(seed, i).standard_normal(2 * n)
        g1 = g[: hi - lo, :n]
        g2 = g[: hi - lo, n:]
        w = g1 if real_only else a * g1 + b * g2
        if factor is not None:
            w = w @ factor.T
        else:
            w = scale * w
        out[lo:hi] = w
    if model.mean != 0:
        out += model.mean
    return Ensemble(grid, out, model, seed)
