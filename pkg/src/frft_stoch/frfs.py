"""Fractional Fourier series on ``[-T/2, T/2]`` and the DTFRFT.

Basis: ``phi_n(t) = K_{-a}(t, n*t_o) / sqrt(T |csc a| / (2 pi))`` with
central frequency ``t_o = 2 pi sin(a) / T``. The coefficients are sampled
FRFT values, ``C_n = sqrt(2 pi |sin a| / T) * Z_a(n t_o)``, and their product
with the basis normalisation is exactly 1, so analysis followed by synthesis
has unit gain. Absolute values keep the basis orthonormal for ``sin a < 0``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, DomainError, OutOfInterval, ValidationError
from .estimators import CorrelationSurface, DeltaSurface
from .frft_kernel import FractionalOrder, SampledSignal, as_order, check_chirp_sampling, frft_points, kernel_value

__all__ = [
    "FrfsConfig",
    "FrfsCoefficients",
    "frfs_basis",
    "frfs_analyze",
    "frfs_synthesize",
    "dtfrft",
    "coeff_correlations",
]

_EDGE_TOL = 1e-9


@dataclass(frozen=True)
class FrfsConfig:
    order: FractionalOrder
    interval_width: float
    n_min: int
    n_max: int

    def __post_init__(self):
        object.__setattr__(self, "order", as_order(self.order))
        if not self.interval_width > 0:
            raise ValidationError(f"interval width must be positive, got {self.interval_width}")
        if int(self.n_min) != self.n_min or int(self.n_max) != self.n_max or self.n_min > self.n_max:
            raise ValidationError(f"bad index range [{self.n_min}, {self.n_max}]")
        object.__setattr__(self, "n_min", int(self.n_min))
        object.__setattr__(self, "n_max", int(self.n_max))

    @classmethod
    def for_samples(cls, order, interval_width, n_samples):
        """Default index range ``[-N/2, N/2]`` for ``N`` samples."""
        return cls(order, interval_width, -(n_samples // 2), n_samples // 2)

    @property
    def central_frequency(self):
        return 2.0 * math.pi * math.sin(self.order.alpha) / self.interval_width

    @property
    def indices(self):
        return np.arange(self.n_min, self.n_max + 1)

    @property
    def coefficient_scale(self):
        return math.sqrt(2.0 * math.pi * abs(math.sin(self.order.alpha)) / self.interval_width)


@dataclass(frozen=True)
class FrfsCoefficients:
    config: FrfsConfig
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        size = self.config.n_max - self.config.n_min + 1
        if np.shape(self.values)[-1] != size:
            raise DimensionMismatch(f"expected {size} coefficients, got {np.shape(self.values)[-1]}")

    def __getitem__(self, n):
        if not self.config.n_min <= n <= self.config.n_max:
            raise IndexError(f"coefficient {n} outside [{self.config.n_min}, {self.config.n_max}]")
        return self.values[..., n - self.config.n_min]


def _check_interval(config, t):
    half = 0.5 * config.interval_width
    if np.any(np.abs(t) > half * (1 + _EDGE_TOL) + _EDGE_TOL):
        raise OutOfInterval(f"points outside [-{half}, {half}]")


def frfs_basis(config, n, t):
    """Chirp basis function ``phi_n`` at ``t`` (array or scalar)."""
    order = config.order
    order.trig()
    t = np.asarray(t, dtype=float)
    _check_interval(config, t)
    norm = math.sqrt(config.interval_width / (2.0 * math.pi * abs(math.sin(order.alpha))))
    return kernel_value(-order, t, n * config.central_frequency) / norm


def _check_span(config, grid):
    half = 0.5 * config.interval_width
    tol = 0.5 * grid.step
    if abs(grid.start + half) > tol or abs(grid.stop - half) > tol:
        raise DomainError(f"signal grid [{grid.start}, {grid.stop}] must span [-{half}, {half}]")


def frfs_analyze(signal, config, check=True):
    """Coefficients from FRFT samples at ``u = n t_o``.

    ``signal`` is a :class:`SampledSignal` or a ``(grid, values)`` pair with
    ``values`` of shape ``(..., N)``, so ensembles are analysed in one pass.
    """
    grid, values = (signal.grid, signal.values) if isinstance(signal, SampledSignal) else signal
    _check_span(config, grid)
    u = config.indices * config.central_frequency
    if check:
        check_chirp_sampling(config.order, grid, float(np.abs(u).max()))
    z = frft_points(np.asarray(values), grid, config.order, u, check=False)
    return FrfsCoefficients(config, config.coefficient_scale * z)


def frfs_synthesize(coeffs, out_grid):
    """Truncated series ``sum_n C_n phi_n(t)`` over the stored index range."""
    config = coeffs.config
    t = out_grid.points
    _check_interval(config, t)
    basis = np.stack([frfs_basis(config, n, t) for n in config.indices], axis=0)
    return SampledSignal(out_grid, np.asarray(coeffs.values) @ basis)


def dtfrft(samples, order, index_range=None, interval_width=None, check=True):
    """DTFRFT ``D_a[k]``: FRFS coefficients at angle ``pi/2 + alpha`` (order ``a + 1``)."""
    grid, values = (samples.grid, samples.values) if isinstance(samples, SampledSignal) else samples
    shifted = as_order(order) + 1.0
    width = interval_width if interval_width is not None else grid.stop - grid.start
    if index_range is None:
        config = FrfsConfig.for_samples(shifted, width, grid.count)
    else:
        config = FrfsConfig(shifted, width, *index_range)
    return frfs_analyze((grid, values), config, check=check)


def coeff_correlations(surface, config):
    """``M[n, l] = (2 pi |sin a| / T) * surface(n t_o, l t_o)`` over the index range.

    Works for autocorrelation or pseudo surfaces alike. Gridded surfaces are
    bilinearly interpolated; a :class:`DeltaSurface` is sampled analytically
    on the ``t_o`` lattice; a callable ``(u1, u2) -> value`` is evaluated
    directly.
    """
    scale = config.coefficient_scale ** 2
    t_o = config.central_frequency
    u = config.indices * t_o
    if isinstance(surface, DeltaSurface):
        return scale * surface.on_lattice(u.size, abs(t_o))
    if isinstance(surface, CorrelationSurface):
        grid = surface.u_grid
        lo, hi = grid.start, grid.stop
        tol = 1e-9 * max(1.0, abs(lo), abs(hi))
        if u.min() < lo - tol or u.max() > hi + tol:
            raise DomainError(f"surface grid [{lo}, {hi}] does not cover [{u.min()}, {u.max()}]")
        vals = _bilinear(surface.values, grid, np.clip(u, lo, hi))
        return scale * vals
    return scale * np.asarray(surface(u[:, None], u[None, :]), dtype=np.complex128)


def _bilinear(values, grid, u):
    pos = (u - grid.start) / grid.step
    i0 = np.clip(np.floor(pos).astype(int), 0, grid.count - 2)
    f = pos - i0
    i1 = i0 + 1
    v00 = values[np.ix_(i0, i0)]
    v01 = values[np.ix_(i0, i1)]
    v10 = values[np.ix_(i1, i0)]
    v11 = values[np.ix_(i1, i1)]
    fj = f[:, None]
    fk = f[None, :]
    return (1 - fj) * (1 - fk) * v00 + (1 - fj) * fk * v01 + fj * (1 - fk) * v10 + fj * fk * v11
