"""Continuous fractional Fourier transform by direct trapezoid quadrature.

The kernel for rotation angle ``alpha`` (order ``a = 2*alpha/pi``) is::

    K(t, u) = sqrt((1 - i*cot(alpha)) / (2*pi))
              * exp(i*u**2/2*cot(alpha))
              * exp(-i*t*u*csc(alpha) + i*t**2/2*cot(alpha))

and ``Z(u) = sum_n z(t_n) K(t_n, u) w_n`` with trapezoid weights ``w_n``.
The O(N*M) direct sum is deliberately kept: every closed-form statistic in
:mod:`frft_stoch.theory` is checked against it.
"""

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DegreeOutOfRange, DimensionMismatch, GridTooCoarse, SingularAngle, ValidationError

__all__ = [
    "OrderClass",
    "FractionalOrder",
    "TimeGrid",
    "SampledSignal",
    "kernel_value",
    "hermite",
    "hermite_functions",
    "check_chirp_sampling",
    "max_chirp_step",
    "frft_points",
    "frft_quadrature",
    "inverse_frft",
    "plateau_window",
]

# |sin(alpha)| below this is treated as the delta-function branch
NEAR_SINGULAR = 1e-3
HERMITE_MAX_DEGREE = 200
_CLASS_TOL = 1e-12


class OrderClass(enum.Enum):
    GENERIC = "generic"
    IDENTITY = "identity"
    PARITY = "parity"
    FOURIER_MULTIPLE = "fourier_multiple"


@dataclass(frozen=True)
class FractionalOrder:
    """Transform order ``a``; the rotation angle is always ``a * pi / 2``."""

    a: float

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        if not math.isfinite(self.a):
            raise ValidationError(f"order must be finite, got {self.a}")

    @classmethod
    def from_angle(cls, alpha):
        return cls(2.0 * float(alpha) / math.pi)

    @property
    def alpha(self):
        return self.a * math.pi / 2.0

    def __neg__(self):
        return FractionalOrder(-self.a)

    def __add__(self, other):
        if isinstance(other, FractionalOrder):
            return FractionalOrder(self.a + other.a)
        return FractionalOrder(self.a + float(other))

    def classify(self):
        r = self.a % 4.0
        # distance to the nearest integer, wrapping 4 -> 0
        k = round(r) % 4
        if abs(r - round(r)) > _CLASS_TOL:
            return OrderClass.GENERIC
        if k == 0:
            return OrderClass.IDENTITY
        if k == 2:
            return OrderClass.PARITY
        return OrderClass.FOURIER_MULTIPLE

    @property
    def is_generic(self):
        """True when the chirp kernel is pointwise evaluable."""
        return self.classify() in (OrderClass.GENERIC, OrderClass.FOURIER_MULTIPLE)

    def trig(self):
        """Return ``(amp, cot, csc)`` for the kernel; raises on (near-)singular angles."""
        alpha = self.alpha
        s = math.sin(alpha)
        if not self.is_generic or abs(s) < NEAR_SINGULAR:
            raise SingularAngle(f"alpha = {alpha!r} rad (a = {self.a!r}) has |sin(alpha)| < {NEAR_SINGULAR}")
        cot = math.cos(alpha) / s
        amp = complex(np.sqrt((1.0 - 1j * cot) / (2.0 * math.pi)))
        return amp, cot, 1.0 / s


def as_order(order):
    if isinstance(order, FractionalOrder):
        return order
    return FractionalOrder(order)


@dataclass(frozen=True)
class TimeGrid:
    start: float
    step: float
    count: int

    def __post_init__(self):
        if not self.step > 0:
            raise ValidationError(f"grid step must be positive, got {self.step}")
        if int(self.count) != self.count or self.count < 2:
            raise ValidationError(f"grid needs at least 2 samples, got {self.count}")
        object.__setattr__(self, "start", float(self.start))
        object.__setattr__(self, "step", float(self.step))
        object.__setattr__(self, "count", int(self.count))

    @classmethod
    def symmetric(cls, half_width, step):
        """Grid on ``[-half_width, half_width]`` whose step divides the width exactly."""
        n = int(math.ceil(2.0 * half_width / step - 1e-9))
        return cls(-half_width, 2.0 * half_width / n, n + 1)

    @classmethod
    def from_points(cls, points):
        points = np.asarray(points, dtype=float)
        step = float(points[1] - points[0])
        grid = cls(float(points[0]), step, points.size)
        if not np.allclose(grid.points, points, rtol=0, atol=1e-9 * max(1.0, np.abs(points).max())):
            raise ValidationError("points are not uniformly spaced")
        return grid

    @property
    def points(self):
        return self.start + self.step * np.arange(self.count)

    @property
    def stop(self):
        return self.start + self.step * (self.count - 1)

    @property
    def half_width(self):
        return max(abs(self.start), abs(self.stop))

    def trapezoid_weights(self):
        w = np.full(self.count, self.step)
        w[0] = w[-1] = 0.5 * self.step
        return w

    def to_dict(self):
        return {"start": self.start, "step": self.step, "count": self.count}


@dataclass(frozen=True)
class SampledSignal:
    grid: TimeGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.complex128)
        if values.shape != (self.grid.count,):
            raise DimensionMismatch(f"expected {self.grid.count} samples, got shape {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, grid, func):
        return cls(grid, func(grid.points))

    def __add__(self, other):
        _same_grid(self.grid, other.grid)
        return SampledSignal(self.grid, self.values + other.values)

    def __mul__(self, c):
        return SampledSignal(self.grid, complex(c) * self.values)

    __rmul__ = __mul__

    def norm(self):
        """Trapezoid L2 norm."""
        return math.sqrt(float(np.sum(self.grid.trapezoid_weights() * np.abs(self.values) ** 2)))


def _same_grid(g1, g2):
    if g1 != g2:
        raise DimensionMismatch(f"grid mismatch: {g1} vs {g2}")


def kernel_value(order, t, u):
    """Evaluate the FRFT kernel; broadcasts over array ``t`` and ``u``."""
    amp, cot, csc = as_order(order).trig()
    t = np.asarray(t, dtype=float)
    u = np.asarray(u, dtype=float)
    phase = 0.5 * cot * (u * u + t * t) - csc * t * u
    out = amp * np.exp(1j * phase)
    return complex(out) if out.ndim == 0 else out


def hermite(n, t):
    """Hermite function of degree ``n`` with unit L2 norm."""
    return hermite_functions(n, t)[n]


def hermite_functions(nmax, t):
    """Rows 0..nmax of normalized Hermite functions evaluated at ``t``.

    Uses h_{k+1} = t*sqrt(2/(k+1))*h_k - sqrt(k/(k+1))*h_{k-1}.
    """
    if int(nmax) != nmax or nmax < 0:
        raise DegreeOutOfRange(f"degree must be a nonnegative integer, got {nmax}")
    if nmax > HERMITE_MAX_DEGREE:
        raise DegreeOutOfRange(f"degree {nmax} exceeds {HERMITE_MAX_DEGREE}")
    t = np.asarray(t, dtype=float)
    out = np.empty((nmax + 1,) + t.shape)
    out[0] = math.pi ** -0.25 * np.exp(-0.5 * t * t)
    if nmax >= 1:
        out[1] = math.sqrt(2.0) * t * out[0]
    for k in range(1, nmax):
        out[k + 1] = t * math.sqrt(2.0 / (k + 1)) * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


def max_chirp_step(order, t_half, u_max):
    """Largest step keeping the kernel phase increment below pi per sample."""
    _, cot, csc = as_order(order).trig()
    denom = abs(cot) * t_half + abs(csc) * u_max
    return math.inf if denom == 0 else math.pi / denom


def check_chirp_sampling(order, grid, u_max):
    limit = max_chirp_step(order, grid.half_width, u_max)
    if grid.step > limit * (1 + 1e-12):
        raise GridTooCoarse(
            f"step {grid.step:.6g} exceeds chirp limit {limit:.6g} "
            f"(a={as_order(order).a:.6g}, T_half={grid.half_width:.6g}, U_max={u_max:.6g})"
        )


def _check_decay(values):
    mag = np.abs(values)
    peak = mag.max(axis=-1)
    edge = np.maximum(mag[..., 0], mag[..., -1])
    if np.any(edge > 1e-6 * peak):
        warnings.warn("signal does not decay at the grid ends; quadrature truncates it", RuntimeWarning, stacklevel=3)


def frft_points(values, grid, order, u, check=True):
    """FRFT of samples ``values`` (shape ``(..., N)``) at arbitrary points ``u``.

    Returns an array of shape ``(..., len(u))``. A stack of realizations is
    transformed with one kernel matrix; the endpoint-decay warning is only
    issued for a single signal, since stationary realizations never decay.
    """
    order = as_order(order)
    amp, cot, csc = order.trig()
    values = np.asarray(values, dtype=np.complex128)
    if values.shape[-1] != grid.count:
        raise DimensionMismatch(f"expected {grid.count} samples along the last axis, got {values.shape[-1]}")
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if check:
        check_chirp_sampling(order, grid, float(np.abs(u).max()))
        if values.ndim == 1:
            _check_decay(values)
    kmat = _kernels.kernel_matrix(grid.points, u, amp, cot, csc)
    kmat *= grid.trapezoid_weights()[:, None]
    return values @ kmat


def frft_quadrature(signal, order, out_grid, check=True):
    out = frft_points(signal.values, signal.grid, order, out_grid.points, check=check)
    return SampledSignal(out_grid, out)


def inverse_frft(signal, order, out_grid, check=True):
    return frft_quadrature(signal, -as_order(order), out_grid, check=check)


def plateau_window(grid, plateau, taper):
    """Smooth window: 1 on ``|t| <= plateau``, raised-cosine to 0 over ``taper``.

    Used to give non-decaying inputs (constant means) a finite transform.
    """
    t = np.abs(grid.points)
    x = np.clip((t - plateau) / taper, 0.0, 1.0)
    return 0.5 * (1.0 + np.cos(math.pi * x))
