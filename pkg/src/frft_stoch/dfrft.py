"""Discrete fractional Fourier transform ``F^a = Q diag(exp(-i*pi/2*a*k)) Q^T``.

``Q`` holds real orthonormal Hermite-like eigenvectors of the unitary DFT,
obtained from the Dickinson-Steiglitz matrix ``S`` that commutes with it.
``S`` is block-diagonalised on the even and odd subspaces first because its
spectrum is degenerate when ``n`` is a multiple of 4; within each parity the
eigenvectors are ordered by descending eigenvalue, which is the Hermite order.
"""

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NotPositiveDefinite, SizeError
from .frft_kernel import FractionalOrder, OrderClass, as_order

__all__ = [
    "dft_matrix",
    "dft_eigenbasis",
    "hermite_indices",
    "DfrftMatrix",
    "build_dfrft",
    "apply",
    "CovariancePair",
    "transform_statistics",
    "gaussian_logpdf",
    "parity_matrix",
]


def _check_size(n):
    if int(n) != n or n < 2:
        raise SizeError(f"matrix size must be an integer >= 2, got {n}")
    return int(n)


def dft_matrix(n):
    """Unitary DFT, ``W[j, k] = exp(-2j*pi*j*k/n) / sqrt(n)``."""
    n = _check_size(n)
    jk = np.outer(np.arange(n), np.arange(n)) % n
    return np.exp(-2j * np.pi * jk / n) / math.sqrt(n)


def parity_matrix(n):
    """Permutation ``z[k] -> z[(-k) mod n]`` (the DFT squared)."""
    n = _check_size(n)
    p = np.zeros((n, n))
    p[(-np.arange(n)) % n, np.arange(n)] = 1.0
    return p


def _commuting_matrix(n):
    j = np.arange(n)
    s = np.diag(2.0 * np.cos(2.0 * np.pi * j / n) - 4.0)
    s += np.diag(np.ones(n - 1), 1) + np.diag(np.ones(n - 1), -1)
    s[0, -1] += 1.0
    s[-1, 0] += 1.0
    return s


def _parity_bases(n):
    """Orthonormal bases of the even and odd subspaces under k -> -k mod n."""
    half = (n - 1) // 2
    even = [np.eye(n)[0]]
    odd = []
    for j in range(1, half + 1):
        e = np.zeros(n)
        e[j] = e[n - j] = 1 / math.sqrt(2)
        o = np.zeros(n)
        o[j], o[n - j] = 1 / math.sqrt(2), -1 / math.sqrt(2)
        even.append(e)
        odd.append(o)
    if n % 2 == 0:
        even.append(np.eye(n)[n // 2])
    return np.array(even).T, np.array(odd).T.reshape(n, len(odd))


def hermite_indices(n):
    """Eigenphase indices: 0..n-2 plus n-1 (odd n) or n (even n)."""
    n = _check_size(n)
    k = list(range(n - 1))
    k.append(n - 1 if n % 2 else n)
    return np.array(k)


def _fix_sign(v):
    idx = np.argmax(np.abs(v) > 1e-10)
    return -v if v[idx] < 0 else v


@functools.lru_cache(maxsize=32)
def dft_eigenbasis(n):
    """Return ``(Q, k)``: real orthonormal DFT eigenvectors and their Hermite indices.

    Column ``i`` of ``Q`` satisfies ``W @ Q[:, i] = (-1j)**k[i] * Q[:, i]``.
    The arrays are read-only and cached per ``n``.
    """
    n = _check_size(n)
    s = _commuting_matrix(n)
    ev, od = _parity_bases(n)
    w_e, v_e = np.linalg.eigh(ev.T @ s @ ev)
    vecs_e = ev @ v_e[:, ::-1]
    if od.shape[1]:
        w_o, v_o = np.linalg.eigh(od.T @ s @ od)
        vecs_o = od @ v_o[:, ::-1]
    else:
        vecs_o = np.zeros((n, 0))

    k = hermite_indices(n)
    q = np.empty((n, n))
    ie = io = 0
    for col, kk in enumerate(k):
        if kk % 2 == 0:
            q[:, col] = _fix_sign(vecs_e[:, ie])
            ie += 1
        else:
            q[:, col] = _fix_sign(vecs_o[:, io])
            io += 1
    q.setflags(write=False)
    k.setflags(write=False)
    return q, k


@dataclass(frozen=True)
class DfrftMatrix:
    n: int
    order: FractionalOrder
    matrix: np.ndarray = field(repr=False)
    eigvecs: np.ndarray = field(repr=False)
    eigphase_indices: np.ndarray = field(repr=False)

    @property
    def is_identity(self):
        return self.order.classify() is OrderClass.IDENTITY

    def __matmul__(self, other):
        if isinstance(other, DfrftMatrix):
            return self.matrix @ other.matrix
        return self.matrix @ other


def build_dfrft(n, order):
    """Fractional power ``a`` of the unitary DFT of size ``n``.

    Orders congruent to 0 mod 4 return the exact identity so that ``a = 0``
    is a bit-exact no-op.
    """
    n = _check_size(n)
    order = as_order(order)
    q, k = dft_eigenbasis(n)
    if order.classify() is OrderClass.IDENTITY:
        mat = np.eye(n, dtype=np.complex128)
    else:
        # reduce the period-4 phase before exponentiating
        lam = np.exp(-0.5j * np.pi * ((order.a * k) % 4.0))
        mat = (q * lam) @ q.T
    mat.setflags(write=False)
    return DfrftMatrix(n, order, mat, q, k)


def apply(f, z):
    """``F^a z`` for a vector or a stack of row vectors ``z`` of shape (M, n)."""
    z = np.asarray(z)
    if z.shape[-1] != f.n:
        raise DimensionMismatch(f"vector length {z.shape[-1]} does not match matrix size {f.n}")
    if f.is_identity:
        return np.array(z, dtype=np.complex128)
    if z.ndim == 1:
        return f.matrix @ z
    return z @ f.matrix.T


@dataclass(frozen=True)
class CovariancePair:
    """Mean, covariance ``E[(z-mu)(z-mu)^H]`` and pseudo-covariance ``E[(z-mu)(z-mu)^T]``."""

    mean: np.ndarray
    cov: np.ndarray
    pseudo: np.ndarray

    def __post_init__(self):
        n = np.shape(self.mean)[0]
        for name in ("cov", "pseudo"):
            if np.shape(getattr(self, name)) != (n, n):
                raise DimensionMismatch(f"{name} must be {n}x{n}")

    @property
    def n(self):
        return len(self.mean)

    @classmethod
    def white(cls, n, sigma2=1.0, proper=True):
        eye = sigma2 * np.eye(n, dtype=np.complex128)
        return cls(np.zeros(n, dtype=np.complex128), eye, np.zeros_like(eye) if proper else eye.copy())


def transform_statistics(stats, f):
    """Image of ``(mu, C, P)`` under ``F^a``: ``(F mu, F C F^H, F P F^T)``."""
    if stats.n != f.n:
        raise DimensionMismatch(f"statistics of size {stats.n} vs matrix size {f.n}")
    m = f.matrix
    return CovariancePair(m @ stats.mean, m @ stats.cov @ m.conj().T, m @ stats.pseudo @ m.T)


def gaussian_logpdf(z, mean, cov):
    """Log density of a proper complex Gaussian ``CN(mean, cov)``.

    Properness (vanishing pseudo-covariance) is the caller's responsibility;
    for an improper vector this is not the true density.
    """
    z = np.asarray(z, dtype=np.complex128)
    mean = np.asarray(mean, dtype=np.complex128)
    cov = np.asarray(cov, dtype=np.complex128)
    if cov.shape != (z.size, z.size) or mean.shape != z.shape:
        raise DimensionMismatch("shapes of z, mean and cov disagree")
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("covariance is not Hermitian positive definite") from exc
    diag = np.diag(chol).real
    if np.any(diag <= 0):
        raise NotPositiveDefinite("covariance is not Hermitian positive definite")
    y = np.linalg.solve(chol, z - mean)
    quad = float(np.vdot(y, y).real)
    logdet = 2.0 * float(np.sum(np.log(diag)))
    return -z.size * math.log(math.pi) - logdet - quad
