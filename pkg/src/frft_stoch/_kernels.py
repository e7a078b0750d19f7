"""Hot numeric kernels with a numba path and a pure-numpy fallback.

Both implementations are always importable as ``*_numba`` / ``*_numpy`` so the
benchmark and the test-suite can compare them. The public names (without a
suffix) are bound at import time:

* ``FRFT_STOCH_DISABLE_NUMBA=1`` forces the numpy path.
* ``FRFT_STOCH_THREADS=k`` caps numba's thread pool.

Results do not depend on the thread count: the numba kernels parallelise
over output rows or over a fixed number of realization chunks, and every
partial sum is taken in a fixed order.
"""

import os

import numpy as np

try:
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

    prange = range


def _env_flag(name):
    return os.environ.get(name, "").strip().lower() in ("1", "true", "yes", "on")


USE_NUMBA = HAVE_NUMBA and not _env_flag("FRFT_STOCH_DISABLE_NUMBA")
BACKEND = "numba" if USE_NUMBA else "numpy"

if HAVE_NUMBA:
    # the bundled TBB is too old for numba; skip straight to the portable layer
    if "NUMBA_THREADING_LAYER" not in os.environ:
        numba.config.THREADING_LAYER = "workqueue"
    _threads = os.environ.get("FRFT_STOCH_THREADS")
    if _threads:
        numba.set_num_threads(max(1, min(int(_threads), numba.config.NUMBA_NUM_THREADS)))


# ---------------------------------------------------------------------------
# chirp kernel matrix  K[j, k] = A * exp(i*(u_k^2/2*cot - t_j*u_k*csc + t_j^2/2*cot))
# ---------------------------------------------------------------------------

def kernel_matrix_numpy(t, u, amp, cot, csc):
    t = t[:, None]
    u = u[None, :]
    phase = 0.5 * cot * (u * u + t * t) - csc * t * u
    return amp * np.exp(1j * phase)


@njit(parallel=True, cache=True)
def kernel_matrix_numba(t, u, amp, cot, csc):
    n = t.shape[0]
    m = u.shape[0]
    out = np.empty((n, m), dtype=np.complex128)
    for j in prange(n):
        tj = t[j]
        for k in range(m):
            uk = u[k]
            phase = 0.5 * cot * (uk * uk + tj * tj) - csc * tj * uk
            out[j, k] = amp * complex(np.cos(phase), np.sin(phase))
    return out


# ---------------------------------------------------------------------------
# Toeplitz bilinear form  out[p, q] = sum_j sum_k r[j - k + n - 1] * a[j, p] * b[k, q]
# (double trapezoid sum of a stationary kernel r(t - s) against two weight sets)
# ---------------------------------------------------------------------------

def toeplitz_bilinear_numpy(r, a, b):
    n = a.shape[0]
    size = 1 << int(np.ceil(np.log2(3 * n - 2)))
    # T @ b as a linear convolution of r with each column of b
    rf = np.fft.fft(r, size)
    bf = np.fft.fft(b, size, axis=0)
    conv = np.fft.ifft(rf[:, None] * bf, axis=0)[n - 1:2 * n - 1]
    return a.T @ conv


@njit(parallel=True, cache=True)
def toeplitz_bilinear_numba(r, a, b):
    n = a.shape[0]
    nq = b.shape[1]
    np_ = a.shape[1]
    tb = np.zeros((n, nq), dtype=np.complex128)
    for j in prange(n):
        for q in range(nq):
            acc = 0j
            for k in range(n):
                acc += r[j - k + n - 1] * b[k, q]
            tb[j, q] = acc
    out = np.zeros((np_, nq), dtype=np.complex128)
    for p in prange(np_):
        for q in range(nq):
            acc = 0j
            for j in range(n):
                acc += a[j, p] * tb[j, q]
            out[p, q] = acc
    return out


# ---------------------------------------------------------------------------
# Monte Carlo second moments:
#   first[j, k]  = sum_m z[m, j] * w[m, k]
#   second[j, k] = sum_m |z[m, j] * w[m, k]|^2
# with w = conj(z) for the autocorrelation and w = z for the pseudo one.
# ---------------------------------------------------------------------------

def product_moments_numpy(z, conjugate):
    w = np.conj(z) if conjugate else z
    first = z.T @ w
    mag = (z.real ** 2 + z.imag ** 2)
    second = mag.T @ mag
    return first, second


_MOMENT_CHUNKS = 8  # fixed, so the summation order does not depend on the thread count


@njit(parallel=True, cache=True)
def product_moments_numba(z, conjugate):
    m, n = z.shape
    sign = -1.0 if conjugate else 1.0
    nc = _MOMENT_CHUNKS
    fr = np.zeros((nc, n, n))
    fi = np.zeros((nc, n, n))
    sq = np.zeros((nc, n, n))
    for c in prange(nc):
        zr = np.empty(n)
        zi = np.empty(n)
        mg = np.empty(n)
        for i in range(c * m // nc, (c + 1) * m // nc):
            for j in range(n):
                zr[j] = z[i, j].real
                zi[j] = z[i, j].imag
                mg[j] = zr[j] * zr[j] + zi[j] * zi[j]
            # rank-1 update of the lower triangle
            for j in range(n):
                ar = zr[j]
                ai = zi[j]
                mj = mg[j]
                for k in range(j + 1):
                    br = zr[k]
                    bi = sign * zi[k]
                    fr[c, j, k] += ar * br - ai * bi
                    fi[c, j, k] += ar * bi + ai * br
                    sq[c, j, k] += mj * mg[k]
    first = np.empty((n, n), dtype=np.complex128)
    second = np.empty((n, n))
    for j in range(n):
        for k in range(j + 1):
            re = 0.0
            im = 0.0
            acc2 = 0.0
            for c in range(nc):
                re += fr[c, j, k]
                im += fi[c, j, k]
                acc2 += sq[c, j, k]
            first[j, k] = complex(re, im)
            first[k, j] = complex(re, -im) if conjugate else complex(re, im)
            second[j, k] = acc2
            second[k, j] = acc2
    return first, second


def toeplitz_bilinear_auto(r, a, b):
    """Direct numba sum for small grids, FFT convolution beyond the crossover."""
    if a.shape[0] <= TOEPLITZ_DIRECT_MAX:
        return toeplitz_bilinear_numba(r, a, b)
    return toeplitz_bilinear_numpy(r, a, b)


# the O(N^2) direct Toeplitz sum only beats the FFT path on small grids
TOEPLITZ_DIRECT_MAX = 64

if USE_NUMBA:
    kernel_matrix = kernel_matrix_numba
    toeplitz_bilinear = toeplitz_bilinear_auto
    product_moments = product_moments_numba
else:
    kernel_matrix = kernel_matrix_numpy
    toeplitz_bilinear = toeplitz_bilinear_numpy
    product_moments = product_moments_numpy
