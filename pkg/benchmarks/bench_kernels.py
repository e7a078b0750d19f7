"""Compare the numba and pure-numpy paths of the hot kernels.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5] [--quick] [--json out.json]

Each kernel is timed on both paths at a few sizes (best of ``--repeat`` runs,
after one warm-up call so numba compilation is excluded) and the two outputs
are checked to agree. Set ``FRFT_STOCH_THREADS`` to cap numba's thread pool.
"""

import argparse
import json
import sys
import time

import numpy as np

from frft_stoch import _kernels as k


def best_time(fn, args, repeat):
    fn(*args)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def cases(rng, quick):
    # kernel matrix: quadrature grid x output points
    for n_t, n_u in ((1025, 64), (4097, 256)) if not quick else ((513, 32),):
        t = np.linspace(-8, 8, n_t)
        u = rng.uniform(-4, 4, n_u)
        yield ("kernel_matrix", f"{n_t}x{n_u}", k.kernel_matrix_numba, k.kernel_matrix_numpy,
               (t, u, 0.5 - 0.2j, 1.0, 1.4142))
    # Toeplitz bilinear form: the direct numba sum is O(N^2), the numpy path uses an FFT
    for n in (64, 256, 1024) if not quick else (64, 256):
        r = rng.standard_normal(2 * n - 1) + 0j
        a = rng.standard_normal((n, 5)) + 1j * rng.standard_normal((n, 5))
        yield ("toeplitz_bilinear", f"N={n}", k.toeplitz_bilinear_numba, k.toeplitz_bilinear_numpy, (r, a, a.conj()))
    # Monte Carlo product moments
    for m, n in ((20000, 64), (5000, 206)) if not quick else ((2000, 32),):
        z = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
        yield ("product_moments", f"M={m} N={n}", k.product_moments_numba, k.product_moments_numpy, (z, True))


def agree(x, y):
    if isinstance(x, tuple):
        return all(agree(a, b) for a, b in zip(x, y))
    scale = max(1.0, float(np.max(np.abs(y))))
    return float(np.max(np.abs(x - y))) / scale < 1e-10


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--quick", action="store_true", help="small sizes only")
    p.add_argument("--json", metavar="PATH", help="also write results as JSON")
    args = p.parse_args(argv)
    if not k.HAVE_NUMBA:
        print("numba is not installed; nothing to compare", file=sys.stderr)
        return 1

    rng = np.random.default_rng(0)
    rows = []
    print(f"{'kernel':<18} {'size':<16} {'numba ms':>10} {'numpy ms':>10} {'speedup':>8}  agree")
    for name, size, fast, ref, fargs in cases(rng, args.quick):
        t_numba = best_time(fast, fargs, args.repeat)
        t_numpy = best_time(ref, fargs, args.repeat)
        ok = agree(fast(*fargs), ref(*fargs))
        rows.append({"kernel": name, "size": size, "numba_s": t_numba, "numpy_s": t_numpy, "agree": ok})
        print(f"{name:<18} {size:<16} {1e3 * t_numba:>10.3f} {1e3 * t_numpy:>10.3f} "
              f"{t_numpy / t_numba:>7.2f}x  {'yes' if ok else 'NO'}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"backend": k.BACKEND, "results": rows}, fh, indent=2)
    return 0 if all(r["agree"] for r in rows) else 2


if __name__ == "__main__":
    sys.exit(main())
