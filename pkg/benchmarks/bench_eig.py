"""Time the compiled and pure-Python Jacobi kernels against LAPACK.

    python benchmarks/bench_eig.py [--sizes 4 8 16 32 64] [--repeat 5]

Prints one CSV row per (size, backend) with the median wall time and the
reconstruction error ``max|V diag(w) V^H - M|``.
"""

import argparse
import statistics
import time

import numpy as np

from entlaw import _kernels
from entlaw.linalg import hermitian_eig


def _matrix(n, rng):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (z + z.conj().T) / 2


def _time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 8, 16, 32, 64])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    print("n,backend,median_ms,reconstruction_error,speedup_vs_python")
    for n in args.sizes:
        m = _matrix(n, rng)
        rows = {}
        for backend in sorted(_kernels.BACKENDS):
            sec, e = _time(lambda: hermitian_eig(m, backend=backend), args.repeat)
            rows[backend] = (sec, float(np.abs(e.reconstruct() - m).max()))
        sec, (w, v) = _time(lambda: np.linalg.eigh(m), args.repeat)
        rows["lapack"] = (sec, float(np.abs((v * w) @ v.conj().T - m).max()))
        base = rows["python"][0]
        for name, (sec, err) in rows.items():
            print(f"{n},{name},{sec * 1e3:.4f},{err:.2e},{base / sec:.1f}")


if __name__ == "__main__":
    main()
