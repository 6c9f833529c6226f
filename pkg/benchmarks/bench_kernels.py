"""Time the numba kernels against their numpy twins on realistic workloads.

    python3 benchmarks/bench_kernels.py [--resolution 256] [--repeat 3]

Both backends run in one process by flipping the dispatch flag, so the
numba timings exclude JIT compilation (one warm-up call is made first).
"""

import argparse
import time

import numpy as np

from hartogs_lab import _accel
from hartogs_lab.cauchy import cauchy_at_nodes, cauchy_particular
from hartogs_lab.domain import disc, make_grid
from hartogs_lab.kernels import separable_gram


def timed(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def workloads(resolution):
    grid = make_grid(disc(0j, 1.0), resolution)
    beta = np.conj(grid.Z)
    rng = np.random.default_rng(0)
    nz, nf, nr, nt = 4000, 12, 24, 16
    gram_args = (rng.normal(size=(nz, nf)) + 1j * rng.normal(size=(nz, nf)), np.arange(-3, nf - 3),
                 rng.random(nz), 1.0 + rng.random((nz, nr)), rng.random((nz, nr)),
                 np.linspace(0, 2 * np.pi, nt, endpoint=False), np.full(nt, 2 * np.pi / nt))
    # cached properties are built once outside the timed region
    grid.nodes
    return {
        "near_field_sum (cauchy_particular)": lambda: cauchy_particular(beta, grid),
        "cauchy_points (cauchy_at_nodes)": lambda: cauchy_at_nodes(beta, grid),
        "separable_gram (mode-reduction Gram)": lambda: separable_gram(*gram_args),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--resolution", type=int, default=256)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    if not _accel.NUMBA_AVAILABLE:
        raise SystemExit("numba is not installed; nothing to compare")
    jobs = workloads(args.resolution)
    print(f"{'kernel':42s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s} {'rel diff':>10s}")
    for name, fn in jobs.items():
        _accel.USE_NUMBA = True
        fn()  # compile
        tn, a = timed(fn, args.repeat)
        _accel.USE_NUMBA = False
        tp, b = timed(fn, args.repeat)
        a, b = np.asarray(a), np.asarray(b)
        diff = float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1.0))
        print(f"{name:42s} {tn:10.4f} {tp:10.4f} {tp / tn:8.1f} {diff:10.2e}")
    _accel.USE_NUMBA = not _accel.DISABLED


if __name__ == "__main__":
    main()
