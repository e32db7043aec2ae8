"""Compare the numba and numpy kernels on Monte Carlo sampling and the lemma grid.

    python benchmarks/bench_kernels.py [--paths 1000000] [--repeat 3]

Each timing is the best of ``--repeat`` runs after one warm-up call (which
also absorbs numba compilation). Outputs of the two backends are compared
bit for bit.
"""
import argparse
import math
import time

import numpy as np

from normbound._accel import HAVE_NUMBA
from normbound.martingale_lab import adapted_sign_model, rademacher_model
from normbound.martingale_lab.kernels import lemma_grid_scan, simulate_chunk
from normbound.normal_kernel import closed_form_R


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = [False] + ([True] if HAVE_NUMBA else [])
    if not HAVE_NUMBA:
        print("numba unavailable or disabled; timing numpy only")

    n = 30
    cases = [
        (f"MC rademacher n={n}", rademacher_model([1 / math.sqrt(n)] * n).compiled()),
        ("MC adapted-sign n=12", adapted_sign_model(12).compiled()),
    ]
    print(f"{'kernel':<28}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}  identical")
    for label, cm in cases:
        res = {b: best_of(lambda b=b: simulate_chunk(cm, 7, 0, args.paths, use_numba=b), args.repeat)
               for b in backends}
        _row(label, res, lambda a, b: np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1]))

    r = np.arange(201) / 200
    t = np.round(np.arange(-3000, 201) * 0.01, 10)
    R = closed_form_R(t)
    res = {b: best_of(lambda b=b: lemma_grid_scan(r, t, R, use_numba=b), args.repeat) for b in backends}
    _row(f"lemma grid {r.size}x{t.size}", res, lambda a, b: a[1:3] == b[1:3])


def _row(label, res, same):
    t_np = res[False][0]
    if True in res:
        t_nb = res[True][0]
        print(f"{label:<28}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>9.1f}x  {same(res[False][1], res[True][1])}")
    else:
        print(f"{label:<28}{t_np:>12.4f}{'-':>12}{'-':>10}")


if __name__ == "__main__":
    main()
