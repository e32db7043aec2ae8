"""Monte Carlo tail estimates for ``S_n`` and ``M_n``.

Paths are cut into fixed chunks independent of the worker count and each
chunk returns integer exceedance counts, so results are bit-identical for any
number of threads.
"""
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .._accel import USE_NUMBA
from ..errors import DomainError
from .kernels import simulate_chunk

__all__ = ["MCResult", "simulate_mc", "MIN_PATHS", "CHUNK"]

MIN_PATHS = 10_000
CHUNK = 1 << 16
Z99 = float(norm.ppf(0.995))


@dataclass(frozen=True)
class MCResult:
    x_grid: np.ndarray
    tail_s: np.ndarray
    tail_m: np.ndarray
    count_s: np.ndarray
    count_m: np.ndarray
    half_width_s: np.ndarray
    half_width_m: np.ndarray
    n_paths: int
    seed: int
    backend: str


def default_workers():
    env = os.environ.get("NORMBOUND_THREADS")
    if env:
        return max(1, int(env))
    return 1


def _counts(values, x_grid):
    srt = np.sort(values)
    return srt.size - np.searchsorted(srt, x_grid, side="left")


def simulate_mc(model, n_paths, seed=0, x_grid=None, workers=None, use_numba=None):
    """Estimate ``P(S_n >= x)`` and ``P(M_n >= x)`` on ``x_grid``.

    Half-widths are the normal-approximation 99% intervals
    ``z_{0.995} sqrt(p(1-p)/N)``. The default grid is ``s * (0, 0.5, ..., 6)``
    with ``s`` the model scale.
    """
    n_paths = int(n_paths)
    if n_paths < MIN_PATHS:
        raise DomainError(f"need at least {MIN_PATHS} paths, got {n_paths}")
    if not 0 <= int(seed) < 2**64:
        raise DomainError("seed must fit in 64 unsigned bits")
    use_numba = USE_NUMBA if use_numba is None else use_numba
    workers = default_workers() if workers is None else max(1, int(workers))
    if x_grid is None:
        x_grid = model.scale() * np.arange(0.0, 6.01, 0.5)
    x_grid = np.asarray(x_grid, dtype=float)
    cm = model.compiled()

    def run(start):
        count = min(CHUNK, n_paths - start)
        s, m = simulate_chunk(cm, int(seed), start, count, use_numba=use_numba)
        return _counts(s, x_grid), _counts(m, x_grid)

    starts = range(0, n_paths, CHUNK)
    if workers == 1:
        parts = [run(a) for a in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, starts))
    cs = np.sum([p[0] for p in parts], axis=0).astype(np.int64)
    cmx = np.sum([p[1] for p in parts], axis=0).astype(np.int64)
    ps, pm = cs / n_paths, cmx / n_paths
    return MCResult(
        x_grid=x_grid,
        tail_s=ps,
        tail_m=pm,
        count_s=cs,
        count_m=cmx,
        half_width_s=Z99 * np.sqrt(ps * (1 - ps) / n_paths),
        half_width_m=Z99 * np.sqrt(pm * (1 - pm) / n_paths),
        n_paths=n_paths,
        seed=int(seed),
        backend="numba" if use_numba else "numpy",
    )


def mc_tail_check(result, bound_fn, scale):
    """Rows ``(x, p_hat, half_width, bound, ok)`` with ``ok = p_hat - hw <= bound``."""
    rows = []
    for x, p, hw in zip(result.x_grid, result.tail_s, result.half_width_s):
        b = bound_fn(float(x), scale)
        rows.append((float(x), float(p), float(hw), float(b), bool(p - hw <= b)))
    return rows

