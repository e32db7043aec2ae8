"""Hot loops: path sampling and the two-point lemma grid.

Each kernel has a numba version and a numpy version with identical results.
The sampler draws uniforms from a counter-based hash of ``(seed, path, step)``
(SplitMix64 finaliser), so a path's trajectory does not depend on how paths
are split across chunks or threads.
"""
import numpy as np

from .._accel import USE_NUMBA, njit

__all__ = ["simulate_chunk", "lemma_grid_scan", "uniforms"]

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53


# ---------------------------------------------------------------- numba side


@njit
def _mix(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit
def _path_key(seed, path):
    return _mix(_mix(seed) + (np.uint64(path) + _ONE) * _GOLDEN)


@njit
def _uniform(key, step):
    z = _mix(key + (np.uint64(step) + _ONE) * _GOLDEN)
    return np.float64(z >> _S11) * _INV53


@njit
def _sim_numba(seed, start, count, values, cum, sizes, step_default, node_dist, child, initial, out_s, out_m):
    n_steps = step_default.shape[0]
    for p in range(count):
        key = _path_key(seed, start + p)
        s = initial
        m = initial
        node = 0
        for i in range(n_steps):
            d = step_default[i]
            if node >= 0 and node_dist[node] >= 0:
                d = node_dist[node]
            u = _uniform(key, i)
            j = 0
            last = sizes[d] - 1
            while j < last and u >= cum[d, j]:
                j += 1
            s += values[d, j]
            if s > m:
                m = s
            if node >= 0:
                node = child[node, j]
        out_s[p] = s
        out_m[p] = m


@njit
def _lemma_numba(r, t, R):
    best_rel = np.inf
    bi = -1
    bj = -1
    best_abs = np.inf
    for i in range(r.shape[0]):
        hi = 2.0 * r[i]
        lo = hi - 2.0
        for j in range(t.shape[0]):
            a = hi - t[j]
            b = lo - t[j]
            L = 0.0
            if a > 0.0:
                L += (1.0 - r[i]) * a**5
            if b > 0.0:
                L += r[i] * b**5
            gap = R[j] - L
            rel = gap / max(1.0, abs(R[j]))
            if rel < best_rel:
                best_rel = rel
                bi = i
                bj = j
            if gap < best_abs:
                best_abs = gap
    return best_rel, bi, bj, best_abs


# ---------------------------------------------------------------- numpy side


def _mix_np(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def uniforms(seed, paths, step):
    """Uniforms for the given path indices at one step (numpy reference)."""
    with np.errstate(over="ignore"):
        paths = np.asarray(paths, dtype=np.uint64)
        key = _mix_np(_mix_np(np.uint64(seed)) + (paths + _ONE) * _GOLDEN)
        z = _mix_np(key + (np.uint64(step) + _ONE) * _GOLDEN)
    return (z >> _S11).astype(np.float64) * _INV53


def _sim_numpy(seed, start, count, values, cum, sizes, step_default, node_dist, child, initial, out_s, out_m):
    paths = np.arange(start, start + count, dtype=np.uint64)
    with np.errstate(over="ignore"):
        keys = _mix_np(_mix_np(np.uint64(seed)) + (paths + _ONE) * _GOLDEN)
    s = np.full(count, initial)
    m = s.copy()
    node = np.zeros(count, dtype=np.int64)
    for i in range(len(step_default)):
        live = node >= 0
        safe = np.where(live, node, 0)
        override = live & (node_dist[safe] >= 0)
        d = np.where(override, node_dist[safe], step_default[i])
        with np.errstate(over="ignore"):
            z = _mix_np(keys + (np.uint64(i) + _ONE) * _GOLDEN)
        u = (z >> _S11).astype(np.float64) * _INV53
        # cum is +inf from sizes[d]-1 on, so this count equals the scan in the loop version
        j = (u[:, None] >= cum[d]).sum(axis=1)
        s += values[d, j]
        np.maximum(m, s, out=m)
        node = np.where(live, child[safe, j], -1)
    out_s[:] = s
    out_m[:] = m


def _lemma_numpy(r, t, R):
    hi = 2.0 * r[:, None]
    a = np.maximum(hi - t[None, :], 0.0)
    b = np.maximum(hi - 2.0 - t[None, :], 0.0)
    L = (1.0 - r[:, None]) * a**5 + r[:, None] * b**5
    gap = R[None, :] - L
    rel = gap / np.maximum(1.0, np.abs(R))[None, :]
    k = int(np.argmin(rel))
    bi, bj = divmod(k, len(t))
    return float(rel.flat[k]), bi, bj, float(gap.min())


# ---------------------------------------------------------------- dispatch


def simulate_chunk(cm, seed, start, count, use_numba=None):
    """Final values and running maxima for paths ``start .. start+count-1``."""
    use_numba = USE_NUMBA if use_numba is None else use_numba
    out_s = np.empty(count)
    out_m = np.empty(count)
    fn = _sim_numba if use_numba else _sim_numpy
    fn(
        np.uint64(seed),
        np.int64(start),
        np.int64(count),
        cm.values,
        cm.cum,
        cm.sizes,
        cm.step_default,
        cm.node_dist,
        cm.child,
        np.float64(cm.initial),
        out_s,
        out_m,
    )
    return out_s, out_m


def lemma_grid_scan(r, t, R, use_numba=None):
    """Smallest ``(R - L) / max(1, |R|)`` over the grid with its indices, and the
    smallest raw gap ``R - L``."""
    use_numba = USE_NUMBA if use_numba is None else use_numba
    r = np.ascontiguousarray(r, dtype=float)
    t = np.ascontiguousarray(t, dtype=float)
    R = np.ascontiguousarray(R, dtype=float)
    fn = _lemma_numba if use_numba else _lemma_numpy
    rel, i, j, gap = fn(r, t, R)
    return float(rel), int(i), int(j), float(gap)
