"""Exact path enumeration of finite models.

Paths are expanded level by level over frontier arrays. The laws of ``S_n``
and ``M_n = max(S_0, ..., S_n)`` are then collapsed onto a lattice: values
within a relative ``1e-11`` of each other are merged (they differ only by
summation-order rounding), the cluster minimum is kept and probabilities are
added with ``math.fsum``.
"""
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import BudgetError

__all__ = ["EnumerationResult", "enumerate_exact", "PATH_BUDGET", "EXACT_PATH_BUDGET"]

PATH_BUDGET = 2**20
EXACT_PATH_BUDGET = 2**14
LATTICE_RTOL = 1e-11


def _ppow(v, a):
    # (v)_+^a with the indicator convention 1{v >= 0} at a = 0
    if a == 0:
        return (v >= 0).astype(float)
    return np.maximum(v, 0.0) ** a


@dataclass(frozen=True)
class EnumerationResult:
    s_values: np.ndarray
    s_probs: np.ndarray
    m_values: np.ndarray
    m_probs: np.ndarray
    n_paths: int
    exact_probs: tuple = None  # (s_fracs, m_fracs) in exact mode

    def tail(self, x):
        """``P(S_n >= x)``."""
        return math.fsum(self.s_probs[self.s_values >= x])

    def max_tail(self, x):
        """``P(M_n >= x)``."""
        return math.fsum(self.m_probs[self.m_values >= x])

    def moment(self, t, alpha):
        """``E(S_n - t)_+^alpha`` (``alpha = 0`` gives ``P(S_n >= t)``)."""
        return math.fsum(self.s_probs * _ppow(self.s_values - t, alpha))

    def max_moment(self, x, beta):
        """``E(M_n - x)_+^beta``."""
        return math.fsum(self.m_probs * _ppow(self.m_values - x, beta))

    def mean(self):
        return math.fsum(self.s_probs * self.s_values)

    def exact_tail(self, x):
        if self.exact_probs is None:
            raise ValueError("enumeration was not run in exact mode")
        return sum((p for v, p in zip(self.s_values, self.exact_probs[0]) if v >= x), Fraction(0))


def _lattice(values, probs):
    order = np.argsort(values, kind="stable")
    v, p = values[order], probs[order]
    if v.size == 0:
        return v, p
    scale = max(1.0, float(np.max(np.abs(v))))
    breaks = np.flatnonzero(np.diff(v) > LATTICE_RTOL * scale) + 1
    starts = np.concatenate(([0], breaks))
    ends = np.concatenate((breaks, [v.size]))
    vals = v[starts]
    prs = np.array([math.fsum(p[a:b]) for a, b in zip(starts, ends)])
    return vals, prs


def _lattice_exact(values, fracs):
    order = np.argsort(values, kind="stable")
    v = values[order]
    f = [fracs[k] for k in order]
    scale = max(1.0, float(np.max(np.abs(v))))
    out_v, out_f = [], []
    for val, fr in zip(v, f):
        if out_v and val - out_v[-1] <= LATTICE_RTOL * scale:
            out_f[-1] += fr
        else:
            out_v.append(float(val))
            out_f.append(fr)
    return np.array(out_v), out_f


def enumerate_exact(model, budget=PATH_BUDGET, exact=False):
    """Enumerate every path with positive probability.

    Raises :class:`BudgetError` once the frontier would exceed ``budget``
    paths. With ``exact=True`` the path probabilities are also carried as
    :class:`fractions.Fraction` (the float probabilities converted exactly), and
    the budget is capped at ``EXACT_PATH_BUDGET``.
    """
    cm = model.compiled()
    if exact:
        budget = min(budget, EXACT_PATH_BUDGET)
    S = np.array([cm.initial])
    M = S.copy()
    P = np.array([1.0])
    node = np.array([0], dtype=np.int64)
    F = [Fraction(1)] if exact else None
    width = cm.values.shape[1]
    cols = np.arange(width)
    for i in range(cm.n_steps):
        live = node >= 0
        safe = np.where(live, node, 0)
        d = np.where(live & (cm.node_dist[safe] >= 0), cm.node_dist[safe], cm.step_default[i])
        keep = (cols[None, :] < cm.sizes[d][:, None]) & (cm.probs[d] > 0)
        total = int(keep.sum())
        if total > budget:
            raise BudgetError(f"step {i}: {total} paths exceed the budget of {budget}")
        rows, js = np.nonzero(keep)
        inc = cm.values[d[rows], js]
        S = S[rows] + inc
        M = np.maximum(M[rows], S)
        if exact:
            F = [F[r] * Fraction(float(cm.probs[d[r], j])) for r, j in zip(rows, js)]
        P = P[rows] * cm.probs[d[rows], js]
        node = np.where(live[rows], cm.child[safe[rows], js], -1)
    sv, sp = _lattice(S, P)
    mv, mp = _lattice(M, P)
    exact_probs = None
    if exact:
        sv, sf = _lattice_exact(S, F)
        mv, mf = _lattice_exact(M, F)
        sp = np.array([float(f) for f in sf])
        mp = np.array([float(f) for f in mf])
        exact_probs = (tuple(sf), tuple(mf))
    return EnumerationResult(sv, sp, mv, mp, n_paths=int(S.size), exact_probs=exact_probs)
