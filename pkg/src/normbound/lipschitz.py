"""Concentration inputs for separately Lipschitz functions of independent variables.

For ``Y = g(X_1, ..., X_n)`` with finitely supported independent ``X_i`` the
whole analysis is exact: ``g`` is evaluated on the product grid and the
conditional expectations ``A_i = E[g | X_1..X_i]`` are obtained by successive
probability-weighted reductions over the trailing axes. Coordinates are
indexed from 0.
"""
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from . import constants as K
from .errors import BudgetError, DomainError
from .normal_kernel import upper_tail

__all__ = [
    "DiscreteVariable",
    "LipschitzProfile",
    "XiAnalysis",
    "TailPair",
    "LipschitzAnalysis",
    "profile_radius",
    "concentration_tail",
    "exact_xi_analysis",
    "analyze",
    "rho_second_moment_bound",
    "banach_scales",
    "BUILTIN_G",
    "STATE_BUDGET",
]

STATE_BUDGET = 10**6
PROB_TOL = 1e-12
MEAN_TOL = 1e-12


@dataclass(frozen=True)
class DiscreteVariable:
    """Finite law. ``support`` holds numbers, numeric vectors or string tokens;
    tokens need an entry in ``values`` giving their numeric embedding."""

    support: tuple
    probs: tuple
    values: dict = None

    def __post_init__(self):
        if len(self.support) == 0 or len(self.support) != len(self.probs):
            raise DomainError("support and probs must be non-empty and of equal length")
        keys = [_hashable(v) for v in self.support]
        if len(set(keys)) != len(keys):
            raise DomainError("support points must be distinct")
        p = np.asarray(self.probs, dtype=float)
        if np.any(~np.isfinite(p)) or np.any(p < 0) or abs(math.fsum(p) - 1.0) > PROB_TOL:
            raise DomainError("probabilities must be >= 0 and sum to 1")

    def embedding(self):
        """``(m, k)`` float array of the support points."""
        rows = []
        for v in self.support:
            if isinstance(v, str):
                if not self.values or v not in self.values:
                    raise DomainError(f"token {v!r} has no numeric value")
                v = self.values[v]
            rows.append(np.atleast_1d(np.asarray(v, dtype=float)))
        dims = {r.shape for r in rows}
        if len(dims) != 1 or len(next(iter(dims))) != 1:
            raise DomainError("support points must share one vector dimension")
        return np.vstack(rows)

    def mean(self):
        return np.asarray(self.probs, dtype=float) @ self.embedding()

    def live(self):
        """Copy without zero-probability points."""
        keep = [j for j, p in enumerate(self.probs) if p > 0]
        return DiscreteVariable(
            tuple(self.support[j] for j in keep), tuple(self.probs[j] for j in keep), self.values
        )


def _hashable(v):
    return tuple(v) if isinstance(v, (list, tuple, np.ndarray)) else v


@dataclass(frozen=True)
class LipschitzProfile:
    rho_sups: tuple
    radii: tuple
    radius: float


@dataclass(frozen=True)
class XiAnalysis:
    index: int
    d_sup: float
    second_moment_sup: float
    r_hat: float
    s_i: float
    s_tight: float
    r_i: float
    mean_residual: float


@dataclass(frozen=True)
class TailPair:
    plain: float
    tighter: float


def profile_radius(rho_sups):
    """``r_i = rho_i / 2`` and ``r = sqrt(sum r_i^2)``."""
    rho = tuple(float(v) for v in rho_sups)
    if not rho:
        raise DomainError("need at least one coordinate")
    if any(not (v >= 0 and math.isfinite(v)) for v in rho):
        raise DomainError("rho sups must be finite and nonnegative")
    radii = tuple(v / 2.0 for v in rho)
    return LipschitzProfile(rho_sups=rho, radii=radii, radius=_norm(radii))


def _norm(vals):
    vals = [v for v in vals if v > 0]
    return K.aggregate(vals).aggregate if vals else 0.0


def concentration_tail(radius, x):
    """``min(1, c_{5,0} Psi(x/r))`` and the tighter ``min(exp(-x^2/2r^2), ...)``."""
    if not (radius > 0 and math.isfinite(radius)):
        raise DomainError(f"radius must be positive, got {radius}")
    plain = min(1.0, K.C50 * upper_tail(x / radius))
    gauss = 1.0 if x <= 0 else math.exp(-0.5 * (x / radius) ** 2)
    return TailPair(plain=plain, tighter=min(plain, gauss))


# ------------------------------------------------------------------ builtin g
# Each takes a list of per-coordinate arrays shaped (1,..,m_i,..,1, k).


def _g_sum(cols):
    return sum(cols).sum(axis=-1)


def _g_abs_sum(cols):
    return np.abs(sum(cols).sum(axis=-1))


def _g_max(cols):
    return reduce(np.maximum, cols).max(axis=-1)


def _g_norm1_of_sums(cols):
    return np.abs(sum(cols)).sum(axis=-1)


BUILTIN_G = {
    "sum": _g_sum,
    "abs-sum": _g_abs_sum,
    "max": _g_max,
    "norm1-of-sums": _g_norm1_of_sums,
}
# all four builtins are convex in each argument
CONVEX_G = frozenset(BUILTIN_G)


def _resolve_g(g):
    if isinstance(g, str):
        if g not in BUILTIN_G:
            raise DomainError(f"unknown builtin g {g!r}")
        return BUILTIN_G[g], True
    return g, False


class _Grid:
    """``g`` on the product grid with the conditional-expectation tower."""

    def __init__(self, g, variables):
        if not variables:
            raise DomainError("need at least one variable")
        self.vars = [v.live() for v in variables]
        sizes = [len(v.support) for v in self.vars]
        states = math.prod(sizes)
        if states > STATE_BUDGET:
            raise BudgetError(f"{states} product states exceed the budget of {STATE_BUDGET}")
        self.g, self.vectorised = _resolve_g(g)
        self.emb = [v.embedding() for v in self.vars]
        self.probs = [np.asarray(v.probs, dtype=float) for v in self.vars]
        self.n = len(sizes)
        self.Y = self._evaluate([self._col(i, e) for i, e in enumerate(self.emb)])
        # A[i] = E[Y | X_0..X_i] with shape sizes[:i+1]; A[-1] is Y itself
        tower = [self.Y]
        for i in range(self.n - 1, 0, -1):
            tower.append(np.tensordot(tower[-1], self.probs[i], axes=([i], [0])))
        self.A = tower[::-1]
        self.EY = float(self.probs[0] @ self.A[0])

    def _col(self, i, arr):
        shape = [1] * self.n + [arr.shape[1]]
        shape[i] = arr.shape[0]
        return arr.reshape(shape)

    def _evaluate(self, cols):
        if self.vectorised:
            return np.asarray(self.g(cols), dtype=float)
        shape = np.broadcast_shapes(*[c.shape[:-1] for c in cols])
        out = np.empty(shape)
        for idx in np.ndindex(*shape):
            pt = [c[tuple(min(a, s - 1) for a, s in zip(idx, c.shape[:-1]))] for c in cols]
            pt = [p[0] if p.size == 1 else p for p in pt]
            out[idx] = self.g(pt)
        return out

    def xi(self, i):
        prev = self.A[i - 1] if i > 0 else np.asarray(self.EY)
        return self.A[i] - prev[..., None]

    def rho_sup(self, i):
        """Sup of the smallest ``rho_i`` (brute force over all other coordinates)."""
        return float(np.max(self.Y.max(axis=i) - self.Y.min(axis=i)))

    def rho_to_mean(self, i):
        """``rho_i(x_i, E X_i)`` for each support point ``x_i`` (smallest rho)."""
        cols = [self._col(j, e) for j, e in enumerate(self.emb)]
        cols[i] = self._col(i, self.vars[i].mean()[None, :])
        y_mu = self._evaluate(cols)
        diff = np.abs(self.Y - y_mu)
        others = tuple(j for j in range(self.n) if j != i)
        return diff.max(axis=others) if others else diff


def exact_xi_analysis(g, variables, i, _grid=None):
    """Exact ``Xi_i`` summary for coordinate ``i`` (0-based).

    ``d_sup`` is the largest ``Xi_i`` over prefixes and values (the tightest
    prefix-free ``D_{i-1}``); ``second_moment_sup`` is the largest
    ``E Xi_i(prefix, X_i)^2``; ``s_i = (d + m/d)/2``. ``s_tight`` lets ``D_{i-1}``
    vary with the prefix, taking ``inf_{D >= max Xi} (D + m/D)/2`` per prefix.
    ``r_hat`` is half the largest spread of ``E[g | X_0..X_i]`` in ``x_i``.
    """
    grid = _grid or _Grid(g, variables)
    if not 0 <= i < grid.n:
        raise DomainError(f"index {i} outside 0..{grid.n - 1}")
    xi = grid.xi(i)
    p = grid.probs[i]
    cond_mean = xi @ p
    m_pref = (xi**2) @ p
    d_pref = xi.max(axis=-1)
    d_sup = float(np.max(d_pref))
    m_sup = float(np.max(m_pref))
    s_i = 0.5 * (d_sup + m_sup / d_sup) if d_sup > 0 else 0.0
    tight = [
        K.sigma_star(float(d), float(m)) if d > 0 else 0.0
        for d, m in zip(np.ravel(d_pref), np.ravel(m_pref))
    ]
    spread = grid.A[i].max(axis=-1) - grid.A[i].min(axis=-1)
    return XiAnalysis(
        index=i,
        d_sup=d_sup,
        second_moment_sup=m_sup,
        r_hat=0.5 * float(np.max(spread)),
        s_i=s_i,
        s_tight=max(tight),
        r_i=0.5 * grid.rho_sup(i),
        mean_residual=float(np.max(np.abs(cond_mean))),
    )


def rho_second_moment_bound(rho, var):
    """``min over support points x of E rho(X, x)^2``.

    ``rho(a, b)`` is a user-supplied two-argument function. The infimum runs
    over support points only, so the value can exceed the infimum over all x.
    """
    if not isinstance(var, DiscreteVariable):
        raise DomainError("var must be a DiscreteVariable")
    pts = var.support
    best = math.inf
    for x in pts:
        val = math.fsum(p * float(rho(y, x)) ** 2 for y, p in zip(pts, var.probs))
        best = min(best, val)
    return best


def banach_scales(d, second_moments):
    """``s_i = (d_i + m_i/d_i)/2`` aggregated into ``s = sqrt(sum s_i^2)``."""
    d = [float(v) for v in d]
    m = [float(v) for v in second_moments]
    if len(d) != len(m):
        raise DomainError("d and second moments must have equal length")
    if any(not v > 0 for v in d):
        raise DomainError("d_i must be positive")
    if any(v < 0 for v in m):
        raise DomainError("second moments must be nonnegative")
    return K.aggregate([0.5 * (di + mi / di) for di, mi in zip(d, m)])


@dataclass
class LipschitzAnalysis:
    """Everything the end-to-end check needs for one ``(g, variables)`` pair."""

    profile: LipschitzProfile
    xi: list
    s: float
    s_tight: float
    mean: float
    y_values: np.ndarray  # lattice of Y - EY
    y_probs: np.ndarray
    convex_ok: bool = None
    convex_margin: float = None

    def tail(self, x):
        return math.fsum(self.y_probs[self.y_values >= x])

    def checks(self, x_grid=None, slack=1e-12):
        """Rows ``(x, P(Y-EY >= x), r-bound, s-bound, ok)`` over the lattice by default."""
        grid = self.y_values if x_grid is None else np.asarray(x_grid, dtype=float)
        rows = []
        for x in grid:
            p = self.tail(x)
            br = concentration_tail(self.profile.radius, x).plain if self.profile.radius > 0 else float(x <= 0)
            bs = concentration_tail(self.s, x).plain if self.s > 0 else float(x <= 0)
            rows.append((float(x), p, br, bs, p <= br + slack and p <= bs + slack))
        return rows


def analyze(g, variables, convex=None, lattice_rtol=1e-11):
    """Full exact analysis: profile, per-coordinate Xi summaries, both scales,
    the law of ``Y - EY`` and (for convex g) the pointwise ``Xi_i <= rho_i(x_i, E X_i)`` check."""
    grid = _Grid(g, variables)
    prof = profile_radius([grid.rho_sup(i) for i in range(grid.n)])
    xi = [exact_xi_analysis(g, variables, i, _grid=grid) for i in range(grid.n)]
    s = _norm([a.s_i for a in xi])
    s_tight = _norm([a.s_tight for a in xi])
    joint = reduce(np.multiply.outer, grid.probs)
    vals = (grid.Y - grid.EY).ravel()
    order = np.argsort(vals, kind="stable")
    v, p = vals[order], joint.ravel()[order]
    scale = max(1.0, float(np.max(np.abs(v))))
    starts = np.concatenate(([0], np.flatnonzero(np.diff(v) > lattice_rtol * scale) + 1))
    ends = np.append(starts[1:], v.size)
    y_vals = v[starts]
    y_probs = np.array([math.fsum(p[a:b]) for a, b in zip(starts, ends)])
    out = LipschitzAnalysis(prof, xi, s, s_tight, grid.EY, y_vals, y_probs)
    if convex is None:
        convex = isinstance(g, str) and g in CONVEX_G
    if convex:
        margin = math.inf
        for i in range(grid.n):
            gap = grid.rho_to_mean(i) - grid.xi(i)
            margin = min(margin, float(np.min(gap)))
        out.convex_margin = margin
        out.convex_ok = margin >= -1e-12
    return out
