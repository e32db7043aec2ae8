"""Certify the domination inequalities on enumerated models and on grids."""
from dataclasses import dataclass, field

import numpy as np

from .. import constants as K
from ..errors import DomainError
from ..normal_kernel import closed_form_R, scaled_moment
from ..tail_bounds import combined_bound, maximal_moment_bound, snapshot_moment_bound
from .enumeration import enumerate_exact
from .kernels import lemma_grid_scan

__all__ = [
    "Check",
    "VerificationReport",
    "verify_moment_domination",
    "verify_tail_domination",
    "verify_lemma_LR",
    "verify_maximal_moment",
    "verify_centering",
    "lemma_L",
    "DOMINATION_SLACK",
    "LEMMA_SLACK",
]

DOMINATION_SLACK = 1e-10
LEMMA_SLACK = 1e-9


@dataclass(frozen=True)
class Check:
    label: str
    at: float
    lhs: float
    rhs: float
    ok: bool

    @property
    def slack(self):
        return self.rhs - self.lhs

    def as_dict(self):
        return dict(label=self.label, at=self.at, lhs=self.lhs, rhs=self.rhs, slack=self.slack, ok=self.ok)


@dataclass
class VerificationReport:
    name: str
    checks: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.ok for c in self.checks)

    @property
    def min_slack(self):
        if "min_slack" in self.meta:
            return self.meta["min_slack"]
        return min((c.slack for c in self.checks), default=float("inf"))

    @property
    def failures(self):
        return [c for c in self.checks if not c.ok]

    def worst(self):
        return min(self.checks, key=lambda c: c.slack, default=None)

    def add(self, label, at, lhs, rhs, slack=DOMINATION_SLACK):
        lhs, rhs = float(lhs), float(rhs)
        self.checks.append(Check(label, float(at), lhs, rhs, lhs <= rhs + slack * max(1.0, rhs)))

    def as_dict(self):
        return dict(
            name=self.name,
            passed=self.passed,
            min_slack=self.min_slack,
            meta=self.meta,
            checks=[c.as_dict() for c in self.checks],
        )


def _enumerated(model, enum):
    model.validate()
    return enum if enum is not None else enumerate_exact(model)


def default_t_grid(scale):
    """``t`` in ``[-6s, 6s]`` with step ``0.25 s``."""
    return scale * np.arange(-24, 25) * 0.25


def verify_moment_domination(model, t_grid=None, enum=None):
    """``E(S_n - t)_+^5 <= E(sZ - t)_+^5`` on the grid (``s`` is the model scale)."""
    enum = _enumerated(model, enum)
    s = model.scale()
    grid = default_t_grid(s) if t_grid is None else np.asarray(t_grid, dtype=float)
    rep = VerificationReport("moments", meta=dict(model=model.name, scale=s, n_paths=enum.n_paths))
    rhs = np.atleast_1d(scaled_moment(s, grid, 5))
    for t, r in zip(grid, rhs):
        rep.add("E(S_n-t)_+^5", t, enum.moment(float(t), 5), r)
    return rep


def lattice_grid(enum, maximal=False):
    """Every lattice value of ``S_n`` (or ``M_n``) plus one point below the minimum."""
    vals = enum.m_values if maximal else enum.s_values
    return np.concatenate(([vals[0] - 1.0], vals))


def verify_tail_domination(model, x_grid=None, enum=None):
    """``P(S_n >= x) <= combined_bound(x, s)``, and the same for ``M_n`` when the
    model is a martingale. The default grid is every lattice value."""
    enum = _enumerated(model, enum)
    s = model.scale()
    rep = VerificationReport("tails", meta=dict(model=model.name, scale=s, kind=model.kind))
    grid = lattice_grid(enum) if x_grid is None else np.asarray(x_grid, dtype=float)
    for x in grid:
        rep.add("P(S_n>=x)", x, enum.tail(x), combined_bound(float(x), s))
    if model.kind == "martingale":
        mgrid = lattice_grid(enum, maximal=True) if x_grid is None else grid
        for x in mgrid:
            rep.add("P(M_n>=x)", x, enum.max_tail(x), combined_bound(float(x), s))
    return rep


def lemma_L(r, t):
    """``r (2r-2-t)_+^5 + (1-r) (2r-t)_+^5``: the two-point moment."""
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    return r * np.maximum(2 * r - 2 - t, 0.0) ** 5 + (1 - r) * np.maximum(2 * r - t, 0.0) ** 5


def verify_lemma_LR(r_grid, t_grid, use_numba=None):
    """``L(r, t) <= R(t) + 1e-9 max(1, |R|)`` on the product grid.

    The report carries the smallest normalised gap ``(R - L)/max(1, |R|)`` as
    ``min_slack`` with its location, and the smallest raw gap.
    """
    r = np.asarray(r_grid, dtype=float)
    t = np.asarray(t_grid, dtype=float)
    if r.size == 0 or t.size == 0:
        raise DomainError("grids must be non-empty")
    if np.any((r < 0) | (r > 1)):
        raise DomainError("r must lie in [0, 1]")
    R = np.atleast_1d(closed_form_R(t))
    rel, i, j, gap = lemma_grid_scan(r, t, R, use_numba=use_numba)
    rep = VerificationReport(
        "lemma",
        meta=dict(
            min_slack=rel,
            min_gap=gap,
            at_r=float(r[i]),
            at_t=float(t[j]),
            points=int(r.size * t.size),
        ),
    )
    L = float(lemma_L(r[i], t[j]))
    rep.checks.append(Check("L(r,t)<=R(t)", float(t[j]), L, float(R[j]), rel >= -LEMMA_SLACK))
    return rep


def verify_maximal_moment(model, ab, x, t, enum=None):
    """Maximal and snapshot moment inequalities on an enumerated martingale.

    Checks ``E(M_n-x)_+^b <= k1 E(S_n-t)_+^a/(x-t)^(a-b)``, the ``b = 0`` Doob
    case ``P(M_n >= x) <= E(S_n-t)_+^a/(x-t)^a``, the snapshot version with
    ``k``, and for ``a == b`` also ``E(M_n)_+^a <= (a/(a-1))^a E(S_n)_+^a``.
    """
    if isinstance(ab, K.AlphaBeta):
        alpha, beta = ab.alpha, ab.beta
    else:
        alpha, beta = ab
        K.AlphaBeta(alpha, beta)
    if model.kind != "martingale":
        raise DomainError("maximal inequalities need a martingale model")
    if not x > t:
        raise DomainError(f"need x > t, got x={x}, t={t}")
    enum = _enumerated(model, enum)
    rep = VerificationReport("maximal", meta=dict(model=model.name, alpha=alpha, beta=beta, x=x, t=t))
    snap = enum.moment(t, alpha)
    rep.add("E(M_n-x)_+^b", x, enum.max_moment(x, beta), maximal_moment_bound(alpha, beta, x, t, snap))
    rep.add("P(M_n>=x) Doob", x, enum.max_tail(x), snap / (x - t) ** alpha)
    rep.add("E(S_n-x)_+^b", x, enum.moment(x, beta), snapshot_moment_bound(alpha, beta, x, t, snap))
    if beta == alpha:
        rep.add(
            "E(M_n)_+^a Doob",
            0.0,
            enum.max_moment(0.0, alpha),
            (alpha / (alpha - 1.0)) ** alpha * enum.moment(0.0, alpha),
        )
    return rep


def verify_centering(model, x_grid=None):
    """Tails of the centred model dominate those of the original supermartingale."""
    from .models import center_model

    model.validate()
    centred = center_model(model).validate()
    e0, e1 = enumerate_exact(model), enumerate_exact(centred)
    grid = lattice_grid(e0) if x_grid is None else np.asarray(x_grid, dtype=float)
    rep = VerificationReport("centering", meta=dict(model=model.name))
    for x in grid:
        rep.add("P(S_n>=x) vs centred", x, e0.tail(x), e1.tail(x))
    return rep
