"""Tail and moment bounds for supermartingales with bracketed increments.

Every tail bound here depends on ``(x, s)`` only through ``x / s``; ``s`` is
the aggregate scale (``s``, ``s_hat`` or a Lipschitz radius ``r``).
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import constants as K
from ._search import golden_min
from .errors import BudgetError, DomainError
from .normal_kernel import scaled_moment, upper_tail

__all__ = [
    "BoundReport",
    "OptimalBound",
    "hoeffding_bound",
    "pinelis_bound",
    "combined_bound",
    "optimal_bound",
    "bound_report",
    "truncation_bound",
    "maximal_tail_bound",
    "maximal_moment_bound",
    "snapshot_moment_bound",
    "pointwise_k_check",
    "rademacher_discrete_bound",
    "rademacher_tail",
    "pinelis_hoeffding_crossover",
    "MAX_RADEMACHER_N",
]

MOMENT_ORDER = 5
# the exact binomial route keeps every coefficient inside 64 bits
MAX_RADEMACHER_N = 62
# optimal_bound scans t = x - s * 10**j over this range of j before refining
OPT_SCAN_DECADES = (-6.0, 6.0)
OPT_SCAN_POINTS = 241
OPT_REL_TOL = 1e-8


@dataclass(frozen=True)
class OptimalBound:
    value: float
    arg_t: float
    boundary_limit: bool


@dataclass(frozen=True)
class BoundReport:
    x: float
    scale: float
    hoeffding: float
    pinelis: float
    combined: float
    optimal: float
    optimal_t: float
    boundary_limit: bool

    def as_dict(self):
        return dict(self.__dict__)


def _check_scale(scale):
    if not (scale > 0 and math.isfinite(scale)):
        raise DomainError(f"scale must be positive and finite, got {scale}")


def hoeffding_bound(x, scale):
    """``exp(-x^2 / 2s^2)`` for x > 0 and 1 otherwise."""
    _check_scale(scale)
    if x <= 0:
        return 1.0
    return math.exp(-0.5 * (x / scale) ** 2)


def pinelis_bound(x, scale):
    """``c_{5,0} Psi(x/s)``; not clamped, so it exceeds 1 for small x."""
    _check_scale(scale)
    return K.C50 * upper_tail(x / scale)


def combined_bound(x, scale):
    return min(1.0, hoeffding_bound(x, scale), pinelis_bound(x, scale))


def _ratio(tau, d):
    # E(Z - (tau - d))_+^5 / d^5, the optimal-bound objective in units of s
    return scaled_moment(1.0, tau - d, MOMENT_ORDER) / d**MOMENT_ORDER


def optimal_bound(x, scale):
    """``inf_{t < x} E(sZ - t)_+^5 / (x - t)^5``.

    The objective is scanned at ``t = x - s 10^j`` and refined by golden
    section in ``log10(x - t)``. The objective tends to 1 as ``t -> -inf``, so
    the value is capped at 1; ``boundary_limit`` flags that the infimum was
    approached at the far end of the scan rather than attained inside it.
    """
    _check_scale(scale)
    tau = x / scale
    js = np.linspace(*OPT_SCAN_DECADES, OPT_SCAN_POINTS)
    ds = 10.0**js
    vals = np.asarray(scaled_moment(1.0, tau - ds, MOMENT_ORDER)) / ds**MOMENT_ORDER
    i = int(np.argmin(vals))
    lo, hi = js[max(i - 1, 0)], js[min(i + 1, len(js) - 1)]
    # golden section on log10(d): an absolute step in j is a relative step in d
    j_best, v_best = golden_min(lambda j: _ratio(tau, 10.0**j), lo, hi, tol=OPT_REL_TOL / math.log(10.0))
    if vals[i] < v_best:
        j_best, v_best = float(js[i]), float(vals[i])
    if v_best >= 1.0:
        return OptimalBound(value=1.0, arg_t=-math.inf, boundary_limit=True)
    return OptimalBound(
        value=float(v_best),
        arg_t=float(x - scale * 10.0**j_best),
        boundary_limit=i == len(js) - 1,
    )


def bound_report(x, scale):
    opt = optimal_bound(x, scale)
    return BoundReport(
        x=float(x),
        scale=float(scale),
        hoeffding=hoeffding_bound(x, scale),
        pinelis=pinelis_bound(x, scale),
        combined=combined_bound(x, scale),
        optimal=opt.value,
        optimal_t=opt.arg_t,
        boundary_limit=opt.boundary_limit,
    )


def truncation_bound(exceed_probs, x, s_hat):
    """``min(1, sum_i P(X_i >= D_{i-1}) + combined_bound(x, s_hat))``.

    This is the union-bound form; the max-of-ratios event it relaxes is not
    computable from per-step summaries.
    """
    probs = [float(p) for p in exceed_probs]
    for i, p in enumerate(probs):
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"exceedance probability {i} must lie in [0, 1], got {p}")
    return min(1.0, math.fsum(probs) + combined_bound(x, s_hat))


def maximal_tail_bound(x, scale):
    """Bound on ``P(M_n >= x)`` for a martingale started at 0; same value as
    :func:`combined_bound`."""
    return combined_bound(x, scale)


def _moment_ratio_args(alpha, beta, x, t, snapshot_moment):
    if not x > t:
        raise DomainError(f"need x > t, got x={x}, t={t}")
    if snapshot_moment < 0:
        raise DomainError("snapshot moment must be nonnegative")
    return snapshot_moment / (x - t) ** (alpha - beta)


def maximal_moment_bound(alpha, beta, x, t, snapshot_moment):
    """``k1(a, b) E(S_n - t)_+^a / (x - t)^(a-b)``, a bound on ``E(M_n - x)_+^b``.

    ``snapshot_moment`` is the caller's value (or upper bound) for
    ``E(S_n - t)_+^alpha``. The documented recipe for the M_n analogue of the
    ``c_{5,b}`` comparison uses alpha = 5.
    """
    ratio = _moment_ratio_args(alpha, beta, x, t, snapshot_moment)
    return K.k1_const(alpha, beta) * ratio


def snapshot_moment_bound(alpha, beta, x, t, snapshot_moment):
    """``k(a, b) E(S_n - t)_+^a / (x - t)^(a-b)``, a bound on ``E(S_n - x)_+^b``."""
    ratio = _moment_ratio_args(alpha, beta, x, t, snapshot_moment)
    return K.k_const(alpha, beta) * ratio


def _pos_pow(v, p):
    # (v)_+^p with the indicator convention 1{v >= 0} at p = 0
    if p == 0:
        return 1.0 if v >= 0 else 0.0
    return max(v, 0.0) ** p


def pointwise_k_check(alpha, beta, x, t, u, slack=1e-12):
    """Whether ``(u-x)_+^b <= k (u-t)_+^a / (x-t)^(a-b)`` holds at ``u``."""
    if not x > t:
        raise DomainError(f"need x > t, got x={x}, t={t}")
    lhs = _pos_pow(u - x, beta)
    rhs = K.k_const(alpha, beta) * _pos_pow(u - t, alpha) / (x - t) ** (alpha - beta)
    return lhs <= rhs + slack * max(1.0, abs(rhs))


def u_star(alpha, beta, x, t):
    """The ``u`` where the pointwise inequality is an equality."""
    if beta >= alpha:
        raise DomainError("u* needs beta < alpha")
    return (alpha * x - beta * t) / (alpha - beta)


def rademacher_tail(n, x):
    """Exact ``P(n^{-1/2} (e_1 + ... + e_n) >= x)`` for symmetric signs.

    ``x`` is compared on the integer lattice ``n - 2k`` with a 1e-9 tolerance so
    lattice values passed as floats are not lost to rounding.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    n = int(n)
    if n > MAX_RADEMACHER_N:
        raise BudgetError(f"n={n} exceeds the exact-coefficient limit {MAX_RADEMACHER_N}")
    thresh = x * math.sqrt(n)
    hits = sum(math.comb(n, k) for k in range(n + 1) if n - 2 * k >= thresh - 1e-9)
    return hits / 2.0**n


def rademacher_discrete_bound(n, x):
    """``(2e^3/9) P(n^{-1/2} sum e_i >= x)``; bounds ``P(sum a_i e_i >= x)`` for
    any unit-norm weights at lattice values ``x`` of the normalised sum."""
    return K.c_const(3.0, 0.0) * rademacher_tail(n, x)


def pinelis_hoeffding_crossover():
    """Root in (1, 3) of ``c_{5,0} Psi(u) = exp(-u^2/2)``."""
    return brentq(lambda u: K.C50 * upper_tail(u) - math.exp(-0.5 * u * u), 1.0, 3.0, xtol=1e-14)
