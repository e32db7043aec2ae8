"""Constant families c, k, k1, k2, k3 and the one-step scale helpers.

Values at ``beta = 0`` are the ``beta -> 0`` limits, so ``0**0`` is read as 1.
All constants are memoised on the exact ``(alpha, beta)`` floats.
"""
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from ._search import golden_max
from .errors import DomainError

__all__ = [
    "AlphaBeta",
    "StepScale",
    "ScaleVector",
    "c_const",
    "k_const",
    "k1_const",
    "k1_maximizer",
    "k1_objective",
    "k2_const",
    "k3_const",
    "sigma_star",
    "step_scale",
    "aggregate",
    "variance_cap",
    "C50",
]

# log(sigma) bracket for the k1 search; the objective tends to 0 at both ends.
K1_LOG_BRACKET = (-14.0, 14.0)
K1_TOL = 1e-10


@dataclass(frozen=True)
class AlphaBeta:
    alpha: float
    beta: float

    def __post_init__(self):
        _check_ab(self.alpha, self.beta)


@dataclass(frozen=True)
class StepScale:
    d: float
    variance: float
    s_hat: float


@dataclass(frozen=True)
class ScaleVector:
    entries: tuple
    aggregate: float


def _check_ab(alpha, beta, strict_alpha_gt1=False):
    if not (math.isfinite(alpha) and math.isfinite(beta)):
        raise DomainError("alpha and beta must be finite")
    if alpha <= 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if beta < 0 or beta > alpha:
        raise DomainError(f"need 0 <= beta <= alpha, got alpha={alpha}, beta={beta}")
    if strict_alpha_gt1 and alpha <= 1:
        raise DomainError(f"alpha must exceed 1, got {alpha}")


def _unpack(alpha, beta):
    if isinstance(alpha, AlphaBeta):
        return float(alpha.alpha), float(alpha.beta)
    return float(alpha), float(beta)


def _xlogx(x):
    return 0.0 if x == 0 else x * math.log(x)


def _log_h(a):
    # log of Gamma(a+1) (e/a)^a, with the a -> 0 limit 0
    if a == 0:
        return 0.0
    return math.lgamma(a + 1.0) + a - a * math.log(a)


@lru_cache(maxsize=None)
def _c(alpha, beta):
    _check_ab(alpha, beta)
    return math.exp(_log_h(alpha) - _log_h(beta))


def c_const(alpha, beta=None):
    """``Gamma(a+1)(e/a)^a / (Gamma(b+1)(e/b)^b)``; ``c_const(5, 0) = 5.699...``."""
    return _c(*_unpack(alpha, beta))


@lru_cache(maxsize=None)
def _k(alpha, beta):
    _check_ab(alpha, beta)
    return math.exp(_xlogx(beta) + _xlogx(alpha - beta) - _xlogx(alpha))


def k_const(alpha, beta=None):
    """Best constant in ``(u-x)_+^b <= k (u-t)_+^a / (x-t)^(a-b)``."""
    return _k(*_unpack(alpha, beta))


@lru_cache(maxsize=None)
def _k2(alpha, beta):
    _check_ab(alpha, beta, strict_alpha_gt1=True)
    if beta == alpha:
        raise DomainError("k2 has a Gamma(0) pole at beta == alpha")
    return math.exp(math.lgamma(1.0 + beta) + math.lgamma(alpha - beta) - math.lgamma(alpha))


def k2_const(alpha, beta=None):
    """``Gamma(1+b) Gamma(a-b) / Gamma(a)``; defined for ``beta < alpha``."""
    return _k2(*_unpack(alpha, beta))


def k3_const(alpha, beta=None):
    alpha, beta = _unpack(alpha, beta)
    _check_ab(alpha, beta, strict_alpha_gt1=True)
    return k_const(alpha, beta) * (alpha / (alpha - 1.0)) ** alpha


def _log_inner_integral(log_sigma, beta):
    """Log of ``F(sigma) = int_0^sigma beta s^(beta-1) / (1+s) ds``.

    On ``[0, min(sigma, 1)]`` the ``s^(beta-1)`` singularity is integrated
    exactly and only a smooth remainder goes to quadrature (a direct
    substitution misses a boundary layer of width ~beta when beta is small);
    the part above 1 is integrated in ``y = log s`` where the integrand is smooth.
    """
    head_scale = min(log_sigma, 0.0)
    h = math.exp(head_scale)
    # int_0^h b s^(b-1)/(1+s) ds = h^b - b int_0^h s^b/(1+s) ds, and with
    # s = h w^(1/(b+1)) the last integral is h^(b+1)/(b+1) int_0^1 dw/(1 + s)
    e = 1.0 / (beta + 1.0)
    inner = quad(lambda w: 1.0 / (1.0 + h * w**e), 0.0, 1.0, epsabs=0.0, epsrel=1e-13, limit=200)[0]
    log_head = beta * head_scale + math.log1p(-beta * e * h * inner)
    if log_sigma <= 0.0:
        return log_head
    # beta e^{beta y} / (1 + e^y), scaled by e^{-(beta-1) L} to stay in range;
    # the factor beta is kept outside so subnormal beta does not starve quad
    shift = max(beta - 1.0, 0.0) * log_sigma
    tail = quad(
        lambda y: math.exp((beta - 1.0) * y - shift) / (1.0 + math.exp(-y)),
        0.0,
        log_sigma,
        epsabs=0.0,
        epsrel=1e-13,
        limit=200,
    )[0]
    return float(np.logaddexp(shift + math.log(beta) + math.log(tail), log_head))


def k1_objective(log_sigma, alpha, beta):
    """Log of ``sigma^(-b(a-1)) (int_0^sigma b s^(b-1)/(1+s) ds)^a``.

    ``log_sigma = inf`` gives the ``sigma -> inf`` limit, which is finite and
    nonzero only when ``beta == alpha``.
    """
    if beta == 0:
        return 0.0
    if math.isinf(log_sigma) and log_sigma > 0:
        if beta < alpha:
            return -math.inf
        # sigma^(1-alpha) F(sigma) -> alpha int_0^1 v^(alpha-2) dv; QUADPACK's
        # algebraic weight integrates the endpoint singularity exactly
        lim = quad(lambda v: alpha, 0.0, 1.0, weight="alg", wvar=(alpha - 2.0, 0.0))[0]
        return alpha * math.log(lim)
    return alpha * _log_inner_integral(log_sigma, beta) - beta * (alpha - 1.0) * log_sigma


@lru_cache(maxsize=None)
def _k1_search(alpha, beta):
    _check_ab(alpha, beta, strict_alpha_gt1=True)
    if beta == 0:
        return 1.0, math.nan
    lo, hi = K1_LOG_BRACKET
    # coarse scan picks the basin, golden section refines it
    grid = np.linspace(lo, hi, 57)
    vals = [k1_objective(g, alpha, beta) for g in grid]
    j = int(np.argmax(vals))
    a = grid[max(j - 1, 0)]
    b = grid[min(j + 1, len(grid) - 1)]
    x, fx = golden_max(lambda u: k1_objective(u, alpha, beta), a, b, tol=K1_TOL)
    f_inf = k1_objective(math.inf, alpha, beta)
    if f_inf > fx:
        # objective still increasing at the bracket edge: sup is the sigma -> inf limit
        return math.exp(f_inf), math.inf
    return math.exp(fx), math.exp(x)


def k1_const(alpha, beta=None):
    """``sup_sigma sigma^(-b(a-1)) (int_0^sigma b s^(b-1)/(1+s) ds)^a``, alpha > 1.

    ``k1(alpha, 0) = 1`` by convention. For ``beta == alpha`` the objective is
    increasing and the supremum is its limit at infinity.
    """
    return _k1_search(*_unpack(alpha, beta))[0]


def k1_maximizer(alpha, beta=None):
    """The sigma attaining the k1 supremum (``inf`` when it is a limit, nan at beta=0)."""
    return _k1_search(*_unpack(alpha, beta))[1]


C50 = c_const(5.0, 0.0)


def sigma_star(d0, var):
    """``(1/2) inf_{d >= d0} (d + var/d)``."""
    if not d0 > 0:
        raise DomainError(f"d0 must be positive, got {d0}")
    if var < 0:
        raise DomainError(f"variance must be nonnegative, got {var}")
    sigma = math.sqrt(var)
    if sigma >= d0:
        return sigma
    return 0.5 * (d0 + var / d0)


def step_scale(d, var):
    """``s_hat = (d + var/d) / 2`` for one increment bounded above by ``d``."""
    if not d > 0:
        raise DomainError(f"d must be positive, got {d}")
    if var < 0:
        raise DomainError(f"variance must be nonnegative, got {var}")
    return StepScale(d=float(d), variance=float(var), s_hat=0.5 * (d + var / d))


def aggregate(scales):
    """Euclidean norm of the per-step scales, summed with ``math.fsum``."""
    entries = tuple(float(s) for s in scales)
    if not entries:
        raise DomainError("need at least one scale")
    if any(not (s > 0 and math.isfinite(s)) for s in entries):
        raise DomainError("scales must be positive and finite")
    big = max(entries)
    norm = big * math.sqrt(math.fsum((s / big) ** 2 for s in entries))
    return ScaleVector(entries=entries, aggregate=norm)


def variance_cap(c, d):
    """Largest variance of a mean-zero law on ``[c, d]``: ``|c| d``."""
    if not (c < 0 < d):
        raise DomainError(f"need c < 0 < d, got c={c}, d={d}")
    return abs(c) * d
