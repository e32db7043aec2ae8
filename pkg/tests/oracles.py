"""Independent reference implementations used by the tests.

Nothing here imports the package's numerics; each oracle takes a different
route (quadrature, arbitrary precision, brute force) to the same quantity.
"""
import itertools
import math
from fractions import Fraction

import mpmath as mp
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

SQRT2PI = math.sqrt(2.0 * math.pi)


def quad_moment(alpha, t):
    """``E(Z - t)_+^alpha`` by adaptive quadrature.

    For t >= 0 the density is factored as ``phi(t) exp(-t u - u^2/2)`` so the
    integrand is O(1) and the result keeps relative accuracy deep in the tail.
    """
    if t >= 0:
        f = lambda u: u**alpha * math.exp(-t * u - 0.5 * u * u)
        val = quad(f, 0.0, math.inf, epsabs=0.0, epsrel=1e-13, limit=400)[0]
        return val * math.exp(-0.5 * t * t) / SQRT2PI
    f = lambda z: (z - t) ** alpha * math.exp(-0.5 * z * z) / SQRT2PI
    head = quad(f, t, 0.0, epsabs=0.0, epsrel=1e-13, limit=400)[0]
    tail = quad(f, 0.0, math.inf, epsabs=0.0, epsrel=1e-13, limit=400)[0]
    return head + tail


def mp_moment(alpha, t, dps=120):
    """``E(Z - t)_+^alpha`` by the forward recursion carried at ``dps`` digits."""
    with mp.workdps(dps):
        t = mp.mpf(t)
        m0 = mp.erfc(t / mp.sqrt(2)) / 2
        dens = mp.exp(-t * t / 2) / mp.sqrt(2 * mp.pi)
        m = [m0, dens - t * m0]
        for a in range(2, alpha + 1):
            m.append((a - 1) * m[a - 2] - t * m[a - 1])
        return m[alpha]


def mp_R(t, dps=120):
    with mp.workdps(dps):
        t = mp.mpf(t)
        P = 8 + 9 * t**2 + t**4
        Q = t * (15 + 10 * t**2 + t**4)
        return P * mp.exp(-t * t / 2) / mp.sqrt(2 * mp.pi) - Q * mp.erfc(t / mp.sqrt(2)) / 2


def mp_mills(t, dps=60):
    with mp.workdps(dps):
        t = mp.mpf(t)
        return (mp.erfc(t / mp.sqrt(2)) / 2) / (mp.exp(-t * t / 2) / mp.sqrt(2 * mp.pi))


def mp_c(alpha, beta):
    def h(a):
        a = mp.mpf(a)
        return mp.mpf(1) if a == 0 else mp.gamma(a + 1) * (mp.e / a) ** a

    return h(alpha) / h(beta)


def k_oracle(alpha, beta):
    # direct maximisation of (u-x)^b / (u-t)^a at x - t = 1 over u > x
    if beta == 0:
        return 1.0
    f = lambda u: -(u**beta) / (u + 1.0) ** alpha
    res = minimize_scalar(f, bounds=(1e-9, 1e6), method="bounded", options={"xatol": 1e-12})
    best = -res.fun
    u_star = beta / (alpha - beta) if alpha > beta else None
    if u_star is not None:
        best = max(best, u_star**beta / (u_star + 1.0) ** alpha)
    return best


def k1_objective_oracle(sigma, alpha, beta):
    """``sigma^(-b(a-1)) F(sigma)^a`` with ``F(sigma) = sigma^b 2F1(b, 1; b+1; -sigma)``."""
    with mp.workdps(30):
        s = mp.mpf(sigma)
        F = s**beta * mp.hyp2f1(beta, 1, beta + 1, -s)
        return float(s ** (-beta * (alpha - 1)) * F**alpha)


def k1_oracle(alpha, beta):
    if beta == 0:
        return 1.0
    f = lambda y: -k1_objective_oracle(math.exp(y), alpha, beta)
    grid = [-12 + 0.5 * i for i in range(49)]
    y0 = min(grid, key=f)
    res = minimize_scalar(f, bounds=(y0 - 0.5, y0 + 0.5), method="bounded", options={"xatol": 1e-10})
    return -res.fun


def lemma_L_mp(r, t):
    with mp.workdps(50):
        r, t = mp.mpf(r), mp.mpf(t)
        pos = lambda v: v**5 if v > 0 else mp.mpf(0)
        return r * pos(2 * r - 2 - t) + (1 - r) * pos(2 * r - t)


def brute_paths(steps, initial=0.0):
    """Walk every path of a model given as a callable ``steps(i, history) ->
    (support, probs)``; returns a list of ``(S_n, M_n, Fraction prob)``."""
    out = []

    def walk(i, hist, s, m, p):
        law = steps(i, hist)
        if law is None:
            out.append((s, m, p))
            return
        support, probs = law
        for j, (v, q) in enumerate(zip(support, probs)):
            if q == 0:
                continue
            s2 = s + v
            walk(i + 1, hist + (j,), s2, max(m, s2), p * Fraction(q))

    walk(0, (), initial, initial, Fraction(1))
    return out


def rademacher_exact(weights):
    """Exact law of ``sum a_i e_i`` as ``{value: Fraction}`` (values summed in index order)."""
    law = {}
    for signs in itertools.product((-1, 1), repeat=len(weights)):
        v = 0.0
        for a, e in zip(weights, signs):
            v += a * e
        law[v] = law.get(v, Fraction(0)) + Fraction(1, 2 ** len(weights))
    return law


def binomial_tail(n, k_min):
    """``P(Bin(n, 1/2) >= k_min)`` as a Fraction."""
    return Fraction(sum(math.comb(n, k) for k in range(max(k_min, 0), n + 1)), 2**n)
