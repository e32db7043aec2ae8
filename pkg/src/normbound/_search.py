"""One-dimensional golden-section search used by the constant and bound optimisers."""
import math

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_max(f, lo, hi, tol=1e-10, max_iter=200):
    """Maximise a unimodal ``f`` on ``[lo, hi]``.

    Returns ``(x_best, f_best)``. The endpoints are compared with the interior
    optimum so a monotone ``f`` returns the appropriate edge.
    """
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x, fx = (c, fc) if fc >= fd else (d, fd)
    for edge in (lo, hi):
        fe = f(edge)
        if fe > fx:
            x, fx = edge, fe
    return x, fx


def golden_min(f, lo, hi, tol=1e-10, max_iter=200):
    x, fx = golden_max(lambda u: -f(u), lo, hi, tol=tol, max_iter=max_iter)
    return x, -fx
