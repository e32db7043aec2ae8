"""Finite adapted (super)martingale models.

A model is a list of steps. Each step has a default conditional law and
optional history-specific laws keyed by the tuple of support indices drawn
at the earlier steps. Every law carries the declared data the bounds rely on:
a bracket ``C <= X <= D`` with a per-step half-range ``s``, or an upper bound
``D`` with a conditional variance bound ``var`` and a per-step ``s_hat``.
"""
import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..constants import aggregate
from ..errors import DomainError, ValidationError

__all__ = [
    "Branch",
    "Step",
    "MartingaleModel",
    "TwoPointIncrement",
    "two_point_increment",
    "rademacher_model",
    "two_point_model",
    "adapted_sign_model",
    "drifted_model",
    "skewed_variance_model",
    "center_model",
    "model_from_spec",
    "MEAN_TOL",
]

MEAN_TOL = 1e-12
_REL_TOL = 1e-12


@dataclass(frozen=True)
class Branch:
    """One conditional increment law with its declared bracket data."""

    support: tuple
    probs: tuple
    C: float = None
    D: float = None
    var: float = None

    def mean(self):
        return math.fsum(p * v for p, v in zip(self.probs, self.support))

    def variance(self):
        mu = self.mean()
        return math.fsum(p * (v - mu) ** 2 for p, v in zip(self.probs, self.support))


@dataclass(frozen=True)
class Step:
    default: Branch
    branches: tuple = ()  # ((history_tuple, Branch), ...)
    s: float = None
    s_hat: float = None

    @property
    def form(self):
        return "bracket" if self.s is not None else "variance"

    @property
    def scale(self):
        return self.s if self.s is not None else self.s_hat

    def law_for(self, history):
        for key, br in self.branches:
            if key == tuple(history):
                return br
        return self.default


@dataclass
class MartingaleModel:
    steps: list
    kind: str = "martingale"
    initial: float = 0.0
    name: str = ""
    _compiled: object = field(default=None, repr=False, compare=False)

    @property
    def n(self):
        return len(self.steps)

    def scale(self):
        """Aggregate scale ``sqrt(sum s_i^2)`` (``s_hat`` for variance-form steps)."""
        return aggregate([st.scale for st in self.steps]).aggregate

    def validate(self):
        """Check every declared condition law by law; raise :class:`ValidationError`."""
        if self.kind not in ("martingale", "supermartingale"):
            raise ValidationError(f"unknown kind {self.kind!r}", "$.kind")
        if not (math.isfinite(self.initial) and self.initial <= 0):
            raise ValidationError("initial value must be finite and <= 0", "$.initial")
        if not self.steps:
            raise ValidationError("model needs at least one step", "$.steps")
        for i, st in enumerate(self.steps):
            base = f"$.steps[{i}]"
            if (st.s is None) == (st.s_hat is None):
                raise ValidationError("declare exactly one of s or s_hat", base)
            if not (st.scale > 0 and math.isfinite(st.scale)):
                raise ValidationError("declared scale must be positive", base)
            _validate_branch(st.default, st, self.kind, base)
            for j, (key, br) in enumerate(st.branches):
                path = f"{base}.branches[{j}]"
                if len(key) != i:
                    raise ValidationError(f"history key has length {len(key)}, expected {i}", path)
                _validate_branch(br, st, self.kind, path)
        return self

    def compiled(self):
        if self._compiled is None:
            from .compiled import compile_model

            self._compiled = compile_model(self)
        return self._compiled


def _validate_branch(br, st, kind, path):
    sup = np.asarray(br.support, dtype=float)
    pr = np.asarray(br.probs, dtype=float)
    if sup.ndim != 1 or sup.size == 0 or sup.shape != pr.shape:
        raise ValidationError("support and probs must be non-empty lists of equal length", path)
    if not np.all(np.isfinite(sup)):
        raise ValidationError("support must be finite", path + ".support")
    if np.any(pr < 0) or abs(math.fsum(pr) - 1.0) > 1e-12:
        raise ValidationError("probabilities must be >= 0 and sum to 1", path + ".probs")
    if len(set(sup.tolist())) != sup.size:
        raise ValidationError("support points must be distinct", path + ".support")
    mean = br.mean()
    if kind == "martingale" and abs(mean) > MEAN_TOL:
        raise ValidationError(f"conditional mean {mean:.3g} is not 0", path)
    if kind == "supermartingale" and mean > MEAN_TOL:
        raise ValidationError(f"conditional mean {mean:.3g} is positive", path)
    live = sup[pr > 0]
    if st.form == "bracket":
        if br.C is None or br.D is None:
            raise ValidationError("bracket-form step needs C and D", path)
        tol = _REL_TOL * max(1.0, abs(br.C), abs(br.D))
        if np.any(live < br.C - tol) or np.any(live > br.D + tol):
            raise ValidationError(f"support leaves [C, D] = [{br.C}, {br.D}]", path + ".support")
        if br.D - br.C > 2.0 * st.s * (1.0 + _REL_TOL):
            raise ValidationError(f"D - C = {br.D - br.C} exceeds 2 s = {2.0 * st.s}", path)
    else:
        if br.D is None or br.var is None:
            raise ValidationError("variance-form step needs D and var", path)
        if not br.D > 0:
            raise ValidationError("D must be positive", path + ".D")
        tol = _REL_TOL * max(1.0, abs(br.D))
        if np.any(live > br.D + tol):
            raise ValidationError(f"support exceeds D = {br.D}", path + ".support")
        if br.variance() > br.var * (1.0 + _REL_TOL) + 1e-15:
            raise ValidationError(f"conditional variance {br.variance():.6g} exceeds var = {br.var}", path)
        if 0.5 * (br.D + br.var / br.D) > st.s_hat * (1.0 + _REL_TOL):
            raise ValidationError("(D + var/D)/2 exceeds s_hat", path)


@dataclass(frozen=True)
class TwoPointIncrement:
    """Mean-zero law on ``{2r - 2, 2r}`` with ``P(2r) = 1 - r``."""

    r: float

    @property
    def hi(self):
        return 2.0 * self.r

    @property
    def lo(self):
        return 2.0 * self.r - 2.0

    def mean(self):
        return (1.0 - self.r) * self.hi + self.r * self.lo

    def variance(self):
        return (1.0 - self.r) * self.hi**2 + self.r * self.lo**2 - self.mean() ** 2

    def branch(self):
        return Branch(support=(self.lo, self.hi), probs=(self.r, 1.0 - self.r), C=self.lo, D=self.hi)


def two_point_increment(r):
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"r must lie in [0, 1], got {r}")
    return TwoPointIncrement(float(r))


def rademacher_model(weights):
    """Independent ``a_i e_i`` increments with ``C = -|a_i|``, ``D = |a_i|``, ``s_i = |a_i|``."""
    weights = [float(a) for a in weights]
    if not weights:
        raise DomainError("need at least one weight")
    if any(a == 0 for a in weights):
        raise DomainError("weights must be nonzero")
    steps = []
    for a in weights:
        a = abs(a)
        steps.append(Step(default=Branch((-a, a), (0.5, 0.5), C=-a, D=a), s=a))
    return MartingaleModel(steps=steps, kind="martingale", name=f"rademacher({len(weights)})")


def two_point_model(r, n=1):
    inc = two_point_increment(r)
    steps = [Step(default=inc.branch(), s=1.0) for _ in range(n)]
    return MartingaleModel(steps=steps, kind="martingale", name=f"two-point({r},{n})")


def adapted_sign_model(n=6):
    """Martingale whose upper bracket ``D_{i-1}`` depends on the sign of ``S_{i-1}``.

    Step 0 is a fair sign. Afterwards the increment is the two-point law with
    ``r = 0.3`` (``D = 0.6``) when ``S_{i-1} > 0`` and ``r = 0.7`` (``D = 1.4``)
    otherwise; all laws have range 2, so ``s_i = 1``.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    up, down = two_point_increment(0.3).branch(), two_point_increment(0.7).branch()
    first = Branch((-1.0, 1.0), (0.5, 0.5), C=-1.0, D=1.0)
    steps = [Step(default=first, s=1.0)]
    # enumerate histories to find which ones end with S > 0
    frontier = [((), 0.0)]
    for i in range(1, n):
        prev = steps[i - 1]
        nxt = []
        for hist, s in frontier:
            law = prev.law_for(hist)
            for j, v in enumerate(law.support):
                nxt.append((hist + (j,), s + v))
        frontier = nxt
        keyed = tuple((h, up) for h, s in frontier if s > 0)
        steps.append(Step(default=down, branches=keyed, s=1.0))
    return MartingaleModel(steps=steps, kind="martingale", name=f"adapted-sign({n})")


def drifted_model(n, drift):
    """Supermartingale with increments ``e_i - drift`` (``drift >= 0``)."""
    if drift < 0:
        raise DomainError("drift must be nonnegative")
    br = Branch((-1.0 - drift, 1.0 - drift), (0.5, 0.5), C=-1.0 - drift, D=1.0 - drift)
    return MartingaleModel(
        steps=[Step(default=br, s=1.0) for _ in range(n)], kind="supermartingale", name=f"drifted({n},{drift})"
    )


def skewed_variance_model(n):
    """Variance-form martingale: increments on ``{-10, 0, 1}`` with probabilities
    ``(0.01, 0.89, 0.10)``, so ``D = 1``, ``var = 1.1`` and ``s_hat = 1.05``
    while the bracket half-range would be 5.5."""
    br = Branch((-10.0, 0.0, 1.0), (0.01, 0.89, 0.10), D=1.0, var=1.1)
    return MartingaleModel(
        steps=[Step(default=br, s_hat=1.05) for _ in range(n)], kind="martingale", name=f"skewed({n})"
    )


def center_model(model):
    """Replace every law by its conditionally centred version.

    Only bracket-form steps are supported; the bracket shifts with the mean.
    Pathwise the centred increments dominate the originals.
    """

    def shift(br):
        mu = br.mean()
        return Branch(
            support=tuple(v - mu for v in br.support), probs=br.probs, C=br.C - mu, D=br.D - mu
        )

    steps = []
    for st in model.steps:
        if st.form != "bracket":
            raise DomainError("centring is defined for bracket-form steps only")
        steps.append(replace(st, default=shift(st.default), branches=tuple((k, shift(b)) for k, b in st.branches)))
    return MartingaleModel(steps=steps, kind="martingale", initial=model.initial, name=f"centred({model.name})")


def model_from_spec(text):
    """Build a builtin model from ``name[:arg[:arg]]``.

    Names: ``rademacher:N``, ``rademacher-linear:N`` (weights proportional to
    i, unit norm), ``two-point:R[:N]``, ``adapted-sign[:N]``,
    ``drifted:N:DRIFT``, ``skewed:N``.
    """
    name, *args = text.split(":")
    try:
        if name == "rademacher":
            n = int(args[0])
            return rademacher_model([1.0 / math.sqrt(n)] * n)
        if name == "rademacher-linear":
            n = int(args[0])
            norm = math.sqrt(sum(i * i for i in range(1, n + 1)))
            m = rademacher_model([i / norm for i in range(1, n + 1)])
            m.name = f"rademacher-linear({n})"
            return m
        if name == "two-point":
            return two_point_model(float(args[0]), int(args[1]) if len(args) > 1 else 1)
        if name == "adapted-sign":
            return adapted_sign_model(int(args[0]) if args else 6)
        if name == "drifted":
            return drifted_model(int(args[0]), float(args[1]))
        if name == "skewed":
            return skewed_variance_model(int(args[0]))
    except (IndexError, ValueError) as exc:
        raise DomainError(f"bad model spec {text!r}: {exc}") from None
    raise DomainError(f"unknown builtin model {name!r}")
