import math

import numpy as np
import pytest

from normbound.errors import DomainError, ValidationError
from normbound.martingale_lab import (
    Branch,
    MartingaleModel,
    Step,
    adapted_sign_model,
    drifted_model,
    rademacher_model,
    skewed_variance_model,
    two_point_model,
    verify_centering,
    verify_lemma_LR,
    verify_maximal_moment,
    verify_moment_domination,
    verify_tail_domination,
)
from normbound.martingale_lab.verification import lemma_L
from normbound.normal_kernel import closed_form_R
from oracles import lemma_L_mp


def test_moments_rademacher_10():
    rep = verify_moment_domination(rademacher_model([1] * 10), t_grid=np.arange(-24, 25) * 0.25)
    assert rep.passed and len(rep.checks) == 49


def test_single_two_point_is_the_lemma():
    m = two_point_model(0.3)
    rep = verify_moment_domination(m, t_grid=np.linspace(-6, 6, 121))
    assert rep.passed
    # the one-step moment is exactly L(r, t)
    e_lhs = [c.lhs for c in rep.checks]
    assert e_lhs == pytest.approx(lemma_L(0.3, np.linspace(-6, 6, 121)), rel=1e-13, abs=1e-300)


def test_invalid_model_is_not_a_pass():
    wide = Branch((-1.5, 1.5), (0.5, 0.5), C=-1.5, D=1.5)
    with pytest.raises(ValidationError):
        verify_moment_domination(MartingaleModel(steps=[Step(default=wide, s=1.0)]))


def test_variance_form_model_passes():
    assert verify_moment_domination(skewed_variance_model(6)).passed
    assert verify_tail_domination(skewed_variance_model(6)).passed


def test_tails():
    rep = verify_tail_domination(rademacher_model([1] * 12))
    assert rep.passed
    labels = {c.label for c in rep.checks}
    assert labels == {"P(S_n>=x)", "P(M_n>=x)"}
    # below the lattice: P = 1 <= 1
    first = rep.checks[0]
    assert first.lhs == 1.0 and first.rhs == 1.0


def test_drifted_supermartingale():
    rep = verify_tail_domination(drifted_model(6, 0.3))
    assert rep.passed
    assert all(c.label == "P(S_n>=x)" for c in rep.checks)


def test_centering_dominates():
    assert verify_centering(drifted_model(6, 0.3)).passed


def test_violation_is_reported():
    # a wrong scale slips past nothing: shrink s after validation
    m = rademacher_model([1] * 4)
    rep = verify_moment_domination(m, t_grid=[0.0])
    rep.add("forced", 0.0, 2.0, 1.0)
    assert not rep.passed and rep.worst().label == "forced"


def test_lemma_examples():
    assert lemma_L(0.5, -3.0) == 528.0
    assert closed_form_R(-3.0) == pytest.approx(558.0, abs=0.05)
    assert lemma_L(1.0, 0.0) == 0.0
    assert closed_form_R(0.0) == pytest.approx(3.19, abs=0.01)
    for r in (0.1, 0.5, 0.9):
        assert lemma_L(r, 2 * r) == 0.0


@pytest.mark.parametrize("r,t", [(0.3, -2.0), (0.77, 0.1), (0.05, -20.0), (1.0, -29.99)])
def test_lemma_L_vs_mp(r, t):
    assert float(lemma_L(r, t)) == pytest.approx(float(lemma_L_mp(r, t)), rel=1e-13)


def test_lemma_asymptotics():
    # R(t) - L(1/2, t) -> -10 t
    t = -25.0
    gap = closed_form_R(t) - float(lemma_L(0.5, t))
    assert gap == pytest.approx(-10 * t, rel=0.02)


def test_lemma_small_grid():
    rep = verify_lemma_LR(np.linspace(0, 1, 41), np.linspace(-10, 2, 241))
    assert rep.passed and rep.min_slack > 0
    assert {"at_r", "at_t", "min_gap"} <= set(rep.meta)


def test_lemma_errors():
    with pytest.raises(DomainError):
        verify_lemma_LR([], [0.0])
    with pytest.raises(DomainError):
        verify_lemma_LR([1.5], [0.0])


def test_maximal_examples():
    m = rademacher_model([1] * 8)
    assert verify_maximal_moment(m, (2, 1), 1.0, 0.0).passed
    rep = verify_maximal_moment(m, (2, 2), 1.0, 0.0)
    assert rep.passed and any(c.label == "E(M_n)_+^a Doob" for c in rep.checks)
    # beta = 0: k1 = 1, the bound is Doob's
    rep0 = verify_maximal_moment(m, (3, 0), 1.0, -0.5)
    c0 = rep0.checks[0]
    assert c0.rhs == pytest.approx(rep0.checks[1].rhs)


def test_maximal_preconditions():
    with pytest.raises(DomainError):
        verify_maximal_moment(drifted_model(3, 0.1), (2, 1), 1.0, 0.0)
    with pytest.raises(DomainError):
        verify_maximal_moment(rademacher_model([1]), (2, 1), 0.0, 0.0)


@pytest.mark.parametrize("alpha,beta", [(1.5, 0.5), (2, 1), (3, 2), (5, 1), (5, 5)])
def test_maximal_on_adapted(alpha, beta):
    assert verify_maximal_moment(adapted_sign_model(7), (alpha, beta), 1.5, -0.5).passed


def test_report_dict():
    d = verify_tail_domination(rademacher_model([1])).as_dict()
    assert d["passed"] and math.isfinite(d["min_slack"])
