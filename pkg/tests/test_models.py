import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from normbound.errors import DomainError, ValidationError
from normbound.martingale_lab import (
    Branch,
    MartingaleModel,
    Step,
    adapted_sign_model,
    center_model,
    drifted_model,
    model_from_spec,
    rademacher_model,
    skewed_variance_model,
    two_point_increment,
    two_point_model,
)


def test_two_point_examples():
    half = two_point_increment(0.5)
    assert (half.lo, half.hi) == (-1.0, 1.0)
    zero = two_point_increment(0.0)
    assert zero.branch().probs == (0.0, 1.0) and zero.hi == 0.0
    inc = two_point_increment(0.3)
    assert inc.mean() == pytest.approx(0.0, abs=1e-16)
    assert 0.7 * 0.6 + 0.3 * (-1.4) == pytest.approx(0.0, abs=1e-15)


@given(st.floats(0, 1))
def test_two_point_invariants(r):
    inc = two_point_increment(r)
    assert abs(inc.mean()) <= 1e-15
    assert inc.hi - inc.lo == 2.0
    if inc.lo < 0 < inc.hi:
        assert inc.variance() <= abs(inc.lo) * inc.hi * (1 + 1e-12)


@pytest.mark.parametrize("r", [-0.1, 1.1, math.nan])
def test_two_point_domain(r):
    with pytest.raises(DomainError):
        two_point_increment(r)


def test_rademacher_model():
    m = rademacher_model([3, -4])
    m.validate()
    assert m.scale() == pytest.approx(5.0)
    st0 = m.steps[1]
    assert (st0.default.C, st0.default.D, st0.s) == (-4.0, 4.0, 4.0)
    with pytest.raises(DomainError):
        rademacher_model([])


def test_builtin_models_validate():
    for m in (adapted_sign_model(6), drifted_model(4, 0.3), skewed_variance_model(3), two_point_model(0.2, 3)):
        m.validate()
    assert skewed_variance_model(4).scale() == pytest.approx(1.05 * 2)


def test_adapted_branches_depend_on_sign():
    m = adapted_sign_model(3)
    # after one up step S_1 = 1 > 0, so step 1 uses the r = 0.3 law (D = 0.6)
    assert m.steps[1].law_for((1,)).D == pytest.approx(0.6)
    assert m.steps[1].law_for((0,)).D == pytest.approx(1.4)


def _single(branch, **kw):
    return MartingaleModel(steps=[Step(default=branch, **kw)])


def test_validation_paths():
    bad_mean = Branch((-1.0, 1.0), (0.4, 0.6), C=-1, D=1)
    with pytest.raises(ValidationError) as exc:
        _single(bad_mean, s=1.0).validate()
    assert exc.value.path == "$.steps[0]"

    wide = Branch((-1.5, 1.5), (0.5, 0.5), C=-1.5, D=1.5)
    with pytest.raises(ValidationError, match="exceeds 2 s"):
        _single(wide, s=1.0).validate()

    outside = Branch((-1.0, 1.0), (0.5, 0.5), C=-0.5, D=1.0)
    with pytest.raises(ValidationError, match="leaves"):
        _single(outside, s=1.0).validate()

    probs = Branch((-1.0, 1.0), (0.5, 0.6), C=-1, D=1)
    with pytest.raises(ValidationError) as exc:
        _single(probs, s=1.0).validate()
    assert exc.value.path.endswith(".probs")


def test_validation_branch_path():
    good = Branch((-1.0, 1.0), (0.5, 0.5), C=-1, D=1)
    bad = Branch((-1.0, 1.0), (0.25, 0.75), C=-1, D=1)
    m = MartingaleModel(
        steps=[Step(default=good, s=1.0), Step(default=good, branches=(((0,), good), ((1,), bad)), s=1.0)]
    )
    with pytest.raises(ValidationError) as exc:
        m.validate()
    assert exc.value.path == "$.steps[1].branches[1]"


def test_variance_form_checks():
    br = Branch((-10.0, 0.0, 1.0), (0.01, 0.89, 0.10), D=1.0, var=1.0)
    with pytest.raises(ValidationError, match="variance"):
        _single(br, s_hat=2.0).validate()
    br = Branch((-10.0, 0.0, 1.0), (0.01, 0.89, 0.10), D=1.0, var=1.1)
    with pytest.raises(ValidationError, match="s_hat"):
        _single(br, s_hat=1.0).validate()
    with pytest.raises(ValidationError, match="exactly one"):
        _single(br).validate()


def test_supermartingale_kind():
    m = drifted_model(3, 0.2)
    m.validate()
    m.kind = "martingale"
    with pytest.raises(ValidationError):
        m.validate()
    with pytest.raises(ValidationError):
        MartingaleModel(steps=drifted_model(1, 0).steps, initial=0.5).validate()


def test_center_model():
    c = center_model(drifted_model(3, 0.25)).validate()
    assert c.kind == "martingale"
    br = c.steps[0].default
    assert br.support == (-1.0, 1.0) and (br.C, br.D) == (-1.0, 1.0)
    with pytest.raises(DomainError):
        center_model(skewed_variance_model(2))


def test_model_from_spec():
    assert model_from_spec("rademacher:4").scale() == pytest.approx(1.0)
    assert model_from_spec("rademacher-linear:5").scale() == pytest.approx(1.0)
    assert model_from_spec("two-point:0.3:4").n == 4
    assert model_from_spec("adapted-sign").n == 6
    assert model_from_spec("drifted:3:0.1").kind == "supermartingale"
    for bad in ("nope:1", "rademacher", "rademacher:x"):
        with pytest.raises(DomainError):
            model_from_spec(bad)
