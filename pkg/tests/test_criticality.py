from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from rank1_landscape import criticality
from rank1_landscape.core import PreconditionViolated, eval_f
from rank1_landscape.criticality import (
    Condition,
    Method,
    all_verdicts,
    balanced_ratio_conditions,
    is_critical_closed_form,
    is_critical_directional,
    is_critical_lp,
    ratio_at_most_one,
    witness_lambda,
)
from rank1_landscape.subdiff import directional_derivative, zero_in_partials

from conftest import inst, pt
from strategies import instance_points


def test_decoy_not_critical(decoy):
    I, p = decoy
    lp, dr, cf = all_verdicts(I, p)
    assert not lp.is_critical and not dr.is_critical and not cf.is_critical
    assert dr.certificate_slope < 0
    assert directional_derivative(I, p, dr.descent_certificate) == dr.certificate_slope
    assert max(abs(a) for a in dr.descent_certificate.x + dr.descent_certificate.y) <= 1
    assert cf.matched_condition is None


def test_balanced_critical(balanced):
    I, p = balanced
    lp, dr, cf = all_verdicts(I, p)
    assert lp.is_critical and dr.is_critical and cf.is_critical
    assert cf.matched_condition is Condition.BALANCED_RATIOS
    assert lp.lambda_witness is not None
    assert dr.certificate_slope == 0


def test_col01_examples(col01):
    origin = pt([0, 0], [0])
    assert is_critical_lp(col01, origin).is_critical
    v = is_critical_closed_form(col01, pt([1, 0], [0]))
    assert v.is_critical and v.matched_condition is Condition.Y_ZERO


def test_global_minimum_directional(col01):
    v = is_critical_directional(col01, pt([0, 3], [F(1, 3)]))
    assert v.is_critical and v.method is Method.DIRECTIONAL_LP


def test_witness_lambda(balanced):
    I, p = balanced
    L = witness_lambda(I, p)
    assert L[0] == (-1, 1, 1)
    assert sum(a * b for a, b in zip(L[0], p.y)) == 0
    Z = inst([0, 0], [0])
    assert witness_lambda(Z, pt([0, 0], [0])) == ((0,), (0,))
    # x off the support of u breaks the balanced-ratio conditions
    with pytest.raises(PreconditionViolated):
        witness_lambda(Z, pt([1, -1], [0]))
    with pytest.raises(PreconditionViolated):
        witness_lambda(inst([1], [1]), pt([-1], [-1]))


def test_ratio_at_most_one():
    assert ratio_at_most_one(F(1), F(1), F(1), F(1))
    assert not ratio_at_most_one(F(-2), F(1), F(-1), F(1))
    assert not ratio_at_most_one(F(-2), F(1), F(1), F(-1))
    assert ratio_at_most_one(F(2), F(1), F(-1), F(1))
    assert ratio_at_most_one(F(3), F(1), F(-1), F(1))


def test_strict_ratio_mutant_is_caught(balanced, monkeypatch):
    """Replacing the ratio test <= 1 with < 1 must break agreement."""
    I, p = balanced
    assert balanced_ratio_conditions(I, p)

    def strict(xi, yj, ui, vj):
        uv = ui * vj
        return xi * yj < uv if uv > 0 else xi * yj > uv

    monkeypatch.setattr(criticality, "ratio_at_most_one", strict)
    verdicts = all_verdicts(I, p)
    assert {v.is_critical for v in verdicts} == {True, False}


@settings(max_examples=400, deadline=None)
@given(instance_points())
def test_three_way_agreement(case):
    I, p = case
    verdicts = all_verdicts(I, p)
    flags = {v.is_critical for v in verdicts}
    assert len(flags) == 1
    if flags.pop():
        assert zero_in_partials(I, p)
        assert verdicts[1].certificate_slope == 0
    else:
        assert verdicts[1].certificate_slope < 0


@settings(max_examples=300, deadline=None)
@given(instance_points())
def test_rescaling_invariance(case):
    I, p = case
    q = p.rescale(F(-3, 2))
    assert eval_f(I, p) == eval_f(I, q)
    assert is_critical_closed_form(I, p).is_critical == is_critical_closed_form(I, q).is_critical


def test_verdict_json(decoy):
    out = is_critical_directional(*decoy).to_json()
    assert out["method"] == "directional_lp" and out["is_critical"] is False
    assert F(out["directional_derivative"]) < 0
