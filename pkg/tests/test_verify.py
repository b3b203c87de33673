import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from quasisolve import (
    BoundData,
    BracketPair,
    DiscontinuityLine,
    GridFunction,
    LipschitzData,
    ProblemSpec,
    TauMode,
    TimeDomain,
    contraction_bound,
    contraction_margin,
    maximum_principle_check,
    transversality_check,
    verify_bounds,
    verify_lower_upper,
)

D = TimeDomain(0.0, 1.0, 0.5, 0.5)
H = 0.02


def test_logistic_bracket_verifies(logistic):
    p, br = logistic
    rep = verify_lower_upper(p, br)
    assert rep.passed
    assert {"lower.plus", "upper.plus", "lower.minus", "upper.minus", "order",
            "monotone.alpha", "monotone.beta"} <= {r.check_id for r in rep}
    assert br.report is rep


def test_upper_function_below_the_field_fails(logistic):
    p, br = logistic
    low_beta = BracketPair(br.alpha, br.beta * 0.5, br.bounds)
    rep = verify_lower_upper(p, low_beta)
    assert not rep["upper.plus"].passed
    assert rep["upper.plus"].margin < 0


def test_crossed_bracket_fails_order(logistic):
    p, br = logistic
    rep = verify_lower_upper(p, BracketPair(br.beta, br.alpha, br.bounds))
    assert not rep["order"].passed


def test_bounds_envelope(logistic):
    p, br = logistic
    rep = verify_bounds(p, br)
    assert rep.passed
    detail = rep["bounds.min"].detail
    assert 0.0 <= detail["f_min"] <= detail["f_max"] <= 1.0
    assert verify_bounds(p, br, rng_seed=3).to_jsonl() == verify_bounds(p, br, rng_seed=3).to_jsonl()


def test_bounds_fail_when_upper_bound_too_small(logistic):
    p, br = logistic
    tight = BoundData.from_callables(br.domain, br.h, 0.0, 0.5)
    rep = verify_bounds(p, BracketPair(br.alpha, br.beta, tight))
    assert not rep["bounds.max"].passed


def _lip(c):
    return LipschitzData.from_callables(D, H, L1=c[0], L2=c[1], L3=c[2], L4=c[3], lam=c[4])


coeffs = st.tuples(*[st.floats(0, 2)] * 4, st.floats(0, 0.99))


@pytest.mark.parametrize("mode, expected", [
    (TauMode.NonincreasingInGamma, 0.1 + 0.2 + 0.3 + 0.2 * 0.4 + 0.5),
    (TauMode.NondecreasingInGamma, 0.1 + 0.2 + 0.3 + 0.2 * 0.4 + 0.5),
    (TauMode.StateOnly, 0.1 + 0.2 + 0.3 + 0.4),
])
def test_contraction_bound_formulas(mode, expected):
    lip = _lip((0.2, 0.3, 0.4, 0.5, 0.1))
    assert contraction_bound(lip, mode) == pytest.approx(expected)
    assert contraction_margin(lip, mode) == pytest.approx(1 - expected)


@given(coeffs, coeffs, st.sampled_from(list(TauMode)))
def test_contraction_margin_is_antitone(a, b, mode):
    lo = tuple(min(x, y) for x, y in zip(a, b))
    hi = tuple(max(x, y) for x, y in zip(a, b))
    assert contraction_margin(_lip(hi), mode) <= contraction_margin(_lip(lo), mode) + 1e-12


def test_lipschitz_rejects_bad_lambda():
    with pytest.raises(ValueError):
        _lip((0, 0, 0, 0, 1.0))


def _pfun(vals_plus, vals_minus):
    g = GridFunction.constant(D, H, 0.0)
    return g.like(np.concatenate([vals_minus[:-1], vals_plus]))


def test_max_principle_asserts_only_with_all_premises():
    g = GridFunction.constant(D, H, 0.0)
    psi = GridFunction.constant(D.plus_domain(), H, 0.5)
    res = maximum_principle_check(g.like(np.where(g.t < 0, -np.abs(np.sin(5 * g.t)), -0.1 * g.t)), psi, 0.2)
    assert res.premises == {"el1": True, "el2": True, "el3": True}
    assert res.conclusion_asserted and res.conclusion_holds
    res = maximum_principle_check(g, GridFunction.constant(D.plus_domain(), H, 2.0), 0.2)
    assert not res.premises["el3"]
    assert not res.conclusion_asserted and res.conclusion_holds is None


@given(st.floats(0, 5), st.floats(0, 0.99), st.floats(0.01, 1))
def test_max_principle_rejects_positive_bumps(psi_c, lam, bump):
    g = GridFunction.constant(D, H, 0.0)
    p = g.like(bump * np.maximum(0, np.sin(math.pi * np.maximum(g.t, 0))))
    res = maximum_principle_check(p, GridFunction.constant(D.plus_domain(), H, psi_c), lam)
    # a positive maximum can never survive all premises
    assert not res.conclusion_asserted or res.conclusion_holds is False
    assert not (res.conclusion_asserted and res.max_p > 0 and res.conclusion_holds)


def test_transversality_basic():
    rep = transversality_check([DiscontinuityLine(0.0, 1.0), DiscontinuityLine(0.3, 0.0),
                                DiscontinuityLine(-3.0, 2.0)], 0.1, 0.5)
    assert [r.passed for r in rep] == [True, False, True]
    assert rep["line[1]"].margin < 0


@given(st.floats(-5, 5), st.floats(-2, 2), st.floats(0, 2), st.floats(0, 1), st.floats(0, 1))
def test_transversality_is_monotone_in_the_envelope(slope, f_min, width, grow_lo, grow_hi):
    line = [DiscontinuityLine(slope, 0.0)]
    narrow = transversality_check(line, f_min, f_min + width)
    wide = transversality_check(line, f_min - grow_lo, f_min + width + grow_hi)
    # widening the envelope can only reject more lines
    assume(wide.passed)
    assert narrow.passed
