import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import rk4
from quasisolve import (
    BracketViolation,
    ExtremalDirection,
    GridFunction,
    NonFiniteRHS,
    TimeDomain,
    ivp_residual,
    solve_extremal,
)

PD = TimeDomain(0.0, 1.0)


def _bracket(h, lo=-10.0, hi=10.0):
    return GridFunction.constant(PD, h, lo), GridFunction.constant(PD, h, hi)


@pytest.mark.parametrize("field, z0", [
    (lambda t, z: -z, 1.0),
    (lambda t, z: -z + 1.0, 0.0),
    (lambda t, z: math.cos(t) - 0.5 * z, 0.3),
])
@pytest.mark.parametrize("direction", list(ExtremalDirection))
def test_smooth_fields_match_rk4(field, z0, direction):
    h = 1e-3
    a, b = _bracket(h)
    res = solve_extremal(field, z0, a, b, direction)
    t_ref, x_ref = rk4(field, 0.0, 1.0, z0, int(round(1.0 / h)) * 100)
    err = np.max(np.abs(res.solution.values - x_ref[::100]))
    assert err <= 5 * h
    assert res.jump_events == 0
    assert res.clamp_events == 0


def test_error_is_first_order():
    errs = []
    for h in (1e-2, 5e-3, 2.5e-3):
        a, b = _bracket(h)
        sol = solve_extremal(lambda t, z: -z, 1.0, a, b, ExtremalDirection.Least).solution
        errs.append(np.max(np.abs(sol.values - np.exp(-sol.t))))
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all((ratios > 1.8) & (ratios < 2.2))


def _sign_field(t, z):
    # jump at z = 0: both 0 -> 1 and the zero solution are Euler-consistent
    return 1.0 if z > 0 else 0.0


def test_directions_pick_extremal_branches_at_a_jump():
    a, b = _bracket(1e-2, -1.0, 2.0)
    hi = solve_extremal(_sign_field, 0.0, a, b, ExtremalDirection.Greatest)
    lo = solve_extremal(_sign_field, 0.0, a, b, ExtremalDirection.Least)
    assert hi.jump_events > 0
    assert np.all(lo.solution.values <= hi.solution.values)
    assert lo.solution.values[-1] == pytest.approx(0.0)
    assert hi.solution.values[-1] == pytest.approx(1.0, abs=0.05)


@given(st.floats(-2, 2), st.floats(0.1, 3), st.floats(-0.5, 0.5))
def test_greatest_dominates_least(c, k, z0):
    def field(t, z):
        return c - k * z + (1.0 if z > 0.2 else 0.0)

    a, b = _bracket(2e-2)
    lo = solve_extremal(field, z0, a, b, ExtremalDirection.Least).solution
    hi = solve_extremal(field, z0, a, b, ExtremalDirection.Greatest).solution
    assert np.all(lo.values <= hi.values + 1e-12)


def test_state_is_clamped_into_the_bracket():
    a, b = _bracket(1e-2, 0.0, 0.5)
    res = solve_extremal(lambda t, z: 1.0, 0.0, a, b, ExtremalDirection.Least)
    assert res.solution.values.max() == 0.5
    assert res.clamp_events > 0


def test_initial_value_outside_bracket_raises():
    a, b = _bracket(1e-2, 0.0, 1.0)
    with pytest.raises(BracketViolation):
        solve_extremal(lambda t, z: 0.0, 2.0, a, b, ExtremalDirection.Least)


def test_non_finite_field_raises():
    a, b = _bracket(1e-2)
    with pytest.raises(NonFiniteRHS):
        solve_extremal(lambda t, z: math.nan, 0.0, a, b, ExtremalDirection.Least)


def test_residual_is_small_for_the_exact_solution_and_sees_initial_error():
    h = 1e-3
    z = GridFunction.from_callable(PD, h, lambda t: math.exp(-t))
    assert ivp_residual(lambda t, x: -x, z, 1.0) < 1e-6
    assert ivp_residual(lambda t, x: -x, z, 1.5) == pytest.approx(0.5, abs=1e-6)
