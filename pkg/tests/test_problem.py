import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quasisolve import (
    EvaluatorError,
    GridFunction,
    GridMismatch,
    MissingField,
    ProblemSpec,
    TauMode,
    TimeDomain,
    UnsortedInput,
    check_k_regularity,
    frozen_initial_segment,
    make_frozen_rhs,
    monotone_split,
)

D = TimeDomain(0.0, 1.0, 1.0, 1.0)
H = 0.01


def _spec(mode, tau=None):
    # f reports the value found at the deviated time
    return ProblemSpec(D, lambda t, x, y, g: y, tau or (lambda t, x, g: t - 0.5), lambda g: 0.0,
                       lambda t: 0.0, mode)


@pytest.mark.parametrize("text, mode", [
    ("nonincreasing", TauMode.NonincreasingInGamma),
    ("NondecreasingInGamma", TauMode.NondecreasingInGamma),
    ("state-only", TauMode.StateOnly),
])
def test_tau_mode_parse(text, mode):
    assert TauMode.parse(text) is mode


def test_tau_mode_parse_rejects_unknown():
    with pytest.raises(ValueError):
        TauMode.parse("sideways")


@pytest.mark.parametrize("mode, expected", [
    (TauMode.NonincreasingInGamma, "g1"),
    (TauMode.NondecreasingInGamma, "g2"),
    (TauMode.StateOnly, None),
])
def test_frozen_rhs_passes_the_mode_function_to_tau(mode, expected):
    g1 = GridFunction.constant(D, H, 1.0)
    g2 = GridFunction.constant(D, H, 2.0)
    seen = []

    def tau(t, x, gamma):
        seen.append(gamma)
        return t

    fr = make_frozen_rhs(_spec(mode, tau), g1, g2)
    assert fr(0.5, 0.0) == 2.0
    assert seen[-1] is {"g1": g1, "g2": g2, None: None}[expected]


def test_frozen_rhs_samples_gamma2_at_the_deviated_time():
    g1 = GridFunction.constant(D, H, 0.0)
    g2 = GridFunction.from_callable(D, H, lambda t: 10 * t)
    fr = make_frozen_rhs(_spec(TauMode.NonincreasingInGamma), g1, g2)
    assert fr(0.8, 0.0) == pytest.approx(3.0)


def test_deviation_outside_domain_is_clamped_and_counted():
    g = GridFunction.from_callable(D, H, lambda t: t)
    fr = make_frozen_rhs(_spec(TauMode.StateOnly, lambda t, x, gm: t + 5), g, g)
    assert fr(0.5, 0.0) == pytest.approx(1.0)
    assert fr.clamp_warnings == 1


def test_frozen_rhs_rejects_foreign_grids():
    g = GridFunction.constant(TimeDomain(0.0, 2.0, 1.0), H, 0.0)
    with pytest.raises(GridMismatch):
        make_frozen_rhs(_spec(TauMode.StateOnly), g, g)


def test_initial_segment_adds_lambda_to_history():
    p = ProblemSpec(D, lambda t, x, y, g: 0.0, lambda t, x, g: t, lambda g: g(1.0), math.cos)
    g = GridFunction.constant(D, 0.25, 0.5)
    seg = frozen_initial_segment(p, g)
    assert np.allclose(seg, 0.5 + np.cos(g.t_minus))
    assert seg[-1] == pytest.approx(1.5)


def test_history_collapses_to_a_number_without_delay():
    p = ProblemSpec(TimeDomain(0.0, 1.0), lambda t, x, y, g: 0.0, lambda t, x, g: t, lambda g: 0.0,
                    lambda t: 3.0 + t)
    assert p.k == 3.0


def test_evaluator_failures_are_wrapped():
    def bad(t):
        raise RuntimeError("boom")

    p = ProblemSpec(D, lambda t, x, y, g: 0.0, lambda t, x, g: t, lambda g: 1 / 0, bad)
    with pytest.raises(EvaluatorError):
        p.k_at(-0.5)
    with pytest.raises(EvaluatorError):
        p.lam(GridFunction.constant(D, H, 0.0))


sorted_samples = st.lists(
    st.tuples(st.floats(-10, 10), st.floats(-100, 100)), min_size=1, max_size=50,
).map(lambda s: sorted(s, key=lambda p: p[0]))


@given(sorted_samples)
def test_monotone_split_reconstructs_samples(samples):
    g1, g2 = monotone_split(samples)
    v = np.array([s[1] for s in samples])
    assert np.all(np.diff(g1) >= 0)
    assert np.all(np.diff(g2) <= 0)
    assert np.allclose(g1 + g2, v, rtol=0, atol=1e-12 * (1 + np.abs(v).sum()))


def test_monotone_split_rejects_unsorted():
    with pytest.raises(UnsortedInput):
        monotone_split([(1.0, 0.0), (0.0, 1.0)])


def test_k_regularity_passes_for_cosine_with_sine_bound():
    p = ProblemSpec(D, lambda t, x, y, g: 0.0, lambda t, x, g: t, lambda g: 0.0, math.cos,
                    k_hat_psi=lambda t: -math.sin(t))
    rep = check_k_regularity(p)
    assert rep["k_regularity"].passed


def test_k_regularity_fails_for_too_small_bound():
    p = ProblemSpec(D, lambda t, x, y, g: 0.0, lambda t, x, g: t, lambda g: 0.0, lambda t: 2 * t,
                    k_hat_psi=lambda t: 1.0)
    assert not check_k_regularity(p).passed


def test_k_regularity_needs_bound():
    p = ProblemSpec(D, lambda t, x, y, g: 0.0, lambda t, x, g: t, lambda g: 0.0, math.cos)
    with pytest.raises(MissingField):
        check_k_regularity(p)
