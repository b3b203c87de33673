import math

import numpy as np
import pytest

from quasisolve import ParamValidation, UnknownExample, verify_lower_upper
from quasisolve.corpus import (
    EXAMPLES,
    build_example,
    default_params,
    enumerate_rationals,
    fat_cantor_indicator,
    fat_cantor_mask,
    phi2_eval,
    phi_decreasing,
    random_monotone_probe,
)


def test_rationals_are_distinct_nonnegative_and_put_four_first():
    q = enumerate_rationals(200)
    assert len(set(q)) == 200 and min(q) >= 0
    q1 = enumerate_rationals(200, q1_first=True)
    assert q1[0] == 4.0 and sorted(q1) == sorted(q)


def test_phi_is_nonincreasing_and_normalised():
    xs = np.linspace(-1, 10, 400)
    vals = [phi_decreasing(x, True) for x in xs]
    assert np.all(np.diff(vals) <= 0)
    assert vals[0] == 1.0 and 0 <= vals[-1] < 1e-3


def test_phi_jumps_by_half_at_the_first_rational():
    assert phi_decreasing(4.0, True) - phi_decreasing(4.0 + 1e-12, True) == pytest.approx(0.5)
    assert phi_decreasing(4.0, True, strict=False) == pytest.approx(phi_decreasing(4.0 + 1e-12, True))


def test_phi2_is_one_on_lines_and_smooth_elsewhere():
    # x = 3t + rho m - 1/n with t = 0.1, rho = 0.9, m = 2, n = 2
    assert phi2_eval(0.1, 0.3 + 1.8 - 0.5, 0.9, 1.0) == 1.0
    assert phi2_eval(0.5, 1.234567, 0.9, 1.0) == pytest.approx(0.5 * 1.234567 / 5 * math.cos(1.234567))


def test_cantor_scalar_and_vector_agree():
    xs = np.random.default_rng(0).uniform(0, 1, 500)
    assert np.array_equal(fat_cantor_mask(xs, 12), [fat_cantor_indicator(x, 12) for x in xs])
    assert not fat_cantor_indicator(0.5, 12)
    assert fat_cantor_indicator(0.0, 12)


@pytest.mark.parametrize("name", EXAMPLES)
def test_every_entry_builds_and_verifies(name):
    entry = build_example(name, h=1e-2)
    assert entry.param_checks.passed
    assert verify_lower_upper(entry.problem, entry.bracket).passed
    assert entry.expected in ("unique-solution", "quasisolutions-only")
    if entry.expected == "unique-solution":
        assert entry.certifying["contraction_margin"] > 0


def test_unknown_names_and_parameters():
    with pytest.raises(UnknownExample):
        build_example("nope")
    with pytest.raises(ParamValidation):
        build_example("ex1", {"bogus": 1.0})


def test_parameter_violations_raise_only_when_strict():
    with pytest.raises(ParamValidation) as exc:
        build_example("ex1", {"sigma1": 0.0}, h=1e-2)
    assert exc.value.violations
    entry = build_example("ex1", {"sigma1": 0.0}, h=1e-2, strict=False)
    assert not entry.param_checks.passed


def test_defaults_are_copies():
    d = default_params("ex1")
    d["sigma1"] = 99
    assert default_params("ex1")["sigma1"] != 99


def test_ex2_contraction_values():
    odd = build_example("ex2_odd", h=1e-2)
    assert odd.certifying["contraction_value"] == pytest.approx(0.48)
    assert odd.certifying["contraction_margin"] == pytest.approx(0.52)
    even = build_example("ex2_even", h=1e-2)
    assert even.certifying["contraction_margin"] > 0


@pytest.mark.parametrize("seed", range(5))
def test_random_probes_are_reproducible(seed):
    a, b = random_monotone_probe(seed), random_monotone_probe(seed)
    assert a.params == b.params
    assert np.array_equal(a.bracket.beta.values, b.bracket.beta.values)
    assert a.bracket.report.passed
