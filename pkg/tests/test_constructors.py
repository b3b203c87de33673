import math

import pytest

from conftest import logistic_problem
from quasisolve import DomainError, PremiseFailure, TimeDomain, verify_lower_upper
from quasisolve.constructors import (
    LinearBracketParams,
    bounded_bracket,
    delta_fn,
    linear_bracket,
    search_linear_lower,
    search_linear_upper,
)
from quasisolve.corpus import build_example


def test_bounded_bracket_for_logistic_field():
    p, _ = logistic_problem()
    br = bounded_bracket(p, 0.0, 0.0, 1.0, h=1e-2)
    assert br.report.passed
    assert br.alpha.values.max() == 0.0
    assert br.beta.values[-1] == pytest.approx(1.0)


def test_bounded_bracket_records_premise_failures():
    p, _ = logistic_problem()
    # psi below the field on the upper function
    br = bounded_bracket(p, 0.0, 0.0, lambda t: 0.1, h=1e-2)
    assert not br.report.passed
    with pytest.raises(PremiseFailure):
        bounded_bracket(p, 0.0, 0.0, 0.1, h=1e-2, strict=True)


def test_bounded_bracket_needs_step_and_nonnegative_psi():
    p, _ = logistic_problem()
    with pytest.raises(ValueError):
        bounded_bracket(p, 0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        bounded_bracket(p, 0.0, 0.0, -1.0, h=1e-2)


def test_delta_fn():
    d = TimeDomain(0.0, 1.0, 0.5)
    assert delta_fn(0.1, d, 0.25) == -0.4
    assert delta_fn(0.9, d, 0.25) == -0.25
    with pytest.raises(DomainError):
        delta_fn(0.1, d, 0.75)
    with pytest.raises(DomainError):
        delta_fn(2.0, d, 0.25)


def test_linear_params_validation():
    with pytest.raises(ValueError):
        LinearBracketParams(2.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        LinearBracketParams(-1.0, 1.0, 1.0)


@pytest.mark.parametrize("name", ["ej1", "ej1_cantor"])
def test_linear_searches_and_bracket(name):
    entry = build_example(name, h=1e-2)
    p, r_bar = entry.problem, entry.params["r_bar"]
    found = search_linear_upper(p, r_bar, h=1e-2)
    assert found is not None and found[0] == found[1]
    eps = float(entry.bracket.bounds.psi_m.values.min())
    grid = [m for m in (found[0] * 2.0 ** -j for j in range(1, 21)) if m < eps]
    m_a = search_linear_lower(p, *found, r_bar, m_grid=grid, h=1e-2)
    assert m_a is not None and 0 < m_a < eps
    br = linear_bracket(p, LinearBracketParams(m_a, *found), r_bar, h=1e-2)
    assert br.report.passed
    assert verify_lower_upper(p, br).passed


def test_linear_search_exhaustion_returns_none():
    entry = build_example("ej1", h=1e-2)
    assert search_linear_upper(entry.problem, 0.25, z_grid=[1e-3], h=1e-2) is None
    with pytest.raises(ValueError):
        search_linear_upper(entry.problem, 0.25, z_grid=[2.0, 1.0])


def test_lower_search_on_closed_domain_returns_zero():
    p, _ = logistic_problem()
    assert search_linear_lower(p, 1.0, 1.0, 0.1) == 0.0
