import math

import numpy as np
import pytest

from conftest import logistic_problem
from quasisolve import (
    BracketPair,
    BracketViolation,
    ExtremalDirection,
    GridFunction,
    NoConvergence,
    apply_A,
    default_tol_iter,
    iterate_coupled,
    partial_le,
    quasisolution_residual,
    tol_ord,
    write_trace,
)
from quasisolve.corpus import build_example, random_monotone_probe


def test_logistic_converges_to_exact_solution():
    p, br = logistic_problem(h=1e-3)
    sol = iterate_coupled(p, br)
    assert sol.converged
    assert sol.gap == 0.0
    assert np.max(np.abs(sol.v_star.values - (1 - np.exp(-sol.v_star.t)))) < 1e-3
    # one update plus the application confirming the fixed point
    assert sol.iterations == 2
    assert sol.monotonicity_warnings == 0


def test_default_tolerance(logistic):
    _, br = logistic
    assert default_tol_iter(br) == pytest.approx(10 * br.h * 2)


def test_history_is_a_sandwich_chain():
    entry = random_monotone_probe(7)
    sol = iterate_coupled(entry.problem, entry.bracket, keep_history=True)
    tol = 2 * tol_ord(entry.bracket.alpha, entry.bracket.beta)
    vs = [v for v, _ in sol.history]
    ws = [w for _, w in sol.history]
    for a, b in zip(vs, vs[1:]):
        assert partial_le(a, b, tol)
    for a, b in zip(ws, ws[1:]):
        assert partial_le(b, a, tol)
    assert partial_le(sol.v_star, sol.w_star, tol)


def test_apply_A_respects_direction_order():
    entry = build_example("ex1", h=1e-2)
    br = entry.bracket
    lo = apply_A(entry.problem, br.alpha, br.beta, ExtremalDirection.Least, br)
    hi = apply_A(entry.problem, br.alpha, br.beta, ExtremalDirection.Greatest, br)
    assert partial_le(lo, hi, 1e-12)
    with pytest.raises(ValueError):
        apply_A(entry.problem, br.alpha, br.beta, ExtremalDirection.Least, br, h=0.5)


def test_bad_bracket_is_refused_unless_forced(logistic):
    p, br = logistic
    bad = BracketPair(br.alpha, br.beta * 0.5, br.bounds)
    with pytest.raises(BracketViolation):
        iterate_coupled(p, bad)
    assert iterate_coupled(p, bad, force=True).iterations >= 1


def test_no_convergence_is_reported_or_raised():
    entry = build_example("ex1", h=1e-2)
    sol = iterate_coupled(entry.problem, entry.bracket, max_iter=1)
    assert not sol.converged
    with pytest.raises(NoConvergence):
        iterate_coupled(entry.problem, entry.bracket, max_iter=1, raise_on_failure=True)


def test_quasisolution_residual_vanishes_at_the_fixed_point():
    p, br = logistic_problem(h=1e-3)
    sol = iterate_coupled(p, br)
    rv, rw = quasisolution_residual(p, sol.v_star, sol.w_star)
    assert rv < 1e-3 and rw < 1e-3
    rv, _ = quasisolution_residual(p, br.beta, br.alpha)
    assert rv > 0.5


def test_trace_csv(tmp_path):
    p, br = logistic_problem()
    sol = iterate_coupled(p, br)
    text = write_trace(sol.trace, tmp_path / "trace.csv")
    lines = text.splitlines()
    assert lines[0] == "iter,gap,res_v,res_w,warnings"
    assert len(lines) == sol.iterations + 1
    assert (tmp_path / "trace.csv").read_text() == text


def test_run_is_deterministic():
    a = iterate_coupled(*logistic_problem())
    b = iterate_coupled(*logistic_problem())
    assert a.v_star.to_csv() == b.v_star.to_csv()
