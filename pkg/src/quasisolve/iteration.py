"""The coupled monotone iteration for extremal quasisolutions.

Starting from v0 = alpha and w0 = beta, each sweep solves two frozen IVPs:

    v_{n+1} = A(v_n, w_n) marched toward the least solution,
    w_{n+1} = A(w_n, v_n) marched toward the greatest solution,

where A(gamma1, gamma2) glues Lambda(gamma1) + k on I- to the frozen IVP on
I+.  The continuous theory makes (v_n) nondecreasing and (w_n)
nonincreasing; the discretisation need not, so each iterate is projected
(v_{n+1} := max(v_{n+1}, v_n), w_{n+1} := min(w_{n+1}, w_n)) and every
projection that moves a node by more than the order tolerance is counted.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import BracketViolation, NoConvergence
from .grid import GridFunction, in_bracket_plus, sup_distance, tol_ord
from .ivp import ExtremalDirection, IvpResult, ivp_residual, solve_extremal
from .problem import ProblemSpec, frozen_initial_segment, make_frozen_rhs
from .verify import BracketPair, verify_lower_upper

__all__ = [
    "SolutionPair",
    "TraceRow",
    "apply_A",
    "iterate_coupled",
    "quasisolution_residual",
    "default_tol_iter",
    "write_trace",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TraceRow:
    iter: int
    gap: float
    res_v: float
    res_w: float
    warnings: int


@dataclass
class SolutionPair:
    """Result of :func:`iterate_coupled`.

    ``iterations`` counts applications of the coupled operator, including the
    final one whose displacement passed the stopping test.
    """

    v_star: GridFunction
    w_star: GridFunction
    iterations: int
    converged: bool
    gap: float
    residual_v: float
    residual_w: float
    monotonicity_warnings: int
    membership_warnings: int = 0
    clamp_events: int = 0
    tol_iter: float = 0.0
    trace: list[TraceRow] = field(default_factory=list)
    history: Optional[list[tuple[GridFunction, GridFunction]]] = None


def default_tol_iter(bracket: BracketPair) -> float:
    return 10.0 * bracket.h * (1.0 + bracket.bounds.psi_M.sup_norm())


def _apply(p: ProblemSpec, gamma1: GridFunction, gamma2: GridFunction,
           direction: ExtremalDirection, bracket: BracketPair) -> tuple[GridFunction, IvpResult]:
    seg = frozen_initial_segment(p, gamma1)
    g = make_frozen_rhs(p, gamma1, gamma2)
    res = solve_extremal(g, seg[-1], bracket.alpha, bracket.beta, direction)
    vals = np.concatenate([seg[:-1], res.solution.values])
    return gamma1.like(vals), res


def apply_A(p: ProblemSpec, gamma1: GridFunction, gamma2: GridFunction,
            direction: ExtremalDirection, bracket: BracketPair, h: Optional[float] = None) -> GridFunction:
    """One selection of the frozen-IVP operator on I+-.

    Returns the function equal to Lambda(gamma1) + k on I- and to the
    extremal (per ``direction``) solution of the frozen IVP on I+.  A
    membership failure of gamma1 or gamma2 in the order interval is logged,
    not raised.

    Raises
    ------
    BracketViolation
        When Lambda(gamma1) + k(t0) leaves [alpha(t0), beta(t0)].
    """
    if h is not None and h != bracket.h:
        raise ValueError(f"step {h} does not match the bracket grid step {bracket.h}")
    for name, gm in (("gamma1", gamma1), ("gamma2", gamma2)):
        if not in_bracket_plus(gm, bracket, bracket.bounds):
            log.warning("%s is not in the order interval", name)
    return _apply(p, gamma1, gamma2, direction, bracket)[0]


def quasisolution_residual(p: ProblemSpec, v: GridFunction, w: GridFunction) -> tuple[float, float]:
    """Defects of (v, w) as a quasisolution pair.

    For v: the cell defect of v against the field frozen at (v, w) plus the
    I- defect max |v - Lambda(v) - k|; symmetrically for w with (w, v).
    The frozen field already applies the mode-correct deviated argument.
    """
    v.check_grid(w)
    out = []
    for a, b in ((v, w), (w, v)):
        g = make_frozen_rhs(p, a, b)
        plus = ivp_residual(g, a, a.plus_values[0])
        seg = frozen_initial_segment(p, a)
        minus = float(np.max(np.abs(a.minus_values - seg)))
        out.append(plus + minus)
    return out[0], out[1]


def iterate_coupled(
    p: ProblemSpec,
    bracket: BracketPair,
    h: Optional[float] = None,
    tol_iter: Optional[float] = None,
    max_iter: int = 200,
    force: bool = False,
    keep_history: bool = False,
    raise_on_failure: bool = False,
    trace_residuals: bool = True,
) -> SolutionPair:
    """Run the coupled monotone iteration from (alpha, beta).

    Parameters
    ----------
    p : ProblemSpec
    bracket : BracketPair
        Lower/upper pair; verified first unless ``force``.
    h : float, optional
        Must equal the bracket grid step when given.
    tol_iter : float, optional
        Stop when the summed sup-displacement of (v, w) falls below this.
        Default ``10 h (1 + sup psi_M)``.
    max_iter : int
    force : bool
        Skip the lower/upper verification.
    keep_history : bool
        Store every projected iterate pair (needed for chain checks).
    raise_on_failure : bool
        Raise :class:`NoConvergence` instead of returning ``converged=False``.
    trace_residuals : bool
        Compute quasisolution residuals for every trace row (costs one extra
        field sweep per iterate).

    Raises
    ------
    BracketViolation
        When verification fails and ``force`` is false, or when the anchor
        value leaves the bracket.
    """
    if h is not None and h != bracket.h:
        raise ValueError(f"step {h} does not match the bracket grid step {bracket.h}")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    if not force:
        rep = verify_lower_upper(p, bracket)
        if not rep.passed:
            raise BracketViolation(
                "bracket failed lower/upper verification: "
                + ", ".join(r.check_id for r in rep.failures()))
    if tol_iter is None:
        tol_iter = default_tol_iter(bracket)

    v, w = bracket.alpha, bracket.beta
    history = [(v, w)] if keep_history else None
    mono = member = clamps = 0
    trace: list[TraceRow] = []
    converged = False
    n = 0
    for n in range(1, max_iter + 1):
        for gm in (v, w):
            if not in_bracket_plus(gm, bracket, bracket.bounds):
                member += 1
        v_new, rv = _apply(p, v, w, ExtremalDirection.Least, bracket)
        w_new, rw = _apply(p, w, v, ExtremalDirection.Greatest, bracket)
        clamps += rv.clamp_events + rw.clamp_events
        tol = tol_ord(v_new, w_new, v, w)
        if np.any(v.values - v_new.values > tol):
            mono += 1
        if np.any(w_new.values - w.values > tol):
            mono += 1
        v_new = v_new.maximum(v)
        w_new = w_new.minimum(w)
        disp = sup_distance(v_new, v) + sup_distance(w_new, w)
        v, w = v_new, w_new
        if keep_history:
            history.append((v, w))
        if trace_residuals:
            res_v, res_w = quasisolution_residual(p, v, w)
        else:
            res_v = res_w = float("nan")
        trace.append(TraceRow(n, sup_distance(v, w), res_v, res_w, mono))
        log.debug("iter %d: disp=%.3e gap=%.3e", n, disp, trace[-1].gap)
        if disp < tol_iter:
            converged = True
            break

    if trace_residuals:
        res_v, res_w = trace[-1].res_v, trace[-1].res_w
    else:
        res_v, res_w = quasisolution_residual(p, v, w)
    out = SolutionPair(
        v_star=v, w_star=w, iterations=n, converged=converged, gap=sup_distance(v, w),
        residual_v=res_v, residual_w=res_w, monotonicity_warnings=mono,
        membership_warnings=member, clamp_events=clamps, tol_iter=float(tol_iter),
        trace=trace, history=history,
    )
    if not converged and raise_on_failure:
        raise NoConvergence(f"no convergence after {max_iter} iterations (gap {out.gap:.3e})")
    return out


def write_trace(rows: list[TraceRow], path=None) -> str:
    """Serialize trace rows as CSV with header ``iter,gap,res_v,res_w,warnings``."""
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["iter", "gap", "res_v", "res_w", "warnings"])
    for r in rows:
        wr.writerow([r.iter, f"{r.gap:.17g}", f"{r.res_v:.17g}", f"{r.res_w:.17g}", r.warnings])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text
