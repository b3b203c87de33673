"""Recipes producing lower/upper solution pairs.

Two recipes are provided: a bounded-field bracket (constant lower function,
integrated upper function) and affine brackets anchored at k(t0), together
with finite scans that look for the affine slopes.  Premise failures are
recorded in the attached report rather than raised, unless ``strict`` is
requested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, PremiseFailure
from .grid import BoundData, GridFunction, TimeDomain
from .problem import ProblemSpec
from .report import Report
from .verify import BracketPair, verify_lower_upper

__all__ = [
    "LinearBracketParams",
    "bounded_bracket",
    "delta_fn",
    "linear_bracket",
    "search_linear_upper",
    "search_linear_lower",
]


@dataclass(frozen=True)
class LinearBracketParams:
    """Slopes and offset of the affine bracket anchored at k(t0)."""

    m_alpha: float
    m_beta: float
    n_beta: float

    def __post_init__(self):
        if min(self.m_alpha, self.m_beta, self.n_beta) < 0:
            raise ValueError("slopes and offset must be nonnegative")
        if self.m_alpha > self.m_beta:
            raise ValueError("need m_alpha <= m_beta")


def _midpoints(domain: TimeDomain, h: float) -> np.ndarray:
    n = max(1, int(round(domain.L / h)))
    t = np.linspace(domain.t0, domain.t_end, n + 1)
    return 0.5 * (t[:-1] + t[1:])


def _finish(p: ProblemSpec, bracket: BracketPair, premises: Report, strict: bool) -> BracketPair:
    rep = verify_lower_upper(p, bracket)
    premises.extend(rep)
    bracket.report = premises
    if strict and not premises.passed:
        raise PremiseFailure(
            "premises failed: " + ", ".join(r.check_id for r in premises.failures()))
    return bracket


def bounded_bracket(p: ProblemSpec, lambda1: float, lambda2: float, psi, h: Optional[float] = None,
                    strict: bool = False) -> BracketPair:
    """Constant lower function and integrated upper function for bounded fields.

    With c1 = lambda1 + min k and c2 = lambda2 + max k over I-, returns
    alpha = c1 and beta = c2 on I-, c2 + int_{t0}^t psi on I+.  The two
    sampled premises are f(t, x, c1, gamma) <= psi(t) for x, gamma at or
    above c2 (``premise.upper``) and 0 <= f(t, c1, c2 + |psi|_1, c1)
    (``premise.lower``).

    Parameters
    ----------
    psi : GridFunction on I+, callable or float
    h : float, optional
        Grid step; taken from ``psi`` when it is a GridFunction.
    """
    d = p.domain
    if isinstance(psi, GridFunction):
        h = psi.h
    elif h is None:
        raise ValueError("h is required when psi is not a GridFunction")
    pd = d.plus_domain()
    if not isinstance(psi, GridFunction):
        psi = (GridFunction.from_callable(pd, h, psi) if callable(psi)
               else GridFunction.constant(pd, h, psi))
    if np.any(psi.values < 0):
        raise ValueError("psi must be nonnegative")
    probe = GridFunction.constant(d, h, 0.0)
    kv = np.array([p.k_at(float(s)) for s in probe.t_minus])
    c1 = lambda1 + float(kv.min())
    c2 = lambda2 + float(kv.max())
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (psi.values[1:] + psi.values[:-1]) * psi.h_plus)])
    alpha = GridFunction.constant(d, h, c1)
    beta = probe.like(np.concatenate([np.full(probe.i0, c2), c2 + cum]))
    bounds = BoundData(GridFunction.constant(pd, h, 0.0), psi)

    rep = Report()
    tm = _midpoints(d, h)
    psi_mid = 0.5 * (psi.values[1:] + psi.values[:-1])
    gam_c2 = GridFunction.constant(d, h, c2)
    worst, where = math.inf, None
    for i, s in enumerate(tm):
        for x in (c2, float(beta(s))):
            for gam in (gam_c2, beta):
                m = psi_mid[i] - p.f(float(s), x, c1, gam)
                if m < worst:
                    worst, where = m, float(s)
    rep.add("premise.upper", worst >= 0, worst, where)
    gam_c1 = alpha
    y = c2 + float(cum[-1])
    vals = np.array([p.f(float(s), c1, y, gam_c1) for s in tm])
    j = int(np.argmin(vals))
    rep.add("premise.lower", vals[j] >= 0, float(vals[j]), float(tm[j]))
    return _finish(p, BracketPair(alpha, beta, bounds), rep, strict)


def delta_fn(t: float, d: TimeDomain, r_bar: float) -> float:
    """min{t0 - r_bar, t - r}, the lowest time the deviated argument may reach."""
    if not 0 < r_bar <= d.r:
        raise DomainError(f"need 0 < r_bar <= r, got r_bar={r_bar}, r={d.r}")
    eps = 1e-12 * (1.0 + abs(d.t_end))
    if t < d.t0 - eps or t > d.t_end + eps:
        raise DomainError(f"t={t} outside I+ = [{d.t0}, {d.t_end}]")
    return min(d.t0 - r_bar, t - d.r)


def _c4(p: ProblemSpec, m_beta: float, n_beta: float, h: float) -> float:
    """n_beta - Lambda(m_beta L + k(t0) + n_beta)  (>= 0 required)."""
    d = p.domain
    c = m_beta * d.L + p.k_at(d.t0) + n_beta
    return n_beta - p.lam(GridFunction.constant(d, h, c))


def _c3(p: ProblemSpec, m_beta: float, n_beta: float, r_bar: float, h: float) -> tuple[float, float]:
    """min over midpoints of m_beta - f(t, k(t0) + n_beta, k(delta(t)), const); and where."""
    d = p.domain
    k0 = p.k_at(d.t0)
    gam = GridFunction.constant(d, h, m_beta * d.L + k0 + n_beta)
    tm = _midpoints(d, h)
    vals = np.array([m_beta - p.f(float(s), k0 + n_beta, p.k_at(delta_fn(float(s), d, r_bar)), gam)
                     for s in tm])
    j = int(np.argmin(vals))
    return float(vals[j]), float(tm[j])


def _c2(p: ProblemSpec, m_alpha: float, m_beta: float, n_beta: float, h: float) -> tuple[float, float]:
    """min over midpoints of f(t, m_alpha L + k(t0), m_beta L + k(t0) + n_beta, k(t0-r)) - m_alpha."""
    d = p.domain
    k0 = p.k_at(d.t0)
    gam = GridFunction.constant(d, h, p.k_at(d.t_start))
    y = m_beta * d.L + k0 + n_beta
    x = m_alpha * d.L + k0
    tm = _midpoints(d, h)
    vals = np.array([p.f(float(s), x, y, gam) - m_alpha for s in tm])
    j = int(np.argmin(vals))
    return float(vals[j]), float(tm[j])


def linear_bracket(p: ProblemSpec, params: LinearBracketParams, r_bar: float, h: float = 1e-3,
                   bounds: Optional[BoundData] = None, strict: bool = False) -> BracketPair:
    """Affine lower/upper pair anchored at k(t0).

    alpha = k on I-, m_alpha (t - t0) + k(t0) on I+;
    beta = k + n_beta on I-, m_beta (t - t0) + k(t0) + n_beta on I+.
    The three premises are checked as records ``c4`` (one Lambda
    evaluation), ``c3`` and ``c2`` (at I+ cell midpoints).

    Parameters
    ----------
    bounds : BoundData, optional
        Derivative bounds to attach; default [m_alpha, m_beta].
    """
    d = p.domain
    probe = GridFunction.constant(d, h, 0.0)
    k = np.array([p.k_at(float(s)) for s in probe.t_minus])
    k0 = p.k_at(d.t0)
    tp = probe.t_plus - d.t0
    alpha = probe.like(np.concatenate([k[:-1], params.m_alpha * tp + k0]))
    beta = probe.like(np.concatenate([k[:-1] + params.n_beta, params.m_beta * tp + k0 + params.n_beta]))
    if bounds is None:
        pd = d.plus_domain()
        bounds = BoundData(GridFunction.constant(pd, h, params.m_alpha),
                           GridFunction.constant(pd, h, params.m_beta))
    rep = Report()
    m = _c4(p, params.m_beta, params.n_beta, h)
    rep.add("c4", m >= 0, m, None)
    m, where = _c3(p, params.m_beta, params.n_beta, r_bar, h)
    rep.add("c3", m >= 0, m, where)
    m, where = _c2(p, params.m_alpha, params.m_beta, params.n_beta, h)
    rep.add("c2", m >= 0, m, where)
    return _finish(p, BracketPair(alpha, beta, bounds), rep, strict)


def search_linear_upper(p: ProblemSpec, r_bar: float, z_grid: Optional[Sequence[float]] = None,
                        h: float = 1e-3) -> Optional[tuple[float, float]]:
    """Scan ``z_grid`` for a witness m_beta = n_beta = z of the upper premises.

    For each z the two ratio tests f(t, k(t0)+z, k(delta(t)), zL+k(t0)+z)/z < 1
    (every I+ midpoint) and Lambda(zL+k(t0)+z)/z < 1 are applied, followed
    by the premises ``c4`` and ``c3``.  Returns ``(z, z)`` for the first z
    passing everything, or ``None`` when the grid is exhausted.
    """
    if z_grid is None:
        z_grid = [2.0 ** j for j in range(21)]
    z_grid = list(z_grid)
    if any(z <= 0 for z in z_grid) or any(b <= a for a, b in zip(z_grid, z_grid[1:])):
        raise ValueError("z_grid must be increasing and positive")
    d = p.domain
    k0 = p.k_at(d.t0)
    for z in z_grid:
        gam = GridFunction.constant(d, h, z * d.L + k0 + z)
        if p.lam(gam) / z >= 1:
            continue
        ratios_ok = all(
            p.f(float(s), k0 + z, p.k_at(delta_fn(float(s), d, r_bar)), gam) / z < 1
            for s in _midpoints(d, h))
        if not ratios_ok:
            continue
        if _c4(p, z, z, h) >= 0 and _c3(p, z, z, r_bar, h)[0] >= 0:
            return (z, z)
    return None


def search_linear_lower(p: ProblemSpec, m_beta: float, n_beta: float, r_bar: float,
                        m_grid: Optional[Sequence[float]] = None, h: float = 1e-3) -> Optional[float]:
    """Find a lower slope m_alpha for the affine bracket.

    Returns 0 when ``p.closed_domain``; otherwise the first m in the
    decreasing ``m_grid`` (default m_beta 2^-j, j = 1..20) with
    0 < m < m_beta satisfying ``c2`` at every I+ midpoint, or ``None``.
    """
    if p.closed_domain:
        return 0.0
    if m_grid is None:
        m_grid = [m_beta * 2.0 ** (-j) for j in range(1, 21)]
    for m in m_grid:
        if not 0 < m < m_beta:
            continue
        if _c2(p, m, m_beta, n_beta, h)[0] >= 0:
            return float(m)
    return None
