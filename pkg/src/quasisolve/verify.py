"""Numerical checks of the hypotheses behind the coupled iteration.

All "almost everywhere" statements are tested on the grid only: derivative
inequalities at cell midpoints, pointwise inequalities at nodes.  A
violation living strictly between grid points cannot be seen.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import EvaluatorError, GridMismatch
from .grid import BoundData, GridFunction, TimeDomain, is_nondecreasing_on, tol_ord
from .problem import ProblemSpec, TauMode, make_frozen_rhs
from .report import Report

__all__ = [
    "BracketPair",
    "LipschitzData",
    "DiscontinuityLine",
    "MaxPrincipleResult",
    "verify_lower_upper",
    "verify_bounds",
    "contraction_margin",
    "contraction_bound",
    "maximum_principle_check",
    "transversality_check",
]


@dataclass
class BracketPair:
    """Lower and upper functions with derivative bounds; ``report`` holds the last check."""

    alpha: GridFunction
    beta: GridFunction
    bounds: BoundData
    report: Optional[Report] = None

    def __post_init__(self):
        self.alpha.check_grid(self.beta)
        if self.bounds.psi_M.values.size != self.alpha.t_plus.size:
            raise GridMismatch("bound data must live on the I+ part of the bracket grid")

    @property
    def h(self) -> float:
        return self.alpha.h

    @property
    def domain(self) -> TimeDomain:
        return self.alpha.domain


@dataclass
class LipschitzData:
    """One-sided Lipschitz fields on I+ and the contraction constant of Lambda.

    ``tilde_psi`` is optional and only informative: the corpus folds it into
    the L-fields already.
    """

    L1: GridFunction
    L2: GridFunction
    L3: GridFunction
    L4: GridFunction
    lam: float
    tilde_psi: Optional[GridFunction] = None
    note: str = ""

    def __post_init__(self):
        for name in ("L2", "L3", "L4"):
            self.L1.check_grid(getattr(self, name))
        for name in ("L1", "L2", "L3", "L4"):
            if np.any(getattr(self, name).values < 0):
                raise ValueError(f"{name} must be nonnegative")
        if not 0 <= self.lam < 1:
            raise ValueError(f"lambda must lie in [0, 1), got {self.lam}")

    @classmethod
    def from_callables(cls, domain: TimeDomain, h: float, L1=0.0, L2=0.0, L3=0.0, L4=0.0,
                       lam: float = 0.0, note: str = "") -> "LipschitzData":
        pd = domain.plus_domain()

        def grid(fn):
            if callable(fn):
                return GridFunction.from_callable(pd, h, fn)
            return GridFunction.constant(pd, h, fn)

        return cls(grid(L1), grid(L2), grid(L3), grid(L4), float(lam), note=note)


@dataclass(frozen=True)
class DiscontinuityLine:
    """The affine curve x = slope * t + intercept, active on ``t_range``."""

    slope: float
    intercept: float
    t_range: tuple[float, float] = (-math.inf, math.inf)

    def __call__(self, t: float) -> float:
        return self.slope * t + self.intercept


def _default_tol(alpha: GridFunction, beta: GridFunction) -> float:
    return tol_ord(alpha, beta) + alpha.h_plus ** 2


def _rhs_on_cells(g, fn: GridFunction) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    t = fn.t_plus
    v = fn.plus_values
    tm = t[:-1] + 0.5 * fn.h_plus
    zm = 0.5 * (v[:-1] + v[1:])
    gv = np.array([g(float(s), float(z)) for s, z in zip(tm, zm)])
    return tm, fn.quotients_plus(), gv


def verify_lower_upper(p: ProblemSpec, bracket: BracketPair, tol: Optional[float] = None) -> Report:
    """Check that alpha is a lower and beta an upper solution.

    On I+ the cell quotient of alpha must not exceed the field frozen at
    (alpha, beta) evaluated along alpha, and symmetrically for beta with the
    roles swapped.  The deviated argument follows ``p.tau_mode``.  On I-
    the nodes must satisfy alpha <= Lambda(alpha) + k and
    beta >= Lambda(beta) + k.  The order alpha <= beta and, outside the
    state-only mode, monotonicity of alpha and beta on [t0 - r_hat, t0 + L]
    are recorded as well.
    """
    alpha, beta = bracket.alpha, bracket.beta
    alpha.check_grid(beta)
    if alpha.domain != p.domain:
        raise GridMismatch("bracket must live on the problem domain")
    if tol is None:
        tol = _default_tol(alpha, beta)
    rep = Report()

    tm, qa, ga = _rhs_on_cells(make_frozen_rhs(p, alpha, beta), alpha)
    m = ga - qa
    j = int(np.argmin(m))
    rep.add("lower.plus", m[j] >= -tol, float(m[j]), float(tm[j]))

    _, qb, gb = _rhs_on_cells(make_frozen_rhs(p, beta, alpha), beta)
    m = qb - gb
    j = int(np.argmin(m))
    rep.add("upper.plus", m[j] >= -tol, float(m[j]), float(tm[j]))

    tminus = alpha.t_minus
    k = np.array([p.k_at(float(s)) for s in tminus])
    m = p.lam(alpha) + k - alpha.minus_values
    j = int(np.argmin(m))
    rep.add("lower.minus", m[j] >= -tol, float(m[j]), float(tminus[j]))
    m = beta.minus_values - p.lam(beta) - k
    j = int(np.argmin(m))
    rep.add("upper.minus", m[j] >= -tol, float(m[j]), float(tminus[j]))

    m = beta.values - alpha.values
    j = int(np.argmin(m))
    rep.add("order", m[j] >= -tol_ord(alpha, beta), float(m[j]), float(alpha.t[j]))

    if p.tau_mode is not TauMode.StateOnly:
        a, b = p.domain.monotone_window
        for name, fn in (("alpha", alpha), ("beta", beta)):
            ok = is_nondecreasing_on(fn, a, b, tol_ord(fn))
            mask = (fn.t >= a - fn.tol_dom)
            dv = np.diff(fn.values[mask])
            worst = float(dv.min()) if dv.size else 0.0
            rep.add(f"monotone.{name}", ok, worst, None)
    bracket.report = rep
    return rep


def _monotone_samples(alpha: GridFunction, beta: GridFunction, n: int, rng, monotone: bool,
                      window_start: float) -> list[GridFunction]:
    out = []
    for _ in range(n):
        theta = rng.random(alpha.values.size)
        vals = theta * alpha.values + (1.0 - theta) * beta.values
        if monotone:
            mask = alpha.t >= window_start - alpha.tol_dom
            i = int(np.argmax(mask))
            vals[i:] = np.maximum.accumulate(vals[i:])
        out.append(alpha.like(vals))
    return out


def verify_bounds(p: ProblemSpec, bracket: BracketPair, samples: int = 8, rng_seed: int = 0,
                  tol: Optional[float] = None) -> Report:
    """Sample the frozen field over the bracket and compare with the bound data.

    Times are the I+ cell midpoints; states are alpha, beta and their mean;
    functional arguments range over {alpha, beta} and ``samples`` seeded
    random convex combinations (made nondecreasing on [t0 - r_hat, t0 + L]
    by a running maximum outside the state-only mode).  For signed bounds
    only |f| <= psi is checked.

    The report carries ``f_min`` and ``f_max`` (the sampled envelope) in the
    detail of its first record.
    """
    alpha, beta = bracket.alpha, bracket.beta
    bounds = bracket.bounds
    rng = np.random.default_rng(rng_seed)
    monotone = p.tau_mode is not TauMode.StateOnly
    gammas = [alpha, beta] + _monotone_samples(
        alpha, beta, samples, rng, monotone, p.domain.monotone_window[0])
    pairs = [(g1, g2) for g1 in gammas[:2] for g2 in gammas[:2]]
    extra = gammas[2:]
    pairs += [(extra[i], extra[(i + 1) % len(extra)]) for i in range(len(extra))]

    t = alpha.t_plus
    tm = t[:-1] + 0.5 * alpha.h_plus
    a_mid = 0.5 * (alpha.plus_values[:-1] + alpha.plus_values[1:])
    b_mid = 0.5 * (beta.plus_values[:-1] + beta.plus_values[1:])
    xs = (a_mid, b_mid, 0.5 * (a_mid + b_mid))
    fmin = np.full(tm.size, np.inf)
    fmax = np.full(tm.size, -np.inf)
    for g1, g2 in pairs:
        g = make_frozen_rhs(p, g1, g2)
        for x in xs:
            for i, (s, z) in enumerate(zip(tm, x)):
                try:
                    val = g(float(s), float(z))
                except Exception as exc:  # noqa: BLE001
                    raise EvaluatorError(f"f failed at t={s}, x={z}: {exc}") from exc
                if val < fmin[i]:
                    fmin[i] = val
                if val > fmax[i]:
                    fmax[i] = val
    lo = 0.5 * (bounds.psi_m.values[:-1] + bounds.psi_m.values[1:])
    hi = 0.5 * (bounds.psi_M.values[:-1] + bounds.psi_M.values[1:])
    if tol is None:
        tol = 1e-9 * (1.0 + float(max(np.max(np.abs(fmin)), np.max(np.abs(fmax)))))
    env = {"f_min": float(fmin.min()), "f_max": float(fmax.max())}
    rep = Report()
    if bounds.signed:
        m = hi - np.maximum(np.abs(fmin), np.abs(fmax))
        j = int(np.argmin(m))
        rep.add("bounds.abs", m[j] >= -tol, float(m[j]), float(tm[j]), **env)
    else:
        m = fmin - lo
        j = int(np.argmin(m))
        rep.add("bounds.min", m[j] >= -tol, float(m[j]), float(tm[j]), **env)
        m = hi - fmax
        j = int(np.argmin(m))
        rep.add("bounds.max", m[j] >= -tol, float(m[j]), float(tm[j]), **env)
    return rep


def contraction_bound(lip: LipschitzData, mode: TauMode) -> float:
    """Left-hand side of the contraction inequality (trapezoid on I+)."""
    mode = TauMode.parse(mode)
    integ = lambda g: g.integral_plus()  # noqa: E731
    total = lip.lam + integ(lip.L1) + integ(lip.L2)
    if mode is TauMode.StateOnly:
        total += integ(lip.L3)
    else:
        total += integ(lip.L1 * lip.L3) + integ(lip.L4)
    return float(total)


def contraction_margin(lip: LipschitzData, mode: TauMode) -> float:
    """One minus :func:`contraction_bound`; positive certifies uniqueness."""
    return 1.0 - contraction_bound(lip, mode)


@dataclass
class MaxPrincipleResult:
    """Premise status and, when every premise holds, the checked conclusion."""

    premises: dict
    conclusion_asserted: bool
    conclusion_holds: Optional[bool]
    max_p: float
    report: Report = field(default_factory=Report)


def maximum_principle_check(pfun: GridFunction, Psi: GridFunction, lam: float,
                            premise_tol: float = 0.0) -> MaxPrincipleResult:
    """Check the premises of the maximum principle for ``pfun`` and its conclusion.

    Premises: cell quotients of p on I+ at most Psi(t_mid) * max p; I- node
    values at most lam * max p; lam + int Psi < 1.  The conclusion
    max p <= tol_ord is asserted only when all three hold.
    """
    if np.any(Psi.values < 0):
        raise ValueError("Psi must be nonnegative")
    if not 0 <= lam < 1:
        raise ValueError("lam must lie in [0, 1)")
    if Psi.values.size != pfun.t_plus.size:
        raise GridMismatch("Psi must live on the I+ grid of p")
    M = float(np.max(pfun.values))
    rep = Report()
    psi_mid = 0.5 * (Psi.values[:-1] + Psi.values[1:])
    m = psi_mid * M - pfun.quotients_plus()
    j = int(np.argmin(m))
    el1 = bool(m[j] >= -premise_tol)
    rep.add("el1", el1, float(m[j]), float(pfun.t_plus[j]))
    m = lam * M - pfun.minus_values
    j = int(np.argmin(m))
    el2 = bool(m[j] >= -premise_tol)
    rep.add("el2", el2, float(m[j]), float(pfun.t_minus[j]))
    s = lam + Psi.integral_plus()
    el3 = bool(s < 1.0)
    rep.add("el3", el3, 1.0 - s, None)
    premises = {"el1": el1, "el2": el2, "el3": el3}
    asserted = el1 and el2 and el3
    holds = None
    if asserted:
        tol = tol_ord(pfun)
        holds = M <= tol
        rep.add("conclusion", holds, tol - M, float(pfun.t[int(np.argmax(pfun.values))]))
    return MaxPrincipleResult(premises, asserted, holds, M, rep)


def transversality_check(lines: Sequence[DiscontinuityLine], f_min: float, f_max: float,
                         tol: Optional[float] = None) -> Report:
    """A line is admissible iff its slope lies outside [f_min - tol, f_max + tol].

    The margin is the distance from the slope to that closed interval
    (negative inside it).
    """
    if f_min > f_max:
        raise ValueError("need f_min <= f_max")
    if tol is None:
        tol = 1e-9 * (1.0 + max(abs(f_min), abs(f_max)))
    rep = Report()
    for i, line in enumerate(lines):
        margin = max(f_min - tol - line.slope, line.slope - f_max - tol)
        rep.add(f"line[{i}]", margin > 0, float(margin), (line.slope, line.intercept))
    return rep
