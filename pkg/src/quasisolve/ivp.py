"""Approximate greatest and least solutions of a frozen scalar IVP inside [alpha, beta].

The march is explicit Euler with the field sampled at the cell midpoint
time.  To approximate the *extremal* solution of a field that may jump in
``z``, the state is probed at ``z`` and ``z +/- eps``.  If the three samples
look like a smooth function (small second difference) the plain value
``g(t, z)`` is used, so the greatest and least marches coincide exactly on
continuous fields.  If a jump is detected the largest (greatest solution)
or smallest (least solution) sample is taken, which selects the one-sided
limit that the extremal solution follows across a transversal
discontinuity.  After each step the state is clamped into the bracket.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import BracketViolation, GridMismatch, NonFiniteRHS
from .grid import GridFunction, tol_ord

__all__ = ["ExtremalDirection", "IvpResult", "solve_extremal", "ivp_residual"]


class ExtremalDirection(enum.Enum):
    Greatest = "greatest"
    Least = "least"


@dataclass
class IvpResult:
    """Output of :func:`solve_extremal`.

    ``solution`` lives on I+ (a history-free domain); ``clamp_events`` counts
    steps that were pushed back into the bracket by more than the order
    tolerance; ``jump_events`` counts steps where the jump gate fired.
    """

    solution: GridFunction
    clamp_events: int
    bias_radius: float
    jump_events: int = 0


def _checked(g, t, z):
    val = g(t, z)
    if not math.isfinite(val):
        raise NonFiniteRHS(f"g({t!r}, {z!r}) = {val}")
    return val


def solve_extremal(
    g: Callable[[float, float], float],
    z0: float,
    alpha: GridFunction,
    beta: GridFunction,
    direction: ExtremalDirection,
    h: Optional[float] = None,
    bias_radius: Optional[float] = None,
) -> IvpResult:
    """March z' = g(t, z) from ``z0`` at t0 across I+ toward an extremal solution.

    Parameters
    ----------
    g : callable
        Frozen field ``g(t, z)``.
    z0 : float
        Initial value at t0; must lie in [alpha(t0), beta(t0)].
    alpha, beta : GridFunction
        Bracket; only the I+ part is used.
    direction : ExtremalDirection
    h : float, optional
        Step; must match the bracket grid when given.
    bias_radius : float, optional
        Probe radius ``eps`` for the jump gate (default: the step).

    Raises
    ------
    BracketViolation
        If ``z0`` lies outside the bracket at t0.
    NonFiniteRHS
        If a sampled value of ``g`` is inf or nan.
    """
    alpha.check_grid(beta)
    if h is not None and not math.isclose(h, alpha.h, rel_tol=1e-12):
        raise GridMismatch(f"step {h} does not match the bracket grid step {alpha.h}")
    t = alpha.t_plus
    a = alpha.plus_values
    b = beta.plus_values
    hp = alpha.h_plus
    eps = hp if bias_radius is None else float(bias_radius)
    tol = tol_ord(alpha, beta)
    z0 = float(z0)
    if not (a[0] - tol <= z0 <= b[0] + tol):
        raise BracketViolation(f"z0={z0} outside [{a[0]}, {b[0]}] at t0")
    greatest = direction is ExtremalDirection.Greatest

    n = t.size - 1
    out = np.empty(n + 1)
    z = min(max(z0, a[0]), b[0])
    out[0] = z
    clamps = jumps = 0
    for i in range(n):
        tm = t[i] + 0.5 * hp
        lo = 0.5 * (a[i] + a[i + 1])
        hi = 0.5 * (b[i] + b[i + 1])
        zc = min(max(z, lo), hi)
        g0 = _checked(g, tm, zc)
        zp = min(zc + eps, hi)
        zm = max(zc - eps, lo)
        gate = eps * (1.0 + abs(g0))
        slope = g0
        if zp > zc and zm < zc:
            gp = _checked(g, tm, zp)
            gm = _checked(g, tm, zm)
            if abs((gp - g0) - (g0 - gm)) > gate:
                slope = max(g0, gp, gm) if greatest else min(g0, gp, gm)
                jumps += 1
        elif zp > zc or zm < zc:
            zs = zp if zp > zc else zm
            gs = _checked(g, tm, zs)
            if abs(gs - g0) > math.sqrt(eps) * (1.0 + abs(g0)):
                slope = max(g0, gs) if greatest else min(g0, gs)
                jumps += 1
        z_next = z + hp * slope
        lo1, hi1 = a[i + 1], b[i + 1]
        if z_next < lo1 or z_next > hi1:
            if z_next < lo1 - tol or z_next > hi1 + tol:
                clamps += 1
            z_next = min(max(z_next, lo1), hi1)
        out[i + 1] = z_next
        z = z_next
    sol = GridFunction(alpha.domain.plus_domain(), alpha.h, out)
    return IvpResult(sol, clamps, eps, jumps)


def ivp_residual(g: Callable[[float, float], float], z: GridFunction, z0: float) -> float:
    """Defect of ``z`` as a solution of z' = g(t, z), z(t0) = z0.

    Maximum over I+ cells of |dz/h - g(t_mid, z_mid)| plus |z(t0) - z0|.
    """
    t = z.t_plus
    v = z.plus_values
    hp = z.h_plus
    q = np.diff(v) / hp
    tm = t[:-1] + 0.5 * hp
    zm = 0.5 * (v[:-1] + v[1:])
    gv = np.array([g(float(s), float(x)) for s, x in zip(tm, zm)])
    return float(np.max(np.abs(q - gv))) + abs(float(v[0]) - float(z0))
