"""Problem data for x'(t) = f(t, x(t), x(tau(t, x(t), x)), x) with x = Lambda(x) + k on I-.

The right-hand side is handled through *frozen* scalar fields: once the two
functional arguments (gamma1, gamma2) are fixed, the problem reduces to a
scalar ODE z' = g(t, z).  How gamma1 and gamma2 enter ``g`` depends on the
monotonicity of the deviating argument in its functional slot, which is
recorded in :class:`TauMode`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import EvaluatorError, GridMismatch, MissingField, UnsortedInput
from .grid import GridFunction, TimeDomain
from .report import Report

__all__ = [
    "TauMode",
    "ProblemSpec",
    "FrozenRHS",
    "make_frozen_rhs",
    "frozen_initial_segment",
    "monotone_split",
    "check_k_regularity",
]


class TauMode(enum.Enum):
    """How the deviating argument depends on its functional argument."""

    NonincreasingInGamma = "nonincreasing"
    NondecreasingInGamma = "nondecreasing"
    StateOnly = "state_only"

    @classmethod
    def parse(cls, value: "TauMode | str") -> "TauMode":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        for m in cls:
            if key in (m.value, m.name.lower()):
                return m
        raise ValueError(f"unknown tau mode {value!r}")


KLike = Union[Callable[[float], float], GridFunction, float]


@dataclass
class ProblemSpec:
    """Evaluators describing one functional initial value problem.

    Parameters
    ----------
    domain : TimeDomain
    f : callable
        ``f(t, x, y, gamma) -> float``.  ``y`` is the value of the unknown at
        the deviated time, ``gamma`` the whole unknown as a GridFunction.
    tau : callable
        ``tau(t, x, gamma) -> float``.  In ``StateOnly`` mode it is called
        with ``gamma=None``.
    lambda_op : callable
        ``Lambda(gamma) -> float``, a functional on grid functions.
    k : callable, GridFunction or float
        History on I-.  A plain number when ``r == 0``.
    tau_mode : TauMode
    k_hat_psi : callable, optional
        Integrable bound with ``k(t) - k(s) <= int_s^t k_hat_psi``.
    closed_domain : bool
        Whether ``f`` is defined at ``x = k(t0)`` (used by the lower linear
        search, which may then return a zero slope).
    """

    domain: TimeDomain
    f: Callable
    tau: Callable
    lambda_op: Callable
    k: KLike
    tau_mode: TauMode = TauMode.NonincreasingInGamma
    k_hat_psi: Optional[Callable[[float], float]] = None
    closed_domain: bool = False
    name: str = ""

    def __post_init__(self):
        self.tau_mode = TauMode.parse(self.tau_mode)
        if self.domain.r == 0 and callable(self.k) and not isinstance(self.k, GridFunction):
            # a history on a single point is just its value
            self.k = float(self.k(self.domain.t0))

    def k_at(self, t: float) -> float:
        k = self.k
        if isinstance(k, GridFunction):
            return k(t)
        if callable(k):
            try:
                return float(k(t))
            except Exception as exc:  # noqa: BLE001 - surfaced with context
                raise EvaluatorError(f"k({t}) failed: {exc}") from exc
        return float(k)

    def lam(self, gamma: GridFunction) -> float:
        try:
            return float(self.lambda_op(gamma))
        except Exception as exc:  # noqa: BLE001
            raise EvaluatorError(f"Lambda failed: {exc}") from exc


class FrozenRHS:
    """Scalar field g(t, z) obtained by freezing (gamma1, gamma2) in f.

    Deviated times leaving I+- by more than the domain tolerance are clamped
    back; ``clamp_warnings`` counts those events.
    """

    def __init__(self, p: ProblemSpec, gamma1: GridFunction, gamma2: GridFunction):
        gamma1.check_grid(gamma2)
        if gamma1.domain != p.domain:
            raise GridMismatch("frozen functions must live on the problem domain")
        self.problem = p
        self.gamma1 = gamma1
        self.gamma2 = gamma2
        self.mode = p.tau_mode
        self.clamp_warnings = 0
        self._lo = p.domain.t_start
        self._hi = p.domain.t_end
        self._tol = gamma1.tol_dom
        if self.mode is TauMode.NonincreasingInGamma:
            self._tau_arg = gamma1
        elif self.mode is TauMode.NondecreasingInGamma:
            self._tau_arg = gamma2
        else:
            self._tau_arg = None

    def deviated_time(self, t: float, z: float) -> float:
        s = float(self.problem.tau(t, z, self._tau_arg))
        if s < self._lo or s > self._hi:
            if s < self._lo - self._tol or s > self._hi + self._tol:
                self.clamp_warnings += 1
            s = min(max(s, self._lo), self._hi)
        return s

    def __call__(self, t: float, z: float) -> float:
        s = self.deviated_time(t, z)
        return float(self.problem.f(t, z, self.gamma2._eval_scalar(s), self.gamma1))


def make_frozen_rhs(p: ProblemSpec, gamma1: GridFunction, gamma2: GridFunction) -> FrozenRHS:
    """Freeze the functional arguments of ``p.f`` according to ``p.tau_mode``.

    NonincreasingInGamma: g(t,z) = f(t, z, gamma2(tau(t,z,gamma1)), gamma1);
    NondecreasingInGamma: g(t,z) = f(t, z, gamma2(tau(t,z,gamma2)), gamma1);
    StateOnly:            g(t,z) = f(t, z, gamma2(tau(t,z)), gamma1).
    """
    return FrozenRHS(p, gamma1, gamma2)


def frozen_initial_segment(p: ProblemSpec, gamma1: GridFunction) -> np.ndarray:
    """Values of Lambda(gamma1) + k at the I- nodes of gamma1's grid.

    The last entry is the anchor z0 at t0; with ``r == 0`` the array has
    length one.
    """
    if gamma1.domain != p.domain:
        raise GridMismatch("gamma1 must live on the problem domain")
    lam = p.lam(gamma1)
    return np.array([lam + p.k_at(float(s)) for s in gamma1.t_minus])


def monotone_split(samples: Sequence[tuple[float, float]]) -> tuple[np.ndarray, np.ndarray]:
    """Split a sampled 1-D function into a nondecreasing and a nonincreasing part.

    Parameters
    ----------
    samples : sequence of (y, value)
        Sorted by ``y``.

    Returns
    -------
    g1, g2 : ndarray
        ``g1`` starts at the first value and accumulates the positive
        increments, ``g2`` starts at 0 and accumulates the negative ones.
        ``g1 + g2`` reproduces the samples up to floating-point rounding of
        the partial sums.
    """
    arr = np.asarray(samples, dtype=float)
    if arr.size == 0:
        return np.zeros(0), np.zeros(0)
    arr = arr.reshape(-1, 2)
    y, v = arr[:, 0], arr[:, 1]
    if np.any(np.diff(y) < 0):
        raise UnsortedInput("samples must be sorted by their abscissa")
    if not np.all(np.isfinite(v)):
        raise ValueError("sample values must be finite")
    d = np.diff(v)
    g1 = v[0] + np.concatenate([[0.0], np.cumsum(np.maximum(d, 0.0))])
    g2 = np.concatenate([[0.0], np.cumsum(np.minimum(d, 0.0))])
    return g1, g2


def _cell_integrals(fn: Callable[[float], float], t: np.ndarray) -> np.ndarray:
    """Simpson integral of ``fn`` over each cell [t_i, t_{i+1}]."""
    a, b = t[:-1], t[1:]
    fa = np.array([fn(float(s)) for s in a])
    fb = np.array([fn(float(s)) for s in b])
    fm = np.array([fn(float(s)) for s in 0.5 * (a + b)])
    return (b - a) * (fa + 4.0 * fm + fb) / 6.0


def check_k_regularity(p: ProblemSpec, h: float = 1e-3) -> Report:
    """Check k(t) - k(s) <= int_s^t k_hat_psi for all nodes s <= t of [t0 - r_hat, t0].

    Returns a one-record report whose margin is minus the worst excess.
    """
    if p.k_hat_psi is None:
        raise MissingField("k_hat_psi is required for the history regularity check")
    d = p.domain
    rep = Report()
    if d.r_hat == 0:
        rep.add("k_regularity", True, 0.0, None)
        return rep
    n = max(1, int(round(d.r_hat / h)))
    t = np.linspace(d.t0 - d.r_hat, d.t0, n + 1)
    kv = np.array([p.k_at(float(s)) for s in t])
    cum = np.concatenate([[0.0], np.cumsum(_cell_integrals(p.k_hat_psi, t))])
    dk = kv - cum
    running_min = np.minimum.accumulate(dk)
    excess = dk - running_min
    j = int(np.argmax(excess))
    worst = float(excess[j])
    tol = 1e-9 * (1.0 + float(np.max(np.abs(kv))))
    rep.add("k_regularity", worst <= tol, -worst, float(t[j]))
    return rep
