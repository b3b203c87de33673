"""Time domains and piecewise-linear grid functions with the pointwise order.

Every function the solver manipulates lives on the interval
``[t0 - r, t0 + L]`` and is stored by its values on a uniform grid that
always contains ``t0``.  Between nodes the function is the linear
interpolant, so it is continuous by construction and node-wise comparisons
are exact comparisons of the represented functions.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Union

import numpy as np

from .errors import DomainError, GridMismatch

__all__ = [
    "TimeDomain",
    "GridFunction",
    "BoundData",
    "tol_ord",
    "partial_le",
    "sup_distance",
    "is_nondecreasing_on",
    "in_bracket_plus",
]


@dataclass(frozen=True)
class TimeDomain:
    """The intervals I- = [t0-r, t0], I+ = [t0, t0+L] and the span r_hat.

    ``r_hat`` marks the part ``[t0 - r_hat, t0]`` of the history interval on
    which functions of the order interval are required to be nondecreasing.
    """

    t0: float
    L: float
    r: float = 0.0
    r_hat: float = 0.0

    def __post_init__(self):
        for name in ("t0", "L", "r", "r_hat"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not self.L > 0:
            raise ValueError(f"L must be positive, got {self.L}")
        if self.r < 0:
            raise ValueError(f"r must be nonnegative, got {self.r}")
        if not 0 <= self.r_hat <= self.r:
            raise ValueError(f"need 0 <= r_hat <= r, got r_hat={self.r_hat}, r={self.r}")

    @property
    def t_start(self) -> float:
        return self.t0 - self.r

    @property
    def t_end(self) -> float:
        return self.t0 + self.L

    @property
    def minus(self) -> tuple[float, float]:
        return (self.t0 - self.r, self.t0)

    @property
    def plus(self) -> tuple[float, float]:
        return (self.t0, self.t0 + self.L)

    @property
    def full(self) -> tuple[float, float]:
        return (self.t0 - self.r, self.t0 + self.L)

    @property
    def monotone_window(self) -> tuple[float, float]:
        """[t0 - r_hat, t0 + L], where order-interval members must be nondecreasing."""
        return (self.t0 - self.r_hat, self.t0 + self.L)

    def plus_domain(self) -> "TimeDomain":
        """The domain of functions restricted to I+ (history length zero)."""
        return TimeDomain(self.t0, self.L, 0.0, 0.0)

    def contains(self, t: float, tol: float = 0.0) -> bool:
        return self.t_start - tol <= t <= self.t_end + tol


@lru_cache(maxsize=64)
def _grid(domain: TimeDomain, h: float):
    """Nodes of the uniform grid: (t, n_minus, h_minus, h_plus)."""
    n_minus = 0 if domain.r == 0 else max(1, int(round(domain.r / h)))
    n_plus = max(1, int(round(domain.L / h)))
    t_plus = np.linspace(domain.t0, domain.t_end, n_plus + 1)
    if n_minus:
        t_minus = np.linspace(domain.t_start, domain.t0, n_minus + 1)
        t = np.concatenate([t_minus[:-1], t_plus])
        h_minus = domain.r / n_minus
    else:
        t = t_plus
        h_minus = 0.0
    t.setflags(write=False)
    return t, n_minus, h_minus, domain.L / n_plus


def tol_ord(*gs: "GridFunction") -> float:
    """Scale-aware order tolerance 1e-9 * (1 + max sup-norm)."""
    scale = max((g.sup_norm() for g in gs), default=0.0)
    return 1e-9 * (1.0 + scale)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """A continuous piecewise-linear function on the grid of ``domain``.

    Parameters
    ----------
    domain : TimeDomain
    h : float
        Target node spacing.  I- and I+ get their own uniform sub-grids
        whose spacing is the closest to ``h`` that fits exactly; ``t0`` is
        always a node.
    values : array_like
        One value per node.
    """

    domain: TimeDomain
    h: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        h = float(self.h)
        if not h > 0:
            raise ValueError(f"h must be positive, got {h}")
        object.__setattr__(self, "h", h)
        vals = np.array(self.values, dtype=float)
        if vals.ndim == 0:
            vals = np.full(self.t.shape, float(vals))
        if vals.shape != self.t.shape:
            raise GridMismatch(f"expected {self.t.size} node values, got {vals.shape}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    # -- construction -------------------------------------------------------

    @classmethod
    def from_callable(cls, domain: TimeDomain, h: float, fn: Callable[[float], float]) -> "GridFunction":
        t = _grid(domain, float(h))[0]
        return cls(domain, h, [fn(float(s)) for s in t])

    @classmethod
    def constant(cls, domain: TimeDomain, h: float, c: float) -> "GridFunction":
        return cls(domain, h, float(c))

    def like(self, values) -> "GridFunction":
        """A new function on the same grid."""
        return GridFunction(self.domain, self.h, values)

    # -- grid geometry ------------------------------------------------------

    @property
    def t(self) -> np.ndarray:
        return _grid(self.domain, self.h)[0]

    @property
    def i0(self) -> int:
        """Index of the node t0."""
        return _grid(self.domain, self.h)[1]

    @property
    def h_plus(self) -> float:
        return _grid(self.domain, self.h)[3]

    @property
    def h_minus(self) -> float:
        return _grid(self.domain, self.h)[2]

    @property
    def t_plus(self) -> np.ndarray:
        return self.t[self.i0:]

    @property
    def t_minus(self) -> np.ndarray:
        return self.t[: self.i0 + 1]

    @property
    def plus_values(self) -> np.ndarray:
        return self.values[self.i0:]

    @property
    def minus_values(self) -> np.ndarray:
        return self.values[: self.i0 + 1]

    @property
    def tol_dom(self) -> float:
        return self.h * 1e-6

    def same_grid(self, other: "GridFunction") -> bool:
        return self.domain == other.domain and self.h == other.h

    def check_grid(self, other: "GridFunction") -> None:
        if not self.same_grid(other):
            raise GridMismatch(
                f"grid mismatch: {self.domain}, h={self.h} vs {other.domain}, h={other.h}"
            )

    # -- evaluation ---------------------------------------------------------

    def __call__(self, t):
        if np.ndim(t) == 0:
            return self._eval_scalar(float(t))
        t = np.asarray(t, dtype=float)
        d = self.domain
        tol = self.tol_dom
        if np.any(t < d.t_start - tol) or np.any(t > d.t_end + tol):
            raise DomainError(f"evaluation outside [{d.t_start}, {d.t_end}]")
        return np.interp(t, self.t, self.values)

    def _eval_scalar(self, t: float) -> float:
        d = self.domain
        _, n_minus, h_minus, h_plus = _grid(d, self.h)
        if t >= d.t0:
            if t > d.t_end:
                if t > d.t_end + self.tol_dom:
                    raise DomainError(f"t={t} outside [{d.t_start}, {d.t_end}]")
                return float(self.values[-1])
            s = (t - d.t0) / h_plus
            base = n_minus
            n_cells = self.values.size - 1 - n_minus
        else:
            if t < d.t_start:
                if t < d.t_start - self.tol_dom or n_minus == 0:
                    if n_minus == 0 and t >= d.t0 - self.tol_dom:
                        return float(self.values[0])
                    raise DomainError(f"t={t} outside [{d.t_start}, {d.t_end}]")
                return float(self.values[0])
            s = (t - d.t_start) / h_minus
            base = 0
            n_cells = n_minus
        i = int(s)
        if i >= n_cells:
            return float(self.values[base + n_cells])
        w = s - i
        v = self.values
        if w == 0.0:
            return float(v[base + i])
        return float(v[base + i] + w * (v[base + i + 1] - v[base + i]))

    # -- algebra / lattice --------------------------------------------------

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def _other_values(self, other):
        if isinstance(other, GridFunction):
            self.check_grid(other)
            return other.values
        return float(other)

    def __add__(self, other):
        return self.like(self.values + self._other_values(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self.like(self.values - self._other_values(other))

    def __rsub__(self, other):
        return self.like(self._other_values(other) - self.values)

    def __mul__(self, c):
        return self.like(self.values * self._other_values(c))

    __rmul__ = __mul__

    def __neg__(self):
        return self.like(-self.values)

    def maximum(self, other: "GridFunction") -> "GridFunction":
        """Pointwise max (the lattice join; exact for piecewise-linear functions at nodes)."""
        return self.like(np.maximum(self.values, self._other_values(other)))

    def minimum(self, other: "GridFunction") -> "GridFunction":
        return self.like(np.minimum(self.values, self._other_values(other)))

    def restrict_plus(self) -> "GridFunction":
        """The restriction to I+, as a function on a history-free domain."""
        g = GridFunction(self.domain.plus_domain(), self.h, self.plus_values)
        return g

    def quotients_plus(self) -> np.ndarray:
        """Forward difference quotients on the I+ cells."""
        return np.diff(self.plus_values) / self.h_plus

    def integral_plus(self) -> float:
        """Composite trapezoid integral over I+."""
        return float(np.trapezoid(self.plus_values, self.t_plus))

    # -- serialization ------------------------------------------------------

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        buf.write("t,value\n")
        for s, v in zip(self.t, self.values):
            buf.write(f"{s:.17g},{v:.17g}\n")
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, source, domain: TimeDomain, h: float) -> "GridFunction":
        """Read a ``t,value`` CSV written by :meth:`to_csv` back onto a grid."""
        if isinstance(source, str) and "\n" in source:
            rows = list(csv.reader(io.StringIO(source)))
        else:
            with open(source, newline="") as fh:
                rows = list(csv.reader(fh))
        if rows[0] != ["t", "value"]:
            raise ValueError(f"bad CSV header {rows[0]}")
        t = np.array([float(r[0]) for r in rows[1:]])
        v = np.array([float(r[1]) for r in rows[1:]])
        g = cls(domain, h, v) if t.size == _grid(domain, float(h))[0].size else None
        if g is None or not np.allclose(t, g.t, rtol=0, atol=g.tol_dom):
            raise GridMismatch("CSV nodes do not match the requested grid")
        return g


GridLike = Union[GridFunction, float]


@dataclass(frozen=True)
class BoundData:
    """Derivative bounds psi_m <= gamma' <= psi_M on I+.

    With ``signed=True`` only |gamma'| <= psi is meant and ``psi_m = -psi``.
    """

    psi_m: GridFunction
    psi_M: GridFunction
    signed: bool = False

    def __post_init__(self):
        self.psi_m.check_grid(self.psi_M)
        if self.psi_m.domain.r != 0:
            raise ValueError("bound functions live on I+ only")
        if not self.signed and np.any(self.psi_m.values < 0):
            raise ValueError("psi_m must be nonnegative")
        if np.any(self.psi_m.values > self.psi_M.values):
            raise ValueError("need psi_m <= psi_M node-wise")

    @classmethod
    def from_callables(cls, domain: TimeDomain, h: float, psi_m, psi_M) -> "BoundData":
        pd = domain.plus_domain()
        return cls(_as_grid(pd, h, psi_m), _as_grid(pd, h, psi_M))

    @classmethod
    def symmetric(cls, domain: TimeDomain, h: float, psi) -> "BoundData":
        pd = domain.plus_domain()
        g = _as_grid(pd, h, psi)
        if np.any(g.values < 0):
            raise ValueError("psi must be nonnegative")
        return cls(-g, g, signed=True)


def _as_grid(domain: TimeDomain, h: float, fn) -> GridFunction:
    if isinstance(fn, GridFunction):
        return fn
    if callable(fn):
        return GridFunction.from_callable(domain, h, fn)
    return GridFunction.constant(domain, h, fn)


def partial_le(g1: GridFunction, g2: GridFunction, tol: float = 0.0) -> bool:
    """True iff g1 <= g2 + tol at every node."""
    g1.check_grid(g2)
    return bool(np.all(g1.values <= g2.values + tol))


def sup_distance(g1: GridFunction, g2: GridFunction) -> float:
    g1.check_grid(g2)
    return float(np.max(np.abs(g1.values - g2.values)))


def is_nondecreasing_on(g: GridFunction, a: float, b: float, tol: float = 0.0) -> bool:
    """True iff g never decreases by more than ``tol`` between successive nodes of [a, b]."""
    d = g.domain
    eps = g.tol_dom
    if a > b or a < d.t_start - eps or b > d.t_end + eps:
        raise DomainError(f"[{a}, {b}] is not inside [{d.t_start}, {d.t_end}]")
    inside = (g.t > a + eps) & (g.t < b - eps)
    vals = np.concatenate([[g(a)], g.values[inside], [g(b)]])
    return bool(np.all(np.diff(vals) >= -tol))


def in_bracket_plus(g: GridFunction, bracket, bounds: BoundData, tol: float | None = None) -> bool:
    """Membership of ``g`` in the order interval [alpha, beta]^+.

    Checks alpha <= g <= beta node-wise, the derivative bounds on the I+
    cell quotients, and monotonicity on [t0 - r_hat, t0 + L].  For signed
    bounds only |quotient| <= psi is checked and monotonicity is skipped.
    """
    alpha, beta = bracket.alpha, bracket.beta
    g.check_grid(alpha)
    g.check_grid(beta)
    if tol is None:
        tol = tol_ord(g, alpha, beta)
    if not (partial_le(alpha, g, tol) and partial_le(g, beta, tol)):
        return False
    q = g.quotients_plus()
    if q.size != bounds.psi_M.values.size - 1:
        raise GridMismatch("bound data grid does not match I+ of g")
    lo = 0.5 * (bounds.psi_m.values[1:] + bounds.psi_m.values[:-1])
    hi = 0.5 * (bounds.psi_M.values[1:] + bounds.psi_M.values[:-1])
    if bounds.signed:
        return bool(np.all(np.abs(q) <= hi + tol))
    if np.any(q < lo - tol) or np.any(q > hi + tol):
        return False
    a, b = g.domain.monotone_window
    return is_nondecreasing_on(g, a, b, tol)
