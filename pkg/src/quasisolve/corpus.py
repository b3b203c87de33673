"""Ready-made problems with brackets, Lipschitz data and expected outcomes.

Families
--------
ex1, ex1_uniqueness
    A discontinuous equation mixing a rational-jump function, a field that
    equals 1 on countably many slope-+-3 lines, and a deviated argument
    depending on x(0); integral history functional.
ej1, ej1_cantor
    A singular equation (blow-up at x = 1/2 and at y = 0) solved between
    affine lower/upper solutions found by the linear searches; the
    ``cantor`` variant uses indicators of fat Cantor sets as coefficients.
ex2_odd, ex2_even
    A sign-changing equation x' = -f1 x(sin(1/t + f2 x))^n with the
    oscillating history t^2 sin(1/t) and a state-only deviation.
probe_linear
    x' = a - b x, x(0) = x0, without history: a smooth oracle problem.

Coefficients that are functions of t in the general setting are taken
constant here and overridable by name.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Optional

import numpy as np

from .constructors import (
    LinearBracketParams,
    bounded_bracket,
    linear_bracket,
    search_linear_lower,
    search_linear_upper,
)
from .errors import DomainError, ParamValidation, UnknownExample
from .grid import BoundData, GridFunction, TimeDomain
from .problem import ProblemSpec, TauMode
from .report import Report
from .verify import (
    BracketPair,
    DiscontinuityLine,
    LipschitzData,
    contraction_bound,
    contraction_margin,
)

__all__ = [
    "CorpusEntry",
    "EXAMPLES",
    "build_example",
    "default_params",
    "enumerate_rationals",
    "phi_decreasing",
    "phi2_eval",
    "fat_cantor_indicator",
    "fat_cantor_mask",
    "random_monotone_probe",
]

UNIQUE = "unique-solution"
QUASI = "quasisolutions-only"


# -- special functions -------------------------------------------------------


@lru_cache(maxsize=None)
def enumerate_rationals(n_terms: int, q1_first: bool = False) -> tuple[float, ...]:
    """First ``n_terms`` nonnegative rationals in diagonal order.

    For s = 1, 2, ... and q = 1..s the fraction (s - q)/q is listed when in
    lowest terms: 0, 1, 2, 1/2, 3, 1/3, 4, 3/2, 2/3, 1/4, ...  With
    ``q1_first`` the value 4 is swapped into the first position.
    """
    out: list[float] = []
    s = 1
    while len(out) < n_terms + 8:
        for q in range(1, s + 1):
            p = s - q
            if math.gcd(p, q) == 1:
                out.append(p / q)
        s += 1
    if q1_first:
        i = out.index(4.0)
        out[0], out[i] = out[i], out[0]
    return tuple(out[:n_terms])


@lru_cache(maxsize=None)
def _phi_table(n_terms: int, q1_first: bool):
    q = enumerate_rationals(n_terms, q1_first)
    order = sorted(range(n_terms), key=lambda m: q[m])
    qs = [q[m] for m in order]
    cum = np.concatenate([[0.0], np.cumsum([2.0 ** -(m + 1) for m in order])])
    return qs, cum


def phi_decreasing(x: float, q1_first: bool = False, n_terms: int = 40, strict: bool = True) -> float:
    """1 - sum of 2^-m over the enumerated rationals q_m below x.

    ``strict`` selects q_m < x; otherwise q_m <= x.  The truncated series
    differs from the full one by at most 2^-n_terms.
    """
    qs, cum = _phi_table(int(n_terms), bool(q1_first))
    j = bisect.bisect_left(qs, x) if strict else bisect.bisect_right(qs, x)
    return float(1.0 - cum[j])


def phi2_eval(t: float, x: float, rho: float, mu: float, line_tol: float = 1e-12) -> float:
    """1 on the lines x = 3 sgn(n) t + rho m - 1/|n| (m >= 1, n != 0), else (t x / 5)^mu cos x."""
    for s in (1.0, -1.0):
        base = 3.0 * s * t - x
        # need d = base + rho m in (0, 1] so that 1/d can be an integer
        m_lo = max(1, math.floor(-base / rho))
        m_hi = math.ceil((1.0 - base) / rho)
        for m in range(m_lo, m_hi + 1):
            d = base + rho * m
            if d <= 0 or d > 1 + line_tol:
                continue
            n = max(1, round(1.0 / d))
            if abs(d - 1.0 / n) <= line_tol:
                return 1.0
    return float((t * x / 5.0) ** mu * math.cos(x))


def _cantor_member(x: float, depth: int) -> bool:
    a, length = 0.0, 1.0
    for k in range(1, depth + 1):
        gap = 4.0 ** -k
        seg = 0.5 * (length - gap)
        if x < a + seg:
            pass
        elif x > a + seg + gap:
            a += seg + gap
        elif a + seg < x < a + seg + gap:
            return False
        else:
            return True  # endpoint of a removed interval
        length = seg
    return True


@lru_cache(maxsize=1 << 18)
def _cantor_cached(x: float, depth: int) -> bool:
    return _cantor_member(x, depth)


def fat_cantor_indicator(x: float, depth: int = 20) -> bool:
    """Membership in the depth-truncated Smith-Volterra-Cantor set.

    Stage k removes an open middle interval of length 4^-k from each of the
    2^(k-1) remaining segments; the limit set has measure 1/2.
    """
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x={x} outside [0, 1]")
    if depth < 1:
        raise ValueError("depth must be at least 1")
    return _cantor_cached(float(x), int(depth))


def fat_cantor_mask(xs: np.ndarray, depth: int = 20) -> np.ndarray:
    """Vectorised :func:`fat_cantor_indicator`."""
    xs = np.asarray(xs, dtype=float)
    if np.any(xs < 0) or np.any(xs > 1):
        raise DomainError("points outside [0, 1]")
    a = np.zeros_like(xs)
    inside = np.ones(xs.shape, dtype=bool)
    length = 1.0
    for k in range(1, depth + 1):
        gap = 4.0 ** -k
        seg = 0.5 * (length - gap)
        lo = a + seg
        hi = lo + gap
        inside &= ~((xs > lo) & (xs < hi))
        a = np.where(xs >= hi, hi, a)
        length = seg
    return inside


# -- corpus entries -----------------------------------------------------------


@dataclass
class CorpusEntry:
    """A problem with its bracket and the outcome the certificates predict.

    Attributes
    ----------
    expected : str
        ``"unique-solution"`` when the shipped Lipschitz data give a positive
        contraction margin, else ``"quasisolutions-only"``.
    certifying : dict
        Named values of the inequalities behind ``expected`` (bounds,
        margins, parameter inequalities).
    param_checks : Report
        The parameter inequalities the example relies on.
    envelope : tuple or None
        Bounds (f_min, f_max) of the field over the bracket used for the
        transversality check.
    """

    name: str
    problem: ProblemSpec
    bracket: BracketPair
    lipschitz: Optional[LipschitzData]
    discontinuity_lines: list[DiscontinuityLine]
    expected: str
    certifying: dict
    params: dict
    param_checks: Report
    h: float
    envelope: Optional[tuple[float, float]] = None
    notes: str = ""


_DEFAULTS: dict[str, dict[str, Any]] = {
    "ex1": dict(epsilon=0.01, sigma1=0.4, sigma2=0.1, omega=0.1, delta1=0.1, delta2=2.5,
                rho=0.9, mu=1.0, n_terms=40),
    "ex1_uniqueness": dict(epsilon=0.05, sigma1=0.5, sigma2=0.0, omega=0.1, delta1=0.1,
                           delta2=2.5, rho=0.9, mu=1.0, n_terms=40),
    "ej1": dict(epsilon=0.6, f1=0.0, f2=0.5, f3=1.0, f4=0.1, f5=0.2, mu=2.0, nu=1.0,
                omega=0.2, varphi_slope=0.5, r_bar=0.25, n_terms=40),
    "ej1_cantor": dict(r_bar=0.25, depth=20, n_terms=40),
    "ex2_odd": dict(n=1, f1=0.4, f2=0.5),
    "ex2_even": dict(n=2, f1=0.1, f2=0.5),
    "probe_linear": dict(a=1.0, b=1.0, x0=0.0),
}

EXAMPLES = tuple(_DEFAULTS)


def default_params(name: str) -> dict:
    if name not in _DEFAULTS:
        raise UnknownExample(name)
    return dict(_DEFAULTS[name])


def _merge(name: str, params: Optional[dict]) -> dict:
    out = default_params(name)
    for key, val in (params or {}).items():
        if key not in out:
            raise ParamValidation([f"unknown parameter {key!r} for {name}"])
        out[key] = int(val) if isinstance(out[key], int) and not isinstance(out[key], bool) else float(val)
    return out


def _checks(items: list[tuple[str, float]]) -> Report:
    """Records for inequalities written as ``margin >= 0``."""
    rep = Report()
    for label, margin in items:
        rep.add(label, margin >= 0, float(margin), None)
    return rep


def _raise_if(rep: Report, strict: bool):
    if strict and not rep.passed:
        raise ParamValidation([f"{r.check_id} (margin {r.margin:.4g})" for r in rep.failures()])


def _const_plus(domain: TimeDomain, h: float, c) -> GridFunction:
    pd = domain.plus_domain()
    if callable(c):
        return GridFunction.from_callable(pd, h, c)
    return GridFunction.constant(pd, h, c)


def build_example(name: str, params: Optional[dict] = None, h: float = 1e-3,
                  strict: bool = True) -> CorpusEntry:
    """Build a named corpus entry.

    Parameters
    ----------
    name : str
        One of :data:`EXAMPLES`.
    params : dict, optional
        Overrides of the family defaults (see :func:`default_params`).
    h : float
        Grid step of the shipped bracket and Lipschitz data.
    strict : bool
        Raise :class:`ParamValidation` when a parameter inequality fails;
        otherwise the failure is only recorded in ``param_checks``.

    Raises
    ------
    UnknownExample
    ParamValidation
    """
    if name not in _DEFAULTS:
        raise UnknownExample(name)
    prm = _merge(name, params)
    builder = _BUILDERS[name]
    return builder(name, prm, float(h), strict)


# -- ex1 ------------------------------------------------------------------------


def _build_ex1(name, prm, h, strict):
    eps, s1, s2 = prm["epsilon"], prm["sigma1"], prm["sigma2"]
    om, d1, d2 = prm["omega"], prm["delta1"], prm["delta2"]
    rho, mu, nt = prm["rho"], prm["mu"], int(prm["n_terms"])
    checks = _checks([
        ("positivity", min(eps, s1, s2, om, mu)),
        ("delta1>0", d1),
        ("delta2_in_(0,3)", min(d2, 3.0 - d2)),
        ("rho_in_(0,1)", min(rho, 1.0 - rho)),
        ("sigma_sum", (3.0 - d2) - (s1 + s2)),
        ("epsilon_cond", s1 - (2.0 + (3.0 - d2) / 2.0) * eps),
        ("sigma_cond", s1 - 2.0 * (d1 + s2 * ((5.0 - d2) / 5.0) ** mu + eps * (5.0 - d2))),
        ("omega_cond", 1.0 / (5.0 - d2) - om),
    ])
    _raise_if(checks, strict)

    d = TimeDomain(0.0, 1.0, 1.0, 1.0)

    def f(t, x, y, gamma):
        val = s1 * phi_decreasing(x, True, nt, strict=True) - eps * y
        if s2:
            val += s2 * phi2_eval(t, x, rho, mu)
        return val

    def tau(t, x, gamma):
        return (1.0 - gamma._eval_scalar(0.0) * abs(math.sin(x)) * t) / 2.0

    def lam(gamma):
        return om * gamma.integral_plus()

    p = ProblemSpec(d, f, tau, lam, math.cos, TauMode.NonincreasingInGamma,
                    k_hat_psi=lambda t: -math.sin(t), name=name)
    alpha = GridFunction.constant(d, h, 0.0)
    beta = GridFunction.from_callable(d, h, lambda t: 2.0 + (3.0 - d2) * max(t, 0.0))
    bounds = BoundData(_const_plus(d, h, d1), _const_plus(d, h, s1 + s2))
    bracket = BracketPair(alpha, beta, bounds)

    x_top = 2.0 + (3.0 - d2)
    lines = [DiscontinuityLine(0.0, q, (0.0, 1.0))
             for q in enumerate_rationals(nt, True) if q <= 5.0]
    if s2:
        for sgn in (1.0, -1.0):
            for n in range(1, 11):
                for m in range(1, int(math.ceil((x_top + 4.0) / rho)) + 1):
                    c = rho * m - 1.0 / n
                    lo, hi = sorted((c, c + 3.0 * sgn))
                    if hi >= 0.0 and lo <= x_top:
                        lines.append(DiscontinuityLine(3.0 * sgn, c, (0.0, 1.0)))

    certifying = {name_: rec.margin for name_, rec in ((r.check_id, r) for r in checks)}
    lip = None
    expected = QUASI
    if s2 == 0:
        big = max(1.0, s1)
        lip = LipschitzData.from_callables(
            d, h, L1=eps, L2=0.0, L3=lambda t: t * big / 2.0, L4=lambda t: eps * big * t,
            lam=om, note="L1 = epsilon, L3 = t max(1,|sigma1|)/2, L4 = epsilon max(1,|sigma1|) t")
        certifying["contraction_bound"] = contraction_bound(lip, p.tau_mode)
        certifying["contraction_margin"] = contraction_margin(lip, p.tau_mode)
        certifying["closing_bound"] = om + eps * (1.0 + 3.0 * big / 4.0)
        if certifying["contraction_margin"] > 0:
            expected = UNIQUE
    return CorpusEntry(name, p, bracket, lip, lines, expected, certifying, prm, checks, h,
                       envelope=(d1, 3.0 - d2))


# -- ej1 -------------------------------------------------------------------------


def _pow_t(t, e):
    """t**e on t >= 0 with the limits 0 (e > 0), 1 (e == 0), inf (e < 0) at t = 0."""
    if t > 0:
        return t ** e
    return 0.0 if e > 0 else (1.0 if e == 0 else math.inf)


def _sigma1_ej1(x):
    return -1.0 / (4.0 * (1.0 + x))


def _sigma2_ej1(s):
    return -s / (4.0 * (1.0 + s))


def _ej1_lines(nt, mu, x_top):
    lines = [DiscontinuityLine(-1.0, q, (0.0, 1.0)) for q in enumerate_rationals(nt) if q <= x_top + 1]
    n = 1
    while True:
        c = n ** (-1.0 / mu) + 0.5
        lines.append(DiscontinuityLine(0.0, c, (0.0, 1.0)))
        if n > 50:
            break
        n += 1
    return lines


def _finish_linear(name, p, prm, h, strict, checks, r_bar, psi_fn, eps, lip_fn, lines_fn, notes):
    found = search_linear_upper(p, r_bar, h=h)
    if found is None:
        checks.add("upper_search", False, -1.0, None)
        _raise_if(checks, strict)
        m_beta = n_beta = 2.0 ** 20
    else:
        checks.add("upper_search", True, found[0], None)
        m_beta, n_beta = found
    # the lower slope is kept strictly below the field's lower bound eps
    m_grid = [m for m in (m_beta * 2.0 ** -j for j in range(1, 21)) if m < eps]
    m_alpha = search_linear_lower(p, m_beta, n_beta, r_bar, m_grid=m_grid, h=h)
    if m_alpha is None:
        checks.add("lower_search", False, -1.0, None)
        _raise_if(checks, strict)
        m_alpha = 0.0
    else:
        checks.add("lower_search", 0 < m_alpha < eps, m_alpha, None)
    d = p.domain
    psi = _const_plus(d, h, lambda t: psi_fn(t, m_alpha))
    bounds = BoundData(_const_plus(d, h, eps), psi)
    bracket = linear_bracket(p, LinearBracketParams(m_alpha, m_beta, n_beta), r_bar, h, bounds)
    lip = lip_fn(m_alpha, psi)
    certifying = {r.check_id: r.margin for r in checks}
    certifying.update(m_alpha=m_alpha, m_beta=m_beta, n_beta=n_beta,
                      contraction_bound=contraction_bound(lip, p.tau_mode),
                      contraction_margin=contraction_margin(lip, p.tau_mode))
    expected = UNIQUE if certifying["contraction_margin"] > 0 else QUASI
    x_top = m_beta * d.L + p.k_at(d.t0) + n_beta
    return CorpusEntry(name, p, bracket, lip, lines_fn(x_top), expected, certifying, prm, checks, h,
                       envelope=(eps, float(psi.values.max())), notes=notes)


def _build_ej1(name, prm, h, strict):
    eps, f1, f2, f3, f4, f5 = (prm[k] for k in ("epsilon", "f1", "f2", "f3", "f4", "f5"))
    mu, nu, om, cphi, r_bar = prm["mu"], prm["nu"], prm["omega"], prm["varphi_slope"], prm["r_bar"]
    nt = int(prm["n_terms"])
    checks = _checks([
        ("positivity", min(eps, mu, nu)),
        ("coefficients_nonnegative", min(f1, f2, f3, f4, f5, om, cphi)),
        ("varphi_growth", (1.0 / (3.0 * om) - cphi) if om > 0 else 1.0),
        ("r_bar_in_(0,r]", min(r_bar, 0.5 - r_bar)),
        ("psi_bounded_mu<=3", 3.0 - mu),
        ("f4_integrable_nu<2", 2.0 - nu),
    ])
    _raise_if(checks, strict)
    d = TimeDomain(0.0, 1.0, 0.5, 0.5)

    def f(t, x, y, gamma):
        return (eps + f1 + f2 * phi_decreasing(t + x, False, nt, strict=False)
                + f3 * t ** 3 * math.floor((x - 0.5) ** -mu)
                + f4 * t ** 2 / y ** nu + f5 / (1.0 + y))

    def tau(t, x, gamma):
        s = gamma._eval_scalar(0.0) + gamma._eval_scalar(t) + gamma._eval_scalar(1.0)
        return t + _sigma1_ej1(x) + _sigma2_ej1(s)

    def lam(gamma):
        return cphi * om * gamma.integral_plus()

    p = ProblemSpec(d, f, tau, lam, lambda t: t + 0.5, TauMode.NonincreasingInGamma,
                    k_hat_psi=lambda t: 1.0, name=name)

    def psi_fn(t, m_alpha):
        return (eps + f1 + f2 + f3 * m_alpha ** -mu * _pow_t(t, 3.0 - mu)
                + f4 * max(_pow_t(t, 2.0 - nu), 2.0 ** nu * t * t) + f5)

    def lip_fn(m_alpha, psi):
        sup_psi = max(1.0, float(psi.values.max()))

        def L1(t):
            return nu * f4 * max(_pow_t(t, 1.0 - nu), 2.0 ** (1.0 + nu) * t * t) + f5

        return LipschitzData.from_callables(
            d, h, L1=L1, L2=0.0, L3=3.0 * sup_psi * 0.25, L4=0.0, lam=cphi * om,
            note="L1 = nu max{t^(-1-nu), 2^(1+nu)} f4 + L_g f5, L3 = 3 |psi~| L_sigma2")

    return _finish_linear(name, p, prm, h, strict, checks, r_bar, psi_fn, eps, lip_fn,
                          lambda x_top: _ej1_lines(nt, mu, x_top),
                          "singular at x = 1/2 and y = 0; f4 coefficient is f4 t^2")


def _build_ej1_cantor(name, prm, h, strict):
    r_bar, depth, nt = prm["r_bar"], int(prm["depth"]), int(prm["n_terms"])
    checks = _checks([("r_bar_in_(0,r]", min(r_bar, 0.5 - r_bar)), ("depth", depth - 1)])
    _raise_if(checks, strict)
    d = TimeDomain(0.0, 1.0, 0.5, 0.5)

    def chi(t):
        return 1.0 if 0.0 <= t <= 1.0 and fat_cantor_indicator(t, depth) else 0.0

    def chi4(t):
        return 1.0 if 0.0 <= t <= 0.5 and fat_cantor_indicator(2.0 * t, depth) else 0.0

    def sigma(x):
        return -1.0 / (2.0 * (1.0 + x))

    def f(t, x, y, gamma):
        c = chi(t)
        val = 1.0 + c + c * phi_decreasing(t + x, False, nt, strict=False) + 1.0 / (y + 1.0) * c
        if c:
            val += t ** 3 * math.floor((x - 0.5) ** -2)
        c4 = chi4(t)
        if c4:
            val += t ** 5 * c4 / (4.0 * y ** 4)
        return val

    def tau(t, x, gamma):
        return t + sigma(x)

    p = ProblemSpec(d, f, tau, lambda g: 0.0, lambda t: t + 0.5, TauMode.NonincreasingInGamma,
                    k_hat_psi=lambda t: 1.0, name=name)

    def psi_fn(t, m_alpha):
        if t <= 0:
            return 4.0
        return 1.0 + 1.0 + 1.0 + m_alpha ** -2 * t + max(t ** -4, 16.0) * t ** 5 / 4.0 + 1.0

    def lip_fn(m_alpha, psi):
        def L1(t):
            # nu = 4, f4 = t^5 chi4 / 4, L_g = 1, f5 = chi5
            return max(1.0, 32.0 * t ** 5) * chi4(t) + chi(t)

        return LipschitzData.from_callables(
            d, h, L1=L1, L2=0.0, L3=0.0, L4=0.0, lam=0.0,
            note="L1 = nu max{t^(-1-nu), 2^(1+nu)} t^5 chi4 / 4 + chi5")

    return _finish_linear(name, p, prm, h, strict, checks, r_bar, psi_fn, 1.0, lip_fn,
                          lambda x_top: _ej1_lines(nt, 2.0, x_top),
                          "coefficients are indicators of fat Cantor sets; C4 is scaled into [0, 1/2]")


# -- ex2 -------------------------------------------------------------------------


def _k_ex2(t):
    return t * t * math.sin(1.0 / t) if t != 0 else 0.0


@lru_cache(maxsize=None)
def _history_derivative_sup(n: int) -> float:
    """sup over [-1, 0) of |(k^n)'| for k = t^2 sin(1/t), by dense sampling."""
    t = -np.linspace(1e-6, 1.0, 2_000_001)
    k = t * t * np.sin(1.0 / t)
    dk = 2.0 * t * np.sin(1.0 / t) - np.cos(1.0 / t)
    return float(np.max(np.abs(n * k ** (n - 1) * dk)))


def _build_ex2(name, prm, h, strict):
    n, f1, f2 = int(prm["n"]), prm["f1"], prm["f2"]
    even = name == "ex2_even"
    n_plus = n * f1 ** n                       # sup over [0, 1] of |(beta^n)'|, beta = f1 t
    n_full = max(n_plus, _history_derivative_sup(n))
    value = n * f1 + n_plus * f1 * abs(f2)
    items = [("n_parity", 1.0 if (n % 2 == 0) == even and n >= 1 else -1.0),
             ("f1_nonnegative", f1)]
    if even:
        items += [("f1_norm", 2.0 ** (-1.0 / n) - f1), ("contraction_half", 0.5 - value)]
    else:
        items += [("f1_norm", 1.0 - f1), ("contraction_one", 1.0 - value)]
    checks = _checks(items)
    _raise_if(checks, strict)
    d = TimeDomain(0.0, 1.0, 1.0, 0.0)

    def tau(t, x, gamma=None):
        return math.sin(1.0 / t + f2 * x)

    if even:
        def f(t, x, y, gamma):
            z = gamma._eval_scalar(tau(t, x))
            g1 = z ** n if z < 0 else 0.0
            g2 = y ** n if y >= 0 else 0.0
            return -f1 * (g1 + g2)
    else:
        def f(t, x, y, gamma):
            return -f1 * y ** n

    p = ProblemSpec(d, f, tau, lambda g: 0.0, _k_ex2, TauMode.StateOnly, name=name)
    probe = GridFunction.constant(d, h, 0.0)
    kv = np.array([_k_ex2(float(s)) for s in probe.t_minus])
    beta = probe.like(np.concatenate([kv[:-1], f1 * (probe.t_plus - d.t0)]))
    alpha = probe.like(np.concatenate([kv[:-1], -f1 * (probe.t_plus - d.t0)]))
    bounds = BoundData.symmetric(d, h, f1)
    bracket = BracketPair(alpha, beta, bounds)

    factor = 2.0 if even else 1.0
    lip = LipschitzData.from_callables(
        d, h, L1=n * f1, L2=n * f1 if even else 0.0, L3=factor * n_plus * f1 * abs(f2), lam=0.0,
        note="L3 uses sup |(beta^n)'| over I+")
    lip_full = LipschitzData.from_callables(
        d, h, L1=n * f1, L2=n * f1 if even else 0.0, L3=factor * n_full * f1 * abs(f2), lam=0.0,
        note="L3 uses sup |(beta^n)'| over I- and I+")
    certifying = {r.check_id: r.margin for r in checks}
    certifying.update(
        contraction_value=value,
        contraction_bound=contraction_bound(lip, p.tau_mode),
        contraction_margin=contraction_margin(lip, p.tau_mode),
        beta_n_derivative_plus=n_plus,
        beta_n_derivative_full=n_full,
        contraction_bound_full=contraction_bound(lip_full, p.tau_mode),
        contraction_margin_full=contraction_margin(lip_full, p.tau_mode),
    )
    expected = UNIQUE if certifying["contraction_margin"] > 0 else QUASI
    return CorpusEntry(name, p, bracket, lip, [], expected, certifying, prm, checks, h,
                       envelope=(-f1, f1),
                       notes="history t^2 sin(1/t) is sign-changing and not monotone")


# -- probes ----------------------------------------------------------------------


def _build_probe_linear(name, prm, h, strict):
    a, b, x0 = prm["a"], prm["b"], prm["x0"]
    checks = _checks([("b_positive", b), ("x0_below_equilibrium", a / b - x0 if b > 0 else -1.0),
                      ("x0_nonnegative_slope", a - b * x0)])
    _raise_if(checks, strict)
    d = TimeDomain(0.0, 1.0, 0.0, 0.0)
    p = ProblemSpec(d, lambda t, x, y, g: a - b * x, lambda t, x, g: t, lambda g: 0.0, x0,
                    TauMode.NonincreasingInGamma, closed_domain=True, name=name)
    top = a / b if b > 0 else x0
    alpha = GridFunction.constant(d, h, x0)
    beta = GridFunction.constant(d, h, top)
    bounds = BoundData(_const_plus(d, h, 0.0), _const_plus(d, h, max(a - b * x0, 0.0)))
    lip = LipschitzData.from_callables(d, h, lam=0.0, note="f ignores y and gamma, nonincreasing in x")
    certifying = {r.check_id: r.margin for r in checks}
    certifying.update(contraction_margin=contraction_margin(lip, p.tau_mode))
    return CorpusEntry(name, p, BracketPair(alpha, beta, bounds), lip, [], UNIQUE, certifying, prm,
                       checks, h, envelope=(0.0, a - b * x0))


def random_monotone_probe(seed: int, h: float = 1e-2, mode: Optional[TauMode] = None) -> CorpusEntry:
    """A seeded Lipschitz problem satisfying the monotonicity hypotheses.

    f = a - e x - c y + d tanh(mean of gamma on I+) is nonincreasing in y and
    nondecreasing in gamma; Lambda = l tanh(mean gamma); the history is
    affine and nondecreasing; the deviation lies in [t - r_hat, t] with the
    monotonicity in gamma prescribed by ``mode`` (drawn from the seed when
    omitted).  The bracket comes from :func:`bounded_bracket` and the
    coefficients are chosen so that the field stays in [0.1, psi] on it.
    """
    rng = np.random.default_rng(seed)
    if mode is None:
        mode = list(TauMode)[int(rng.integers(3))]
    r = float(rng.choice([0.5, 1.0]))
    d = TimeDomain(0.0, 1.0, r, r)
    e, c = rng.uniform(0.0, 0.2, size=2)
    dd, lcoef, kap, theta = rng.uniform(0.0, 0.5, size=4)
    k0 = rng.uniform(-0.5, 0.5)
    big = abs(k0) + kap * r + lcoef
    a = ((e + c) * big + dd + 0.1 + rng.uniform(0.0, 1.0)) / (1.0 - 2.0 * (e + c))
    psi = 2.0 * a + (e + c) * big + dd

    def mean_plus(g):
        return float(np.mean(g.plus_values))

    def f(t, x, y, gamma):
        return a - e * x - c * y + dd * math.tanh(mean_plus(gamma))

    if mode is TauMode.NonincreasingInGamma:
        def tau(t, x, gamma):
            return t - r * theta * (1.0 + math.tanh(gamma._eval_scalar(0.0))) / 2.0 * (1 + math.sin(x)) / 2.0
    elif mode is TauMode.NondecreasingInGamma:
        def tau(t, x, gamma):
            return t - r * theta * (1.0 - math.tanh(gamma._eval_scalar(0.0))) / 2.0 * (1 + math.sin(x)) / 2.0
    else:
        def tau(t, x, gamma=None):
            return t - r * theta * (1 + math.sin(x)) / 2.0

    p = ProblemSpec(d, f, tau, lambda g: lcoef * math.tanh(mean_plus(g)), lambda t: k0 + kap * t,
                    mode, name=f"probe_{seed}")
    bracket = bounded_bracket(p, -lcoef, lcoef, psi, h=h)
    params = dict(a=a, e=e, c=c, d=dd, l=lcoef, kappa=kap, k0=k0, theta=theta, r=r)
    lip = LipschitzData.from_callables(d, h, L1=c, L2=dd, L3=0.0, L4=0.0, lam=min(lcoef, 0.99))
    return CorpusEntry(f"probe_{seed}", p, bracket, lip, [], QUASI, {}, params,
                       bracket.report, h, envelope=(0.1, psi))


_BUILDERS = {
    "ex1": _build_ex1,
    "ex1_uniqueness": _build_ex1,
    "ej1": _build_ej1,
    "ej1_cantor": _build_ej1_cantor,
    "ex2_odd": _build_ex2,
    "ex2_even": _build_ex2,
    "probe_linear": _build_probe_linear,
}
