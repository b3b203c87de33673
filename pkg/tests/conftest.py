import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from quasisolve import BoundData, BracketPair, GridFunction, ProblemSpec, TauMode, TimeDomain

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def logistic_problem(h=1e-2):
    """x' = 1 - x, x(0) = 0 on [0, 1]; deviation inert.  Exact x = 1 - exp(-t)."""
    d = TimeDomain(0.0, 1.0)
    p = ProblemSpec(d, lambda t, x, y, g: 1.0 - x, lambda t, x, g: t, lambda g: 0.0, 0.0,
                    TauMode.NonincreasingInGamma, closed_domain=True, name="logistic")
    alpha = GridFunction.constant(d, h, 0.0)
    beta = GridFunction.constant(d, h, 1.0)
    bounds = BoundData.from_callables(d, h, 0.0, 1.0)
    return p, BracketPair(alpha, beta, bounds)


def rk4(fun, t0, t1, x0, n):
    """Classical RK4 reference with n steps; returns node times and values."""
    t = np.linspace(t0, t1, n + 1)
    x = np.empty(n + 1)
    x[0] = x0
    h = (t1 - t0) / n
    for i in range(n):
        s, y = t[i], x[i]
        k1 = fun(s, y)
        k2 = fun(s + h / 2, y + h * k1 / 2)
        k3 = fun(s + h / 2, y + h * k2 / 2)
        k4 = fun(s + h, y + h * k3)
        x[i + 1] = y + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
    return t, x


@pytest.fixture
def logistic():
    return logistic_problem()
