"""
Where uniqueness certificates stop
==================================

For x'(t) = -f1 x(sin(1/t + f2 x(t))) with the sign-changing history
t^2 sin(1/t), the contraction margin shrinks as f1 grows.  Below the
threshold the iteration gap must close to the grid scale; above it the
certificate says nothing.
"""

import matplotlib.pyplot as plt
import numpy as np

from quasisolve import contraction_margin, iterate_coupled
from quasisolve.corpus import build_example

values = np.linspace(0.1, 0.95, 8)
margins, gaps = [], []
for f1 in values:
    entry = build_example("ex2_odd", {"f1": f1}, h=1e-3, strict=False)
    margins.append(contraction_margin(entry.lipschitz, entry.problem.tau_mode))
    gaps.append(iterate_coupled(entry.problem, entry.bracket, trace_residuals=False).gap)
    print(f"f1={f1:.2f} margin={margins[-1]:+.3f} gap={gaps[-1]:.2e}")

fig, ax = plt.subplots()
ax.plot(values, margins, "o-", label="contraction margin")
ax.plot(values, np.array(gaps) / 1e-2, "s--", label="gap / (10 h)")
ax.axhline(0, color="0.5", lw=0.5)
ax.set_xlabel("f1")
ax.legend()
plt.show()
