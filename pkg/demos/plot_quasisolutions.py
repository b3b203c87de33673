"""
Quasisolutions of a discontinuous problem
=========================================

The ``ex1`` corpus entry has a right-hand side that jumps across
horizontal lines and across lines of slope 3 and -3.  Without a
contraction certificate the iteration only delivers a pair of
quasisolutions v* <= w* inside the bracket.
"""

import matplotlib.pyplot as plt

from quasisolve import iterate_coupled, transversality_check, verify_lower_upper
from quasisolve.corpus import build_example

entry = build_example("ex1", h=1e-3)
print(verify_lower_upper(entry.problem, entry.bracket).to_jsonl())

# %%
# Every discontinuity line must be crossed, not followed.  The slopes are
# compared with the range of the field over the bracket.

lines = transversality_check(entry.discontinuity_lines, *entry.envelope)
print(f"{len(lines)} lines, all admissible: {lines.passed}")

# %%
# Iterate and plot the pair against the bracket.

sol = iterate_coupled(entry.problem, entry.bracket, keep_history=True)
print(f"iterations={sol.iterations} gap={sol.gap:.2e} residuals=({sol.residual_v:.1e}, {sol.residual_w:.1e})")

fig, ax = plt.subplots()
t = sol.v_star.t
for i, (v, w) in enumerate(sol.history):
    ax.plot(t, v.values, color="C0", alpha=0.2 + 0.8 * i / len(sol.history), lw=0.8)
    ax.plot(t, w.values, color="C1", alpha=0.2 + 0.8 * i / len(sol.history), lw=0.8)
ax.set_xlabel("t")
ax.set_title("v_n increasing, w_n decreasing")
plt.show()
