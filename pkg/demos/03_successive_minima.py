"""
Successive minima and the piecewise-linear model
================================================

Compute the logarithmic successive minima L_1 <= L_2 <= L_3 of the body
attached to xi along a range of q, and lay them next to the explicit
three-system P built from the same matrices.
"""

# %%
from sturmlab.exact import Mat2
from sturmlab.geometry import (
    compare,
    cycle_ratio,
    parametric_exponents,
    three_system,
    translate_parametric,
)
from sturmlab.sturm import growth, new_seq
from sturmlab.words import SeqSpec

seq = new_seq(Mat2(2, 1, 1, 0), Mat2(1, 1, 1, 0), SeqSpec.constant(1))
system = three_system(seq, 21, growth(seq, 20))
print(f"model valid for q in [{float(system.start):.2f}, {float(system.end):.2f}]")

# %%
# One grid, two curves
# --------------------
# Each row holds the exact minima (up to a certified 2^-20 relative error)
# and the model values.  The zone column says which piece of the model is
# active.
rep = compare(seq, 20, 150, 27, system=system, breakpoints=False)
print(f"{'q':>8} {'L1':>8} {'L2':>8} {'L3':>8}   {'P1':>8} {'P2':>8} {'P3':>8}  zone")
for p in rep.profile.points:
    row = p.row()
    print(f"{row['q']:8.2f} {row['L1']:8.3f} {row['L2']:8.3f} {row['L3']:8.3f}   "
          f"{row['P1']:8.3f} {row['P2']:8.3f} {row['P3']:8.3f}  {row['zone']}")

# %%
# The gap shrinks relative to q
# -----------------------------
for q, dev in rep.deviation_trend()[::3]:
    print(f"q = {q:7.2f}   max_j |L_j - P_j| / q = {dev:.4f}")

# %%
# Reading exponents off the profile
# ---------------------------------
# Over one multiplicative cycle of q the extremes of L_j / q give the
# parametric exponents, which translate back to the classical ones.
psi = parametric_exponents(rep.profile, cycle=cycle_ratio(seq.s))
for name, value in translate_parametric(psi).items():
    print(f"{name:<12} [{float(value.lo):.3f}, {float(value.hi):.3f}]")

# %%
# To plot, save the profile and load it with any CSV reader:
#
#     open("profile.csv", "w").write(rep.profile.to_csv())
