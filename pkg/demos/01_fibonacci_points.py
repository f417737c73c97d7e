"""
From a pair of 2x2 matrices to a real number
============================================

Start with the continued-fraction matrices of the letters 2 and 1, run the
Fibonacci-type recurrence on them, and watch the symmetric points it
produces converge projectively to (1, xi, xi^2).
"""

# %%
# The seed
# --------
# ``new_seq`` computes the symmetrizing matrix N once; everything after that
# is exact integer arithmetic.
from sturmlab.exact import Mat2
from sturmlab.limits import XiHandle, quad_approximants
from sturmlab.sturm import new_seq, verify_identities
from sturmlab.words import SeqSpec, palindrome_ladder

seq = new_seq(Mat2(2, 1, 1, 0), Mat2(1, 1, 1, 0), SeqSpec.constant(1))
print("admissible:", seq.admissible)
print("N =", seq.N)

# %%
# The first points
# ----------------
# Each y_i is a symmetric matrix, stored as its three coordinates.
for i in range(-2, 9):
    print(f"y_{i:<3}", seq.y_primitive(i))

# %%
# Checking the algebra
# --------------------
# The recurrence and the wedge relations hold exactly; a single wrong digit
# anywhere would show up here.
report = verify_identities(seq, 25)
for name, tally in report.as_dict()["identities"].items():
    print(f"identity ({name}): {tally['passed']}/{tally['checked']}")

# %%
# The limit point
# ---------------
# xi is known to as many bits as we ask for, with a certified enclosure.
handle = XiHandle(seq)
print("xi =", handle.value(200))

# %%
# Quadratic approximants
# ----------------------
# The points z~_i, read as polynomials x0 + x1 X + x2 X^2, have one root that
# closes in on xi very quickly.
approx, _ = quad_approximants(seq, 10, handle)
for a in approx:
    print(f"{a.index:>3}  {str(a.poly):<40} log|xi - root| = {float(a.log_error.mid):9.3f}")

# %%
# The words behind the matrices
# -----------------------------
# The palindromic prefixes of the Fibonacci word follow a ladder that the
# matrices mirror.
for p in palindrome_ladder(SeqSpec.constant(1), 1, 2, 7):
    print("".join(map(str, p)) or "(empty)")
