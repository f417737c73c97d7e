"""
Measuring approximation exponents
=================================

Brackets for the seven exponents of xi, measured from the points up to a
finite depth, next to the closed-form values predicted from (sigma, delta).
"""

# %%
from sturmlab.exact import Mat2
from sturmlab.limits import empirical_exponents, predicted_for
from sturmlab.sturm import growth, new_seq
from sturmlab.words import SeqSpec, sigma

seeds = {
    "golden": new_seq(Mat2(2, 1, 1, 0), Mat2(1, 1, 1, 0), SeqSpec.constant(1)),
    "silver": new_seq(Mat2(2, 1, 1, 0), Mat2(3, 2, 1, 1), SeqSpec.constant(2)),
    "growing det": new_seq(Mat2(3, 1, 1, 1), Mat2(1, 1, 1, 2), SeqSpec.constant(1)),
}

# %%
# Growth parameters
# -----------------
# delta measures how fast |det w_k| grows against the norms.  It is 0 when
# the seed comes from continued-fraction matrices.
reports = {}
for name, seq in seeds.items():
    depth = 22 if name != "silver" else 16
    reports[name] = growth(seq, depth)
    r = reports[name]
    print(f"{name:<12} sigma {float(sigma(seq.s).mid):.4f}  beta {float(r.beta.mid):.4f}  "
          f"delta {float(r.delta.mid):+.4f}")

# %%
# Measured against predicted
# --------------------------
for name, seq in seeds.items():
    found = empirical_exponents(seq, 21)
    expected = predicted_for(seq, reports[name])
    print(f"\n{name}")
    for key in found.NAMES:
        got, want = found.get(key), expected.get(key)
        if want is None:
            want_text = "-"
        elif want.width > 1e-9:
            want_text = f"[{float(want.lo):.4f}, {float(want.hi):.4f}]"
        else:
            want_text = f"{float(want.mid):.4f}"
        print(f"  {key:<16} [{float(got.lo):.4f}, {float(got.hi):.4f}]   predicted {want_text}")
    for key, text in found.notes.items():
        print(f"  note {key}: {text}")

# %%
# With a growing determinant the points y~_i stop being best approximations
# from some index on, so their chain only bounds lambda2_hat from below.
# The value from omega2_hat through Jarnik's relation is the sharp one.
found = empirical_exponents(seeds["growing det"], 21)
print("lambda2_hat via omega2_hat:", found.lambda2_hat_jarnik)
