"""The limit point ``Xi = (1, xi, xi^2)``, quadratic approximants and exponents.

``xi`` is extracted from the ratios of consecutive coordinates of the points
``y_i`` and kept as a dyadic enclosure ``[m, m+w] / 2^b``.  Every linear or
quadratic form in ``xi`` is then evaluated on integers, so the logarithms
that feed the exponent estimators are certified intervals.

Exponent estimators work on sequences of *minimal points*: the pooled
integer points sorted by norm, keeping those that improve on every smaller
one.  Each limsup/liminf is reported as a bracket over a trailing window,
computed separately for every residue class of the index modulo the period
of ``s`` and then combined.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import gmpy2
from gmpy2 import mpz

from .certreal import CertReal, golden, log_enclosure, sqrt_enclosure
from .errors import DomainError, InsufficientDepth, PrecisionExhausted
from .exact import Point
from .sturm import GrowthReport, SturmSeq
from .words import SeqSpec

__all__ = [
    "XiHandle",
    "xi",
    "QuadApprox",
    "quad_approximants",
    "ExponentSet",
    "empirical_exponents",
    "predicted_exponents",
    "jarnik_gap",
    "predicted_for",
    "phase_period",
    "minimal_points",
    "log_norm",
    "h_sigma",
    "kappa",
    "max_bits",
]

LOG_BITS = 80          # precision of certified logarithms
DEFAULT_MAX_BITS = 1 << 22


def max_bits() -> int:
    """Refinement cap for xi, read from ``STURMLAB_MAX_BITS``."""
    raw = os.environ.get("STURMLAB_MAX_BITS")
    if raw is None:
        return DEFAULT_MAX_BITS
    try:
        value = int(raw)
    except ValueError as exc:
        raise DomainError(f"STURMLAB_MAX_BITS must be an integer, got {raw!r}") from exc
    if value < 64:
        raise DomainError("STURMLAB_MAX_BITS must be at least 64")
    return value


# xi ----------------------------------------------------------------------------

class XiHandle:
    """Certified, refinable enclosure of the limit ``xi`` of a sequence.

    ``enclosure(bits)`` returns ``(m, w, b)`` with ``m / 2^b <= xi <= (m+w) / 2^b``
    and ``w / 2^b <= 2^-bits``.  The value is the ratio ``y_{i,1} / y_{i,0}`` at the
    first index where the step to the previous ratio is below ``2^-bits``;
    the observed steps must shrink at least geometrically with ratio 1/2 over
    the last three indices, and the tail is bounded by that geometric series.
    """

    def __init__(self, seq: SturmSeq, max_index: int = 200):
        seq._require_admissible()
        self.seq = seq
        self.max_index = max_index
        self._ratios: List[Tuple[int, int]] = []
        self._best: Optional[Tuple[int, int, int]] = None

    def _ratio(self, i: int) -> Tuple[int, int]:
        """``y_{i,1} / y_{i,0}`` as an unreduced pair ``(num, den)`` with ``den > 0``."""
        while len(self._ratios) <= i:
            j = len(self._ratios)
            p = self.seq.a(j)
            if p[0] == 0:
                raise DomainError(f"y_{j} has zero first coordinate")
            num = mpz(p[1].numerator) * mpz(p[0].denominator)
            den = mpz(p[0].numerator) * mpz(p[1].denominator)
            if den < 0:
                num, den = -num, -den
            self._ratios.append((num, den))
        return self._ratios[i]

    def enclosure(self, bits: int) -> Tuple[int, int, int]:
        if bits > max_bits():
            raise PrecisionExhausted(f"{bits} bits of xi exceed the cap {max_bits()}")
        if self._best is not None and self._best[2] >= bits + 2:
            return self._best
        # steps as pairs (num, den); compare step <= 2^-(bits+2) as num << (bits+2) <= den
        steps: List[Tuple[int, int]] = []
        for i in range(1, self.max_index + 1):
            (n1, d1), (n0, d0) = self._ratio(i), self._ratio(i - 1)
            steps.append((abs(n1 * d0 - n0 * d1), d0 * d1))
            if i < 4 or (steps[-1][0] << (bits + 2)) > steps[-1][1]:
                continue
            tail = steps[-4:]
            if all(2 * tail[j + 1][0] * tail[j][1] <= tail[j][0] * tail[j + 1][1] for j in range(3)):
                # |xi - r_i| <= sum_{m > i} step_m <= step_i
                (cn, cd), (rn, rd) = self._ratio(i), steps[-1]
                b = bits + 2
                den = cd * rd
                low = ((cn * rd - rn * cd) << b) // den
                high = -((-(cn * rd + rn * cd) << b) // den)
                self._best = (int(low), int(max(1, high - low)), b)
                return self._best
        achieved = None if not steps else float(Fraction(int(steps[-1][0]), int(steps[-1][1])))
        raise InsufficientDepth(f"xi to 2^-{bits} needs more than {self.max_index} indices",
                                achieved=achieved)

    def value(self, bits: int = 128) -> CertReal:
        m, w, b = self.enclosure(bits)
        return CertReal(Fraction(m, 1 << b), Fraction(m + w, 1 << b),
                        recipe=self.value, label="xi")

    # certified forms -------------------------------------------------------
    def _quadratic_range(self, c0, c1, c2, bits: int) -> Tuple[int, int, int]:
        """Range of ``c0 + c1 xi + c2 xi^2`` as integers scaled by ``4^(b+1)``.

        Over a xi-interval of scaled length w a quadratic leaves its chord by at
        most ``|c2| w^2 / 4``, hence the widening.
        """
        m, w, b = self.enclosure(bits)
        c0, c1, c2 = mpz(c0), mpz(c1), mpz(c2)
        shift = mpz(1) << b
        ends = [4 * (c0 * shift * shift + c1 * u * shift + c2 * u * u) for u in (mpz(m), mpz(m) + w)]
        bend = abs(c2) * w * w
        return min(ends) - bend, max(ends) + bend, 2 * b + 2

    def _abs_log(self, ranges, bits) -> Optional[CertReal]:
        lows, highs = [], []
        exp2 = None
        for lo, hi, e in ranges:
            exp2 = e
            lows.append(0 if lo <= 0 <= hi else min(abs(lo), abs(hi)))
            highs.append(max(abs(lo), abs(hi)))
        low, high = max(lows), max(highs)
        if low == 0:
            return None
        return CertReal(_log_int(low).lo, _log_int(high).hi) - _LOG2 * exp2

    def _certified(self, build, scale_bits: int, tolerance: float) -> CertReal:
        bits = max(self._best[2] - 2 if self._best else 0, scale_bits + 64)
        cap = max_bits()
        while True:
            value = self._abs_log(build(bits), bits)
            if value is not None and value.width <= tolerance:
                return value
            if bits >= cap:
                raise PrecisionExhausted(
                    "cannot certify a logarithm within the refinement cap",
                    candidates=() if value is None else (value,),
                )
            bits = min(cap, 2 * bits)

    def log_dot(self, x: Point, tolerance: float = 1e-6) -> CertReal:
        """Certified ``log |x . Xi|``."""
        x = _integral(x)
        return self._certified(lambda bits: [self._quadratic_range(x[0], x[1], x[2], bits)],
                               _bits(x), tolerance)

    def log_wedge(self, x: Point, tolerance: float = 1e-6) -> CertReal:
        """Certified ``log ||x ^ Xi||`` (sup norm of the cross product)."""
        x = _integral(x)

        def build(bits):
            # x ^ (1, xi, xi^2) = (x1 xi^2 - x2 xi, x2 - x0 xi^2, x0 xi - x1)
            return [
                self._quadratic_range(0, -x[2], x[1], bits),
                self._quadratic_range(x[2], 0, -x[0], bits),
                self._quadratic_range(-x[1], x[0], 0, bits),
            ]
        return self._certified(build, 2 * _bits(x), tolerance)

    def log_distance(self, r_num: int, r_den: int, tolerance: float = 1e-6) -> CertReal:
        """Certified ``log |xi - r_num / r_den|`` for a rational r."""
        return self._certified(lambda bits: [self._quadratic_range(-r_num, r_den, 0, bits)],
                               _bits(Point(r_num, r_den, 0)), tolerance) - _log_int(abs(r_den))


_LOG2 = log_enclosure(2, LOG_BITS + 48)


def _log_int(n) -> CertReal:
    """Certified log of a positive integer of any size."""
    n = mpz(n)
    excess = max(0, int(n.bit_length()) - LOG_BITS - 8)
    if excess == 0:
        return log_enclosure(int(n), LOG_BITS)
    top = int(n >> excess)
    # n / 2^excess lies in [top, top + 1]
    return CertReal(log_enclosure(top, LOG_BITS).lo, log_enclosure(top + 1, LOG_BITS).hi) + _LOG2 * excess


def _integral(x: Point) -> Point:
    if not x.is_integral():
        x = x.primitive()
    return x


def _bits(x: Point) -> int:
    return int(max(abs(c) for c in x.coords())).bit_length() + 8


def xi(seq: SturmSeq, precision_bits: int = 128, max_index: int = 200) -> CertReal:
    """Enclosure of the limit xi of ``y_{i,1} / y_{i,0}`` of width at most ``2^-precision_bits``."""
    return XiHandle(seq, max_index).value(precision_bits)


def log_norm(x: Point) -> CertReal:
    return _log_int(abs(x.norm()))


# quadratic approximants ----------------------------------------------------------

@dataclass
class QuadApprox:
    """A primitive integer polynomial ``x0 + x1 X + x2 X^2`` and its root nearest to xi."""

    index: int
    poly: Point
    discriminant: int
    roots: Tuple[CertReal, ...]
    near: int                     # position of the nearest root in ``roots``
    height: int                   # H of the nearest root
    log_error: CertReal           # log |xi - near root|
    log_value: CertReal           # log |P(xi)|

    @property
    def near_root(self) -> CertReal:
        return self.roots[self.near]

    @property
    def far_root(self) -> Optional[CertReal]:
        return self.roots[1 - self.near] if len(self.roots) == 2 else None

    def as_dict(self):
        return {
            "index": self.index,
            "poly": [int(c) for c in self.poly.coords()],
            "discriminant": int(self.discriminant),
            "roots": [r.as_list() for r in self.roots],
            "near": self.near,
            "height": int(self.height),
            "log_error": self.log_error.as_list(),
        }


def _root_enclosures(p: Point, bits: int = 128) -> Tuple[CertReal, ...]:
    """Dyadic enclosures of the real roots, from integer square roots only."""
    x0, x1, x2 = (mpz(c) for c in p.coords())
    scale = mpz(1) << bits
    if x2 == 0:
        num, den = -x0 * scale, x1
        if den < 0:
            num, den = -num, -den
        return (CertReal(Fraction(int(num // den), int(scale)), Fraction(int(-(-num // den)), int(scale))),)
    disc = (x1 * x1 - 4 * x0 * x2) * scale * scale
    low = gmpy2.isqrt(disc)
    high = low if low * low == disc else low + 1
    den = 2 * x2
    roots = []
    for sign in (-1, 1):
        ends = sorted([-x1 * scale + sign * low, -x1 * scale + sign * high])
        if den < 0:
            ends = sorted(-e for e in ends)
        d = abs(den)
        roots.append(CertReal(Fraction(int(ends[0] // d), int(scale)),
                              Fraction(int(-(-ends[1] // d)), int(scale))))
    return tuple(sorted(roots, key=lambda r: r.lo))


def _near_root_height(p: Point, near: CertReal, disc: int) -> Tuple[int, Optional[Tuple[int, int]]]:
    """Height of the minimal polynomial of the root, plus the root itself when rational."""
    x0, x1, x2 = (int(c) for c in p.coords())
    if x2 == 0:
        r = Fraction(-x0, x1)
        return max(abs(r.numerator), r.denominator), (r.numerator, r.denominator)
    root = gmpy2.isqrt(disc) if disc >= 0 else None
    if root is not None and root * root == disc:
        candidates = [Fraction(-x1 + sign * int(root), 2 * x2) for sign in (-1, 1)]
        r = min(candidates, key=lambda c: abs(c - near.mid))
        return max(abs(r.numerator), r.denominator), (r.numerator, r.denominator)
    return int(p.norm()), None


def quad_approximants(seq: SturmSeq, i_max: int, handle: Optional[XiHandle] = None,
                      i_min: int = 0) -> Tuple[List[QuadApprox], List[int]]:
    """Approximants from the polynomials ``z~_i`` for ``i_min <= i <= i_max``.

    Returns the list of approximants and the list of indices skipped because
    the discriminant is negative.  The distance to the near root is obtained
    without cancellation from ``|P(xi)| = |x2| |xi - r| |xi - r'|`` (or
    ``|x1| |xi - r|`` for a linear P).
    """
    handle = handle or XiHandle(seq)
    centre = handle.value(96).rounded(128)
    out, skipped = [], []
    for i in range(i_min, i_max + 1):
        p = seq.z_primitive(i)
        disc = int(p.discriminant())
        if int(p[2]) != 0 and disc < 0:
            skipped.append(i)
            continue
        roots = _root_enclosures(p)
        near = min(range(len(roots)), key=lambda j: abs(roots[j].mid - centre.mid))
        height, rational = _near_root_height(p, roots[near], disc)
        log_value = handle.log_dot(p)
        if rational is not None:
            log_error = handle.log_distance(*rational)
        elif int(p[2]) == 0:
            log_error = log_value - _log_int(abs(p[1]))
        else:
            far = roots[1 - near]
            gap = abs(centre - far)
            if gap.lo <= 0:
                raise PrecisionExhausted("far root not separated from xi", candidates=(centre, far))
            log_error = log_value - _log_int(abs(p[2])) - gap.log(LOG_BITS)
        out.append(QuadApprox(i, p, disc, roots, near, height, log_error, log_value))
    return out, skipped


# exponent estimators -------------------------------------------------------------

@dataclass
class _Sample:
    index: int
    log_size: CertReal           # log of the norm or height
    log_error: CertReal          # log of the approximation quality (negative)


def phase_period(s: SeqSpec) -> int:
    """Number of indices i spanned by one period of s (1 without a period)."""
    return sum(s.period) if s.is_periodic else 1


def minimal_points(samples: Sequence[_Sample]) -> List[_Sample]:
    """Samples sorted by size keeping those whose error beats every smaller one."""
    ordered = sorted(samples, key=lambda smp: (smp.log_size.mid, smp.log_error.mid))
    out: List[_Sample] = []
    for smp in ordered:
        if out and smp.log_size.mid == out[-1].log_size.mid:
            continue
        if not out or smp.log_error.mid < out[-1].log_error.mid:
            out.append(smp)
    return out


@dataclass
class _Ratio:
    index: int
    num: CertReal                # -log error
    den: CertReal                # log size threshold


def _ordinary(chain: Sequence[_Sample]) -> List[_Ratio]:
    return [_Ratio(c.index, -c.log_error, c.log_size) for c in chain]


def _uniform(chain: Sequence[_Sample]) -> List[_Ratio]:
    # the successor's size is the threshold; the last point has no reliable successor
    return [_Ratio(chain[j].index, -chain[j].log_error, chain[j + 1].log_size)
            for j in range(len(chain) - 1)]


def _bracket(ratios: Sequence[_Ratio], period: int, i_from: int, mode: str) -> Tuple[CertReal, list]:
    """Window bracket of a limsup (``mode='sup'``) or liminf (``mode='inf'``).

    Per residue class of the index modulo ``period`` the bracket is the hull
    of the plain ratios ``num / den`` in the window and of the increment
    ratios ``(num_i - num_j) / (den_i - den_j)`` against the previous sample
    ``j = i - period`` of the same class; the increments cancel the bounded
    additive terms that bias the plain ratios.
    """
    by_index = {r.index: r for r in ratios}
    classes: Dict[int, List[CertReal]] = {}
    trace = []
    for r in ratios:
        if r.den.lo <= 0:
            continue
        plain = r.num / r.den
        trace.append((r.index, float(plain.mid)))
        if r.index < i_from:
            continue
        bucket = classes.setdefault(r.index % period, [])
        bucket.append(plain)
        prev = by_index.get(r.index - period)
        if prev is not None:
            step = r.den - prev.den
            if step.lo > 0:
                bucket.append((r.num - prev.num) / step)
    if not classes:
        raise InsufficientDepth("no samples in the trailing window")
    hulls = [CertReal.hull(values) for values in classes.values()]
    if mode == "sup":
        result = CertReal(max(h.lo for h in hulls), max(h.hi for h in hulls))
    else:
        result = CertReal(min(h.lo for h in hulls), min(h.hi for h in hulls))
    return result, trace


@dataclass
class ExponentSet:
    """Brackets for the seven exponents, each with its sample trace."""

    lambda2: Optional[CertReal]
    lambda2_hat: Optional[CertReal]
    omega2: Optional[CertReal]
    omega2_hat: Optional[CertReal]
    omega2_star: Optional[CertReal]
    omega2_star_hat: Optional[CertReal]
    lambda_check: Optional[CertReal]
    samples: Dict[str, list] = field(default_factory=dict)
    notes: Dict[str, str] = field(default_factory=dict)

    NAMES = ("lambda2", "lambda2_hat", "omega2", "omega2_hat",
             "omega2_star", "omega2_star_hat", "lambda_check")

    def get(self, name: str) -> Optional[CertReal]:
        return getattr(self, name)

    @property
    def beta0(self) -> Optional[CertReal]:
        """``1 / lambda_check`` when that bracket lies above 1/2."""
        if self.lambda_check is None or self.lambda_check.lo <= Fraction(1, 2):
            return None
        return self.lambda_check.reciprocal()

    @property
    def lambda2_hat_jarnik(self) -> Optional[CertReal]:
        """``1 - 1/omega2_hat`` from the omega2_hat bracket."""
        if self.omega2_hat is None or self.omega2_hat.lo <= 0:
            return None
        return 1 - self.omega2_hat.reciprocal()

    def as_dict(self, predicted: Optional["ExponentSet"] = None):
        out = {}
        for name in self.NAMES:
            value = self.get(name)
            entry = {"bracket": None if value is None else value.as_list()}
            if name in self.samples:
                entry["samples"] = [[i, round(v, 9)] for i, v in self.samples[name]]
            if predicted is not None:
                other = predicted.get(name)
                entry["predicted"] = None if other is None else other.as_list()
            out[name] = entry
        derived = {"lambda2_hat_jarnik": self.lambda2_hat_jarnik, "beta0": self.beta0}
        out["derived"] = {k: None if v is None else v.as_list() for k, v in derived.items()}
        if self.notes:
            out["notes"] = dict(self.notes)
        return out


def empirical_exponents(seq: SturmSeq, i_max: int, handle: Optional[XiHandle] = None,
                        i_min: int = 1, window: Optional[int] = None) -> ExponentSet:
    """Trailing-window brackets for all exponents from the points up to ``i_max``."""
    if i_max < 6:
        raise InsufficientDepth("need i_max >= 6")
    handle = handle or XiHandle(seq)
    period = phase_period(seq.s)
    window = window or -(-(i_max - i_min + 1) // 3)
    i_from = i_max - window + 1

    # one extra period of lookahead so the last reported points have their true successors
    i_pool = i_max + period
    y_samples, z_samples = [], []
    for i in range(i_min, i_pool + 1):
        y = seq.y_primitive(i)
        y_samples.append(_Sample(i, log_norm(y), handle.log_wedge(y)))
        z = seq.z_primitive(i)
        z_samples.append(_Sample(i, log_norm(z), handle.log_dot(z)))
    approx, skipped = quad_approximants(seq, i_pool, handle, i_min)
    # quality of an approximant r is |xi - r| H(r), measured against H(r)
    star_samples = []
    for a in approx:
        log_h = _log_int(a.height)
        star_samples.append(_Sample(a.index, log_h, a.log_error + log_h))

    y_chain, z_chain, star_chain = (minimal_points(x) for x in (y_samples, z_samples, star_samples))
    results, traces = {}, {}
    plan = {
        "lambda2": (_ordinary(y_chain), "sup"),
        "lambda2_hat": (_uniform(y_chain), "inf"),
        "omega2": (_ordinary(z_chain), "sup"),
        "omega2_hat": (_uniform(z_chain), "inf"),
        "omega2_star": (_ordinary(star_chain), "sup"),
        "omega2_star_hat": (_uniform(star_chain), "inf"),
        # the raw sequence y~_i, each against its successor
        "lambda_check": (_uniform(y_samples), "inf"),
    }
    for name, (ratios, mode) in plan.items():
        ratios = [r for r in ratios if r.index <= i_max]
        results[name], traces[name] = _bracket(ratios, period, i_from, mode)
    notes = {}
    if skipped:
        notes["negative_discriminant"] = f"skipped indices {skipped}"
    found = ExponentSet(samples=traces, notes=notes, **results)
    jarnik = found.lambda2_hat_jarnik
    if jarnik is not None and found.lambda2_hat is not None and not jarnik.overlaps(found.lambda2_hat):
        # when delta > 0 the points y~_i are not all best approximations
        notes["lambda2_hat"] = ("y-chain bracket is only a lower bound here; "
                                "see derived.lambda2_hat_jarnik")
    return found


# predictions -----------------------------------------------------------------------

def h_sigma(sigma, bits: int = 128) -> CertReal:
    """``h(s) = s/2 + 1 - sqrt((s/2)^2 + 1)``, increasing in s."""
    s = sigma if isinstance(sigma, CertReal) else CertReal.exact(sigma)
    if s.lo < 0:
        raise DomainError("sigma must be non-negative")
    # monotone in s: evaluate at the endpoints
    def at(v):
        inner = v * v / 4 + 1
        lo, hi = sqrt_enclosure(inner, bits)
        return CertReal(v / 2 + 1 - hi, v / 2 + 1 - lo)
    low, high = at(s.lo), at(s.hi)
    return CertReal(low.lo, high.hi)


def kappa(bits: int = 128) -> CertReal:
    """``(1 - h(1/gamma)) / gamma``."""
    g = golden(bits + 8)
    inv = g.reciprocal()
    return (1 - h_sigma(inv, bits + 8)) / g


def _as_cert(x) -> CertReal:
    return x if isinstance(x, CertReal) else CertReal.exact(x)


def predicted_exponents(sigma, delta) -> ExponentSet:
    """Closed-form exponent values for parameters ``(sigma, delta)``.

    ``lambda_check`` is given only when ``delta < h(sigma)``.  ``lambda2`` is a
    point value when ``delta <= h(sigma)`` and otherwise the bracket
    ``[1 - delta, max(1 - delta, 1 / (1 - delta + sigma))]``.  ``omega2`` is
    None when sigma can be 0.
    """
    sigma, delta = _as_cert(sigma), _as_cert(delta)
    gamma_inv = golden(96).reciprocal()
    if sigma.lo < 0 or sigma.lo > gamma_inv.hi:
        raise DomainError(f"sigma {sigma!r} outside [0, 1/gamma]")
    if delta.lo < 0:
        raise DomainError(f"delta {delta!r} is negative")
    cap = sigma / (1 + sigma)
    if delta.lo > cap.hi:
        raise DomainError(f"delta {delta!r} exceeds sigma/(1+sigma) = {cap!r}")
    one = CertReal.exact(1)
    u = (one - delta) * (one + sigma)
    omega_hat = one + u
    lambda_hat = u / omega_hat
    omega = None if sigma.lo == 0 else (2 - delta) / sigma + one - delta
    h = h_sigma(sigma)
    notes = {}
    if delta.hi <= h.lo:
        lambda2 = one - delta
        notes["lambda2"] = "exact (delta <= h(sigma))"
    else:
        other = (one - delta + sigma).reciprocal()
        lambda2 = CertReal((one - delta).lo, max((one - delta).hi, other.hi))
        notes["lambda2"] = "bounds only (delta may exceed h(sigma))"
    if delta.hi < h.lo:
        lambda_check = u / (2 + sigma)
    else:
        lambda_check = None
        notes["lambda_check"] = "no closed form unless delta < h(sigma)"
    return ExponentSet(lambda2, lambda_hat, omega, omega_hat, omega, omega_hat,
                       lambda_check, notes=notes)


def jarnik_gap(exponents: ExponentSet) -> CertReal:
    """``lambda2_hat - (1 - 1/omega2_hat)``; a point 0 for exact predicted values."""
    return exponents.lambda2_hat - (1 - exponents.omega2_hat.reciprocal())


def predicted_for(seq: SturmSeq, report: GrowthReport, depth: int = 64) -> ExponentSet:
    """Predictions using sigma(s) and the measured delta, clipped to its valid range."""
    from .words import sigma as sigma_of

    sig = sigma_of(seq.s, depth)
    delta = report.delta
    delta = CertReal(max(delta.lo, Fraction(0)), max(delta.hi, Fraction(0)))
    return predicted_exponents(sig, delta)
