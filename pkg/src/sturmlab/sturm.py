"""Sturmian matrix sequences and their associated symmetric points.

A sequence ``w_{k+1} = w_k^{s_{k+1}} w_{k-1}`` of invertible 2x2 matrices is
admissible when ``w_0 w_1 - w_1 w_0`` is invertible.  In that case the matrix

    N = (Id - w_1^{-1} w_0^{-1} w_1 w_0) J

makes ``w_0 N^T``, ``w_1 N`` and ``w_1 w_0 N^T`` symmetric, and it produces the
points ``y_i``, ``z_i`` together with their alternative expressions ``a_i``,
``b_i`` through the map U.

Internally every ``y_i`` is stored multiplied by the positive integer
``den`` that clears the denominator of N, so the heavy checks run on integers.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import gmpy2

from .certreal import CertReal
from .errors import DomainError, WindowError
from .exact import IDENTITY, J, Mat2, Point, cross, det3, scalar, u_map
from .words import SeqSpec

__all__ = [
    "SturmSeq",
    "new_seq",
    "verify_identities",
    "check_recurrence",
    "reconstruct",
    "recurrence_points",
    "parity_ladder",
    "GrowthReport",
    "growth",
    "growth_laws",
    "random_seed",
    "symmetrizers",
    "degenerate_triples",
]


def log_abs(x) -> float:
    """Natural logarithm of |x| for a nonzero exact number of any size."""
    x = scalar(x)
    num, den = abs(int(x.numerator)), int(x.denominator)
    if num == 0:
        raise DomainError("log of zero")
    return math.log(num) - math.log(den)


def _canonical_symmetrizer(w0: Mat2, w1: Mat2):
    """``(den * N, den)`` with ``den = det(w0) det(w1)`` made positive."""
    den = w0.det() * w1.det()
    # w1^{-1} w0^{-1} = adj(w1) adj(w0) / (det w1 det w0)
    scaled = (IDENTITY * den - w1.adj() * w0.adj() * w1 * w0) * J
    if den < 0:
        den, scaled = -den, -scaled
    return scaled, den


class SturmSeq:
    """A Sturmian matrix sequence with lazily extended caches.

    ``symmetrizer`` overrides the canonical N; it must satisfy the three
    symmetry conditions.  For an admissible seed it is then proportional to
    the canonical matrix.
    """

    def __init__(self, w0: Mat2, w1: Mat2, s: SeqSpec, symmetrizer: Optional[Mat2] = None):
        if w0.det() == 0 or w1.det() == 0:
            raise DomainError("seed matrices must be invertible")
        self.s = s
        self._w: List[Mat2] = [w0, w1]
        self.admissible = (w0 * w1 - w1 * w0).det() != 0
        canonical = None
        if self.admissible:
            canonical = _canonical_symmetrizer(w0, w1)
        if symmetrizer is None:
            if canonical is None:
                self._nd, self._den = None, None
            else:
                self._nd, self._den = canonical
            self._ratio = scalar(1)
        else:
            for m in (w0 * symmetrizer.T, w1 * symmetrizer, w1 * w0 * symmetrizer.T):
                if not m.is_symmetric():
                    raise DomainError("symmetrizer does not make the seed products symmetric")
            if symmetrizer.is_zero():
                raise DomainError("symmetrizer must be nonzero")
            if self.admissible and symmetrizer.det() == 0:
                raise DomainError("symmetrizer must be invertible")
            den = scalar(1)
            for e in symmetrizer.entries():
                den = gmpy2.lcm(den, e.denominator)
            self._nd, self._den = symmetrizer * den, den
            self._ratio = None
            if canonical is not None:
                # canonical N = ratio * custom N
                self._ratio = self._proportionality(canonical[0], canonical[1])
        self._y: Dict[int, Point] = {}

    def _proportionality(self, scaled_canonical: Mat2, den_canonical):
        m = scaled_canonical.scale_down(den_canonical)
        n = self.N
        pivot = next(j for j, e in enumerate(n.entries()) if e != 0)
        ratio = gmpy2.mpq(m.entries()[pivot]) / n.entries()[pivot]
        if m != n * ratio:
            raise DomainError("symmetrizer is not proportional to the canonical one")
        return scalar(ratio)

    # matrices ------------------------------------------------------------
    @property
    def w0(self) -> Mat2:
        return self._w[0]

    @property
    def w1(self) -> Mat2:
        return self._w[1]

    def w(self, k: int) -> Mat2:
        if k == -1:
            # chosen so that w_1 = w_0^{s_1} w_{-1} continues the recurrence
            return self._w[0].inverse() ** self.s(1) * self._w[1]
        if k < -1:
            raise WindowError("w_k is defined for k >= -1")
        while len(self._w) <= k:
            j = len(self._w)          # w_j = w_{j-1}^{s_j} w_{j-2}
            self._w.append(self._w[j - 1] ** self.s(j) * self._w[j - 2])
        return self._w[k]

    @property
    def N(self) -> Optional[Mat2]:
        if self._nd is None:
            return None
        return self._nd.scale_down(self._den)

    def N_k(self, k: int) -> Mat2:
        """N for even k and its transpose for odd k."""
        self._require_symmetrizer()
        return self.N if k % 2 == 0 else self.N.T

    def _scaled_n(self, k: int) -> Mat2:
        return self._nd if k % 2 == 0 else self._nd.T

    def _require_symmetrizer(self):
        if self._nd is None:
            raise DomainError("non-admissible sequence has no canonical symmetrizer")

    def _require_admissible(self):
        if not self.admissible:
            raise DomainError("non-admissible sequence: y/z points are not constructed")

    # points ----------------------------------------------------------------
    def _scaled_y(self, i: int) -> Point:
        """``den * y_i`` without the admissibility check."""
        if i < -2:
            raise WindowError(f"y_i is defined for i >= -2, got {i}")
        cached = self._y.get(i)
        if cached is not None:
            return cached
        if i == -2:
            m = self.w(0) * self._scaled_n(1)
        else:
            k, ell = self.s.block(i)
            m = self.w(k) ** (ell + 1) * self.w(k - 1) * self._scaled_n(k)
        point = Point.from_matrix(m)
        self._y[i] = point
        return point

    def y(self, i: int) -> Point:
        self._require_admissible()
        return self._scaled_y(i).scale_down(self._den)

    def z(self, i: int) -> Point:
        self._require_admissible()
        if i < -1:
            raise WindowError(f"z_i is defined for i >= -1, got {i}")
        k, _ = self.s.block(i)
        partner = self.s.t(k) - 1            # psi(t_{k+1})
        wedge = cross(self._scaled_y(partner), self._scaled_y(i))
        return wedge.scale_down(self._den * self._den * self.w(k).det())

    def b(self, i: int) -> Point:
        """b_{t_k + l} = U(w_k^l w_{k-1})."""
        if i < -1:
            raise WindowError(f"b_i is defined for i >= -1, got {i}")
        k, ell = self.s.block(i)
        return u_map(self.w(k) ** ell * self.w(k - 1))

    def a(self, i: int) -> Point:
        """a_{t_k + l} = (-1)^{k+1} U(w_k) ^ U(w_k^l w_{k-1})."""
        if i < -1:
            raise WindowError(f"a_i is defined for i >= -1, got {i}")
        k, _ = self.s.block(i)
        wedge = cross(u_map(self.w(k)), self.b(i))
        return wedge if k % 2 == 1 else -wedge

    def y_primitive(self, i: int) -> Point:
        self._require_admissible()
        if i == -2:
            return self.y(i).primitive()
        return self.a(i).primitive()

    def z_primitive(self, i: int) -> Point:
        self._require_admissible()
        return self.b(i).primitive()

    # serialisation -----------------------------------------------------------
    def seed_json(self) -> dict:
        return {
            "w0": [[int(e) for e in row] for row in self.w0.rows()],
            "w1": [[int(e) for e in row] for row in self.w1.rows()],
            "s": self.s.to_json(),
        }


def new_seq(w0, w1, s: SeqSpec) -> SturmSeq:
    """Build a sequence from two seed matrices given as Mat2 or nested lists."""
    if not isinstance(w0, Mat2):
        w0 = Mat2.from_rows(w0)
    if not isinstance(w1, Mat2):
        w1 = Mat2.from_rows(w1)
    return SturmSeq(w0, w1, s)


# identity checks ---------------------------------------------------------------

@dataclass
class IdentityTally:
    checked: int = 0
    passed: int = 0
    first_failure: Optional[int] = None

    def record(self, index: int, ok: bool):
        self.checked += 1
        if ok:
            self.passed += 1
        elif self.first_failure is None:
            self.first_failure = index

    @property
    def ok(self) -> bool:
        return self.checked > 0 and self.passed == self.checked

    def as_dict(self):
        return {"checked": self.checked, "passed": self.passed, "first_failure": self.first_failure}


@dataclass
class IdentityReport:
    tallies: Dict[str, IdentityTally] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(t.ok for t in self.tallies.values())

    def first_failure(self):
        """``(identity, index)`` of the first failure in identity order, or None."""
        for name, tally in self.tallies.items():
            if tally.first_failure is not None:
                return name, tally.first_failure
        return None

    def as_dict(self):
        return {"ok": self.ok, "identities": {k: t.as_dict() for k, t in self.tallies.items()}}


def check_recurrence(y: Callable[[int], Point], s: SeqSpec, i_max: int,
                     report: Optional[IdentityReport] = None) -> IdentityReport:
    """Identities (3) and (4) for any family of points, scale-free.

    (3) ``det(y_psi(i)) y_{i+1} = y_i adj(y_psi(i)) y_i`` for ``0 <= i < i_max``;
    (4) ``det(y_{i-1}, y_i, y_{i+1})`` vanishes exactly when i is not a ``t_k``,
    for ``-1 <= i < i_max``.
    """
    report = report or IdentityReport()
    rec = report.tallies.setdefault("3", IdentityTally())
    dep = report.tallies.setdefault("4", IdentityTally())
    for i in range(0, i_max):
        yp = y(s.psi(i)).matrix()
        lhs = y(i + 1).matrix() * yp.det()
        yi = y(i).matrix()
        rec.record(i, lhs == yi * yp.adj() * yi)
    for i in range(-1, i_max):
        vanishes = det3(y(i - 1), y(i), y(i + 1)) == 0
        rec_k = s.rung(i)
        dep.record(i, vanishes == (rec_k is None))
    return report


def verify_identities(seq: SturmSeq, i_max: int) -> IdentityReport:
    """Exact check of identities (1)-(4) for indices up to ``i_max``.

    (1) ``a_i = y_i``; (2) ``b_i = det(N)^{-1} z_i``; (3) the integer form of
    ``y_{i+1} = y_i y_psi(i)^{-1} y_i``; (4) the dependence pattern of
    consecutive triples.
    """
    if i_max < 1:
        raise DomainError("i_max must be >= 1")
    seq._require_admissible()
    report = IdentityReport()
    first = report.tallies.setdefault("1", IdentityTally())
    second = report.tallies.setdefault("2", IdentityTally())
    den, ratio = seq._den, seq._ratio
    det_nd = seq._nd.det()
    s = seq.s
    for i in range(-1, i_max + 1):
        scaled = seq._scaled_y(i)
        # a_i = ratio * y_i, i.e. den * a_i = ratio * (den * y_i)
        first.record(i, seq.a(i) * den == scaled * ratio)
        k, _ = s.block(i)
        wedge = cross(seq._scaled_y(s.t(k) - 1), scaled)
        second.record(i, seq.b(i) * (det_nd * seq.w(k).det()) == wedge)
    return check_recurrence(seq._scaled_y, s, i_max, report)


# reconstruction -----------------------------------------------------------------

def recurrence_points(v_m2: Point, v_m1: Point, v_0: Point, s: SeqSpec, i_max: int) -> Dict[int, Point]:
    """Points ``v_{-2}, ..., v_{i_max}`` from ``v_{i+1} = v_i v_psi(i)^{-1} v_i``."""
    points = {-2: v_m2, -1: v_m1, 0: v_0}
    for i in (-2, -1, 0):
        if points[i].det() == 0:
            raise DomainError(f"v_{i} is singular")
    for i in range(0, i_max):
        vp = points[s.psi(i)]
        det_p = vp.det()
        m = points[i].matrix()
        nxt = Point.from_matrix(m * vp.matrix().adj() * m).scale_down(det_p)
        if nxt.det() == 0:
            raise DomainError(f"v_{i + 1} is singular")
        points[i + 1] = nxt
    return points


def reconstruct(v_m2: Point, v_m1: Point, v_0: Point, s: SeqSpec) -> SturmSeq:
    """Recover ``(w_k)`` and N from the three initial points.

    ``w_k = v_{t_k+1} v_{t_k}^{-1}`` and ``N = (v_{-1} v_0^{-1} v_{-2})^T``.
    The result is admissible exactly when the three points span Q^3.
    """
    points = recurrence_points(v_m2, v_m1, v_0, s, s.t(1) + 1)
    w0 = points[0].matrix() * points[-1].matrix().inverse()
    w1 = points[s.t(1) + 1].matrix() * points[s.t(1)].matrix().inverse()
    n = (v_m1.matrix() * v_0.matrix().inverse() * v_m2.matrix()).T
    seq = SturmSeq(w0, w1, s, symmetrizer=n)
    spans = det3(v_m2, v_m1, v_0) != 0
    if spans != seq.admissible:
        raise AssertionError("admissibility disagrees with the span of the seeds")
    return seq


def parity_ladder(seq: SturmSeq, k_max: int, points: Optional[Callable[[int], Point]] = None) -> bool:
    """Check ``N'_1 = N^T`` and ``N'_{k+2} = (N'_{k+1})^T`` with ``N'_{k+1} = w_k^{-1} v_{psi(t_{k+1})}``."""
    get = points or (lambda i: seq._scaled_y(i).scale_down(seq._den))
    ladder = [seq.w(k).inverse() * get(seq.s.t(k) - 1).matrix() for k in range(k_max + 1)]
    if ladder[0] != seq.N.T:
        return False
    return all(ladder[j + 1] == ladder[j].T for j in range(k_max))


# growth ---------------------------------------------------------------------------

@dataclass
class GrowthReport:
    """Growth exponents of ``|det w_k|``, ``||w_k||`` and ``cont(w_k)`` against ``p_k``.

    ``beta`` is the raw norm exponent; the exponent of the content-normalised
    matrices is ``beta_reduced = beta - rho`` and ``delta = (alpha - 2 rho) / beta_reduced``.
    """

    k_max: int
    alpha: CertReal
    beta: CertReal
    rho: CertReal
    beta_reduced: CertReal
    delta: CertReal
    det_samples: List[float]
    norm_samples: List[float]
    content_samples: List[float]
    delta_samples: List[float]
    growth_constant: CertReal
    bounded: bool
    laws: Dict[str, bool]

    def as_dict(self):
        return {
            "k_max": self.k_max,
            "alpha": self.alpha.as_list(),
            "beta": self.beta.as_list(),
            "rho": self.rho.as_list(),
            "beta_reduced": self.beta_reduced.as_list(),
            "delta": self.delta.as_list(),
            "growth_constant": self.growth_constant.as_list(),
            "bounded": self.bounded,
            "laws": dict(self.laws),
            "samples": {
                "log_det_over_p": [round(v, 12) for v in self.det_samples],
                "log_norm_over_p": [round(v, 12) for v in self.norm_samples],
                "log_content_over_p": [round(v, 12) for v in self.content_samples],
                "delta": [round(v, 12) for v in self.delta_samples],
            },
        }


def _window_bracket(samples: Sequence[float], size: int) -> CertReal:
    """Value at the last sample, widened by the spread of the trailing window."""
    window = samples[-size:]
    spread = max(window) - min(window)
    # a few ulps cover the floating evaluation of the logarithms
    slack = spread + 1e-12 * (1 + abs(samples[-1]))
    return CertReal.around(samples[-1], slack)


def growth_laws(seq: SturmSeq, k_max: int) -> Dict[str, bool]:
    """Exact structural checks on the matrices themselves."""
    s = seq.s
    contents = [seq.w(k).content() for k in range(k_max + 1)]
    superadditive = all(
        contents[k] >= contents[k - 1] ** s(k) * contents[k - 2] for k in range(2, k_max + 1)
    )
    transport = True
    for k in range(1, min(k_max, 10) + 1):
        wk, wn, wp = seq.w(k), seq.w(k + 1), seq.w(k - 1)
        lhs = wk * wn - wn * wk
        rhs = -(wk ** s(k + 1)) * (wp * wk - wk * wp)
        transport = transport and lhs == rhs
    u_content = all(
        u_map(seq.w(k)).is_zero() or u_map(seq.w(k)).content() >= contents[k] for k in range(k_max + 1)
    )
    return {
        "content_superadditive": bool(superadditive),
        "commutator_transport": bool(transport),
        "u_content_dominates": bool(u_content),
    }


def growth(seq: SturmSeq, k_max: int) -> GrowthReport:
    if k_max < 5:
        raise DomainError("k_max must be >= 5")
    s = seq.s
    det_s, norm_s, cont_s, delta_s = [], [], [], []
    for k in range(1, k_max + 1):
        wk, pk = seq.w(k), s.p(k)
        a = log_abs(wk.det()) / pk
        b = log_abs(wk.norm()) / pk
        r = log_abs(wk.content()) / pk
        det_s.append(a)
        norm_s.append(b)
        cont_s.append(r)
        delta_s.append((a - 2 * r) / (b - r) if b - r > 0 else float("nan"))
    size = -(-k_max // 3)
    alpha = _window_bracket(det_s, size)
    beta = _window_bracket(norm_s, size)
    rho = _window_bracket(cont_s, size)
    bounded = not beta.lo > rho.hi
    reduced = beta - rho
    if bounded:
        delta = CertReal(0, 2)
    else:
        delta = _window_bracket(delta_s, size)
    ratios = []
    for k in range(max(1, k_max - size + 1), k_max + 1):
        wk, wp = seq.w(k), seq.w(k - 1)
        log_wk = log_abs(wk.norm())
        power = wp
        for _ in range(s(k + 1) + 1):
            nxt = wk * power
            ratios.append(math.exp(log_abs(nxt.norm()) - log_wk - log_abs(power.norm())))
            power = nxt
    constant = CertReal(min(ratios), max(ratios))
    return GrowthReport(k_max, alpha, beta, rho, reduced, delta, det_s, norm_s, cont_s, delta_s,
                        constant, bounded, growth_laws(seq, k_max))


# seeds ----------------------------------------------------------------------------

def random_seed(rng: random.Random, s: SeqSpec, bound: int = 5) -> SturmSeq:
    """Random admissible seed with entries uniform in ``[-bound, bound]``."""
    while True:
        w0 = Mat2(*(rng.randint(-bound, bound) for _ in range(4)))
        w1 = Mat2(*(rng.randint(-bound, bound) for _ in range(4)))
        if w0.det() == 0 or w1.det() == 0:
            continue
        seq = SturmSeq(w0, w1, s)
        if seq.admissible:
            return seq


def symmetrizers(w0: Mat2, w1: Mat2) -> List[Mat2]:
    """Basis of the matrices N making ``w0 N^T``, ``w1 N`` and ``w1 w0 N^T`` symmetric."""
    import sympy

    # unknowns (n11, n12, n21, n22); symmetric <=> entry (0,1) == entry (1,0)
    def sym_row_transposed(m: Mat2):
        # m N^T: (0,1) = m.a n21 + m.b n22 ; (1,0) = m.c n11 + m.d n12
        return [-int(m.c), -int(m.d), int(m.a), int(m.b)]

    def sym_row(m: Mat2):
        # m N: (0,1) = m.a n12 + m.b n22 ; (1,0) = m.c n11 + m.d n21
        return [-int(m.c), int(m.a), -int(m.d), int(m.b)]

    system = sympy.Matrix([sym_row_transposed(w0), sym_row(w1), sym_row_transposed(w1 * w0)])
    basis = []
    for v in system.nullspace():
        den = sympy.ilcm(*[sympy.fraction(x)[1] for x in v])
        ints = [int(x * den) for x in v]
        basis.append(Mat2(*ints))
    return basis


def degenerate_triples(w0: Mat2, w1: Mat2, s: SeqSpec, n: Mat2, k_max: int) -> List[int]:
    """``det(y_{t_k-1}, y_{t_k}, y_{t_k+1})`` for ``k = 0..k_max`` built with the symmetrizer n.

    Works for non-admissible seeds, where the public accessors refuse.
    """
    seq = SturmSeq(w0, w1, s, symmetrizer=n)
    out = []
    for k in range(k_max + 1):
        i = s.t(k)
        out.append(det3(seq._scaled_y(i - 1), seq._scaled_y(i), seq._scaled_y(i + 1)))
    return out
