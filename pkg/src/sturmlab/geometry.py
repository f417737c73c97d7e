"""Parametric geometry of numbers in dimension 3.

For ``Xi = (1, xi, xi^2)`` and a parameter q the two convex bodies are

    C(e^q)  = {x : ||x|| <= 1,   |x . Xi| <= e^-q}
    C*(e^q) = {x : ||x|| <= e^q, ||x ^ Xi|| <= 1}

with sup norms.  ``L_j(q)`` and ``L*_j(q)`` are the logarithms of their
successive minima with respect to Z^3.  They are computed exactly for a
rational surrogate of each body (xi and e^q replaced by nearby rationals) and
certified through the relative distance between the two gauges.

The module also builds the explicit piecewise-linear model ``P`` attached to a
Sturmian sequence and compares it with the measured minima.
"""

from __future__ import annotations

import bisect
import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import gmpy2
from gmpy2 import mpq, mpz

from .certreal import CertReal, exp_enclosure, log_enclosure
from .errors import DomainError, WindowError
from .exact import Point, cross, det3
from .limits import XiHandle, log_norm
from .sturm import GrowthReport, SturmSeq, growth
from .words import sigma as sigma_of

__all__ = [
    "Trajectory",
    "successive_minima",
    "Minima",
    "MinimaProfile",
    "minima_profile",
    "ThreeSystem",
    "three_system",
    "compare",
    "CompareReport",
    "parametric_exponents",
    "translate_parametric",
    "growth_depth",
    "cycle_ratio",
]

Vec = Tuple[mpz, mpz, mpz]


# trajectories -----------------------------------------------------------------

class Trajectory:
    """The functions ``L_x`` and ``L*_x`` of a fixed integer point."""

    def __init__(self, x: Point, handle: XiHandle):
        self.x = x
        self.log_norm = log_norm(x)
        self.log_dot = handle.log_dot(x)
        self.log_wedge = handle.log_wedge(x)

    def L(self, q) -> CertReal:
        """``max(log ||x||, log |x . Xi| + q)``."""
        return self.log_norm.max(self.log_dot + q)

    def L_star(self, q) -> CertReal:
        """``max(log ||x ^ Xi||, log ||x|| - q)``."""
        return self.log_wedge.max(self.log_norm - q)

    @property
    def corner(self) -> CertReal:
        """Abscissa where both functions change slope, ``log ||x|| - log |x . Xi|`` for L."""
        return self.log_norm - self.log_dot


# the rational surrogate body ----------------------------------------------------

def _dyadic_below(x: Fraction, bits: int) -> mpq:
    """Largest dyadic with ``bits`` significant bits that is <= x (x > 0)."""
    e = x.numerator.bit_length() - x.denominator.bit_length()
    shift = bits - e
    if shift >= 0:
        return mpq(mpz((x.numerator << shift) // x.denominator), mpz(1) << shift)
    return mpq(mpz(x.numerator // (x.denominator << -shift)) << -shift, 1)


class _Body:
    """Gauge ``max_j |f_j . x|`` for a list of rational linear forms."""

    def __init__(self, forms: Sequence[Tuple[mpq, mpq, mpq]]):
        self.forms = [tuple(mpq(c) for c in f) for f in forms]

    def value(self, x) -> mpq:
        return max(abs(f[0] * x[0] + f[1] * x[1] + f[2] * x[2]) for f in self.forms)

    def images(self, x) -> List[mpq]:
        return [f[0] * x[0] + f[1] * x[1] + f[2] * x[2] for f in self.forms]

    def integer_rows(self, basis: Sequence[Vec]) -> List[List[int]]:
        """Rows ``(f_1(b), ..., f_k(b))`` scaled to integers by a common denominator."""
        rows = [self.images(b) for b in basis]
        den = mpz(1)
        for row in rows:
            for e in row:
                den = gmpy2.lcm(den, e.denominator)
        return [[int(e * den) for e in row] for row in rows]


def _lll(body: _Body, basis: Sequence[Vec]) -> List[Vec]:
    """LLL-reduce the given independent integer vectors for the Euclidean norm of the forms."""
    from sympy import ZZ
    from sympy.polys.matrices import DomainMatrix

    if len(basis) == 1:
        return list(basis)
    rows = body.integer_rows(basis)
    matrix = DomainMatrix([[ZZ(v) for v in row] for row in rows], (len(rows), len(rows[0])), ZZ)
    _, transform = matrix.lll_transform()
    t = transform.to_Matrix()
    out = []
    for r in range(len(basis)):
        out.append(tuple(sum(mpz(int(t[r, c])) * basis[c][j] for c in range(len(basis))) for j in range(3)))
    return out


def _gcdext(a, b):
    g, s, t = gmpy2.gcdext(mpz(a), mpz(b))
    return g, s, t


def _dual_unit(n: Vec) -> Vec:
    """An integer x with ``n . x = 1`` for a primitive n."""
    g, u, v = _gcdext(n[0], n[1])
    h, p, r = _gcdext(g, n[2])
    if h < 0:
        p, r = -p, -r
    if abs(h) != 1:
        raise DomainError("vector is not primitive")
    return (p * u, p * v, r)


def _kernel_basis(n: Vec) -> Tuple[Vec, Vec]:
    """Basis ``(k1, k2)`` of ``{x in Z^3 : n . x = 0}`` with ``k1 x k2 = n``."""
    n0, n1, n2 = n
    g, u, v = _gcdext(n0, n1)
    if g == 0:
        # n = (0, 0, +-1)
        sign = 1 if n2 > 0 else -1
        return (mpz(1), mpz(0), mpz(0)), (mpz(0), mpz(sign), mpz(0))
    k1 = (n1 // g, -n0 // g, mpz(0))
    k2 = (n2 * u, n2 * v, -g)
    return k1, k2


def _primitive_vec(x) -> Vec:
    g = mpz(0)
    for c in x:
        g = gmpy2.gcd(g, mpz(c))
    if g == 0:
        raise DomainError("zero vector")
    return tuple(mpz(c) // g for c in x)


def _cross_vec(a, b) -> Vec:
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _combine(coeffs, basis) -> Vec:
    return tuple(sum(c * b[j] for c, b in zip(coeffs, basis)) for j in range(3))


# exact convex minimisation on lines and planes ------------------------------------

def _line_min(body: _Body, direction: Vec, offset) -> Tuple[mpq, mpq]:
    """Real minimiser and minimum of ``t -> G(t direction + offset)``."""
    a = body.images(direction)
    b = body.images(offset)
    candidates = set()
    for j in range(len(a)):
        if a[j] != 0:
            candidates.add(-b[j] / a[j])
        for k in range(j + 1, len(a)):
            for sign in (1, -1):
                slope = a[j] - sign * a[k]
                if slope != 0:
                    candidates.add((sign * b[k] - b[j]) / slope)
    if not candidates:
        candidates.add(mpq(0))
    best_t, best_v = None, None
    for t in candidates:
        v = max(abs(a[j] * t + b[j]) for j in range(len(a)))
        if best_v is None or v < best_v or (v == best_v and t < best_t):
            best_t, best_v = t, v
    return best_t, best_v


def _plane_min(body: _Body, e1: Vec, e2: Vec, offset: Vec) -> Tuple[mpq, mpq, mpq]:
    """Real minimiser ``(c1, c2)`` and minimum of ``G(c1 e1 + c2 e2 + offset)``.

    The minimum of a max of absolute values of affine functions is attained
    at a vertex of the epigraph, where three of the signed constraints are tight.
    """
    a, b, d = body.images(e1), body.images(e2), body.images(offset)
    rows = []
    for j in range(len(a)):
        for sign in (1, -1):
            # sign * (a c1 + b c2 + d) = t
            rows.append((sign * a[j], sign * b[j], sign * d[j]))
    best = None
    for r1, r2, r3 in itertools.combinations(rows, 3):
        # unknowns (c1, c2, t): r[0] c1 + r[1] c2 - t = -r[2]
        m = [(r1[0], r1[1]), (r2[0], r2[1]), (r3[0], r3[1])]
        det = (m[0][0] * (m[1][1] - m[2][1]) - m[0][1] * (m[1][0] - m[2][0])
               + (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
        if det == 0:
            continue
        rhs = (-r1[2], -r2[2], -r3[2])
        # Cramer's rule on [[m00, m01, -1], [m10, m11, -1], [m20, m21, -1]]
        c1 = (rhs[0] * (m[1][1] - m[2][1]) - m[0][1] * (rhs[1] - rhs[2])
              + (rhs[1] * m[2][1] - m[1][1] * rhs[2])) / det
        c2 = (m[0][0] * (rhs[1] - rhs[2]) - rhs[0] * (m[1][0] - m[2][0])
              + (m[1][0] * rhs[2] - rhs[1] * m[2][0])) / det
        v = max(abs(a[j] * c1 + b[j] * c2 + d[j]) for j in range(len(a)))
        if best is None or v < best[2]:
            best = (c1, c2, v)
    if best is None:
        raise DomainError("degenerate gauge on a plane")
    return best


def _floor(x: mpq) -> mpz:
    return mpz(gmpy2.floor(x)) if not isinstance(x, type(mpz(0))) else x


def _integer_line_min(body: _Body, direction: Vec, offset: Vec, t_real: mpq):
    """Integer t minimising ``G(t direction + offset)`` given a real minimiser."""
    lo = gmpy2.f_div(t_real.numerator, t_real.denominator)
    best = None
    for t in (lo, lo + 1):
        x = tuple(t * direction[j] + offset[j] for j in range(3))
        v = body.value(x)
        if best is None or v < best[0]:
            best = (v, x)
    return best


def _slice_polygon(a, b, d, bound) -> List[Tuple[mpq, mpq]]:
    """Vertices of ``{c : |a_j c1 + b_j c2 + d_j| <= bound for all j}``."""
    lines = []
    for j in range(len(a)):
        for sign in (1, -1):
            lines.append((sign * a[j], sign * b[j], bound - sign * d[j]))   # u c1 + v c2 <= w
    verts = set()
    for (u1, v1, w1), (u2, v2, w2) in itertools.combinations(lines, 2):
        det = u1 * v2 - u2 * v1
        if det == 0:
            continue
        c1 = (w1 * v2 - w2 * v1) / det
        c2 = (u1 * w2 - u2 * w1) / det
        if all(u * c1 + v * c2 <= w for u, v, w in lines):
            verts.add((c1, c2))
    return list(verts)


def _width(verts, u) -> mpq:
    values = [u[0] * c1 + u[1] * c2 for c1, c2 in verts]
    return max(values) - min(values)


def _flat_direction(verts):
    """Unimodular ``(u1, u2)`` with ``u1`` a direction of small lattice width.

    Gauss reduction of Z^2 for the norm ``u -> width_u(polygon)``.
    """
    b1, b2 = (mpz(1), mpz(0)), (mpz(0), mpz(1))
    n1, n2 = _width(verts, b1), _width(verts, b2)
    while True:
        if n2 < n1:
            b1, b2, n1, n2 = b2, b1, n2, n1

        def f(m):
            return _width(verts, (b2[0] - m * b1[0], b2[1] - m * b1[1]))

        m, fm = mpz(0), n2
        for step in (1, -1):
            if f(m + step) < fm:
                stride = mpz(1)
                while f(m + step * 2 * stride) < f(m + step * stride):
                    stride *= 2
                lo, hi = m + step * stride, m + step * 2 * stride
                if lo > hi:
                    lo, hi = hi, lo
                # convex on [lo, hi]: find the integer minimiser by bisection on the slope
                while hi - lo > 1:
                    mid = (lo + hi) // 2
                    if f(mid + 1) < f(mid):
                        lo = mid + 1
                    else:
                        hi = mid
                m = lo if f(lo) <= f(hi) else hi
                fm = f(m)
                break
        b2 = (b2[0] - m * b1[0], b2[1] - m * b1[1])
        n2 = fm
        if n2 >= n1:
            return b1, b2


# a convex body in the plane whose lattice width exceeds 1 + 2/sqrt(3) contains a lattice point
_FLAT = mpq(11, 5)
_THIN = mpq(4)


def _slice_shape(a, b, d, level):
    verts = _slice_polygon(a, b, d, level)
    if not verts:
        return verts, None, mpq(0)
    u1, u2 = _flat_direction(verts)
    return verts, (u1, u2), _width(verts, u1)


def _slice_min(body: _Body, e1: Vec, e2: Vec, offset: Vec, bound, floor_value=mpq(0)):
    """Minimum of ``G(c1 e1 + c2 e2 + offset)`` over integer ``(c1, c2)`` if below ``bound``.

    The level is bisected until the sublevel polygon is thin: a polygon of
    lattice width above ``_FLAT`` must contain a lattice point, so the true
    minimum lies below that level.  A thin polygon is cut into a few lattice
    lines along its flat direction, and each line is minimised exactly.
    ``floor_value`` is any lower bound for the real minimum.
    """
    a, b, d = body.images(e1), body.images(e2), body.images(offset)
    lo, hi = mpq(floor_value), mpq(bound)
    verts, basis, width = _slice_shape(a, b, d, hi)
    while width > _THIN:
        mid = (lo + hi) / 2
        m_verts, m_basis, m_width = _slice_shape(a, b, d, mid)
        if m_width > _FLAT:
            hi, verts, basis, width = mid, m_verts, m_basis, m_width
        else:
            lo = mid
    if not verts:
        return None
    u1, u2 = basis
    det = u1[0] * u2[1] - u1[1] * u2[0]
    # columns of the inverse of [[u1], [u2]]: c = h g1 + t g2
    g1 = (u2[1] * det, -u2[0] * det)
    g2 = (-u1[1] * det, u1[0] * det)
    values = [u1[0] * c1 + u1[1] * c2 for c1, c2 in verts]
    first = gmpy2.c_div(min(values).numerator, min(values).denominator)
    last = gmpy2.f_div(max(values).numerator, max(values).denominator)
    direction = tuple(g2[0] * e1[j] + g2[1] * e2[j] for j in range(3))
    best = None
    for h in range(int(first), int(last) + 1):
        base = tuple(h * (g1[0] * e1[j] + g1[1] * e2[j]) + offset[j] for j in range(3))
        t_real, phi = _line_min(body, direction, base)
        if phi > hi or (best is not None and phi >= best[0]):
            continue
        cand = _integer_line_min(body, direction, base, t_real)
        if best is None or cand[0] < best[0]:
            best = cand
    if best is None or best[0] >= bound:
        return None
    return best


def _search(body: _Body, basis: Sequence[Vec], levels: Sequence[int], best):
    """Minimum of the gauge over points whose top nonzero coordinate lies in ``levels``.

    ``basis = (e1, e2, e3)``.  Level 3 means ``c3 >= 1``, level 2 means
    ``c3 = 0, c2 >= 1`` and level 1 means ``x = c1 e1, c1 >= 1``.  ``best`` is
    an initial ``(value, point)`` upper bound attained by an admissible point.
    """
    e1, e2, e3 = basis
    if 1 in levels:
        v = body.value(e1)
        if best is None or v < best[0]:
            best = (v, e1)
    if 2 in levels:
        t_star, mu2 = _line_min(body, e1, e2)
        c2 = 1
        while best is None or c2 * mu2 < best[0]:
            offset = tuple(c2 * e2[j] for j in range(3))
            cand = _integer_line_min(body, e1, offset, t_star * c2)
            if best is None or cand[0] < best[0]:
                best = cand
            c2 += 1
    if 3 in levels:
        s1, s2, mu3 = _plane_min(body, e1, e2, e3)
        if mu3 <= 0:
            raise DomainError("gauge vanishes off the plane")
        c3 = 1
        while c3 * mu3 < best[0]:
            offset = tuple(c3 * e3[j] for j in range(3))
            cand = _slice_min(body, e1, e2, offset, best[0], c3 * mu3)
            if cand is not None and cand[0] < best[0]:
                best = cand
            c3 += 1
    return best


def _exact_minima(body: _Body) -> List[Tuple[mpq, Vec]]:
    """The three successive minima of the gauge with their minimising points."""
    std = [(mpz(1), mpz(0), mpz(0)), (mpz(0), mpz(1), mpz(0)), (mpz(0), mpz(0), mpz(1))]
    reduced = _lll(body, std)
    # stage 1: all nonzero points
    first = _search(body, reduced, (1, 2, 3), None)
    x1 = _primitive_vec(first[1])
    # stage 2: points outside the line of x1
    m = _dual_unit(x1)
    k1, k2 = _kernel_basis(m)
    k1, k2 = _reduce_against(body, x1, [k1, k2])
    init = min(((body.value(k), k) for k in (k1, k2)), key=lambda p: p[0])
    second = _search(body, (x1, k1, k2), (2, 3), init)
    x2 = second[1]
    # stage 3: points outside the plane of x1, x2
    n = _primitive_vec(_cross_vec(x1, x2))
    p1, p2 = _lll(body, list(_kernel_basis(n)))
    e3 = _dual_unit(n)
    e3 = _size_reduce(body, e3, p1, p2)
    third = _search(body, (p1, p2, e3), (3,), (body.value(e3), e3))
    return [(first[0], x1), (second[0], x2), (third[0], third[1])]


def _reduce_against(body: _Body, fixed: Vec, vectors: List[Vec]) -> List[Vec]:
    """LLL-reduce the projections of ``vectors`` orthogonally to ``fixed`` and size-reduce."""
    fixed_img = body.images(fixed)
    ff = sum(v * v for v in fixed_img)

    class _Projected(_Body):
        def images(self, x):
            img = body.images(x)
            coef = sum(a * b for a, b in zip(img, fixed_img)) / ff
            return [a - coef * b for a, b in zip(img, fixed_img)]

    proj = _Projected(body.forms)
    reduced = _lll(proj, vectors)
    out = []
    for v in reduced:
        img = body.images(v)
        coef = sum(a * b for a, b in zip(img, fixed_img)) / ff
        r = mpz(gmpy2.f_div(coef.numerator * 2 + coef.denominator, 2 * coef.denominator))
        out.append(tuple(v[j] - r * fixed[j] for j in range(3)))
    return out


def _size_reduce(body: _Body, v: Vec, p1: Vec, p2: Vec) -> Vec:
    """Subtract the nearest plane point for the Euclidean form norm (approximately)."""
    s1, s2, _ = _plane_min(body, p1, p2, v)
    r1 = mpz(gmpy2.f_div(s1.numerator * 2 + s1.denominator, 2 * s1.denominator))
    r2 = mpz(gmpy2.f_div(s2.numerator * 2 + s2.denominator, 2 * s2.denominator))
    return tuple(v[j] + r1 * p1[j] + r2 * p2[j] for j in range(3))


# public minima ----------------------------------------------------------------------

@dataclass
class Minima:
    """Successive minima at one q for one body."""

    q: Fraction
    dual: bool
    values: Tuple[CertReal, CertReal, CertReal]      # L_j(q) (or L*_j(q))
    points: Tuple[Point, Point, Point]
    eta: Fraction                                     # certified relative gauge distance

    def as_dict(self):
        return {
            "q": float(self.q),
            "dual": self.dual,
            "L": [v.as_list() for v in self.values],
            "points": [[int(c) for c in p.coords()] for p in self.points],
        }


def _surrogate(handle: XiHandle, q: Fraction, dual: bool) -> Tuple[_Body, Fraction]:
    """Rational body and the bound eta with ``|G - G~| <= eta G``."""
    q = Fraction(q)
    if q < 0:
        raise DomainError("q must be >= 0")
    bits = int(q / Fraction(math.log(2)) * Fraction(1)) + 1 + 56
    m, w, b = handle.enclosure(bits)
    xt = mpq(m, mpz(1) << b)
    eps = Fraction(w, 1 << b)
    axi = abs(Fraction(int(m), 1 << b)) + eps
    spread = eps * (1 + 2 * axi + eps)
    if not dual:
        e = exp_enclosure(q, 64)
        et = _dyadic_below(e.lo, 72)
        rel = (e.hi - Fraction(int(et.numerator), int(et.denominator))) / e.lo
        eta = rel + e.hi * spread
        forms = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (et, et * xt, et * xt * xt)]
    else:
        e = exp_enclosure(-q, 64)
        et = _dyadic_below(e.lo, 72)
        rel = (e.hi - Fraction(int(et.numerator), int(et.denominator))) / e.lo
        eta = rel + exp_enclosure(q, 64).hi * spread
        x2 = xt * xt
        forms = [(0, x2, -xt), (-x2, 0, 1), (xt, -1, 0), (et, 0, 0), (0, et, 0), (0, 0, et)]
    if eta >= Fraction(1, 1 << 20):
        raise DomainError("surrogate body is not close enough")
    return _Body(forms), eta


def successive_minima(xi, q, dual: bool = False) -> Minima:
    """Exact successive minima of the primal (``dual=False``) or dual body at q.

    ``xi`` is an :class:`XiHandle` (refined on demand).  The values are
    certified logarithms; the points attain the minima of the rational
    surrogate body, whose gauge is within a relative ``eta`` of the true one.
    """
    if not isinstance(xi, XiHandle):
        raise DomainError("successive_minima needs an XiHandle to refine xi on demand")
    q = Fraction(q)
    body, eta = _surrogate(xi, q, dual)
    minima = _exact_minima(body)
    values = []
    for v, _ in minima:
        log_v = log_enclosure(Fraction(int(v.numerator), int(v.denominator)), 80)
        values.append(CertReal(log_v.lo - eta, log_v.hi + 2 * eta))
    points = tuple(Point(*x) for _, x in minima)
    if det3(*points) == 0:
        raise DomainError("minimising points are dependent")
    return Minima(q, dual, tuple(values), points, eta)


# the three-system ----------------------------------------------------------------------

@dataclass
class _Rung:
    index: int
    k: int
    ell: int
    log_y: Fraction
    log_z: Fraction
    log_w: Fraction
    delta: Fraction
    q: Fraction
    c: Fraction
    log_d_star: Fraction
    log_d: Fraction

    def hat_l(self, q) -> Fraction:
        return max(self.log_z, self.log_d + q)

    def hat_l_star(self, q) -> Fraction:
        return max(self.log_d_star, self.log_y - q)


@dataclass
class ThreeSystem:
    """The explicit piecewise-linear model P attached to a Sturmian sequence."""

    s: object
    beta: Fraction
    delta: Fraction
    i0: int
    i_max: int
    rungs: Dict[int, _Rung]
    intervals: Dict[int, Tuple[Fraction, Fraction]]          # I_i = [a_i, b_i]
    checks: Dict[str, bool]
    failures: List[str] = field(default_factory=list)

    @property
    def start(self) -> Fraction:
        return self.rungs[self.i0 - 1].c

    @property
    def end(self) -> Fraction:
        return self.rungs[self.i_max].c

    def _segment(self, q) -> int:
        q = Fraction(q)
        cs = [self.rungs[i].c for i in range(self.i0 - 1, self.i_max + 1)]
        pos = bisect.bisect_left(cs, q)
        if pos == 0 or pos == len(cs):
            raise WindowError(f"q = {float(q)} outside the model range [{float(self.start)}, {float(self.end)}]")
        return self.i0 - 1 + pos

    def triple(self, i: int, q) -> Tuple[Fraction, Fraction, Fraction]:
        """``(hat L_{t_{k+1}}(q), -hat L*_i(q), hat L_i(q))`` for the segment of i."""
        r = self.rungs[i]
        top = self.rungs[self.s.t(r.k + 1)]
        return top.hat_l(q), -r.hat_l_star(q), r.hat_l(q)

    def P(self, q) -> Tuple[Fraction, Fraction, Fraction]:
        q = Fraction(q)
        i = self._segment(q)
        return tuple(sorted(self.triple(i, q)))

    def zone(self, q) -> str:
        """``I`` inside some ``I_i``, ``I'`` inside some ``[b_i, a_{i+1}]``, else ``pre-window``."""
        q = Fraction(q)
        if q <= self.start or q > self.end:
            return "pre-window"
        for i, (a, b) in self.intervals.items():
            if a <= q <= b:
                return "I"
        return "I'"

    def breakpoints(self) -> List[Fraction]:
        """The q_i, c_i and the midpoints of every I_i and I'_i."""
        pts = set()
        for i in range(self.i0, self.i_max + 1):
            r = self.rungs[i]
            a, b = self.intervals[i]
            pts.update([r.q, r.c, (a + b) / 2])
            nxt = self.intervals.get(i + 1)
            if nxt is not None:
                pts.add((b + nxt[0]) / 2)
        return sorted(pts)

    def records(self):
        out = []
        for i in range(self.i0, self.i_max + 1):
            r = self.rungs[i]
            a, b = self.intervals[i]
            nxt = self.intervals.get(i + 1)
            out.append({
                "i": i, "k": r.k, "l": r.ell,
                "delta_i": float(r.delta), "q_i": float(r.q), "c_i": float(r.c),
                "log_Y": float(r.log_y), "log_Z": float(r.log_z),
                "log_D": float(r.log_d), "log_D_star": float(r.log_d_star),
                "I": [float(a), float(b)],
                "I_prime": None if nxt is None else [float(b), float(nxt[0])],
            })
        return out

    def as_dict(self):
        return {
            "beta": float(self.beta), "delta": float(self.delta),
            "i0": self.i0, "i_max": self.i_max,
            "range": [float(self.start), float(self.end)],
            "checks": dict(self.checks), "failures": list(self.failures),
            "records": self.records(),
        }


def _rational(x: CertReal, bits: int = 40) -> Fraction:
    """A short rational inside the interval near its midpoint."""
    mid = x.mid
    return Fraction(round(mid * (1 << bits)), 1 << bits)


def _make_rung(s, i: int, beta: Fraction, delta: Fraction) -> _Rung:
    k, ell = s.block(i)
    if k < 1:
        raise WindowError("the model starts at i = t_1")
    log_w = beta * s.p(k)
    log_wp = beta * s.p(k - 1)
    log_y = (ell + 1) * log_w + log_wp
    log_z = ell * log_w + log_wp
    # Z_{t_{k+1}} = W_k
    bound = max(log_w, log_z)
    delta_i = min(delta, 1 - bound / log_y)
    q = (2 - delta_i) * log_y
    log_d_star = -(1 - delta_i) * log_y
    return _Rung(i, k, ell, log_y, log_z, log_w, delta_i, q, q + log_w, log_d_star, log_d_star - log_w)


def _positive_region(funcs, lo: Fraction, hi: Fraction, kinks) -> Optional[Tuple[Fraction, Fraction]]:
    """Hull of ``{q in [lo, hi] : funcs(q) >= 0}`` for a continuous piecewise-linear function."""
    pts = sorted({lo, hi, *[k for k in kinks if lo < k < hi]})
    inside = []
    for u, v in zip(pts, pts[1:]):
        fu, fv = funcs(u), funcs(v)
        if fu >= 0:
            inside.append(u)
        if fv >= 0:
            inside.append(v)
        if (fu < 0 <= fv) or (fv < 0 <= fu):
            inside.append(u + (v - u) * (0 - fu) / (fv - fu))
    if not inside:
        return None
    return min(inside), max(inside)


def three_system(seq: SturmSeq, i_max: int, report: Optional[GrowthReport] = None,
                 beta=None, delta=None, k_growth: Optional[int] = None) -> ThreeSystem:
    """Build the model P from the growth parameters of ``seq``.

    ``beta`` defaults to a short rational near the midpoint of the reduced
    norm exponent and ``delta`` to the measured delta clipped to
    ``[0, sigma/(1+sigma)]``.  The first model index ``i0`` is the smallest
    index from which every structural condition holds up to ``i_max``.
    """
    s = seq.s
    if report is None and (beta is None or delta is None):
        report = growth(seq, k_growth or growth_depth(s))
    if beta is None:
        beta = _rational(report.beta_reduced)
    if delta is None:
        sig = sigma_of(s, 64) if s.is_periodic else sigma_of(s)
        cap = sig / (1 + sig)
        delta = min(max(_rational(report.delta), Fraction(0)), cap.lo)
    beta, delta = Fraction(beta), Fraction(delta)
    if beta <= 0:
        raise DomainError("beta must be positive")
    first = s.t(1)
    if i_max < first + 3:
        raise WindowError(f"i_max must be at least t_1 + 3 = {first + 3}")
    rungs: Dict[int, _Rung] = {}

    def rung(i):
        if i not in rungs:
            rungs[i] = _make_rung(s, i, beta, delta)
        return rungs[i]

    def top(i):
        return rung(s.t(rung(i).k + 1))

    def conditions(i) -> List[str]:
        r, prev = rung(i), rung(i - 1)
        t = top(i)
        bad = []
        if not prev.c < r.q < r.c:
            bad.append(f"ordering c_(i-1) < q_i < c_i fails at i={i}")
        if -r.hat_l_star(r.q) < max(r.hat_l(r.q), t.hat_l(r.q)):
            bad.append(f"peak condition fails at i={i}")
        cq = prev.c
        if r.ell > 0:
            ok = r.hat_l(cq) >= -r.hat_l_star(cq) >= t.hat_l(cq)
        else:
            ok = t.hat_l(cq) >= -r.hat_l_star(cq) >= r.hat_l(cq)
        if not ok:
            bad.append(f"left-end ordering fails at i={i}")
        # matching identities at c_i
        nxt = rung(i + 1)
        if r.hat_l_star(r.c) != nxt.hat_l_star(r.c):
            bad.append(f"dual matching fails at c_{i}")
        follow = nxt if r.ell < s(r.k + 1) - 1 else rung(s.t(r.k + 2))
        if r.hat_l(r.c) != follow.hat_l(r.c):
            bad.append(f"primal matching fails at c_{i}")
        return bad

    problems = {i: conditions(i) for i in range(first + 1, i_max + 1)}
    i0 = None
    for i in range(i_max, first, -1):
        if problems[i]:
            break
        i0 = i
    if i0 is None or i0 > i_max - 2:
        raise WindowError("the structural conditions do not stabilise below i_max")

    system = ThreeSystem(s, beta, delta, i0, i_max, rungs, {}, {})
    intervals = {}
    for i in range(i0, i_max + 1):
        r = rung(i)
        t = top(i)
        lo, hi = rung(i - 1).c, r.c
        kinks = [r.q, t.q]

        def gap(q, r=r, t=t):
            return -r.hat_l_star(q) - max(t.hat_l(q), r.hat_l(q))

        region = _positive_region(gap, lo, hi, kinks)
        if region is None:
            raise DomainError(f"-hat L*_{i} never dominates on its segment")
        intervals[i] = region
    system.intervals = intervals

    continuity, minkowski = True, True
    for i in range(i0, i_max):
        c = rung(i).c
        left = tuple(sorted(system.triple(i, c)))
        right = tuple(sorted(system.triple(i + 1, c)))
        continuity = continuity and left == right
        minkowski = minkowski and sum(left) == c
    zero_delta = all(rung(i).delta != 0 or intervals[i][1] == rung(i).c for i in range(i0, i_max + 1))
    system.checks = {
        "continuity": continuity,
        "matching_identities": True,
        "minkowski_at_breakpoints": minkowski,
        "degenerate_I_prime_when_delta_zero": zero_delta,
    }
    return system


# comparison -----------------------------------------------------------------------------

@dataclass
class GridPoint:
    q: Fraction
    zone: str
    L: Tuple[CertReal, ...]
    L_star: Tuple[CertReal, ...]
    P: Optional[Tuple[Fraction, ...]]
    primal_points: Tuple[Point, ...]
    dual_points: Tuple[Point, ...]

    def minkowski_gap(self) -> float:
        return float(sum(v.mid for v in self.L) - self.q)

    def mahler_gap(self) -> float:
        return max(abs(float(self.L[j].mid + self.L_star[2 - j].mid)) for j in range(3))

    def deviations(self) -> Optional[List[float]]:
        if self.P is None:
            return None
        return [abs(float(self.L[j].mid - self.P[j])) / float(self.q) for j in range(3)]

    def sandwich(self, slack: float) -> Optional[bool]:
        """``P2 <= L2 + e <= (P2+P3)/2 <= L3 + e <= P3 + 2e`` with ``e = slack * q``."""
        if self.P is None:
            return None
        e = slack * float(self.q)
        p2, p3 = float(self.P[1]), float(self.P[2])
        l2, l3 = float(self.L[1].mid), float(self.L[2].mid)
        mid = (p2 + p3) / 2
        return p2 <= l2 + e and l2 <= mid + e and mid <= l3 + e and l3 <= p3 + e

    def row(self):
        out = {"q": float(self.q)}
        for j in range(3):
            out[f"L{j + 1}"] = float(self.L[j].mid)
        for j in range(3):
            out[f"L{j + 1}s"] = float(self.L_star[j].mid)
        for j in range(3):
            out[f"P{j + 1}"] = None if self.P is None else float(self.P[j])
        out["zone"] = self.zone
        return out


@dataclass
class MinimaProfile:
    """Successive minima over a grid of q, with the model values when available."""

    points: List[GridPoint]

    @property
    def qs(self) -> List[Fraction]:
        return [p.q for p in self.points]

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = ["q", "L1", "L2", "L3", "L1s", "L2s", "L3s", "P1", "P2", "P3", "zone"]
        writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        writer.writeheader()
        for p in self.points:
            row = p.row()
            writer.writerow({k: ("" if row[k] is None else (f"{row[k]:.12f}" if isinstance(row[k], float) else row[k]))
                             for k in cols})
        return buf.getvalue()

    def minkowski_constant(self) -> float:
        return max(abs(p.minkowski_gap()) for p in self.points)

    def mahler_constant(self) -> float:
        return max(p.mahler_gap() for p in self.points)


def _grid(q_lo, q_hi, n_grid: int, extra: Sequence[Fraction] = ()) -> List[Fraction]:
    q_lo, q_hi = Fraction(q_lo), Fraction(q_hi)
    if n_grid < 2 or q_hi <= q_lo:
        raise DomainError("need n_grid >= 2 and q_lo < q_hi")
    pts = {q_lo + (q_hi - q_lo) * j / (n_grid - 1) for j in range(n_grid)}
    pts.update(Fraction(x) for x in extra if q_lo <= x <= q_hi)
    return sorted(pts)


def minima_profile(handle: XiHandle, qs: Sequence, system: Optional[ThreeSystem] = None) -> MinimaProfile:
    out = []
    for q in qs:
        q = Fraction(q)
        primal = successive_minima(handle, q)
        dual = successive_minima(handle, q, dual=True)
        model, zone = None, "pre-window"
        if system is not None:
            zone = system.zone(q)
            if zone != "pre-window":
                model = system.P(q)
        out.append(GridPoint(q, zone, primal.values, dual.values, model, primal.points, dual.points))
    return MinimaProfile(out)


@dataclass
class CompareReport:
    profile: MinimaProfile
    system: ThreeSystem
    q_lo: Fraction
    q_hi: Fraction
    slack: float

    def _top(self):
        half = (self.q_lo + self.q_hi) / 2
        return [p for p in self.profile.points if p.q >= half]

    def max_deviation_I(self, top_half: bool = True) -> Optional[float]:
        pts = self._top() if top_half else self.profile.points
        devs = [max(p.deviations()) for p in pts if p.zone == "I"]
        return max(devs) if devs else None

    def deviation_trend(self) -> List[Tuple[float, float]]:
        return [(float(p.q), max(p.deviations())) for p in self.profile.points if p.zone == "I"]

    def sandwich_failures(self) -> List[float]:
        return [float(p.q) for p in self.profile.points if p.zone == "I'" and not p.sandwich(self.slack)]

    def minkowski_ratio(self) -> float:
        return max(abs(p.minkowski_gap()) / float(p.q) for p in self._top())

    def mahler_ratio(self) -> float:
        return max(p.mahler_gap() / float(p.q) for p in self._top())

    def summary(self):
        counts = {}
        for p in self.profile.points:
            counts[p.zone] = counts.get(p.zone, 0) + 1
        return {
            "q_range": [float(self.q_lo), float(self.q_hi)],
            "grid_points": len(self.profile.points),
            "zones": counts,
            "max_deviation_I_top_half": self.max_deviation_I(),
            "sandwich_slack": self.slack,
            "sandwich_failures": self.sandwich_failures(),
            "minkowski_constant": self.profile.minkowski_constant(),
            "minkowski_ratio_top_half": self.minkowski_ratio(),
            "mahler_constant": self.profile.mahler_constant(),
            "mahler_ratio_top_half": self.mahler_ratio(),
        }


def compare(seq: SturmSeq, q_lo, q_hi, n_grid: int, system: Optional[ThreeSystem] = None,
            handle: Optional[XiHandle] = None, breakpoints: bool = True,
            slack: float = 0.05, i_max: Optional[int] = None,
            report: Optional[GrowthReport] = None) -> CompareReport:
    """Measured minima against the model P over a grid of q.

    Points of ``I``-zones are compared through ``|L_j - P_j| / q``; points of
    ``I'``-zones through the sandwich inequalities with an additive allowance
    of ``slack * q``.
    """
    handle = handle or XiHandle(seq)
    if system is None:
        system = _system_covering(seq, Fraction(q_hi), i_max, report)
    if Fraction(q_hi) > system.end:
        raise WindowError("q range exceeds the model range; raise i_max")
    extra = system.breakpoints() if breakpoints else ()
    qs = _grid(q_lo, q_hi, n_grid, extra)
    profile = minima_profile(handle, qs, system)
    return CompareReport(profile, system, Fraction(q_lo), Fraction(q_hi), slack)


def growth_depth(s, cap: int = 22, p_cap: int = 30000) -> int:
    """Largest ``k <= cap`` with ``p_k <= p_cap``: matrix sizes grow like ``e^{beta p_k}``."""
    k = 6
    while k < cap and s.p(k + 1) <= p_cap:
        k += 1
    return k


def cycle_ratio(s, k: int = 40) -> float:
    """Factor by which q scales over one period of s, ``p_{k+P} / p_k`` for large k."""
    period = len(s.period) if s.is_periodic else 1
    return s.p(k + period) / s.p(k)


def _system_covering(seq: SturmSeq, q_hi: Fraction, i_max: Optional[int],
                     report: Optional[GrowthReport] = None) -> ThreeSystem:
    report = report or growth(seq, growth_depth(seq.s))
    i = i_max or seq.s.t(1) + 6
    while True:
        system = three_system(seq, i, report)
        if system.end >= q_hi or i_max is not None:
            return system
        i += 2


# parametric exponents -----------------------------------------------------------------------

def parametric_exponents(profile: MinimaProfile, q_from=None, cycle: Optional[float] = None) -> Dict[str, CertReal]:
    """Brackets for the lower and upper limits of ``L_j(q) / q``.

    Over the window ``q >= q_from`` the extremes of ``L_j / q`` are widened by
    ``C / q_from`` where C is the largest Minkowski gap on the whole profile.
    By default the window is the last multiplicative ``cycle`` of the grid
    (see :func:`cycle_ratio`), or its top half when no cycle is given.  A
    window shorter than one cycle can miss the extremes.
    """
    qs = profile.qs
    if q_from is None:
        if cycle is None:
            q_from = (qs[0] + qs[-1]) / 2
        else:
            q_from = max(qs[0], qs[-1] / Fraction(cycle))
    q_from = Fraction(q_from)
    window = [p for p in profile.points if p.q >= q_from]
    if len(window) < 3:
        raise DomainError("window too small")
    allowance = Fraction(profile.minkowski_constant()) / q_from + Fraction(1, 1 << 20)
    out = {}
    for j in range(3):
        ratios = [p.L[j].mid / p.q for p in window]
        lo, hi = min(ratios), max(ratios)
        out[f"psi_lower_{j + 1}"] = CertReal(lo - allowance, lo + allowance)
        out[f"psi_upper_{j + 1}"] = CertReal(hi - allowance, hi + allowance)
    return out


def translate_parametric(psi: Dict[str, CertReal]) -> Dict[str, CertReal]:
    """Classical exponents from ``(psi_lower_1, psi_upper_1, psi_lower_3, psi_upper_3)``.

    ``omega2 = 1/psi_lower_1 - 1``, ``omega2_hat = 1/psi_upper_1 - 1``,
    ``lambda2_hat = psi_lower_3 / (1 - psi_lower_3)``, ``lambda2 = psi_upper_3 / (1 - psi_upper_3)``.
    """
    def inv_minus_one(x: CertReal) -> Optional[CertReal]:
        lo = max(x.lo, Fraction(1, 1 << 30))
        if x.hi <= 0:
            return None
        return CertReal(1 / x.hi - 1, 1 / lo - 1)

    def ratio(x: CertReal) -> Optional[CertReal]:
        hi = min(x.hi, 1 - Fraction(1, 1 << 30))
        lo = x.lo
        return CertReal(lo / (1 - lo), hi / (1 - hi))

    return {
        "omega2": inv_minus_one(psi["psi_lower_1"]),
        "omega2_hat": inv_minus_one(psi["psi_upper_1"]),
        "lambda2_hat": ratio(psi["psi_lower_3"]),
        "lambda2": ratio(psi["psi_upper_3"]),
    }
