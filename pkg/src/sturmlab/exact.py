"""Exact scalars, 2x2 matrices, symmetric points and the map U.

Scalars are GMP integers and rationals (``gmpy2.mpz`` / ``gmpy2.mpq``).
Python ``int`` and ``fractions.Fraction`` inputs are converted on entry, so
every result is exact and rationals are always kept in lowest terms.

A point ``(x0, x1, x2)`` of Q^3 is identified with the symmetric matrix
``[[x0, x1], [x1, x2]]`` and with the polynomial ``x0 + x1*X + x2*X^2``.
"""

from __future__ import annotations

import numbers
from fractions import Fraction
from functools import reduce

import gmpy2
from gmpy2 import mpq, mpz

from .errors import DomainError

__all__ = [
    "scalar",
    "to_fraction",
    "Mat2",
    "Point",
    "IDENTITY",
    "J",
    "u_map",
    "cross",
    "dot",
    "det3",
]


def scalar(x):
    """Convert an exact number to ``mpz`` (integers) or ``mpq`` (rationals)."""
    if isinstance(x, (type(mpz(0)), type(mpq(0)))):
        if isinstance(x, type(mpq(0))) and x.denominator == 1:
            return x.numerator
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, numbers.Integral):
        return mpz(x)
    if isinstance(x, numbers.Rational):
        q = mpq(x.numerator, x.denominator)
        return q.numerator if q.denominator == 1 else q
    raise TypeError(f"not an exact number: {x!r}")


def to_fraction(x) -> Fraction:
    x = scalar(x)
    return Fraction(int(x.numerator), int(x.denominator))


def _is_integral(x) -> bool:
    return x.denominator == 1


def _content_of(values):
    """Positive rational c such that values / c is a primitive integer vector."""
    values = [scalar(v) for v in values]
    if all(v == 0 for v in values):
        raise DomainError("content of the zero vector is undefined")
    num = reduce(gmpy2.gcd, (v.numerator for v in values), mpz(0))
    den = reduce(gmpy2.lcm, (v.denominator for v in values), mpz(1))
    return scalar(mpq(num, den))


class Mat2:
    """Immutable 2x2 matrix ``[[a, b], [c, d]]`` over Z or Q."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        object.__setattr__(self, "a", scalar(a))
        object.__setattr__(self, "b", scalar(b))
        object.__setattr__(self, "c", scalar(c))
        object.__setattr__(self, "d", scalar(d))

    def __setattr__(self, name, value):
        raise AttributeError("Mat2 is immutable")

    @classmethod
    def from_rows(cls, rows) -> "Mat2":
        (a, b), (c, d) = rows
        return cls(a, b, c, d)

    def rows(self):
        return [[self.a, self.b], [self.c, self.d]]

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __repr__(self):
        return "Mat2(%s, %s; %s, %s)" % tuple(str(e) for e in self.entries())

    def __eq__(self, other):
        if not isinstance(other, Mat2):
            return NotImplemented
        return self.entries() == other.entries()

    def __hash__(self):
        return hash(self.entries())

    def __add__(self, other: "Mat2") -> "Mat2":
        return Mat2(self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d)

    def __sub__(self, other: "Mat2") -> "Mat2":
        return Mat2(self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d)

    def __neg__(self) -> "Mat2":
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def __mul__(self, other):
        if isinstance(other, Mat2):
            return Mat2(
                self.a * other.a + self.b * other.c,
                self.a * other.b + self.b * other.d,
                self.c * other.a + self.d * other.c,
                self.c * other.b + self.d * other.d,
            )
        k = scalar(other)
        return Mat2(self.a * k, self.b * k, self.c * k, self.d * k)

    def __rmul__(self, other):
        return self * other

    def scale_down(self, k) -> "Mat2":
        """Divide every entry by the nonzero scalar ``k``."""
        k = scalar(k)
        if k == 0:
            raise DomainError("division by zero")
        return Mat2(*(mpq(e) / k for e in self.entries()))

    @property
    def T(self) -> "Mat2":
        return Mat2(self.a, self.c, self.b, self.d)

    def adj(self) -> "Mat2":
        """Adjugate: ``M * M.adj() == det(M) * Id``."""
        return Mat2(self.d, -self.b, -self.c, self.a)

    def det(self):
        return self.a * self.d - self.b * self.c

    def trace(self):
        return self.a + self.d

    def inverse(self) -> "Mat2":
        det = self.det()
        if det == 0:
            raise DomainError("singular matrix has no inverse")
        return self.adj().scale_down(det)

    def __pow__(self, n: int) -> "Mat2":
        if n < 0:
            raise DomainError("negative matrix power")
        result, base = IDENTITY, self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def norm(self):
        """Largest absolute value of an entry."""
        return max(abs(e) for e in self.entries())

    def content(self):
        return _content_of(self.entries())

    def primitive(self) -> "Mat2":
        return self.scale_down(self.content())

    def is_integral(self) -> bool:
        return all(_is_integral(e) for e in self.entries())

    def is_symmetric(self) -> bool:
        return self.b == self.c

    def is_zero(self) -> bool:
        return not any(self.entries())


IDENTITY = Mat2(1, 0, 0, 1)
J = Mat2(0, 1, -1, 0)


class Point:
    """Immutable point ``(x0, x1, x2)`` of Q^3, also read as a symmetric matrix."""

    __slots__ = ("x0", "x1", "x2")

    def __init__(self, x0, x1, x2):
        object.__setattr__(self, "x0", scalar(x0))
        object.__setattr__(self, "x1", scalar(x1))
        object.__setattr__(self, "x2", scalar(x2))

    def __setattr__(self, name, value):
        raise AttributeError("Point is immutable")

    @classmethod
    def from_matrix(cls, m: Mat2) -> "Point":
        if not m.is_symmetric():
            raise DomainError(f"matrix is not symmetric: {m!r}")
        return cls(m.a, m.b, m.d)

    def matrix(self) -> Mat2:
        return Mat2(self.x0, self.x1, self.x1, self.x2)

    def coords(self):
        return (self.x0, self.x1, self.x2)

    def __iter__(self):
        return iter(self.coords())

    def __getitem__(self, j):
        return self.coords()[j]

    def __repr__(self):
        return "Point(%s, %s, %s)" % tuple(str(e) for e in self.coords())

    def __eq__(self, other):
        if isinstance(other, Point):
            return self.coords() == other.coords()
        if isinstance(other, tuple):
            return self.coords() == tuple(scalar(x) for x in other)
        return NotImplemented

    def __hash__(self):
        return hash(self.coords())

    def __add__(self, other: "Point") -> "Point":
        return Point(self.x0 + other.x0, self.x1 + other.x1, self.x2 + other.x2)

    def __sub__(self, other: "Point") -> "Point":
        return Point(self.x0 - other.x0, self.x1 - other.x1, self.x2 - other.x2)

    def __neg__(self) -> "Point":
        return Point(-self.x0, -self.x1, -self.x2)

    def __mul__(self, k) -> "Point":
        k = scalar(k)
        return Point(self.x0 * k, self.x1 * k, self.x2 * k)

    __rmul__ = __mul__

    def scale_down(self, k) -> "Point":
        k = scalar(k)
        if k == 0:
            raise DomainError("division by zero")
        return Point(*(mpq(e) / k for e in self.coords()))

    def det(self):
        """Determinant of the associated symmetric matrix."""
        return self.x0 * self.x2 - self.x1 * self.x1

    def norm(self):
        return max(abs(e) for e in self.coords())

    def content(self):
        return _content_of(self.coords())

    def primitive(self) -> "Point":
        return self.scale_down(self.content())

    def is_zero(self) -> bool:
        return not any(self.coords())

    def is_integral(self) -> bool:
        return all(_is_integral(e) for e in self.coords())

    def proportional(self, other: "Point") -> bool:
        return cross(self, other).is_zero()

    def discriminant(self):
        """Discriminant ``x1^2 - 4 x0 x2`` of the associated polynomial."""
        return self.x1 * self.x1 - 4 * self.x0 * self.x2


def u_map(m: Mat2) -> Point:
    """U([[a, b], [c, d]]) = (-c, a - d, b), i.e. the polynomial -c + (a-d)X + bX^2."""
    return Point(-m.c, m.a - m.d, m.b)


def cross(x: Point, y: Point) -> Point:
    return Point(
        x.x1 * y.x2 - x.x2 * y.x1,
        x.x2 * y.x0 - x.x0 * y.x2,
        x.x0 * y.x1 - x.x1 * y.x0,
    )


def dot(x, y):
    return x[0] * y[0] + x[1] * y[1] + x[2] * y[2]


def det3(x: Point, y: Point, z: Point):
    """Determinant of the 3x3 matrix with rows x, y, z."""
    return dot(x, cross(y, z))
