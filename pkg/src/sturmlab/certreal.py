"""Certified real numbers as shrinkable rational intervals.

A :class:`CertReal` is a closed interval ``[lo, hi]`` with ``Fraction``
endpoints that is guaranteed to contain the real number it stands for.  An
optional *recipe* recomputes the enclosure at a requested number of bits, so
callers can tighten a value on demand with :meth:`CertReal.refine`.

Transcendental functions go through ``mpmath``'s interval context, which rounds
outward; square roots use exact integer square roots.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from fractions import Fraction
from typing import Callable, Iterable, Optional

from mpmath import iv

from .errors import DomainError
from .exact import to_fraction

__all__ = [
    "CertReal",
    "sqrt_enclosure",
    "golden",
    "cf_enclosure",
    "log_enclosure",
    "exp_enclosure",
]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x)
    return to_fraction(x)


def _floor_dyadic(x: Fraction, bits: int) -> Fraction:
    return Fraction(math.floor(x * (1 << bits)), 1 << bits)


def _ceil_dyadic(x: Fraction, bits: int) -> Fraction:
    return Fraction(math.ceil(x * (1 << bits)), 1 << bits)


class CertReal:
    """Closed rational interval known to contain a given real number."""

    __slots__ = ("lo", "hi", "recipe", "label")

    def __init__(self, lo, hi=None, recipe: Optional[Callable[[int], "CertReal"]] = None,
                 label: str = ""):
        lo = _frac(lo)
        hi = lo if hi is None else _frac(hi)
        if lo > hi:
            raise DomainError(f"empty interval [{lo}, {hi}]")
        self.lo, self.hi, self.recipe, self.label = lo, hi, recipe, label

    # construction -----------------------------------------------------
    @classmethod
    def exact(cls, x) -> "CertReal":
        return cls(x, x)

    @classmethod
    def hull(cls, values: Iterable) -> "CertReal":
        lows, highs = [], []
        for v in values:
            if isinstance(v, CertReal):
                lows.append(v.lo)
                highs.append(v.hi)
            else:
                lows.append(_frac(v))
                highs.append(_frac(v))
        if not lows:
            raise DomainError("hull of nothing")
        return cls(min(lows), max(highs))

    @classmethod
    def around(cls, center, radius) -> "CertReal":
        center, radius = _frac(center), abs(_frac(radius))
        return cls(center - radius, center + radius)

    # inspection -------------------------------------------------------
    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __float__(self):
        return float(self.mid)

    def bounds(self):
        return float(self.lo), float(self.hi)

    def contains(self, x) -> bool:
        if isinstance(x, CertReal):
            return self.lo <= x.lo and x.hi <= self.hi
        x = _frac(x)
        return self.lo <= x <= self.hi

    __contains__ = contains

    def overlaps(self, other: "CertReal") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def is_positive(self) -> bool:
        return self.lo > 0

    def __repr__(self):
        return "[%.12g, %.12g]" % self.bounds()

    def as_list(self, digits: int = 12):
        return [round(float(self.lo), digits), round(float(self.hi), digits)]

    # refinement ------------------------------------------------------
    def refine(self, bits: int) -> "CertReal":
        """Enclosure of width at most about ``2**-bits`` when a recipe is known."""
        if self.recipe is None:
            return self
        better = self.recipe(bits)
        lo, hi = max(self.lo, better.lo), min(self.hi, better.hi)
        if lo > hi:
            raise DomainError("refinement is inconsistent with the current enclosure")
        return CertReal(lo, hi, self.recipe, self.label)

    def rounded(self, bits: int) -> "CertReal":
        """Outward rounding of both endpoints to multiples of ``2**-bits``."""
        return CertReal(_floor_dyadic(self.lo, bits), _ceil_dyadic(self.hi, bits),
                        self.recipe, self.label)

    # arithmetic ------------------------------------------------------
    @staticmethod
    def _lift(x) -> "CertReal":
        return x if isinstance(x, CertReal) else CertReal.exact(x)

    def __add__(self, other):
        other = self._lift(other)
        return CertReal(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self):
        return CertReal(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        products = [self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi]
        return CertReal(min(products), max(products))

    __rmul__ = __mul__

    def reciprocal(self) -> "CertReal":
        if self.lo <= 0 <= self.hi:
            raise DomainError(f"reciprocal of an interval containing 0: {self!r}")
        return CertReal(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other):
        return self * self._lift(other).reciprocal()

    def __rtruediv__(self, other):
        return self._lift(other) * self.reciprocal()

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return CertReal(0, max(-self.lo, self.hi))

    def sqrt(self, bits: int = 128) -> "CertReal":
        if self.lo < 0:
            raise DomainError("square root of a negative interval")
        return CertReal(sqrt_enclosure(self.lo, bits)[0], sqrt_enclosure(self.hi, bits)[1])

    def log(self, bits: int = 128) -> "CertReal":
        return log_enclosure(self, bits)

    def max(self, other) -> "CertReal":
        other = self._lift(other)
        return CertReal(max(self.lo, other.lo), max(self.hi, other.hi))

    def min(self, other) -> "CertReal":
        other = self._lift(other)
        return CertReal(min(self.lo, other.lo), min(self.hi, other.hi))


def sqrt_enclosure(x, bits: int = 128):
    """Rational bounds ``lo <= sqrt(x) <= hi`` with ``hi - lo <= 2**-bits``."""
    x = _frac(x)
    if x < 0:
        raise DomainError("square root of a negative number")
    p, q = x.numerator, x.denominator
    root = math.isqrt(p * q << (2 * bits))
    scale = q << bits
    lo = Fraction(root, scale)
    hi = lo if root * root == p * q << (2 * bits) else Fraction(root + 1, scale)
    return lo, hi


def golden(bits: int = 128) -> CertReal:
    """The golden ratio (1 + sqrt 5) / 2."""
    lo, hi = sqrt_enclosure(5, bits + 1)
    return CertReal((1 + lo) / 2, (1 + hi) / 2, recipe=golden, label="golden ratio")


def cf_enclosure(quotients) -> CertReal:
    """Enclosure of ``[a0; a1, a2, ...]`` from a finite list of its partial quotients.

    For partial quotients ``a1, a2, ... >= 1`` the value lies between any two
    consecutive convergents, so the last two convergents bracket it.
    """
    quotients = [int(a) for a in quotients]
    if len(quotients) < 2:
        raise DomainError("need at least two partial quotients")
    if any(a < 1 for a in quotients[1:]):
        raise DomainError("partial quotients after the first must be positive")
    h_prev, h = 1, quotients[0]
    k_prev, k = 0, 1
    for a in quotients[1:]:
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
    first, second = Fraction(h_prev, k_prev), Fraction(h, k)
    return CertReal(min(first, second), max(first, second))


# logarithms -----------------------------------------------------------

def _raw_to_fraction(raw) -> Fraction:
    sign, man, exp, _ = raw
    if not man and exp:
        raise DomainError("non-finite interval endpoint")
    value = Fraction(int(man)) * (Fraction(2) ** int(exp))
    return -value if sign else value


@contextmanager
def _working_bits(bits: int):
    saved = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = saved


def _iv_from_fraction(x: Fraction):
    return iv.mpf(x.numerator) / iv.mpf(x.denominator)


def _iv_to_cert(value) -> CertReal:
    lo, hi = value._mpi_
    return CertReal(_raw_to_fraction(lo), _raw_to_fraction(hi))


def log_enclosure(x, bits: int = 128) -> CertReal:
    """Enclosure of ``log(x)`` for an exact positive number or a positive CertReal."""
    if isinstance(x, CertReal):
        lo, hi = x.lo, x.hi
    else:
        lo = hi = _frac(x)
    if lo <= 0:
        raise DomainError("logarithm of a non-positive number")
    # enough working bits for the integer part of the logarithm plus `bits`
    extra = max(hi.numerator.bit_length(), lo.denominator.bit_length()).bit_length()
    with _working_bits(bits + extra + 16):
        low = iv.log(_iv_from_fraction(lo))
        high = low if hi == lo else iv.log(_iv_from_fraction(hi))
        return CertReal(_iv_to_cert(low).lo, _iv_to_cert(high).hi).rounded(bits + 4)


def exp_enclosure(x, bits: int = 128) -> CertReal:
    """Enclosure of ``exp(x)`` with relative width about ``2**-bits``."""
    if isinstance(x, CertReal):
        lo, hi = x.lo, x.hi
    else:
        lo = hi = _frac(x)
    magnitude = int(abs(max(abs(lo), abs(hi)))) + 1
    with _working_bits(bits + magnitude.bit_length() + 16):
        low = iv.exp(_iv_from_fraction(lo))
        high = low if hi == lo else iv.exp(_iv_from_fraction(hi))
        return CertReal(_iv_to_cert(low).lo, _iv_to_cert(high).hi)
