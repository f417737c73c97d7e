import math
from fractions import Fraction

import pytest

from sturmlab.certreal import CertReal, cf_enclosure, exp_enclosure, golden, log_enclosure, sqrt_enclosure
from sturmlab.errors import DomainError


def test_sqrt_bounds_are_tight():
    lo, hi = sqrt_enclosure(2, 60)
    assert lo * lo <= 2 <= hi * hi
    assert hi - lo <= Fraction(1, 2 ** 60)
    assert sqrt_enclosure(49, 10) == (7, 7)


def test_golden_refines():
    g = golden(40)
    assert g.lo < Fraction(16180339888, 10 ** 10) and g.hi > Fraction(16180339887, 10 ** 10)
    finer = g.refine(200)
    assert finer.width < Fraction(1, 2 ** 190)
    assert g.contains(finer)


def test_continued_fraction_of_sqrt3_minus_one():
    # [0; 1, 2, 1, 2, ...] = sqrt(3) - 1
    x = cf_enclosure([0] + [1, 2] * 30)
    assert abs(float(x.mid) - (math.sqrt(3) - 1)) < 1e-15
    assert x.width < Fraction(1, 10 ** 30)


def test_log_and_exp_enclose_floats():
    lx = log_enclosure(Fraction(10), 80)
    assert abs(float(lx.mid) - math.log(10)) < 1e-15
    assert lx.width < Fraction(1, 2 ** 70)
    e = exp_enclosure(Fraction(150), 64)
    assert e.lo > 0 and e.width / e.lo < Fraction(1, 2 ** 60)
    assert abs(float(e.mid) / math.exp(150) - 1) < 1e-14


def test_interval_arithmetic_is_outward():
    a = CertReal(1, 2)
    b = CertReal(-1, 3)
    assert (a * b).lo == -2 and (a * b).hi == 6
    assert (a - b).lo == -2 and (a - b).hi == 3
    with pytest.raises(DomainError):
        b.reciprocal()
    with pytest.raises(DomainError):
        CertReal(2, 1)


def test_rounding_keeps_containment():
    x = CertReal(Fraction(1, 3), Fraction(1, 3))
    r = x.rounded(20)
    assert r.contains(x) and r.width <= Fraction(2, 2 ** 20)
