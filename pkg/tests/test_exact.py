from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sturmlab.errors import DomainError
from sturmlab.exact import IDENTITY, J, Mat2, Point, cross, det3, dot, u_map

entry = st.integers(-9, 9)
matrices = st.builds(Mat2, entry, entry, entry, entry)
points = st.builds(Point, entry, entry, entry)


def test_adjugate_and_det():
    m = Mat2(2, 1, 1, 0)
    assert m.adj() == Mat2(0, -1, -1, 2)
    assert m.det() == -1


def test_product():
    assert Mat2(1, 1, 1, 0) * Mat2(2, 1, 1, 0) == Mat2(3, 1, 2, 1)


def test_content():
    assert Mat2(6, -9, 3, 0).content() == 3
    with pytest.raises(DomainError):
        Mat2(0, 0, 0, 0).content()


def test_rational_content_gives_primitive_integer_matrix():
    m = Mat2(Fraction(2, 3), Fraction(4, 9), 0, Fraction(-2, 1))
    p = m.scale_down(m.content())
    assert p.is_integral() and p.content() == 1


def test_fast_power_matches_repeated_product():
    m = Mat2(2, 1, 1, 1)
    slow = IDENTITY
    for _ in range(13):
        slow = slow * m
    assert m ** 13 == slow
    assert m ** 0 == IDENTITY


def test_u_map_examples():
    assert u_map(IDENTITY) == Point(0, 0, 0)
    assert u_map(Mat2(3, 1, 2, 1)) == Point(-2, 2, 1)
    assert u_map(Mat2(3, 1, 2, 1).adj()) == Point(2, -2, -1)


def test_cross_and_dot():
    assert cross(Point(1, 0, 0), Point(0, 1, 0)) == Point(0, 0, 1)
    x = Point(4, -1, 7)
    assert cross(x, x).is_zero()
    assert dot(Point(-2, 2, 1), (1, 3, 9)) == -2 + 6 + 9


def test_point_matrix_identification():
    x = Point(2, -3, 5)
    assert x.matrix() == Mat2(2, -3, -3, 5)
    assert x.det() == 2 * 5 - 9
    assert Point.from_matrix(x.matrix()) == x
    with pytest.raises(DomainError):
        Point.from_matrix(Mat2(1, 2, 3, 4))


@given(matrices)
def test_adjugate_identity(x):
    assert x * x.adj() == IDENTITY * x.det()


@given(points)
def test_j_conjugation_of_symmetric(y):
    if y.det() == 0:
        return
    assert J * y.matrix() * J == y.matrix().inverse() * (-y.det())


@given(matrices)
def test_u_vanishes_exactly_on_scalars(x):
    assert u_map(x).is_zero() == (x.b == 0 and x.c == 0 and x.a == x.d)
    assert u_map(x.adj()) == -u_map(x)


@settings(max_examples=60)
@given(matrices, matrices)
def test_u_identity_a(x, y):
    assert cross(u_map(x), u_map(y)) == Point.from_matrix(-(x * y - y * x) * J)


@settings(max_examples=60)
@given(matrices, matrices)
def test_u_identity_d(x, y):
    assert u_map(x * y) + u_map(y * x) == u_map(y) * x.trace() + u_map(x) * y.trace()


@settings(max_examples=60)
@given(points, points)
def test_u_identity_c(x, y):
    assert u_map(x.matrix() * y.matrix().adj()) == -cross(x, y)


@given(matrices, matrices)
def test_content_is_supermultiplicative(a, b):
    if a.is_zero() or b.is_zero() or (a * b).is_zero():
        return
    assert (a * b).content() >= a.content() * b.content()


def test_det3_of_standard_basis():
    assert det3(Point(1, 0, 0), Point(0, 1, 0), Point(0, 0, 1)) == 1


@settings(max_examples=60)
@given(matrices, matrices)
def test_u_identity_b(x, y):
    if x.det() == 0 or y.det() == 0:
        return
    rhs = -(x * y * (IDENTITY - y.inverse() * x.inverse() * y * x)) * J
    assert cross(u_map(x), u_map(y)) == Point.from_matrix(rhs)


@settings(max_examples=60)
@given(matrices, matrices, matrices)
def test_u_identity_e(x, y, p):
    if p.det() == 0:
        return
    pi = p.inverse()
    rhs = p * cross(u_map(x), u_map(y)).matrix() * p.T * Fraction(1, p.det())
    assert cross(u_map(p * x * pi), u_map(p * y * pi)) == Point.from_matrix(rhs)
