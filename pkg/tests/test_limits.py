import math
from fractions import Fraction

import pytest

from sturmlab.certreal import CertReal, golden
from sturmlab.errors import DomainError, InsufficientDepth
from sturmlab.exact import Point
from sturmlab.limits import (
    XiHandle,
    empirical_exponents,
    h_sigma,
    jarnik_gap,
    kappa,
    max_bits,
    predicted_exponents,
    predicted_for,
    quad_approximants,
    xi,
)
from sturmlab.sturm import growth


def test_xi_for_the_bl_seed(bl):
    value = xi(bl, 128)
    assert value.width < Fraction(1, 2 ** 120)
    assert abs(float(value.mid) - 0.72048466763) < 1e-11


def test_xi_refines_consistently(bl):
    handle = XiHandle(bl)
    coarse, fine = handle.value(40), handle.value(300)
    assert coarse.contains(fine)


def test_first_quadratic_approximant(bl):
    approx, skipped = quad_approximants(bl, 15)
    assert not skipped
    # z~_2 is X^2 + 2X - 2, with root sqrt(3) - 1
    second = approx[2]
    assert second.poly == Point(-2, 2, 1)
    assert second.near_root.width < Fraction(1, 2 ** 120)
    assert abs(float(second.near_root.mid) - (3 ** 0.5 - 1)) < 1e-15
    for a in approx:
        if a.far_root is not None:
            assert abs(float(a.far_root.mid) - 0.72048466763) > 0.1


def test_polynomial_values_shrink(bl):
    handle = XiHandle(bl)
    approx, _ = quad_approximants(bl, 15, handle)
    last = approx[-1]
    height = max(abs(int(c)) for c in last.poly.coords())
    assert float(last.log_value.hi) - math.log(height) < math.log(1e-6)


def test_bl_exponent_brackets(bl):
    found = empirical_exponents(bl, 21)
    g = golden(80)
    for name, target in [("lambda2", 1), ("lambda2_hat", g.reciprocal()), ("omega2", 2 * g + 1),
                         ("omega2_hat", g * g), ("omega2_star", 2 * g + 1),
                         ("omega2_star_hat", g * g), ("lambda_check", g.reciprocal())]:
        bracket = found.get(name)
        assert bracket.overlaps(CertReal.exact(target) if not isinstance(target, CertReal) else target), name
        assert bracket.width < Fraction(1, 100), name
    assert found.lambda_check.lo <= found.lambda2_hat.hi
    assert found.omega2_star_hat.lo <= found.omega2_hat.hi


def test_exponents_need_depth(bl):
    with pytest.raises(InsufficientDepth):
        empirical_exponents(bl, 5)


def test_predicted_values_at_zero_delta():
    p = predicted_exponents(golden(80).reciprocal(), 0)
    g = float(golden(60).mid)
    assert abs(float(p.omega2_hat.mid) - g * g) < 1e-12
    assert abs(float(p.lambda2_hat.mid) - 1 / g) < 1e-12
    assert abs(float(p.omega2.mid) - (2 * g + 1)) < 1e-12
    assert float(p.lambda2.mid) == 1.0
    assert jarnik_gap(p).contains(0)


def test_predicted_without_sigma():
    p = predicted_exponents(0, 0)
    assert p.omega2 is None
    assert float(p.omega2_hat.mid) == 2.0


def test_prediction_domain():
    with pytest.raises(DomainError):
        predicted_exponents(Fraction(1, 2), Fraction(1, 2))
    with pytest.raises(DomainError):
        predicted_exponents(1, 0)


def test_h_and_kappa():
    assert h_sigma(0).contains(0)
    g = golden(80)
    assert h_sigma(g.reciprocal()).lo > Fraction(26, 100)
    k = kappa()
    assert 0.45 < float(k.mid) < 0.47


def test_det_seed_predictions(det_growth):
    report = growth(det_growth, 22)
    p = predicted_for(det_growth, report)
    assert p.lambda_check is None
    found = empirical_exponents(det_growth, 21)
    assert "lambda2_hat" in found.notes
    assert found.lambda2_hat_jarnik.overlaps(p.lambda2_hat)


def test_max_bits_env(monkeypatch):
    monkeypatch.delenv("STURMLAB_MAX_BITS", raising=False)
    assert max_bits() == 1 << 22
    monkeypatch.setenv("STURMLAB_MAX_BITS", "4096")
    assert max_bits() == 4096
    monkeypatch.setenv("STURMLAB_MAX_BITS", "lots")
    with pytest.raises(DomainError):
        max_bits()
