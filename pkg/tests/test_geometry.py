import itertools
import math
import random
from fractions import Fraction

import pytest

from sturmlab.certreal import CertReal, golden
from sturmlab.errors import DomainError, WindowError
from sturmlab.exact import Point, det3
from sturmlab.geometry import (
    Trajectory,
    _exact_minima,
    _surrogate,
    compare,
    cycle_ratio,
    growth_depth,
    minima_profile,
    parametric_exponents,
    successive_minima,
    three_system,
    translate_parametric,
)
from sturmlab.limits import XiHandle
from sturmlab.sturm import growth


def _brute_minima(body, radius):
    """Greedy successive minima over a box; valid when every minimiser lies in it."""
    pts = [v for v in itertools.product(range(-radius, radius + 1), repeat=3) if any(v)]
    pts.sort(key=body.value)
    chosen = []
    for v in pts:
        if len(chosen) == 0:
            chosen.append(v)
        elif len(chosen) == 1:
            a = chosen[0]
            if any(a[i] * v[j] != a[j] * v[i] for i in range(3) for j in range(3)):
                chosen.append(v)
        elif det3(*(Point(*x) for x in chosen), Point(*v)) != 0:
            chosen.append(v)
            break
    return [body.value(v) for v in chosen]


@pytest.fixture(scope="module")
def bl_handle(bl):
    return XiHandle(bl)


@pytest.fixture(scope="module")
def bl_system(bl):
    return three_system(bl, 21, growth(bl, 20))


CASES = [(Fraction(q), False) for q in ("1/2", "2", "7/2", "5", "8")] + \
        [(Fraction(q), True) for q in ("1/2", "3/2", "2", "3")]


@pytest.mark.parametrize("q,dual", CASES)
def test_exact_minima_match_brute_force(bl_handle, q, dual):
    body, _ = _surrogate(bl_handle, q, dual)
    exact = [v for v, _ in _exact_minima(body)]
    # primal minimisers satisfy |x_j| <= lambda_3; dual ones |x_j| <= e^q lambda_3
    bound = exact[2] * (1 if not dual else math.ceil(math.exp(q)))
    radius = int(bound) + 1
    assert radius <= 30
    assert exact == _brute_minima(body, radius)


def test_minima_need_a_handle(bl):
    with pytest.raises(DomainError):
        successive_minima(0.72, 10)


def test_first_minimum_is_not_positive_at_zero(bl_handle):
    m = successive_minima(bl_handle, 0)
    assert m.values[0].lo <= 0
    assert abs(det3(*m.points)) >= 1


def test_minkowski_sums_stay_bounded(bl_handle):
    for q in (10, 40, 90):
        for dual in (False, True):
            m = successive_minima(bl_handle, q, dual)
            total = sum(float(v.mid) for v in m.values)
            assert abs(total - (q if not dual else -q)) < 2


def test_trajectory_of_a_point(bl_handle):
    tr = Trajectory(Point(1, 0, 0), bl_handle)
    assert tr.L(0).contains(0)
    assert tr.L_star(0).hi >= 0


def test_model_sums_to_q(bl_system):
    rng = random.Random(5)
    lo, hi = bl_system.start, bl_system.end
    for _ in range(100):
        q = lo + (hi - lo) * Fraction(rng.randint(1, 10 ** 6 - 1), 10 ** 6)
        assert sum(bl_system.P(q)) == q


def test_model_slopes(bl_system):
    rng = random.Random(9)
    h = Fraction(1, 10 ** 12)
    lo, hi = bl_system.start, bl_system.end
    for _ in range(200):
        q = lo + (hi - lo) * Fraction(rng.randint(1, 10 ** 6 - 2), 10 ** 6)
        for a, b in zip(bl_system.P(q), bl_system.P(q + h)):
            assert (b - a) / h in (0, Fraction(1, 2), 1)


def test_zero_delta_structure(bl_system):
    assert bl_system.delta == 0
    assert all(bl_system.checks.values()), bl_system.checks
    for i in range(bl_system.i0, bl_system.i_max + 1):
        r = bl_system.rungs[i]
        assert r.q == 2 * r.log_y
        assert bl_system.intervals[i][1] == r.c


def test_model_window(bl_system):
    with pytest.raises(WindowError):
        bl_system.P(bl_system.end + 1)
    assert bl_system.zone(0) == "pre-window"


def test_dual_minimiser_is_the_y_point(bl, bl_handle, bl_system):
    # below i = 4 the constants of the model dominate
    for i in range(max(bl_system.i0, 4), 10):
        a, b = bl_system.intervals[i]
        m = successive_minima(bl_handle, (a + b) / 2, dual=True)
        y = bl.y_primitive(i)
        assert m.points[0] in (y, -y)


def test_positive_delta_system(det_growth):
    report = growth(det_growth, 22)
    system = three_system(det_growth, 21, report)
    assert 0 < system.delta < Fraction(382, 1000)
    assert all(system.checks.values())
    widths = [system.intervals[i + 1][0] - system.intervals[i][1] for i in range(system.i0, system.i_max)]
    assert all(w > 0 for w in widths)


def test_compare_on_a_small_grid(bl, bl_handle, bl_system):
    rep = compare(bl, 30, 60, 8, system=bl_system, handle=bl_handle, breakpoints=False)
    assert rep.max_deviation_I(top_half=False) < 0.1
    assert rep.minkowski_ratio() < 0.05
    assert not rep.sandwich_failures()
    csv_text = rep.profile.to_csv()
    assert csv_text.splitlines()[0].startswith("q,L1,L2,L3")
    assert len(csv_text.splitlines()) == 9


def test_compare_outside_the_model(bl, bl_system):
    with pytest.raises(WindowError):
        compare(bl, 10, float(bl_system.end) + 10, 4, system=bl_system)


def test_depth_helpers():
    from sturmlab.words import SeqSpec

    assert growth_depth(SeqSpec.constant(1)) == 22
    assert growth_depth(SeqSpec.constant(2)) < 22
    assert abs(cycle_ratio(SeqSpec.constant(2)) - (1 + 2 ** 0.5)) < 1e-9
    assert abs(cycle_ratio(SeqSpec.constant(1)) - float(golden(40).mid)) < 1e-9


def test_translation_of_parametric_values():
    g = golden(80)
    psi = {
        "psi_lower_1": CertReal.exact(1) / (2 * g + 2),
        "psi_upper_1": CertReal.exact(1) / (g * g + 1),
        "psi_lower_3": g.reciprocal() / (1 + g.reciprocal()),
        "psi_upper_3": CertReal.exact(Fraction(1, 2)),
    }
    out = translate_parametric(psi)
    assert abs(float(out["omega2"].mid) - float((2 * g + 1).mid)) < 1e-12
    assert abs(float(out["omega2_hat"].mid) - float((g * g).mid)) < 1e-12
    assert abs(float(out["lambda2_hat"].mid) - float(g.reciprocal().mid)) < 1e-12
    assert float(out["lambda2"].mid) == 1.0


def test_parametric_window_needs_points(bl_handle):
    profile = minima_profile(bl_handle, [10, 20])
    with pytest.raises(DomainError):
        parametric_exponents(profile)
