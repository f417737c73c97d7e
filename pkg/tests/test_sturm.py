import random

import pytest

from sturmlab.errors import DomainError
from sturmlab.exact import J, Mat2, Point, u_map
from sturmlab.sturm import (
    SturmSeq,
    check_recurrence,
    degenerate_triples,
    growth,
    new_seq,
    parity_ladder,
    random_seed,
    reconstruct,
    recurrence_points,
    symmetrizers,
    verify_identities,
)
from sturmlab.words import SeqSpec

PERIODS = [(1,), (2,), (1, 2), (2, 1, 1)]


def test_bl_seed_is_admissible_with_the_expected_symmetrizer(bl):
    w0, w1 = bl.w0, bl.w1
    assert w0 * w1 - w1 * w0 == J
    assert bl.admissible
    assert bl.N == Mat2(-1, 2, 1, -3)
    assert w1 * bl.N == Mat2(0, -1, -1, 2)
    assert w0 * bl.N.T == Mat2(0, -1, -1, 1)


def test_commuting_seed_is_not_admissible():
    w = Mat2(2, 1, 1, 1)
    seq = new_seq(w, w, SeqSpec.constant(1))
    assert not seq.admissible
    with pytest.raises(DomainError):
        seq.y(3)


def test_y_at_psi_of_rungs(bl):
    s = bl.s
    for k in range(1, 12):
        assert bl.y(s.psi(s.t(k))) == Point.from_matrix(bl.w(k - 1) * bl.N_k(k))


def test_b_on_the_rungs(bl):
    s = bl.s
    for k in range(1, 10):
        assert bl.b(s.t(k)) == u_map(bl.w(k - 1))
    assert bl.w(2) == Mat2(3, 1, 2, 1)
    assert bl.b(s.t(3)) == Point(-2, 2, 1)


@pytest.mark.parametrize("period", PERIODS)
def test_identities_for_random_seeds(period):
    rng = random.Random(hash(period) & 0xFFFF)
    s = SeqSpec((), period)
    for _ in range(4):
        seq = random_seed(rng, s, 5)
        report = verify_identities(seq, 20)
        assert report.ok, report.as_dict()


def test_bl_identities_to_25(bl):
    assert verify_identities(bl, 25).ok


def test_corruption_is_located():
    seq = new_seq(Mat2(2, 1, 1, 0), Mat2(1, 1, 1, 0), SeqSpec.constant(1))
    points = {i: seq.y(i) for i in range(-2, 16)}
    points[9] = points[9] + Point(1, 0, 0)
    report = check_recurrence(lambda i: points[i], seq.s, 15)
    assert report.first_failure() == ("3", 8)


@pytest.mark.parametrize("period", PERIODS)
def test_reconstruction_round_trip(period):
    rng = random.Random(31 + len(period))
    s = SeqSpec((), period)
    seq = random_seed(rng, s, 5)
    rebuilt = reconstruct(seq.y(-2), seq.y(-1), seq.y(0), s)
    assert rebuilt.admissible
    assert all(rebuilt.y(i) == seq.y(i) for i in range(-2, 23))


def test_reconstruction_rejects_singular_start():
    with pytest.raises(DomainError):
        recurrence_points(Point(1, 0, 0), Point(0, 0, 1), Point(1, 1, 1), SeqSpec.constant(1), 10)


def test_collinear_start_is_not_admissible():
    a, b = Point(1, 0, 1), Point(1, 1, 2)
    assert not reconstruct(a, b, a + b, SeqSpec.constant(1)).admissible


def test_parity_ladder(bl):
    assert parity_ladder(bl, 12)


def test_bl_growth(bl):
    report = growth(bl, 20)
    assert report.alpha.contains(0) and report.rho.contains(0) and report.delta.contains(0)
    assert report.beta.lo > 0.6
    assert report.growth_constant.lo > 1
    assert all(report.laws.values())


def test_det_growth(det_growth):
    report = growth(det_growth, 22)
    assert report.alpha.lo > 0 and report.beta.lo > 0
    assert 0.25 < report.delta.lo and report.delta.hi < 0.31
    assert report.delta.width < 0.001
    assert all(report.laws.values())


def test_degenerate_pairs_have_dependent_triples():
    rng = random.Random(3)
    for _ in range(5):
        w0 = Mat2(*(rng.randint(-4, 4) for _ in range(4)))
        if w0.det() == 0:
            continue
        w1 = w0 * w0 + w0 * 2
        if w1.det() == 0:
            continue
        assert not SturmSeq(w0, w1, SeqSpec.constant(1)).admissible
        for n in symmetrizers(w0, w1):
            assert 0 in degenerate_triples(w0, w1, SeqSpec.constant(1), n, 6)
