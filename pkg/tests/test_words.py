import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sturmlab.errors import SchemaError, WindowError
from sturmlab.exact import Mat2
from sturmlab.words import (
    SeqSpec,
    at_least_golden_power,
    defects,
    expand_defects,
    p_seq,
    palindrome_ladder,
    palindromic_prefixes,
    phi_morphism,
    psi,
    sigma,
    sturmian_word,
)


def test_psi_for_fibonacci_sequence():
    s = SeqSpec.constant(1)
    assert all(psi(i, s) == i - 2 for i in range(0, 40))


def test_psi_for_sequence_starting_with_two():
    s = SeqSpec((2,), (1,))
    assert [s.t(k) for k in range(4)] == [-1, 1, 2, 3]
    assert psi(1, s) == -2
    assert psi(0, s) == -1


def test_psi_off_the_partial_sums():
    s = SeqSpec((), (3, 1, 2))
    rungs = {s.t(k) for k in range(60)}
    assert all(psi(i, s) == i - 1 for i in range(60) if i not in rungs)


def test_continuants():
    assert p_seq(SeqSpec.constant(1), 6) == [0, 1, 1, 2, 3, 5, 8, 13]
    s = SeqSpec((2, 3), (1,))
    assert s.p(1) == 2 and s.p(2) == 7
    assert s.q_shift(4, 3) == 0 and s.q_shift(4, 4) == 1


def test_sigma_values():
    inv_golden = sigma(SeqSpec.constant(1), 60)
    assert inv_golden.width < Fraction(1, 2 ** 60)
    assert abs(float(inv_golden.mid) - (5 ** 0.5 - 1) / 2) < 1e-16
    root2 = sigma(SeqSpec.constant(2), 60)
    assert abs(float(root2.mid) - (2 ** 0.5 - 1)) < 1e-15
    increasing = sigma(SeqSpec(tuple(range(1, 40))), 40)
    assert increasing.hi < Fraction(1, 10)
    assert increasing.label == "truncated"


def test_finite_prefix_is_a_window():
    s = SeqSpec((1, 2, 3))
    with pytest.raises(WindowError):
        s(4)


def test_schema():
    assert SeqSpec.from_json({"prefix": [2], "period": [1, 2]}) == SeqSpec((2,), (1, 2))
    with pytest.raises(SchemaError):
        SeqSpec.from_json({"terms": [1]})


def test_fibonacci_words():
    s = SeqSpec.constant(1)
    words = [sturmian_word(s, 1, 2, k) for k in range(1, 5)]
    assert words == [(1,), (1, 2), (1, 2, 1), (1, 2, 1, 1, 2)]


@pytest.mark.parametrize("period", [(1,), (2,), (1, 2), (2, 1, 1), (3,)])
def test_palindromic_prefixes_match_the_ladder(period):
    s = SeqSpec((), period)
    k = 1
    while len(sturmian_word(s, 1, 2, k)) < 20000:
        k += 1
    word = sturmian_word(s, 1, 2, k)
    direct = palindromic_prefixes(word, 18)
    assert direct == palindrome_ladder(s, 1, 2, 18)
    assert all(p == p[::-1] for p in direct)


def test_phi_examples():
    assert phi_morphism((1,)) == Mat2(1, 1, 1, 0)
    assert phi_morphism((2,)) == Mat2(2, 1, 1, 0)
    assert phi_morphism((1, 2)) == Mat2(3, 1, 2, 1)
    assert phi_morphism((1, 2, 1)).is_symmetric()


rationals = st.fractions(min_value=-100, max_value=100, max_denominator=50)


@given(st.lists(rationals, min_size=1, max_size=31), st.sampled_from([(1,), (2,), (1, 2), (2, 1, 1)]))
def test_defect_expansion_recovers_the_sequence(r, period):
    s = SeqSpec((), period)
    eps = defects(s, r)
    assert all(expand_defects(s, eps, k) == Fraction(r[k]) for k in range(len(r)))


def test_golden_power_test():
    assert at_least_golden_power(2, 1) and not at_least_golden_power(1, 1)
    assert at_least_golden_power(3, 2) and not at_least_golden_power(2, 2)
    assert at_least_golden_power(1, 0)


def test_shifted_continuants_dominate_golden_powers():
    rng = random.Random(7)
    for _ in range(5):
        s = SeqSpec(tuple(rng.randint(1, 4) for _ in range(45)))
        for k in range(0, 41):
            for j in range(0, k + 1):
                assert at_least_golden_power(s.q_shift(j, k + 1), k - j)
