"""Objects indexed by a sequence of positive integers ``s = (s_1, s_2, ...)``.

This covers the index function psi, the partial sums ``t_k``, the continuants
``p_k`` and their shifted versions ``q_k^(i)``, the quantity sigma(s), Sturmian
characteristic words with their palindromic prefixes, and the continued
fraction morphism Phi.
"""

from __future__ import annotations

import bisect
import json
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from .certreal import CertReal, cf_enclosure, sqrt_enclosure
from .errors import DomainError, SchemaError, WindowError
from .exact import Mat2, IDENTITY

__all__ = [
    "SeqSpec",
    "psi",
    "p_seq",
    "q_shift",
    "defects",
    "expand_defects",
    "at_least_golden_power",
    "sigma",
    "tail_value",
    "sturmian_word",
    "palindromic_prefixes",
    "palindrome_ladder",
    "phi_morphism",
]

Word = Tuple[int, ...]


class SeqSpec:
    """The sequence ``s``: an explicit prefix followed by a repeated period.

    Without a period the sequence is only known up to its prefix, and every
    query beyond it raises :class:`WindowError`.  Index ``k`` starts at 1;
    ``s(0)`` is the conventional value -1.
    """

    def __init__(self, prefix: Iterable[int] = (), period: Optional[Iterable[int]] = None):
        self.prefix = tuple(int(v) for v in prefix)
        self.period = None if period is None else tuple(int(v) for v in period)
        if self.period is not None and not self.period:
            raise DomainError("a periodic tail must be nonempty")
        if any(v < 1 for v in self.prefix + (self.period or ())):
            raise DomainError("all terms of s must be positive integers")
        if self.period is None and not self.prefix:
            raise DomainError("empty sequence")
        self._t = [-1]          # _t[k] = t_k
        self._p = [0, 1]        # _p[k + 1] = p_k

    # construction / serialisation -------------------------------------
    @classmethod
    def constant(cls, value: int) -> "SeqSpec":
        return cls((), (value,))

    @classmethod
    def from_json(cls, obj) -> "SeqSpec":
        if isinstance(obj, str):
            obj = json.loads(obj)
        if not isinstance(obj, dict) or not set(obj) <= {"prefix", "period"}:
            raise SchemaError(f"sequence must be an object with prefix/period: {obj!r}")
        try:
            return cls(obj.get("prefix", []), obj.get("period"))
        except (TypeError, ValueError) as exc:
            raise SchemaError(str(exc)) from exc

    def to_json(self) -> dict:
        out = {"prefix": list(self.prefix)}
        if self.period is not None:
            out["period"] = list(self.period)
        return out

    def __repr__(self):
        return f"SeqSpec(prefix={list(self.prefix)}, period={None if self.period is None else list(self.period)})"

    def __eq__(self, other):
        return isinstance(other, SeqSpec) and (self.prefix, self.period) == (other.prefix, other.period)

    def __hash__(self):
        return hash((self.prefix, self.period))

    @property
    def is_periodic(self) -> bool:
        return self.period is not None

    @property
    def length(self) -> Optional[int]:
        """Number of known terms, or None when the sequence is infinite."""
        return None if self.is_periodic else len(self.prefix)

    # terms -------------------------------------------------------------
    def __call__(self, k: int) -> int:
        if k == 0:
            return -1
        if k < 0:
            raise WindowError(f"s_k is undefined for k = {k}")
        if k <= len(self.prefix):
            return self.prefix[k - 1]
        if self.period is None:
            raise WindowError(f"s_{k} lies beyond the finite prefix of length {len(self.prefix)}")
        return self.period[(k - 1 - len(self.prefix)) % len(self.period)]

    def terms(self, count: int) -> List[int]:
        return [self(k) for k in range(1, count + 1)]

    def t(self, k: int) -> int:
        """Partial sum ``t_k = s_0 + ... + s_k`` with ``s_0 = -1``."""
        if k < 0:
            raise WindowError("t_k is defined for k >= 0")
        while len(self._t) <= k:
            self._t.append(self._t[-1] + self(len(self._t)))
        return self._t[k]

    def p(self, k: int) -> int:
        """Continuant ``p_k`` with ``p_{-1} = 0`` and ``p_0 = 1``."""
        if k < -1:
            raise WindowError("p_k is defined for k >= -1")
        while len(self._p) <= k + 1:
            j = len(self._p) - 1          # index of the next p
            self._p.append(self(j) * self._p[-1] + self._p[-2])
        return self._p[k + 1]

    def block(self, i: int) -> Tuple[int, int]:
        """The pair ``(k, l)`` with ``i = t_k + l`` and ``0 <= l < s_{k+1}``."""
        if i < -1:
            raise WindowError(f"index {i} precedes t_0 = -1")
        while self._t[-1] <= i:
            self.t(len(self._t))
        k = bisect.bisect_right(self._t, i) - 1
        return k, i - self._t[k]

    def rung(self, i: int) -> Optional[int]:
        """The ``k >= 0`` with ``t_k = i``, or None when i is not a partial sum."""
        k, ell = self.block(i)
        return k if ell == 0 else None

    def psi(self, i: int) -> int:
        if i < 0:
            raise WindowError("psi is defined for i >= 0")
        k = self.rung(i)
        if k is not None and k >= 1:
            return self.t(k - 1) - 1
        return i - 1

    def q_shift(self, i: int, k: int) -> int:
        """Shifted continuant ``q_k^(i)``: 0 for k < i, 1 for k = i, then the p-recurrence."""
        if i < 0:
            raise WindowError("q_k^(i) needs i >= 0")
        if k < i:
            return 0
        prev, cur = 0, 1
        for j in range(i + 1, k + 1):
            prev, cur = cur, self(j) * cur + prev
        return cur


def psi(i: int, s: SeqSpec) -> int:
    """psi(i) = t_{k-1} - 1 when i = t_k with k >= 1, and i - 1 otherwise."""
    return s.psi(i)


def p_seq(s: SeqSpec, k_max: int) -> List[int]:
    """``[p_{-1}, p_0, p_1, ..., p_{k_max}]``."""
    if k_max < 0:
        raise DomainError("k_max must be >= 0")
    return [s.p(k) for k in range(-1, k_max + 1)]


def q_shift(s: SeqSpec, i: int, k: int) -> int:
    return s.q_shift(i, k)


def defects(s: SeqSpec, r: Sequence) -> List[Fraction]:
    """``eps_k = r_k - s_k r_{k-1} - r_{k-2}`` for ``k = 0, 1, ...`` with ``r_{-2} = r_{-1} = 0``."""
    r = [Fraction(v) for v in r]
    prev2, prev1 = Fraction(0), Fraction(0)
    out = []
    for k, value in enumerate(r):
        out.append(value - s(k) * prev1 - prev2)
        prev2, prev1 = prev1, value
    return out


def expand_defects(s: SeqSpec, eps: Sequence, k: int) -> Fraction:
    """``sum_{i=0}^{k} eps_i q_k^(i)``, which gives back ``r_k``."""
    return sum((Fraction(eps[i]) * s.q_shift(i, k) for i in range(k + 1)), Fraction(0))


def at_least_golden_power(value: int, n: int) -> bool:
    """Exact test of ``value >= gamma^n`` for ``n >= 0``.

    With ``gamma^n = F_n gamma + F_{n-1}`` and ``gamma = (1 + sqrt 5)/2`` the
    inequality becomes ``2(value - F_{n-1}) - F_n >= F_n sqrt 5``.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    f_prev, f = 1, 0            # F_{-1}, F_0
    for _ in range(n):
        f_prev, f = f, f + f_prev
    lhs = 2 * (value - f_prev) - f
    return lhs >= 0 and lhs * lhs >= 5 * f * f


# sigma ------------------------------------------------------------------

def _reversed_cf_value(terms: Sequence[int]) -> Fraction:
    """Exact value of the finite continued fraction ``[terms[0]; terms[1], ...]``."""
    value = Fraction(terms[-1])
    for a in reversed(terms[:-1]):
        value = a + 1 / value
    return value


def _periodic_fixed_point(cycle: Sequence[int]):
    """Coefficients of the quadratic fixed by the purely periodic CF ``[cycle; cycle; ...]``.

    Returns ``(A, B, C)`` with the value x > 1 being the positive root of
    ``A x^2 + B x + C = 0`` and ``A > 0``.
    """
    m = IDENTITY
    for a in cycle:
        m = m * Mat2(a, 1, 1, 0)
    # x = (m.a x + m.b) / (m.c x + m.d)
    return m.c, m.d - m.a, -m.b


def _quadratic_root(coeffs, bits: int) -> CertReal:
    A, B, C = (int(c) for c in coeffs)
    disc = B * B - 4 * A * C
    lo, hi = sqrt_enclosure(disc, bits + 4)
    return CertReal((-B + lo) / (2 * A), (-B + hi) / (2 * A))


def sigma(s: SeqSpec, depth: int = 64) -> CertReal:
    """Enclosure of sigma(s) = liminf 1/[s_{k+1}; s_k, ..., s_1].

    For a periodic tail the limit points of ``[s_{k+1}; s_k, ...]`` are the
    purely periodic continued fractions read backwards through one period;
    each is a quadratic irrational computed exactly and enclosed to about
    ``2**-depth``.  For a finite prefix the result is the hull of the values
    over the last third of the available terms, labelled ``truncated``.
    """
    if depth < 1:
        raise DomainError("depth must be >= 1")
    if s.is_periodic:
        period = s.period
        n = len(period)
        best = None
        for phase in range(n):
            # [c_phase; c_{phase-1}, c_{phase-2}, ...] over the period, backwards
            cycle = [period[(phase - j) % n] for j in range(n)]
            x = _quadratic_root(_periodic_fixed_point(cycle), depth + 8)
            inv = x.reciprocal()
            best = inv if best is None else best.min(inv)
        return CertReal(best.lo, best.hi, recipe=lambda bits: sigma(s, bits), label="sigma").rounded(depth + 4)
    count = min(depth, len(s.prefix) - 1)
    if count < 1:
        raise DomainError("need at least two terms")
    values = [1 / _reversed_cf_value([s(j) for j in range(k + 1, 0, -1)]) for k in range(1, count + 1)]
    window = values[-max(1, -(-len(values) // 3)):]
    return CertReal(min(window), max(window), label="truncated")


def tail_value(s: SeqSpec, i: int, terms: int = 60) -> CertReal:
    """Enclosure of the continued fraction ``[s_i; s_{i+1}, s_{i+2}, ...]``."""
    if i < 1:
        raise WindowError("tails start at i >= 1")
    return cf_enclosure([s(j) for j in range(i, i + terms)])


# words -------------------------------------------------------------------

def sturmian_word(s: SeqSpec, a: int, b: int, k: int) -> Word:
    """``w_0 = b``, ``w_1 = b^{s_1-1} a``, ``w_{k+1} = w_k^{s_{k+1}} w_{k-1}``."""
    if a == b or a < 1 or b < 1:
        raise DomainError("letters must be distinct positive integers")
    if k < 0:
        raise DomainError("k must be >= 0")
    prev, cur = (b,), (b,) * (s(1) - 1) + (a,)
    if k == 0:
        return prev
    for j in range(1, k):
        prev, cur = cur, cur * s(j + 1) + prev
    return cur


def _is_palindrome(word: Sequence[int]) -> bool:
    return list(word) == list(reversed(word))


def palindromic_prefixes(word: Sequence[int], count: int) -> List[Word]:
    """The first ``count`` palindromic prefixes of ``word`` by length, starting with the empty word."""
    word = tuple(word)
    out: List[Word] = []
    for n in range(len(word) + 1):
        if _is_palindrome(word[:n]):
            out.append(word[:n])
            if len(out) == count:
                return out
    raise DomainError(f"word has only {len(out)} palindromic prefixes, {count} requested")


def palindrome_ladder(s: SeqSpec, a: int, b: int, count: int) -> List[Word]:
    """Palindromic prefixes from the closed form.

    The list is: the empty word, ``b, ..., b^{s_1-1}``, then the words
    ``(w_k^{l+1} w_{k-1})'`` for ``k >= 1`` and ``0 <= l < s_{k+1}``, where the
    prime removes the last two letters.  Entry ``i`` is the palindrome indexed
    by ``i`` for the index function psi of ``s``.
    """
    out: List[Word] = [(b,) * j for j in range(s(1))]
    words = [sturmian_word(s, a, b, 0), sturmian_word(s, a, b, 1)]
    k = 1
    while len(out) < count:
        if len(words) <= k + 1:
            words.append(words[k] * s(k + 1) + words[k - 1])
        for ell in range(s(k + 1)):
            candidate = (words[k] * (ell + 1) + words[k - 1])[:-2]
            if not out or len(candidate) > len(out[-1]):
                out.append(candidate)
        k += 1
    return out[:count]


def phi_morphism(word: Iterable[int]) -> Mat2:
    """Product of the matrices ``[[x, 1], [1, 0]]`` over the letters x of the word."""
    m = IDENTITY
    for x in word:
        m = m * Mat2(x, 1, 1, 0)
    return m
