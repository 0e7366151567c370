"""Exact big-integer/rational computation of Stirling numbers and friends.

Everything here is exact: the sieve sums are evaluated over Python integers,
so the catastrophic cancellation of the alternating sum never enters.  These
values serve as the oracle for every approximation in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Iterator, Sequence

from .errors import DomainError, ResourceLimitError

#: Largest ``n_max`` accepted by :func:`stirling2_table` and :func:`bell_numbers`.
MEMORY_BUDGET_N = 5000


def _check_budget(n_max: int, budget: int | None) -> None:
    limit = MEMORY_BUDGET_N if budget is None else budget
    if n_max > limit:
        raise ResourceLimitError(f"n_max={n_max} exceeds memory budget {limit}")


def _check_nk(n: int, k: int) -> None:
    if k < 1 or k > n:
        raise DomainError(f"need 1 <= k <= n, got n={n}, k={k}")


# ---------------------------------------------------------------------------
# Triangle


def iter_stirling_rows(n_max: int) -> Iterator[list[int]]:
    """Yield rows ``[S2(n,0), ..., S2(n,n)]`` for ``n = 0..n_max``.

    Only one row is alive at a time, so this is the way to stream large ``n``.
    """
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    row = [1]
    yield row
    for n in range(1, n_max + 1):
        new = [0] * (n + 1)
        for k in range(1, n):
            new[k] = k * row[k] + row[k - 1]
        new[n] = 1
        row = new
        yield row


@dataclass(frozen=True)
class StirlingTriangle:
    """Immutable table of ``S2(n, k)`` for ``0 <= k <= n <= n_max``."""

    n_max: int
    rows: tuple[tuple[int, ...], ...]

    def __call__(self, n: int, k: int) -> int:
        if n < 0 or n > self.n_max:
            raise DomainError(f"n={n} outside table range 0..{self.n_max}")
        if k < 0 or k > n:
            return 0
        return self.rows[n][k]

    def row(self, n: int) -> tuple[int, ...]:
        return self.rows[n]

    def row_sum(self, n: int) -> int:
        return sum(self.rows[n])


def stirling2_table(n_max: int, budget: int | None = None) -> StirlingTriangle:
    """Build the full triangle by the recurrence ``S2(n,k) = k S2(n-1,k) + S2(n-1,k-1)``."""
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    _check_budget(n_max, budget)
    rows = tuple(tuple(r) for r in iter_stirling_rows(n_max))
    return StirlingTriangle(n_max, rows)


@lru_cache(maxsize=8)
def stirling_row(n: int) -> tuple[int, ...]:
    """Row ``n`` of the triangle (streamed; rows below ``n`` are discarded)."""
    if n < 0:
        raise DomainError("n must be >= 0")
    row: Sequence[int] = ()
    for row in iter_stirling_rows(n):
        pass
    return tuple(row)


@lru_cache(maxsize=64)
def _small_stirling_table(m_max: int) -> StirlingTriangle:
    return stirling2_table(m_max)


def stirling2_small(m: int, l: int) -> int:
    """``S2(m, l)`` for small ``m``; cached, used by coefficient reductions."""
    size = 64
    while size < m:
        size *= 2
    return _small_stirling_table(size)(m, l)


# ---------------------------------------------------------------------------
# Sieve sums


def sieve_numerator(n: int, k: int, powers: Sequence[int] | None = None) -> int:
    """``sum_j (-1)^j C(k,j) (k-j)^n``, i.e. ``k! * S2(n,k)``.

    ``powers[m]`` may supply ``m**n`` to share work across many ``k``.
    """
    total = 0
    for j in range(k + 1):
        p = powers[k - j] if powers is not None else (k - j) ** n
        term = comb(k, j) * p
        total += -term if j & 1 else term
    return total


def stirling2_sieve(n: int, k: int) -> int:
    """``S2(n, k)`` straight from the inclusion-exclusion formula."""
    if n < 0 or k < 0:
        raise DomainError("n and k must be >= 0")
    if k > n:
        return 0
    if k == 0:
        return 1 if n == 0 else 0
    num = sieve_numerator(n, k)
    f = 1
    for i in range(2, k + 1):
        f *= i
    q, r = divmod(num, f)
    assert r == 0
    return q


def normalized_s(n: int, k: int) -> Fraction:
    """``S(n,k) = S2(n,k) k! / k^n``: the probability ``n`` balls cover ``k`` bins."""
    _check_nk(n, k)
    return Fraction(sieve_numerator(n, k), k**n)


def normalized_s_many(n: int, ks: Iterable[int]) -> dict[int, Fraction]:
    """:func:`normalized_s` for many ``k`` at one ``n``, sharing ``m**n``."""
    ks = sorted(set(ks))
    if not ks:
        return {}
    for k in ks:
        _check_nk(n, k)
    powers = [m**n for m in range(ks[-1] + 1)]
    return {k: Fraction(sieve_numerator(n, k, powers), powers[k]) for k in ks}


@dataclass(frozen=True)
class SieveProfile:
    n: int
    k: int
    terms: tuple[Fraction, ...]
    partial_sums: tuple[Fraction, ...]
    j_star: int
    total: Fraction

    @property
    def lambda0(self) -> Fraction:
        """Ratio ``b(1)/b(0) = k (1 - 1/k)^n``."""
        return self.terms[1] / self.terms[0] if self.k >= 1 else Fraction(0)


def sieve_profile(n: int, k: int) -> SieveProfile:
    """All terms ``b(j) = C(k,j)(1-j/k)^n`` of the normalized sieve sum."""
    _check_nk(n, k)
    denom = k**n
    terms = tuple(Fraction(comb(k, j) * (k - j) ** n, denom) for j in range(k + 1))
    partial = []
    acc = Fraction(0)
    for j, b in enumerate(terms):
        acc += -b if j & 1 else b
        partial.append(acc)
    j_star = max(range(k + 1), key=lambda j: (terms[j], -j))
    return SieveProfile(n, k, terms, tuple(partial), j_star, partial[-1])


# ---------------------------------------------------------------------------
# Bell numbers, occupancy, moments


def bell_numbers(n_max: int, budget: int | None = None) -> list[int]:
    """``B_0 .. B_{n_max}`` via the Bell (Aitken) triangle."""
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    # Aitken rows hold O(n) integers, far below the triangle's footprint, so the
    # budget is checked against a wider limit.
    _check_budget(n_max, 8 * MEMORY_BUDGET_N if budget is None else budget)
    bells = [1]
    row = [1]
    for _ in range(n_max):
        new = [row[-1]]
        for x in row:
            new.append(new[-1] + x)
        row = new
        bells.append(row[0])
    return bells


def coupon_covered(n: int, k: int, s: int) -> Fraction:
    """Probability that ``n`` stages of ``s`` distinct coupons cover all ``k`` types."""
    if n < 0 or k < 1:
        raise DomainError("need n >= 0 and k >= 1")
    if s < 1 or s > k:
        raise DomainError(f"need 1 <= s <= k, got s={s}, k={k}")
    denom = comb(k, s) ** n
    num = 0
    for j in range(k + 1):
        term = comb(k, j) * comb(k - j, s) ** n
        num += -term if j & 1 else term
    return Fraction(num, denom)


def row_moment(row: Sequence[int], m: int, centered: bool = False) -> Fraction:
    """Moment of the block-count distribution given a full triangle row."""
    total = sum(row)
    if m == 0:
        return Fraction(1)
    if not centered:
        return Fraction(sum(k**m * v for k, v in enumerate(row) if v), total)
    # With mean A/B: sum (kB - A)^m v / B^(m+1), kept in integers.
    first = sum(k * v for k, v in enumerate(row))
    acc = sum((k * total - first) ** m * v for k, v in enumerate(row) if v)
    return Fraction(acc, total ** (m + 1))


def exact_moment(n: int, m: int, centered: bool = False) -> Fraction:
    """``E(X_n^m)`` or ``E((X_n - E X_n)^m)`` for a uniform random set partition."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if m < 0:
        raise DomainError("m must be >= 0")
    return row_moment(stirling_row(n), m, centered)


def stirling_mode(n: int) -> int:
    """Smallest ``k`` maximizing ``S2(n, k)``."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if n <= 200:
        row = stirling_row(n)
        return max(range(n + 1), key=lambda k: (row[k], -k))
    from math import log

    # Mode sits within O(1) of n / W(n); widen until the argmax is interior.
    w = log(n) - log(log(n))
    for _ in range(8):
        w = log(n / w)
    centre = round(n / w)
    half = 8
    while True:
        lo, hi = max(1, centre - half), min(n, centre + half)
        powers = [m**n for m in range(hi + 1)]
        fact = 1
        for i in range(2, lo):
            fact *= i
        vals = {}
        for k in range(lo, hi + 1):
            fact *= max(k, 1)
            vals[k] = sieve_numerator(n, k, powers) // fact
        best = max(vals, key=lambda k: (vals[k], -k))
        if lo < best < hi or best == lo == 1 or best == hi == n:
            return best
        half *= 2
