from fractions import Fraction
from math import comb, factorial

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mpf

from stirling_asym.errors import DomainError, ResourceLimitError
from stirling_asym.exact import (
    bell_numbers,
    coupon_covered,
    exact_moment,
    iter_stirling_rows,
    normalized_s,
    sieve_profile,
    stirling2_sieve,
    stirling2_table,
    stirling_mode,
    stirling_row,
)


def set_partitions(items):
    """Every set partition of ``items``, by brute force."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def brute_counts(n):
    counts = [0] * (n + 1)
    for part in set_partitions(list(range(n))):
        counts[len(part)] += 1
    return counts


TABLE = stirling2_table(60)


def test_enumeration_oracle_small_rows():
    assert brute_counts(4)[2] == 7
    for n in range(1, 8):
        assert list(TABLE.row(n)) == brute_counts(n)


def test_degenerate_conventions():
    assert TABLE(0, 0) == 1
    assert all(TABLE(n, 0) == 0 for n in range(1, 10))
    assert TABLE(5, 7) == 0
    assert all(TABLE(n, 1) == 1 and TABLE(n, n) == 1 for n in range(1, 61))


def test_recurrence_matches_sieve_up_to_60():
    for n in range(1, 61):
        for k in range(1, n + 1):
            assert TABLE(n, k) == stirling2_sieve(n, k)


def test_row_sums_are_bell_numbers():
    bells = bell_numbers(60)
    assert bells[:6] == [1, 1, 2, 5, 15, 52]
    for n in range(61):
        assert sum(TABLE.row(n)) == bells[n]
        assert all(bells[n] >= v for v in TABLE.row(n))


def test_iterated_rows_match_table():
    for n, row in enumerate(iter_stirling_rows(30)):
        assert list(row) == list(TABLE.row(n))


def test_budget_is_enforced():
    with pytest.raises(ResourceLimitError):
        stirling2_table(10, budget=5)
    with pytest.raises(ResourceLimitError):
        bell_numbers(10, budget=5)


def test_normalized_values():
    # 0.11278...: the anchor is quoted truncated to four decimals.
    assert 0.1127 <= float(normalized_s(20, 11)) < 0.1128
    assert abs(float(normalized_s(200, 70)) - 0.01149) < 1e-5
    for n in range(1, 12):
        assert normalized_s(n, n) == Fraction(factorial(n), n**n)
    with pytest.raises(DomainError):
        normalized_s(5, 0)
    with pytest.raises(DomainError):
        normalized_s(5, 6)


def test_sieve_profile_anchor_values():
    prof = sieve_profile(20, 11)
    expected = [1.6351, 0.99394, 0.28277, 0.039140]
    for j, want in enumerate(expected, start=1):
        assert float(prof.terms[j]) == pytest.approx(want, rel=5e-5)
    assert prof.terms[0] == 1
    prof = sieve_profile(200, 70)
    assert prof.j_star == 3
    assert float(prof.terms[3]) == pytest.approx(8.5833, rel=1e-4)
    assert prof.terms[3] / prof.total > 746


def test_bonferroni_and_uniform_bound_up_to_60():
    for n in range(1, 61):
        for k in range(1, n + 1):
            prof = sieve_profile(n, k)
            assert prof.total == normalized_s(n, k)
            for j in range(1, k + 1):
                assert abs(prof.total - prof.partial_sums[j - 1]) <= prof.terms[j]
            assert TABLE(n, k) * factorial(k) <= k**n


def _peak_shape(terms):
    j = max(range(len(terms)), key=lambda i: terms[i])
    rising = all(terms[i] < terms[i + 1] for i in range(j))
    falling = all(terms[i] > terms[i + 1] for i in range(j, len(terms) - 1))
    return j, rising and falling


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 80).flatmap(lambda n: st.tuples(st.just(n), st.integers(2, n))))
def test_sieve_terms_unimodal(nk):
    n, k = nk
    prof = sieve_profile(n, k)
    # Ties can only occur at the final zero term b(k) = 0 when j reaches k.
    terms = prof.terms[:-1] if prof.terms[-1] == 0 else prof.terms
    j, single_peak = _peak_shape(list(terms))
    assert single_peak
    if prof.terms[1] <= prof.terms[0]:
        assert j == 0


def test_max_term_tracks_lambda():
    # With k near (2 - eps) n / log n the peak index sits within about one of lambda.
    for n in (1000, 2000, 4000):
        k = int(mpf("1.9") * n / mpmath.log(n))
        lam = k * mpmath.exp(-mpf(n) / k)
        prof = sieve_profile(n, k)
        assert abs(prof.j_star - lam) < 2
        assert abs(prof.j_star / lam - 1) < 2 / lam


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 400), st.floats(0, 1))
def test_bai_inequality(n, t):
    t = mpf(t)
    lhs = abs((1 - t) ** n - mpmath.exp(-n * t))
    assert lhs <= n * t**2 * mpmath.exp(-n * t) + mpf(10) ** -45


def test_coupon_collector_values():
    assert abs(float(coupon_covered(85, 90, 5)) - 0.4890990163) < 5e-11
    assert abs(float(coupon_covered(86, 90, 5)) - 0.5093098536) < 5e-11
    assert coupon_covered(20, 11, 1) == normalized_s(20, 11)
    assert all(coupon_covered(n, 6, 6) == 1 for n in range(1, 5))
    with pytest.raises(DomainError):
        coupon_covered(3, 4, 5)


@pytest.mark.parametrize("k,s", [(5, 1), (6, 2), (8, 3), (10, 4)])
def test_coupon_monotone_in_stages(k, s):
    probs = [coupon_covered(n, k, s) for n in range(0, 40)]
    assert all(a <= b for a, b in zip(probs, probs[1:]))


def test_exact_moments():
    assert exact_moment(3, 1) == 2
    assert exact_moment(3, 0) == 1
    assert exact_moment(3, 2, centered=True) == Fraction(2, 5)
    bells = bell_numbers(102)
    assert exact_moment(10, 1) + 1 == Fraction(bells[11], bells[10])
    for n in range(1, 101):
        mean = exact_moment(n, 1)
        var = exact_moment(n, 2, centered=True)
        assert mean == Fraction(bells[n + 1], bells[n]) - 1
        assert var == Fraction(bells[n + 2], bells[n]) - Fraction(bells[n + 1], bells[n]) ** 2 - 1
    with pytest.raises(DomainError):
        exact_moment(0, 1)


def test_mode():
    for n in (10, 50, 100, 300):
        row = stirling_row(n)
        assert row[stirling_mode(n)] == max(row)
    assert stirling_mode(1000) == 189


def test_sieve_binomial_form():
    n, k = 30, 12
    direct = sum((-1) ** j * comb(k, j) * (k - j) ** n for j in range(k + 1)) // factorial(k)
    assert stirling2_sieve(n, k) == direct
