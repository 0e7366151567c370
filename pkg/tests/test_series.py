from fractions import Fraction
from math import factorial

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stirling_asym.errors import DomainError
from stirling_asym.series import (
    FAMILIES,
    ONE,
    BivarPoly,
    bernoulli,
    family_coeffs,
    j_poly,
    poly_eval,
    power_sum_poly,
    series_exp,
    tau_poly,
)

F = Fraction


def P(d):
    return BivarPoly.from_dict({key: F(v) for key, v in d.items()})


def test_bivar_arithmetic():
    a = P({(1, 0): 1, (0, 1): 2})  # j + 2w
    b = P({(1, 0): 1, (0, 0): -1})  # j - 1
    prod = a * b
    assert prod(3, 5) == (3 + 10) * 2
    assert (a - a).is_zero()
    assert (a + b)(2, 1) == 4 + 1
    assert prod.degree_j() == 2 and prod.degree_w() == 1
    assert prod.at_w(F(1, 2)).j_coefficients() == [-1, 0, 1]
    with pytest.raises(DomainError):
        prod.j_coefficients()


def test_series_exp_of_linear_log():
    # exp(j t) = sum j^m t^m / m!
    logs = [BivarPoly(), P({(1, 0): 1})]
    out = series_exp(logs, 5)
    for m, c in enumerate(out):
        assert c == P({(m, 0): F(1, factorial(m))})


def test_bernoulli_convention():
    assert bernoulli(0) == 1
    assert bernoulli(1) == F(-1, 2)
    assert bernoulli(2) == F(1, 6)
    assert bernoulli(3) == 0


@pytest.mark.parametrize("r", range(0, 7))
def test_power_sums(r):
    poly = power_sum_poly(r)
    for j in range(0, 12):
        assert poly(j, 0) == sum(l**r for l in range(j))


@pytest.mark.parametrize("family", FAMILIES)
def test_leading_coefficient_is_one(family):
    assert family_coeffs(family, 3)[0] == ONE


def _c(family, m, alpha=None):
    return family_coeffs(family, m, alpha)[m]


def test_first_coefficients():
    for j in range(8):
        for w in (F(1), F(7, 3), F(5)):
            assert _c("bb", 1)(j, w) == -w * j * (j - 1) / 2
            assert _c("be", 1)(j, w) == -w * j * j / 2
            for alpha in (F(0), F(1), F(-1, 2)):
                want = -F(j, 2) * ((w + 1) * j - 2 * alpha - 1)
                assert _c("ee", 1, alpha)(j, w) == want


def test_second_coefficients():
    for j in range(8):
        for w in (F(1), F(7, 3), F(5)):
            bb = w * j * (3 * w * j**3 - 2 * (3 * w + 4) * j**2 + 3 * w * j + 8) / 24
            be = w * j**3 * (3 * w * j - 8) / 24
            assert _c("bb", 2)(j, w) == bb
            assert _c("be", 2)(j, w) == be
            for alpha in (F(0), F(1), F(-1, 2), F(3, 7)):
                ee = F(j, 24) * (
                    3 * (w + 1) ** 2 * j**3
                    - 2 * (6 * (w + 1) * alpha + 7 * w + 5) * j**2
                    + 3 * (4 * alpha**2 + 4 * alpha + 3) * j
                    - 2
                )
                assert _c("ee", 2, alpha)(j, w) == ee


def _mp(q):
    return mpmath.mpf(q.numerator) / q.denominator


def _product_oracle(family, j, w, t):
    """The defining ratio of each family evaluated directly (w, t rational, j small)."""
    j, w, t = mpmath.mpf(j), _mp(w), _mp(t)
    base = (1 - j * t) ** (w / t)
    if family in ("bb", "eb"):
        base *= (1 - t) ** (-j * w / t)
    else:
        base *= mpmath.exp(j * w)
    if family in ("ee", "eb"):
        base *= mpmath.fprod(1 - l * t for l in range(1, int(j)))
    return base


@pytest.mark.parametrize("family", FAMILIES)
def test_series_matches_defining_ratio(family):
    # Truncation error at order 5 must shrink like t^6.
    coeffs = family_coeffs(family, 5)
    j, w = 3, F(5, 2)
    errs = []
    for t in (F(1, 200), F(1, 400)):
        approx = sum(c(j, w) * t**m for m, c in enumerate(coeffs.coeffs))
        errs.append(abs(_product_oracle(family, j, w, t) - _mp(approx)))
    assert errs[1] < errs[0] / 40


@pytest.mark.parametrize("family", FAMILIES)
def test_degree_bounds(family):
    coeffs = family_coeffs(family, 6)
    for m, c in enumerate(coeffs.coeffs):
        assert c.degree_j() <= 2 * m
        assert c.degree_w() <= m


def test_alpha_only_for_ee():
    with pytest.raises(DomainError):
        family_coeffs("bb", 2, F(1))
    with pytest.raises(DomainError):
        family_coeffs("xx", 2)
    with pytest.raises(DomainError):
        family_coeffs("ee", -1)


def test_tau_values():
    assert tau_poly(0) == (1,)
    assert tau_poly(1) == (0,)
    assert tau_poly(2) == (0, -1)
    assert tau_poly(4) == (0, -6, 3)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 12), st.integers(0, 30))
def test_tau_against_taylor_coefficients(m, n):
    # (e^x (1 - x))^n expanded by repeated series multiplication.
    base = [F(1, factorial(i)) - (F(1, factorial(i - 1)) if i else 0) for i in range(m + 1)]
    acc = [F(1)] + [F(0)] * m
    for _ in range(n):
        acc = [sum(acc[i] * base[d - i] for i in range(d + 1)) for d in range(m + 1)]
    assert poly_eval(tau_poly(m), n) == acc[m] * factorial(m)
    assert len(tau_poly(m)) - 1 == m // 2 or m == 1


def test_j_polynomials():
    assert j_poly(0) == (1,)
    assert j_poly(1) == (F(4, 3), F(1))
    assert j_poly(2) == (F(9, 6), F(12, 6), F(8, 6))
    for h in range(6):
        assert len(j_poly(h)) == h + 1
