import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf

from stirling_asym.errors import DomainError, NonConvergenceError
from stirling_asym.special import (
    SolverConfig,
    default_tolerance,
    lambert_w,
    log_factorial,
    normal_cdf,
    normal_pdf,
    tree_t,
    working_digits,
)


def bisect(f, lo, hi, steps=200):
    lo, hi = mpf(lo), mpf(hi)
    for _ in range(steps):
        mid = (lo + hi) / 2
        if f(lo) * f(mid) <= 0:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def test_w_trivial_points():
    assert lambert_w(0) == 0
    assert abs(lambert_w(mp.e) - 1) < mpf(10) ** -45
    assert abs(lambert_w(-mpmath.exp(-1)) + 1) < mpf(10) ** -20


def test_w_omega_constant_against_bisection():
    oracle = bisect(lambda w: w * mpmath.exp(w) - 1, 0, 1)
    assert abs(lambert_w(1) - oracle) < mpf(10) ** -45
    assert mpmath.nstr(lambert_w(1), 10) == "0.5671432904"


def test_w_residual_on_log_grid():
    tol = default_tolerance()
    for m in range(-10, 11):
        for mant in ("1", "3.7"):
            x = mpf(mant) * mpf(10) ** m
            w = lambert_w(x)
            assert w >= 0
            assert abs(w * mpmath.exp(w) - x) <= tol * max(x, 1)


def test_w_asymptotic_two_terms():
    gaps = []
    for m in range(3, 16):
        x = mpf(10) ** m
        lx = mpmath.log(x)
        approx = mpmath.log(x / lx) + mpmath.log(lx) / lx
        gaps.append(abs(lambert_w(x) - approx))
    # The next term is O((loglog x / log x)^2), so the decay is slow and only
    # settles into a monotone tail once x is large.
    assert max(gaps) < 0.01
    tail = gaps[4:]
    assert all(b < a for a, b in zip(tail, tail[1:]))


def test_w_domain_and_iteration_limit():
    with pytest.raises(DomainError):
        lambert_w(-1)
    with pytest.raises(NonConvergenceError):
        lambert_w(mpf(10) ** 10, SolverConfig(max_iterations=1))


def test_solver_config_validation():
    with pytest.raises(DomainError):
        SolverConfig(max_iterations=0)
    with pytest.raises(DomainError):
        SolverConfig(rel_tolerance=2)
    assert SolverConfig(rel_tolerance="1e-20").tolerance() == mpf("1e-20")


def test_tree_endpoints_and_series_oracle():
    assert tree_t(0) == 0
    assert tree_t(mpmath.exp(-1)) == 1
    with working_digits(30):
        z = mpf("0.1")
        series = mpmath.fsum(mpf(j) ** (j - 1) / mpmath.factorial(j) * z**j for j in range(1, 80))
        assert abs(tree_t(z) - series) < mpf(10) ** -27


def test_tree_domain():
    with pytest.raises(DomainError):
        tree_t(-0.01)
    with pytest.raises(DomainError):
        tree_t(0.4)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 0.367))
def test_tree_is_minus_w_of_minus_z(z):
    t = tree_t(z)
    assert 0 <= t <= 1
    assert abs(t - mpf(z) * mpmath.exp(t)) < mpf(10) ** -40
    assert abs(t + lambert_w(-mpf(z))) < mpf(10) ** -40


def test_phi_values():
    assert normal_cdf(0) == mpf(1) / 2
    oracle = mpf(1) / 2 + mpmath.quad(normal_pdf, [0, 1])
    assert abs(normal_cdf(1) - oracle) < mpf(10) ** -40
    assert mpmath.nstr(normal_cdf(1), 10) == "0.8413447461"


@settings(max_examples=60, deadline=None)
@given(st.floats(-40, 40))
def test_phi_symmetry(x):
    assert abs(normal_cdf(x) + normal_cdf(-x) - 1) < mpf(10) ** -45


def test_phi_monotone_and_derivative():
    grid = [mpf(i) / 4 for i in range(-40, 41)]
    vals = [normal_cdf(x) for x in grid]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    with working_digits(30):
        h = mpf(10) ** -6
        for x in (-3, -1, 0, 0.5, 2):
            fd = (normal_cdf(x + h) - normal_cdf(x - h)) / (2 * h)
            assert abs(fd - normal_pdf(x)) < mpf(10) ** -8


def test_log_factorial():
    assert log_factorial(0) == 0
    assert log_factorial(1) == 0
    assert abs(log_factorial(10) - mpmath.log(3628800)) < mpf(10) ** -45
    big = 25000
    assert abs(log_factorial(big) - mpmath.loggamma(big + 1)) < mpf(10) ** -40
    assert abs(log_factorial(500) - mpmath.log(mpf(math.factorial(500)))) < mpf(10) ** -40
    with pytest.raises(DomainError):
        log_factorial(-1)


def test_working_digits_floor():
    with pytest.raises(DomainError):
        with working_digits(10):
            pass
    with working_digits(20):
        assert mp.dps == 20
