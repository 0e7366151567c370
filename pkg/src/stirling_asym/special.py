"""Scalar kernel at configurable precision: Lambert W, tree function, Phi, log k!.

All reals are ``mpmath.mpf`` values at the ambient ``mp.dps``.  Callers pick the
precision with :func:`working_digits` (a thin wrapper over ``mp.workdps``).
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass

import mpmath
from mpmath import mp, mpf

from .errors import DomainError, NonConvergenceError

DEFAULT_DIGITS = 50


@contextmanager
def working_digits(digits: int):
    """Run a block at ``digits`` decimal digits (minimum 15)."""
    if digits < 15:
        raise DomainError(f"precision must be >= 15 digits, got {digits}")
    with mp.workdps(digits):
        yield


def default_tolerance(digits: int | None = None) -> mpf:
    d = mp.dps if digits is None else digits
    return mpf(10) ** (-(d - 5))


@dataclass(frozen=True)
class SolverConfig:
    """Stopping rule shared by the iterative solvers.

    ``rel_tolerance`` of ``None`` means "derive from the working precision at
    call time", which is what nearly every caller wants.
    """

    rel_tolerance: object = None
    max_iterations: int = 100

    def __post_init__(self):
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be >= 1")
        if self.rel_tolerance is not None:
            tol = mpf(self.rel_tolerance)
            if not 0 < tol < 1:
                raise DomainError("rel_tolerance must lie in (0, 1)")

    def tolerance(self) -> mpf:
        if self.rel_tolerance is None:
            return default_tolerance()
        return mpf(self.rel_tolerance)


DEFAULT_CONFIG = SolverConfig()


def _initial_w(x: mpf) -> mpf:
    e = mp.e
    if x > e:
        lx = mpmath.log(x)
        return lx - mpmath.log(lx)
    if x < mpf("0.25") and x > -mpf("0.25"):
        # W(x) = x - x^2 + 3x^3/2 - 8x^4/3 + ...
        return x - x**2 + mpf(3) / 2 * x**3 - mpf(8) / 3 * x**4
    if x < 0:
        # Branch-point series in p = sqrt(2(ex + 1)).
        p = mpmath.sqrt(2 * (e * x + 1))
        return -1 + p - p**2 / 3 + mpf(11) / 72 * p**3
    return mpmath.log1p(x) * mpf("0.8")


def lambert_w(x, cfg: SolverConfig = DEFAULT_CONFIG) -> mpf:
    """Principal real branch of Lambert W, by Halley iteration."""
    x = mpf(x)
    minus_inv_e = -mpmath.exp(-1)
    if x < minus_inv_e:
        # Allow a hair of rounding slack at the branch point.
        if minus_inv_e - x > mpf(10) ** (-(mp.dps - 3)):
            raise DomainError(f"Lambert W undefined for x < -1/e (x={mpmath.nstr(x, 10)})")
        return mpf(-1)
    if x == 0:
        return mpf(0)
    if abs(x - minus_inv_e) <= mpf(10) ** (-(mp.dps - 3)):
        return mpf(-1)
    tol = cfg.tolerance()
    w = _initial_w(x)
    for _ in range(cfg.max_iterations):
        ew = mpmath.exp(w)
        f = w * ew - x
        wp1 = w + 1
        if wp1 == 0:
            return w
        step = f / (ew * wp1 - (w + 2) * f / (2 * wp1))
        w -= step
        if abs(step) <= tol * max(abs(w), mpf(1)) * mpf("1e-3"):
            return w
    ew = mpmath.exp(w)
    if abs(w * ew - x) <= tol * max(abs(x), mpf(1)):
        return w
    raise NonConvergenceError(f"Lambert W did not converge at x={mpmath.nstr(x, 15)}")


def tree_t(z, cfg: SolverConfig = DEFAULT_CONFIG) -> mpf:
    """Cayley tree function ``T(z) = -W(-z)`` on ``[0, 1/e]``."""
    z = mpf(z)
    inv_e = mpmath.exp(-1)
    slack = mpf(10) ** (-(mp.dps - 3))
    if z < 0 or z > inv_e + slack:
        raise DomainError(
            f"tree function argument {mpmath.nstr(z, 12)} outside [0, 1/e]"
        )
    if z >= inv_e - slack:
        return mpf(1)
    return -lambert_w(-z, cfg)


def normal_cdf(x) -> mpf:
    """Standard normal distribution function."""
    x = mpf(x)
    return mpmath.erfc(-x / mpmath.sqrt(2)) / 2


def normal_pdf(x) -> mpf:
    x = mpf(x)
    return mpmath.exp(-x * x / 2) / mpmath.sqrt(2 * mp.pi)


#: Arguments up to this use the exact integer factorial.
LOG_FACTORIAL_EXACT_MAX = 20000


def log_factorial(k: int) -> mpf:
    """``ln(k!)``; exact factorial then log inside the table range."""
    if k < 0:
        raise DomainError("log_factorial needs k >= 0")
    if k <= 1:
        return mpf(0)
    if k <= LOG_FACTORIAL_EXACT_MAX:
        return mpmath.log(mpf(math.factorial(k)))
    return mpmath.loggamma(k + 1)
