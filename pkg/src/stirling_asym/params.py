"""Derived parameters of the (n, k) regime and the nonlinear solvers around them."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import factorial

import mpmath
from mpmath import mpf

from .errors import DomainError, NonConvergenceError
from .special import DEFAULT_CONFIG, SolverConfig, lambert_w, tree_t


@dataclass(frozen=True)
class CentralParams:
    """Everything the expansions need to know about ``(n, k)``, at working precision."""

    n: int
    k: int
    rho: mpf
    rho_star: mpf
    lam: mpf
    lam_b: mpf
    lam_e_prime: mpf
    big_lambda: mpf
    omega: mpf

    @property
    def x_binomial(self) -> mpf:
        """``lambda / k``, the binomial-kind parameter around ``lambda``."""
        return self.lam / self.k


def central_params(n: int, k: int) -> CentralParams:
    if k < 1 or k > n:
        raise DomainError(f"need 1 <= k <= n, got n={n}, k={k}")
    rho = mpf(n) / k
    lam = k * mpmath.exp(-rho)
    # (1 - 1/k)^n via log1p keeps full relative accuracy for large k.
    lam_b = k * mpmath.exp(n * mpmath.log1p(-mpf(1) / k)) if k > 1 else mpf(0)
    lam_e = k * mpmath.exp(-rho + mpf(1) / (2 * k) - mpf(1) / (12 * k * k))
    return CentralParams(
        n=n,
        k=k,
        rho=rho,
        rho_star=mpf(n + 1) / k,
        lam=lam,
        lam_b=lam_b,
        lam_e_prime=lam_e,
        big_lambda=lam / (k - lam),
        omega=lambert_w(n),
    )


def lambda_alpha(p: CentralParams, alpha) -> mpf:
    """``k exp(-n/k - alpha/k)``: the shifted Poisson parameter."""
    return p.k * mpmath.exp(-p.rho - mpf(alpha) / p.k)


def log_inv_one_minus(k: int) -> mpf:
    """``log(1 / (1 - 1/k))``; infinite at ``k = 1``."""
    if k <= 1:
        raise DomainError("log(1/(1-1/k)) is infinite at k = 1")
    return -mpmath.log1p(-mpf(1) / k)


# ---------------------------------------------------------------------------
# Saddle point


@dataclass(frozen=True)
class SaddleSolution:
    R: mpf
    V: mpf
    residual: mpf


def lagrange_saddle(rho_star, terms: int) -> mpf:
    """Truncated Lagrange series ``rho* - sum_{j<=terms} j^(j-1)/j! rho*^j e^(-j rho*)``."""
    r = mpf(rho_star)
    z = r * mpmath.exp(-r)
    acc = mpf(0)
    for j in range(1, terms + 1):
        acc += mpf(j) ** (j - 1) / factorial(j) * z**j
    return r - acc


def solve_saddle(n: int, k: int, cfg: SolverConfig = DEFAULT_CONFIG) -> SaddleSolution:
    """Positive root of ``rho*(1 - e^{-R}) = R`` with ``rho* = (n+1)/k``."""
    if n < 0 or k < 1 or k > n + 1:
        raise DomainError(f"need 1 <= k <= n+1, got n={n}, k={k}")
    rs = mpf(n + 1) / k
    if k == n + 1:
        return SaddleSolution(mpf(0), mpf(0), mpf(0))

    def phi(r):
        return rs * (-mpmath.expm1(-r)) - r

    # For k <= n we have rho* > 1, and phi(rho* - 1) >= 0 > phi(rho*).
    lo, hi = rs - 1, rs
    tol = cfg.tolerance()
    r = lagrange_saddle(rs, 8) if rs >= 3 else (lo + hi) / 2
    if not lo < r < hi:
        r = (lo + hi) / 2
    for _ in range(cfg.max_iterations * 2):
        f = phi(r)
        if f > 0:
            lo = r
        else:
            hi = r
        df = rs * mpmath.exp(-r) - 1
        nxt = r - f / df if df != 0 else (lo + hi) / 2
        if not lo < nxt < hi:
            nxt = (lo + hi) / 2
        if abs(nxt - r) <= tol * max(abs(r), mpf(1)) * mpf("1e-3") or hi - lo <= tol * hi * mpf("1e-3"):
            r = nxt
            break
        r = nxt
    else:
        raise NonConvergenceError(f"saddle solver stalled at n={n}, k={k}")
    return SaddleSolution(r, (n + 1) * (r + 1 - rs), abs(phi(r)))


# ---------------------------------------------------------------------------
# Error-reduced lambda parameters


class StarFamily(str, Enum):
    EE = "ee"
    BB = "bb"
    BE = "be"
    EB = "eb"
    HAT = "hat"


@dataclass(frozen=True)
class LambdaStar:
    family: StarFamily
    value: mpf
    defining_residual: mpf


def _hat_rhs(p: CentralParams, x: mpf) -> mpf:
    rho, k = p.rho, p.k
    first = (rho - (rho + 1) * x) / (2 * k)
    second = (8 * rho + 6 * rho * (rho - 2) * x - (rho - 1) * (3 * rho + 1) * x * x) / (24 * k * k)
    return p.lam * mpmath.exp(-first - second)


def _solve_hat(p: CentralParams, cfg: SolverConfig) -> mpf:
    tol = cfg.tolerance()
    x = p.lam
    damping = mpf(1)
    prev_res = None
    for _ in range(200):
        target = _hat_rhs(p, x)
        res = abs(target - x)
        if prev_res is not None and res > prev_res:
            damping /= 2
        prev_res = res
        nxt = x + damping * (target - x)
        if abs(nxt - x) <= tol * abs(nxt):
            return nxt
        x = nxt
    raise NonConvergenceError(
        f"hat-lambda iteration did not settle at n={p.n}, k={p.k}"
    )


def star_equation_rhs(p: CentralParams, family: StarFamily | str, x) -> mpf:
    """Right-hand side of the fixed-point equation ``x = F(x)`` of each family."""
    family = StarFamily(family)
    x = mpf(x)
    rho, k = p.rho, p.k
    if family is StarFamily.EE:
        return k * mpmath.exp(-rho - rho / (2 * k) + (rho + 1) * x / (2 * k))
    if family is StarFamily.BE:
        return k * mpmath.exp(-rho + (x - 1) * rho / (2 * k))
    if family is StarFamily.HAT:
        return _hat_rhs(p, x)
    L = log_inv_one_minus(k)
    if family is StarFamily.BB:
        return k * mpmath.exp(-L * (p.n - x * rho / 2))
    return k * mpmath.exp(-L * (p.n - (rho + 1) * x / 2))


def solve_lambda_star(
    p: CentralParams, family: StarFamily | str, cfg: SolverConfig = DEFAULT_CONFIG
) -> LambdaStar:
    """Shifted parameter that removes the leading correction of a family."""
    family = StarFamily(family)
    rho, k = p.rho, p.k
    if family is StarFamily.EE:
        z = (rho + 1) * mpmath.exp(-rho - rho / (2 * k)) / 2
        value = 2 * k / (rho + 1) * tree_t(z, cfg)
    elif family is StarFamily.BE:
        z = rho / 2 * mpmath.exp(-rho - rho / (2 * k))
        value = 2 * mpf(k) ** 2 / p.n * tree_t(z, cfg)
    elif family is StarFamily.HAT:
        value = _solve_hat(p, cfg)
    else:
        L = log_inv_one_minus(k)
        c = rho if family is StarFamily.BB else rho + 1
        value = 2 / (c * L) * tree_t(c * L * p.lam_b / 2, cfg)
    resid = abs(star_equation_rhs(p, family, value) - value) / value
    return LambdaStar(family, value, resid)
