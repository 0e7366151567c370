"""Asymptotic approximations to the normalized Stirling number ``S(n, k)``.

Every approximation returns an :class:`ApproxResult`.  ``leading_error_estimate``
is always *relative*: an estimate of ``|S/f - 1|`` obtained from the size of the
first omitted term, so it is directly comparable with measured errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb, factorial

import mpmath
from mpmath import mp, mpf

from .errors import DomainError
from .exact import stirling2_small
from .params import (
    CentralParams,
    StarFamily,
    central_params,
    lambda_alpha,
    solve_lambda_star,
    solve_saddle,
)
from .series import BivarPoly, family_logs, j_poly, poly_eval, series_exp, tau_poly
from .special import DEFAULT_CONFIG, SolverConfig, lambert_w


@dataclass(frozen=True)
class ApproxResult:
    family: str
    order: int
    value: mpf
    leading_error_estimate: mpf
    in_validity_range: bool


def _log(x) -> mpf:
    return mpmath.log(mpf(x))


def fd_range(n: int, k: int) -> bool:
    """``n/log n <= k <= 2n/(log n + 6)``."""
    if n < 2:
        return False
    ln = _log(n)
    return n / ln <= k <= 2 * n / (ln + 6)


def pc_range(n: int, k: int) -> bool:
    """``n/W(n) <= k <= 2n/(log n + 6)``."""
    if n < 2:
        return False
    return n / lambert_w(n) <= k <= 2 * n / (_log(n) + 6)


def formal_range(n: int, k: int) -> bool:
    """``k <= 2n/(log n + 6)``; the upper edge shared by the formal families."""
    return k <= 2 * n / (_log(n) + 6) if n >= 1 else False


# ---------------------------------------------------------------------------
# Finite-difference expansion


def fd_differences(n: int, k: int, j_max: int, extra_digits: int | None = None) -> list[mpf]:
    """``D_{n,k}(0..j_max)``: forward differences of ``g(l) = (e^{l/k}(1 - l/k))^n``.

    The differences cancel heavily, so the table is built with ``5 * j_max``
    extra digits unless told otherwise.
    """
    if not 0 <= j_max <= k:
        raise DomainError(f"need 0 <= j <= k, got j={j_max}, k={k}")
    extra = 5 * j_max + 5 if extra_digits is None else extra_digits
    with mp.workdps(mp.dps + extra):
        g = []
        for l in range(j_max + 1):
            if l == k:
                g.append(mpf(0))
            else:
                g.append(mpmath.exp(n * (mpf(l) / k + mpmath.log1p(-mpf(l) / k))))
        out = [g[0]]
        row = g
        for _ in range(j_max):
            row = [row[i + 1] - row[i] for i in range(len(row) - 1)]
            out.append(row[0])
    return [+d for d in out]


def d_fd(n: int, k: int, j: int) -> mpf:
    """Single ``D_{n,k}(j)``."""
    return fd_differences(n, k, j)[j]


def _fd_terms(p: CentralParams, count: int) -> list[mpf]:
    """``C(k,j)(-Lambda)^j D(j)`` for ``j < count`` (capped at ``j <= k``)."""
    j_max = min(count - 1, p.k)
    diffs = fd_differences(p.n, p.k, j_max)
    return [comb(p.k, j) * (-p.big_lambda) ** j * diffs[j] for j in range(j_max + 1)]


def fd_expansion(n: int, k: int, s: int) -> ApproxResult:
    """Finite-difference expansion keeping the terms ``j < s``."""
    if s < 1:
        raise DomainError("s must be >= 1")
    p = central_params(n, k)
    terms = _fd_terms(p, s + 1)
    lead = (1 - p.lam / k) ** k
    body = sum(terms[:s], mpf(0))
    nxt = terms[s] if s < len(terms) else mpf(0)
    return ApproxResult("fd", s, lead * body, abs(nxt / body), fd_range(n, k))


def fd_identity(n: int, k: int) -> mpf:
    """The complete finite-difference sum over ``j <= k``; equals ``S(n,k)``."""
    with mp.workdps(mp.dps + 5 * k + 10):
        p = central_params(n, k)
        total = sum(_fd_terms(p, k + 1), mpf(0))
        value = (1 - p.lam / k) ** k * total
    return +value


# ---------------------------------------------------------------------------
# Poisson-Charlier expansion


def qbar(p: CentralParams, m: int) -> mpf:
    """``sum_l S2(m,l) C(k,l) l! (-Lambda)^l``."""
    if m < 0:
        raise DomainError("m must be >= 0")
    acc = mpf(0)
    falling = 1
    for l in range(0, min(m, p.k) + 1):
        if l:
            falling *= p.k - l + 1
        s2 = stirling2_small(m, l)
        if s2:
            acc += s2 * falling * (-p.big_lambda) ** l
    return acc


def _pc_term(p: CentralParams, m: int) -> mpf:
    tau = poly_eval(tau_poly(m), p.n)
    return tau * qbar(p, m) / (factorial(m) * mpf(p.k) ** m)


def pc_expansion(n: int, k: int, s1: int) -> ApproxResult:
    """Poisson-Charlier expansion keeping ``2 <= m < 2 s1``."""
    if s1 < 1:
        raise DomainError("s1 must be >= 1")
    p = central_params(n, k)
    lead = (1 - p.lam / k) ** k
    body = 1 + sum((_pc_term(p, m) for m in range(2, 2 * s1)), mpf(0))
    nxt = _pc_term(p, 2 * s1) + _pc_term(p, 2 * s1 + 1)
    return ApproxResult("pc", s1, lead * body, abs(nxt / body), pc_range(n, k))


def tau_values(n: int, m_max: int) -> list[int]:
    """``tau_0(n) .. tau_{m_max}(n)`` as exact integers."""
    out = [1, 0]
    for m in range(2, m_max + 1):
        out.append((m - 1) * (out[-1] - n * out[-2]))
    return out[: m_max + 1]


def pc_identity_terms(n: int, k: int, digits: int | None = None) -> int:
    """How many Taylor terms make the Poisson-Charlier identity exact to ``digits``."""
    digits = mp.dps if digits is None else digits
    # S(n,k) >= k!/k^n, and sum_j C(k,j) e^{-rho j} (j/k)^m <= (1 + e^{-rho})^k.
    log_floor = math.lgamma(k + 1) - n * math.log(k)
    log_mass = k * math.log1p(math.exp(-n / k))
    target = log_floor - (digits + 5) * math.log(10) - log_mass
    prev, cur = 1, 0  # tau_0, tau_1
    m = 1
    quiet = 0
    while True:
        m += 1
        prev, cur = cur, (m - 1) * (cur - n * prev)
        size = -math.inf if cur == 0 else math.log(abs(cur)) - math.lgamma(m + 1)
        if size < target and m > 2 * math.sqrt(n):
            quiet += 1
            if quiet >= 4:
                return m
        else:
            quiet = 0


def pc_identity_partial(n: int, k: int, m_max: int) -> mpf:
    """``sum_{m <= m_max} tau_m(n)/(m! k^m) sum_j C(k,j)(-e^{-rho})^j j^m``.

    Equals ``S(n,k)`` once the Taylor series of ``(e^x(1-x))^n`` has converged
    on ``[0, 1]``.  Working digits are raised to absorb the cancellation.
    """
    taus = tau_values(n, m_max)
    peak = max(
        (math.log(abs(t)) - math.lgamma(m + 1) for m, t in enumerate(taus) if t),
        default=0.0,
    )
    floor = math.lgamma(k + 1) - n * math.log(k)
    extra = int((max(peak, 0.0) - floor) / math.log(10)) + k + 15
    with mp.workdps(mp.dps + extra):
        coeffs = [mpf(t) / factorial(m) for m, t in enumerate(taus)]
        q = mpmath.exp(-mpf(n) / k)
        total = mpf(0)
        for j in range(k + 1):
            x = mpf(j) / k
            acc = mpf(0)
            for c in reversed(coeffs):
                acc = acc * x + c
            term = comb(k, j) * q**j * acc
            total += -term if j & 1 else term
    return +total


def pc_identity(n: int, k: int) -> mpf:
    return pc_identity_partial(n, k, pc_identity_terms(n, k))


# ---------------------------------------------------------------------------
# Alternating moments and the formal families


def reduced_moment(kind: str, coeffs, param, k: int | None = None) -> mpf:
    """Alternating sum of a j-polynomial with the leading factor divided out.

    ``binomial``: ``sum_j C(k,j)(-x)^j poly(j) / (1-x)^k``
    ``poisson``:  ``sum_j (-y)^j/j! poly(j) / e^{-y}``
    """
    param = mpf(param)
    if kind == "binomial":
        if k is None:
            raise DomainError("binomial moments need k")
        u = -param / (1 - param)
    elif kind == "poisson":
        u = -param
    else:
        raise DomainError(f"unknown moment kind {kind!r}")
    total = mpf(0)
    for m, a in enumerate(coeffs):
        if not a:
            continue
        acc = mpf(0)
        weight = mpf(1)
        for l in range(m + 1):
            if l:
                weight *= u * ((k - l + 1) if kind == "binomial" else 1)
            if kind == "binomial" and l > k:
                break
            s2 = stirling2_small(m, l)
            if s2:
                acc += s2 * weight
        total += a * acc
    return total


def alternating_moment(kind: str, p: CentralParams, poly: BivarPoly, param=None) -> mpf:
    """Closed-form ``sum_j`` of ``poly(j)`` against binomial or Poisson alternating weights.

    The default parameter is ``lambda/k`` (binomial) or ``lambda`` (Poisson); any
    ``w`` in ``poly`` is read as ``rho``.
    """
    if param is None:
        param = p.lam / p.k if kind == "binomial" else p.lam
    param = mpf(param)
    coeffs = poly.at_w(p.rho).j_coefficients() if poly.degree_w() > 0 else poly.j_coefficients()
    lead = (1 - param) ** p.k if kind == "binomial" else mpmath.exp(-param)
    return lead * reduced_moment(kind, coeffs, param, p.k)


@dataclass(frozen=True)
class _FamilySetup:
    base: str
    kind: str
    centre: mpf
    shift: tuple


def _setup(p: CentralParams, family: str, error_reduced: bool, alpha, cfg: SolverConfig) -> _FamilySetup:
    rho = p.rho
    if family == "menon":
        if not error_reduced:
            # Centred at lambda_e' with lambda/lambda_e' = exp(-t/2 + t^2/12).
            return _FamilySetup("ee", "poisson", p.lam_e_prime, (mpf(-1) / 2, mpf(1) / 12))
        hat = solve_lambda_star(p, StarFamily.HAT, cfg).value
        a = (rho - (rho + 1) * hat) / 2
        b = (8 * rho + 6 * rho * (rho - 2) * hat - (rho - 1) * (3 * rho + 1) * hat**2) / 24
        return _FamilySetup("ee", "poisson", hat, (a, b))
    if not error_reduced:
        if family == "bb":
            return _FamilySetup("bb", "binomial", p.lam_b, ())
        if family == "be":
            return _FamilySetup("be", "binomial", p.lam, ())
        if family == "ee":
            a = mpf(0 if alpha is None else alpha)
            return _FamilySetup("ee", "poisson", lambda_alpha(p, a), (a,))
        if family == "eb":
            return _FamilySetup("eb", "poisson", p.lam_b, ())
        raise DomainError(f"unknown family {family!r}")
    if alpha is not None:
        raise DomainError("alpha is fixed by the error-reduced ee variant")
    star = solve_lambda_star(p, StarFamily(family), cfg).value
    if family == "ee":
        return _FamilySetup("ee", "poisson", star, (rho / 2 - (rho + 1) * star / 2,))
    if family == "be":
        return _FamilySetup("be", "binomial", star, (-(star - 1) * rho / 2,))
    d = -(rho if family == "bb" else rho + 1) * star / 2
    kind = "binomial" if family == "bb" else "poisson"
    return _FamilySetup(family, kind, star, ("log", d))


def _shift_logs(shift, order: int) -> list:
    """Per-order coefficients ``A_r`` of the numeric shift ``exp(j A(t))``."""
    out = [mpf(0)] * (order + 1)
    if not shift:
        return out
    if shift[0] == "log":
        # d * (t + t^2/2 + t^3/3 + ...) from a power of (1 - t)
        for r in range(1, order + 1):
            out[r] = shift[1] / r
        return out
    for r, a in enumerate(shift, start=1):
        if r <= order:
            out[r] = mpf(a)
    return out


def correction_polys(family: str, order: int, rho, shift=()) -> list[list[mpf]]:
    """Numeric ``c_m(j)`` (``m <= order``) for a family at ``w = rho`` with a j-linear shift."""
    logs = family_logs(family, order)
    a = _shift_logs(shift, order)
    numeric = [BivarPoly()]
    for r in range(1, order + 1):
        numeric.append(logs[r].at_w(mpf(rho)) + BivarPoly.monomial(1, 0, a[r]))
    return [c.j_coefficients() for c in series_exp(numeric, order)]


def _family_value(p: CentralParams, setup: _FamilySetup, order: int):
    k = p.k
    polys = correction_polys(setup.base, order + 1, p.rho, setup.shift)
    if setup.kind == "binomial":
        x = setup.centre / k
        lead = (1 - x) ** k
        param = x
    else:
        lead = mpmath.exp(-setup.centre)
        param = setup.centre
    parts = [reduced_moment(setup.kind, c, param, k) / mpf(k) ** m for m, c in enumerate(polys)]
    body = sum(parts[: order + 1], mpf(0))
    return lead, body, parts[order + 1]


def _family_tag(family: str, error_reduced: bool, alpha) -> str:
    tag = family
    if family == "ee" and alpha is not None and not error_reduced:
        tag = f"ee:{alpha}"
    return tag + ("_er" if error_reduced else "")


def family_expansion(
    n: int,
    k: int,
    family: str,
    order: int,
    error_reduced: bool = False,
    alpha=None,
    cfg: SolverConfig = DEFAULT_CONFIG,
) -> ApproxResult:
    """One of the bb/be/ee/eb families, plain or error-reduced, to a given order.

    Error-reduced variants are the same family centred at the shifted parameter;
    the ratio of the two centres is carried as an exact-in-t shift series, so
    every order is available.  ``family="menon"`` with ``error_reduced`` uses
    the hat parameter.
    """
    if order < 0:
        raise DomainError("order must be >= 0")
    if family not in ("bb", "be", "ee", "eb", "menon"):
        raise DomainError(f"unknown family {family!r}")
    if family == "menon" and not error_reduced:
        return menon_expansion(n, k, min(order, 1))
    p = central_params(n, k)
    setup = _setup(p, family, error_reduced, alpha, cfg)
    lead, body, nxt = _family_value(p, setup, order)
    return ApproxResult(
        _family_tag(family, error_reduced, alpha),
        order,
        lead * body,
        abs(nxt / body),
        formal_range(n, k),
    )


def menon_expansion(n: int, k: int, order: int = 1) -> ApproxResult:
    """Menon's refined exponential formula; ``order=0`` keeps only ``e^{-lambda_e'}``."""
    if order not in (0, 1):
        raise DomainError("Menon's formula is only available at orders 0 and 1")
    p = central_params(n, k)
    le = p.lam_e_prime
    corr = 1 - le * (le - 1) / mpf(k) ** 2 * (mpf(n + k) / 2 - mpf(1) / 4) if order else mpf(1)
    value = mpmath.exp(-le) * corr
    # Same centre with the consistent next-order correction as a yardstick.
    setup = _setup(p, "menon", False, None, DEFAULT_CONFIG)
    lead, body, _ = _family_value(p, setup, order + 1)
    est = abs(lead * body / value - 1)
    return ApproxResult("menon", order, value, est, formal_range(n, k))


# ---------------------------------------------------------------------------
# Saddle-point corollaries

SADDLE_FORMS = ("small_k", "m_logn", "rho_form")


def saddle_corollary(n: int, k: int, m: int, form: str, cfg: SolverConfig = DEFAULT_CONFIG) -> ApproxResult:
    """Closed forms derived from the saddle point ``R`` (or from ``rho*`` directly)."""
    if form not in SADDLE_FORMS:
        raise DomainError(f"unknown saddle form {form!r}")
    if form != "small_k" and m < 2:
        raise DomainError("m must be >= 2")
    if k < 1 or k > n:
        raise DomainError(f"need 1 <= k <= n, got n={n}, k={k}")
    ln = _log(n) if n > 1 else mpf(0)
    if form == "rho_form":
        rs = mpf(n + 1) / k
        log_base = k * mpmath.log(-mpmath.expm1(-rs))
        inner = sum(
            (poly_eval(j_poly(h), rs) * mpmath.exp(-h * rs) for h in range(m - 2)),
            mpf(0),
        )
        value = mpmath.exp(log_base - (n + 1) * mpmath.exp(-2 * rs) / 2 * inner)
        est = rs * mpmath.exp(-rs) + k * rs ** (m - 1) * mpmath.exp(-m * rs) + mpf(1) / n
        valid = n >= 3 and k <= m * n / (ln + (m - 2) * mpmath.log(ln) + 1)
        return ApproxResult("rho", m, value, est, bool(valid))
    R = solve_saddle(n, k, cfg).R
    log1m = mpmath.log(-mpmath.expm1(-R))
    if form == "small_k":
        value = mpmath.exp((k - n) * log1m - n * mpmath.exp(-R))
        est = R * mpmath.exp(-R) + mpf(1) / n
        return ApproxResult("smallk", 0, value, est, bool(k <= n / (ln + 1)))
    extra = n * sum((mpmath.exp(-l * R) / l for l in range(2, m)), mpf(0))
    value = mpmath.exp(k * log1m + extra)
    est = R * mpmath.exp(-R) + n * mpmath.exp(-m * R) + mpf(1) / n
    return ApproxResult("mlogn", m, value, est, bool(k <= m * n / (ln + 1)))
