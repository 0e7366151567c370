"""Exact coefficient machinery: bivariate polynomials, truncated series, tau and J.

A :class:`BivarPoly` is a polynomial in ``j`` (the sieve index) and ``w``
(standing for ``rho = n/k``).  A :class:`SeriesPoly` is a truncated power series
in ``t = 1/k`` whose coefficients are BivarPolys.  The four formal families are
built by writing down the logarithm of each family's correction ratio and
exponentiating it, all in exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Mapping

import mpmath

from .errors import DomainError

FAMILIES = ("bb", "be", "ee", "eb")


@dataclass(frozen=True)
class BivarPoly:
    """Finitely supported map ``(deg_j, deg_w) -> coefficient``.

    Coefficients are normally :class:`Fraction`; numeric (``mpf``) coefficients
    are allowed once a real parameter has been substituted in.
    """

    terms: tuple[tuple[tuple[int, int], object], ...] = ()

    @classmethod
    def from_dict(cls, d: Mapping[tuple[int, int], object]) -> "BivarPoly":
        return cls(tuple(sorted((key, c) for key, c in d.items() if c != 0)))

    @classmethod
    def const(cls, c) -> "BivarPoly":
        return cls.from_dict({(0, 0): c})

    @classmethod
    def monomial(cls, dj: int, dw: int, c=1) -> "BivarPoly":
        return cls.from_dict({(dj, dw): c})

    def as_dict(self) -> dict[tuple[int, int], object]:
        return dict(self.terms)

    def __add__(self, other: "BivarPoly") -> "BivarPoly":
        d = self.as_dict()
        for key, c in other.terms:
            d[key] = d.get(key, 0) + c
        return BivarPoly.from_dict(d)

    def __sub__(self, other: "BivarPoly") -> "BivarPoly":
        return self + other.scale(-1)

    def __mul__(self, other: "BivarPoly") -> "BivarPoly":
        d: dict[tuple[int, int], object] = {}
        for (a, b), c in self.terms:
            for (a2, b2), c2 in other.terms:
                key = (a + a2, b + b2)
                d[key] = d.get(key, 0) + c * c2
        return BivarPoly.from_dict(d)

    def scale(self, c) -> "BivarPoly":
        return BivarPoly.from_dict({key: v * c for key, v in self.terms})

    def degree_j(self) -> int:
        return max((a for (a, _), _ in self.terms), default=-1)

    def degree_w(self) -> int:
        return max((b for (_, b), _ in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def __call__(self, j, w):
        return sum((c * j**a * w**b for (a, b), c in self.terms), 0)

    def at_w(self, w) -> "BivarPoly":
        """Substitute a value for ``w``; the result only depends on ``j``."""
        d: dict[tuple[int, int], object] = {}
        for (a, b), c in self.terms:
            d[(a, 0)] = d.get((a, 0), 0) + c * w**b
        return BivarPoly.from_dict(d)

    def j_coefficients(self) -> list:
        """Coefficient list in ``j`` (requires no ``w`` dependence)."""
        out = [0] * (self.degree_j() + 1)
        for (a, b), c in self.terms:
            if b:
                raise DomainError("polynomial still depends on w")
            out[a] += c
        return out


ZERO = BivarPoly()
ONE = BivarPoly.const(Fraction(1))


@dataclass(frozen=True)
class SeriesPoly:
    """Truncated series ``sum_{m <= order} coeffs[m] t^m``."""

    order: int
    coeffs: tuple[BivarPoly, ...]

    def __getitem__(self, m: int) -> BivarPoly:
        return self.coeffs[m]


def series_exp(logs: list[BivarPoly], order: int) -> list[BivarPoly]:
    """Coefficients of ``exp(sum_{r>=1} logs[r] t^r)`` up to ``t^order``.

    ``logs[0]`` is ignored.  Uses ``m F_m = sum_i i L_i F_{m-i}``.
    """
    out = [ONE]
    for m in range(1, order + 1):
        acc = ZERO
        for i in range(1, m + 1):
            if i < len(logs) and not logs[i].is_zero():
                acc = acc + (logs[i] * out[m - i]).scale(i)
        out.append(acc.scale(Fraction(1, m)))
    return out


@lru_cache(maxsize=None)
def bernoulli(i: int) -> Fraction:
    """Bernoulli number with ``B_1 = -1/2``."""
    p, q = mpmath.bernfrac(i)
    return Fraction(int(p), int(q))


@lru_cache(maxsize=None)
def power_sum_poly(r: int) -> BivarPoly:
    """``sum_{0<=l<j} l^r`` as a polynomial in ``j``."""
    d = {}
    for i in range(r + 1):
        c = Fraction(comb(r + 1, i)) * bernoulli(i) / (r + 1)
        if c:
            d[(r + 1 - i, 0)] = c
    if r == 0:
        return BivarPoly.monomial(1, 0, Fraction(1))
    return BivarPoly.from_dict(d)


def _family_logs(family: str, order: int) -> list[BivarPoly]:
    logs = [ZERO]
    for r in range(1, order + 1):
        # (1 - jt)^(w/t) e^(jw) contributes -w j^(r+1) t^r / (r+1)
        core = BivarPoly.monomial(r + 1, 1, Fraction(-1, r + 1))
        if family in ("bb", "eb"):
            # (1 - t)^(-jw/t) e^(-jw) adds back w j t^r / (r+1)
            core = core + BivarPoly.monomial(1, 1, Fraction(1, r + 1))
        if family in ("ee", "eb"):
            # prod_{1<=l<j} (1 - lt)
            core = core - power_sum_poly(r).scale(Fraction(1, r))
        logs.append(core)
    return logs


def family_logs(family: str, order: int, alpha=None) -> list[BivarPoly]:
    """Log of the family ratio, as series coefficients in ``t`` (index 0 unused)."""
    if family not in FAMILIES:
        raise DomainError(f"unknown family {family!r}")
    if alpha is not None and family != "ee":
        raise DomainError("alpha only applies to the ee family")
    logs = _family_logs(family, order)
    if alpha is not None and order >= 1 and alpha != 0:
        logs[1] = logs[1] + BivarPoly.monomial(1, 0, alpha)
    return logs


@lru_cache(maxsize=256)
def family_coeffs(family: str, m_max: int, alpha=None) -> SeriesPoly:
    """Exact correction polynomials ``c_0..c_{m_max}`` of a formal family."""
    if m_max < 0:
        raise DomainError("m_max must be >= 0")
    logs = family_logs(family, m_max, alpha)
    return SeriesPoly(m_max, tuple(series_exp(logs, m_max)))


# ---------------------------------------------------------------------------
# Univariate exact polynomials (tuples of coefficients, lowest degree first)


def poly_eval(coeffs, z):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


@lru_cache(maxsize=None)
def tau_poly(m: int) -> tuple[int, ...]:
    """Coefficients in ``n`` of ``tau_m(n)``, where ``(e^x(1-x))^n = sum tau_m x^m/m!``."""
    if m < 0:
        raise DomainError("m must be >= 0")
    if m == 0:
        return (1,)
    if m == 1:
        return (0,)
    a, b = tau_poly(m - 1), tau_poly(m - 2)
    size = max(len(a), len(b) + 1)
    out = [0] * size
    for i, c in enumerate(a):
        out[i] += (m - 1) * c
    for i, c in enumerate(b):
        out[i + 1] -= (m - 1) * c
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


@lru_cache(maxsize=None)
def j_poly(h: int) -> tuple[Fraction, ...]:
    """Coefficients in ``z`` of the polynomial ``J_h`` of the rho-form corollary."""
    if h < 0:
        raise DomainError("h must be >= 0")
    return tuple(
        2 * Fraction(h + 2) ** (l - 1) * (h + 1 - l) / factorial(l + 1)
        for l in range(h + 1)
    )
