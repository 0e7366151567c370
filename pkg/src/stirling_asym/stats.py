"""The block count of a uniform random set partition: moments, Bell asymptotics, limit laws."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
from mpmath import mpf

from .errors import DomainError
from .exact import row_moment, stirling_row
from .special import lambert_w, normal_cdf


@dataclass(frozen=True)
class MomentParams:
    n: int
    mu: mpf
    sigma2: mpf
    omega: mpf


def moment_params(n: int) -> MomentParams:
    """``mu = n/W(n)`` and ``sigma^2 = n/(W(n)(W(n)+1))``."""
    if n < 1:
        raise DomainError("n must be >= 1")
    w = lambert_w(n)
    return MomentParams(n, n / w, n / (w * (w + 1)), w)


def bell_asympt(n: int, refined: bool = False) -> mpf:
    """Saddle-point approximation of the Bell number ``B_n``."""
    if n < 2:
        raise DomainError("n must be >= 2")
    w = lambert_w(n)
    value = mpmath.exp((w - 1 + 1 / w) * n - 1) / mpmath.sqrt(w + 1)
    if refined:
        value *= 1 - w**2 * (2 * w**2 + 7 * w + 10) / (24 * (w + 1) ** 3 * n)
    return value


def mean_var_asympt(n: int, refined: bool = False) -> tuple[mpf, mpf]:
    """Approximate mean and variance of the block count."""
    if n < 2:
        raise DomainError("n must be >= 2")
    w = lambert_w(n)
    if not refined:
        return n / w, n / (w * (w + 1))
    mean = (
        n / w
        - 1
        + w / (2 * (w + 1) ** 2)
        + w**2 * (2 * w**3 + 8 * w**2 + 11 * w + 20) / (24 * (w + 1) ** 5 * n)
    )
    var = (
        n / (w * (w + 1))
        - 1
        + w * (w - 1) / (2 * (w + 1) ** 4)
        - w**2 * (2 * w**3 + 10 * w**2 - 27 * w + 40) / (24 * (w + 1) ** 7 * n)
    )
    return mean, var


def exact_mean_var(row: Sequence[int]) -> tuple[Fraction, Fraction]:
    """Exact mean and variance from a full triangle row."""
    return row_moment(row, 1), row_moment(row, 2, centered=True)


def _to_mpf(q: Fraction) -> mpf:
    return mpf(q.numerator) / q.denominator


@dataclass(frozen=True)
class LimitReport:
    n: int
    sup_cdf_distance: mpf
    llt_ratios: tuple[tuple[int, mpf], ...]
    scaled_rate: mpf


LLT_POINTS = (-2, -1, 0, 1, 2)


def limit_checks(n: int, row: Sequence[int] | None = None) -> LimitReport:
    """Compare the exact block-count law with its normal approximations.

    The Kolmogorov distance is taken over every atom, on both sides of each jump.
    """
    if n < 10:
        raise DomainError("n must be >= 10")
    row = stirling_row(n) if row is None else row
    mp_ = moment_params(n)
    mu, sigma = mp_.mu, mpmath.sqrt(mp_.sigma2)
    bell = mpf(sum(row))
    probs = [mpf(v) / bell for v in row]
    sup = mpf(0)
    cdf = mpf(0)
    for k in range(1, n + 1):
        before = cdf
        cdf += probs[k]
        phi = normal_cdf((k - mu) / sigma)
        sup = max(sup, abs(cdf - phi), abs(before - phi))
    ratios = []
    for x in LLT_POINTS:
        k = int(mpmath.floor(mu + x * sigma))
        p = probs[k] if 0 <= k <= n else mpf(0)
        ratios.append((x, p * mpmath.sqrt(2 * mpmath.pi) * sigma * mpmath.exp(mpf(x) ** 2 / 2)))
    rate = sup * mpmath.sqrt(n) / mpmath.log(n)
    return LimitReport(n, sup, tuple(ratios), rate)
