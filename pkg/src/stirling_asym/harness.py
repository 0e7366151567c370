"""Error-comparison sweeps, the lottery threshold, and byte-stable output."""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
from mpmath import mp, mpf

from .errors import DomainError, NonConvergenceError, StirlingAsymError
from .exact import coupon_covered, normalized_s_many
from .expansions import (
    ApproxResult,
    family_expansion,
    fd_expansion,
    menon_expansion,
    pc_expansion,
    saddle_corollary,
)
from .stats import moment_params

OUTPUT_DIGITS = 20

BASE_FAMILIES = ("fd", "pc", "bb", "be", "ee", "eb", "menon", "smallk", "mlogn", "rho")
REDUCIBLE = ("bb", "be", "ee", "eb", "menon")

_DEFAULT_ORDER = {
    "fd": 3,
    "pc": 2,
    "bb": 1,
    "be": 1,
    "ee": 1,
    "eb": 1,
    "menon": 1,
    "smallk": 0,
    "mlogn": 2,
    "rho": 3,
}

_TOKEN = re.compile(
    r"^(?P<name>[a-z]+)(?::(?P<alpha>[-+0-9./eE]+))?(?P<er>_er)?(?:@(?P<order>\d+))?$"
)


@dataclass(frozen=True)
class FamilySpec:
    """One approximation to run: ``name[:alpha][_er][@order]`` on the command line."""

    name: str
    order: int | None = None
    error_reduced: bool = False
    alpha: str | None = None

    def __post_init__(self):
        if self.name not in BASE_FAMILIES:
            raise DomainError(f"unknown family {self.name!r}")
        if self.error_reduced and self.name not in REDUCIBLE:
            raise DomainError(f"family {self.name!r} has no error-reduced variant")
        if self.alpha is not None and (self.name != "ee" or self.error_reduced):
            raise DomainError("alpha applies only to the plain ee family")
        if self.order is not None and self.order < 0:
            raise DomainError("order must be >= 0")

    @classmethod
    def parse(cls, token: str) -> "FamilySpec":
        m = _TOKEN.match(token.strip().lower())
        if not m:
            raise DomainError(f"cannot parse family token {token!r}")
        order = int(m["order"]) if m["order"] is not None else None
        return cls(m["name"], order, bool(m["er"]), m["alpha"])

    def resolved_order(self) -> int:
        if self.order is not None:
            return self.order
        if self.error_reduced:
            return 0 if self.name == "menon" else 2
        return _DEFAULT_ORDER[self.name]

    def with_order(self, order: int) -> "FamilySpec":
        return FamilySpec(self.name, order, self.error_reduced, self.alpha)

    @property
    def tag(self) -> str:
        base = self.name if self.alpha is None else f"{self.name}:{self.alpha}"
        return base + ("_er" if self.error_reduced else "")


#: The six standard approximations compared side by side.
STANDARD_FAMILIES = (
    FamilySpec("bb", 1),
    FamilySpec("fd", 3),
    FamilySpec("pc", 2),
    FamilySpec("ee", 1),
    FamilySpec("eb", 1),
    FamilySpec("menon", 1),
)


def evaluate(n: int, k: int, spec: FamilySpec) -> ApproxResult:
    """Dispatch one family at one ``(n, k)``."""
    order = spec.resolved_order()
    name = spec.name
    if name == "fd":
        return fd_expansion(n, k, max(order, 1))
    if name == "pc":
        return pc_expansion(n, k, max(order, 1))
    if name == "menon" and not spec.error_reduced:
        return menon_expansion(n, k, min(order, 1))
    if name == "smallk":
        return saddle_corollary(n, k, 0, "small_k")
    if name == "mlogn":
        return saddle_corollary(n, k, max(order, 2), "m_logn")
    if name == "rho":
        return saddle_corollary(n, k, max(order, 2), "rho_form")
    alpha = mpf(spec.alpha) if spec.alpha is not None else None
    res = family_expansion(n, k, name, order, spec.error_reduced, alpha)
    return ApproxResult(spec.tag, res.order, res.value, res.leading_error_estimate, res.in_validity_range)


@dataclass(frozen=True)
class RunConfig:
    precision_digits: int = 50
    families: tuple[FamilySpec, ...] = STANDARD_FAMILIES
    orders: tuple[int, ...] = ()
    n_values: tuple[int, ...] = ()
    k_values: tuple[int, ...] = ()
    sd_window: float | None = None
    output_format: str = "csv"
    output_path: str | None = None
    axis_offset: float = -1.0

    def validate(self) -> None:
        if not self.families:
            raise DomainError("at least one family is required")
        if self.precision_digits < 15:
            raise DomainError("precision must be >= 15 digits")
        if self.output_format not in ("csv", "json"):
            raise DomainError(f"unknown output format {self.output_format!r}")
        if not self.n_values:
            raise DomainError("at least one n is required")
        for n in self.n_values:
            if n < 2:
                raise DomainError("n must be >= 2")
        if self.sd_window is not None and self.sd_window < 0:
            raise DomainError("sd window must be >= 0")
        for o in self.orders:
            if o < 0:
                raise DomainError("orders must be >= 0")

    def expanded_families(self) -> list[FamilySpec]:
        if not self.orders:
            return list(self.families)
        return [f.with_order(o) for f in self.families for o in self.orders]


@dataclass(frozen=True)
class CompareRow:
    n: int
    k: int
    x_axis: mpf
    family: str
    order: int
    approx: mpf | None
    exact: mpf
    delta: mpf | None
    in_range: bool
    error: str | None = None


def axis_value(n: int, k: int, offset: float) -> mpf:
    """Figure axis: 1 at the centre ``mu + offset``; each 0.1 is one standard deviation."""
    mp_ = moment_params(n)
    return 1 + (k - mp_.mu - mpf(offset)) / (10 * mpmath.sqrt(mp_.sigma2))


def sd_window_ks(n: int, window: float, offset: float) -> list[int]:
    """Integers ``k`` within ``window`` standard deviations of ``mu + offset``."""
    mp_ = moment_params(n)
    centre = mp_.mu + mpf(offset)
    sigma = mpmath.sqrt(mp_.sigma2)
    lo = int(mpmath.nint(centre - mpf(window) * sigma))
    hi = int(mpmath.nint(centre + mpf(window) * sigma))
    return [k for k in range(max(lo, 1), min(hi, n) + 1)]


def _to_mpf(q: Fraction) -> mpf:
    return mpf(q.numerator) / q.denominator


def _error_kind(exc: Exception) -> str:
    if isinstance(exc, NonConvergenceError):
        return "nonconvergence"
    if isinstance(exc, DomainError):
        return "domain"
    return "arithmetic"


def _rows_for(n: int, ks: Sequence[int], cfg: RunConfig) -> list[CompareRow]:
    families = cfg.expanded_families()
    exact = normalized_s_many(n, ks)
    rows = []
    for k in ks:
        s = _to_mpf(exact[k])
        x = axis_value(n, k, cfg.axis_offset)
        for spec in families:
            try:
                res = evaluate(n, k, spec)
                delta = abs(s / res.value - 1)
                rows.append(CompareRow(n, k, x, spec.tag, res.order, res.value, s, delta, res.in_validity_range))
            except (StirlingAsymError, ArithmeticError) as exc:
                rows.append(
                    CompareRow(n, k, x, spec.tag, spec.resolved_order(), None, s, None, False, _error_kind(exc))
                )
    return rows


def _sorted(rows: Iterable[CompareRow]) -> list[CompareRow]:
    return sorted(rows, key=lambda r: (r.n, r.k, r.family, r.order))


def compare_run(cfg: RunConfig) -> list[CompareRow]:
    """Approximation errors against the exact oracle, one row per ``(n, k, family)``."""
    cfg.validate()
    rows: list[CompareRow] = []
    with mp.workdps(cfg.precision_digits):
        for n in cfg.n_values:
            if cfg.k_values:
                ks = sorted({k for k in cfg.k_values if 1 <= k <= n})
                if len(ks) != len(set(cfg.k_values)):
                    raise DomainError(f"k values must lie in 1..{n}")
            else:
                window = 3.0 if cfg.sd_window is None else cfg.sd_window
                ks = sd_window_ks(n, window, cfg.axis_offset)
            rows.extend(_rows_for(n, ks, cfg))
    return _sorted(rows)


def sweep_sd_axis(cfg: RunConfig) -> list[CompareRow]:
    """Rows for every ``k`` within ``sd_window`` standard deviations of the centre."""
    if cfg.sd_window is None:
        raise DomainError("sweep needs an sd window")
    if cfg.k_values:
        raise DomainError("sweep takes an sd window, not explicit k values")
    return compare_run(cfg)


# ---------------------------------------------------------------------------
# Lottery


def _coverage_search(prob_exceeds) -> int:
    hi = 1
    while not prob_exceeds(hi):
        hi *= 2
    lo = hi // 2  # prob_exceeds(lo) is false (or lo == 0)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if prob_exceeds(mid):
            hi = mid
        else:
            lo = mid
    return hi


def lotto_root(k: int, s: int) -> mpf:
    """Real ``n`` solving ``(1 - (1 - s/k)^n)^k = 1/2``."""
    if k < 1 or s < 1 or s > k:
        raise DomainError(f"need 1 <= s <= k, got k={k}, s={s}")
    if s == k:
        return mpf(0)
    return mpmath.log(1 - mpf(2) ** (-mpf(1) / k)) / mpmath.log(1 - mpf(s) / k)


def lotto_threshold(k: int, s: int, use_exact: bool = True) -> int:
    """Smallest number of draws whose full-coverage probability exceeds one half."""
    if k < 1 or s < 1 or s > k:
        raise DomainError(f"need 1 <= s <= k, got k={k}, s={s}")
    if use_exact:
        half = Fraction(1, 2)
        return _coverage_search(lambda n: coupon_covered(n, k, s) > half)
    if s == k:
        return 1
    root = lotto_root(k, s)
    return int(mpmath.floor(root)) + 1


# ---------------------------------------------------------------------------
# Output

COMPARE_FIELDS = ("n", "k", "x_axis", "family", "order", "approx", "exact", "delta", "in_range")


def fmt_real(x, digits: int = OUTPUT_DIGITS) -> str:
    if x is None:
        return "nan"
    return mpmath.nstr(mpf(x), digits)


def compare_records(rows: Sequence[CompareRow], digits: int = OUTPUT_DIGITS, fmt: str = "csv") -> list[dict]:
    """Flatten rows for output.  JSON keeps ``in_range`` boolean and adds ``error``."""
    out = []
    for r in rows:
        rec = {
            "n": r.n,
            "k": r.k,
            "x_axis": fmt_real(r.x_axis, digits),
            "family": r.family,
            "order": r.order,
            "approx": fmt_real(r.approx, digits),
            "exact": fmt_real(r.exact, digits),
            "delta": fmt_real(r.delta, digits),
        }
        if fmt == "json":
            rec["in_range"] = False if r.error else r.in_range
            if r.error:
                rec["error"] = r.error
        else:
            rec["in_range"] = f"error:{r.error}" if r.error else ("true" if r.in_range else "false")
        out.append(rec)
    return out


def render(fields: Sequence[str], records: Sequence[dict], fmt: str) -> str:
    """Serialize records with a fixed column order and LF line endings."""
    if fmt == "csv":
        buf = io.StringIO(newline="")
        writer = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n")
        writer.writeheader()
        for rec in records:
            writer.writerow({f: rec[f] for f in fields})
        return buf.getvalue()
    if fmt == "json":
        ordered = []
        for rec in records:
            item = {f: rec[f] for f in fields}
            item.update({key: v for key, v in rec.items() if key not in item})
            ordered.append(item)
        return json.dumps(ordered, indent=2) + "\n"
    raise DomainError(f"unknown output format {fmt!r}")


def write_text(text: str, path: str | None, stream=None) -> None:
    if path is None:
        import sys

        (stream or sys.stdout).write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def emit(rows: Sequence[CompareRow], fmt: str = "csv", path: str | None = None, digits: int = OUTPUT_DIGITS) -> None:
    """Write comparison rows as CSV or JSON (stdout when ``path`` is None)."""
    write_text(render(COMPARE_FIELDS, compare_records(rows, digits, fmt), fmt), path)
