"""Command-line entry point: ``stirling-asym <command> ...``."""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from mpmath import mp, mpf

from .errors import NonConvergenceError, StirlingAsymError
from .exact import bell_numbers, normalized_s, stirling2_sieve, stirling_row
from .harness import (
    COMPARE_FIELDS,
    STANDARD_FAMILIES,
    FamilySpec,
    RunConfig,
    compare_records,
    compare_run,
    fmt_real,
    lotto_root,
    lotto_threshold,
    render,
    sweep_sd_axis,
    evaluate,
    write_text,
)
from .params import solve_saddle
from .stats import exact_mean_var, limit_checks, mean_var_asympt

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NONCONVERGENCE = 3
EXIT_IO = 4


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _str_list(text: str) -> list[str]:
    return [tok.strip() for tok in text.split(",") if tok.strip()]


def build_parser() -> argparse.ArgumentParser:
    def global_flags(suppress: bool) -> argparse.ArgumentParser:
        # Subcommands repeat the flags with suppressed defaults so that a flag
        # given before the subcommand is not overwritten.
        def d(value):
            return argparse.SUPPRESS if suppress else value

        g = argparse.ArgumentParser(add_help=False)
        g.add_argument("--digits", type=int, default=d(50), help="working precision in decimal digits (default 50)")
        g.add_argument("--format", choices=("csv", "json"), default=d("csv"), dest="fmt")
        g.add_argument("--out", default=d(None), help="output file (default stdout)")
        g.add_argument(
            "--axis-offset", type=float, default=d(-1.0), help="figure-axis centre relative to n/W(n) (default -1)"
        )
        return g

    top, common = global_flags(False), global_flags(True)
    parser = argparse.ArgumentParser(
        prog="stirling-asym",
        description="Exact Stirling numbers of the second kind and their asymptotic approximations.",
        parents=[top],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", parents=[common], help="exact Stirling number and S(n,k)")
    p.add_argument("n", type=int)
    p.add_argument("k", type=int)

    p = sub.add_parser("bell", parents=[common], help="Bell numbers B_0..B_n_max")
    p.add_argument("n_max", type=int)

    p = sub.add_parser("approx", parents=[common], help="one approximation at (n, k)")
    p.add_argument("n", type=int)
    p.add_argument("k", type=int)
    p.add_argument("--family", required=True, help="fd, pc, bb, be, ee[:alpha], eb, menon, smallk, mlogn, rho")
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--error-reduced", action="store_true")

    p = sub.add_parser("compare", parents=[common], help="error table against the exact values")
    p.add_argument("--n", type=_int_list, required=True, dest="n_values")
    p.add_argument("--k", type=_int_list, default=None, dest="k_values", help="explicit k values (default: 3 sd window)")
    p.add_argument("--families", type=_str_list, default=None)
    p.add_argument("--orders", type=_int_list, default=None)
    p.add_argument("--sd-window", type=float, default=None)

    p = sub.add_parser("sweep", parents=[common], help="error table over mean +- W standard deviations")
    p.add_argument("--n", type=int, required=True, dest="n_value")
    p.add_argument("--sd-window", type=float, required=True)
    p.add_argument("--families", type=_str_list, default=None)
    p.add_argument("--orders", type=_int_list, default=None)

    p = sub.add_parser("moments", parents=[common], help="exact and asymptotic mean and variance")
    p.add_argument("n", type=int)
    p.add_argument("--refined", action="store_true")

    p = sub.add_parser("limits", parents=[common], help="CLT distance and LLT ratios")
    p.add_argument("n", type=int)

    p = sub.add_parser("lotto", parents=[common], help="draws needed to complete a collection")
    p.add_argument("k", type=int)
    p.add_argument("s", type=int)
    p.add_argument("--approx", action="store_true")

    p = sub.add_parser("saddle", parents=[common], help="saddle point R and V(R)")
    p.add_argument("n", type=int)
    p.add_argument("k", type=int)
    return parser


def _families(tokens: list[str] | None) -> tuple[FamilySpec, ...]:
    if tokens is None:
        return STANDARD_FAMILIES
    return tuple(FamilySpec.parse(t) for t in tokens)


def _run(args) -> tuple[Sequence[str], list[dict]]:
    cmd = args.command
    if cmd == "exact":
        value = normalized_s(args.n, args.k)
        rec = {
            "n": args.n,
            "k": args.k,
            "stirling2": str(stirling2_sieve(args.n, args.k)),
            "normalized_s": fmt_real(mpf(value.numerator) / value.denominator),
        }
        return list(rec), [rec]
    if cmd == "bell":
        return ["n", "bell"], [{"n": i, "bell": str(b)} for i, b in enumerate(bell_numbers(args.n_max))]
    if cmd == "approx":
        spec = FamilySpec.parse(args.family)
        if args.error_reduced and not spec.error_reduced:
            spec = FamilySpec(spec.name, spec.order, True, spec.alpha)
        if args.order is not None:
            spec = spec.with_order(args.order)
        res = evaluate(args.n, args.k, spec)
        rec = {
            "n": args.n,
            "k": args.k,
            "family": spec.tag,
            "order": res.order,
            "value": fmt_real(res.value),
            "leading_error_estimate": fmt_real(res.leading_error_estimate),
            "in_range": "true" if res.in_validity_range else "false",
        }
        return list(rec), [rec]
    if cmd in ("compare", "sweep"):
        common = dict(
            precision_digits=args.digits,
            families=_families(args.families),
            orders=tuple(args.orders or ()),
            output_format=args.fmt,
            output_path=args.out,
            axis_offset=args.axis_offset,
        )
        if cmd == "compare":
            cfg = RunConfig(
                n_values=tuple(args.n_values),
                k_values=tuple(args.k_values or ()),
                sd_window=args.sd_window,
                **common,
            )
            rows = compare_run(cfg)
        else:
            cfg = RunConfig(n_values=(args.n_value,), sd_window=args.sd_window, **common)
            rows = sweep_sd_axis(cfg)
        records = compare_records(rows, fmt=args.fmt)
        return COMPARE_FIELDS, records
    if cmd == "moments":
        mean, var = exact_mean_var(stirling_row(args.n))
        am, av = mean_var_asympt(args.n, args.refined)
        rec = {
            "n": args.n,
            "refined": "true" if args.refined else "false",
            "mean_exact": fmt_real(mpf(mean.numerator) / mean.denominator),
            "mean_asympt": fmt_real(am),
            "var_exact": fmt_real(mpf(var.numerator) / var.denominator),
            "var_asympt": fmt_real(av),
        }
        return list(rec), [rec]
    if cmd == "limits":
        rep = limit_checks(args.n)
        recs = [
            {
                "n": args.n,
                "x": x,
                "llt_ratio": fmt_real(r),
                "sup_cdf_distance": fmt_real(rep.sup_cdf_distance),
                "scaled_rate": fmt_real(rep.scaled_rate),
            }
            for x, r in rep.llt_ratios
        ]
        return ["n", "x", "llt_ratio", "sup_cdf_distance", "scaled_rate"], recs
    if cmd == "lotto":
        threshold = lotto_threshold(args.k, args.s, use_exact=not args.approx)
        rec = {
            "k": args.k,
            "s": args.s,
            "method": "approx" if args.approx else "exact",
            "threshold": threshold,
            "root": fmt_real(lotto_root(args.k, args.s)) if args.approx else "",
        }
        return list(rec), [rec]
    if cmd == "saddle":
        sol = solve_saddle(args.n, args.k)
        rec = {
            "n": args.n,
            "k": args.k,
            "R": fmt_real(sol.R),
            "V": fmt_real(sol.V),
            "residual": fmt_real(sol.residual),
        }
        return list(rec), [rec]
    raise AssertionError(cmd)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.digits < 15:
        print("stirling-asym: error: --digits must be >= 15", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        with mp.workdps(args.digits):
            fields, records = _run(args)
            text = render(fields, records, args.fmt)
        write_text(text, args.out)
    except NonConvergenceError as exc:
        print(f"stirling-asym: non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except StirlingAsymError as exc:
        print(f"stirling-asym: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"stirling-asym: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
