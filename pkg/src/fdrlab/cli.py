"""Command-line front end.

One subcommand per computation, each able to render as an aligned table
(default, 4 significant figures), CSV, or JSON (both full precision).

Exit codes: 0 success, 2 invalid flags, 3 domain or undefined-result errors,
4 I/O failure.  The environment variable FDRLAB_SEED supplies the default
master seed for the simulation subcommands.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

from .errors import (ConfigurationError, DegenerateDataError, DomainError,
                     UndefinedResultError)
from . import fdr_calculus as fc
from . import montecarlo as mc
from . import power as pw

_FORMATS = ("table", "csv", "json")
_DEFAULT_N_LIST = (3, 4, 5, 6, 8, 10, 12, 14, 16, 20, 50)


# ---------------------------------------------------------------------------
# Flag validators (argparse exits with code 2, naming the offending flag).
# ---------------------------------------------------------------------------

def _prob_closed(text: str) -> float:
    value = float(text)
    if not math.isfinite(value) or not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1]; got {text}")
    return value


def _prob_open(text: str) -> float:
    value = float(text)
    if not math.isfinite(value) or not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must lie strictly inside (0, 1); got {text}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value) or value <= 0.0:
        raise argparse.ArgumentTypeError(f"must be positive; got {text}")
    return value


def _finite_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be finite; got {text}")
    return value


def _int_at_least(minimum: int):
    def convert(text: str) -> int:
        value = int(text)
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be an integer >= {minimum}; got {text}")
        return value
    return convert


def _seed_value(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"must fit in an unsigned 64-bit integer; got {text}")
    return value


def _interval_value(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected LO,HI; got {text!r}")
    try:
        lo, hi = (float(part) for part in parts)
        lo_idx = mc.grid_index(lo, "lo")
        hi_idx = mc.grid_index(hi, "hi")
    except (ValueError, DomainError) as exc:
        raise argparse.ArgumentTypeError(str(exc))
    if lo_idx >= hi_idx:
        raise argparse.ArgumentTypeError(f"requires lo < hi; got {text!r}")
    return lo, hi


def _bin_width_value(text: str) -> float:
    value = float(text)
    ticks = int(round(value * 1000.0))
    if ticks < 1 or value != ticks / 1000.0 or 1000 % ticks != 0:
        raise argparse.ArgumentTypeError(
            f"must be a multiple of 0.001 that divides 1 evenly; got {text}"
        )
    return value


def _n_list_value(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers; got {text!r}")
    if not values or any(n < 3 for n in values):
        raise argparse.ArgumentTypeError("every n must be an integer >= 3")
    return values


# ---------------------------------------------------------------------------
# Rendering.
# ---------------------------------------------------------------------------

def _fmt_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if value.is_integer() and abs(value) < 1e15:
            return str(int(value))
        return f"{value:.4g}"
    return str(value)


def _emit_mapping(data: dict, fmt: str, out) -> None:
    """Render a flat field -> value mapping."""
    if fmt == "json":
        print(json.dumps(data, indent=2), file=out)
    elif fmt == "csv":
        writer = csv.writer(out)
        writer.writerow(data.keys())
        writer.writerow([repr(v) if isinstance(v, float) else v for v in data.values()])
    else:
        width = max(len(key) for key in data)
        for key, value in data.items():
            print(f"{key:<{width}}  {_fmt_cell(value)}", file=out)


def _emit_rows(fieldnames: list[str], rows: list[dict], fmt: str, out) -> None:
    """Render a list of uniform records."""
    if fmt == "json":
        print(json.dumps(rows, indent=2), file=out)
    elif fmt == "csv":
        writer = csv.writer(out)
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v
                             for v in (row[name] for name in fieldnames)])
    else:
        cells = [[_fmt_cell(row[name]) for name in fieldnames] for row in rows]
        widths = [max(len(name), *(len(c[i]) for c in cells)) if cells else len(name)
                  for i, name in enumerate(fieldnames)]
        print("  ".join(name.ljust(w) for name, w in zip(fieldnames, widths)), file=out)
        for row_cells in cells:
            print("  ".join(cell.ljust(w) for cell, w in zip(row_cells, widths)), file=out)


# ---------------------------------------------------------------------------
# Subcommand handlers.
# ---------------------------------------------------------------------------

def _cmd_screen(args) -> int:
    spec = fc.DiagnosticSpec(prevalence=args.prevalence,
                             sensitivity=args.sensitivity,
                             specificity=args.specificity)
    breakdown = fc.screening_breakdown(spec, population=args.population)
    data = {"prevalence": args.prevalence, "sensitivity": args.sensitivity,
            "specificity": args.specificity, "population": args.population}
    data.update(breakdown.to_dict())
    _emit_mapping(data, args.format, sys.stdout)
    return 0


def _cmd_fdr(args) -> int:
    scenario = fc.TestScenario(prevalence=args.prevalence, power=args.power,
                               alpha=args.alpha)
    breakdown = fc.significance_breakdown(scenario, n_tests=args.n_tests)
    odds = fc.posterior_odds(scenario)
    data = {"prevalence": args.prevalence, "power": args.power,
            "alpha": args.alpha, "n_tests": args.n_tests}
    data.update(breakdown.to_dict())
    for key, value in odds.to_dict().items():
        if key != "fdr":
            data[key] = value
    _emit_mapping(data, args.format, sys.stdout)
    return 0


def _cmd_berger(args) -> int:
    if args.table:
        rows = fc.berger_table()
        _emit_rows(["p", "min_bayes_factor", "min_fdr"], rows, args.format, sys.stdout)
    elif args.target_fdr is not None:
        p = fc.alpha_for_target_fdr(args.target_fdr)
        _emit_mapping({"target_fdr": args.target_fdr, "p": p,
                       "min_fdr_check": fc.berger_min_fdr(p)},
                      args.format, sys.stdout)
    else:
        _emit_mapping({"p": args.p,
                       "min_bayes_factor": fc.berger_min_bayes_factor(args.p),
                       "min_fdr": fc.berger_min_fdr(args.p)},
                      args.format, sys.stdout)
    return 0


def _cmd_power(args) -> int:
    if args.solve:
        if args.target is None:
            raise ConfigurationError("--solve requires --target")
        n = pw.solve_n(args.target, args.d, args.alpha)
        _emit_mapping({"target_power": args.target, "effect_size_d": args.d,
                       "alpha": args.alpha, "n_per_group": n,
                       "power_at_n": pw.power_two_sample(n, args.d, args.alpha)},
                      args.format, sys.stdout)
    else:
        value = pw.power_two_sample(args.n, args.d, args.alpha)
        _emit_mapping({"n_per_group": args.n, "effect_size_d": args.d,
                       "alpha": args.alpha, "power": value},
                      args.format, sys.stdout)
    return 0


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("FDRLAB_SEED")
    if env is not None:
        try:
            return _seed_value(env)
        except (ValueError, argparse.ArgumentTypeError):
            raise ConfigurationError(
                f"FDRLAB_SEED must be an unsigned 64-bit integer; got {env!r}"
            )
    return mc.DEFAULT_MASTER_SEED


def _summary_flat(summary: mc.SimSummary, prefix: str = "") -> dict:
    mean_sig = summary.mean_diff_significant
    return {
        f"{prefix}count_significant": summary.count_significant,
        f"{prefix}fraction_significant": summary.fraction_significant,
        f"{prefix}mean_diff_all": summary.mean_diff_all,
        f"{prefix}sd_diff_all": summary.sd_diff_all,
        f"{prefix}mean_diff_significant": None if math.isnan(mean_sig) else mean_sig,
        f"{prefix}count_wrong_sign_significant": summary.count_wrong_sign_significant,
    }


def _histogram_path(path: str, tag: str) -> str:
    stem, ext = os.path.splitext(path)
    return f"{stem}_{tag}{ext or '.csv'}"


def _cmd_simulate(args) -> int:
    seed = _resolve_seed(args)
    if args.interval is not None and args.prevalence is None:
        raise ConfigurationError("--interval requires --prevalence")

    if args.prevalence is None:
        config = mc.SimConfig(n_per_group=args.n_per_group,
                              true_mean_control=0.0,
                              true_mean_treatment=args.delta,
                              sd=args.sd, n_sims=args.n_sims,
                              alpha=args.alpha, master_seed=seed)
        summary = mc.run_batch(config, threads=args.threads)
        if args.emit_histogram:
            mc.write_histogram_csv(summary, args.emit_histogram, args.hist_bin_width)
        if args.format == "json":
            print(summary.to_json(), file=sys.stdout)
        else:
            data = dict(config.to_dict())
            data.update(_summary_flat(summary))
            _emit_mapping(data, args.format, sys.stdout)
        return 0

    spec = mc.make_mixture(prevalence=args.prevalence,
                           n_per_group=args.n_per_group, delta=args.delta,
                           sd=args.sd, n_sims=args.n_sims, alpha=args.alpha,
                           master_seed=seed, threads=args.threads)
    breakdown = mc.mixture_fdr(spec)
    interval_part = {}
    if args.interval is not None:
        lo, hi = args.interval
        interval_part = {
            "interval_lo": lo,
            "interval_hi": hi,
            "interval_fdr": mc.interval_fdr(spec, lo, hi),
            "interval_count_null": spec.null_summary.count_in_interval(lo, hi),
            "interval_count_effect": spec.effect_summary.count_in_interval(lo, hi),
        }
    if args.emit_histogram:
        mc.write_histogram_csv(spec.null_summary,
                               _histogram_path(args.emit_histogram, "null"),
                               args.hist_bin_width)
        mc.write_histogram_csv(spec.effect_summary,
                               _histogram_path(args.emit_histogram, "effect"),
                               args.hist_bin_width)

    if args.format == "json":
        payload = {
            "prevalence": args.prevalence,
            "mixture": breakdown.to_dict(),
            **interval_part,
            "null": spec.null_summary.to_dict(),
            "effect": spec.effect_summary.to_dict(),
        }
        print(json.dumps(payload, indent=2), file=sys.stdout)
    else:
        data = {"prevalence": args.prevalence}
        data.update(breakdown.to_dict())
        data.update(interval_part)
        data.update(_summary_flat(spec.null_summary, "null_"))
        data.update(_summary_flat(spec.effect_summary, "effect_"))
        _emit_mapping(data, args.format, sys.stdout)
    return 0


def _cmd_inflation(args) -> int:
    n_values = sorted(set(args.n_list))
    if len(n_values) != len(args.n_list):
        dupes = sorted({n for n in args.n_list if args.n_list.count(n) > 1})
        print(f"warning: duplicate n values deduplicated: {dupes}", file=sys.stderr)
    seed = _resolve_seed(args)
    base = mc.SimConfig(n_per_group=max(n_values),
                        true_mean_control=0.0, true_mean_treatment=args.delta,
                        sd=args.sd, n_sims=args.n_sims, alpha=args.alpha,
                        master_seed=seed)
    points = mc.inflation_curve(n_values, base, threads=args.threads)
    rows = [{"n_per_group": point.n_per_group, "power": point.power,
             "mean_diff_significant": point.mean_diff_significant}
            for point in points]
    _emit_rows(["n_per_group", "power", "mean_diff_significant"],
               rows, args.format, sys.stdout)
    return 0


# ---------------------------------------------------------------------------
# Parser.
# ---------------------------------------------------------------------------

def _add_format(parser) -> None:
    parser.add_argument("--format", choices=_FORMATS, default="table",
                        help="output format (default: table)")


def _add_sim_common(parser) -> None:
    parser.add_argument("--sd", type=_positive_float, default=1.0,
                        help="common true standard deviation (default 1)")
    parser.add_argument("--n-sims", type=_int_at_least(1), default=100_000,
                        help="number of simulated experiments (default 100000)")
    parser.add_argument("--alpha", type=_prob_open, default=0.05,
                        help="significance threshold, p <= alpha (default 0.05)")
    parser.add_argument("--seed", type=_seed_value, default=None,
                        help="master seed (default: $FDRLAB_SEED, then "
                             f"{mc.DEFAULT_MASTER_SEED})")
    parser.add_argument("--threads", type=_int_at_least(1), default=os.cpu_count() or 1,
                        help="worker threads; never affects results")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdrlab",
        description="False discovery rates for screening and significance "
                    "tests: exact tree arithmetic, the minimum-Bayes-factor "
                    "calibration, analytic power, and seeded Monte Carlo "
                    "simulation of two-sample t tests.",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("screen", help="screening-test false discovery breakdown")
    p.add_argument("--prevalence", type=_prob_closed, required=True)
    p.add_argument("--sensitivity", type=_prob_closed, required=True)
    p.add_argument("--specificity", type=_prob_closed, required=True)
    p.add_argument("--population", type=_positive_float, default=None,
                   help="scale the four cells to this many people")
    _add_format(p)
    p.set_defaults(handler=_cmd_screen)

    p = sub.add_parser("fdr", help="significance-test breakdown and posterior odds")
    p.add_argument("--prevalence", type=_prob_closed, required=True,
                   help="fraction of tests with a real effect")
    p.add_argument("--power", type=_prob_closed, required=True)
    p.add_argument("--alpha", type=_prob_closed, required=True)
    p.add_argument("--n-tests", type=_positive_float, default=None,
                   help="scale the four cells to this many tests")
    _add_format(p)
    p.set_defaults(handler=_cmd_fdr)

    p = sub.add_parser("berger", help="minimum Bayes factor / minimum FDR calibration")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--p", type=_prob_open, help="observed p value (must be < 1/e)")
    group.add_argument("--table", action="store_true",
                       help="print the standard calibration table")
    group.add_argument("--target-fdr", type=_prob_open,
                       help="invert: p value whose minimum FDR equals this")
    _add_format(p)
    p.set_defaults(handler=_cmd_berger)

    p = sub.add_parser("power", help="analytic power of the two-sample t test")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--n", type=_int_at_least(2), help="observations per group")
    group.add_argument("--solve", action="store_true",
                       help="find the smallest n reaching --target power")
    p.add_argument("--target", type=_prob_open, default=None,
                   help="target power for --solve")
    p.add_argument("--d", type=_finite_float, required=True,
                   help="true mean difference in SD units")
    p.add_argument("--alpha", type=_prob_open, default=0.05)
    _add_format(p)
    p.set_defaults(handler=_cmd_power)

    p = sub.add_parser(
        "simulate",
        help="Monte Carlo batch of two-sample t tests; with --prevalence, a "
             "prevalence-weighted null+effect mixture (effect batch seeded "
             "with seed+1)",
    )
    p.add_argument("--n-per-group", type=_int_at_least(2), required=True)
    p.add_argument("--delta", type=_finite_float, required=True,
                   help="true treatment-minus-control mean difference")
    _add_sim_common(p)
    p.add_argument("--prevalence", type=_prob_closed, default=None,
                   help="run paired null+effect batches and report mixture FDR")
    p.add_argument("--interval", type=_interval_value, default=None,
                   metavar="LO,HI",
                   help="also report the FDR among p values in (LO, HI]; "
                        "bounds on the 0.001 grid; requires --prevalence")
    p.add_argument("--emit-histogram", metavar="PATH", default=None,
                   help="write the p histogram as CSV (bin_left,count); with "
                        "--prevalence, writes PATH_null and PATH_effect")
    p.add_argument("--hist-bin-width", type=_bin_width_value, default=0.05,
                   help="histogram bin width, a multiple of 0.001 (default 0.05)")
    _add_format(p)
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("inflation",
                       help="effect-size inflation among significant tests "
                            "versus per-group sample size")
    p.add_argument("--n-list", type=_n_list_value,
                   default=list(_DEFAULT_N_LIST), metavar="N1,N2,...",
                   help="per-group sample sizes (default "
                        + ",".join(str(n) for n in _DEFAULT_N_LIST) + ")")
    p.add_argument("--delta", type=_finite_float, default=1.0,
                   help="true treatment-minus-control mean difference (default 1)")
    _add_sim_common(p)
    _add_format(p)
    p.set_defaults(handler=_cmd_inflation)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "handler", None) is None:
        parser.print_help(sys.stderr)
        return 2
    try:
        return args.handler(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, DegenerateDataError, UndefinedResultError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
