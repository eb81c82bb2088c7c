"""Command line interface.

Subcommands:

  rank          load a corpus, flag top-10% papers, rank institutions
  compare       z-test between two institutions, or all pairs (--all)
  calc          z-test from raw numbers (sizes and percentage shares)
  simulate      synthetic-corpus null experiment, JSON summary on stdout
  flags-export  write the per-paper flag table and stratum diagnostics

Exit codes: 0 success, 1 usage error, 2 data error, 3 computation error.
Warnings and per-record rejects go to stderr; stdout stays deterministic
for a given input and argument list.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .corpus import Corpus, load_corpus
from .errors import (
    ComputationError,
    DataError,
    IneligibleInstitutionError,
    UnknownInstitutionError,
)
from .indicator import (
    DEFAULT_MIN_OUTPUT,
    InstitutionStats,
    aggregate,
    rank,
    report_to_json,
    report_to_table,
    report_to_tsv,
)
from .sigtest import (
    ALPHA_PRIMARY,
    ProportionInput,
    ProportionTestResult,
    annotate_ranking,
    compare_all,
    observed_vs_expected,
    pairwise_csv,
    two_proportion_z,
)
from .stratify import (
    build_strata,
    flag_papers,
    stratum_warnings,
    write_flag_table,
    write_stratum_diagnostics,
)
from .synth import Lognormal, NegativeBinomial, SynthConfig, run_null_experiment

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_COMPUTE = 3

STATS_HEADER = ["institution_id", "output", "excellence_pct"]


# ---------------------------------------------------------------- arg types


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        value = 0
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _nonneg_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        value = -1
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected an integer >= 0, got {text!r}")
    return value


def _alpha_value(text: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"alpha must lie in (0, 1), got {text!r}")
    return value


def _percent_value(text: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))
    if not 0.0 <= value <= 100.0:
        raise argparse.ArgumentTypeError(
            f"percentage must lie in [0, 100], got {text!r}"
        )
    return value


def _year_window(text: str) -> tuple[int, int]:
    try:
        lo_text, hi_text = text.split(":")
        lo, hi = int(lo_text), int(hi_text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected Y0:Y1, got {text!r}")
    if lo > hi:
        raise argparse.ArgumentTypeError(f"window start {lo} is after end {hi}")
    return (lo, hi)


def _model_arg(text: str):
    parts = text.split(":")
    name = parts[0].lower()
    try:
        if name == "lognormal":
            if len(parts) == 1:
                return Lognormal()
            if len(parts) == 3:
                return Lognormal(mu=float(parts[1]), sigma=float(parts[2]))
        elif name == "negbin":
            if len(parts) == 3:
                return NegativeBinomial(r=float(parts[1]), p=float(parts[2]))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))
    raise argparse.ArgumentTypeError(
        f"expected lognormal[:MU:SIGMA] or negbin:R:P, got {text!r}"
    )


# ------------------------------------------------------------------ helpers


def _infer_format(path: str) -> str:
    return "jsonl" if Path(path).suffix.lower() in (".jsonl", ".ndjson") else "csv"


def _warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def _write_text(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _load_checked(args) -> Corpus:
    """Load the corpus, surfacing per-record rejects as warnings."""
    fmt = args.input_format or _infer_format(args.corpus)
    result = load_corpus(args.corpus, format=fmt, window=args.window)
    for err in result.rejected:
        _warn(f"{args.corpus}:{err.line}: {err.reason}")
    return result.corpus


def _load_stats_file(path: str) -> list[InstitutionStats]:
    """Read a precomputed stats table: institution_id,output,excellence_pct.

    The percentage column is authoritative here, so top_t is fractional
    by construction; only output_n and excellence_pct feed the tests.
    """
    try:
        fh = open(path, newline="", encoding="utf-8")
    except FileNotFoundError:
        raise DataError(f"input file not found: {path}")
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != STATS_HEADER:
            raise DataError(
                f"bad stats header {header!r}, expected {','.join(STATS_HEADER)}"
            )
        stats = []
        seen = set()
        for row in reader:
            if not row:
                continue
            if len(row) != 3:
                raise DataError(f"{path}:{reader.line_num}: expected 3 columns")
            inst, n_text, pct_text = (c.strip() for c in row)
            try:
                n = int(n_text)
                pct = float(pct_text)
            except ValueError:
                raise DataError(f"{path}:{reader.line_num}: non-numeric output or pct")
            if not inst or n < 1 or not 0.0 <= pct <= 100.0:
                raise DataError(f"{path}:{reader.line_num}: invalid stats row")
            if inst in seen:
                raise DataError(f"{path}:{reader.line_num}: duplicate institution {inst!r}")
            seen.add(inst)
            stats.append(
                InstitutionStats(
                    institution_id=inst,
                    output_n=n,
                    top_t=pct * n / 100.0,
                    excellence_pct=pct,
                    eligible=True,
                )
            )
    if not stats:
        raise DataError(f"no stats rows in {path}")
    return stats


def _apply_eligibility(
    stats: list[InstitutionStats], min_output: int
) -> list[InstitutionStats]:
    from dataclasses import replace

    return [replace(s, eligible=s.output_n >= min_output) for s in stats]


def _pick(stats: list[InstitutionStats], inst: str, min_output: int) -> InstitutionStats:
    for s in stats:
        if s.institution_id == inst:
            if s.output_n < min_output:
                raise IneligibleInstitutionError(inst, s.output_n, min_output)
            return s
    raise UnknownInstitutionError(inst)


def _share_pct(p: float) -> str:
    return f"{p * 100.0:.6g}%"


def _test_lines(result: ProportionTestResult, base_alpha: float) -> list[str]:
    lines = [f"z = {result.z:.6f}", f"pooled proportion = {result.pooled_p:.6f}"]
    if result.alpha_effective != base_alpha:
        lines.append(
            f"effective alpha = {result.alpha_effective:.6g} after family-wise correction"
        )
    for word, ok, crit in (
        ("5%", result.significant_05, result.critical_05),
        ("1%", result.significant_01, result.critical_01),
    ):
        state = "significant" if ok else "not significant"
        lines.append(f"{state} at the {word} level (critical value {crit:.3f})")
    return lines


# --------------------------------------------------------------- subcommands


def _cmd_rank(args) -> int:
    corpus = _load_checked(args)
    strata = build_strata(corpus)
    for message in stratum_warnings(strata):
        _warn(message)
    flags = flag_papers(corpus, strata)
    stats = aggregate(corpus, flags, min_output=args.min_output, per_year=args.per_year)
    metadata = {
        "corpus": str(args.corpus),
        "papers": len(corpus),
        "window": list(corpus.year_window),
        "min_output": args.min_output,
        "per_year": args.per_year,
        "alpha": args.alpha,
        "correction": args.correction,
        "order_by": args.order_by,
    }
    report = rank(stats, order_by=args.order_by, metadata=metadata)
    annotate_ranking(report, correction=args.correction, alpha=args.alpha)
    render = {"table": report_to_table, "tsv": report_to_tsv, "json": report_to_json}
    _write_text(render[args.format](report), args.output)
    return EXIT_OK


def _cmd_compare(args) -> int:
    if (args.corpus is None) == (args.stats is None):
        args.parser.error("exactly one of --corpus or --stats is required")
    if args.stats is not None:
        stats = _apply_eligibility(_load_stats_file(args.stats), args.min_output)
    else:
        corpus = _load_checked(args)
        flags = flag_papers(corpus, build_strata(corpus))
        stats = aggregate(corpus, flags, min_output=args.min_output)

    if args.all:
        if args.institutions:
            args.parser.error("--all takes no institution arguments")
        result = compare_all(stats, correction=args.correction, alpha=args.alpha)
        for a, b, reason in result.skipped:
            _warn(f"skipped {a} vs {b}: {reason}")
        _write_text(pairwise_csv(result), args.output)
        return EXIT_OK

    if len(args.institutions) != 2:
        args.parser.error("expected exactly two institution ids (or --all)")
    a = _pick(stats, args.institutions[0], args.min_output)
    b = _pick(stats, args.institutions[1], args.min_output)
    inputs = ProportionInput(
        n1=a.output_n,
        p1=a.excellence_pct / 100.0,
        n2=b.output_n,
        p2=b.excellence_pct / 100.0,
    )
    result = two_proportion_z(
        inputs, correction=args.correction, comparisons=args.comparisons, alpha=args.alpha
    )
    lines = [
        f"{a.institution_id}: n = {a.output_n}, share = {_share_pct(inputs.p1)}",
        f"{b.institution_id}: n = {b.output_n}, share = {_share_pct(inputs.p2)}",
    ]
    lines += _test_lines(result, args.alpha)
    _write_text("\n".join(lines) + "\n", None)
    return EXIT_OK


def _cmd_calc(args) -> int:
    if args.expected:
        if args.n2 is not None or args.p2 is not None:
            args.parser.error("--expected takes only n1 and p1")
        result = observed_vs_expected(
            args.n1,
            args.p1 / 100.0,
            p_expected=args.baseline / 100.0,
            correction=args.correction,
            comparisons=args.comparisons,
        )
        lines = [
            f"observed: n = {args.n1}, share = {_share_pct(result.inputs.p1)}",
            f"expected: share = {_share_pct(result.inputs.p2)} of the same n",
        ]
    else:
        if args.n2 is None or args.p2 is None:
            args.parser.error("n2 and p2 are required unless --expected is given")
        inputs = ProportionInput.from_percent(args.n1, args.p1, args.n2, args.p2)
        result = two_proportion_z(
            inputs, correction=args.correction, comparisons=args.comparisons
        )
        lines = [
            f"sample 1: n = {args.n1}, share = {_share_pct(inputs.p1)}",
            f"sample 2: n = {args.n2}, share = {_share_pct(inputs.p2)}",
        ]
    lines += _test_lines(result, ALPHA_PRIMARY)
    _write_text("\n".join(lines) + "\n", None)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    config = SynthConfig(
        n_institutions=args.institutions,
        papers_per_institution=args.papers_per_institution,
        fields_count=args.fields,
        years=args.years,
        citation_model=args.model,
        seed=args.seed,
    )
    result = run_null_experiment(config, args.trials, trace_path=args.trace)
    payload = {
        "seed": args.seed,
        "model": str(args.model),
        "trials": result.trials,
        "tests": result.tests,
        "mean_excellence_share": result.mean_excellence_share,
        "type1_rate_05": result.type1_rate_05,
        "type1_rate_01": result.type1_rate_01,
        "tie_inflation": result.tie_inflation,
    }
    print(json.dumps(payload, indent=2))
    return EXIT_OK


def _cmd_flags_export(args) -> int:
    corpus = _load_checked(args)
    strata = build_strata(corpus)
    for message in stratum_warnings(strata):
        _warn(message)
    flags = flag_papers(corpus, strata)
    write_flag_table(flags, args.output)
    if args.strata is not None:
        write_stratum_diagnostics(strata, args.strata)
    print(f"wrote {len(flags)} flag rows to {args.output}", file=sys.stderr)
    return EXIT_OK


# -------------------------------------------------------------------- parser


def _add_corpus_options(sub: argparse.ArgumentParser, required: bool = True) -> None:
    sub.add_argument("--corpus", required=required, help="corpus file (csv or jsonl)")
    sub.add_argument(
        "--input-format",
        choices=["csv", "jsonl"],
        default=None,
        help="override the format inferred from the file extension",
    )
    sub.add_argument(
        "--window",
        type=_year_window,
        default=None,
        metavar="Y0:Y1",
        help="publication year window; default is the span found in the data",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="excellence",
        description="top-10% excellence indicator with significance tests",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_rank = subs.add_parser("rank", help="rank institutions by excellence share")
    _add_corpus_options(p_rank)
    p_rank.add_argument("--min-output", type=_nonneg_int, default=DEFAULT_MIN_OUTPUT)
    p_rank.add_argument(
        "--per-year",
        action="store_true",
        help="require min-output in every window year, not just in total",
    )
    p_rank.add_argument("--alpha", type=_alpha_value, default=ALPHA_PRIMARY)
    p_rank.add_argument("--correction", choices=["none", "bonferroni"], default="none")
    p_rank.add_argument("--order-by", choices=["excellence", "output"], default="excellence")
    p_rank.add_argument("--format", choices=["table", "tsv", "json"], default="table")
    p_rank.add_argument("-o", "--output", default=None, help="write here instead of stdout")
    p_rank.set_defaults(func=_cmd_rank, parser=p_rank)

    p_cmp = subs.add_parser("compare", help="z-test between institutions")
    p_cmp.add_argument("institutions", nargs="*", help="two institution ids")
    _add_corpus_options(p_cmp, required=False)
    p_cmp.add_argument(
        "--stats",
        default=None,
        help=f"precomputed stats csv ({','.join(STATS_HEADER)}) instead of a corpus",
    )
    p_cmp.add_argument("--all", action="store_true", help="all eligible pairs, csv output")
    p_cmp.add_argument("--min-output", type=_nonneg_int, default=DEFAULT_MIN_OUTPUT)
    p_cmp.add_argument("--alpha", type=_alpha_value, default=ALPHA_PRIMARY)
    p_cmp.add_argument("--correction", choices=["none", "bonferroni"], default="none")
    p_cmp.add_argument(
        "--comparisons",
        type=_positive_int,
        default=1,
        help="family size for the correction in two-institution mode",
    )
    p_cmp.add_argument("-o", "--output", default=None)
    p_cmp.set_defaults(func=_cmd_compare, parser=p_cmp)

    p_calc = subs.add_parser("calc", help="z-test from sizes and percentage shares")
    p_calc.add_argument("n1", type=_positive_int)
    p_calc.add_argument("p1", type=_percent_value)
    p_calc.add_argument("n2", nargs="?", type=_positive_int, default=None)
    p_calc.add_argument("p2", nargs="?", type=_percent_value, default=None)
    p_calc.add_argument(
        "--expected",
        action="store_true",
        help="test n1,p1 against the fixed baseline share instead of a second sample",
    )
    p_calc.add_argument(
        "--baseline",
        type=_percent_value,
        default=10.0,
        help="baseline percentage for --expected (default 10)",
    )
    p_calc.add_argument("--correction", choices=["none", "bonferroni"], default="none")
    p_calc.add_argument("--comparisons", type=_positive_int, default=1)
    p_calc.set_defaults(func=_cmd_calc, parser=p_calc)

    p_sim = subs.add_parser("simulate", help="null-model Monte Carlo experiment")
    p_sim.add_argument("--seed", type=_nonneg_int, default=1)
    p_sim.add_argument("--trials", type=_positive_int, default=100)
    p_sim.add_argument("--institutions", type=_positive_int, default=10)
    p_sim.add_argument("--papers-per-institution", type=_positive_int, default=100)
    p_sim.add_argument("--fields", type=_positive_int, default=5)
    p_sim.add_argument("--years", type=_year_window, default=(2003, 2007), metavar="Y0:Y1")
    p_sim.add_argument(
        "--model",
        type=_model_arg,
        default=Lognormal(),
        help="lognormal[:MU:SIGMA] or negbin:R:P (default lognormal:1.0:1.2)",
    )
    p_sim.add_argument("--trace", default=None, help="write per-trial csv here")
    p_sim.set_defaults(func=_cmd_simulate, parser=p_sim)

    p_flags = subs.add_parser("flags-export", help="write the per-paper flag table")
    _add_corpus_options(p_flags)
    p_flags.add_argument("-o", "--output", required=True, help="flag table csv")
    p_flags.add_argument("--strata", default=None, help="also write stratum diagnostics csv")
    p_flags.set_defaults(func=_cmd_flags_export, parser=p_flags)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems; the contract reserves 2 for
        # data errors, so remap while keeping --help at 0
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ComputationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
