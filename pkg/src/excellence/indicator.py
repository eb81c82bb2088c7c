"""Per-institution aggregation and the ranked report.

Multi-institution papers use full counting: a flagged paper raises the
top-10% count of every affiliated institution. The excellence percentage
is kept at full precision; rounding to one decimal (half away from zero,
as ranking reports print it) happens only at display time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable

from .corpus import Corpus

DEFAULT_MIN_OUTPUT = 100


@dataclass(frozen=True)
class InstitutionStats:
    """Output count, top-10% count, and excellence percentage for one
    institution.

    ``excellence_pct`` is authoritative for significance testing; for
    stats built by :func:`aggregate` it equals 100 * top_t / output_n
    exactly.
    """

    institution_id: str
    output_n: int
    top_t: int
    excellence_pct: float
    eligible: bool


@dataclass
class RankedRow:
    rank: int
    stats: InstitutionStats
    # filled in by sigtest.annotate_ranking
    verdict_vs_expected: str | None = None
    z_vs_expected: float | None = None


@dataclass
class RankingReport:
    rows: list[RankedRow]
    appendix: list[InstitutionStats]
    warnings: list[str] = field(default_factory=list)
    metadata: dict[str, object] = field(default_factory=dict)


def display_pct(value: float) -> str:
    # one decimal, half away from zero; round() would use banker's rounding
    return str(Decimal(repr(value)).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def aggregate(
    corpus: Corpus,
    flags: dict[str, bool],
    min_output: int = DEFAULT_MIN_OUTPUT,
    per_year: bool = False,
) -> list[InstitutionStats]:
    """Fold the flag table into per-institution statistics.

    A paper with several affiliations counts fully toward each of them.
    An institution is eligible when its output reaches ``min_output``
    over the whole window, or in every window year when ``per_year`` is
    set.
    """
    if min_output < 0:
        raise ValueError("min_output must be >= 0")
    output: dict[str, int] = {}
    top: dict[str, int] = {}
    yearly: dict[str, dict[int, int]] = {}
    for p in corpus.papers:
        excellent = flags[p.paper_id]
        for inst in p.institutions:
            output[inst] = output.get(inst, 0) + 1
            if excellent:
                top[inst] = top.get(inst, 0) + 1
            if per_year:
                counts = yearly.setdefault(inst, {})
                counts[p.year] = counts.get(p.year, 0) + 1

    years = range(corpus.year_window[0], corpus.year_window[1] + 1)
    stats = []
    for inst in sorted(output):
        n = output[inst]
        t = top.get(inst, 0)
        if per_year:
            eligible = all(yearly[inst].get(y, 0) >= min_output for y in years)
        else:
            eligible = n >= min_output
        stats.append(
            InstitutionStats(
                institution_id=inst,
                output_n=n,
                top_t=t,
                excellence_pct=100.0 * t / n,
                eligible=eligible,
            )
        )
    return stats


def _rank_key(order_by: str):
    if order_by == "excellence":
        return lambda s: (-s.excellence_pct, -s.output_n, s.institution_id)
    if order_by == "output":
        return lambda s: (-s.output_n, -s.excellence_pct, s.institution_id)
    raise ValueError(f"unknown order_by {order_by!r}")


def rank(
    stats: Iterable[InstitutionStats],
    order_by: str = "excellence",
    metadata: dict[str, object] | None = None,
) -> RankingReport:
    """Order eligible institutions into a ranking report.

    Default order is excellence percentage descending, ties broken by
    output descending, then institution id ascending. ``order_by =
    "output"`` emulates rankings that sort by output instead. Ineligible
    institutions go to the appendix, unranked, in the same order.
    """
    key = _rank_key(order_by)
    eligible = sorted((s for s in stats if s.eligible), key=key)
    ineligible = sorted((s for s in stats if not s.eligible), key=key)
    rows = [RankedRow(rank=i, stats=s) for i, s in enumerate(eligible, start=1)]
    return RankingReport(
        rows=rows,
        appendix=ineligible,
        metadata=dict(metadata or {}),
    )


REPORT_COLUMNS = [
    "rank",
    "institution_id",
    "output",
    "top10_count",
    "excellence_pct",
    "verdict_vs_10pct",
    "z_vs_10pct",
]


def _row_cells(row: RankedRow) -> list[str]:
    s = row.stats
    return [
        str(row.rank),
        s.institution_id,
        str(s.output_n),
        str(s.top_t),
        display_pct(s.excellence_pct),
        row.verdict_vs_expected if row.verdict_vs_expected is not None else "-",
        f"{row.z_vs_expected:.3f}" if row.z_vs_expected is not None else "-",
    ]


def _appendix_cells(s: InstitutionStats) -> list[str]:
    return [
        "-",
        s.institution_id,
        str(s.output_n),
        str(s.top_t),
        display_pct(s.excellence_pct),
        "-",
        "-",
    ]


def report_to_tsv(report: RankingReport) -> str:
    lines = ["\t".join(REPORT_COLUMNS)]
    for row in report.rows:
        lines.append("\t".join(_row_cells(row)))
    for s in report.appendix:
        lines.append("\t".join(_appendix_cells(s)))
    return "\n".join(lines) + "\n"


def report_to_json(report: RankingReport) -> str:
    payload = {
        "metadata": report.metadata,
        "ranking": [
            {
                "rank": row.rank,
                "institution_id": row.stats.institution_id,
                "output": row.stats.output_n,
                "top10_count": row.stats.top_t,
                "excellence_pct": row.stats.excellence_pct,
                "excellence_pct_display": display_pct(row.stats.excellence_pct),
                "verdict_vs_10pct": row.verdict_vs_expected,
                "z_vs_10pct": row.z_vs_expected,
            }
            for row in report.rows
        ],
        "appendix": [
            {
                "institution_id": s.institution_id,
                "output": s.output_n,
                "top10_count": s.top_t,
                "excellence_pct": s.excellence_pct,
                "excellence_pct_display": display_pct(s.excellence_pct),
            }
            for s in report.appendix
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def report_to_table(report: RankingReport) -> str:
    """Human-readable fixed-width table."""
    header = REPORT_COLUMNS
    body = [_row_cells(row) for row in report.rows]
    appendix = [_appendix_cells(s) for s in report.appendix]
    all_rows = [header] + body + appendix
    widths = [max(len(r[i]) for r in all_rows) for i in range(len(header))]

    def fmt(cells: list[str]) -> str:
        return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()

    lines = [fmt(header), fmt(["-" * w for w in widths])]
    lines.extend(fmt(r) for r in body)
    if not body:
        lines.append("(no eligible institutions)")
    if appendix:
        lines.append("")
        lines.append("appendix (below output minimum, unranked):")
        lines.extend(fmt(r) for r in appendix)
    return "\n".join(lines) + "\n"
