"""Stratification and top-10% flagging.

Papers are grouped into (subject area, year) strata. Within a stratum of
N papers the core holds the ceil(0.10 * N) most-cited papers; the
threshold is the citation count of the last core paper, and every paper
with at least that many citations is flagged, so the flagged set can be
larger than the core when counts tie at the threshold.

A paper appearing in several subject areas is a member of each of those
strata and counts as excellent if any one of them flags it.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import Corpus

TOP_SHARE = 0.10
TINY_STRATUM = 10  # below this the 10% semantics degenerate to "top 1"


@dataclass(frozen=True, slots=True)
class StratumKey:
    subject_area: str
    year: int


@dataclass(frozen=True)
class Stratum:
    key: StratumKey
    size: int
    core_size: int
    threshold: int
    flagged_count: int
    flagged_ids: frozenset[str]

    @property
    def flagged_share(self) -> float:
        return self.flagged_count / self.size


@dataclass(frozen=True)
class ThresholdResult:
    core_size: int
    threshold: int
    flagged: frozenset[int]  # indices into the input sequence


def core_size(n: int) -> int:
    # ceil(0.10 * n) in exact integer arithmetic, no float rounding to
    # reason about
    if n < 1:
        raise ValueError("stratum must contain at least one paper")
    return (n + 9) // 10


def compute_threshold(citations: Sequence[int]) -> ThresholdResult:
    """Top-10% threshold for one stratum's citation counts.

    Returns the core size k = ceil(0.10 * N), the citation count of the
    k-th paper in descending order, and the indices of all papers at or
    above that threshold. Depends only on the multiset of counts, never
    on input order or on how ties are broken.
    """
    n = len(citations)
    k = core_size(n)
    threshold = sorted(citations, reverse=True)[k - 1]
    flagged = frozenset(i for i, c in enumerate(citations) if c >= threshold)
    return ThresholdResult(core_size=k, threshold=threshold, flagged=flagged)


def build_strata(corpus: Corpus) -> list[Stratum]:
    """Partition the corpus into (subject area, year) strata and compute
    each stratum's threshold and flagged set.

    A paper with m subject areas contributes one membership to each of
    its m strata, so stratum sizes sum to the number of
    (paper, subject area) pairs. Strata are returned sorted by key.
    """
    members: dict[StratumKey, list[tuple[str, int]]] = {}
    for p in corpus.papers:
        for area in p.subject_areas:
            members.setdefault(StratumKey(area, p.year), []).append(
                (p.paper_id, p.citations)
            )

    strata = []
    for key in sorted(members, key=lambda k: (k.subject_area, k.year)):
        rows = members[key]
        counts = [c for _, c in rows]
        res = compute_threshold(counts)
        flagged_ids = frozenset(rows[i][0] for i in res.flagged)
        strata.append(
            Stratum(
                key=key,
                size=len(rows),
                core_size=res.core_size,
                threshold=res.threshold,
                flagged_count=len(res.flagged),
                flagged_ids=flagged_ids,
            )
        )
    return strata


def flag_papers(corpus: Corpus, strata: Iterable[Stratum]) -> dict[str, bool]:
    """Combine per-stratum flags into one excellent flag per paper.

    A paper is excellent iff at least one of its subject-area strata
    flags it. The table covers every paper in the corpus exactly once.
    """
    excellent: set[str] = set()
    for s in strata:
        excellent.update(s.flagged_ids)
    return {p.paper_id: p.paper_id in excellent for p in corpus.papers}


def stratum_warnings(strata: Iterable[Stratum]) -> list[str]:
    """Diagnostics for strata where the 10% semantics degenerate."""
    warnings = []
    for s in strata:
        where = f"stratum ({s.key.subject_area}, {s.key.year})"
        if s.size < TINY_STRATUM:
            warnings.append(
                f"{where}: only {s.size} paper(s); top-10% degenerates to top-{s.core_size}"
            )
        if s.threshold == 0:
            warnings.append(
                f"{where}: threshold 0 flags all {s.size} paper(s)"
            )
    return warnings


def write_flag_table(flags: dict[str, bool], path: str | Path) -> None:
    """Export the paper-level flag table as CSV ``paper_id,excellent``."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["paper_id", "excellent"])
        for paper_id in sorted(flags):
            writer.writerow([paper_id, "true" if flags[paper_id] else "false"])


def write_stratum_diagnostics(strata: Iterable[Stratum], path: str | Path) -> None:
    """Export per-stratum diagnostics as CSV."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["subject_area", "year", "n", "core_size", "threshold", "flagged", "flagged_share"]
        )
        for s in strata:
            writer.writerow(
                [
                    s.key.subject_area,
                    s.key.year,
                    s.size,
                    s.core_size,
                    s.threshold,
                    s.flagged_count,
                    f"{s.flagged_share:.6f}",
                ]
            )
