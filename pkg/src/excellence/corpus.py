"""Corpus ingestion: load, validate, and index publication records.

Input formats (documented in README, fixtures under tests/fixtures/):

* CSV, UTF-8, header required:
  ``paper_id,year,subject_areas,citations,institutions`` where
  ``subject_areas`` and ``institutions`` are ``|``-separated lists.
* JSONL: one object per line with the same five keys, the two list
  fields as JSON arrays of strings.

A loaded corpus is immutable; every downstream computation treats it as
read-only, so it can be shared freely across threads.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import DataError, DuplicatePaperIdError, EmptyCorpusError

CSV_HEADER = ["paper_id", "year", "subject_areas", "citations", "institutions"]
LIST_SEP = "|"


@dataclass(frozen=True, slots=True)
class PaperRecord:
    """One publication: id, year, subject areas, citations, institutions.

    ``subject_areas`` and ``institutions`` are stored as sorted tuples so
    records compare field-wise regardless of input order.
    """

    paper_id: str
    year: int
    subject_areas: tuple[str, ...]
    citations: int
    institutions: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "subject_areas", tuple(sorted(self.subject_areas)))
        object.__setattr__(self, "institutions", tuple(sorted(self.institutions)))


@dataclass(frozen=True)
class Corpus:
    """An immutable, validated publication set.

    Papers are kept sorted by ``paper_id``, so two corpora loaded from
    row-permuted files compare equal.
    """

    papers: tuple[PaperRecord, ...]
    year_window: tuple[int, int]
    provenance: str = ""

    def __post_init__(self):
        ordered = tuple(sorted(self.papers, key=lambda p: p.paper_id))
        object.__setattr__(self, "papers", ordered)

    def __len__(self) -> int:
        return len(self.papers)


@dataclass(frozen=True)
class RecordError:
    """A rejected input record, with its 1-based line number and reason."""

    line: int
    reason: str


@dataclass
class LoadResult:
    corpus: Corpus
    accepted: int
    rejected: list[RecordError] = field(default_factory=list)


@dataclass(frozen=True)
class CorpusSummary:
    papers: int
    institutions: int
    subject_areas: int
    per_year: dict[int, int]
    citation_total: int


def _validate_labels(values: list[str], what: str) -> tuple[str, ...]:
    """Check a list field: non-empty, no duplicates, no separator chars.

    Labels are opaque and case-sensitive; no trimming or canonicalization.
    """
    if not values:
        raise ValueError(f"empty {what}")
    seen = set()
    for v in values:
        if not isinstance(v, str) or v == "":
            raise ValueError(f"empty entry in {what}")
        if LIST_SEP in v:
            raise ValueError(f"{what} entry contains the list separator {LIST_SEP!r}")
        if v in seen:
            raise ValueError(f"duplicate entry {v!r} in {what}")
        seen.add(v)
    return tuple(sorted(values))


def _make_record(
    paper_id: object,
    year: object,
    subject_areas: list[str],
    citations: object,
    institutions: list[str],
) -> PaperRecord:
    if not isinstance(paper_id, str) or paper_id == "":
        raise ValueError("missing paper_id")
    if not isinstance(year, int):
        raise ValueError("year is not an integer")
    if not isinstance(citations, int):
        raise ValueError("citations is not an integer")
    if citations < 0:
        raise ValueError("negative citations")
    return PaperRecord(
        paper_id=paper_id,
        year=year,
        subject_areas=_validate_labels(subject_areas, "subject_areas"),
        citations=citations,
        institutions=_validate_labels(institutions, "institutions"),
    )


def _parse_csv_row(row: dict[str, str]) -> PaperRecord:
    missing = [c for c in CSV_HEADER if row.get(c) in (None, "")]
    if missing:
        raise ValueError(f"missing field {missing[0]}")
    try:
        year = int(row["year"])
    except ValueError:
        raise ValueError(f"year is not an integer: {row['year']!r}") from None
    try:
        citations = int(row["citations"])
    except ValueError:
        raise ValueError(f"citations is not an integer: {row['citations']!r}") from None
    return _make_record(
        row["paper_id"],
        year,
        row["subject_areas"].split(LIST_SEP),
        citations,
        row["institutions"].split(LIST_SEP),
    )


def _parse_jsonl_line(line: str) -> PaperRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid JSON: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise ValueError("line is not a JSON object")
    missing = [k for k in CSV_HEADER if k not in obj]
    if missing:
        raise ValueError(f"missing field {missing[0]}")
    for key in ("subject_areas", "institutions"):
        if not isinstance(obj[key], list):
            raise ValueError(f"{key} is not a list")
    # bool is an int subclass; reject it explicitly
    for key in ("year", "citations"):
        if isinstance(obj[key], bool):
            raise ValueError(f"{key} is not an integer")
    return _make_record(
        obj["paper_id"],
        obj["year"],
        obj["subject_areas"],
        obj["citations"],
        obj["institutions"],
    )


def _iter_rows(path: Path, format: str) -> Iterable[tuple[int, PaperRecord | None, str | None]]:
    """Yield (line_number, record, error_reason) triples.

    Line numbers are 1-based file lines: CSV data starts at line 2
    (after the header), JSONL at line 1.
    """
    if format == "csv":
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise DataError(f"{path}: empty file, header required")
            if list(reader.fieldnames) != CSV_HEADER:
                raise DataError(
                    f"{path}: bad header {reader.fieldnames!r}, expected {CSV_HEADER!r}"
                )
            for row in reader:
                line = reader.line_num
                if row.get(None) is not None:
                    yield line, None, "too many columns"
                    continue
                try:
                    yield line, _parse_csv_row(row), None
                except ValueError as exc:
                    yield line, None, str(exc)
    elif format == "jsonl":
        with open(path, encoding="utf-8") as fh:
            for line_num, line in enumerate(fh, start=1):
                if line.strip() == "":
                    continue
                try:
                    yield line_num, _parse_jsonl_line(line), None
                except ValueError as exc:
                    yield line_num, None, str(exc)
    else:
        raise ValueError(f"unknown format {format!r}")


def load_corpus(
    path: str | Path,
    format: str = "csv",
    window: tuple[int, int] | None = None,
    provenance: str | None = None,
) -> LoadResult:
    """Load and validate a corpus file.

    Malformed records (missing fields, negative citations, empty list
    fields, years outside ``window``) are rejected individually and
    reported with their line numbers. Duplicate paper ids and an empty
    result set are hard failures.

    ``window`` is the inclusive publication-year range. When omitted it
    is inferred as the [min, max] of the accepted records.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"input file not found: {path}")
    if window is not None and window[0] > window[1]:
        raise ValueError(f"invalid year window {window!r}")

    records: list[PaperRecord] = []
    rejected: list[RecordError] = []
    first_line_of: dict[str, int] = {}

    for line, record, reason in _iter_rows(path, format):
        if record is None:
            rejected.append(RecordError(line, reason or "invalid record"))
            continue
        prev = first_line_of.get(record.paper_id)
        if prev is not None:
            raise DuplicatePaperIdError(record.paper_id, prev, line)
        first_line_of[record.paper_id] = line
        if window is not None and not (window[0] <= record.year <= window[1]):
            rejected.append(
                RecordError(line, f"year {record.year} outside window {window[0]}-{window[1]}")
            )
            continue
        records.append(record)

    if not records:
        raise EmptyCorpusError(f"{path}: no valid records loaded")

    if window is None:
        window = (min(r.year for r in records), max(r.year for r in records))
    corpus = Corpus(
        papers=tuple(sorted(records, key=lambda r: r.paper_id)),
        year_window=window,
        provenance=provenance if provenance is not None else str(path),
    )
    return LoadResult(corpus=corpus, accepted=len(records), rejected=rejected)


def dump_corpus(corpus: Corpus, path: str | Path, format: str = "csv") -> None:
    """Serialize a corpus back to disk in canonical form.

    Papers are written in paper_id order with list fields sorted, so a
    dump/load round trip reproduces an equal corpus.
    """
    path = Path(path)
    if format == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for p in corpus.papers:
                writer.writerow(
                    [
                        p.paper_id,
                        p.year,
                        LIST_SEP.join(p.subject_areas),
                        p.citations,
                        LIST_SEP.join(p.institutions),
                    ]
                )
    elif format == "jsonl":
        with open(path, "w", encoding="utf-8") as fh:
            for p in corpus.papers:
                fh.write(
                    json.dumps(
                        {
                            "paper_id": p.paper_id,
                            "year": p.year,
                            "subject_areas": list(p.subject_areas),
                            "citations": p.citations,
                            "institutions": list(p.institutions),
                        },
                        sort_keys=False,
                    )
                )
                fh.write("\n")
    else:
        raise ValueError(f"unknown format {format!r}")


def corpus_summary(corpus: Corpus) -> CorpusSummary:
    """Counts of papers, institutions, subject areas, per-year output,
    and total citations."""
    institutions: set[str] = set()
    areas: set[str] = set()
    per_year: dict[int, int] = {}
    total = 0
    for p in corpus.papers:
        institutions.update(p.institutions)
        areas.update(p.subject_areas)
        per_year[p.year] = per_year.get(p.year, 0) + 1
        total += p.citations
    return CorpusSummary(
        papers=len(corpus.papers),
        institutions=len(institutions),
        subject_areas=len(areas),
        per_year=dict(sorted(per_year.items())),
        citation_total=total,
    )
