"""Field-normalized top-10% excellence indicator with significance tests.

The pipeline: load a corpus, stratify by (subject area, year), flag the
top-10% most cited papers per stratum with inclusive tie handling,
aggregate flags into per-institution excellence percentages, and test
differences with pooled two-proportion z-tests.
"""

from .corpus import Corpus, LoadResult, PaperRecord, corpus_summary, dump_corpus, load_corpus
from .errors import (
    ComputationError,
    DataError,
    DuplicatePaperIdError,
    EmptyCorpusError,
    ExcellenceError,
    IneligibleInstitutionError,
    NoVariabilityError,
    UnknownInstitutionError,
)
from .indicator import (
    DEFAULT_MIN_OUTPUT,
    InstitutionStats,
    RankingReport,
    aggregate,
    display_pct,
    rank,
)
from .sigtest import (
    ALPHA_PRIMARY,
    ALPHA_SECONDARY,
    EXPECTED_SHARE,
    ProportionInput,
    ProportionTestResult,
    compare_all,
    critical_value,
    family_wise_adjust,
    observed_vs_expected,
    two_proportion_z,
)
from .stratify import Stratum, StratumKey, build_strata, core_size, compute_threshold, flag_papers
from .synth import Lognormal, NegativeBinomial, SynthConfig, generate, run_null_experiment

__version__ = "0.1.0"

__all__ = [
    "ALPHA_PRIMARY",
    "ALPHA_SECONDARY",
    "Corpus",
    "ComputationError",
    "DEFAULT_MIN_OUTPUT",
    "DataError",
    "DuplicatePaperIdError",
    "EmptyCorpusError",
    "EXPECTED_SHARE",
    "ExcellenceError",
    "IneligibleInstitutionError",
    "InstitutionStats",
    "LoadResult",
    "Lognormal",
    "NegativeBinomial",
    "NoVariabilityError",
    "PaperRecord",
    "ProportionInput",
    "ProportionTestResult",
    "RankingReport",
    "Stratum",
    "StratumKey",
    "SynthConfig",
    "UnknownInstitutionError",
    "aggregate",
    "build_strata",
    "compare_all",
    "compute_threshold",
    "core_size",
    "corpus_summary",
    "critical_value",
    "display_pct",
    "dump_corpus",
    "family_wise_adjust",
    "flag_papers",
    "generate",
    "load_corpus",
    "observed_vs_expected",
    "rank",
    "run_null_experiment",
    "two_proportion_z",
]
