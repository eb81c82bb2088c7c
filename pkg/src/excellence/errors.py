"""Exception hierarchy shared across the package.

The CLI maps these onto its exit-code contract: data problems exit 2,
computation problems exit 3.
"""


class ExcellenceError(Exception):
    """Base class for all errors raised by this package."""


class DataError(ExcellenceError):
    """Input data is unusable: missing file, schema violation, duplicate
    ids, empty corpus, unknown or ineligible institution."""


class DuplicatePaperIdError(DataError):
    def __init__(self, paper_id: str, first_line: int, second_line: int):
        self.paper_id = paper_id
        self.first_line = first_line
        self.second_line = second_line
        super().__init__(
            f"duplicate paper_id {paper_id!r}: lines {first_line} and {second_line}"
        )


class EmptyCorpusError(DataError):
    pass


class UnknownInstitutionError(DataError):
    def __init__(self, institution_id: str):
        self.institution_id = institution_id
        super().__init__(f"unknown institution {institution_id!r}")


class IneligibleInstitutionError(DataError):
    def __init__(self, institution_id: str, output_n: int, min_output: int):
        self.institution_id = institution_id
        super().__init__(
            f"institution {institution_id!r} has output {output_n}, "
            f"below the eligibility minimum of {min_output}"
        )


class ComputationError(ExcellenceError):
    """A statistic is undefined for the given inputs."""


class NoVariabilityError(ComputationError):
    """Pooled proportion is 0 or 1, so the z statistic has a zero
    denominator."""

    def __init__(self, pooled_p: float):
        self.pooled_p = pooled_p
        super().__init__(
            f"no variability: pooled proportion is {pooled_p:g}, "
            "the z statistic is undefined"
        )
