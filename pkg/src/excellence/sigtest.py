"""z-test for two independent proportions, with the observed-vs-expected
variant and Bonferroni family-wise adjustment.

The statistic uses the pooled proportion in the standard error:

    z = (p1 - p2) / sqrt(p * (1 - p) * (1/n1 + 1/n2))
    p = (t1 + t2) / (n1 + n2)

where n1, n2 are the institutions' output counts, p1, p2 their
excellence indicators as fractions, and t1 = p1 * n1, t2 = p2 * n2 their
top-10% paper counts. The t values may be fractional: when a proportion
comes from a published percentage rounded to one decimal, the implied
count rarely is a whole number, and it is used as is.

Testing an observed indicator against the stochastic expectation uses
the same statistic with n1 = n2 = n and p2 fixed at the expected share
(10% by default). All tests are two-sided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from statistics import NormalDist
from typing import Iterable

from .errors import NoVariabilityError
from .indicator import InstitutionStats, RankingReport

EXPECTED_SHARE = 0.10
ALPHA_PRIMARY = 0.05
ALPHA_SECONDARY = 0.01

_STD_NORMAL = NormalDist()


@dataclass(frozen=True)
class ProportionInput:
    """Two proportions with their sample sizes.

    top-10% counts are derived, not stored: t1 = p1 * n1, t2 = p2 * n2.
    """

    n1: int
    p1: float
    n2: int
    p2: float

    def __post_init__(self):
        for name, n in (("n1", self.n1), ("n2", self.n2)):
            if not isinstance(n, int) or isinstance(n, bool) or n < 1:
                raise ValueError(f"{name} must be a positive integer, got {n!r}")
        for name, p in (("p1", self.p1), ("p2", self.p2)):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p!r}")

    @property
    def t1(self) -> float:
        return self.p1 * self.n1

    @property
    def t2(self) -> float:
        return self.p2 * self.n2

    @classmethod
    def from_counts(cls, n1: int, t1: float, n2: int, t2: float) -> "ProportionInput":
        return cls(n1=n1, p1=t1 / n1, n2=n2, p2=t2 / n2)

    @classmethod
    def from_percent(cls, n1: int, pct1: float, n2: int, pct2: float) -> "ProportionInput":
        """Build from percentages as printed in ranking reports."""
        for name, pct in (("pct1", pct1), ("pct2", pct2)):
            if not 0.0 <= pct <= 100.0:
                raise ValueError(f"{name} must lie in [0, 100], got {pct!r}")
        return cls(n1=n1, p1=pct1 / 100.0, n2=n2, p2=pct2 / 100.0)


@dataclass(frozen=True)
class FamilyWiseAdjustment:
    method: str
    comparisons: int
    alpha: float
    alpha_effective: float
    critical_value: float


@dataclass(frozen=True)
class ProportionTestResult:
    """Outcome of one two-proportion z-test.

    ``significant_05`` and ``significant_01`` classify |z| against the
    two-sided critical values for the 5% and 1% family levels, both
    divided by the number of comparisons when Bonferroni correction is
    on; ``alpha_effective`` is the corrected 5%-family alpha actually
    used.
    """

    inputs: ProportionInput
    z: float
    pooled_p: float
    significant_05: bool
    significant_01: bool
    alpha_effective: float
    critical_05: float
    critical_01: float
    direction: int  # sign of p1 - p2

    @property
    def verdict_vs_expected(self) -> str:
        """Classify p1 against p2 at the (corrected) 5% family level:
        ``above``, ``below``, or ``indistinguishable``."""
        if self.z > self.critical_05:
            return "above"
        if self.z < -self.critical_05:
            return "below"
        return "indistinguishable"


def critical_value(alpha: float) -> float:
    """Two-sided standard-normal critical value: |z| beyond it is
    significant at level ``alpha`` (1.96 at 5%, 2.576 at 1%)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    return _STD_NORMAL.inv_cdf(1.0 - alpha / 2.0)


def family_wise_adjust(
    alpha: float, comparisons: int, method: str = "bonferroni"
) -> FamilyWiseAdjustment:
    """Adjust a significance level for a family of tests.

    Interpreting many tests jointly accumulates Type-I errors, so a
    stricter per-test level is needed. Bonferroni divides alpha by the
    number of comparisons; ``none`` leaves it unchanged.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    if not isinstance(comparisons, int) or isinstance(comparisons, bool) or comparisons < 1:
        raise ValueError(f"comparisons must be a positive integer, got {comparisons!r}")
    if method == "bonferroni":
        effective = alpha / comparisons
    elif method == "none":
        effective = alpha
    else:
        raise ValueError(f"unknown correction method {method!r}")
    return FamilyWiseAdjustment(
        method=method,
        comparisons=comparisons,
        alpha=alpha,
        alpha_effective=effective,
        critical_value=critical_value(effective),
    )


def two_proportion_z(
    inputs: ProportionInput,
    correction: str = "none",
    comparisons: int = 1,
    alpha: float = ALPHA_PRIMARY,
) -> ProportionTestResult:
    """Pooled z-test for the difference between two proportions.

    Raises :class:`NoVariabilityError` when the pooled proportion is 0
    or 1, since the standard error is then zero and the statistic
    undefined.
    """
    pooled = (inputs.t1 + inputs.t2) / (inputs.n1 + inputs.n2)
    if pooled <= 0.0 or pooled >= 1.0:
        raise NoVariabilityError(pooled)
    se = math.sqrt(pooled * (1.0 - pooled) * (1.0 / inputs.n1 + 1.0 / inputs.n2))
    z = (inputs.p1 - inputs.p2) / se
    primary = family_wise_adjust(alpha, comparisons, correction)
    secondary = family_wise_adjust(ALPHA_SECONDARY, comparisons, correction)
    diff = inputs.p1 - inputs.p2
    return ProportionTestResult(
        inputs=inputs,
        z=z,
        pooled_p=pooled,
        significant_05=abs(z) > primary.critical_value,
        significant_01=abs(z) > secondary.critical_value,
        alpha_effective=primary.alpha_effective,
        critical_05=primary.critical_value,
        critical_01=secondary.critical_value,
        direction=0 if diff == 0 else (1 if diff > 0 else -1),
    )


def observed_vs_expected(
    n: int,
    p_observed: float,
    p_expected: float = EXPECTED_SHARE,
    correction: str = "none",
    comparisons: int = 1,
    alpha: float = ALPHA_PRIMARY,
) -> ProportionTestResult:
    """Test an observed excellence share against the expected one.

    Uses the two-proportion statistic with n1 = n2 = n and p2 fixed at
    ``p_expected``; the expected count t2 = p_expected * n is fractional
    and used as is.
    """
    return two_proportion_z(
        ProportionInput(n1=n, p1=p_observed, n2=n, p2=p_expected),
        correction=correction,
        comparisons=comparisons,
        alpha=alpha,
    )


@dataclass(frozen=True)
class PairwiseComparison:
    inst_a: str
    inst_b: str
    result: ProportionTestResult


@dataclass(frozen=True)
class ExpectationComparison:
    institution_id: str
    result: ProportionTestResult


@dataclass
class ComparisonSet:
    pairwise: list[PairwiseComparison]
    expectation: list[ExpectationComparison]
    comparisons: int  # family size m used for the correction
    skipped: list[tuple[str, str, str]]  # (inst_a, inst_b, reason)


def compare_all(
    stats: Iterable[InstitutionStats],
    correction: str = "none",
    alpha: float = ALPHA_PRIMARY,
    p_expected: float = EXPECTED_SHARE,
) -> ComparisonSet:
    """All pairwise tests between eligible institutions plus each
    institution's observed-vs-expected test.

    The family size m is the total number of tests performed (pairs plus
    expectation tests) and is applied when ``correction`` is enabled.
    Pairs where both institutions have a degenerate pooled proportion
    (both 0% or both 100%) are skipped and reported, not errored.
    """
    eligible = sorted(
        (s for s in stats if s.eligible), key=lambda s: s.institution_id
    )
    pairs = list(combinations(eligible, 2))
    m = len(pairs) + len(eligible)
    if m == 0:
        return ComparisonSet(pairwise=[], expectation=[], comparisons=0, skipped=[])
    comparisons = m if correction != "none" else 1

    pairwise = []
    skipped = []
    for a, b in pairs:
        inp = ProportionInput(
            n1=a.output_n,
            p1=a.excellence_pct / 100.0,
            n2=b.output_n,
            p2=b.excellence_pct / 100.0,
        )
        try:
            res = two_proportion_z(
                inp, correction=correction, comparisons=comparisons, alpha=alpha
            )
        except NoVariabilityError as exc:
            skipped.append((a.institution_id, b.institution_id, str(exc)))
            continue
        pairwise.append(PairwiseComparison(a.institution_id, b.institution_id, res))

    expectation = [
        ExpectationComparison(
            s.institution_id,
            observed_vs_expected(
                s.output_n,
                s.excellence_pct / 100.0,
                p_expected=p_expected,
                correction=correction,
                comparisons=comparisons,
                alpha=alpha,
            ),
        )
        for s in eligible
    ]
    return ComparisonSet(
        pairwise=pairwise, expectation=expectation, comparisons=m, skipped=skipped
    )


def annotate_ranking(
    report: RankingReport,
    correction: str = "none",
    alpha: float = ALPHA_PRIMARY,
    p_expected: float = EXPECTED_SHARE,
) -> RankingReport:
    """Fill each ranked row's expectation verdict and z value in place.

    With correction enabled the family is the set of per-row expectation
    tests, so m equals the number of ranked rows.
    """
    comparisons = len(report.rows) if correction != "none" and report.rows else 1
    for row in report.rows:
        res = observed_vs_expected(
            row.stats.output_n,
            row.stats.excellence_pct / 100.0,
            p_expected=p_expected,
            correction=correction,
            comparisons=comparisons,
            alpha=alpha,
        )
        row.verdict_vs_expected = res.verdict_vs_expected
        row.z_vs_expected = res.z
    return report


def pairwise_csv(comparison_set: ComparisonSet) -> str:
    """Render pairwise results as CSV
    ``inst_a,inst_b,z,significant_05,significant_01,alpha_effective``."""
    lines = ["inst_a,inst_b,z,significant_05,significant_01,alpha_effective"]
    for pc in comparison_set.pairwise:
        r = pc.result
        lines.append(
            f"{pc.inst_a},{pc.inst_b},{r.z:.6f},"
            f"{str(r.significant_05).lower()},{str(r.significant_01).lower()},"
            f"{r.alpha_effective:.6g}"
        )
    return "\n".join(lines) + "\n"
