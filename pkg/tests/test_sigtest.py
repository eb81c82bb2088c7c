import numpy as np
import pytest

from excellence.errors import NoVariabilityError
from excellence.indicator import InstitutionStats
from excellence.sigtest import (
    ALPHA_PRIMARY,
    ALPHA_SECONDARY,
    ProportionInput,
    compare_all,
    critical_value,
    family_wise_adjust,
    observed_vs_expected,
    pairwise_csv,
    two_proportion_z,
)
from oracles import oracle_quantile, oracle_ztest


def random_inputs(rng, count):
    """Non-degenerate random test inputs."""
    made = 0
    while made < count:
        n1 = int(rng.integers(2, 100_000))
        n2 = int(rng.integers(2, 100_000))
        p1 = float(rng.uniform(0.0, 1.0))
        p2 = float(rng.uniform(0.0, 1.0))
        inp = ProportionInput(n1=n1, p1=p1, n2=n2, p2=p2)
        pooled = (inp.t1 + inp.t2) / (n1 + n2)
        if not 0.0 < pooled < 1.0:
            continue
        made += 1
        yield inp


def test_two_institution_example():
    inputs = ProportionInput.from_percent(37994, 28.9, 37885, 29.1)
    result = two_proportion_z(inputs)
    assert result.z == pytest.approx(-0.607, abs=1e-3)
    assert result.z == pytest.approx(
        oracle_ztest(37994, inputs.t1, 37885, inputs.t2), rel=1e-9
    )
    assert not result.significant_05
    assert not result.significant_01
    assert result.direction == -1
    assert result.verdict_vs_expected == "indistinguishable"


def test_critical_values():
    assert critical_value(0.05) == pytest.approx(1.96, abs=0.005)
    assert critical_value(0.01) == pytest.approx(2.576, abs=0.005)
    for alpha in (0.05, 0.01, 0.005, 0.10, 0.001):
        assert critical_value(alpha) == pytest.approx(oracle_quantile(alpha), rel=1e-12)


def test_critical_value_validates_alpha():
    for alpha in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            critical_value(alpha)


def test_matches_reference_implementation():
    rng = np.random.default_rng(500)
    for inp in random_inputs(rng, 300):
        ours = two_proportion_z(inp).z
        ref = oracle_ztest(inp.n1, inp.t1, inp.n2, inp.t2)
        assert ours == pytest.approx(ref, rel=1e-9), inp


def test_antisymmetry_is_exact():
    rng = np.random.default_rng(501)
    for inp in random_inputs(rng, 200):
        swapped = ProportionInput(n1=inp.n2, p1=inp.p2, n2=inp.n1, p2=inp.p1)
        assert two_proportion_z(swapped).z == -two_proportion_z(inp).z


def test_zero_z_for_equal_proportions():
    inp = ProportionInput(n1=400, p1=0.25, n2=900, p2=0.25)
    assert two_proportion_z(inp).z == 0.0


def test_z_increases_with_first_proportion():
    previous = None
    for p1 in (0.05, 0.10, 0.20, 0.40, 0.80):
        z = two_proportion_z(ProportionInput(n1=500, p1=p1, n2=500, p2=0.10)).z
        if previous is not None:
            assert z > previous
        previous = z


def test_no_variability_raises():
    with pytest.raises(NoVariabilityError) as exc_info:
        two_proportion_z(ProportionInput(n1=10, p1=0.0, n2=20, p2=0.0))
    assert exc_info.value.pooled_p == 0.0
    with pytest.raises(NoVariabilityError):
        two_proportion_z(ProportionInput(n1=10, p1=1.0, n2=20, p2=1.0))


def test_input_validation():
    with pytest.raises(ValueError):
        ProportionInput(n1=0, p1=0.5, n2=10, p2=0.5)
    with pytest.raises(ValueError):
        ProportionInput(n1=10, p1=0.5, n2=-3, p2=0.5)
    with pytest.raises(ValueError):
        ProportionInput(n1=10, p1=1.5, n2=10, p2=0.5)
    with pytest.raises(ValueError):
        ProportionInput(n1=10, p1=-0.1, n2=10, p2=0.5)
    with pytest.raises(ValueError):
        ProportionInput(n1=True, p1=0.5, n2=10, p2=0.5)
    with pytest.raises(ValueError):
        ProportionInput.from_percent(10, 120.0, 10, 50.0)


def test_from_counts_and_percent_agree():
    a = ProportionInput.from_counts(200, 50, 400, 100)
    b = ProportionInput.from_percent(200, 25.0, 400, 25.0)
    assert (a.p1, a.p2) == (b.p1, b.p2)
    assert a.t1 == 50.0 and a.t2 == 100.0


def test_observed_vs_expected_matches_reference():
    result = observed_vs_expected(1000, 0.14)
    assert result.z == pytest.approx(oracle_ztest(1000, 140.0, 1000, 100.0), rel=1e-12)
    # fractional expected count, as with the 10% baseline on odd n
    result = observed_vs_expected(37994, 0.289)
    assert result.z == pytest.approx(
        oracle_ztest(37994, 0.289 * 37994, 37994, 3799.4), rel=1e-9
    )


def test_verdict_above_below():
    assert observed_vs_expected(1000, 0.50).verdict_vs_expected == "above"
    assert observed_vs_expected(1000, 0.01).verdict_vs_expected == "below"
    assert observed_vs_expected(1000, 0.101).verdict_vs_expected == "indistinguishable"


def test_significance_at_01_implies_05():
    rng = np.random.default_rng(502)
    for inp in random_inputs(rng, 300):
        result = two_proportion_z(inp)
        if result.significant_01:
            assert result.significant_05


def test_family_wise_adjust():
    adj = family_wise_adjust(0.05, comparisons=10)
    assert adj.method == "bonferroni"
    assert adj.alpha_effective == pytest.approx(0.005)
    assert adj.critical_value == pytest.approx(oracle_quantile(0.005), rel=1e-12)
    none = family_wise_adjust(0.05, comparisons=10, method="none")
    assert none.alpha_effective == 0.05
    with pytest.raises(ValueError):
        family_wise_adjust(0.05, comparisons=0)
    with pytest.raises(ValueError):
        family_wise_adjust(0.05, comparisons=3, method="holm")


def test_correction_can_flip_significance():
    inp = ProportionInput(n1=500, p1=0.30, n2=500, p2=0.36)
    plain = two_proportion_z(inp)
    corrected = two_proportion_z(inp, correction="bonferroni", comparisons=50)
    assert plain.significant_05
    assert not corrected.significant_05
    assert corrected.alpha_effective == pytest.approx(0.001)
    assert corrected.critical_05 > plain.critical_05


def _stats(institution_id, n, t, eligible=True):
    return InstitutionStats(
        institution_id=institution_id,
        output_n=n,
        top_t=t,
        excellence_pct=100.0 * t / n,
        eligible=eligible,
    )


def test_compare_all_family_size():
    two = compare_all([_stats("A", 200, 30), _stats("B", 250, 20)])
    assert two.comparisons == 3  # one pair, two expectation tests
    assert len(two.pairwise) == 1
    assert len(two.expectation) == 2

    three = compare_all(
        [_stats("A", 200, 30), _stats("B", 250, 20), _stats("C", 150, 15)]
    )
    assert three.comparisons == 6
    assert len(three.pairwise) == 3


def test_compare_all_ignores_ineligible():
    result = compare_all([_stats("A", 200, 30), _stats("B", 30, 3, eligible=False)])
    assert result.comparisons == 1
    assert result.pairwise == []
    assert [e.institution_id for e in result.expectation] == ["A"]


def test_compare_all_empty():
    result = compare_all([])
    assert result.comparisons == 0
    assert result.pairwise == [] and result.expectation == []


def test_compare_all_skips_degenerate_pairs():
    result = compare_all([_stats("A", 100, 0), _stats("B", 120, 0)])
    assert result.pairwise == []
    assert len(result.skipped) == 1
    assert result.skipped[0][:2] == ("A", "B")
    # the expectation tests still run: pooled with the 10% baseline is fine
    assert len(result.expectation) == 2


def test_compare_all_bonferroni_alpha():
    stats = [_stats("A", 200, 30), _stats("B", 250, 20), _stats("C", 150, 15)]
    result = compare_all(stats, correction="bonferroni")
    for comparison in result.pairwise + result.expectation:
        assert comparison.result.alpha_effective == pytest.approx(0.05 / 6)


def test_pairwise_csv_shape():
    stats = [_stats("A", 200, 30), _stats("B", 250, 20)]
    text = pairwise_csv(compare_all(stats))
    lines = text.splitlines()
    assert lines[0] == "inst_a,inst_b,z,significant_05,significant_01,alpha_effective"
    cells = lines[1].split(",")
    assert cells[:2] == ["A", "B"]
    assert cells[2] == f"{two_proportion_z(ProportionInput(200, 0.15, 250, 0.08)).z:.6f}"
    assert cells[3] in ("true", "false") and cells[4] in ("true", "false")
    assert cells[5] == "0.05"
