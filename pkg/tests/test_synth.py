import numpy as np
import pytest

from excellence.corpus import dump_corpus
from excellence.synth import (
    Lognormal,
    NegativeBinomial,
    SynthConfig,
    generate,
    run_null_experiment,
    trial_seeds,
)

SMALL = SynthConfig(
    n_institutions=3,
    papers_per_institution=40,
    fields_count=4,
    years=(2003, 2004),
    seed=5,
)


def test_generate_counts_and_labels():
    corpus = generate(SMALL)
    assert len(corpus) == 120
    ids = [p.paper_id for p in corpus.papers]
    assert len(set(ids)) == 120
    assert ids[0] == "P0000001" and ids[-1] == "P0000120"
    for p in corpus.papers:
        assert p.subject_areas[0] in {"F1", "F2", "F3", "F4"}
        assert p.institutions[0] in {"INST1", "INST2", "INST3"}
        assert 2003 <= p.year <= 2004
        assert p.citations >= 0
    assert corpus.year_window == (2003, 2004)
    assert "seed=5" in corpus.provenance


def test_generate_is_deterministic(tmp_path):
    a = generate(SMALL)
    b = generate(SMALL)
    assert a == b
    pa, pb = tmp_path / "a.csv", tmp_path / "b.csv"
    dump_corpus(a, pa)
    dump_corpus(b, pb)
    assert pa.read_bytes() == pb.read_bytes()


def test_seed_changes_output():
    from dataclasses import replace

    a = generate(SMALL)
    b = generate(replace(SMALL, seed=6))
    assert a != b


def test_lognormal_is_right_skewed():
    rng = np.random.default_rng(77)
    sample = Lognormal(mu=1.0, sigma=1.2).sample(rng, 20_000)
    assert sample.dtype == np.int64
    assert sample.min() >= 0
    assert sample.mean() > np.median(sample)


def test_negative_binomial_sampling():
    rng = np.random.default_rng(78)
    sample = NegativeBinomial(r=1.0, p=0.6).sample(rng, 20_000)
    assert sample.min() >= 0
    # r=1 is geometric with success probability 0.6: mean (1-p)/p
    assert sample.mean() == pytest.approx(0.4 / 0.6, abs=0.05)


def test_model_validation():
    with pytest.raises(ValueError):
        Lognormal(mu=1.0, sigma=0.0)
    with pytest.raises(ValueError):
        NegativeBinomial(r=0.0, p=0.5)
    with pytest.raises(ValueError):
        NegativeBinomial(r=2.0, p=0.0)
    with pytest.raises(ValueError):
        NegativeBinomial(r=2.0, p=1.5)


def test_config_validation():
    with pytest.raises(ValueError):
        SynthConfig(n_institutions=0)
    with pytest.raises(ValueError):
        SynthConfig(papers_per_institution=-5)
    with pytest.raises(ValueError):
        SynthConfig(years=(2007, 2003))
    with pytest.raises(ValueError):
        SynthConfig(seed=-1)


def test_trial_seeds_deterministic_and_distinct():
    a = trial_seeds(42, 50)
    b = trial_seeds(42, 50)
    assert a == b
    assert len(set(a)) == 50
    assert trial_seeds(43, 50) != a


def test_run_null_experiment_smoke():
    result = run_null_experiment(SMALL, trials=4)
    assert result.trials == 4
    assert 1 <= result.tests <= 4 * SMALL.n_institutions
    assert 0.0 < result.mean_excellence_share < 1.0
    assert 0.0 <= result.type1_rate_05 <= 1.0
    assert 0.0 <= result.type1_rate_01 <= 1.0


def test_run_null_experiment_deterministic():
    a = run_null_experiment(SMALL, trials=3)
    b = run_null_experiment(SMALL, trials=3)
    assert a == b


def test_heavy_ties_inflate_flagged_share():
    config = SynthConfig(
        n_institutions=4,
        papers_per_institution=200,
        fields_count=2,
        years=(2003, 2004),
        citation_model=NegativeBinomial(r=1.0, p=0.6),
        seed=9,
    )
    result = run_null_experiment(config, trials=3)
    assert result.tie_inflation > 0.01


def test_trace_file(tmp_path):
    path = tmp_path / "trace.csv"
    run_null_experiment(SMALL, trials=4, trace_path=path)
    lines = path.read_text().splitlines()
    assert lines[0] == "trial,seed,tests,mean_share,rejects_05,rejects_01,flagged_share"
    assert len(lines) == 5


def test_trials_validation():
    with pytest.raises(ValueError):
        run_null_experiment(SMALL, trials=0)
