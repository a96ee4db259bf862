import numpy as np
import pytest

from popcurve.curvefit import CurveLabel, classify_by_fit, detect_constant, detect_dying
from popcurve.errors import InvalidSpec
from popcurve.series import ingest_csv, preprocess
from popcurve.synth import (
    GenSpec,
    _mix_counts,
    generate,
    make_corpus,
    write_corpus,
)


def test_determinism():
    a, _ = generate(GenSpec(CurveLabel.GAUSSIAN, noise_sigma=0.02, seed=5))
    b, _ = generate(GenSpec(CurveLabel.GAUSSIAN, noise_sigma=0.02, seed=5))
    np.testing.assert_array_equal(a.values, b.values)
    c, _ = generate(GenSpec(CurveLabel.GAUSSIAN, noise_sigma=0.02, seed=6))
    assert not np.array_equal(a.values, c.values)


def test_constant_is_rule_constant():
    raw, _ = generate(GenSpec(CurveLabel.CONSTANT, noise_sigma=0.0, seed=1))
    assert detect_constant(preprocess(raw))


def test_dying_satisfies_rule():
    for seed in range(5):
        raw, _ = generate(GenSpec(CurveLabel.DYING, noise_sigma=0.02, seed=seed))
        assert detect_dying(preprocess(raw))


def test_gaussian_roundtrip_clean():
    raw, _ = generate(GenSpec(CurveLabel.GAUSSIAN, noise_sigma=0.0, seed=2))
    res = classify_by_fit(preprocess(raw))
    assert res.label == CurveLabel.GAUSSIAN
    assert res.rss <= 1e-6


def test_population_scale_in_range():
    raw, _ = generate(GenSpec(CurveLabel.OSCILLATION, noise_sigma=0.02, seed=3))
    assert 10.0 <= raw.values.max() <= 25000.0


def test_invalid_spec():
    with pytest.raises(InvalidSpec):
        GenSpec(CurveLabel.GAUSSIAN, noise_sigma=0.5)
    with pytest.raises(InvalidSpec):
        GenSpec("NotALabel")


def test_mix_counts_971():
    counts = _mix_counts(971)
    expected = {
        CurveLabel.EXPONENTIAL_GROWTH: 29,
        CurveLabel.CAPPED_GROWTH: 75,
        CurveLabel.DYING: 420,
        CurveLabel.OSCILLATION: 69,
        CurveLabel.CONSTANT: 162,
        CurveLabel.GAUSSIAN: 169,
        CurveLabel.OUTLIER: 47,
    }
    assert sum(counts.values()) == 971
    for lab, want in expected.items():
        assert abs(counts[lab] - want) <= 1


def test_corpus_counts_and_determinism():
    c1 = make_corpus(per_class=3, noise_sigma=0.02, seed=9, length=50)
    c2 = make_corpus(per_class=3, noise_sigma=0.02, seed=9, length=50)
    assert len(c1) == 21
    for (r1, l1), (r2, l2) in zip(c1, c2):
        assert l1 == l2
        np.testing.assert_array_equal(r1.values, r2.values)


def test_write_corpus_roundtrips_through_ingest(tmp_path):
    corpus = make_corpus(per_class=2, noise_sigma=0.02, seed=4, length=30)
    write_corpus(tmp_path, corpus, species_per_file=5)
    files = sorted(p for p in tmp_path.glob("*.csv") if p.name != "labels.csv")
    assert files
    total = 0
    for f in files:
        for raw in ingest_csv(f):
            total += 1
            assert raw.values.size == 30
    assert total == len(corpus)
    labels = (tmp_path / "labels.csv").read_text().strip().splitlines()
    assert len(labels) == len(corpus) + 1  # header


def test_write_corpus_identical_bytes(tmp_path):
    corpus = make_corpus(per_class=2, noise_sigma=0.02, seed=4, length=30)
    d1, d2 = tmp_path / "a", tmp_path / "b"
    write_corpus(d1, corpus)
    write_corpus(d2, corpus)
    for f1 in sorted(d1.iterdir()):
        assert f1.read_bytes() == (d2 / f1.name).read_bytes()
