import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fixscore.core import GroupSet, fix_score
from fixscore.errors import ArgumentError, ConfigurationError, ParseError
from fixscore.extractors import ExtractorConfig, patch_extract
from fixscore.harness import (Dataset, bootstrap_std, evaluate, format_table, load_dataset, load_report,
                              read_report_table, sample_seed, write_report)
from fixscore.massmaps import MassMap, MassMapScorer, massmap_expert_align
from fixscore.supernova import supernova_expert_align


def small_maps(n, seed=0):
    rng = np.random.default_rng(seed)
    return Dataset([MassMap(rng.normal(size=(6, 6))) for _ in range(n)], "image")


def test_bootstrap_examples():
    assert bootstrap_std([0.4] * 7, iters=50, seed=1) == 0.0
    assert bootstrap_std([0.9], iters=50, seed=1) == 0.0
    assert bootstrap_std([0.0, 1.0], iters=20000, seed=0) == pytest.approx(0.5 / math.sqrt(2), abs=0.01)
    with pytest.raises(ArgumentError):
        bootstrap_std([], iters=10)
    with pytest.raises(ArgumentError):
        bootstrap_std([1.0, 2.0], iters=0)


def test_bootstrap_reproducible_and_seeded():
    x = np.random.default_rng(0).random(20)
    assert bootstrap_std(x, 500, seed=3) == bootstrap_std(x, 500, seed=3)
    assert bootstrap_std(x, 500, seed=3) != bootstrap_std(x, 500, seed=4)


def test_bootstrap_converges_to_standard_error():
    x = np.random.default_rng(5).random(40)
    expected = x.std() / math.sqrt(x.size)
    assert bootstrap_std(x, 40000, seed=0) == pytest.approx(expected, rel=0.03)


def test_sample_seed():
    assert sample_seed(None, 3) is None
    assert sample_seed(1, 0) == sample_seed(1, 0)
    assert len({sample_seed(1, i) for i in range(100)}) == 100


def test_dataset_validation():
    with pytest.raises(ConfigurationError):
        Dataset([MassMap(np.zeros((2, 2)))], "series")
    with pytest.raises(ConfigurationError):
        Dataset([MassMap(np.zeros((2, 2)))], "image", annotations=[])
    with pytest.raises(ConfigurationError):
        Dataset([MassMap(np.zeros((2, 2)))], "image", annotations=[GroupSet(np.ones((1, 3), bool))])


def test_identity_matches_hand_oracle():
    ds = small_maps(10)
    r = evaluate(ds, "identity", "massmaps", boot_iters=100)
    hand = [massmap_expert_align(np.ones(36, bool), x) for x in ds.samples]
    assert r.scores == pytest.approx(hand, abs=1e-12)
    assert r.mean == pytest.approx(sum(hand) / len(hand), abs=1e-12)
    assert r.n == 10 and r.extractor == "identity" and r.scorer == "massmaps"


def test_one_sample_dataset():
    ds = small_maps(1)
    r = evaluate(ds, "patch:2x3", "massmaps", boot_iters=10)
    assert r.mean == r.scores[0]
    assert r.boot_std == 0.0


def test_explicit_expert_scores_one():
    rng = np.random.default_rng(1)
    samples, anns = [], []
    for _ in range(5):
        labels = rng.integers(0, 3, size=16)
        samples.append(MassMap(rng.normal(size=(4, 4))))
        anns.append(GroupSet.from_labels(labels))
    ds = Dataset(samples, "image", anns)
    r = evaluate(ds, "expert")
    assert r.scorer == "explicit"
    assert r.mean == 1.0
    assert evaluate(ds, "identity").mean < 1.0


def test_modality_mismatch_fails_before_work():
    ds = small_maps(2)
    with pytest.raises(ConfigurationError):
        evaluate(ds, "identity", "supernova")
    with pytest.raises(ConfigurationError):
        evaluate(ds, "slice:5", "massmaps")
    with pytest.raises(ConfigurationError):
        evaluate(ds, "random", "massmaps")
    with pytest.raises(ConfigurationError):
        evaluate(ds, "identity")


def test_workers_do_not_change_results():
    ds = small_maps(8)
    a = evaluate(ds, ExtractorConfig("random", {"groups": 5}), "massmaps", seed=4, boot_iters=50)
    b = evaluate(ds, ExtractorConfig("random", {"groups": 5}), "massmaps", seed=4, boot_iters=50, workers=4)
    assert a.scores == b.scores and a.mean == b.mean and a.boot_std == b.boot_std


@settings(max_examples=20, deadline=None)
@given(st.permutations(list(range(6))))
def test_mean_permutation_invariant(perm):
    ds = small_maps(6)
    shuffled = Dataset([ds.samples[i] for i in perm], "image")
    a = evaluate(ds, "patch:3x3", "massmaps", boot_iters=10).mean
    b = evaluate(shuffled, "patch:3x3", "massmaps", boot_iters=10).mean
    assert a == pytest.approx(b, abs=1e-15)


def test_report_roundtrip(tmp_path):
    r = evaluate(small_maps(3), "patch:2x2", "massmaps", seed=7, boot_iters=20)
    sidecar = write_report(r, tmp_path / "rep.tsv")
    assert sidecar.name == "rep.tsv.json"
    back = load_report(tmp_path / "rep.tsv")[0]
    assert back == r
    rows = read_report_table(tmp_path / "rep.tsv")
    assert list(rows[0]) == ["extractor", "scorer", "mean", "boot_std", "n", "seed"]
    assert float(rows[0]["mean"]) == r.mean
    assert rows[0]["extractor"] == "patch:2x2" and rows[0]["seed"] == "7"
    assert "patch:2x2" in format_table([r])


def test_load_report_errors(tmp_path):
    with pytest.raises(ParseError):
        load_report(tmp_path / "missing.tsv")
    (tmp_path / "x.tsv.json").write_text("{not json")
    with pytest.raises(ParseError):
        load_report(tmp_path / "x.tsv")


def test_load_dataset_corpus(corpus):
    maps = load_dataset(corpus / "massmaps", "image")
    assert len(maps) == 30 and not maps.explicit and maps.samples[0].d == 66 * 66
    curves = load_dataset(corpus / "supernova", "series")
    assert len(curves) == 30
    texts = load_dataset(corpus / "text", "text")
    assert len(texts) == 30 and texts.embeddings is not None and "*" in texts.lexica
    explicit = load_dataset(corpus / "explicit", "image")
    assert explicit.explicit and len(explicit.annotations) == 30


def test_load_dataset_errors(tmp_path, corpus):
    with pytest.raises(ParseError):
        load_dataset(tmp_path / "nope", "image")
    with pytest.raises(ParseError):
        load_dataset(tmp_path, "image")
    with pytest.raises(ConfigurationError):
        load_dataset(tmp_path, "audio")


def test_supernova_identity_oracle(corpus):
    ds = load_dataset(corpus / "supernova", "series")
    r = evaluate(ds, "identity", "supernova", boot_iters=10)
    hand = [supernova_expert_align(np.ones(x.d, bool), x) for x in ds.samples]
    assert r.scores == pytest.approx(hand, abs=1e-12)


def test_text_scorers_run(corpus):
    ds = load_dataset(corpus / "text", "text")
    for scorer in ("politeness", "emotion"):
        for ext in ("identity", "words", "phrases", "sentences"):
            r = evaluate(ds, ext, scorer, boot_iters=10)
            assert all(0.0 <= s <= 1.0 for s in r.scores)
    r = evaluate(ds, "identity", "emotion", boot_iters=10)
    assert max(r.scores) <= math.tanh(1.0)


def test_fix_score_consistency_with_evaluate():
    ds = small_maps(3)
    r = evaluate(ds, "patch:3x2", "massmaps", boot_iters=10)
    s = MassMapScorer()
    assert r.scores == [fix_score(patch_extract(x, 3, 2), x, s) for x in ds.samples]
