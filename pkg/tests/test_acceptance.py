"""Acceptance suite. Each test prints as one PASS/FAIL line in the terminal summary.

The end-to-end check reads the bundled corpus in data/synthetic (regenerate
with scripts/make_corpus.py).
"""
import io as stdio
import math
import time
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from fixscore.cli import run
from fixscore.core import AlignmentScorer, ExplicitScorer, GroupSet, fix_score
from fixscore.extractors import ExtractorConfig, extract
from fixscore.harness import bootstrap_std, read_report_table
from fixscore.massmaps import MassMap, massmap_expert_align, purity, classify_pixels
from fixscore.supernova import (LightCurve, density_fraction, linear_fraction,
                                supernova_expert_align)
from fixscore.text import (Centroids, EmbeddingTable, TokenizedText, axes_from_anchor_means,
                           emotion_expert_align, politeness_expert_align)

from oracles import (brute_density_fraction, brute_linear_fraction, hand_emotion_identity,
                     hand_massmap_identity, hand_politeness_identity, hand_supernova_identity,
                     lstsq_predict, naive_fix_score, read_lists, read_raster, read_records, read_series,
                     read_table)

CORPUS = Path(__file__).resolve().parents[1] / "data" / "synthetic"


class TableScorer(AlignmentScorer):
    name = "table"
    modality = "image"

    def __init__(self, lookup):
        self.lookup = lookup

    def raw_score(self, mask, sample):
        return self.lookup(mask)


def flat(d):
    return MassMap(np.zeros((1, d)))


def covering_instance(rng, d, m):
    labels = rng.integers(0, m, size=d)
    labels[rng.permutation(d)[:m]] = np.arange(m)
    masks = labels[None, :] == np.arange(m)[:, None]
    # random extra overlap; coverage and non-emptiness survive
    masks |= rng.random((m, d)) < 0.2
    return GroupSet(masks)


def test_annotations_score_exactly_one():
    """Full-coverage annotations score FIXScore 1 on 100 random instances (1e-12, < 1 s)."""
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        d = int(rng.integers(1, 65))
        m = int(rng.integers(1, min(8, d) + 1))
        star = covering_instance(rng, d, m)
        assert star.masks.any(axis=0).all()
        worst = max(worst, abs(fix_score(star, flat(d), ExplicitScorer(star)) - 1.0))
    elapsed = time.perf_counter() - start
    assert worst <= 1e-12
    assert elapsed < 1.0


def test_fix_score_equals_naive_reference():
    """FIXScore equals a naive double loop exactly for every d <= 12, |G| <= 4 grid cell (< 10 s)."""
    rng = np.random.default_rng(7)
    values = [0.0, 0.1, 0.25, 1 / 3, 0.5, 2 / 3, 0.9, 1.0]
    start = time.perf_counter()
    checked = 0
    for d in range(1, 13):
        for m in range(0, 5):
            for _ in range(25):
                masks = rng.random((m, d)) < rng.uniform(0.1, 0.9)
                table = {}
                scores = []
                for row in masks:
                    key = row.tobytes()
                    if key not in table:
                        table[key] = values[rng.integers(len(values))] if row.any() else 0.0
                    scores.append(table[key])
                got = fix_score(GroupSet(masks.reshape(m, d)), flat(d), TableScorer(lambda g: table[g.tobytes()]))
                want = 0.0 if m == 0 else naive_fix_score(masks.tolist(), scores)
                assert got == want, (d, m, masks, scores)
                checked += 1
    assert checked == 12 * 5 * 25
    assert time.perf_counter() - start < 10.0


dup_case = st.integers(1, 30).flatmap(lambda d: st.tuples(
    st.just(d), st.integers(1, min(6, d)), st.integers(0, 2**32 - 1),
    st.lists(st.integers(0, 5), min_size=1, max_size=5)))


@settings(max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(dup_case)
def test_duplicates_keep_optimum(case):
    """Duplicating annotated groups keeps FIXScore at 1 (1000 property cases)."""
    d, m, seed, picks = case
    star = covering_instance(np.random.default_rng(seed), d, m)
    dup = GroupSet(np.concatenate([star.masks, star.masks[[p % m for p in picks]]]))
    assert fix_score(dup, flat(d), ExplicitScorer(star)) == pytest.approx(1.0, abs=1e-12)


diversity_case = st.integers(2, 30).flatmap(lambda d: st.tuples(
    st.just(d), st.integers(0, 2**32 - 1), st.floats(0.01, 1.0), st.integers(1, d - 1)))


@settings(max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(diversity_case)
def test_new_disjoint_group_adds_its_share(case):
    """A group over uncovered features raises FIXScore by exactly v*|g|/d (1e-12, 1000 cases)."""
    d, seed, v, covered = case
    rng = np.random.default_rng(seed)
    order = rng.permutation(d)
    inside = np.zeros(d, bool)
    inside[order[:covered]] = True
    m = int(rng.integers(1, 5))
    base = (rng.random((m, d)) < 0.6) & inside
    base[0, order[0]] = True
    new = np.zeros(d, bool)
    new[order[covered:]] = rng.random(d - covered) < 0.7
    new[order[covered]] = True
    vals = {row.tobytes(): float(rng.uniform(0, 1)) for row in base}
    vals[new.tobytes()] = v
    scorer = TableScorer(lambda g: vals[g.tobytes()])
    before = fix_score(GroupSet(base), flat(d), scorer)
    after = fix_score(GroupSet(np.vstack([base, new])), flat(d), scorer)
    assert after > before
    assert after - before == pytest.approx(v * new.sum() / d, abs=1e-12)


def test_massmap_corner_values():
    """Mass maps: all-void scores 1 (1e-4), half void/half cluster purity 0 (1e-4), all-neutral scores 0."""
    void = MassMap(-np.abs(np.random.default_rng(0).normal(size=(8, 8))) - 0.01)
    assert massmap_expert_align(np.ones(64, bool), void) == pytest.approx(1.0, abs=1e-4)
    px = np.zeros((10, 10))
    px[0, :5] = -1.0
    px[0, 5:] = 40.0
    x = MassMap(px)
    c = classify_pixels(x)
    g = np.zeros(100, bool)
    g[:10] = True
    assert c.void_mask[:5].all() and c.cluster_mask[5:10].all()
    assert purity(g, c) == pytest.approx(0.0, abs=1e-4)
    neutral = np.zeros(100, bool)
    neutral[10:] = True
    assert massmap_expert_align(neutral, x) == 0.0


def _curve(t, y, e, bands=None, empty=()):
    bands = bands or ["g"] * len(t)
    return LightCurve.from_observations(t, bands, y, e, empty)


curves = st.integers(1, 10).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 40), min_size=n, max_size=n, unique=True),
    st.lists(st.integers(-30, 30), min_size=n, max_size=n),
    st.lists(st.integers(0, 8), min_size=n, max_size=n),
    st.lists(st.booleans(), min_size=n, max_size=n)))


@settings(max_examples=1000, deadline=None)
@given(curves, st.sampled_from([0.5, 1.0, 3.0]), st.sampled_from([(10.0, 5.0), (4.0, 3.0), (1.0, 1.0)]))
def test_supernova_brute_force(case, eps, wl):
    """Supernova: p and d equal brute-force enumeration on curves with <= 10 points."""
    times, fluxes, errs, keep = case
    window, step = wl
    t = np.array(times, float)
    y = np.array(fluxes, float)
    e = np.array(errs, float)
    x = _curve(t, y, e)
    g = np.array([keep[times.index(int(v))] for v in x.grid])
    sel = [i for i in range(len(times)) if keep[i]]
    st_t = [float(times[i]) for i in sel]
    st_y = [float(fluxes[i]) for i in sel]
    st_e = [float(errs[i]) for i in sel]
    if len(set(st_t)) > 1:
        # skip points sitting within rounding of the tolerance band edge
        margin = np.abs(np.abs(lstsq_predict(st_t, st_y) - np.array(st_y)) - eps * np.array(st_e))
        assume(margin.min() > 1e-9)
    assert linear_fraction(g, x, eps) == brute_linear_fraction(st_t, st_y, st_e, eps)
    want_d = brute_density_fraction(min(st_t), max(st_t), st_t, window, step) if st_t else 0.0
    assert density_fraction(g, x, window, step) == want_d


def test_supernova_line_and_empty():
    """Supernova: an exact, fully dense line scores 1 (1e-9); an empty-timestamp group scores 0."""
    t = np.arange(0.0, 100.0, 5.0)
    line = _curve(t, 3.5 * t - 20.0, np.full(t.size, 0.5))
    assert supernova_expert_align(np.ones(line.d, bool), line) == pytest.approx(1.0, abs=1e-9)
    gappy = _curve(t, 3.5 * t, np.ones(t.size), empty=[2.0, 3.0, 51.0])
    g = np.isin(gappy.grid, [2.0, 3.0, 51.0])
    assert g.sum() == 3
    assert supernova_expert_align(g, gappy) == 0.0


def test_emotion_ceiling():
    """Emotion: an on-circle word scores tanh(1) (1e-9); 10^4 random groups never exceed it."""
    rng = np.random.default_rng(11)
    dim = 6
    vp, vn, ah, al = rng.normal(size=(4, dim))
    ax = axes_from_anchor_means(vp, vn, ah, al)
    vocab = {f"w{i}": rng.normal(scale=2.0, size=dim) for i in range(60)}
    vocab["anchor"] = vp
    emb = EmbeddingTable(vocab)
    one = TokenizedText(("anchor",))
    assert emotion_expert_align([1], one, ax, emb) == pytest.approx(math.tanh(1.0), abs=1e-9)
    words = tuple(vocab)
    x = TokenizedText(words)
    top = 0.0
    for _ in range(10_000):
        g = rng.random(len(words)) < rng.uniform(0.02, 0.5)
        if not g.any():
            g[rng.integers(len(words))] = True
        top = max(top, emotion_expert_align(g, x, ax, emb))
    assert top <= math.tanh(1.0)


def test_politeness_extremes():
    """Politeness: centroid-coincident group scores 1 (1e-9); orthogonal group scores 0."""
    cents = Centroids(("gratitude", "hedges"), np.array([[2.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]]))
    emb = EmbeddingTable({"thanks": [2.0, 1.0, 0.0, 0.0], "grateful": [4.0, 2.0, 0.0, 0.0],
                          "ortho": [0.0, 0.0, 0.0, 3.0]})
    x = TokenizedText(("thanks", "grateful", "ortho"))
    assert politeness_expert_align([1, 1, 0], x, cents, emb) == pytest.approx(1.0, abs=1e-9)
    assert politeness_expert_align([0, 0, 1], x, cents, emb) == 0.0


PARTITION_KINDS = {
    "image": [ExtractorConfig("identity"), ExtractorConfig("random", {"groups": 25}),
              ExtractorConfig("patch", {"rows": 3, "cols": 4}), ExtractorConfig("quickshift"),
              ExtractorConfig("quickshift", {"kernel_size": 1.0, "max_dist": 2.0}),
              ExtractorConfig("clustering", {"k": 3})],
    "series": [ExtractorConfig("identity"), ExtractorConfig("random", {"groups": 9}),
               ExtractorConfig("slice", {"width": 5}), ExtractorConfig("slice", {"width": 10}),
               ExtractorConfig("clustering", {"k": 3})],
    "text": [ExtractorConfig("identity"), ExtractorConfig("random", {"groups": 40}),
             ExtractorConfig("words"), ExtractorConfig("phrases"), ExtractorConfig("sentences"),
             ExtractorConfig("clustering", {"k": 3})],
}


def _random_input(modality, rng):
    if modality == "image":
        h, w = rng.integers(4, 17, 2)
        return MassMap(rng.normal(size=(h, w)) * rng.uniform(0.01, 3)), None
    if modality == "series":
        n = int(rng.integers(1, 40))
        t = np.sort(rng.choice(200, size=n, replace=False)).astype(float)
        bands = rng.choice(list("ugriz"), size=n)
        empty = rng.choice(200, size=int(rng.integers(0, 5))).astype(float)
        return LightCurve.from_observations(t, bands, rng.normal(size=n), rng.uniform(0, 1, n), empty), None
    vocab = ["alpha", "beta", "gamma", "delta", "eps"]
    toks = []
    for _ in range(int(rng.integers(1, 25))):
        toks.append(str(rng.choice(vocab)))
        if rng.random() < 0.25:
            toks[-1] += str(rng.choice(list(",;:.!?")))
    emb = EmbeddingTable({w: rng.normal(size=3) for w in vocab})
    return TokenizedText.from_raw(" ".join(toks)), emb


@pytest.mark.parametrize("modality", ["image", "series", "text"])
def test_partition_extractors(modality):
    """Partition extractors give disjoint masks whose union is all ones on 500 random inputs per modality."""
    rng = np.random.default_rng({"image": 1, "series": 2, "text": 3}[modality])
    for i in range(500):
        x, emb = _random_input(modality, rng)
        for cfg in PARTITION_KINDS[modality]:
            g = extract(cfg, x, embeddings=emb, seed=i)
            counts = g.masks.sum(axis=0)
            assert (counts == 1).all(), (modality, cfg.label, i)


def test_bootstrap_targets():
    """Bootstrap of {0,1} with 10^5 resamples is within 0.01 of 0.3536; constant input gives exactly 0."""
    assert abs(bootstrap_std([0.0, 1.0], iters=100_000, seed=0) - 0.3536) <= 0.01
    assert bootstrap_std([0.37] * 25, iters=100_000, seed=0) == 0.0


E2E = {
    "massmaps": ("massmaps", "image", ["identity", "random", "patch:8x8"]),
    "supernova": ("supernova", "series", ["identity", "random", "slice:5"]),
    "politeness": ("text", "text", ["identity", "random", "words"]),
    "emotion": ("text", "text", ["identity", "random", "words"]),
}


def _hand_identity(scorer):
    if scorer == "massmaps":
        return [hand_massmap_identity(read_raster(p)) for p in sorted((CORPUS / "massmaps").glob("*.raster"))]
    if scorer == "supernova":
        return [hand_supernova_identity(*read_series(p)) for p in sorted((CORPUS / "supernova").glob("*.csv"))]
    table = read_table(CORPUS / "text" / "embeddings.tsv")
    records = read_records(CORPUS / "text" / "texts.tsv")
    if scorer == "politeness":
        lex = read_lists(CORPUS / "text" / "lexicon.txt")
        return [hand_politeness_identity(w, table, lex) for w in records]
    anchors = read_lists(CORPUS / "text" / "anchors.txt")
    return [hand_emotion_identity(w, table, anchors) for w in records]


def test_end_to_end_tables(tmp_path):
    """End-to-end evaluate over the bundled corpus: < 60 s single worker, identity rows match a hand oracle (1e-9)."""
    assert CORPUS.is_dir(), "bundled corpus missing; run scripts/make_corpus.py"
    start = time.perf_counter()
    tables = {}
    for scorer, (sub, modality, extractors) in E2E.items():
        out = tmp_path / f"{scorer}.tsv"
        argv = ["evaluate", "--input", str(CORPUS / sub), "--modality", modality, "--scorer", scorer,
                "--seed", "0", "--workers", "1", "--out", str(out)]
        for e in extractors:
            argv += ["--extractor", e]
        code = run(argv, stdio.StringIO(), stdio.StringIO())
        assert code == 0
        tables[scorer] = read_report_table(out)
    assert time.perf_counter() - start < 60.0
    for scorer, rows in tables.items():
        assert [r["extractor"] for r in rows] == E2E[scorer][2]
        assert all(set(r) == {"extractor", "scorer", "mean", "boot_std", "n", "seed"} for r in rows)
        assert all(r["n"] == "30" and r["scorer"] == scorer for r in rows)
        hand = _hand_identity(scorer)
        assert len(hand) == 30
        assert float(rows[0]["mean"]) == pytest.approx(sum(hand) / 30, abs=1e-9)
