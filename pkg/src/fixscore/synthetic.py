"""Seeded synthetic corpora for smoke tests and the end-to-end benchmark.

Nothing here resembles the real datasets beyond shape and file format.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter

from . import io
from .core import GroupSet
from .massmaps import MassMap
from .supernova import LightCurve
from .text import ANCHOR_TEMPLATE, DEFAULT_ANCHORS

BANDS = ("u", "g", "r", "i", "z", "y")


def massmap(rng: np.random.Generator, size: int = 66) -> MassMap:
    """Smoothed Gaussian noise with a few bright peaks, roughly zero-centred."""
    field = gaussian_filter(rng.normal(size=(size, size)), 2.0)
    field /= field.std()
    for _ in range(rng.integers(2, 6)):
        r, c = rng.integers(0, size, 2)
        field[r, c] += rng.uniform(4, 8)
    return MassMap(np.round(0.02 * field, 6))


def lightcurve(rng: np.random.Generator, n_steps: int = 40, step: float = 2.0) -> LightCurve:
    """A few bands observed sparsely on a regular grid, flux following hump shapes."""
    grid = 60000.0 + step * np.arange(n_steps)
    peak = rng.uniform(grid[5], grid[-5])
    width = rng.uniform(8, 25)
    bands = rng.choice(BANDS, size=rng.integers(2, 5), replace=False)
    t, b, f, e = [], [], [], []
    for band in sorted(bands):
        amp = rng.uniform(50, 200)
        keep = rng.random(n_steps) < 0.45
        for ti in grid[keep]:
            err = rng.uniform(2, 10)
            flux = amp * max(0.0, 1 - abs(ti - peak) / width) + rng.normal(0, err)
            t.append(ti)
            b.append(band)
            f.append(round(flux, 4))
            e.append(round(err, 4))
    return LightCurve.from_observations(t, b, f, e, empty_times=grid)


_VOCAB = (
    "thanks please sorry appreciate kindly welcome great help maybe perhaps would could "
    "wrong stupid bad fix edit page article talk source think know see just really "
    "good nice terrible awful love hate calm tired angry sad glad fun weird boring the a "
    "you i we it this that is was be not very so and but"
).split()

_LEXICON = {
    "Gratitude": ["thanks", "appreciate"],
    "Apologizing": ["sorry"],
    "Please": ["please", "kindly"],
    "Hedges": ["maybe", "perhaps", "think"],
    "Deference": ["great", "good", "nice"],
    "Direct": ["wrong", "stupid", "bad"],
}


def embeddings(rng: np.random.Generator, dim: int = 16) -> dict[str, np.ndarray]:
    words = list(_VOCAB)
    anchors = sorted({w for ws in DEFAULT_ANCHORS.values() for w in ws})
    table = {w: rng.normal(size=dim) for w in words}
    # anchor phrases live near a two-dimensional valence/arousal subspace
    val, aro = rng.normal(size=(2, dim))
    coords = {
        "happy": (1, 0.2), "pleased": (0.9, 0), "delighted": (0.9, 0.4), "excited": (0.7, 0.7),
        "satisfied": (0.7, -0.7), "miserable": (-1, -0.1), "frustrated": (-0.8, 0.4),
        "sad": (-0.9, -0.3), "depressed": (-0.7, -0.7), "afraid": (-0.6, 0.8),
        "astonished": (0.2, 1), "alarmed": (-0.1, 1), "angry": (-0.5, 0.9),
        "tired": (-0.2, -1), "sleepy": (0, -1), "calm": (0.5, -0.9),
    }
    for w in anchors:
        v, a = coords[w]
        table[ANCHOR_TEMPLATE.format(w)] = v * val + a * aro + 0.05 * rng.normal(size=dim)
    return {w: np.round(vec, 6) for w, vec in table.items()}


def sentence(rng: np.random.Generator) -> str:
    parts = []
    for _ in range(rng.integers(1, 4)):
        clause = " ".join(rng.choice(_VOCAB, size=rng.integers(2, 7)))
        parts.append(clause)
    return ", ".join(parts) + str(rng.choice([".", "!", "?"]))


def text_record(rng: np.random.Generator) -> str:
    return " ".join(sentence(rng) for _ in range(rng.integers(1, 4)))


def explicit_image(rng: np.random.Generator, size: int = 24) -> tuple[MassMap, GroupSet]:
    """Raster with rectangular annotated regions plus a background region (full coverage)."""
    labels = np.zeros((size, size), dtype=np.int64)
    for k in range(1, rng.integers(2, 5) + 1):
        r0, c0 = rng.integers(0, size - 6, 2)
        h, w = rng.integers(3, 8, 2)
        labels[r0:r0 + h, c0:c0 + w] = k
    img = labels.astype(float) + 0.1 * rng.normal(size=labels.shape)
    return MassMap(img), GroupSet.from_labels(labels.reshape(-1), "annotation")


def write_corpus(root, n: int = 30, seed: int = 0) -> Path:
    """Write massmaps/, supernova/, text/ and explicit/ subfolders under ``root``."""
    root = Path(root)
    rng = np.random.default_rng(seed)
    for sub in ("massmaps", "supernova", "text", "explicit"):
        (root / sub).mkdir(parents=True, exist_ok=True)
    for i in range(n):
        io.write_raster(massmap(rng), root / "massmaps" / f"map{i:03d}.raster")
    for i in range(n):
        io.write_series(lightcurve(rng), root / "supernova" / f"curve{i:03d}.csv")
    table = embeddings(rng)
    io.write_embeddings(table, root / "text" / "embeddings.tsv")
    io.write_word_lists(_LEXICON, root / "text" / "lexicon.txt")
    io.write_word_lists({k: list(v) for k, v in DEFAULT_ANCHORS.items()}, root / "text" / "anchors.txt")
    (root / "text" / "texts.tsv").write_text("".join(f"en\t{text_record(rng)}\n" for _ in range(n)),
                                             encoding="utf-8")
    for i in range(n):
        img, ann = explicit_image(rng)
        io.write_raster(img, root / "explicit" / f"img{i:03d}.raster")
        io.write_masks(ann, root / "explicit" / f"img{i:03d}.rle")
    return root
