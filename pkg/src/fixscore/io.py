"""File formats: rasters, light-curve CSVs, text records, embeddings, word lists, masks.

Raster
    first line ``H W``, then ``H`` lines of ``W`` whitespace-separated decimals.
Mask file (annotations / group sets)
    one mask per line, ``label<TAB>runs``; ``runs`` are space-separated
    run lengths alternating zeros and ones, starting with a (possibly 0)
    run of zeros, summing to ``d``. Lines starting with ``#`` are comments.
Light curve CSV
    header ``time,band,flux,flux_err``. A row with empty band, flux and
    flux_err declares a timestamp without data.
Text records
    ``language<TAB>raw text`` per line.
Embeddings
    ``word<TAB>v1 v2 ... ve`` per line.
Word lists (lexica, circumplex anchors)
    ``category: w1, w2, ...`` per line.
"""
from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .core import GroupSet
from .errors import ParseError
from .massmaps import MassMap
from .supernova import LightCurve
from .text import EmbeddingTable, Lexicon, TokenizedText

SERIES_HEADER = ["time", "band", "flux", "flux_err"]


def _float(token: str, path, line: int, field: str) -> float:
    try:
        v = float(token)
    except ValueError:
        raise ParseError(f"not a number: {token!r}", path, line, field) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite value {token!r}", path, line, field)
    return v


def _lines(path) -> list[str]:
    try:
        return Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", path) from None


def load_raster(path, name: str | None = None) -> MassMap:
    lines = [ln for ln in _lines(path)]
    if not lines or not lines[0].strip():
        raise ParseError("missing 'H W' header", path, 1)
    head = lines[0].split()
    if len(head) != 2:
        raise ParseError("header must be 'H W'", path, 1)
    try:
        H, W = int(head[0]), int(head[1])
    except ValueError:
        raise ParseError("header must hold two integers", path, 1) from None
    if H < 1 or W < 1:
        raise ParseError("raster dimensions must be positive", path, 1)
    body = [(i, ln) for i, ln in enumerate(lines[1:], start=2) if ln.strip()]
    if len(body) != H:
        raise ParseError(f"expected {H} rows, found {len(body)}", path)
    rows = []
    for lineno, ln in body:
        toks = ln.split()
        if len(toks) != W:
            raise ParseError(f"expected {W} values, found {len(toks)}", path, lineno)
        rows.append([_float(t, path, lineno, f"col {j + 1}") for j, t in enumerate(toks)])
    return MassMap(np.array(rows), name if name is not None else Path(path).stem)


def write_raster(x: MassMap | np.ndarray, path) -> None:
    px = x.pixels if isinstance(x, MassMap) else np.asarray(x, dtype=float)
    H, W = px.shape
    out = [f"{H} {W}"] + [" ".join(repr(float(v)) for v in row) for row in px]
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


def encode_rle(mask) -> str:
    mask = np.asarray(mask, dtype=bool).reshape(-1)
    runs = []
    current = False
    count = 0
    for bit in mask:
        if bit == current:
            count += 1
        else:
            runs.append(count)
            current = bool(bit)
            count = 1
    runs.append(count)
    return " ".join(str(r) for r in runs)


def decode_rle(text: str, d: int, path=None, line: int | None = None) -> np.ndarray:
    try:
        runs = [int(t) for t in text.split()]
    except ValueError:
        raise ParseError("run lengths must be integers", path, line, "runs") from None
    if any(r < 0 for r in runs):
        raise ParseError("negative run length", path, line, "runs")
    if sum(runs) != d:
        raise ParseError(f"runs sum to {sum(runs)}, expected d={d}", path, line, "runs")
    bits = np.repeat(np.arange(len(runs)) % 2 == 1, runs)
    return bits


def load_masks(path, d: int) -> tuple[GroupSet, list[str]]:
    masks, labels = [], []
    for lineno, ln in enumerate(_lines(path), start=1):
        if not ln.strip() or ln.lstrip().startswith("#"):
            continue
        label, tab, runs = ln.partition("\t")
        if not tab:
            raise ParseError("expected 'label<TAB>runs'", path, lineno)
        masks.append(decode_rle(runs, d, path, lineno))
        labels.append(label.strip())
    return GroupSet.from_masks(masks, d, provenance=str(path)), labels


def write_masks(groups: GroupSet, path, labels=None) -> None:
    labels = labels or [f"g{j}" for j in range(len(groups))]
    lines = [f"{lab}\t{encode_rle(m)}" for lab, m in zip(labels, groups.masks)]
    Path(path).write_text("".join(ln + "\n" for ln in lines), encoding="utf-8")


def load_series(path, name: str | None = None) -> LightCurve:
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", path) from None
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != SERIES_HEADER:
            raise ParseError(f"header must be {','.join(SERIES_HEADER)}", path, 1)
        time, band, flux, err, empty = [], [], [], [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or not any(c.strip() for c in row):
                continue
            if len(row) != 4:
                raise ParseError(f"expected 4 fields, found {len(row)}", path, lineno)
            t = _float(row[0], path, lineno, "time")
            b, f, e = (c.strip() for c in row[1:])
            if not b and not f and not e:
                empty.append(t)
                continue
            if not b:
                raise ParseError("missing band", path, lineno, "band")
            fv = _float(f, path, lineno, "flux")
            ev = _float(e, path, lineno, "flux_err")
            if ev < 0:
                raise ParseError("flux_err must be non-negative", path, lineno, "flux_err")
            time.append(t)
            band.append(b)
            flux.append(fv)
            err.append(ev)
    if not time and not empty:
        raise ParseError("no observations", path)
    return LightCurve.from_observations(time, band, flux, err, empty,
                                        name if name is not None else Path(path).stem)


def write_series(x: LightCurve, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SERIES_HEADER)
        observed = set(x.time.tolist())
        rows = [(t, b, f, e) for t, b, f, e in zip(x.time, x.band, x.flux, x.flux_err)]
        rows += [(t, "", None, None) for t in x.grid if t not in observed]
        rows.sort(key=lambda r: (r[0], r[1]))
        for t, b, f, e in rows:
            w.writerow([repr(float(t)), b, "" if f is None else repr(float(f)), "" if e is None else repr(float(e))])


def load_texts(path) -> list[TokenizedText]:
    out = []
    for lineno, ln in enumerate(_lines(path), start=1):
        if not ln.strip():
            continue
        lang, tab, text = ln.partition("\t")
        if not tab:
            raise ParseError("expected 'language<TAB>text'", path, lineno)
        sample = TokenizedText.from_raw(text, lang.strip())
        if sample.d == 0:
            raise ParseError("record has no words", path, lineno, "text")
        out.append(sample)
    return out


def load_embeddings(path) -> EmbeddingTable:
    vectors: dict[str, list[float]] = {}
    dim = None
    for lineno, ln in enumerate(_lines(path), start=1):
        if not ln.strip():
            continue
        word, tab, rest = ln.partition("\t")
        if not tab:
            raise ParseError("expected 'word<TAB>values'", path, lineno)
        vec = [_float(t, path, lineno, f"dim {j + 1}") for j, t in enumerate(rest.split())]
        if dim is None:
            dim = len(vec)
        if len(vec) != dim or dim == 0:
            raise ParseError(f"expected {dim} values, found {len(vec)}", path, lineno)
        vectors[word] = vec
    if not vectors:
        raise ParseError("no embeddings", path)
    return EmbeddingTable(vectors)


def write_embeddings(vectors: dict, path) -> None:
    lines = [w + "\t" + " ".join(repr(float(v)) for v in vec) for w, vec in vectors.items()]
    Path(path).write_text("".join(ln + "\n" for ln in lines), encoding="utf-8")


def load_word_lists(path) -> dict[str, list[str]]:
    cats: dict[str, list[str]] = {}
    for lineno, ln in enumerate(_lines(path), start=1):
        if not ln.strip() or ln.lstrip().startswith("#"):
            continue
        name, colon, rest = ln.partition(":")
        if not colon or not name.strip():
            raise ParseError("expected 'category: w1, w2, ...'", path, lineno)
        words = [w.strip() for w in rest.split(",") if w.strip()]
        if not words:
            raise ParseError(f"category {name.strip()!r} has no words", path, lineno)
        cats.setdefault(name.strip(), []).extend(words)
    if not cats:
        raise ParseError("no categories", path)
    return cats


def load_lexicon(path) -> Lexicon:
    return Lexicon.from_dict(load_word_lists(path))


def write_word_lists(cats: dict, path) -> None:
    Path(path).write_text("".join(f"{k}: {', '.join(v)}\n" for k, v in cats.items()), encoding="utf-8")
