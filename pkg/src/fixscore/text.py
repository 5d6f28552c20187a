"""Text scorers over precomputed word embeddings.

Two alignment functions live here: cosine similarity to politeness lexicon
centroids, and distance-to-unit-circle in a valence/arousal plane spanned by
emotion anchor embeddings. Masks always index whole words.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .core import AlignmentScorer, as_mask, clamp_score
from .errors import ArgumentError, DegenerateAxisError, IngestionError

# Emotion words picked as the anchors for each end of the two axes.
DEFAULT_ANCHORS: dict[str, tuple[str, ...]] = {
    "PV": ("happy", "pleased", "delighted", "excited", "satisfied"),
    "NV": ("miserable", "frustrated", "sad", "depressed", "afraid"),
    "HA": ("astonished", "alarmed", "angry", "afraid", "excited"),
    "LA": ("tired", "sleepy", "calm", "satisfied", "depressed"),
}
ANCHOR_TEMPLATE = "I feel {}"

_PHRASE_PUNCT = ",;:—，、；："
_SENTENCE_PUNCT = ".!?。！？"
_TOKEN_RE = re.compile(r"[^\W_]+(?:['’\-][^\W_]+)*|[" + re.escape(_PHRASE_PUNCT + _SENTENCE_PUNCT) + "]")


@dataclass(frozen=True)
class TokenizedText:
    """Word sequence plus the word indices after which phrases/sentences end."""

    words: tuple[str, ...]
    language: str = "en"
    phrase_ends: frozenset[int] = frozenset()
    sentence_ends: frozenset[int] = frozenset()
    modality: str = field(default="text", init=False)

    def __post_init__(self):
        if len(self.words) < 1:
            raise ArgumentError("text sample has no words")
        object.__setattr__(self, "words", tuple(self.words))

    @classmethod
    def from_raw(cls, text: str, language: str = "en") -> "TokenizedText":
        words: list[str] = []
        phrase_ends: set[int] = set()
        sentence_ends: set[int] = set()
        for tok in _TOKEN_RE.findall(text):
            if tok in _SENTENCE_PUNCT:
                if words:
                    sentence_ends.add(len(words) - 1)
                    phrase_ends.add(len(words) - 1)
            elif tok in _PHRASE_PUNCT:
                if words:
                    phrase_ends.add(len(words) - 1)
            else:
                words.append(tok)
        return cls(tuple(words), language, frozenset(phrase_ends), frozenset(sentence_ends))

    @property
    def d(self) -> int:
        return len(self.words)


class EmbeddingTable:
    """Word -> vector lookup with a lowercase fallback."""

    def __init__(self, vectors: Mapping[str, Sequence[float]]):
        if not vectors:
            raise ArgumentError("embedding table is empty")
        self.words = list(vectors)
        rows = [np.asarray(vectors[w], dtype=float).reshape(-1) for w in self.words]
        if len({r.size for r in rows}) != 1:
            raise ArgumentError("embedding vectors must share one dimension")
        self.matrix = np.stack(rows)
        if not np.isfinite(self.matrix).all():
            raise ArgumentError("embedding table contains NaN or Inf")
        self.matrix.flags.writeable = False
        self._index = {w: i for i, w in enumerate(self.words)}

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self._index or word.lower() in self._index

    def __getitem__(self, word: str) -> np.ndarray:
        i = self._index.get(word)
        if i is None:
            i = self._index.get(word.lower())
        if i is None:
            raise IngestionError(f"no embedding for word {word!r}")
        return self.matrix[i]

    def lookup(self, words: Sequence[str]) -> np.ndarray:
        if not len(words):
            return np.zeros((0, self.dim))
        return np.stack([self[w] for w in words])


@dataclass(frozen=True)
class Lexicon:
    categories: tuple[tuple[str, tuple[str, ...]], ...]

    def __post_init__(self):
        cats = tuple((str(name), tuple(words)) for name, words in self.categories)
        if not cats:
            raise ArgumentError("lexicon needs at least one category")
        for name, words in cats:
            if not words:
                raise ArgumentError(f"lexicon category {name!r} is empty")
        object.__setattr__(self, "categories", cats)

    @classmethod
    def from_dict(cls, mapping: Mapping[str, Sequence[str]]) -> "Lexicon":
        return cls(tuple((k, tuple(v)) for k, v in mapping.items()))

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.categories]


@dataclass(frozen=True, eq=False)
class Centroids:
    names: tuple[str, ...]
    vectors: np.ndarray


def build_centroids(lexicon: Lexicon, emb: EmbeddingTable) -> Centroids:
    """Mean embedding per lexicon category, category order preserved."""
    vecs = []
    for name, words in lexicon.categories:
        try:
            vecs.append(emb.lookup(words).mean(axis=0))
        except IngestionError as exc:
            raise IngestionError(f"lexicon category {name!r}: {exc}") from None
    return Centroids(tuple(lexicon.names), np.stack(vecs))


def _unit_rows(m: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(m, axis=-1, keepdims=True)
    return np.divide(m, norms, out=np.zeros_like(m), where=norms > 0)


def politeness_raw(g, x: TokenizedText, centroids: Centroids, emb: EmbeddingTable) -> float:
    """Max over centroids of the group's mean cosine similarity; may be negative."""
    g = as_mask(g, x.d)
    if not g.any():
        raise ArgumentError("politeness score of an empty group is undefined")
    words = [w for w, keep in zip(x.words, g) if keep]
    cos = _unit_rows(emb.lookup(words)) @ _unit_rows(centroids.vectors).T
    return float(cos.mean(axis=0).max())


def politeness_expert_align(g, x: TokenizedText, centroids: Centroids, emb: EmbeddingTable) -> float:
    return clamp_score(politeness_raw(g, x, centroids, emb), "politeness")


@dataclass(frozen=True, eq=False)
class CircumplexAxes:
    v_pos: np.ndarray
    v_neg: np.ndarray
    a_high: np.ndarray
    a_low: np.ndarray
    V: np.ndarray
    A: np.ndarray
    v_middle: np.ndarray
    a_middle: np.ndarray
    v_half: float
    a_half: float
    cos_theta: float

    @property
    def dim(self) -> int:
        return self.V.size


def axes_from_anchor_means(v_pos, v_neg, a_high, a_low) -> CircumplexAxes:
    v_pos, v_neg, a_high, a_low = (np.asarray(v, dtype=float) for v in (v_pos, v_neg, a_high, a_low))
    V = v_pos - v_neg
    A = a_high - a_low
    v_len = float(np.linalg.norm(V))
    a_len = float(np.linalg.norm(A))
    if v_len == 0.0 or a_len == 0.0:
        raise DegenerateAxisError("anchor means coincide; axis has zero length")
    V = V / v_len
    A = A / a_len
    cos_theta = float(V @ A)
    if abs(cos_theta) >= 1.0 - 1e-12:
        raise DegenerateAxisError("valence and arousal axes are parallel")
    return CircumplexAxes(
        v_pos, v_neg, a_high, a_low, V, A,
        (v_pos + v_neg) / 2, (a_high + a_low) / 2,
        v_len / 2, a_len / 2, cos_theta,
    )


def _anchor_vectors(emb: EmbeddingTable, words: Sequence[str], template: str | None) -> np.ndarray:
    rows = []
    for w in words:
        key = template.format(w) if template else None
        rows.append(emb[key] if key is not None and key in emb else emb[w])
    return np.stack(rows)


def build_axes(emb: EmbeddingTable, anchors: Mapping[str, Sequence[str]] = DEFAULT_ANCHORS,
               template: str | None = ANCHOR_TEMPLATE) -> CircumplexAxes:
    """Valence/arousal axes from the four anchor word lists.

    Each anchor word is looked up as ``template.format(word)`` when the table
    holds that phrase, otherwise as the bare word.
    """
    missing = [k for k in ("PV", "NV", "HA", "LA") if not anchors.get(k)]
    if missing:
        raise ArgumentError(f"anchor lists missing or empty: {', '.join(missing)}")
    means = [_anchor_vectors(emb, anchors[k], template).mean(axis=0) for k in ("PV", "NV", "HA", "LA")]
    return axes_from_anchor_means(*means)


def project(vec, axes: CircumplexAxes) -> tuple[float, float]:
    xv, xa = project_many(np.asarray(vec, dtype=float)[None, :], axes)[0]
    return float(xv), float(xa)


def project_many(vecs: np.ndarray, axes: CircumplexAxes) -> np.ndarray:
    """Rows of ``vecs`` -> ``(n, 2)`` valence/arousal coordinates."""
    vecs = np.asarray(vecs, dtype=float)
    if vecs.shape[-1] != axes.dim:
        raise ArgumentError(f"vector dimension {vecs.shape[-1]} does not match axes ({axes.dim})")
    xv = (vecs - axes.v_middle) @ axes.V / axes.v_half
    xa = (vecs - axes.a_middle) @ axes.A / axes.a_half
    return np.column_stack([xv - xa * axes.cos_theta, xa - xv * axes.cos_theta])


def _group_points(g, x: TokenizedText, axes: CircumplexAxes, emb: EmbeddingTable) -> np.ndarray:
    g = as_mask(g, x.d)
    if not g.any():
        raise ArgumentError("empty group")
    words = [w for w, keep in zip(x.words, g) if keep]
    return project_many(emb.lookup(words), axes)


def signal_of_points(points: np.ndarray) -> float:
    return float(np.abs(np.linalg.norm(points, axis=1) - 1.0).mean())


def relatedness_of_points(points: np.ndarray) -> float:
    diff = points[:, None, :] - points[None, :, :]
    return float(np.linalg.norm(diff, axis=-1).mean())


def signal(g, x: TokenizedText, axes: CircumplexAxes, emb: EmbeddingTable) -> float:
    """Mean distance of the group's projected words to the unit circle."""
    return signal_of_points(_group_points(g, x, axes, emb))


def relatedness(g, x: TokenizedText, axes: CircumplexAxes, emb: EmbeddingTable) -> float:
    """Mean pairwise distance over all ordered pairs, self-pairs included."""
    return relatedness_of_points(_group_points(g, x, axes, emb))


def emotion_from_signal(sig: float, rel: float) -> float:
    return float(np.tanh(np.exp(-sig * rel)))


def emotion_expert_align(g, x: TokenizedText, axes: CircumplexAxes, emb: EmbeddingTable) -> float:
    g = as_mask(g, x.d)
    if not g.any():
        return 0.0
    pts = _group_points(g, x, axes, emb)
    return emotion_from_signal(signal_of_points(pts), relatedness_of_points(pts))


class PolitenessScorer(AlignmentScorer):
    """Lexicon-centroid cosine; centroids chosen by the sample's language.

    A ``"*"`` entry in ``centroids`` serves languages without their own lexicon.
    """

    name = "politeness"
    modality = "text"

    def __init__(self, centroids: Mapping[str, Centroids], emb: EmbeddingTable):
        if not centroids:
            raise ArgumentError("politeness scorer needs at least one centroid set")
        self.centroids = dict(centroids)
        self.emb = emb

    def centroids_for(self, language: str) -> Centroids:
        c = self.centroids.get(language, self.centroids.get("*"))
        if c is None:
            raise IngestionError(f"no politeness lexicon for language {language!r}")
        return c

    def raw_score(self, mask, sample: TokenizedText) -> float:
        return politeness_raw(mask, sample, self.centroids_for(sample.language), self.emb)


class EmotionScorer(AlignmentScorer):
    name = "emotion"
    modality = "text"

    def __init__(self, axes: CircumplexAxes, emb: EmbeddingTable):
        self.axes = axes
        self.emb = emb

    def raw_score(self, mask, sample: TokenizedText) -> float:
        return emotion_expert_align(mask, sample, self.axes, self.emb)
