"""Unsupervised baseline extractors producing GroupSets.

Extractors are addressed by short spec strings such as ``patch:8x8``,
``slice:10``, ``random:25`` or ``quickshift:kernel_size=5,max_dist=10``;
:func:`parse_extractor` turns those into :class:`ExtractorConfig`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .core import GroupSet
from .errors import ArgumentError, ConfigurationError, ExtractorConfigError
from .kmeans import kmeans
from .massmaps import MassMap
from .quickshift import quickshift
from .supernova import LightCurve
from .text import EmbeddingTable, TokenizedText

KINDS = ("identity", "random", "patch", "slice", "words", "phrases", "sentences",
         "quickshift", "clustering", "expert")
STOCHASTIC = ("random", "clustering")

# modality -> kinds that make sense for it
MODALITY_KINDS = {
    "image": ("identity", "random", "patch", "quickshift", "clustering", "expert"),
    "series": ("identity", "random", "slice", "clustering", "expert"),
    "text": ("identity", "random", "words", "phrases", "sentences", "clustering", "expert"),
}

DEFAULT_PARAMS: dict[str, dict[str, Any]] = {
    "identity": {},
    "random": {"groups": None},
    "patch": {"rows": 8, "cols": 8},
    "slice": {"width": 5},
    "words": {},
    "phrases": {},
    "sentences": {},
    "quickshift": {"kernel_size": 5.0, "max_dist": 10.0, "sigma": 0.2, "ratio": 1.0},
    "clustering": {"k": None, "base": None},
    "expert": {},
}
CLUSTER_BASES = {"image": "quickshift", "series": "slice", "text": "words"}


@dataclass(frozen=True)
class GroupMaximum:
    """Cap on the number of random groups: ``ceil(scaling * expert_count)`` unless overridden."""

    expert_count: int
    scaling: float = 1.5
    override: int | None = None

    @property
    def max_groups(self) -> int:
        n = self.override if self.override is not None else math.ceil(self.scaling * self.expert_count)
        if n < 1:
            raise ArgumentError("group maximum must be at least 1")
        return n


# Per-setting caps. Mass maps: 7 local maxima + 7 local minima, scaled and
# rounded up to 25. Politeness/emotion: 26 lexical categories, rounded to 40.
GROUP_MAXIMUM = {
    "massmaps": GroupMaximum(14, override=25),
    "supernova": GroupMaximum(6),
    "politeness": GroupMaximum(26, override=40),
    "emotion": GroupMaximum(26, override=40),
}


@dataclass(frozen=True)
class ExtractorConfig:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ExtractorConfigError(f"unknown extractor kind {self.kind!r}", "kind")
        merged = dict(DEFAULT_PARAMS[self.kind])
        for key, value in self.params.items():
            if key not in merged:
                raise ExtractorConfigError(f"extractor {self.kind!r} has no parameter {key!r}", key)
            merged[key] = value
        _validate(self.kind, merged)
        object.__setattr__(self, "params", merged)

    @property
    def label(self) -> str:
        if self.kind == "patch":
            return f"patch:{self.params['rows']}x{self.params['cols']}"
        if self.kind == "slice":
            return f"slice:{self.params['width']}"
        extras = [f"{k}={v}" for k, v in self.params.items()
                  if v is not None and v != DEFAULT_PARAMS[self.kind][k]]
        return self.kind + (":" + ",".join(extras) if extras else "")

    def with_seed(self, seed: int | None) -> "ExtractorConfig":
        return ExtractorConfig(self.kind, dict(self.params), seed)


def _positive(kind, params, key, cast):
    v = params[key]
    try:
        v = cast(v)
    except (TypeError, ValueError):
        raise ExtractorConfigError(f"{kind}: parameter {key!r} must be a number, got {v!r}", key) from None
    if not v > 0:
        raise ExtractorConfigError(f"{kind}: parameter {key!r} must be positive, got {v!r}", key)
    params[key] = v


def _validate(kind: str, params: dict) -> None:
    if kind == "patch":
        _positive(kind, params, "rows", int)
        _positive(kind, params, "cols", int)
    elif kind == "slice":
        _positive(kind, params, "width", int)
    elif kind == "quickshift":
        for key in ("kernel_size", "max_dist", "ratio"):
            _positive(kind, params, key, float)
        try:
            params["sigma"] = float(params["sigma"])
        except (TypeError, ValueError):
            raise ExtractorConfigError("quickshift: parameter 'sigma' must be a number", "sigma") from None
        if params["sigma"] < 0:
            raise ExtractorConfigError("quickshift: parameter 'sigma' must be non-negative", "sigma")
    elif kind == "random" and params["groups"] is not None:
        _positive(kind, params, "groups", int)
    elif kind == "clustering":
        if params["k"] is None:
            raise ExtractorConfigError("clustering: parameter 'k' is required", "k")
        _positive(kind, params, "k", int)
        base = params["base"]
        if base is not None and base not in ("quickshift", "patch", "slice", "words", "phrases", "sentences"):
            raise ExtractorConfigError(f"clustering: unsupported base {base!r}", "base")


_POSITIONAL = {
    "random": ("groups",),
    "slice": ("width",),
    "quickshift": ("kernel_size", "max_dist", "sigma", "ratio"),
    "clustering": ("k", "base"),
}


def parse_extractor(spec: str, seed: int | None = None) -> ExtractorConfig:
    """Parse ``kind[:params]``.

    Params are comma separated, either ``key=value`` or positional in the
    kind's documented order; ``patch`` also accepts ``RxC``.
    """
    kind, _, rest = spec.strip().partition(":")
    kind = kind.strip().lower()
    if kind not in KINDS:
        raise ExtractorConfigError(f"unknown extractor kind {kind!r}", "kind")
    params: dict[str, Any] = {}
    if rest:
        if kind == "patch" and "=" not in rest:
            r, sep, c = rest.lower().partition("x")
            if not sep:
                raise ExtractorConfigError(f"patch grid must look like RxC, got {rest!r}", "rows")
            params = {"rows": r.strip(), "cols": c.strip()}
        else:
            names = _POSITIONAL.get(kind, ())
            for pos, item in enumerate(p for p in rest.split(",") if p.strip()):
                key, eq, value = item.partition("=")
                if eq:
                    params[key.strip()] = value.strip()
                elif pos < len(names):
                    params[names[pos]] = item.strip()
                else:
                    raise ExtractorConfigError(f"extractor {kind!r} got unexpected parameter {item!r}", item.strip())
    return ExtractorConfig(kind, params, seed)


def identity_extract(x) -> GroupSet:
    if x.d < 1:
        raise ArgumentError("sample has no features")
    return GroupSet(np.ones((1, x.d), dtype=bool), "identity")


def random_extract(x, max_groups: int | GroupMaximum, seed: int) -> GroupSet:
    """Uniform random partition into ``max_groups`` non-empty groups (capped at d)."""
    if isinstance(max_groups, GroupMaximum):
        max_groups = max_groups.max_groups
    if max_groups < 1:
        raise ArgumentError("max_groups must be at least 1")
    if seed is None:
        raise ConfigurationError("random extractor requires a seed")
    d = x.d
    m = min(int(max_groups), d)
    rng = np.random.default_rng(seed)
    perm = rng.permutation(d)
    labels = np.empty(d, dtype=np.int64)
    # first m shuffled features seed one group each so no group is empty
    labels[perm[:m]] = np.arange(m)
    labels[perm[m:]] = rng.integers(0, m, size=d - m)
    return GroupSet(labels[None, :] == np.arange(m)[:, None], "random")


def _grid_edges(n: int, parts: int) -> np.ndarray:
    base = n // parts
    return np.minimum(np.arange(n) // base, parts - 1)


def patch_extract(x: MassMap, rows: int = 8, cols: int = 8) -> GroupSet:
    """Equal grid cells; leftover rows/columns go to the last row/column of cells."""
    if rows < 1 or cols < 1:
        raise ArgumentError("patch grid must be positive")
    H, W = x.shape
    if rows > H or cols > W:
        raise ArgumentError(f"{rows}x{cols} grid does not fit a {H}x{W} raster")
    r = _grid_edges(H, rows)
    c = _grid_edges(W, cols)
    labels = r[:, None] * cols + c[None, :]
    return GroupSet(labels.reshape(1, -1) == np.arange(rows * cols)[:, None], "patch")


def slice_extract(x: LightCurve, width: int = 5) -> GroupSet:
    if width < 1:
        raise ArgumentError("slice width must be at least 1")
    labels = np.arange(x.d) // width
    return GroupSet.from_labels(labels, "slice")


def text_extract(x: TokenizedText, granularity: str = "words") -> GroupSet:
    if granularity == "words":
        return GroupSet(np.eye(x.d, dtype=bool), "words")
    if granularity == "phrases":
        ends = x.phrase_ends
    elif granularity == "sentences":
        ends = x.sentence_ends
    else:
        raise ArgumentError(f"unknown text granularity {granularity!r}")
    labels = np.zeros(x.d, dtype=np.int64)
    seg = 0
    for i in range(x.d):
        labels[i] = seg
        if i in ends:
            seg += 1
    return GroupSet.from_labels(labels, granularity)


def quickshift_extract(x: MassMap, kernel_size: float = 5.0, max_dist: float = 10.0,
                       sigma: float = 0.2, ratio: float = 1.0) -> GroupSet:
    labels = quickshift(x.pixels, kernel_size, max_dist, sigma, ratio)
    return GroupSet.from_labels(labels.reshape(-1), "quickshift")


def segment_descriptors(x, base: GroupSet, embeddings: EmbeddingTable | None = None) -> np.ndarray:
    """Raw per-segment statistics used as clustering inputs."""
    if isinstance(x, TokenizedText):
        if embeddings is None:
            raise ConfigurationError("clustering text segments needs an embedding table")
        vecs = embeddings.lookup(x.words)
        return np.stack([vecs[m].mean(axis=0) for m in base.masks])
    if isinstance(x, MassMap):
        values = x.pixels.reshape(-1)
        parts = [values[m] for m in base.masks]
    elif isinstance(x, LightCurve):
        parts = [x.flux[m[x.grid_index]] for m in base.masks]
    else:
        raise ConfigurationError(f"cannot describe segments of {type(x).__name__}")
    return np.array([[p.mean(), p.std(), p.size] if p.size else [0.0, 0.0, 0.0] for p in parts])


def _standardize(X: np.ndarray) -> np.ndarray:
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    return np.divide(X - mu, sd, out=np.zeros_like(X), where=sd > 0)


def cluster_extract(x, base: GroupSet, k: int, seed: int,
                    embeddings: EmbeddingTable | None = None) -> GroupSet:
    """Merge base segments whose (standardized) descriptors share a k-means label."""
    if k < 1:
        raise ArgumentError("k must be at least 1")
    if not len(base):
        raise ArgumentError("base segmentation is empty")
    if k >= len(base):
        # nothing to merge; k-means could still fuse segments with equal descriptors
        return GroupSet(base.masks, "clustering")
    X = _standardize(segment_descriptors(x, base, embeddings))
    labels, _ = kmeans(X, k, seed)
    merged = [base.masks[labels == j].any(axis=0) for j in np.unique(labels)]
    return GroupSet(np.stack(merged), "clustering")


def extract(config: ExtractorConfig, x, *, scorer: str | None = None, annotations: GroupSet | None = None,
            embeddings: EmbeddingTable | None = None, seed: int | None = None) -> GroupSet:
    """Run ``config`` on one sample.

    ``scorer`` picks the random-baseline group maximum; ``seed`` overrides
    the config seed (the harness passes per-sample seeds here).
    """
    kind, p = config.kind, config.params
    seed = config.seed if seed is None else seed
    modality = getattr(x, "modality", None)
    if modality in MODALITY_KINDS and kind not in MODALITY_KINDS[modality]:
        raise ConfigurationError(f"extractor {kind!r} does not apply to {modality} samples")
    if kind in STOCHASTIC and seed is None:
        raise ConfigurationError(f"extractor {kind!r} requires a seed")
    if kind == "identity":
        return identity_extract(x)
    if kind == "random":
        n = p["groups"]
        if n is None:
            if annotations is not None and len(annotations):
                n = GroupMaximum(len(annotations)).max_groups
            elif scorer in GROUP_MAXIMUM:
                n = GROUP_MAXIMUM[scorer].max_groups
            else:
                raise ExtractorConfigError("random extractor needs groups=N for this scorer", "groups")
        return random_extract(x, n, seed)
    if kind == "patch":
        return patch_extract(x, p["rows"], p["cols"])
    if kind == "slice":
        return slice_extract(x, p["width"])
    if kind in ("words", "phrases", "sentences"):
        return text_extract(x, kind)
    if kind == "quickshift":
        return quickshift_extract(x, p["kernel_size"], p["max_dist"], p["sigma"], p["ratio"])
    if kind == "clustering":
        base_kind = p["base"] or CLUSTER_BASES.get(modality)
        if base_kind is None:
            raise ConfigurationError(f"no default clustering base for {modality!r}")
        base = extract(ExtractorConfig(base_kind), x, scorer=scorer, embeddings=embeddings)
        return cluster_extract(x, base, p["k"], seed, embeddings)
    if kind == "expert":
        if annotations is None:
            raise ConfigurationError("expert extractor needs annotated samples")
        return GroupSet(annotations.masks, "expert")
    raise ExtractorConfigError(f"unknown extractor kind {kind!r}", "kind")
