"""Mask algebra and the FIXScore aggregation.

A feature mask is a 1-D boolean numpy array of length ``d``. A :class:`GroupSet`
stacks ``m`` such masks into an ``(m, d)`` array. Scorers map one mask plus
its sample to an alignment value in ``[0, 1]``; :func:`fix_score` averages,
for every low-level feature, the scores of the groups covering it, and then
averages over features.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Protocol, Sequence

import numpy as np

from .errors import ArgumentError, ConfigurationError

log = logging.getLogger(__name__)

MODALITIES = ("image", "series", "text")


class Sample(Protocol):
    """Anything with a feature count and a modality tag."""

    @property
    def d(self) -> int: ...

    @property
    def modality(self) -> str: ...


def as_mask(bits, d: int | None = None) -> np.ndarray:
    """Coerce ``bits`` to a flat boolean mask, checking its length against ``d``."""
    mask = np.asarray(bits)
    if mask.dtype != bool:
        if mask.size and not np.isin(mask, (0, 1)).all():
            raise ArgumentError("mask entries must be 0/1")
        mask = mask.astype(bool)
    mask = mask.reshape(-1)
    if d is not None and mask.size != d:
        raise ArgumentError(f"mask has length {mask.size}, expected d={d}")
    return mask


@dataclass(frozen=True, eq=False)
class GroupSet:
    """Ordered collection of masks over one sample; duplicates are kept."""

    masks: np.ndarray
    provenance: str = ""

    def __post_init__(self):
        arr = np.asarray(self.masks, dtype=bool)
        if arr.ndim != 2:
            raise ArgumentError("GroupSet masks must be a 2-D (m, d) array")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "masks", arr)

    @classmethod
    def from_masks(cls, masks: Iterable, d: int, provenance: str = "") -> "GroupSet":
        rows = [as_mask(m, d) for m in masks]
        arr = np.stack(rows) if rows else np.zeros((0, d), dtype=bool)
        return cls(arr, provenance)

    @classmethod
    def from_labels(cls, labels, provenance: str = "") -> "GroupSet":
        """Partition from an integer label per feature; one mask per label, ascending."""
        labels = np.asarray(labels).reshape(-1)
        uniq = np.unique(labels)
        return cls(labels[None, :] == uniq[:, None], provenance)

    @property
    def d(self) -> int:
        return self.masks.shape[1]

    def __len__(self) -> int:
        return self.masks.shape[0]

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.masks)

    def __getitem__(self, idx) -> np.ndarray:
        return self.masks[idx]

    def append(self, mask) -> "GroupSet":
        mask = as_mask(mask, self.d)
        return GroupSet(np.vstack([self.masks, mask[None, :]]), self.provenance)

    def sizes(self) -> np.ndarray:
        return self.masks.sum(axis=1)

    def is_partition(self) -> bool:
        """True when every feature is covered exactly once."""
        return bool(len(self)) and bool((self.masks.sum(axis=0) == 1).all())


ROUNDING_SLACK = 1e-9


def clamp_score(value: float, source: str = "scorer") -> float:
    """Force a raw alignment value into [0, 1], warning when it was outside."""
    value = float(value)
    if not np.isfinite(value):
        raise ArgumentError(f"{source} returned non-finite alignment {value!r}")
    if value < 0.0 or value > 1.0:
        # rounding overshoot (e.g. a cosine of 1 + 2e-16) is not worth a warning
        if value < -ROUNDING_SLACK or value > 1.0 + ROUNDING_SLACK:
            log.warning("%s returned %.6g outside [0, 1]; clamped", source, value)
        return min(1.0, max(0.0, value))
    return value


class AlignmentScorer:
    """Base class for per-group ExpertAlign functions.

    Subclasses implement :meth:`raw_score`; :meth:`score` clamps the result.
    ``modality`` is ``None`` for scorers that accept any sample type.
    """

    name = "scorer"
    modality: str | None = None

    def raw_score(self, mask: np.ndarray, sample) -> float:
        raise NotImplementedError

    def score(self, mask, sample) -> float:
        mask = as_mask(mask, sample.d)
        if not mask.any():
            return 0.0
        return clamp_score(self.raw_score(mask, sample), self.name)

    __call__ = score

    def check_compatible(self, sample) -> None:
        if self.modality is not None and getattr(sample, "modality", None) != self.modality:
            raise ConfigurationError(
                f"scorer {self.name!r} expects {self.modality} samples, "
                f"got {getattr(sample, 'modality', type(sample).__name__)}"
            )


def covering_groups(i: int, groups: GroupSet) -> GroupSet:
    """Groups whose mask contains feature ``i``, order and duplicates preserved."""
    if not 0 <= i < groups.d:
        raise ArgumentError(f"feature index {i} out of range for d={groups.d}")
    return GroupSet(groups.masks[groups.masks[:, i]], groups.provenance)


def group_scores(groups: GroupSet, sample, scorer: AlignmentScorer) -> np.ndarray:
    """Score every group once per distinct mask."""
    scorer.check_compatible(sample)
    if groups.d != sample.d:
        raise ArgumentError(f"groups have d={groups.d} but sample has d={sample.d}")
    cache: dict[bytes, float] = {}
    out = np.empty(len(groups))
    for j, mask in enumerate(groups.masks):
        key = np.packbits(mask).tobytes()
        if key not in cache:
            cache[key] = scorer.score(mask, sample)
        out[j] = cache[key]
    return out


def _feature_means(masks: np.ndarray, scores: np.ndarray) -> np.ndarray:
    # Accumulate group by group, in order, so the result is reproducible
    # against a plain nested loop.
    d = masks.shape[1]
    sums = np.zeros(d)
    for mask, s in zip(masks, scores):
        sums[mask] += s
    counts = masks.sum(axis=0)
    out = np.zeros(d)
    covered = counts > 0
    out[covered] = sums[covered] / counts[covered]
    return out


def feature_align(i: int, groups: GroupSet, sample, scorer: AlignmentScorer) -> float:
    cover = covering_groups(i, groups)
    if not len(cover):
        scorer.check_compatible(sample)
        return 0.0
    scores = group_scores(cover, sample, scorer)
    return float(_feature_means(cover.masks, scores)[i])


def fix_score_from_scores(masks: np.ndarray, scores: Sequence[float]) -> float:
    """FIXScore given precomputed per-group scores."""
    masks = np.asarray(masks, dtype=bool)
    d = masks.shape[1]
    if d == 0:
        raise ArgumentError("sample has no features (d=0)")
    if masks.shape[0] == 0:
        return 0.0
    per_feature = _feature_means(masks, np.asarray(scores, dtype=float))
    return float(np.cumsum(per_feature)[-1] / d)


def fix_score(groups: GroupSet, sample, scorer: AlignmentScorer) -> float:
    if sample.d == 0:
        raise ArgumentError("sample has no features (d=0)")
    scores = group_scores(groups, sample, scorer)
    return fix_score_from_scores(groups.masks, scores)


def iou(a, b) -> float:
    a = as_mask(a)
    b = as_mask(b)
    if a.size != b.size:
        raise ArgumentError(f"mask lengths differ: {a.size} vs {b.size}")
    union = np.count_nonzero(a | b)
    if union == 0:
        return 0.0
    return np.count_nonzero(a & b) / union


def explicit_expert_align(g_hat, g_star: GroupSet) -> float:
    """Best IoU of ``g_hat`` against the annotated masks."""
    if not len(g_star):
        raise ConfigurationError("explicit alignment needs at least one annotated mask")
    g_hat = as_mask(g_hat, g_star.d)
    inter = (g_star.masks & g_hat).sum(axis=1)
    union = (g_star.masks | g_hat).sum(axis=1)
    ious = np.divide(inter, union, out=np.zeros(len(g_star)), where=union > 0)
    return float(ious.max())


@dataclass
class ExplicitScorer(AlignmentScorer):
    """IoU-against-annotations scorer bound to one sample's expert masks."""

    annotations: GroupSet
    name: str = field(default="explicit")
    modality: str | None = None

    def raw_score(self, mask, sample) -> float:
        return explicit_expert_align(mask, self.annotations)
