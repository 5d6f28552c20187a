"""Void/cluster purity scorer for weak-lensing mass maps."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import AlignmentScorer, as_mask
from .errors import ArgumentError


@dataclass(frozen=True, eq=False)
class MassMap:
    pixels: np.ndarray
    name: str = ""
    modality: str = field(default="image", init=False)

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=float)
        if px.ndim != 2 or px.shape[0] < 1 or px.shape[1] < 1:
            raise ArgumentError(f"mass map must be a non-empty 2-D raster, got shape {px.shape}")
        if not np.isfinite(px).all():
            raise ArgumentError("mass map contains NaN or Inf")
        px = px.copy()
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape

    @property
    def d(self) -> int:
        return self.pixels.size


@dataclass(frozen=True)
class PixelClassification:
    void_mask: np.ndarray
    cluster_mask: np.ndarray
    sigma: float


def classify_pixels(x: MassMap, void_below: float = 0.0, cluster_sigmas: float = 3.0) -> PixelClassification:
    """Void pixels lie below ``void_below``; cluster pixels above ``cluster_sigmas`` times the map std.

    The std is the population std over the whole map.
    """
    flat = x.pixels.reshape(-1)
    sigma = float(flat.std())
    void = flat < void_below
    cluster = flat > cluster_sigmas * sigma
    # a non-positive threshold could otherwise mark a pixel as both
    cluster &= ~void
    return PixelClassification(void, cluster, sigma)


def proportions(g, c: PixelClassification) -> tuple[float, float]:
    g = as_mask(g, c.void_mask.size)
    n = np.count_nonzero(g)
    if n == 0:
        raise ArgumentError("proportions of an empty group are undefined")
    return np.count_nonzero(g & c.void_mask) / n, np.count_nonzero(g & c.cluster_mask) / n


def purity_from_proportions(p_void: float, p_cluster: float, eps: float = 1e-6) -> float:
    pv = p_void + eps
    pc = p_cluster + eps
    total = pv + pc
    pv, pc = pv / total, pc / total
    entropy = -(pv * np.log2(pv) + pc * np.log2(pc))
    # 1 - H spans [0, 1]: 0 for an even void/cluster split, 1 for a pure group
    return float(min(1.0, max(0.0, 1.0 - entropy)))


def purity(g, c: PixelClassification, eps: float = 1e-6) -> float:
    """One minus the void/cluster entropy (bits) among the group's interpretable pixels."""
    return purity_from_proportions(*proportions(g, c), eps=eps)


def massmap_expert_align(g, x: MassMap, classification: PixelClassification | None = None,
                         eps: float = 1e-6) -> float:
    c = classification if classification is not None else classify_pixels(x)
    g = as_mask(g, x.d)
    if not g.any():
        return 0.0
    p_void, p_cluster = proportions(g, c)
    ratio = p_void + p_cluster
    if ratio == 0.0:
        return 0.0
    return purity_from_proportions(p_void, p_cluster, eps) * ratio


class MassMapScorer(AlignmentScorer):
    """Purity times interpretable-pixel ratio.

    Classifications are cached per map object so a FIXScore call classifies
    the raster once.
    """

    name = "massmaps"
    modality = "image"

    def __init__(self, void_below: float = 0.0, cluster_sigmas: float = 3.0, eps: float = 1e-6):
        self.void_below = void_below
        self.cluster_sigmas = cluster_sigmas
        self.eps = eps
        self._cache: dict[int, tuple[MassMap, PixelClassification]] = {}

    def classification(self, x: MassMap) -> PixelClassification:
        hit = self._cache.get(id(x))
        if hit is not None and hit[0] is x:
            return hit[1]
        c = classify_pixels(x, self.void_below, self.cluster_sigmas)
        if len(self._cache) > 256:
            self._cache.clear()
        self._cache[id(x)] = (x, c)
        return c

    def raw_score(self, mask, sample: MassMap) -> float:
        return massmap_expert_align(mask, sample, self.classification(sample), self.eps)

    def config(self) -> dict:
        return {"void_below": self.void_below, "cluster_sigmas": self.cluster_sigmas, "eps": self.eps}
