"""Quickshift mode-seeking segmentation for single-channel rasters.

Each pixel is a point ``(row, col, ratio * intensity)``. A Gaussian Parzen
density with bandwidth ``kernel_size`` is summed over a square window of
half-width ``ceil(3 * kernel_size)``; every pixel then links to the nearest
pixel in the same window with higher density, unless that neighbour is
farther than ``max_dist``. Following the links to their roots yields the
segments.

"Higher" is a strict total order: larger density, or equal density and a
smaller flat index. Among equally near candidates the first one in row-major
window order wins. Both rules keep the output deterministic.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.ndimage import gaussian_filter

from .errors import ArgumentError


def _offsets(w: int):
    for dr in range(-w, w + 1):
        for dc in range(-w, w + 1):
            yield dr, dc


def _shift_slices(n: int, off: int) -> tuple[slice, slice]:
    """(target, source) slices pairing index i with i + off inside [0, n)."""
    if off >= 0:
        return slice(0, n - off), slice(off, n)
    return slice(-off, n), slice(0, n + off)


def smooth(image: np.ndarray, sigma: float) -> np.ndarray:
    image = np.asarray(image, dtype=float)
    if sigma > 0:
        return gaussian_filter(image, sigma, mode="reflect")
    return image


def density(image: np.ndarray, kernel_size: float, ratio: float = 1.0) -> np.ndarray:
    img = ratio * np.asarray(image, dtype=float)
    H, W = img.shape
    w = int(math.ceil(3 * kernel_size))
    inv = -0.5 / kernel_size ** 2
    dens = np.zeros((H, W))
    for dr, dc in _offsets(w):
        tr, sr = _shift_slices(H, dr)
        tc, sc = _shift_slices(W, dc)
        if tr.stop <= tr.start or tc.stop <= tc.start:
            continue
        diff = img[tr, tc] - img[sr, sc]
        dens[tr, tc] += np.exp((dr * dr + dc * dc + diff * diff) * inv)
    return dens


def parents(image: np.ndarray, dens: np.ndarray, kernel_size: float, max_dist: float,
            ratio: float = 1.0) -> np.ndarray:
    img = ratio * np.asarray(image, dtype=float)
    H, W = img.shape
    w = int(math.ceil(3 * kernel_size))
    flat = np.arange(H * W).reshape(H, W)
    best = np.full((H, W), np.inf)
    parent = flat.copy()
    for dr, dc in _offsets(w):
        tr, sr = _shift_slices(H, dr)
        tc, sc = _shift_slices(W, dc)
        if tr.stop <= tr.start or tc.stop <= tc.start:
            continue
        here, there = dens[tr, tc], dens[sr, sc]
        higher = (there > here) | ((there == here) & (flat[sr, sc] < flat[tr, tc]))
        diff = img[tr, tc] - img[sr, sc]
        dist2 = dr * dr + dc * dc + diff * diff
        take = higher & (dist2 < best[tr, tc])
        best[tr, tc] = np.where(take, dist2, best[tr, tc])
        parent[tr, tc] = np.where(take, flat[sr, sc], parent[tr, tc])
    parent = parent.reshape(-1)
    too_far = np.sqrt(best.reshape(-1)) > max_dist
    parent[too_far] = np.arange(H * W)[too_far]
    return parent


def _roots(parent: np.ndarray) -> np.ndarray:
    parent = parent.copy()
    while True:
        nxt = parent[parent]
        if np.array_equal(nxt, parent):
            return parent
        parent = nxt


def quickshift(image, kernel_size: float = 5.0, max_dist: float = 10.0, sigma: float = 0.2,
               ratio: float = 1.0) -> np.ndarray:
    """Segment label per pixel (shape of ``image``), labels 0..n-1 in order of first appearance."""
    image = np.asarray(image, dtype=float)
    if image.ndim != 2 or image.size == 0:
        raise ArgumentError("quickshift expects a non-empty 2-D raster")
    for name, v in (("kernel_size", kernel_size), ("max_dist", max_dist)):
        if not v > 0:
            raise ArgumentError(f"{name} must be positive, got {v!r}")
    if sigma < 0:
        raise ArgumentError(f"sigma must be non-negative, got {sigma!r}")
    img = smooth(image, sigma)
    dens = density(img, kernel_size, ratio)
    roots = _roots(parents(img, dens, kernel_size, max_dist, ratio))
    _, first, inverse = np.unique(roots, return_index=True, return_inverse=True)
    # relabel by first occurrence in raster order
    order = np.argsort(np.argsort(first))
    return order[inverse].reshape(image.shape)
