"""Deterministic k-means used to merge base segments."""
from __future__ import annotations

import numpy as np

from .errors import ArgumentError


def farthest_point_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """First center drawn from ``rng``, each later one the point farthest from all chosen."""
    n = X.shape[0]
    chosen = [int(rng.integers(n))]
    dmin = ((X - X[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        nxt = int(np.argmax(dmin))  # argmax returns the lowest index on ties
        chosen.append(nxt)
        dmin = np.minimum(dmin, ((X - X[nxt]) ** 2).sum(axis=1))
    return X[chosen].copy()


def kmeans(X, k: int, seed: int = 0, max_iter: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Lloyd iterations from a seeded farthest-point start.

    Returns ``(labels, centers)``. Distance ties go to the lowest cluster
    index; a cluster that loses all members keeps its previous center.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ArgumentError("kmeans needs a non-empty 2-D array")
    if k < 1:
        raise ArgumentError("k must be at least 1")
    k = min(k, X.shape[0])
    centers = farthest_point_init(X, k, np.random.default_rng(seed))
    labels = None
    for _ in range(max_iter):
        d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=-1)
        new = np.argmin(d2, axis=1)
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        for j in range(k):
            members = X[labels == j]
            if len(members):
                centers[j] = members.mean(axis=0)
    return labels, centers


def inertia(X, labels, centers) -> float:
    X = np.asarray(X, dtype=float)
    return float(((X - centers[labels]) ** 2).sum())
