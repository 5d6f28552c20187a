"""Linear-consistency scorer for multi-band light curves.

Masks index a per-sample timestamp grid: the sorted union of all observation
times plus any declared timestamps without data. A group selects grid
timestamps; within each band it then covers the observations at those times.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import AlignmentScorer, as_mask
from .errors import ArgumentError, DegenerateFitError


@dataclass(frozen=True, eq=False)
class LightCurve:
    time: np.ndarray
    band: np.ndarray
    flux: np.ndarray
    flux_err: np.ndarray
    grid: np.ndarray
    name: str = ""
    modality: str = field(default="series", init=False)

    def __post_init__(self):
        t = np.asarray(self.time, dtype=float).reshape(-1)
        b = np.asarray(self.band, dtype=str).reshape(-1)
        f = np.asarray(self.flux, dtype=float).reshape(-1)
        e = np.asarray(self.flux_err, dtype=float).reshape(-1)
        grid = np.asarray(self.grid, dtype=float).reshape(-1)
        if not (t.size == b.size == f.size == e.size):
            raise ArgumentError("time, band, flux and flux_err must have equal length")
        for label, arr in (("time", t), ("flux", f), ("flux_err", e), ("grid", grid)):
            if not np.isfinite(arr).all():
                raise ArgumentError(f"{label} contains NaN or Inf")
        if (e < 0).any():
            raise ArgumentError("flux_err must be non-negative")
        if grid.size == 0:
            raise ArgumentError("light curve has an empty timestamp grid")
        if (np.diff(grid) <= 0).any():
            raise ArgumentError("timestamp grid must be strictly increasing")
        idx = np.searchsorted(grid, t)
        if t.size and ((idx >= grid.size).any() or (grid[np.minimum(idx, grid.size - 1)] != t).any()):
            raise ArgumentError("every observation time must lie on the timestamp grid")
        for name, arr in (("time", t), ("band", b), ("flux", f), ("flux_err", e), ("grid", grid)):
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        idx.flags.writeable = False
        object.__setattr__(self, "_grid_index", idx)

    @classmethod
    def from_observations(cls, time, band, flux, flux_err, empty_times=(), name: str = "") -> "LightCurve":
        t = np.asarray(time, dtype=float).reshape(-1)
        grid = np.unique(np.concatenate([t, np.asarray(empty_times, dtype=float).reshape(-1)]))
        return cls(t, band, flux, flux_err, grid, name)

    @property
    def d(self) -> int:
        return self.grid.size

    @property
    def grid_index(self) -> np.ndarray:
        """Grid position of each observation."""
        return self._grid_index

    @property
    def bands(self) -> list[str]:
        return sorted(set(self.band.tolist()))

    def band_view(self, w: str) -> "LightCurve":
        keep = self.band == w
        return LightCurve(self.time[keep], self.band[keep], self.flux[keep], self.flux_err[keep],
                          self.grid, self.name)

    def selected(self, g) -> np.ndarray:
        """Boolean selector over observations whose timestamp bit is set."""
        g = as_mask(g, self.d)
        return g[self._grid_index]


@dataclass(frozen=True)
class ConsistencyParams:
    eps: float = 1.0
    window: float = 10.0
    step: float = 5.0

    def __post_init__(self):
        for name in ("eps", "window", "step"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ArgumentError(f"{name} must be positive, got {v!r}")


def fit_line(times, fluxes) -> tuple[float, float]:
    """Least-squares line; returns ``(slope, intercept)``."""
    t = np.asarray(times, dtype=float)
    y = np.asarray(fluxes, dtype=float)
    if t.size != y.size:
        raise ArgumentError("times and fluxes differ in length")
    if t.size < 2:
        raise DegenerateFitError("need at least two points")
    tc = t - t.mean()
    sxx = float(tc @ tc)
    if sxx == 0.0:
        raise DegenerateFitError("all times are equal")
    slope = float(tc @ (y - y.mean())) / sxx
    return slope, float(y.mean() - slope * t.mean())


def _predict(t: np.ndarray, y: np.ndarray) -> np.ndarray:
    # Centered form keeps predictions invariant to shifting the time origin.
    tc = t - t.mean()
    sxx = float(tc @ tc)
    if sxx == 0.0:
        return np.full_like(y, y.mean())
    slope = float(tc @ (y - y.mean())) / sxx
    return y.mean() + slope * tc


def linear_fraction(g, curve_w: LightCurve, eps: float) -> float:
    sel = curve_w.selected(g)
    m = int(sel.sum())
    if m == 0:
        return 0.0
    if m == 1:
        return 1.0
    y = curve_w.flux[sel]
    y_hat = _predict(curve_w.time[sel], y)
    tol = eps * curve_w.flux_err[sel]
    return float(np.count_nonzero(np.abs(y_hat - y) <= tol)) / m


def _span(g, grid: np.ndarray) -> tuple[float, float] | None:
    times = grid[g]
    if times.size == 0:
        return None
    return float(times[0]), float(times[-1])


def window_count(t_start: float, t_end: float, step: float) -> int:
    return max(1, math.floor((t_end - t_start) / step))


def density_fraction(g, curve_w: LightCurve, window: float, step: float) -> float:
    """Fraction of sliding windows over the group's time span holding a selected observation."""
    g = as_mask(g, curve_w.d)
    span = _span(g, curve_w.grid)
    if span is None:
        return 0.0
    t_start, t_end = span
    obs = curve_w.time[curve_w.selected(g)]
    if obs.size == 0:
        return 0.0
    n = window_count(t_start, t_end, step)
    starts = np.arange(n) * step
    rel = obs - t_start
    hit = ((rel[None, :] >= starts[:, None]) & (rel[None, :] <= starts[:, None] + window)).any(axis=1)
    return float(np.count_nonzero(hit)) / n


def band_consistency(g, curve: LightCurve, params: ConsistencyParams) -> dict[str, float]:
    out = {}
    for w in curve.bands:
        view = curve.band_view(w)
        p = linear_fraction(g, view, params.eps)
        out[w] = 0.0 if p == 0.0 else p * density_fraction(g, view, params.window, params.step)
    return out


def supernova_expert_align(g, x: LightCurve, params: ConsistencyParams | None = None) -> float:
    params = params or ConsistencyParams()
    g = as_mask(g, x.d)
    if not g.any():
        return 0.0
    scores = band_consistency(g, x, params)
    return max(scores.values(), default=0.0)


class SupernovaScorer(AlignmentScorer):
    name = "supernova"
    modality = "series"

    def __init__(self, params: ConsistencyParams | None = None):
        self.params = params or ConsistencyParams()

    def raw_score(self, mask, sample: LightCurve) -> float:
        return supernova_expert_align(mask, sample, self.params)

    def config(self) -> dict:
        return {"eps": self.params.eps, "window": self.params.window, "step": self.params.step}
