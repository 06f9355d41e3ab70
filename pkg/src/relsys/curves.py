"""Reliability curves, credible bands and lifetime summaries from draws.

Each posterior draw of (shape, scale) induces one survival curve; the
estimated reliability at a time point is the average of the drawn curves
there, and the band is a pointwise credible interval across draws, either
highest-posterior-density or symmetric-quantile.  System curves combine
component curves draw by draw, multiplying survivals for series systems
and failure probabilities for parallel ones, so between-component
posterior dependence never has to be modelled explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .dists import log_gamma_fn
from .mcem import SystemFit
from .sampler import PosteriorDraws

__all__ = [
    "TimeGrid",
    "ReliabilityBand",
    "reliability_draws",
    "reliability_band",
    "hpd_interval",
    "mean_time_posterior",
    "system_band",
]

_METHODS = ("hpd", "quantile")


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing evaluation times, starting at or after zero."""

    points: tuple[float, ...]

    def __post_init__(self):
        if not self.points:
            raise ValueError("time grid must contain at least one point")
        arr = np.asarray(self.points, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise ValueError("time grid points must be finite")
        if arr[0] < 0.0:
            raise ValueError(f"time grid must start at >= 0, got {arr[0]}")
        if arr.size > 1 and not np.all(np.diff(arr) > 0.0):
            raise ValueError("time grid points must be strictly increasing")

    @classmethod
    def regular(cls, t_max: float, n: int = 200) -> "TimeGrid":
        """Evenly spaced grid of ``n`` points from 0 to ``t_max``."""
        if not (math.isfinite(t_max) and t_max > 0.0):
            raise ValueError(f"t_max must be finite and > 0, got {t_max}")
        if n < 2:
            raise ValueError(f"regular grid needs at least 2 points, got {n}")
        return cls(tuple(float(t) for t in np.linspace(0.0, t_max, n)))

    @cached_property
    def array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float)

    @property
    def n(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class ReliabilityBand:
    """Pointwise mean curve with credible bounds on a time grid."""

    grid: TimeGrid
    mean: tuple[float, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    level: float
    method: str

    def __post_init__(self):
        n = self.grid.n
        if not (len(self.mean) == len(self.lower) == len(self.upper) == n):
            raise ValueError("band arrays must match the grid length")
        if not 0.0 < self.level < 1.0:
            raise ValueError(f"level must be in (0, 1), got {self.level}")
        if self.method not in _METHODS:
            raise ValueError(f"method must be one of {_METHODS}, got {self.method!r}")
        for name in ("mean", "lower", "upper"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if np.any(arr < -1e-12) or np.any(arr > 1.0 + 1e-12):
                raise ValueError(f"band {name} values must lie in [0, 1]")
        if np.any(np.asarray(self.lower) > np.asarray(self.upper)):
            raise ValueError("band lower bound exceeds upper bound")


def _survival_matrix(d: PosteriorDraws, times: np.ndarray) -> np.ndarray:
    """Per-draw survival curves, one row per time point."""
    log_etas = np.log(d.etas)
    with np.errstate(divide="ignore", over="ignore"):
        log_t = np.log(times)[:, None]
        # beta * log(t/eta); -inf at t = 0 exponentiates to survival 1
        expo = d.betas[None, :] * (log_t - log_etas[None, :])
        return np.exp(-np.exp(expo))


def reliability_draws(d: PosteriorDraws, t: float) -> np.ndarray:
    """Survival probability at ``t`` under every posterior draw."""
    if not (math.isfinite(t) and t >= 0.0):
        raise ValueError(f"time must be finite and >= 0, got {t}")
    return _survival_matrix(d, np.array([t]))[0]


def hpd_interval(values, level: float) -> tuple[float, float]:
    """Shortest interval holding ``ceil(level * n)`` of the ``values``.

    Ties between equally short windows go to the lowest one.
    """
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    arr = np.sort(np.asarray(values, dtype=float))
    if arr.size == 0:
        raise ValueError("hpd_interval needs at least one value")
    if not np.all(np.isfinite(arr)):
        raise ValueError("hpd_interval values must be finite")
    w = math.ceil(level * arr.size)
    if w >= arr.size:
        return float(arr[0]), float(arr[-1])
    widths = arr[w - 1 :] - arr[: arr.size - w + 1]
    i = int(np.argmin(widths))
    return float(arr[i]), float(arr[i + w - 1])


def _band_from_matrix(
    r: np.ndarray, grid: TimeGrid, level: float, method: str
) -> ReliabilityBand:
    if method not in _METHODS:
        raise ValueError(f"method must be one of {_METHODS}, got {method!r}")
    mean = r.mean(axis=1)
    if method == "hpd":
        bounds = [hpd_interval(row, level) for row in r]
        lower = np.array([b[0] for b in bounds])
        upper = np.array([b[1] for b in bounds])
    else:
        half = (1.0 - level) / 2.0
        lower = np.quantile(r, half, axis=1)
        upper = np.quantile(r, 1.0 - half, axis=1)
    return ReliabilityBand(
        grid=grid,
        mean=tuple(float(x) for x in mean),
        lower=tuple(float(x) for x in lower),
        upper=tuple(float(x) for x in upper),
        level=level,
        method=method,
    )


def reliability_band(
    d: PosteriorDraws, grid: TimeGrid, level: float = 0.95, method: str = "hpd"
) -> ReliabilityBand:
    """Pointwise mean reliability with credible bounds for one component."""
    return _band_from_matrix(_survival_matrix(d, grid.array), grid, level, method)


def mean_time_posterior(d: PosteriorDraws) -> tuple[float, float]:
    """Posterior mean and standard deviation of the expected lifetime.

    Each draw contributes its own closed-form mean ``eta * Gamma(1 + 1/beta)``.
    """
    gl = np.array([log_gamma_fn(1.0 + 1.0 / b) for b in d.betas])
    values = d.etas * np.exp(gl)
    return float(values.mean()), float(values.std(ddof=1))


def system_band(
    f: SystemFit, grid: TimeGrid, level: float = 0.95, method: str = "hpd"
) -> ReliabilityBand:
    """Credible band for the whole system's reliability.

    Component curves are combined within each draw index, so the ``l``-th
    system curve uses the ``l``-th draw of every component.
    """
    sizes = {c.draws.n for c in f.components}
    if len(sizes) != 1:
        raise ValueError(f"components carry unequal draw counts {sorted(sizes)}")
    mats = [_survival_matrix(c.draws, grid.array) for c in f.components]
    if f.kind == "series":
        r = np.prod(mats, axis=0)
    else:
        r = 1.0 - np.prod([1.0 - m for m in mats], axis=0)
    return _band_from_matrix(r, grid, level, method)
