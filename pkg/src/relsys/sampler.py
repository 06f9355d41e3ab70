"""Adaptive random-walk Metropolis sampling of component posteriors.

The chain walks in (log shape, log scale) with an isotropic Gaussian
proposal, so the acceptance ratio carries the change-of-variables term
``(u' - u) + (w' - w)`` on top of the kernel difference.  The proposal
scale adapts during burn-in only, by a stochastic-approximation update
that steers the realized acceptance probability toward a target; after
burn-in the scale is frozen so the collected draws come from a fixed
kernel.  Draw collection consumes one proposal per step regardless of
thinning, which makes a thinned chain an exact subsequence of the
corresponding unthinned one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .dists import ComponentParams
from .errors import NumericalError

__all__ = ["McmcConfig", "PosteriorDraws", "ParamSummary", "run_chain", "posterior_summary"]

# proposals beyond this log-magnitude are rejected outright; exp() is safe
# inside and any proper posterior is vanishing there anyway
_LOG_RANGE = 300.0


@dataclass(frozen=True)
class McmcConfig:
    """Chain-length, initialization and adaptation settings.

    ``n_p`` draws are collected after ``burn_in`` adaptation steps, keeping
    every ``thin``-th state.  ``step_init`` is the initial proposal scale in
    log space; during burn-in it is steered toward the ``adapt_target``
    acceptance probability and then frozen.
    """

    n_p: int = 1000
    burn_in: int = 10_000
    thin: int = 10
    init: ComponentParams = field(default_factory=lambda: ComponentParams(1.0, 1.0))
    step_init: float = 0.5
    adapt_target: float = 0.30

    def __post_init__(self):
        if self.n_p < 1:
            raise ValueError(f"n_p must be >= 1, got {self.n_p}")
        if self.burn_in < 0:
            raise ValueError(f"burn_in must be >= 0, got {self.burn_in}")
        if self.thin < 1:
            raise ValueError(f"thin must be >= 1, got {self.thin}")
        if not (math.isfinite(self.step_init) and self.step_init > 0.0):
            raise ValueError(f"step_init must be finite and > 0, got {self.step_init}")
        if not 0.0 < self.adapt_target < 1.0:
            raise ValueError(f"adapt_target must be in (0, 1), got {self.adapt_target}")


@dataclass(frozen=True)
class PosteriorDraws:
    """Thinned posterior draws plus chain diagnostics.

    ``acceptance_rate`` is the accepted fraction over the collection phase,
    ``step_final`` the frozen proposal scale, and the lag-1 autocorrelations
    are computed on the thinned series.
    """

    draws: tuple[ComponentParams, ...]
    acceptance_rate: float
    step_final: float
    lag1_beta: float
    lag1_eta: float
    warnings: tuple[str, ...]

    @property
    def n(self) -> int:
        return len(self.draws)

    @cached_property
    def betas(self) -> np.ndarray:
        return np.array([d.beta for d in self.draws])

    @cached_property
    def etas(self) -> np.ndarray:
        return np.array([d.eta for d in self.draws])


@dataclass(frozen=True)
class ParamSummary:
    """Posterior means and standard deviations of shape and scale."""

    mean_beta: float
    sd_beta: float
    mean_eta: float
    sd_eta: float


def run_chain(
    log_kernel: Callable[[ComponentParams], float],
    cfg: McmcConfig,
    rng: np.random.Generator,
) -> PosteriorDraws:
    """Sample ``cfg.n_p`` thinned draws from the posterior kernel.

    Parameters
    ----------
    log_kernel : callable
        Unnormalized log posterior density over :class:`ComponentParams`;
        ``-inf`` marks zero density, NaN raises inside the kernel.
    cfg : McmcConfig
        Chain settings.
    rng : numpy.random.Generator
        Source of proposal noise; the chain is a pure function of it.

    Raises
    ------
    NumericalError
        If the kernel has zero density at the initial point.
    """
    u = math.log(cfg.init.beta)
    w = math.log(cfg.init.eta)
    lk = log_kernel(cfg.init)
    if not math.isfinite(lk):
        raise NumericalError(
            f"posterior kernel is {lk} at the initial point "
            f"beta={cfg.init.beta}, eta={cfg.init.eta}"
        )

    total = cfg.burn_in + cfg.n_p * cfg.thin
    normals = rng.standard_normal((total, 2))
    unifs = rng.random(total)

    step = cfg.step_init
    log_step = math.log(step)
    draws: list[ComponentParams] = []
    accepted = 0

    for i in range(total):
        u2 = u + step * normals[i, 0]
        w2 = w + step * normals[i, 1]
        if -_LOG_RANGE < u2 < _LOG_RANGE and -_LOG_RANGE < w2 < _LOG_RANGE:
            lk2 = log_kernel(ComponentParams(math.exp(u2), math.exp(w2)))
            log_ratio = lk2 - lk + (u2 - u) + (w2 - w)
            accept_prob = 1.0 if log_ratio >= 0.0 else math.exp(log_ratio)
        else:
            lk2 = -math.inf
            accept_prob = 0.0
        moved = unifs[i] < accept_prob
        if moved:
            u, w, lk = u2, w2, lk2
        if i < cfg.burn_in:
            log_step += (accept_prob - cfg.adapt_target) / (i + 1) ** 0.6
            step = math.exp(log_step)
        else:
            accepted += moved
            if (i - cfg.burn_in + 1) % cfg.thin == 0:
                draws.append(ComponentParams(math.exp(u), math.exp(w)))

    acceptance = accepted / (cfg.n_p * cfg.thin)
    warnings = []
    if not 0.05 <= acceptance <= 0.95:
        warnings.append(
            f"acceptance rate {acceptance:.3f} outside [0.05, 0.95] after burn-in"
        )
    out = PosteriorDraws(
        draws=tuple(draws),
        acceptance_rate=acceptance,
        step_final=step,
        lag1_beta=_lag1(np.array([d.beta for d in draws])),
        lag1_eta=_lag1(np.array([d.eta for d in draws])),
        warnings=tuple(warnings),
    )
    return out


def _lag1(x: np.ndarray) -> float:
    if x.size < 2:
        return 0.0
    c = x - x.mean()
    denom = float(c @ c)
    if denom == 0.0:
        return 0.0
    return float(c[:-1] @ c[1:]) / denom


def posterior_summary(d: PosteriorDraws) -> ParamSummary:
    """Means and sample standard deviations of the drawn shape and scale."""
    if d.n < 2:
        raise ValueError(f"summary needs at least two draws, got {d.n}")
    return ParamSummary(
        mean_beta=float(d.betas.mean()),
        sd_beta=float(d.betas.std(ddof=1)),
        mean_eta=float(d.etas.mean()),
        sd_eta=float(d.etas.std(ddof=1)),
    )
