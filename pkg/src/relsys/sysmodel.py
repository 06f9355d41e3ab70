"""System lifetime observations and their component-level likelihoods.

A series system fails when its first component fails, so a system failure
at time ``t`` caused by component ``j`` is an exact lifetime for ``j`` and a
right censoring at ``t`` for every other component: each survived past
``t``.  A parallel system fails at the last component failure, so the same
record is exact for ``j`` and a left censoring for the others: each had
already failed by ``t``.  Masked system data therefore decomposes into one
single-component censored sample per component, and every likelihood in
the package is a sum of exact, survived-past and failed-before terms.

Likelihoods are evaluated from cached log-time arrays so that repeated
calls at new parameters (the Metropolis inner loop) cost a couple of
vectorized exponentials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .dists import ComponentParams, MeanVarGamma, gamma_mv_logpdf, log1mexp
from .errors import NumericalError

__all__ = [
    "SystemObservation",
    "SystemSample",
    "ComponentRecord",
    "ComponentSample",
    "decompose",
    "component_loglik",
    "system_loglik",
    "log_posterior_kernel",
    "make_log_kernel",
]

_KINDS = ("series", "parallel")
_SIDES = ("right", "left")


@dataclass(frozen=True)
class SystemObservation:
    """One masked system failure: its time and the component that caused it."""

    time: float
    cause: int

    def __post_init__(self):
        if not (math.isfinite(self.time) and self.time > 0.0):
            raise ValueError(f"observation time must be finite and > 0, got {self.time}")
        if self.cause < 1:
            raise ValueError(f"cause must be a component index >= 1, got {self.cause}")


@dataclass(frozen=True)
class SystemSample:
    """Masked failure data for one system of ``k`` components."""

    kind: str
    k: int
    observations: tuple[SystemObservation, ...]

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        if self.k < 1:
            raise ValueError(f"component count must be >= 1, got {self.k}")
        if not self.observations:
            raise ValueError("system sample must contain at least one observation")
        for i, obs in enumerate(self.observations):
            if obs.cause > self.k:
                raise ValueError(
                    f"observation {i} names cause {obs.cause} but the system "
                    f"has only {self.k} components"
                )

    @property
    def n(self) -> int:
        return len(self.observations)


@dataclass(frozen=True)
class ComponentRecord:
    """One component lifetime record, exact or censored at ``time``."""

    time: float
    censored: bool

    def __post_init__(self):
        if not (math.isfinite(self.time) and self.time > 0.0):
            raise ValueError(f"record time must be finite and > 0, got {self.time}")


@dataclass(frozen=True)
class ComponentSample:
    """Censored lifetime sample for a single component.

    ``side`` fixes how censored records are read: ``"right"`` means the
    lifetime exceeded the recorded time, ``"left"`` means it had already
    ended by then.  All censored records in one sample share the side.
    """

    side: str
    records: tuple[ComponentRecord, ...]

    def __post_init__(self):
        if self.side not in _SIDES:
            raise ValueError(f"side must be one of {_SIDES}, got {self.side!r}")
        if not self.records:
            raise ValueError("component sample must contain at least one record")

    @property
    def n(self) -> int:
        return len(self.records)

    @property
    def n_exact(self) -> int:
        return int(self._log_times[0].size)

    @cached_property
    def _log_times(self) -> tuple[np.ndarray, np.ndarray]:
        exact = np.array([r.time for r in self.records if not r.censored], dtype=float)
        cens = np.array([r.time for r in self.records if r.censored], dtype=float)
        return np.log(exact), np.log(cens)


def decompose(s: SystemSample) -> tuple[ComponentSample, ...]:
    """Split masked system data into one censored sample per component.

    Series systems censor the non-failing components on the right,
    parallel systems on the left.  Every returned sample has one record
    per system observation, exact exactly where that component was the
    cause.
    """
    side = "right" if s.kind == "series" else "left"
    out = []
    for j in range(1, s.k + 1):
        records = tuple(
            ComponentRecord(obs.time, censored=obs.cause != j) for obs in s.observations
        )
        out.append(ComponentSample(side, records))
    return tuple(out)


def _loglik_value(
    log_exact: np.ndarray, log_cens: np.ndarray, side: str, beta: float, eta: float
) -> float:
    """Core likelihood sum over cached log-time arrays.

    Survival exponents are exp() of a log product, so extreme parameters
    saturate to -inf rather than overflowing; -inf is a legal value (zero
    likelihood), NaN is not and is diagnosed by the callers.
    """
    log_eta = math.log(eta)
    total = 0.0
    with np.errstate(over="ignore", divide="ignore"):
        if log_exact.size:
            z = log_exact - log_eta
            total += (
                log_exact.size * (math.log(beta) - log_eta)
                + (beta - 1.0) * float(z.sum())
                - float(np.exp(beta * z).sum())
            )
        if log_cens.size:
            x = np.exp(beta * (log_cens - log_eta))
            if side == "right":
                total -= float(x.sum())
            else:
                total += float(log1mexp(x).sum())
    return total


def _diagnose_nan(c: ComponentSample, p: ComponentParams) -> str:
    one = np.empty(1)
    empty = np.empty(0)
    for i, r in enumerate(c.records):
        one[0] = math.log(r.time)
        if r.censored:
            term = _loglik_value(empty, one, c.side, p.beta, p.eta)
        else:
            term = _loglik_value(one, empty, c.side, p.beta, p.eta)
        if math.isnan(term):
            return (
                f"log-likelihood is NaN at record {i} (time={r.time}, "
                f"censored={r.censored}) for beta={p.beta}, eta={p.eta}"
            )
    return f"log-likelihood is NaN for beta={p.beta}, eta={p.eta}"


def component_loglik(c: ComponentSample, p: ComponentParams) -> float:
    """Log-likelihood of one component's censored sample.

    Exact records contribute the Weibull log density, right censorings the
    log survival ``-(t/eta)**beta`` and left censorings the log failure
    probability ``log(1 - exp(-(t/eta)**beta))``.  Returns ``-inf`` when
    the sample has zero likelihood under ``p``; raises only if the value
    is NaN, naming the offending record.
    """
    log_exact, log_cens = c._log_times
    total = _loglik_value(log_exact, log_cens, c.side, p.beta, p.eta)
    if math.isnan(total):
        raise NumericalError(_diagnose_nan(c, p))
    return total


def system_loglik(s: SystemSample, params: Sequence[ComponentParams]) -> float:
    """Sum of component log-likelihoods over the decomposition of ``s``."""
    if len(params) != s.k:
        raise ValueError(f"expected {s.k} parameter pairs, got {len(params)}")
    return sum(component_loglik(c, p) for c, p in zip(decompose(s), params))


def log_posterior_kernel(
    c: ComponentSample,
    p: ComponentParams,
    priors: tuple[MeanVarGamma, MeanVarGamma],
) -> float:
    """Unnormalized log posterior: likelihood plus both gamma prior terms.

    ``priors`` is the (shape prior, scale prior) pair.
    """
    prior_beta, prior_eta = priors
    return (
        component_loglik(c, p)
        + gamma_mv_logpdf(prior_beta, p.beta)
        + gamma_mv_logpdf(prior_eta, p.eta)
    )


def make_log_kernel(
    c: ComponentSample, priors: tuple[MeanVarGamma, MeanVarGamma]
) -> Callable[[ComponentParams], float]:
    """Bind sample and priors into a fast posterior-kernel callable."""
    prior_beta, prior_eta = priors
    log_exact, log_cens = c._log_times
    side = c.side

    def kernel(p: ComponentParams) -> float:
        total = _loglik_value(log_exact, log_cens, side, p.beta, p.eta)
        if math.isnan(total):
            raise NumericalError(_diagnose_nan(c, p))
        return (
            total
            + gamma_mv_logpdf(prior_beta, p.beta)
            + gamma_mv_logpdf(prior_eta, p.eta)
        )

    return kernel
