"""Model parameters and instantaneous infection hazards.

The transmission model is a within-cluster susceptible-infective process:
a susceptible subject with binary covariate x_j experiences hazard

    e^{x_j * beta} * (alpha + sum over infected k of omega * e^{x_k * gamma})

where alpha is the exogenous (community) force of infection and omega the
per-infective within-cluster transmission rate.  Both rates are constant
in time, so all waiting times are exponential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "EpidemicParams",
    "ClusterState",
    "individual_hazard",
    "total_susceptible_hazard",
    "hazard_ratio",
]

#: Sentinel for "never infected" in infection-time vectors.
NOT_INFECTED = math.inf


@dataclass(frozen=True)
class EpidemicParams:
    """The four scalars of the data-generating process.

    alpha: exogenous infection rate (per unit time, >= 0)
    omega: pairwise within-cluster transmission rate (per unit time, >= 0)
    beta:  log susceptibility effect of the covariate
    gamma: log infectiousness effect of the covariate
    """

    alpha: float
    omega: float
    beta: float
    gamma: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            raise ValueError(f"alpha must be finite and >= 0, got {self.alpha}")
        if not (math.isfinite(self.omega) and self.omega >= 0):
            raise ValueError(f"omega must be finite and >= 0, got {self.omega}")
        if not math.isfinite(self.beta):
            raise ValueError(f"beta must be finite, got {self.beta}")
        if not math.isfinite(self.gamma):
            raise ValueError(f"gamma must be finite, got {self.gamma}")


@dataclass
class ClusterState:
    """Snapshot of one cluster at simulation time `now`.

    x, y are length-n binary vectors (covariate, infected indicator);
    t_inf holds per-subject infection times, NOT_INFECTED for susceptibles.
    """

    n: int
    x: np.ndarray
    y: np.ndarray
    t_inf: np.ndarray
    now: float

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.int8)
        self.y = np.asarray(self.y, dtype=np.int8)
        self.t_inf = np.asarray(self.t_inf, dtype=float)
        if self.n < 1:
            raise ValueError(f"cluster size must be >= 1, got {self.n}")
        if not (len(self.x) == len(self.y) == len(self.t_inf) == self.n):
            raise ValueError("x, y, t_inf must all have length n")
        infected = self.y == 1
        if not np.all((self.t_inf[infected] >= 0) & (self.t_inf[infected] <= self.now)):
            raise ValueError("infected subjects need t_inf in [0, now]")
        if not np.all(np.isinf(self.t_inf[~infected])):
            raise ValueError("susceptible subjects must have t_inf = NOT_INFECTED")


def individual_hazard(params, x_j, infected_covariates):
    """Hazard to one susceptible subject given the covariates of current infecteds.

    `infected_covariates` is any iterable of binary covariate values, one per
    currently infected cluster member.
    """
    force = params.alpha
    for x_k in infected_covariates:
        force += params.omega * math.exp(x_k * params.gamma)
    return math.exp(x_j * params.beta) * force


def susceptible_rates(x, y, params):
    """Per-subject hazards for the susceptibles of a cluster, vectorised.

    Returns (total_rate, susceptible_indices, rates) where `rates` is aligned
    with `susceptible_indices`.
    """
    x = np.asarray(x)
    y = np.asarray(y)
    infected_force = params.alpha + params.omega * np.sum(
        np.exp(x[y == 1] * params.gamma)
    )
    sus = np.flatnonzero(y == 0)
    rates = np.exp(x[sus] * params.beta) * infected_force
    return float(rates.sum()), sus, rates


def total_susceptible_hazard(state, params):
    """Total infection rate over all susceptibles, plus the per-subject list.

    The list is aligned with the susceptible indices in subject order; the
    total is zero when everyone is infected.
    """
    total, _, rates = susceptible_rates(state.x, state.y, params)
    return total, list(rates)


def hazard_ratio(params):
    """Ratio of instantaneous risks under a one-unit covariate change: e^beta."""
    return math.exp(params.beta)
