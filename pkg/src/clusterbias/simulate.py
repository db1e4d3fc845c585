"""Event-driven Monte Carlo simulation of cluster cohorts.

Each cluster runs the competing-risks infection process with exponential
waiting times: draw one exponential at the total susceptible hazard, pick
the newly infected subject proportionally to its individual hazard, repeat
until the observation time is passed or nobody is left to infect.

Reproducibility contract: every cluster gets its own numpy Philox stream
derived from (master_seed, *spawn_key_prefix, cluster index) through
SeedSequence spawning, so results are bit-stable across platforms and
independent of execution order or worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .designs import ClusterRandomized, NoneInfected
from .errors import ConfigError, ProgressError
from .hazards import EpidemicParams

__all__ = [
    "FixedTime",
    "ExponentialTime",
    "StudyConfig",
    "ClusterOutcome",
    "simulate_cluster",
    "simulate_study",
    "run_index_case_design",
]

# Reserved spawn-key component for the exact-split assignment stream, outside
# the range of cluster indices.
_ASSIGNMENT_KEY = 2**31


@dataclass(frozen=True)
class FixedTime:
    """Constant observation time T."""

    t: float

    def __post_init__(self):
        if not (self.t > 0 and math.isfinite(self.t)):
            raise ConfigError("observation.t", f"must be finite and > 0, got {self.t}")

    def draw(self, rng):
        return self.t


@dataclass(frozen=True)
class ExponentialTime:
    """Observation time exponentially distributed with the given mean."""

    mean: float

    def __post_init__(self):
        if not (self.mean > 0 and math.isfinite(self.mean)):
            raise ConfigError(
                "observation.mean", f"must be finite and > 0, got {self.mean}"
            )

    def draw(self, rng):
        return rng.exponential(self.mean)


@dataclass(frozen=True)
class StudyConfig:
    """Everything needed to simulate one cohort of clusters."""

    params: EpidemicParams
    covariate_scheme: object
    size_dist: object
    baseline_scheme: object = field(default_factory=NoneInfected)
    observation_rule: object = field(default_factory=lambda: FixedTime(450.0))
    cluster_count: int = 500
    master_seed: int = 0


@dataclass
class ClusterOutcome:
    """Final state of one simulated cluster.

    y0 holds baseline infections (at selection time for index-case designs),
    yT the infections by the realized observation time T.  index is the
    selected index case, when the design has one.
    """

    n: int
    x: np.ndarray
    y0: np.ndarray
    yT: np.ndarray
    index: int | None
    T: float


def simulate_cluster(rng, n, x, y0, params, T):
    """Run one cluster's infection process from y0 through time T."""
    x = np.asarray(x, dtype=np.int8)
    y = np.asarray(y0, dtype=np.int8).copy()
    infectivity = params.omega * np.exp(x * params.gamma)
    susceptibility = np.exp(x * params.beta)
    now = 0.0
    while True:
        sus = np.flatnonzero(y == 0)
        if len(sus) == 0:
            break
        force = params.alpha + infectivity[y == 1].sum()
        rates = susceptibility[sus] * force
        total = rates.sum()
        if total <= 0.0:
            break
        now += rng.exponential(1.0 / total)
        if now > T:
            break
        cum = np.cumsum(rates)
        j = sus[np.searchsorted(cum, rng.random() * total)]
        y[j] = 1
    return ClusterOutcome(n=n, x=x, y0=np.asarray(y0, dtype=np.int8), yT=y,
                          index=None, T=T)


def _validate_config(config):
    if config.cluster_count < 1:
        raise ConfigError(
            "cluster_count", f"must be >= 1, got {config.cluster_count}"
        )


def _exact_split_assignment(config, spawn_key_prefix):
    """Predetermined treated clusters for exact-split cluster randomization."""
    scheme = config.covariate_scheme
    if not (isinstance(scheme, ClusterRandomized) and scheme.exact_split):
        return None
    seq = np.random.SeedSequence(
        config.master_seed, spawn_key=tuple(spawn_key_prefix) + (_ASSIGNMENT_KEY,)
    )
    rng = np.random.Generator(np.random.Philox(seq))
    n_treated = round(scheme.p * config.cluster_count)
    order = rng.permutation(config.cluster_count)
    treated = np.zeros(config.cluster_count, dtype=bool)
    treated[order[:n_treated]] = True
    return treated


def _cluster_streams(master_seed, spawn_key_prefix, count):
    root = np.random.SeedSequence(master_seed, spawn_key=tuple(spawn_key_prefix))
    return [np.random.Generator(np.random.Philox(child)) for child in root.spawn(count)]


def simulate_study(config, spawn_key_prefix=()):
    """Simulate the whole cohort; returns outcomes in cluster-index order.

    spawn_key_prefix lets a caller (e.g. a sweep) namespace the per-cluster
    seed streams by grid cell and replicate.
    """
    _validate_config(config)
    forced = _exact_split_assignment(config, spawn_key_prefix)
    streams = _cluster_streams(
        config.master_seed, spawn_key_prefix, config.cluster_count
    )
    outcomes = []
    for i, rng in enumerate(streams):
        n = config.size_dist.draw(rng)
        if forced is not None:
            x = config.covariate_scheme.draw_forced(bool(forced[i]), n)
        else:
            x = config.covariate_scheme.draw(rng, n)
        y0 = config.baseline_scheme.draw(rng, x)
        t_obs = config.observation_rule.draw(rng)
        outcomes.append(simulate_cluster(rng, n, x, y0, config.params, t_obs))
    return outcomes


def run_index_case_design(config, burn_in_T0, follow_up_T1, target_selected,
                          spawn_key_prefix=(), batch_factor=4, max_batches=100):
    """Two-phase design: burn in, keep clusters with infections, follow up.

    Clusters start all-uninfected and run through burn_in_T0; those with at
    least one infection are retained, one infected subject is sampled
    uniformly as the index case, and the retained clusters continue for an
    additional follow_up_T1 (memoryless continuation).  Returns exactly
    target_selected outcomes, whose y0 is the state at the end of burn-in.
    """
    if burn_in_T0 <= 0:
        raise ConfigError("burn_in_T0", f"must be > 0, got {burn_in_T0}")
    if follow_up_T1 <= 0:
        raise ConfigError("follow_up_T1", f"must be > 0, got {follow_up_T1}")
    if target_selected < 1:
        raise ConfigError("target_selected", f"must be >= 1, got {target_selected}")
    _validate_config(config)
    batch_size = batch_factor * target_selected
    root = np.random.SeedSequence(
        config.master_seed, spawn_key=tuple(spawn_key_prefix)
    )
    selected = []
    for _ in range(max_batches):
        for child in root.spawn(batch_size):
            rng = np.random.Generator(np.random.Philox(child))
            n = config.size_dist.draw(rng)
            x = config.covariate_scheme.draw(rng, n)
            baseline = simulate_cluster(
                rng, n, x, np.zeros(n, dtype=np.int8), config.params, burn_in_T0
            )
            infected = np.flatnonzero(baseline.yT == 1)
            if len(infected) == 0:
                continue
            index = int(infected[rng.integers(len(infected))])
            followed = simulate_cluster(
                rng, n, x, baseline.yT, config.params, follow_up_T1
            )
            followed.index = index
            selected.append(followed)
            if len(selected) == target_selected:
                return selected
    raise ProgressError(
        f"selected only {len(selected)}/{target_selected} clusters "
        f"after {max_batches} batches of {batch_size}"
    )
