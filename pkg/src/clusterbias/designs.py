"""Study-design generators: cluster sizes, covariates, baseline infections.

Each scheme is a small frozen dataclass with a `draw` method taking a numpy
Generator, plus the exact weight enumerations the closed-form evaluator needs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom, poisson

from .errors import ConfigError

__all__ = [
    "Fixed",
    "ShiftedPoisson",
    "Bernoulli",
    "Block",
    "ClusterRandomized",
    "NoneInfected",
    "ConditionalBernoulli",
    "draw_cluster_size",
    "assign_covariates",
    "assign_baseline",
]

logger = logging.getLogger(__name__)

BLOCK_EXACTLY_K = "exactly-k"
BLOCK_FLOOR_HALF = "floor-half"
BLOCK_EXACTLY_ONE = "exactly-one"


# ---------------------------------------------------------------------------
# Cluster-size distributions

@dataclass(frozen=True)
class Fixed:
    """Constant cluster size."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("size.n", f"cluster size must be >= 1, got {self.n}")

    def draw(self, rng):
        return self.n

    def truncated_support(self, tail_mass=1e-9):
        return [(self.n, 1.0)]


@dataclass(frozen=True)
class ShiftedPoisson:
    """Cluster size Poisson(mu) + shift, so every draw is >= shift."""

    mu: float
    shift: int = 1

    def __post_init__(self):
        if self.mu < 0:
            raise ConfigError("size.mu", f"mean must be >= 0, got {self.mu}")
        if self.shift < 1:
            raise ConfigError("size.shift", f"shift must be >= 1, got {self.shift}")

    def draw(self, rng):
        return int(rng.poisson(self.mu)) + self.shift

    def truncated_support(self, tail_mass=1e-9):
        """(size, weight) pairs covering all but `tail_mass` probability.

        The discarded tail's mass is redistributed by renormalisation.
        """
        if self.mu == 0:
            return [(self.shift, 1.0)]
        kmax = int(poisson.ppf(1.0 - tail_mass, self.mu)) + 1
        ks = np.arange(kmax + 1)
        weights = poisson.pmf(ks, self.mu)
        weights /= weights.sum()
        return [(int(k) + self.shift, float(w)) for k, w in zip(ks, weights)]


# ---------------------------------------------------------------------------
# Covariate schemes

@dataclass(frozen=True)
class Bernoulli:
    """Independent per-subject assignment with Pr(x=1) = p."""

    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ConfigError("covariate.p", f"p must be in [0, 1], got {self.p}")

    def draw(self, rng, n):
        return (rng.random(n) < self.p).astype(np.int8)

    def treated_count_weights(self, n):
        ms = np.arange(n + 1)
        return [(int(m), float(w)) for m, w in zip(ms, binom.pmf(ms, n, self.p))]


@dataclass(frozen=True)
class Block:
    """Within-cluster block randomization: a uniformly random subset is treated.

    The subset size is k (clamped to n), floor(n/2), or 1 depending on `rule`.
    """

    rule: str = BLOCK_EXACTLY_K
    k: int | None = None

    def __post_init__(self):
        if self.rule not in (BLOCK_EXACTLY_K, BLOCK_FLOOR_HALF, BLOCK_EXACTLY_ONE):
            raise ConfigError("covariate.block_rule", f"unknown rule {self.rule!r}")
        if self.rule == BLOCK_EXACTLY_K:
            if self.k is None or self.k < 0:
                raise ConfigError(
                    "covariate.block_k", f"exactly-k needs k >= 0, got {self.k}"
                )

    def treated_count(self, n):
        if self.rule == BLOCK_FLOOR_HALF:
            return n // 2
        if self.rule == BLOCK_EXACTLY_ONE:
            return 1
        if self.k > n:
            logger.warning("block size k=%d exceeds cluster size n=%d; clamping", self.k, n)
            return n
        return self.k

    def draw(self, rng, n):
        m = self.treated_count(n)
        x = np.zeros(n, dtype=np.int8)
        x[rng.choice(n, size=m, replace=False)] = 1
        return x

    def treated_count_weights(self, n):
        return [(self.treated_count(n), 1.0)]


@dataclass(frozen=True)
class ClusterRandomized:
    """All-or-nothing assignment: the whole cluster is treated with probability p.

    With exact_split the study driver fixes the number of treated clusters to
    round(p * N) instead of flipping an independent coin per cluster.
    """

    p: float
    exact_split: bool = False

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ConfigError("covariate.p", f"p must be in [0, 1], got {self.p}")

    def draw(self, rng, n):
        value = 1 if rng.random() < self.p else 0
        return np.full(n, value, dtype=np.int8)

    def draw_forced(self, all_ones, n):
        return np.full(n, 1 if all_ones else 0, dtype=np.int8)

    def treated_count_weights(self, n):
        return [(n, self.p), (0, 1.0 - self.p)]


# ---------------------------------------------------------------------------
# Baseline infection schemes

@dataclass(frozen=True)
class NoneInfected:
    """Everyone susceptible at time zero."""

    def draw(self, rng, x):
        return np.zeros(len(x), dtype=np.int8)


@dataclass(frozen=True)
class ConditionalBernoulli:
    """Independent baseline infections with arm-specific probabilities.

    q1 = Pr[Y(0)=1 | x=1], q0 = Pr[Y(0)=1 | x=0].
    """

    q1: float
    q0: float

    def __post_init__(self):
        for name, q in (("q1", self.q1), ("q0", self.q0)):
            if not 0.0 <= q <= 1.0:
                raise ConfigError(f"baseline.{name}", f"must be in [0, 1], got {q}")

    def draw(self, rng, x):
        x = np.asarray(x)
        probs = np.where(x == 1, self.q1, self.q0)
        return (rng.random(len(x)) < probs).astype(np.int8)


# ---------------------------------------------------------------------------
# Functional wrappers

def draw_cluster_size(rng, dist):
    """Draw one cluster size from a size distribution."""
    return dist.draw(rng)


def assign_covariates(rng, scheme, n):
    """Draw a length-n binary covariate vector under a covariate scheme."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return scheme.draw(rng, n)


def assign_baseline(rng, scheme, x):
    """Draw the baseline infection indicators given the covariate vector."""
    return scheme.draw(rng, x)
