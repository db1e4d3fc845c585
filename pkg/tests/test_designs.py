import logging

import numpy as np
import pytest
from scipy.stats import binom

from clusterbias.designs import (
    Bernoulli,
    Block,
    ClusterRandomized,
    ConditionalBernoulli,
    Fixed,
    NoneInfected,
    ShiftedPoisson,
)
from clusterbias.errors import ConfigError


def test_fixed_size():
    dist = Fixed(4)
    rng = np.random.default_rng(0)
    assert all(dist.draw(rng) == 4 for _ in range(10))
    assert dist.truncated_support() == [(4, 1.0)]
    with pytest.raises(ConfigError):
        Fixed(0)


def test_shifted_poisson_support_sums_to_one():
    dist = ShiftedPoisson(3.0, shift=1)
    support = dist.truncated_support(1e-9)
    sizes = [n for n, _ in support]
    weights = np.array([w for _, w in support])
    assert min(sizes) == 1
    assert weights.sum() == pytest.approx(1.0, abs=1e-12)
    # matches the Poisson pmf on the retained range
    from scipy.stats import poisson
    for (n, w) in support[:5]:
        assert w == pytest.approx(poisson.pmf(n - 1, 3.0), rel=1e-6)


def test_shifted_poisson_draw_frequencies():
    dist = ShiftedPoisson(3.0, shift=1)
    rng = np.random.default_rng(42)
    draws = np.array([dist.draw(rng) for _ in range(20000)])
    assert draws.min() >= 1
    mean, se = 4.0, np.sqrt(3.0 / 20000)
    assert abs(draws.mean() - mean) < 3 * se


def test_bernoulli_frequencies_and_weights():
    scheme = Bernoulli(0.3)
    rng = np.random.default_rng(7)
    draws = np.concatenate([scheme.draw(rng, 5) for _ in range(4000)])
    se = np.sqrt(0.3 * 0.7 / len(draws))
    assert abs(draws.mean() - 0.3) < 3 * se
    weights = dict(scheme.treated_count_weights(5))
    for m in range(6):
        assert weights[m] == pytest.approx(binom.pmf(m, 5, 0.3), rel=1e-9)


def test_block_exactly_k():
    scheme = Block("exactly-k", 2)
    rng = np.random.default_rng(1)
    for _ in range(50):
        x = scheme.draw(rng, 4)
        assert x.sum() == 2
    assert scheme.treated_count_weights(4) == [(2, 1.0)]


def test_block_rules():
    assert Block("floor-half").treated_count(5) == 2
    assert Block("exactly-one").treated_count(7) == 1
    with pytest.raises(ConfigError):
        Block("exactly-k", None)
    with pytest.raises(ConfigError):
        Block("half")


def test_block_clamps_oversized_k(caplog):
    scheme = Block("exactly-k", 5)
    with caplog.at_level(logging.WARNING):
        assert scheme.treated_count(3) == 3
    assert any("clamp" in rec.message for rec in caplog.records)


def test_block_uniform_over_subjects():
    """Each subject is treated with probability k/n under block randomization."""
    scheme = Block("exactly-k", 2)
    rng = np.random.default_rng(3)
    hits = np.zeros(4)
    reps = 8000
    for _ in range(reps):
        hits += scheme.draw(rng, 4)
    freq = hits / reps
    se = np.sqrt(0.5 * 0.5 / reps)
    assert np.all(np.abs(freq - 0.5) < 4 * se)


def test_cluster_randomized_all_or_nothing():
    scheme = ClusterRandomized(0.5)
    rng = np.random.default_rng(11)
    treated = 0
    for _ in range(2000):
        x = scheme.draw(rng, 4)
        assert x.min() == x.max()
        treated += int(x[0])
    se = np.sqrt(0.25 / 2000)
    assert abs(treated / 2000 - 0.5) < 3 * se
    assert scheme.treated_count_weights(4) == [(4, 0.5), (0, 0.5)]
    assert list(scheme.draw_forced(True, 3)) == [1, 1, 1]


def test_baseline_schemes():
    rng = np.random.default_rng(5)
    x = np.array([1, 0, 1, 0], dtype=np.int8)
    assert NoneInfected().draw(rng, x).sum() == 0
    scheme = ConditionalBernoulli(q1=1.0, q0=0.0)
    y0 = scheme.draw(rng, x)
    assert list(y0) == [1, 0, 1, 0]
    with pytest.raises(ConfigError):
        ConditionalBernoulli(1.5, 0.0)
