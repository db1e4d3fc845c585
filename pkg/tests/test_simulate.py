import numpy as np
import pytest

from clusterbias.designs import Block, ClusterRandomized, Fixed, NoneInfected
from clusterbias.errors import ConfigError, ProgressError
from clusterbias.hazards import EpidemicParams
from clusterbias.simulate import (
    ExponentialTime,
    FixedTime,
    StudyConfig,
    run_index_case_design,
    simulate_cluster,
    simulate_study,
)


def _config(params, clusters=100, seed=0, scheme=None, size=None, obs=None):
    return StudyConfig(
        params=params,
        covariate_scheme=scheme or Block("exactly-k", 2),
        size_dist=size or Fixed(4),
        observation_rule=obs or FixedTime(450.0),
        cluster_count=clusters,
        master_seed=seed,
    )


def test_alpha_zero_no_baseline_nobody_infected():
    params = EpidemicParams(0.0, 0.01, 0.5, 0.5)
    rng = np.random.default_rng(0)
    out = simulate_cluster(rng, 4, [1, 1, 0, 0], np.zeros(4, dtype=np.int8),
                           params, 1000.0)
    assert out.yT.sum() == 0


def test_no_transmission_matches_binomial_oracle():
    """omega = 0: each subject is an independent exponential clock."""
    params = EpidemicParams(alpha=1e-3, omega=0.0, beta=0.7, gamma=0.0)
    rng = np.random.default_rng(123)
    t = 300.0
    reps = 20000
    hits = np.zeros(2)
    for _ in range(reps):
        out = simulate_cluster(rng, 2, [1, 0], np.zeros(2, dtype=np.int8),
                               params, t)
        hits += out.yT
    p1 = 1.0 - np.exp(-1e-3 * np.exp(0.7) * t)
    p0 = 1.0 - np.exp(-1e-3 * t)
    for frac, p in ((hits[0] / reps, p1), (hits[1] / reps, p0)):
        se = np.sqrt(p * (1 - p) / reps)
        assert abs(frac - p) < 3 * se


def test_study_determinism():
    params = EpidemicParams(1e-4, 0.01, 1.0, -1.0)
    a = simulate_study(_config(params, seed=42))
    b = simulate_study(_config(params, seed=42))
    assert len(a) == len(b) == 100
    for oa, ob in zip(a, b):
        assert np.array_equal(oa.x, ob.x)
        assert np.array_equal(oa.yT, ob.yT)
    c = simulate_study(_config(params, seed=43))
    assert any(not np.array_equal(oa.yT, oc.yT) for oa, oc in zip(a, c))


def test_study_block_design_postconditions():
    params = EpidemicParams(1e-4, 0.01, 0.0, 0.0)
    outcomes = simulate_study(_config(params, clusters=50))
    for out in outcomes:
        assert out.n == 4
        assert out.x.sum() == 2
        assert out.y0.sum() == 0
        assert np.all(out.yT >= out.y0)


def test_spawn_prefix_gives_independent_streams():
    params = EpidemicParams(1e-4, 0.01, 0.0, 0.0)
    cfg = _config(params, clusters=30)
    a = simulate_study(cfg, spawn_key_prefix=(0, 0, 0))
    b = simulate_study(cfg, spawn_key_prefix=(0, 0, 1))
    assert any(not np.array_equal(oa.yT, ob.yT) for oa, ob in zip(a, b))


def test_exact_split_assignment():
    params = EpidemicParams(1e-4, 0.01, 0.0, 0.0)
    cfg = _config(params, clusters=101,
                  scheme=ClusterRandomized(0.5, exact_split=True))
    outcomes = simulate_study(cfg)
    treated_clusters = sum(int(out.x[0]) for out in outcomes)
    assert treated_clusters == round(0.5 * 101)


def test_exponential_observation_time():
    params = EpidemicParams(1e-4, 0.01, 0.0, 0.0)
    cfg = _config(params, clusters=200, obs=ExponentialTime(450.0))
    times = np.array([out.T for out in simulate_study(cfg)])
    assert len(np.unique(times)) > 100
    se = 450.0 / np.sqrt(200)
    assert abs(times.mean() - 450.0) < 3 * se


def test_invalid_configs_rejected():
    params = EpidemicParams(1e-4, 0.01, 0.0, 0.0)
    with pytest.raises(ConfigError):
        simulate_study(_config(params, clusters=0))
    with pytest.raises(ConfigError):
        FixedTime(0.0)
    with pytest.raises(ConfigError):
        ExponentialTime(-1.0)


def test_index_case_design_postconditions():
    params = EpidemicParams(1e-3, 0.01, 0.5, 0.5)
    cfg = _config(params, clusters=1)  # cluster_count unused by this driver
    outcomes = run_index_case_design(cfg, burn_in_T0=75.0, follow_up_T1=10.0,
                                     target_selected=40)
    assert len(outcomes) == 40
    for out in outcomes:
        assert out.index is not None
        assert out.y0[out.index] == 1  # index case infected at selection
        assert out.y0.sum() >= 1
        assert np.all(out.yT >= out.y0)


def test_index_case_design_budget_exhaustion():
    params = EpidemicParams(0.0, 0.01, 0.5, 0.5)  # nobody ever gets infected
    cfg = _config(params, clusters=1)
    with pytest.raises(ProgressError):
        run_index_case_design(cfg, burn_in_T0=75.0, follow_up_T1=10.0,
                              target_selected=5, batch_factor=2, max_batches=3)
