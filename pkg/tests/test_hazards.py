import math

import numpy as np
import pytest

from clusterbias.hazards import (
    NOT_INFECTED,
    ClusterState,
    EpidemicParams,
    hazard_ratio,
    individual_hazard,
    susceptible_rates,
    total_susceptible_hazard,
)


def test_baseline_hazard_no_infectives():
    params = EpidemicParams(alpha=0.1, omega=0.5, beta=0.0, gamma=0.0)
    assert individual_hazard(params, 0, []) == pytest.approx(0.1)


def test_susceptibility_multiplier():
    params = EpidemicParams(alpha=0.1, omega=0.0, beta=1.0, gamma=0.0)
    assert individual_hazard(params, 1, []) == pytest.approx(0.1 * math.e)


def test_infectives_add_to_the_force():
    # two infectives, one treated: alpha + omega*(e^gamma + 1)
    params = EpidemicParams(alpha=0.1, omega=0.2, beta=0.0, gamma=0.5)
    h = individual_hazard(params, 0, [1, 0])
    assert h == pytest.approx(0.1 + 0.2 * (math.exp(0.5) + 1.0))


def test_hazard_ratio_is_exp_beta():
    params = EpidemicParams(alpha=0.3, omega=0.1, beta=-0.7, gamma=2.0)
    assert hazard_ratio(params) == pytest.approx(math.exp(-0.7))
    h1 = individual_hazard(params, 1, [1, 0, 0])
    h0 = individual_hazard(params, 0, [1, 0, 0])
    assert h1 / h0 == pytest.approx(math.exp(-0.7))


def test_invalid_params_rejected():
    with pytest.raises(ValueError):
        EpidemicParams(alpha=-0.1, omega=0.0, beta=0.0, gamma=0.0)
    with pytest.raises(ValueError):
        EpidemicParams(alpha=0.1, omega=-1.0, beta=0.0, gamma=0.0)
    with pytest.raises(ValueError):
        EpidemicParams(alpha=0.1, omega=0.0, beta=math.inf, gamma=0.0)


def test_susceptible_rates_vectorized_matches_scalar():
    params = EpidemicParams(alpha=0.05, omega=0.3, beta=0.4, gamma=-0.2)
    x = np.array([1, 0, 1, 0, 1], dtype=np.int8)
    y = np.array([0, 1, 0, 1, 0], dtype=np.int8)
    total, sus, rates = susceptible_rates(x, y, params)
    infected_x = x[y == 1]
    for idx, rate in zip(sus, rates):
        assert rate == pytest.approx(individual_hazard(params, x[idx], infected_x))
    assert total == pytest.approx(rates.sum())


def test_total_hazard_zero_when_everyone_infected():
    params = EpidemicParams(alpha=0.05, omega=0.3, beta=0.0, gamma=0.0)
    state = ClusterState(
        n=2,
        x=np.array([1, 0], dtype=np.int8),
        y=np.array([1, 1], dtype=np.int8),
        t_inf=np.array([0.5, 1.0]),
        now=2.0,
    )
    total, rates = total_susceptible_hazard(state, params)
    assert total == 0.0
    assert rates == []


def test_cluster_state_invariants():
    with pytest.raises(ValueError):
        ClusterState(
            n=2,
            x=np.array([1, 0], dtype=np.int8),
            y=np.array([1, 0], dtype=np.int8),
            t_inf=np.array([NOT_INFECTED, NOT_INFECTED]),  # infected without a time
            now=1.0,
        )
