"""Closed-form two-person cluster results against independent oracles.

Frozen reference values below were computed with the exact Markov-chain
solver on the 4-state pair chain (high-accuracy ODE integration), then
cross-checked against the closed forms; agreement was ~1e-15.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clusterbias.ctmc import infection_marginals
from clusterbias.errors import (
    DegenerateProcessError,
    NotApplicableError,
    NotEligibleError,
    UndefinedRatioError,
)
from clusterbias.hazards import EpidemicParams
from clusterbias.pair import (
    BRANCH_BOTH_DEGENERATE,
    BRANCH_CONTROL_DEGENERATE,
    BRANCH_GENERIC,
    BRANCH_TREATED_DEGENERATE,
    direction_bias_condition,
    exact_risk_ratio,
    expected_infection_probs,
    first_infection_law,
    risk_difference_sign,
    tstar_bound,
)

REF = EpidemicParams(alpha=1e-4, omega=0.01, beta=0.5, gamma=-0.5)

# Markov-chain oracle values for REF at t = 450.
REF_P_TREATED = 0.10694980123304275
REF_P_CONTROL = 0.0893036258369873


def test_frozen_oracle_values():
    ev = expected_infection_probs(REF, 450.0)
    assert ev.p_treated == pytest.approx(REF_P_TREATED, rel=1e-12)
    assert ev.p_control == pytest.approx(REF_P_CONTROL, rel=1e-12)
    assert exact_risk_ratio(REF, 450.0) == pytest.approx(
        REF_P_TREATED / REF_P_CONTROL, rel=1e-12
    )


def test_zero_time_undefined():
    with pytest.raises(UndefinedRatioError):
        exact_risk_ratio(REF, 0.0)


def test_null_params_give_rr_one():
    params = EpidemicParams(1e-4, 0.01, 0.0, 0.0)
    for t in (1.0, 50.0, 450.0, 1500.0):
        assert exact_risk_ratio(params, t) == pytest.approx(1.0, abs=1e-14)
        assert risk_difference_sign(params, t) == 0


def test_branch_selection():
    alpha, omega = 1e-4, 0.01
    generic = expected_infection_probs(EpidemicParams(alpha, omega, 0.5, -0.5), 10.0)
    assert generic.branch == BRANCH_GENERIC
    # e^beta * omega = alpha  =>  beta = log(alpha/omega)
    b_deg = math.log(alpha / omega)
    assert expected_infection_probs(
        EpidemicParams(alpha, omega, b_deg, 3.0), 10.0
    ).branch == BRANCH_TREATED_DEGENERATE
    # alpha e^beta = omega e^gamma
    g_deg = math.log(alpha * math.exp(0.5) / omega)
    assert expected_infection_probs(
        EpidemicParams(alpha, omega, 0.5, g_deg), 10.0
    ).branch == BRANCH_CONTROL_DEGENERATE
    both = expected_infection_probs(
        EpidemicParams(alpha, omega, b_deg, math.log(alpha * math.exp(b_deg) / omega)),
        10.0,
    )
    assert both.branch == BRANCH_BOTH_DEGENERATE


@pytest.mark.parametrize("offset", [1e-6, 1e-9])
def test_branch_continuity_at_singularities(offset):
    """Values just off a removable singularity match the degenerate branch."""
    alpha, omega, t = 1e-4, 0.01, 450.0
    b_deg = math.log(alpha / omega)
    at_boundary = expected_infection_probs(
        EpidemicParams(alpha, omega, b_deg, 1.0), t
    )
    nearby = expected_infection_probs(
        EpidemicParams(alpha, omega, b_deg + offset, 1.0), t
    )
    assert nearby.p_treated == pytest.approx(at_boundary.p_treated, rel=1e-5)
    assert nearby.p_control == pytest.approx(at_boundary.p_control, rel=1e-5)

    g_deg = math.log(alpha * math.exp(0.5) / omega)
    at_boundary = expected_infection_probs(
        EpidemicParams(alpha, omega, 0.5, g_deg), t
    )
    nearby = expected_infection_probs(
        EpidemicParams(alpha, omega, 0.5, g_deg + offset), t
    )
    assert nearby.p_treated == pytest.approx(at_boundary.p_treated, rel=1e-5)
    assert nearby.p_control == pytest.approx(at_boundary.p_control, rel=1e-5)


def test_rd_sign_matches_rr_sign_over_random_draws():
    rng = np.random.default_rng(20240817)
    for _ in range(200):
        params = EpidemicParams(
            alpha=float(10 ** rng.uniform(-5, -2)),
            omega=float(10 ** rng.uniform(-4, -1)),
            beta=float(rng.uniform(-3, 3)),
            gamma=float(rng.uniform(-3, 3)),
        )
        t = float(10 ** rng.uniform(0, 3.5))
        rr = exact_risk_ratio(params, t)
        # when both probabilities saturate, RR - 1 underflows while the
        # surrogate keeps its exact sign; only compare where RR resolves it
        if abs(rr - 1.0) > 1e-9:
            assert risk_difference_sign(params, t) == (1 if rr > 1.0 else -1)


@given(
    t1=st.floats(min_value=0.1, max_value=1000.0),
    scale=st.floats(min_value=1.01, max_value=10.0),
    beta=st.floats(min_value=-2.0, max_value=2.0),
    gamma=st.floats(min_value=-2.0, max_value=2.0),
)
@settings(max_examples=60, deadline=None)
def test_probabilities_monotone_in_time(t1, scale, beta, gamma):
    params = EpidemicParams(1e-4, 0.01, beta, gamma)
    early = expected_infection_probs(params, t1)
    late = expected_infection_probs(params, t1 * scale)
    assert late.p_treated >= early.p_treated - 1e-12
    assert late.p_control >= early.p_control - 1e-12


def test_pair_matches_markov_chain_directly():
    params = EpidemicParams(2e-4, 0.02, -1.2, 1.7)
    for t in (25.0, 300.0, 900.0):
        ev = expected_infection_probs(params, t)
        marg = infection_marginals(2, [1, 0], params, [], t)
        assert abs(ev.p_treated - marg[0]) < 1e-10
        assert abs(ev.p_control - marg[1]) < 1e-10


def test_direction_bias_condition_examples():
    # same-sign corners flagged by the analytic region, opposite-sign ones not
    assert direction_bias_condition(EpidemicParams(1e-4, 0.01, -0.5, -2.0))
    assert direction_bias_condition(EpidemicParams(1e-4, 0.01, 0.5, 2.0))
    assert not direction_bias_condition(EpidemicParams(1e-4, 0.01, -0.5, 2.0))
    assert not direction_bias_condition(EpidemicParams(1e-4, 0.01, 0.5, -2.0))
    assert not direction_bias_condition(EpidemicParams(1e-4, 0.01, 0.0, -2.0))


def test_direction_bias_condition_needs_transmission():
    with pytest.raises(NotApplicableError):
        direction_bias_condition(EpidemicParams(1e-4, 0.0, -0.5, -2.0))


def test_tstar_reversal_and_persistence():
    params = EpidemicParams(1e-4, 0.01, -0.5, -2.0)
    t_star = tstar_bound(params)
    assert math.isfinite(t_star) and t_star > 0
    # beta < 0 but RR flips above 1 past t*
    for mult in (1.0, 2.0, 5.0, 10.0):
        assert exact_risk_ratio(params, mult * t_star) > 1.0
    # and below t* the sign is the faithful one
    assert exact_risk_ratio(params, 0.5 * t_star) < 1.0


def test_tstar_requires_eligibility():
    with pytest.raises(NotEligibleError):
        tstar_bound(EpidemicParams(1e-4, 0.01, 0.5, -2.0))


def test_first_infection_law():
    law = first_infection_law(REF)
    assert law.rate == pytest.approx(1e-4 * (math.exp(0.5) + 1.0))
    assert law.p_first_is_treated == pytest.approx(
        math.exp(0.5) / (1.0 + math.exp(0.5))
    )
    with pytest.raises(DegenerateProcessError):
        first_infection_law(EpidemicParams(0.0, 0.01, 0.5, 0.5))
