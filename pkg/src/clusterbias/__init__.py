"""Risk-ratio bias analysis for within-cluster transmission studies.

Exact closed forms for two-person clusters, exact Markov-chain solutions for
small general clusters, an event-driven Monte Carlo simulator, observation-
time calibration, and (beta, gamma) maps classifying where the pooled risk
ratio points in the opposite direction from the individual hazard ratio.
"""

from .calibration import calibrate_T, cohort_null_incidence
from .ctmc import expected_rr_exact, infection_marginals, null_cumulative_incidence
from .designs import (
    Bernoulli,
    Block,
    ClusterRandomized,
    ConditionalBernoulli,
    Fixed,
    NoneInfected,
    ShiftedPoisson,
)
from .errors import (
    ClusterBiasError,
    ConfigError,
    DegenerateProcessError,
    NotApplicableError,
    NotEligibleError,
    NumericalError,
    ProgressError,
    SizeLimitError,
    UndefinedRatioError,
    UnreachableTargetError,
)
from .estimators import (
    AggregateLogRR,
    CellResult,
    RiskRatioEstimate,
    aggregate_log_rr,
    classify_direction,
    risk_ratio,
)
from .hazards import ClusterState, EpidemicParams, hazard_ratio, individual_hazard
from .mapio import read_map_csv, render_heatmap_svg, write_map_csv
from .pair import (
    direction_bias_condition,
    exact_risk_ratio,
    expected_infection_probs,
    first_infection_law,
    risk_difference_sign,
    tstar_bound,
)
from .simulate import (
    ClusterOutcome,
    ExponentialTime,
    FixedTime,
    StudyConfig,
    run_index_case_design,
    simulate_cluster,
    simulate_study,
)
from .sweep import (
    GridSpec,
    MapResult,
    config_fingerprint,
    run_ctmc_map,
    run_exact_map,
    run_mc_sweep,
)

__version__ = "0.1.0"
