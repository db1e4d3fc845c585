"""Risk-ratio estimation from simulated outcomes and direction classification.

The estimator pools subjects across clusters (a ratio of arm-wise infected
fractions), mirroring the population-level definition of the risk ratio; it
does not average per-cluster ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "RiskRatioEstimate",
    "AggregateLogRR",
    "CellResult",
    "EXCLUSION_RULES",
    "risk_ratio",
    "aggregate_log_rr",
    "classify_direction",
]

EXCLUDE_NONE = "all-subjects"
EXCLUDE_BASELINE = "exclude-baseline-infected"
EXCLUDE_INDEX = "exclude-index-only"
EXCLUSION_RULES = (EXCLUDE_NONE, EXCLUDE_BASELINE, EXCLUDE_INDEX)

DIRECTION_UNBIASED = "direction-unbiased"
DIRECTION_BIASED = "direction-biased"
NULL_CONSISTENT = "null-consistent"
INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class RiskRatioEstimate:
    """One study's pooled risk ratio; rr/log_rr are None when undefined."""

    rr: float | None
    log_rr: float | None
    counts: tuple  # (infected_1, total_1, infected_0, total_0)
    exclusion: str

    @property
    def defined(self):
        return self.rr is not None


@dataclass(frozen=True)
class AggregateLogRR:
    """Replicate-level mean and standard error of log RR."""

    mean_log_rr: float | None
    se: float | None
    used: int
    dropped: int


@dataclass
class CellResult:
    """Aggregate for one (beta, gamma) grid cell."""

    beta: float
    gamma: float
    mean_log_rr: float | None
    se: float | None
    replicates_used: int
    replicates_dropped: int
    classification: str
    status: str = "ok"


def _eligible_mask(outcome, exclusion):
    if exclusion == EXCLUDE_NONE:
        return np.ones(outcome.n, dtype=bool)
    if exclusion == EXCLUDE_BASELINE:
        return np.asarray(outcome.y0) == 0
    if exclusion == EXCLUDE_INDEX:
        mask = np.ones(outcome.n, dtype=bool)
        if outcome.index is not None:
            mask[outcome.index] = False
        return mask
    raise ValueError(f"unknown exclusion rule {exclusion!r}")


def risk_ratio(outcomes, exclusion=EXCLUDE_NONE):
    """Pooled risk ratio over a list of cluster outcomes.

    Undefined (flagged, not raised) when either arm is empty after exclusion
    or the control arm has no events.
    """
    if not outcomes:
        raise ValueError("outcomes must be nonempty")
    infected = np.zeros(2, dtype=np.int64)
    totals = np.zeros(2, dtype=np.int64)
    for outcome in outcomes:
        eligible = _eligible_mask(outcome, exclusion)
        x = np.asarray(outcome.x)
        y = np.asarray(outcome.yT)
        for arm in (0, 1):
            sel = eligible & (x == arm)
            infected[arm] += int(y[sel].sum())
            totals[arm] += int(sel.sum())
    counts = (int(infected[1]), int(totals[1]), int(infected[0]), int(totals[0]))
    if totals[1] == 0 or totals[0] == 0 or infected[0] == 0:
        return RiskRatioEstimate(None, None, counts, exclusion)
    rr = (infected[1] / totals[1]) / (infected[0] / totals[0])
    log_rr = math.log(rr) if rr > 0 else None
    return RiskRatioEstimate(rr, log_rr, counts, exclusion)


def aggregate_log_rr(estimates):
    """Mean and standard error of log RR over defined replicate estimates."""
    if not estimates:
        raise ValueError("estimates must be nonempty")
    logs = [e.log_rr for e in estimates if e.defined and e.log_rr is not None]
    dropped = len(estimates) - len(logs)
    if not logs:
        return AggregateLogRR(None, None, 0, dropped)
    arr = np.asarray(logs)
    mean = float(arr.mean())
    se = float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else 0.0
    return AggregateLogRR(mean, se, len(arr), dropped)


def classify_direction(beta, mean_log_rr, se, z_threshold=2.0):
    """Compare the sign of the mean log RR against the sign of beta.

    With se = 0 (exact inputs) this reduces to the literal direction check:
    null-consistent/biased at beta = 0, otherwise unbiased iff the signs
    agree.  With noise, cells whose |mean/se| falls below z_threshold are
    null-consistent (beta = 0) or indeterminate (beta != 0).
    """
    if se < 0:
        raise ValueError(f"se must be >= 0, got {se}")
    if se == 0.0:
        z = 0.0 if mean_log_rr == 0.0 else math.copysign(math.inf, mean_log_rr)
    else:
        z = mean_log_rr / se
    if beta == 0.0:
        return NULL_CONSISTENT if abs(z) < z_threshold else DIRECTION_BIASED
    if abs(z) < z_threshold:
        return INDETERMINATE
    if (mean_log_rr > 0) == (beta > 0):
        return DIRECTION_UNBIASED
    return DIRECTION_BIASED
