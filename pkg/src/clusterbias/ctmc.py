"""Exact transient solution of the within-cluster infection process.

The infection pattern of an n-person cluster is a continuous-time Markov
chain on the 2^n subsets of infected subjects, with transition rate

    rate(S -> S + {j}) = e^{x_j beta} * (alpha + sum_{k in S} omega e^{x_k gamma})

for each susceptible j.  Solving the forward equations gives noise-free
marginal infection probabilities, which serve as the oracle for the Monte
Carlo simulator and for exact risk-ratio maps on small clusters.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm
from scipy.sparse import coo_matrix

from .errors import NotApplicableError, NumericalError, SizeLimitError, UndefinedRatioError
from .hazards import EpidemicParams

__all__ = [
    "infection_marginals",
    "null_cumulative_incidence",
    "expected_rr_exact",
    "SIZE_CAP",
    "ENUMERATION_CAP",
]

#: Largest cluster the subset chain will solve (2^n states).
SIZE_CAP = 14
#: Largest per-assignment cluster size in exact risk-ratio enumeration.
ENUMERATION_CAP = 10
#: Cluster-size distributions are truncated at cumulative mass 1 - TAIL_MASS.
TAIL_MASS = 1e-9

_RTOL = 1e-11
_ATOL = 1e-14


def _subset_generator(n, x, params):
    """Transpose of the generator matrix of the subset chain, as sparse CSR."""
    nstates = 1 << n
    states = np.arange(nstates)
    bits = (states[:, None] >> np.arange(n)) & 1  # (state, subject)
    force = params.alpha + params.omega * (bits @ np.exp(np.asarray(x) * params.gamma))
    rows, cols, vals = [], [], []
    for j in range(n):
        sus = np.flatnonzero(bits[:, j] == 0)
        rate = math.exp(x[j] * params.beta) * force[sus]
        rows.append(sus | (1 << j))  # destination states
        cols.append(sus)             # source states
        vals.append(rate)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    outflow = np.zeros(nstates)
    np.add.at(outflow, cols, vals)
    rows = np.concatenate([rows, states])
    cols = np.concatenate([cols, states])
    vals = np.concatenate([vals, -outflow])
    return coo_matrix((vals, (rows, cols)), shape=(nstates, nstates)).tocsr(), bits


def _solve_forward(matrix, p0, t):
    """Integrate dp/dt = matrix @ p from the point mass p0 to time t."""
    sol = solve_ivp(
        lambda _, p: matrix @ p,
        (0.0, t),
        p0,
        method="DOP853",
        rtol=_RTOL,
        atol=_ATOL,
    )
    if not sol.success:
        raise NumericalError(f"forward integration failed: {sol.message}")
    p = sol.y[:, -1]
    total = p.sum()
    if abs(total - 1.0) > 1e-9:
        raise NumericalError(
            f"probability mass drifted to {total!r} at t={t}; tolerance exceeded"
        )
    return np.clip(p, 0.0, 1.0)


def infection_marginals(n, x, params, y0, t):
    """P(Y_j(t) = 1) for every subject j, starting from baseline infected set y0.

    y0 is an iterable of subject indices infected at time zero; their
    marginals are exactly 1.
    """
    if n > SIZE_CAP:
        raise SizeLimitError(f"cluster size {n} exceeds the cap of {SIZE_CAP}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    x = np.asarray(x, dtype=np.int8)
    if len(x) != n:
        raise ValueError("covariate vector length must equal n")
    start = 0
    for j in y0:
        if not 0 <= j < n:
            raise ValueError(f"baseline subject index {j} out of range")
        start |= 1 << j
    if t == 0:
        return ((start >> np.arange(n)) & 1).astype(float)
    matrix, bits = _subset_generator(n, x, params)
    p0 = np.zeros(1 << n)
    p0[start] = 1.0
    p = _solve_forward(matrix, p0, t)
    return bits.T @ p


def null_cumulative_incidence(n, alpha, omega, t):
    """Expected infected fraction at time t when beta = gamma = 0.

    All subjects are exchangeable, so the subset chain collapses to a birth
    chain on the infected count k with rate k -> k+1 of (n - k)(alpha + k omega).
    The (n+1)-state chain is solved by matrix exponential, which is exact.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t == 0:
        return 0.0
    rates = (n - np.arange(n)) * (alpha + omega * np.arange(n))
    generator = np.zeros((n + 1, n + 1))
    generator[np.arange(1, n + 1), np.arange(n)] = rates
    generator[np.arange(n), np.arange(n)] = -rates
    p = expm(generator * t)[:, 0]
    return float(np.arange(n + 1) @ np.clip(p, 0.0, 1.0)) / n


def _baseline_count_weights(baseline, m, n):
    """Weights over (treated-infected, control-infected) baseline counts."""
    from scipy.stats import binom as _binom

    from .designs import ConditionalBernoulli, NoneInfected

    if baseline is None or isinstance(baseline, NoneInfected):
        return [((0, 0), 1.0)]
    if isinstance(baseline, ConditionalBernoulli):
        out = []
        for b1 in range(m + 1):
            w1 = _binom.pmf(b1, m, baseline.q1)
            for b0 in range(n - m + 1):
                w = w1 * _binom.pmf(b0, n - m, baseline.q0)
                if w > 0:
                    out.append(((b1, b0), float(w)))
        return out
    raise NotApplicableError(f"unsupported baseline scheme {baseline!r}")


def expected_rr_exact(scheme, size_dist, params, t, exclusion="all-subjects",
                      baseline=None):
    """Exact risk ratio under a covariate scheme and cluster-size distribution.

    Averages the subset-chain marginals over the assignment distribution
    (and over baseline-infection counts, when a baseline scheme is given),
    pooling subjects across cluster sizes exactly as the estimator does.
    Subjects with equal covariate and baseline status are exchangeable, so
    one representative pattern per (size, treated count, baseline counts)
    suffices.
    """
    if exclusion not in ("all-subjects", "exclude-baseline-infected"):
        raise NotApplicableError(
            f"exclusion rule {exclusion!r} is not available in exact enumeration"
        )
    num = np.zeros(2)  # expected infected eligible subjects, per arm
    den = np.zeros(2)  # expected eligible subjects, per arm
    for n, w_n in size_dist.truncated_support(TAIL_MASS):
        if n > ENUMERATION_CAP:
            raise SizeLimitError(
                f"cluster size {n} exceeds the enumeration cap of {ENUMERATION_CAP}"
            )
        for m, w_m in scheme.treated_count_weights(n):
            if w_m == 0.0:
                continue
            x = np.array([1] * m + [0] * (n - m), dtype=np.int8)
            for (b1, b0), w_b in _baseline_count_weights(baseline, m, n):
                w = w_n * w_m * w_b
                y0 = list(range(b1)) + list(range(m, m + b0))
                marg = infection_marginals(n, x, params, y0, t)
                eligible = np.ones(n, dtype=bool)
                if exclusion == "exclude-baseline-infected":
                    eligible[y0] = False
                for arm in (0, 1):
                    sel = eligible & (x == arm)
                    num[arm] += w * marg[sel].sum()
                    den[arm] += w * sel.sum()
    if den[1] == 0 or den[0] == 0 or num[0] == 0:
        raise UndefinedRatioError("risk ratio undefined: empty or event-free arm")
    return (num[1] / den[1]) / (num[0] / den[0])
