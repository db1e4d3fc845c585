"""(beta, gamma) grid sweeps: exact pair maps, exact CTMC maps, Monte Carlo.

Every map is a deterministic function of its inputs.  Monte Carlo cells
derive their seed streams from (master_seed, beta index, gamma index,
replicate), so the result is independent of worker count and execution
order; per-cell failures are recorded in the cell's status instead of
aborting the sweep.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, is_dataclass, replace

import numpy as np

from .calibration import calibrate_T
from .ctmc import expected_rr_exact
from .designs import Fixed
from .errors import ClusterBiasError, ConfigError
from .estimators import (
    CellResult,
    INDETERMINATE,
    aggregate_log_rr,
    classify_direction,
    risk_ratio,
)
from .hazards import EpidemicParams
from .pair import exact_risk_ratio
from .simulate import simulate_study

__all__ = ["GridSpec", "MapResult", "config_fingerprint",
           "run_exact_map", "run_ctmc_map", "run_mc_sweep"]

MODE_EXACT_PAIR = "exact-pair"
MODE_CTMC = "ctmc"
MODE_MONTE_CARLO = "monte-carlo"


@dataclass(frozen=True)
class GridSpec:
    """Inclusive Cartesian grid over (beta, gamma)."""

    beta_min: float = -3.0
    beta_max: float = 3.0
    beta_step: float = 0.25
    gamma_min: float = -3.0
    gamma_max: float = 3.0
    gamma_step: float = 0.25

    def __post_init__(self):
        if self.beta_step <= 0 or self.gamma_step <= 0:
            raise ConfigError("grid.step", "steps must be > 0")
        if self.beta_max < self.beta_min or self.gamma_max < self.gamma_min:
            raise ConfigError("grid.range", "max must be >= min")

    def betas(self):
        count = int(math.floor((self.beta_max - self.beta_min) / self.beta_step + 0.5)) + 1
        return self.beta_min + self.beta_step * np.arange(count)

    def gammas(self):
        count = int(math.floor((self.gamma_max - self.gamma_min) / self.gamma_step + 0.5)) + 1
        return self.gamma_min + self.gamma_step * np.arange(count)


@dataclass
class MapResult:
    """A full grid of cell results plus provenance metadata."""

    grid: GridSpec
    cells: list
    mode: str
    fingerprint: str
    master_seed: int | None = None

    def cell(self, beta, gamma):
        for c in self.cells:
            if c.beta == beta and c.gamma == gamma:
                return c
        raise KeyError((beta, gamma))


def _canonical(obj):
    if is_dataclass(obj) and not isinstance(obj, type):
        inner = ",".join(
            f"{f.name}={_canonical(getattr(obj, f.name))}" for f in fields(obj)
        )
        return f"{type(obj).__name__}({inner})"
    if isinstance(obj, float):
        return format(obj, ".17g")
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_canonical(v) for v in obj) + "]"
    if isinstance(obj, dict):
        return "{" + ",".join(
            f"{k}:{_canonical(v)}" for k, v in sorted(obj.items())
        ) + "}"
    return repr(obj)


def config_fingerprint(*parts):
    """Stable hash of canonicalized configuration objects."""
    digest = hashlib.sha256("|".join(_canonical(p) for p in parts).encode())
    return digest.hexdigest()[:16]


def _grid_cells(grid):
    return [(i, float(b), j, float(g))
            for i, b in enumerate(grid.betas())
            for j, g in enumerate(grid.gammas())]


def _exact_cell(beta, gamma, log_rr_fn, z_threshold):
    try:
        log_rr = math.log(log_rr_fn(beta, gamma))
    except ClusterBiasError as exc:
        return CellResult(beta, gamma, None, None, 0, 0, INDETERMINATE,
                          status=f"error: {exc}")
    cls = classify_direction(beta, log_rr, 0.0, z_threshold)
    return CellResult(beta, gamma, log_rr, 0.0, 1, 0, cls)


def _resolve_time(alpha, omega, t, incidence_target, size_dist):
    if (t is None) == (incidence_target is None):
        raise ConfigError("t", "exactly one of t and incidence_target is required")
    if t is not None:
        return t
    return calibrate_T(incidence_target, alpha, omega, size_dist)


def run_exact_map(grid, alpha, omega, t=None, incidence_target=None,
                  z_threshold=2.0):
    """Closed-form log RR and direction classification for two-person clusters."""
    t = _resolve_time(alpha, omega, t, incidence_target, Fixed(2))

    def rr(beta, gamma):
        return exact_risk_ratio(EpidemicParams(alpha, omega, beta, gamma), t)

    cells = [_exact_cell(b, g, rr, z_threshold) for _, b, _, g in _grid_cells(grid)]
    fp = config_fingerprint(MODE_EXACT_PAIR, grid, alpha, omega, t)
    return MapResult(grid, cells, MODE_EXACT_PAIR, fp)


def run_ctmc_map(grid, scheme, size_dist, alpha, omega, t=None,
                 incidence_target=None, exclusion="all-subjects",
                 baseline=None, z_threshold=2.0):
    """Exact log RR map for general small clusters via subset-chain enumeration."""
    t = _resolve_time(alpha, omega, t, incidence_target, size_dist)

    def rr(beta, gamma):
        return expected_rr_exact(
            scheme, size_dist, EpidemicParams(alpha, omega, beta, gamma), t,
            exclusion=exclusion, baseline=baseline,
        )

    cells = [_exact_cell(b, g, rr, z_threshold) for _, b, _, g in _grid_cells(grid)]
    fp = config_fingerprint(MODE_CTMC, grid, scheme, size_dist, alpha, omega, t,
                            exclusion, baseline)
    return MapResult(grid, cells, MODE_CTMC, fp)


def _mc_cell(args):
    """One Monte Carlo grid cell; top level so process pools can pickle it."""
    (i, beta, j, gamma, config, replicates, exclusion, z_threshold) = args
    cell_config = replace(
        config, params=replace(config.params, beta=beta, gamma=gamma)
    )
    try:
        estimates = [
            risk_ratio(
                simulate_study(cell_config, spawn_key_prefix=(i, j, r)),
                exclusion,
            )
            for r in range(replicates)
        ]
        agg = aggregate_log_rr(estimates)
    except ClusterBiasError as exc:
        return CellResult(beta, gamma, None, None, 0, replicates, INDETERMINATE,
                          status=f"error: {exc}")
    if agg.mean_log_rr is None:
        return CellResult(beta, gamma, None, None, 0, agg.dropped, INDETERMINATE,
                          status="all-replicates-undefined")
    cls = classify_direction(beta, agg.mean_log_rr, agg.se, z_threshold)
    return CellResult(beta, gamma, agg.mean_log_rr, agg.se, agg.used,
                      agg.dropped, cls)


def run_mc_sweep(grid, config, replicates, workers=1, exclusion="all-subjects",
                 z_threshold=2.0):
    """Monte Carlo sweep: `replicates` studies per cell, aggregated log RR.

    The per-cell seed derivation depends only on (master_seed, cell indices,
    replicate), so reruns are byte-stable for any worker count.
    """
    if replicates < 2:
        raise ConfigError("replicates", f"need >= 2 for a standard error, got {replicates}")
    tasks = [
        (i, b, j, g, config, replicates, exclusion, z_threshold)
        for i, b, j, g in _grid_cells(grid)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_mc_cell, tasks))
    else:
        cells = [_mc_cell(task) for task in tasks]
    fp = config_fingerprint(MODE_MONTE_CARLO, grid, config, replicates, exclusion,
                            z_threshold)
    return MapResult(grid, cells, MODE_MONTE_CARLO, fp,
                     master_seed=config.master_seed)
