"""Flat key-value run configuration with dotted section prefixes.

Example::

    mode = monte-carlo
    alpha = 1e-4
    omega = 0.01
    t = 450
    design.covariate = block
    design.block_k = 2
    design.n = 4
    clusters = 500
    replicates = 200

Unknown keys, malformed values, and out-of-range values are rejected with
messages naming the offending field.  `t` and `target` are mutually
exclusive; when `target` is given the observation time is calibrated against
the null cumulative incidence.
"""

from __future__ import annotations

from dataclasses import dataclass

from .designs import (
    Bernoulli,
    Block,
    ClusterRandomized,
    ConditionalBernoulli,
    Fixed,
    NoneInfected,
    ShiftedPoisson,
)
from .errors import ConfigError
from .estimators import EXCLUSION_RULES
from .hazards import EpidemicParams
from .simulate import ExponentialTime, FixedTime, StudyConfig
from .sweep import GridSpec

__all__ = ["RunSpec", "parse_config"]

MODES = ("exact-pair", "ctmc", "monte-carlo")


@dataclass(frozen=True)
class RunSpec:
    """Everything a map/sweep run needs, assembled from one config file."""

    mode: str
    alpha: float
    omega: float
    t: float | None
    target: float | None
    grid: GridSpec
    scheme: object
    size_dist: object
    baseline: object
    study: StudyConfig
    replicates: int
    exclusion: str
    z_threshold: float
    workers: int
    seed: int


def _parse_bool(raw, field):
    if raw in ("true", "yes", "1"):
        return True
    if raw in ("false", "no", "0"):
        return False
    raise ConfigError(field, f"expected a boolean, got {raw!r}")


def _parse_float(raw, field):
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(field, f"expected a number, got {raw!r}") from None


def _parse_int(raw, field):
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(field, f"expected an integer, got {raw!r}") from None


_SCHEMA = {
    "mode": str,
    "alpha": _parse_float,
    "omega": _parse_float,
    "t": _parse_float,
    "target": _parse_float,
    "grid.beta_min": _parse_float,
    "grid.beta_max": _parse_float,
    "grid.beta_step": _parse_float,
    "grid.gamma_min": _parse_float,
    "grid.gamma_max": _parse_float,
    "grid.gamma_step": _parse_float,
    "design.covariate": str,
    "design.block_rule": str,
    "design.block_k": _parse_int,
    "design.p": _parse_float,
    "design.cluster_exact_split": _parse_bool,
    "design.size": str,
    "design.n": _parse_int,
    "design.size_mu": _parse_float,
    "design.size_shift": _parse_int,
    "design.baseline": str,
    "design.q1": _parse_float,
    "design.q0": _parse_float,
    "design.obs": str,
    "clusters": _parse_int,
    "replicates": _parse_int,
    "exclusion": str,
    "z_threshold": _parse_float,
    "workers": _parse_int,
    "seed": _parse_int,
}

_DEFAULTS = {
    "grid.beta_min": -3.0,
    "grid.beta_max": 3.0,
    "grid.beta_step": 0.25,
    "grid.gamma_min": -3.0,
    "grid.gamma_max": 3.0,
    "grid.gamma_step": 0.25,
    "design.covariate": "block",
    "design.block_rule": "exactly-k",
    "design.block_k": 2,
    "design.p": 0.5,
    "design.cluster_exact_split": False,
    "design.size": "fixed",
    "design.n": 4,
    "design.size_shift": 1,
    "design.baseline": "none",
    "design.q1": 0.0,
    "design.q0": 0.0,
    "design.obs": "fixed",
    "clusters": 500,
    "replicates": 200,
    "exclusion": "all-subjects",
    "z_threshold": 2.0,
    "workers": 1,
    "seed": 0,
}


def _read_pairs(path):
    try:
        with open(path, encoding="utf-8") as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise ConfigError("path", f"cannot read config file: {exc}") from None
    values = {}
    for lineno, line in enumerate(lines, start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(
                f"line {lineno}", f"expected `key = value`, got {stripped!r}"
            )
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in _SCHEMA:
            raise ConfigError(key, "unknown key")
        if key in values:
            raise ConfigError(key, f"duplicate key (second occurrence on line {lineno})")
        values[key] = _SCHEMA[key](raw, key) if _SCHEMA[key] is not str else raw
    return values


def _choice(values, key, allowed):
    value = values[key]
    if value not in allowed:
        raise ConfigError(key, f"must be one of {allowed}, got {value!r}")
    return value


def _build_size_dist(values):
    kind = _choice(values, "design.size", ("fixed", "shifted-poisson"))
    if kind == "fixed":
        return Fixed(values["design.n"])
    if "design.size_mu" not in values:
        raise ConfigError("design.size_mu", "required when design.size = shifted-poisson")
    return ShiftedPoisson(values["design.size_mu"], values["design.size_shift"])


def _build_scheme(values):
    kind = _choice(values, "design.covariate", ("block", "bernoulli", "cluster"))
    if kind == "block":
        return Block(values["design.block_rule"], values["design.block_k"])
    if kind == "bernoulli":
        return Bernoulli(values["design.p"])
    return ClusterRandomized(values["design.p"], values["design.cluster_exact_split"])


def _build_baseline(values):
    kind = _choice(values, "design.baseline", ("none", "conditional-bernoulli"))
    if kind == "none":
        return NoneInfected()
    return ConditionalBernoulli(values["design.q1"], values["design.q0"])


def parse_config(path):
    """Parse one config file into a fully validated RunSpec."""
    values = dict(_DEFAULTS)
    values.update(_read_pairs(path))

    for key in ("mode", "alpha", "omega"):
        if key not in values:
            raise ConfigError(key, "required key is missing")
    mode = _choice(values, "mode", MODES)
    alpha = values["alpha"]
    omega = values["omega"]
    if alpha < 0:
        raise ConfigError("alpha", f"must be >= 0, got {alpha}")
    if omega < 0:
        raise ConfigError("omega", f"must be >= 0, got {omega}")

    t = values.get("t")
    target = values.get("target")
    if (t is None) == (target is None):
        raise ConfigError("t", "exactly one of t and target is required")
    if t is not None and t <= 0:
        raise ConfigError("t", f"must be > 0, got {t}")
    if target is not None and not 0.0 < target < 1.0:
        raise ConfigError("target", f"must be in (0, 1), got {target}")

    grid = GridSpec(
        values["grid.beta_min"], values["grid.beta_max"], values["grid.beta_step"],
        values["grid.gamma_min"], values["grid.gamma_max"], values["grid.gamma_step"],
    )
    scheme = _build_scheme(values)
    size_dist = _build_size_dist(values)
    baseline = _build_baseline(values)

    exclusion = _choice(values, "exclusion", EXCLUSION_RULES)
    if values["replicates"] < 2:
        raise ConfigError("replicates", f"must be >= 2, got {values['replicates']}")
    if values["workers"] < 1:
        raise ConfigError("workers", f"must be >= 1, got {values['workers']}")
    if values["z_threshold"] < 0:
        raise ConfigError("z_threshold", f"must be >= 0, got {values['z_threshold']}")

    obs_kind = _choice(values, "design.obs", ("fixed", "exponential"))
    obs_t = t if t is not None else 1.0  # placeholder until target is calibrated
    observation = FixedTime(obs_t) if obs_kind == "fixed" else ExponentialTime(obs_t)
    study = StudyConfig(
        params=EpidemicParams(alpha, omega, 0.0, 0.0),
        covariate_scheme=scheme,
        size_dist=size_dist,
        baseline_scheme=baseline,
        observation_rule=observation,
        cluster_count=values["clusters"],
        master_seed=values["seed"],
    )
    return RunSpec(
        mode=mode, alpha=alpha, omega=omega, t=t, target=target, grid=grid,
        scheme=scheme, size_dist=size_dist, baseline=baseline, study=study,
        replicates=values["replicates"], exclusion=exclusion,
        z_threshold=values["z_threshold"], workers=values["workers"],
        seed=values["seed"],
    )
