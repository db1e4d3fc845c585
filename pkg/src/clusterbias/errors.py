"""Exception types shared across the package."""


class ClusterBiasError(Exception):
    """Base class for all package-specific errors."""


class UndefinedRatioError(ClusterBiasError):
    """A risk ratio is undefined (0/0 or division by a zero risk)."""


class NotApplicableError(ClusterBiasError):
    """A condition or bound does not apply for the given parameters."""


class NotEligibleError(ClusterBiasError):
    """Parameters do not satisfy the direction-bias eligibility condition."""


class DegenerateProcessError(ClusterBiasError):
    """The infection process is degenerate (e.g. no exogenous hazard)."""


class SizeLimitError(ClusterBiasError):
    """A cluster size or enumeration budget was exceeded."""


class NumericalError(ClusterBiasError):
    """A numerical routine failed to reach its tolerance."""


class ConfigError(ClusterBiasError):
    """Invalid configuration; the message names the offending field."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class ProgressError(ClusterBiasError):
    """A selection loop failed to make progress within its attempt budget."""


class UnreachableTargetError(ClusterBiasError):
    """A calibration target cannot be reached for the given parameters."""
