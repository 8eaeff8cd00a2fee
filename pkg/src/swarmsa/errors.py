"""Exception types shared across the package."""


class SwarmError(Exception):
    """Base class for all swarmsa errors."""


class InvalidDimensionError(SwarmError):
    """Objective requested with a dimension it does not support."""


class DimensionUnsupportedError(SwarmError):
    """Operation restricted to low dimensions was called with d too large."""


class EmptySwarmError(SwarmError):
    """An operation that needs at least one agent received none."""


class StepSizeTooLargeError(SwarmError):
    """A mass update would drive some agent mass to zero or below.

    Raised instead of clamping: clamping would silently break total-mass
    conservation. Carries the step index when raised from inside a run.
    """

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class NonFinitePositionError(SwarmError):
    """A position update produced NaN or infinity (diverged run)."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class EmptyInputError(SwarmError):
    """Aggregation or estimation called with no usable records."""


class MismatchedGridsError(SwarmError):
    """Trial records with different time grids cannot be aggregated."""


class DuplicateCellError(SwarmError):
    """A parameter sweep grid contains a repeated (N, beta) cell."""


class ConfigError(SwarmError):
    """Base class for configuration problems."""


class SchemaError(ConfigError):
    """Config text violates the schema (unknown key, wrong type, missing field)."""


class SemanticError(ConfigError):
    """Config is well-formed but semantically invalid (e.g. h <= 0)."""
