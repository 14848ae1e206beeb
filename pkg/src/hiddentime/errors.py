"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the physical domain (speed >= c, non-positive mass, ...)."""


class ConsistencyError(ValueError):
    """Time-angle coordinates do not match the four-momentum they are paired with."""

    def __init__(self, message: str, mismatch: float):
        super().__init__(message)
        self.mismatch = mismatch


class AliasingError(ValueError):
    """Phase samples too sparse to unwrap unambiguously."""


class CollapseError(ValueError):
    """Collapse onto a set of time angles with zero measure."""


class ConfigError(ValueError):
    """Malformed experiment or run configuration.

    ``field`` names the offending key so CLI messages can point at it.
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field
