"""Exception types raised by ddreach."""


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


class InfeasibleError(ValueError):
    """A constrained set has an empty factor set."""


class RankDeficiencyError(ValueError):
    """A data matrix lacks the full row rank an algorithm needs.

    Raised when the stacked data matrix has no right inverse, which in practice
    means the recorded inputs were not persistently exciting enough.
    """

    def __init__(self, message, rank=None, rows=None):
        super().__init__(message)
        self.rank = rank
        self.rows = rows


class UnsupportedRegimeError(ValueError):
    """The inputs fall outside the regime an algorithm supports."""


class ConfigError(ValueError):
    """An experiment configuration failed validation."""
