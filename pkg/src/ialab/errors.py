"""Shared exception types."""


class DimensionError(ValueError):
    """Operands live in different fields or have mismatched shapes."""


class DivergenceError(ValueError):
    """A sum or bound diverges for the requested parameters (alpha <= d)."""


class SingularityError(ArithmeticError):
    """Coincident nodes under a pure power law give infinite gain."""


class StatisticsError(RuntimeError):
    """Not enough usable samples, or a degenerate statistic (zero variance)."""


class EnumerationGuardError(ValueError):
    """Requested exhaustive enumeration exceeds the desk-scale guard."""


class UnsupportedChannelError(ValueError):
    """Operation requires the only-defects-matter property."""


class InfiniteBoundError(RuntimeError):
    """Every candidate design density gives zero information."""


class ConfigError(ValueError):
    """Invalid experiment configuration; carries the full error list."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
