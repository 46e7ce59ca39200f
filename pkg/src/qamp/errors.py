"""Exception types shared across the package."""


class QampError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(QampError):
    """Invalid run configuration (bad flag value, malformed config file)."""


class NumericsError(QampError):
    """Base class for numerical failures (quadrature, truncation)."""


class QuadratureError(NumericsError):
    """Adaptive quadrature did not reach the requested tolerance."""


class StepTooLargeError(NumericsError):
    """Fixed-step integration lost trace conservation beyond tolerance."""


class TruncationUnsafeError(NumericsError):
    """Fock-space truncation leaked probability into the top levels.

    Carries the partial evolution result accumulated up to the abort point.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class GridTooSmallError(QampError):
    """Requested phase-space grid does not cover the state support."""


class IllDefinedPError(QampError):
    """P-function transfer kernel requested where its width is not positive."""
