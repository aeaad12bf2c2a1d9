"""Exception types raised by fppsla."""


class FPPSLAError(Exception):
    """Base class for all package errors."""


class ConfigError(FPPSLAError, ValueError):
    """Invalid system configuration; ``field`` names the offending key."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class DimensionError(FPPSLAError, ValueError):
    pass


class InfeasibleError(FPPSLAError, ValueError):
    """A beamforming matrix lies outside its feasible set."""


class ZeroProjectionError(FPPSLAError, ValueError):
    """The zero matrix has no unique projection onto the power sphere."""
