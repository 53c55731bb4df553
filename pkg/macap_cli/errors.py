"""Exceptions raised by the macap_cli library.

The command line layer converts any MacapError into a click.ClickException.
"""

class MacapError(Exception):
    """Base class for all library errors"""

class InfeasibleRegion(MacapError):
    """The requested antennas cannot be placed in the region at the minimum distance"""

class AllZeroChannel(MacapError):
    """The channel matrix has no nonzero singular value"""

class DegenerateMajorizer(MacapError):
    """The surrogate curvature bound is zero, so the surrogate is stationary"""

class NumericalFailure(MacapError):
    """A numerical routine could not produce a valid result"""

class ShapeMismatch(MacapError, ValueError):
    pass

class InvalidCovariance(MacapError, ValueError):
    pass

class ConfigError(MacapError, ValueError):
    pass
