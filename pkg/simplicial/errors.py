"""Exception types raised by the simplicial sampling library."""


class SimplicialError(ValueError):
    """Base class of every library error"""


class ComplexError(SimplicialError):
    """Invalid simplicial complex: missing edge, duplicate simplex, bad index, bad file"""


class DimensionError(SimplicialError):
    """Operand shapes do not fit together"""


class BandwidthError(SimplicialError):
    """Requested bandwidth exceeds the available basis dimension"""


class SpectralError(SimplicialError):
    """Eigendecomposition input or lift input is invalid"""


class SamplingError(SimplicialError):
    """Invalid sampling plan, or the rank guard could not be satisfied"""


class DatasetError(SimplicialError):
    """Generated complex failed its topological post-conditions"""


class ConfigError(SimplicialError):
    """Experiment configuration is malformed"""
