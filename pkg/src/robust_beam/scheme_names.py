from enum import Enum


class SchemeName(Enum):
    """Divergence angle schemes compared in the experiments."""

    RA = "RA"  # robust angle
    SA = "SA"  # smallest angle
    AA = "AA"  # average-deviation angle


class SamplerName(Enum):
    """Available random scenario generators."""

    UniformRejection = "uniform-rejection"
    Sequential = "sequential"


class SolveStatus(Enum):
    """Termination status of the robust solver."""

    Converged = "converged"
    IterationLimit = "iteration-limit"
