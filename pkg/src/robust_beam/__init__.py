"""Robust divergence angle of an inter-satellite laser link."""
from .rblib.beam_model import LinkParams, fraction_on_disk, slot_rate, sum_rate
from .rblib.experiment_config import ExperimentConfig
from .rblib.orchestrator import RobustResult, SolverConfig, solve_robust
from .rblib.uncertainty import Scenario, UncertaintySpec
from .robust_beam_service import RobustBeamService
from .scheme_names import SamplerName, SchemeName, SolveStatus
from .shortcuts.utils import disable_robust_beam_warnings

__version__ = "0.1.0"
__all__ = [
    "disable_robust_beam_warnings",
    "fraction_on_disk",
    "slot_rate",
    "solve_robust",
    "sum_rate",
    "ExperimentConfig",
    "LinkParams",
    "RobustBeamService",
    "RobustResult",
    "SamplerName",
    "Scenario",
    "SchemeName",
    "SolveStatus",
    "SolverConfig",
    "UncertaintySpec",
]
