"""Core functionality to run the robust divergence angle experiments."""

from typing import Any, Dict, Optional

from robust_beam.rblib.baselines import average_deviation_angle, small_angle
from robust_beam.rblib.experiment import Experiment
from robust_beam.rblib.experiment_config import ExperimentConfig
from robust_beam.rblib.experiments.MonteCarlo import MonteCarlo
from robust_beam.rblib.experiments.RobustSolve import RobustSolve
from robust_beam.rblib.experiments.WorstCaseSweep import WorstCaseSweep
from robust_beam.rblib.util import pretty_dict_string
from robust_beam.scheme_names import SchemeName


class RobustBeamService:
    """Main class for the robust-beam python service."""

    def __init__(self, experiment_config: Optional[ExperimentConfig] = None) -> None:
        """Initialization of class.

        Args:
            experiment_config: Validated configuration. Defaults to the packaged
                defaults.
        """
        self._config = (
            experiment_config if experiment_config is not None else ExperimentConfig.from_dict({})
        )

    @property
    def config(self) -> ExperimentConfig:
        """The configuration used by every experiment."""
        return self._config

    def get_robust_angle(self, T: Optional[int] = None, as_df: bool = False) -> Any:
        """Solve the robust divergence angle for one horizon.

        Args:
            T: Number of time slots. Defaults to the configured solve_T.
            as_df: Default False. If True, the convergence trace is returned as
                pandas DataFrame, else the result summary as dictionary.

        Returns:
            Dictionary with angle, bounds and status. If as_df is True,
                the trace in form of a DataFrame.
        """
        return self._retrieve_value(RobustSolve(self._config, T), as_df)

    def get_scheme_angles(self, T: Optional[int] = None) -> Dict[str, float]:
        """Angles of the smallest-angle and average-deviation schemes [rad].

        Args:
            T: Number of time slots. Defaults to the configured solve_T.

        Returns:
            Dictionary from scheme name to angle.
        """
        solver_config = self._config.solver_config(self._config.solve_T if T is None else T)
        angles = [
            small_angle(solver_config.angle_grid),
            average_deviation_angle(
                solver_config.link, solver_config.uncertainty, solver_config.angle_grid
            ),
        ]
        return {angle.scheme.value: angle.theta for angle in angles}

    def get_worst_case_sweep(self, as_df: bool = False) -> Any:
        """Worst-case rates of all schemes over the configured horizons.

        Args:
            as_df: Default False. If True, the results are represented as
                pandas DataFrame, else as dictionary.

        Returns:
            Dictionary containing the sweep. If as_df is True,
                the data is in form of a DataFrame.
        """
        return self._retrieve_value(WorstCaseSweep(self._config), as_df)

    def get_monte_carlo(self, as_df: bool = False) -> Any:
        """Sum rates of all schemes on sampled member scenarios.

        Args:
            as_df: Default False. If True, the per-scenario rates are returned
                as pandas DataFrame, else the box statistics as dictionary.

        Returns:
            Dictionary containing statistics. If as_df is True,
                the per-scenario rates in form of a DataFrame.
        """
        return self._retrieve_value(MonteCarlo(self._config), as_df)

    def __str__(self) -> str:
        """Configuration summary."""
        return pretty_dict_string(
            {
                "time_slots": list(self._config.time_slots),
                "solve_T": self._config.solve_T,
                "monte_carlo_T": self._config.monte_carlo_T,
                "schemes": [name.value for name in SchemeName],
            }
        )

    @staticmethod
    def _retrieve_value(experiment: Experiment, as_df: bool = False) -> Any:
        if as_df:
            return experiment.to_df()
        return experiment.to_dict()

