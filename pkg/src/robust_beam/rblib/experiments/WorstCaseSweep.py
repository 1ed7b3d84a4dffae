from dataclasses import dataclass, replace
import logging
from pathlib import Path
from typing import Dict, List

import pandas as pd

from robust_beam.rblib.baselines import (
    SchemeAngle,
    SchemeResult,
    average_deviation_angle,
    evaluate_scheme,
    small_angle,
)
from robust_beam.rblib.experiment import Experiment
from robust_beam.rblib.experiment_config import ExperimentConfig
from robust_beam.rblib.orchestrator import RobustResult, solve_robust
from robust_beam.rblib.util import bps_to_gbps, get_config, rad_to_murad, write_csv
from robust_beam.scheme_names import SchemeName

config = get_config()
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HorizonWorstCase:
    """Worst cases of the three schemes for one horizon."""

    T: int
    robust: RobustResult
    schemes: Dict[SchemeName, SchemeResult]


class WorstCaseSweep(Experiment):
    """Worst-case rate of the robust, smallest and average-deviation angles over T.

    Inherits from Experiment class.
    """

    def __init__(self, experiment_config: ExperimentConfig) -> None:
        """Initialization of class.

        Args:
            experiment_config: The validated configuration; its time_slots are swept.
        """
        super(WorstCaseSweep, self).__init__(experiment_config)
        self._data = self.map_items(self.worst_cases, experiment_config.time_slots)

    def worst_cases(self, T: int) -> HorizonWorstCase:
        """Solve the robust angle for T and evaluate all schemes against the adversary.

        Args:
            T: Number of time slots.

        Returns:
            The robust result with each scheme's worst case.
        """
        solver_config = self._config.solver_config(T)
        robust = solve_robust(solver_config)
        angles = [
            SchemeAngle(SchemeName.RA, robust.theta_star),
            small_angle(solver_config.angle_grid),
            average_deviation_angle(
                solver_config.link, solver_config.uncertainty, solver_config.angle_grid
            ),
        ]
        if robust.deviation_grid is not None:
            # every scheme faces the adversary on the grid the robust solve ended on
            solver_config = replace(solver_config, deviation_grid=robust.deviation_grid)
        schemes = {angle.scheme: evaluate_scheme(angle, solver_config) for angle in angles}
        logger.info(
            "T=%d: per-slot worst case RA %.6e, SA %.6e, AA %.6e Gbit/s",
            T,
            *(bps_to_gbps(schemes[name].per_slot) for name in SchemeName),
        )
        return HorizonWorstCase(T, robust, schemes)

    @property
    def horizons(self) -> List[HorizonWorstCase]:
        """Results per horizon in sweep order."""
        return self._data

    def write(self, out_dir: Path) -> List[Path]:
        """Write worst_case.csv."""
        return [write_csv(self.to_df(), self.output_path("worst_case", out_dir))]

    def to_dict(self) -> Dict:
        """Reformat the sweep to a dictionary.

        Returns:
            Per horizon: the robust solve summary and each scheme's worst case.
        """
        return {
            str(item.T): {
                "robust": item.robust.to_dict(),
                "schemes": {
                    name.value: {
                        "theta_murad": rad_to_murad(result.angle.theta),
                        "worst_sum_rate_gbps": bps_to_gbps(result.worst.worst_sum_rate),
                        "per_slot_gbps": bps_to_gbps(result.per_slot),
                        "worst_scenario_murad": result.worst.worst_scenario.to_murad(),
                    }
                    for name, result in item.schemes.items()
                },
            }
            for item in self._data
        }

    def to_df(self) -> pd.DataFrame:
        """Reformat the sweep to a pandas DataFrame.

        Returns:
            One row per horizon and scheme.
        """
        rows = [
            (
                item.T,
                name.value,
                rad_to_murad(result.angle.theta),
                bps_to_gbps(result.worst.worst_sum_rate),
                bps_to_gbps(result.per_slot),
            )
            for item in self._data
            for name, result in item.schemes.items()
        ]
        return pd.DataFrame(rows, columns=config["columns"]["worst_case"])
