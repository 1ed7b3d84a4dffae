from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd

from robust_beam.rblib.experiment import Experiment
from robust_beam.rblib.experiment_config import ExperimentConfig
from robust_beam.rblib.orchestrator import RobustResult, solve_robust
from robust_beam.rblib.uncertainty import pool_to_csv
from robust_beam.rblib.util import write_csv, write_json


class RobustSolve(Experiment):
    """Robust divergence angle for one horizon, with its convergence trace.

    Inherits from Experiment class.
    """

    def __init__(self, experiment_config: ExperimentConfig, T: Optional[int] = None) -> None:
        """Initialization of class.

        Args:
            experiment_config: The validated configuration.
            T: Number of time slots. Defaults to the configured solve_T.
        """
        super(RobustSolve, self).__init__(experiment_config)
        self.T = experiment_config.solve_T if T is None else T
        self._result = self.solve()

    def solve(self) -> RobustResult:
        """Run the cutting-plane solver.

        Returns:
            The solver result.
        """
        return solve_robust(self._config.solver_config(self.T))

    @property
    def result(self) -> RobustResult:
        """The solver result."""
        return self._result

    def write(self, out_dir: Path) -> List[Path]:
        """Write trace.csv, result.json and the final scenario pool."""
        return [
            write_csv(self.to_df(), self.output_path("trace", out_dir)),
            write_json(self.to_dict(), self.output_path("result", out_dir)),
            pool_to_csv(self._result.pool_final, self.output_path("pool", out_dir)),
        ]

    def to_dict(self) -> Dict:
        """Reformat the result to a dictionary.

        Returns:
            Angle, bounds, status and notes of the solve.
        """
        return {"T": self.T, **self._result.to_dict()}

    def to_df(self) -> pd.DataFrame:
        """Reformat the trace to a pandas DataFrame.

        Returns:
            One row per iteration.
        """
        return self._result.trace_df()
