from dataclasses import dataclass
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import pandas as pd

from robust_beam.rblib.baselines import average_deviation_angle, small_angle
from robust_beam.rblib.beam_model import sum_rate
from robust_beam.rblib.exceptions import CustomWarningCheck
from robust_beam.rblib.experiment import Experiment
from robust_beam.rblib.experiment_config import ExperimentConfig
from robust_beam.rblib.orchestrator import RobustResult, solve_robust
from robust_beam.rblib.statistics import BoxStats, box_stats
from robust_beam.rblib.uncertainty import ScenarioDraw, draw_scenario, project_to_grid
from robust_beam.rblib.util import bps_to_gbps, get_config, rad_to_murad, write_csv, write_json
from robust_beam.scheme_names import SamplerName, SchemeName

config = get_config()
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SampleOutcome:
    """Sum rates of every scheme on one sampled scenario [bit/s]."""

    index: int
    draw: ScenarioDraw
    rates: Dict[SchemeName, float]
    robust_projected_rate: float


class MonteCarlo(Experiment):
    """Sum rates of the three schemes on randomly sampled member scenarios.

    Inherits from Experiment class.
    """

    def __init__(
        self, experiment_config: ExperimentConfig, robust: Optional[RobustResult] = None
    ) -> None:
        """Initialization of class.

        Args:
            experiment_config: The validated configuration.
            robust: A robust solve for monte_carlo_T to reuse; solved here if None.
        """
        super(MonteCarlo, self).__init__(experiment_config)
        self.T = experiment_config.monte_carlo_T
        self.solver_config = experiment_config.solver_config(self.T)
        self.robust = robust if robust is not None else solve_robust(self.solver_config)
        self.robust_grid = self.robust.deviation_grid or self.solver_config.deviation_grid
        grid = self.solver_config.angle_grid
        self.thetas = {
            SchemeName.RA: self.robust.theta_star,
            SchemeName.SA: small_angle(grid).theta,
            SchemeName.AA: average_deviation_angle(
                self.solver_config.link, self.solver_config.uncertainty, grid
            ).theta,
        }
        self._data = self.simulate()

    def simulate(self) -> List[SampleOutcome]:
        """Sample monte_carlo_count scenarios and evaluate every scheme on them.

        Returns:
            One outcome per scenario, in index order.

        Raises:
            SamplingExhaustedError: If any scenario cannot be sampled.
        """
        if self._config.sampler is SamplerName.Sequential:
            CustomWarningCheck.sequential_sampler_warning()
        outcomes = self.map_items(self.sample, range(self._config.monte_carlo_count))
        logger.info(
            "sampled %d scenarios in %d attempts",
            len(outcomes),
            sum(outcome.draw.attempts for outcome in outcomes),
        )
        return outcomes

    def sample(self, index: int) -> SampleOutcome:
        """Draw scenario `index` with seed base + index and evaluate the schemes."""
        draw = draw_scenario(
            self.solver_config.uncertainty,
            self._config.seed + index,
            self._config.max_attempts,
            sequential=self._config.sampler is SamplerName.Sequential,
        )
        params = self.solver_config.link
        rates = {name: sum_rate(params, theta, draw.scenario) for name, theta in self.thetas.items()}
        projected = project_to_grid(
            draw.scenario, self.solver_config.uncertainty, self.robust_grid.step_delta
        )
        return SampleOutcome(
            index=index,
            draw=draw,
            rates=rates,
            robust_projected_rate=sum_rate(params, self.thetas[SchemeName.RA], projected),
        )

    @property
    def outcomes(self) -> List[SampleOutcome]:
        """Per-scenario outcomes."""
        return self._data

    def stats(self) -> Dict[SchemeName, BoxStats]:
        """Box statistics of each scheme's sum rate in Gbit/s."""
        return {
            name: box_stats([bps_to_gbps(outcome.rates[name]) for outcome in self._data])
            for name in SchemeName
        }

    def guarantee_violations(self) -> Tuple[int, int]:
        """Scenarios where the robust angle falls below its worst case minus epsilon.

        Projections land on the deviation grid the robust solve ended on, so the
        projected count is zero for a correct solve. Raw scenarios lie between grid
        points and may fall below.

        Returns:
            Violations on the raw scenarios and on their grid projections.
        """
        floor = self.robust.worst_case_final - self.robust.epsilon
        raw = sum(outcome.rates[SchemeName.RA] < floor for outcome in self._data)
        projected = sum(outcome.robust_projected_rate < floor for outcome in self._data)
        return int(raw), int(projected)

    def write(self, out_dir: Path) -> List[Path]:
        """Write montecarlo.csv and stats.json."""
        return [
            write_csv(self.to_df(), self.output_path("montecarlo", out_dir)),
            write_json(self.to_dict(), self.output_path("stats", out_dir)),
        ]

    def to_dict(self) -> Dict:
        """Reformat the statistics to a dictionary.

        Returns:
            Box statistics per scheme, the robust guarantee check and sampling counts.
        """
        raw, projected = self.guarantee_violations()
        attempts = [outcome.draw.attempts for outcome in self._data]
        return {
            "T": self.T,
            "sampler": self._config.sampler.value,
            "seed": self._config.seed,
            "thetas_murad": {name.value: rad_to_murad(t) for name, t in self.thetas.items()},
            "schemes": {name.value: stats.to_dict() for name, stats in self.stats().items()},
            "guarantee": {
                "worst_case_gbps": bps_to_gbps(self.robust.worst_case_final),
                "lb_final_gbps": bps_to_gbps(self.robust.lb_final),
                "step_murad": rad_to_murad(self.robust_grid.step_delta),
                "epsilon_gbps": bps_to_gbps(self.robust.epsilon),
                "violations_raw": raw,
                "violations_projected": projected,
            },
            "attempts": {
                "total": int(sum(attempts)),
                "max": int(max(attempts)),
                "mean": float(sum(attempts)) / len(attempts),
            },
        }

    def to_df(self) -> pd.DataFrame:
        """Reformat the outcomes to a pandas DataFrame.

        Returns:
            One row per scenario with each scheme's sum rate in Gbit/s.
        """
        rows = [
            (
                outcome.index,
                outcome.draw.seed,
                outcome.draw.attempts,
                *(bps_to_gbps(outcome.rates[name]) for name in SchemeName),
            )
            for outcome in self._data
        ]
        return pd.DataFrame(rows, columns=config["columns"]["montecarlo"])
