"""Cutting-plane loop alternating the decision-maker and the adversary."""

from dataclasses import dataclass, field
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from robust_beam.rblib.adversary import DeviationGrid, solve_adversary
from robust_beam.rblib.beam_model import LinkParams, sum_rate
from robust_beam.rblib.dmp_solver import AngleGrid, RateTable, solve_dmp
from robust_beam.rblib.exceptions import (
    BoundMonotonicityError,
    ConfigError,
    CustomWarningCheck,
)
from robust_beam.rblib.uncertainty import Scenario, ScenarioPool, UncertaintySpec
from robust_beam.rblib.util import bps_to_gbps, get_config, rad_to_murad
from robust_beam.scheme_names import SolveStatus

config = get_config()
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    """Inputs of the robust solver.

    Attributes:
        link: link parameters.
        uncertainty: the uncertainty set.
        angle_grid: interval grid of the decision angle.
        deviation_grid: deviation grid of the adversary.
        epsilon: stopping tolerance on UB - LB [bit/s].
        max_iterations: iteration cap.
        refine_factor: local refinement of the winning angle interval.
        graph_dump_dir: if set, every adversary graph is written there as CSV.
    """

    link: LinkParams
    uncertainty: UncertaintySpec
    angle_grid: AngleGrid
    deviation_grid: DeviationGrid
    epsilon: float
    max_iterations: int
    refine_factor: int = field(default_factory=lambda: int(config["defaults"]["refine_factor"]))
    graph_dump_dir: Optional[Path] = None

    def __post_init__(self) -> None:
        """Validate tolerances and grid consistency."""
        if not (self.epsilon > 0.0 and math.isfinite(self.epsilon)):
            raise ConfigError("epsilon_gbps", f"epsilon must be positive, got {self.epsilon!r}")
        if self.max_iterations < 1:
            raise ConfigError(
                "max_iterations", f"at least one iteration is required, got {self.max_iterations!r}"
            )
        if self.refine_factor < 1:
            raise ConfigError(
                "refine_factor", f"refine factor must be at least 1, got {self.refine_factor!r}"
            )
        self.deviation_grid.check_consistent(self.uncertainty)


@dataclass(frozen=True)
class IterationRecord:
    """One pass of the loop.

    Attributes:
        iteration: 1-based iteration index.
        theta_dmp: angle chosen by the decision-maker [rad].
        ub: upper bound after this iteration [bit/s].
        adversary_scenario: worst grid scenario at theta_dmp.
        adversary_value: its sum rate [bit/s].
        lb_best: best lower bound so far [bit/s].
        true_value_on_pool: exact pool minimum at theta_dmp [bit/s].
        epoch: number of grid refinements before this iteration.
        dmp_value: refined chord max-min value of the decision-maker [bit/s].
    """

    iteration: int
    theta_dmp: float
    ub: float
    adversary_scenario: Scenario
    adversary_value: float
    lb_best: float
    true_value_on_pool: float
    epoch: int = 0
    dmp_value: float = float("nan")


@dataclass
class RobustResult:
    """Outcome of the robust solver.

    Attributes:
        theta_star: the decision-maker's angle in the last iteration [rad].
        ub_final: last upper bound [bit/s].
        lb_final: best lower bound [bit/s].
        trace: iteration records.
        pool_final: the scenario pool at exit.
        status: converged or iteration-limit.
        notes: human readable remarks on how the loop ended.
        theta_incumbent: angle whose worst case attains lb_final [rad].
        epsilon: the tolerance used [bit/s].
        deviation_grid: deviation grid the solve ended on.
        worst_case_final: adversary value at theta_star on that grid [bit/s].
    """

    theta_star: float
    ub_final: float
    lb_final: float
    trace: List[IterationRecord]
    pool_final: ScenarioPool
    status: SolveStatus
    notes: List[str] = field(default_factory=list)
    theta_incumbent: float = float("nan")
    epsilon: float = float("nan")
    deviation_grid: Optional[DeviationGrid] = None
    worst_case_final: float = float("nan")

    @property
    def gap(self) -> float:
        """UB - LB [bit/s]."""
        return self.ub_final - self.lb_final

    @property
    def iterations(self) -> int:
        """Number of iterations run."""
        return len(self.trace)

    def trace_df(self) -> pd.DataFrame:
        """Trace with angles in microradians and bounds in Gbit/s."""
        rows = [
            (
                record.iteration,
                rad_to_murad(record.theta_dmp),
                bps_to_gbps(record.ub),
                bps_to_gbps(record.lb_best),
                scenario_list(record.adversary_scenario),
            )
            for record in self.trace
        ]
        return pd.DataFrame(rows, columns=config["columns"]["trace"])

    def to_dict(self) -> Dict[str, Any]:
        """Summary for result.json."""
        return {
            "theta_star_murad": rad_to_murad(self.theta_star),
            "theta_incumbent_murad": rad_to_murad(self.theta_incumbent),
            "ub_gbps": bps_to_gbps(self.ub_final),
            "lb_gbps": bps_to_gbps(self.lb_final),
            "worst_case_gbps": bps_to_gbps(self.worst_case_final),
            "gap_gbps": bps_to_gbps(self.gap),
            "epsilon_gbps": bps_to_gbps(self.epsilon),
            "iterations": self.iterations,
            "status": self.status.value,
            "notes": list(self.notes),
        }


def scenario_list(s: Scenario) -> str:
    """Deviations in microradians joined by ';' in full precision."""
    return ";".join(f"{value:.17e}" for value in s.to_murad())


def _slack(*values: float) -> float:
    return config["numerics"]["bound_slack"] * max(abs(v) for v in values)


def _check_upper_bound(previous: Optional[float], current: float, iteration: int) -> None:
    if previous is None:
        return
    if current > previous + _slack(previous, current):
        raise BoundMonotonicityError(
            f"iteration {iteration}: chord value of the pool problem rose "
            f"from {previous!r} to {current!r} bit/s"
        )


def _check_sandwich(lb: float, ub: float, iteration: int) -> None:
    if lb > ub + _slack(lb, ub):
        raise BoundMonotonicityError(
            f"iteration {iteration}: lower bound {lb!r} exceeds upper bound {ub!r} bit/s"
        )


class PoolValues:
    """Exact pool minimum at every angle the decision-maker has visited.

    Each entry is the worst case of an actual angle against the pool, so the
    largest entry never exceeds the optimum of the pool problem and never falls
    below an adversary value found at a visited angle.
    """

    def __init__(self, params: LinkParams) -> None:
        """Create new instance of PoolValues.

        Args:
            params: link parameters.
        """
        self.params = params
        self._minimum: Dict[float, float] = {}
        self._caches: Dict[float, Dict[float, float]] = {}

    def visit(self, theta: float, pool_minimum: float) -> None:
        """Record the exact pool minimum at a decision-maker angle."""
        self._minimum[theta] = pool_minimum
        self._caches.setdefault(theta, {})

    def add_scenario(self, scenario: Scenario) -> None:
        """Lower every recorded minimum by a newly pooled scenario."""
        for theta, cache in self._caches.items():
            value = sum_rate(self.params, theta, scenario, cache)
            self._minimum[theta] = min(self._minimum[theta], value)

    @property
    def thetas(self) -> List[float]:
        """Visited angles in visiting order."""
        return list(self._minimum)

    def best(self) -> float:
        """Largest pool minimum over the visited angles [bit/s]."""
        return max(self._minimum.values())


def _adversary_values(
    thetas: List[float],
    spec: UncertaintySpec,
    grid: DeviationGrid,
    params: LinkParams,
) -> Dict[float, float]:
    return {theta: solve_adversary(spec, grid, params, theta).worst_sum_rate for theta in thetas}


def solve_robust(solver_config: SolverConfig) -> RobustResult:
    """Find the angle maximizing the worst-case sum rate.

    The pool starts with the no-deviation scenario. Each iteration solves the
    decision-maker's problem on the pool, then the adversary at the chosen
    angle, and adds the adversary's scenario to the pool.

    The upper bound is the best known value of the pool problem: the largest
    of the refined chord value and the exact pool minima at the visited and
    tabulated angles, capped by the previous bound so it never rises. Pool
    scenarios lie on the deviation grid, so every adversary value is at most
    the pool minimum at its angle and LB <= UB holds by construction. The loop stops once the adversary value at the
    current angle is within epsilon of UB, which implies UB - LB <= epsilon
    and makes the returned angle itself epsilon-optimal.

    If the adversary repeats a pool scenario while the gap is open, the
    deviation step is halved, the lower bound is recomputed on the finer grid
    and the angle refinement made ten times finer once; a second repeat ends
    the loop with status iteration-limit.

    Args:
        solver_config: solver inputs.

    Returns:
        The final decision-maker angle with its bounds, trace and final pool.

    Raises:
        BoundMonotonicityError: If the chord value of the pool problem rises
            between iterations or the bounds cross beyond slack.
    """
    params = solver_config.link
    spec = solver_config.uncertainty
    angle_grid = solver_config.angle_grid
    deviation_grid = solver_config.deviation_grid
    refine_factor = solver_config.refine_factor
    epsilon = solver_config.epsilon

    rate_table = RateTable(params, angle_grid.points())
    pool = ScenarioPool.initial(spec)
    pool_values = PoolValues(params)
    trace: List[IterationRecord] = []
    notes: List[str] = []
    lb, theta_incumbent = -math.inf, float("nan")
    worst_final = float("nan")
    ub: Optional[float] = None
    chord_previous: Optional[float] = None
    status = SolveStatus.IterationLimit
    epoch = 0
    theta_dmp = float("nan")

    for iteration in range(1, solver_config.max_iterations + 1):
        dmp = solve_dmp(params, pool, angle_grid, rate_table, refine_factor)
        theta_dmp = dmp.theta_star
        # the coarse chord value only falls as the pool grows on a fixed angle grid
        _check_upper_bound(chord_previous, dmp.approx_value, iteration)
        chord_previous = dmp.approx_value
        CustomWarningCheck.chord_slack_warning(dmp.refined_value, dmp.true_value_on_pool)

        pool_values.visit(theta_dmp, dmp.true_value_on_pool)
        estimate = max(dmp.refined_value, pool_values.best(), dmp.grid_value)
        ub = estimate if ub is None else min(ub, estimate)

        dump_path = None
        if solver_config.graph_dump_dir is not None:
            dump_path = Path(solver_config.graph_dump_dir) / f"graph_iter{iteration}.csv"
        adversary = solve_adversary(spec, deviation_grid, params, theta_dmp, dump_path)
        worst_final = adversary.worst_sum_rate
        if adversary.worst_sum_rate > lb:
            lb, theta_incumbent = adversary.worst_sum_rate, theta_dmp
        _check_sandwich(lb, ub, iteration)

        trace.append(
            IterationRecord(
                iteration=iteration,
                theta_dmp=theta_dmp,
                ub=ub,
                adversary_scenario=adversary.worst_scenario,
                adversary_value=adversary.worst_sum_rate,
                lb_best=lb,
                true_value_on_pool=dmp.true_value_on_pool,
                epoch=epoch,
                dmp_value=dmp.refined_value,
            )
        )
        gap = max(ub - lb, 0.0)
        logger.info(
            "iteration %d: theta=%.6e murad ub=%.9e lb=%.9e gap=%.3e Gbit/s",
            iteration,
            rad_to_murad(theta_dmp),
            bps_to_gbps(ub),
            bps_to_gbps(lb),
            bps_to_gbps(gap),
        )

        if ub - adversary.worst_sum_rate <= epsilon:
            status = SolveStatus.Converged
            break
        if pool.add(adversary.worst_scenario):
            pool_values.add_scenario(adversary.worst_scenario)
            continue

        CustomWarningCheck.duplicate_cut_warning(iteration, ub - adversary.worst_sum_rate)
        if epoch > 0:
            notes.append(
                f"adversary repeated a pool scenario after refinement; "
                f"residual gap {bps_to_gbps(ub - adversary.worst_sum_rate):.6e} Gbit/s"
            )
            break
        epoch += 1
        deviation_grid = deviation_grid.refined(spec)
        refine_factor *= 10
        # coarse-grid adversary values overstate the worst case on the finer grid
        values = _adversary_values(pool_values.thetas, spec, deviation_grid, params)
        theta_incumbent = max(values, key=values.__getitem__)
        lb, worst_final = values[theta_incumbent], values[theta_dmp]
        notes.append(
            f"iteration {iteration}: repeated scenario, deviation step halved to "
            f"{rad_to_murad(deviation_grid.step_delta):.6e} murad"
        )
    else:
        notes.append(f"stopped after {solver_config.max_iterations} iterations")

    assert ub is not None
    return RobustResult(
        theta_star=theta_dmp,
        ub_final=ub,
        lb_final=lb,
        trace=trace,
        pool_final=pool,
        status=status,
        notes=notes,
        theta_incumbent=theta_incumbent,
        epsilon=epsilon,
        deviation_grid=deviation_grid,
        worst_case_final=worst_final,
    )
