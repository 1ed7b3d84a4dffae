"""Reference divergence angles and worst-case evaluation of a fixed angle."""

from dataclasses import dataclass
import logging
import math
from typing import Callable, Tuple

import numpy as np

from robust_beam.rblib.adversary import AdversaryResult, solve_adversary
from robust_beam.rblib.beam_model import LinkParams, slot_rate_angular
from robust_beam.rblib.dmp_solver import AngleGrid
from robust_beam.rblib.exceptions import PreconditionError
from robust_beam.rblib.orchestrator import SolverConfig
from robust_beam.rblib.uncertainty import UncertaintySpec
from robust_beam.rblib.util import get_config
from robust_beam.scheme_names import SchemeName

config = get_config()
logger = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SchemeAngle:
    """Angle chosen by one scheme [rad]."""

    scheme: SchemeName
    theta: float

    def check_in(self, grid: AngleGrid) -> "SchemeAngle":
        """Return self, or raise PreconditionError if theta lies outside the grid range."""
        if not grid.alpha <= self.theta <= grid.omega:
            raise PreconditionError(
                f"{self.scheme.value} angle {self.theta!r} outside [{grid.alpha!r}, {grid.omega!r}]"
            )
        return self


@dataclass(frozen=True)
class SchemeResult:
    """A scheme's angle with its worst grid scenario."""

    angle: SchemeAngle
    worst: AdversaryResult

    @property
    def per_slot(self) -> float:
        """Worst sum rate divided by the number of slots [bit/s]."""
        return self.worst.worst_sum_rate / len(self.worst.worst_scenario)


def small_angle(grid: AngleGrid) -> SchemeAngle:
    """The smallest angle of the range."""
    return SchemeAngle(SchemeName.SA, grid.alpha)


def golden_section_maximize(
    f: Callable[[float], float], a: float, b: float, rtol: float
) -> Tuple[float, float]:
    """Maximize f on [a, b] by golden-section search.

    Stops once b - a is below rtol times the bracket midpoint.

    Returns:
        The bracket midpoint and f there.
    """
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > rtol * 0.5 * (a + b):
        if fc < fd:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
        else:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
    x = 0.5 * (a + b)
    return x, f(x)


def average_deviation_angle(
    params: LinkParams, spec: UncertaintySpec, grid: AngleGrid
) -> SchemeAngle:
    """Angle maximizing the slot rate when the budget is spread evenly.

    The per-slot deviation is d_total / T. A log-spaced scan over [alpha, omega]
    locates the best coarse point, whose neighbours bracket a golden-section
    refinement. The scan makes no unimodality assumption on the whole range.

    Args:
        params: link parameters.
        spec: the uncertainty set.
        grid: angle range.

    Returns:
        The AA angle.
    """
    d_mean = spec.d_total / spec.T
    numerics = config["numerics"]

    def rate(theta: float) -> float:
        return slot_rate_angular(params, theta, d_mean)

    scan = np.geomspace(grid.alpha, grid.omega, int(numerics["coarse_scan_points"]))
    scan[0], scan[-1] = grid.alpha, grid.omega
    values = np.array([rate(float(theta)) for theta in scan])
    k = int(np.argmax(values))
    best_theta, best_value = float(scan[k]), float(values[k])

    lo = float(scan[max(k - 1, 0)])
    hi = float(scan[min(k + 1, scan.size - 1)])
    theta, value = golden_section_maximize(rate, lo, hi, numerics["golden_rtol"])
    if value > best_value:
        best_theta = theta
    logger.debug("AA angle %.9e rad at mean deviation %.3e rad", best_theta, d_mean)
    return SchemeAngle(SchemeName.AA, best_theta).check_in(grid)


def worst_case_of(theta: float, solver_config: SolverConfig) -> AdversaryResult:
    """Worst grid scenario and sum rate of a fixed angle."""
    return solve_adversary(
        solver_config.uncertainty, solver_config.deviation_grid, solver_config.link, theta
    )


def evaluate_scheme(angle: SchemeAngle, solver_config: SolverConfig) -> SchemeResult:
    """Worst case of a scheme's angle."""
    return SchemeResult(angle, worst_case_of(angle.theta, solver_config))
