"""Decision-maker's problem: the best angle against a finite scenario pool.

Each scenario's sum rate is replaced on every interval of the angle grid by
the chord through its endpoint values; the max-min of lines on an interval is
attained at an endpoint or where two lines cross.
"""

from dataclasses import dataclass
import logging
import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from robust_beam.rblib.beam_model import LinkParams, slot_rate_angular, sum_rate
from robust_beam.rblib.exceptions import GridConfigError, PreconditionError
from robust_beam.rblib.uncertainty import Scenario
from robust_beam.rblib.util import get_config

config = get_config()
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AngleGrid:
    """Uniform partition of [alpha, omega] into M intervals.

    Attributes:
        alpha: lower end of the angle range [rad].
        omega: upper end of the angle range [rad].
        M: number of intervals.
    """

    alpha: float
    omega: float
    M: int

    def __post_init__(self) -> None:
        """Validate the range and interval count."""
        if not (0.0 < self.alpha < self.omega and math.isfinite(self.omega)):
            raise GridConfigError(
                f"0 < alpha < omega is required, got alpha={self.alpha!r}, omega={self.omega!r}"
            )
        if int(self.M) != self.M or self.M < 1:
            raise GridConfigError(f"interval count must be a positive integer, got {self.M!r}")

    def points(self) -> np.ndarray:
        """The M + 1 interval endpoints, the last one exactly omega."""
        k = np.arange(self.M + 1, dtype=float)
        points = self.alpha + k * (self.omega - self.alpha) / self.M
        points[-1] = self.omega
        return points

    def interval(self, m: int) -> Tuple[float, float]:
        """Endpoints (alpha_m, omega_m) of interval m, 1 <= m <= M."""
        if not 1 <= m <= self.M:
            raise PreconditionError(f"interval index must lie in [1, {self.M}], got {m}")
        points = self.points()
        return float(points[m - 1]), float(points[m])

    def local(self, m: int, factor: int) -> "AngleGrid":
        """Grid of `factor` intervals covering interval m."""
        alpha_m, omega_m = self.interval(m)
        return AngleGrid(alpha_m, omega_m, factor)


@dataclass(frozen=True)
class ChordLine:
    """Line through a scenario's sum rates at both ends of an interval."""

    slope: float
    value_at_alpha_m: float
    m: int
    alpha_m: float
    omega_m: float
    scenario: Optional[Scenario] = None

    def __call__(self, theta: float) -> float:
        """Line value at theta [bit/s]."""
        return self.value_at_alpha_m + self.slope * (theta - self.alpha_m)


@dataclass(frozen=True)
class DmpResult:
    """Solution of the decision-maker's problem.

    Attributes:
        theta_star: the chosen angle [rad].
        approx_value: best chord max-min value over the coarse intervals [bit/s].
        true_value_on_pool: exact minimum pool sum rate at theta_star [bit/s].
        m: winning coarse interval.
        theta_coarse: maximizer on the coarse interval before local refinement.
        refined_value: chord max-min value after refinement [bit/s].
        grid_value: largest exact pool minimum over the tabulated angles [bit/s].
    """

    theta_star: float
    approx_value: float
    true_value_on_pool: float
    m: int
    theta_coarse: float
    refined_value: float
    grid_value: float = float("nan")


class RateTable:
    """Exact slot rates on fixed angles, cached per angular deviation."""

    def __init__(self, params: LinkParams, angles: np.ndarray) -> None:
        """Create new instance of RateTable.

        Args:
            params: link parameters.
            angles: angles [rad] at which rates are tabulated.
        """
        self.params = params
        self.angles = np.asarray(angles, dtype=float)
        self._rates: Dict[float, np.ndarray] = {}

    @property
    def deviation_count(self) -> int:
        """Number of deviations tabulated so far."""
        return len(self._rates)

    def slot_rates(self, d_angular: float) -> np.ndarray:
        """Slot rate at every tabulated angle for one angular deviation."""
        d_angular = float(d_angular)
        if d_angular not in self._rates:
            self._rates[d_angular] = np.array(
                [slot_rate_angular(self.params, float(theta), d_angular) for theta in self.angles]
            )
        return self._rates[d_angular]

    def sum_rates(self, scenario: Iterable[float]) -> np.ndarray:
        """Sum rate at every tabulated angle for one scenario."""
        return np.sum([self.slot_rates(d) for d in scenario], axis=0)


def chord(params: LinkParams, scenario: Scenario, grid: AngleGrid, m: int) -> ChordLine:
    """Chord of a scenario's sum rate on interval m of the grid.

    Args:
        params: link parameters.
        scenario: angular deviations [rad].
        grid: angle grid.
        m: interval index, 1 <= m <= M.

    Returns:
        The line through (alpha_m, R(alpha_m)) and (omega_m, R(omega_m)),
        anchored at alpha_m.
    """
    alpha_m, omega_m = grid.interval(m)
    at_alpha = sum_rate(params, alpha_m, scenario)
    at_omega = sum_rate(params, omega_m, scenario)
    return _line(at_alpha, at_omega, m, alpha_m, omega_m, scenario)


def _line(
    at_alpha: float,
    at_omega: float,
    m: int,
    alpha_m: float,
    omega_m: float,
    scenario: Optional[Scenario] = None,
) -> ChordLine:
    slope = (at_omega - at_alpha) / (omega_m - alpha_m)
    return ChordLine(float(slope), float(at_alpha), m, alpha_m, omega_m, scenario)


def _max_min_lines(
    alpha: np.ndarray, omega: np.ndarray, values: np.ndarray, slopes: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Maximize the lower envelope of K lines on each of n intervals.

    Args:
        alpha: interval left ends, shape (n,).
        omega: interval right ends, shape (n,).
        values: line values at alpha, shape (n, K).
        slopes: line slopes, shape (n, K).

    Returns:
        Maximizing angles and maximal values, each of shape (n,). Among equal
        values the smallest angle is returned.
    """
    n, K = values.shape
    candidates = [alpha[:, None], omega[:, None]]
    if K > 1:
        j, k = np.triu_indices(K, 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            crossing = alpha[:, None] + (values[:, j] - values[:, k]) / (
                slopes[:, k] - slopes[:, j]
            )
        inside = (
            np.isfinite(crossing) & (crossing > alpha[:, None]) & (crossing < omega[:, None])
        )
        candidates.append(np.where(inside, crossing, alpha[:, None]))
    theta = np.concatenate(candidates, axis=1)

    offsets = theta - alpha[:, None]
    envelope = (values[:, None, :] + slopes[:, None, :] * offsets[:, :, None]).min(axis=2)

    order = np.argsort(theta, axis=1, kind="stable")
    theta = np.take_along_axis(theta, order, axis=1)
    envelope = np.take_along_axis(envelope, order, axis=1)
    best = envelope.argmax(axis=1)
    rows = np.arange(n)
    return theta[rows, best], envelope[rows, best]


def _chunk_size(K: int) -> int:
    per_interval = K * (2 + K * (K - 1) // 2)
    return max(1, int(config["numerics"]["dmp_chunk_elements"]) // per_interval)


def solve_interval(lines: Sequence[ChordLine]) -> Tuple[float, float]:
    """Maximize the minimum of chord lines over their common interval.

    Args:
        lines: one or more lines of the same interval.

    Returns:
        (theta_m, R_m): the maximizing angle and the max-min value; ties go to
        the smaller angle.

    Raises:
        PreconditionError: If lines is empty or mixes intervals.
    """
    if not lines:
        raise PreconditionError("solve_interval needs at least one line")
    first = lines[0]
    if any(
        (line.m, line.alpha_m, line.omega_m) != (first.m, first.alpha_m, first.omega_m)
        for line in lines
    ):
        raise PreconditionError("all lines must belong to the same interval")
    theta, value = _max_min_lines(
        np.array([first.alpha_m]),
        np.array([first.omega_m]),
        np.array([[line.value_at_alpha_m for line in lines]]),
        np.array([[line.slope for line in lines]]),
    )
    return float(theta[0]), float(value[0])


def _solve_grid(
    grid_points: np.ndarray, sums: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Per-interval max-min for tabulated sum rates of shape (K, M + 1)."""
    alpha, omega = grid_points[:-1], grid_points[1:]
    values = sums[:, :-1].T
    slopes = ((sums[:, 1:] - sums[:, :-1]) / (omega - alpha)).T
    chunk = _chunk_size(values.shape[1])
    thetas, optima = [], []
    for start in range(0, alpha.size, chunk):
        stop = start + chunk
        theta, value = _max_min_lines(
            alpha[start:stop], omega[start:stop], values[start:stop], slopes[start:stop]
        )
        thetas.append(theta)
        optima.append(value)
    return np.concatenate(thetas), np.concatenate(optima)


def solve_dmp(
    params: LinkParams,
    pool: Iterable[Scenario],
    grid: AngleGrid,
    rate_table: Optional[RateTable] = None,
    refine_factor: Optional[int] = None,
) -> DmpResult:
    """Solve the decision-maker's problem over a scenario pool.

    Every interval is solved with the chords of all pool scenarios and the
    best interval wins, ties toward the smaller index. The winning interval
    is then re-solved on a finer local grid of `refine_factor` intervals,
    which moves theta_star but leaves approx_value at the coarse optimum.

    Args:
        params: link parameters.
        pool: non-empty collection of scenarios.
        grid: angle grid.
        rate_table: cached rates on grid.points(), reused across calls.
        refine_factor: local refinement factor, at most 1 disables refinement.

    Returns:
        The DMP solution with the exact pool minimum at theta_star.

    Raises:
        PreconditionError: If the pool is empty.
    """
    scenarios = list(pool)
    if not scenarios:
        raise PreconditionError("the scenario pool is empty")
    if refine_factor is None:
        refine_factor = int(config["defaults"]["refine_factor"])
    points = grid.points()
    if rate_table is None:
        rate_table = RateTable(params, points)
    elif rate_table.angles.shape != points.shape or np.any(rate_table.angles != points):
        raise PreconditionError("rate table angles do not match the angle grid")

    sums = np.array([rate_table.sum_rates(s) for s in scenarios])
    thetas, optima = _solve_grid(points, sums)
    best = int(np.argmax(optima))
    m = best + 1
    approx_value = float(optima[best])
    theta_coarse = float(thetas[best])
    grid_value = float(sums.min(axis=0).max())

    theta_star, refined_value = theta_coarse, approx_value
    if refine_factor > 1:
        local = grid.local(m, refine_factor)
        local_table = RateTable(params, local.points())
        local_sums = np.array([local_table.sum_rates(s) for s in scenarios])
        local_thetas, local_optima = _solve_grid(local.points(), local_sums)
        local_best = int(np.argmax(local_optima))
        theta_star = float(local_thetas[local_best])
        refined_value = float(local_optima[local_best])
        grid_value = max(grid_value, float(local_sums.min(axis=0).max()))

    cache: Dict[float, float] = {}
    true_value = min(sum_rate(params, theta_star, s, cache) for s in scenarios)
    logger.debug(
        "dmp: interval %d, theta %.9e rad, chord value %.9e, pool minimum %.9e",
        m,
        theta_star,
        approx_value,
        true_value,
    )
    return DmpResult(
        theta_star=theta_star,
        approx_value=approx_value,
        true_value_on_pool=true_value,
        m=m,
        theta_coarse=theta_coarse,
        refined_value=refined_value,
        grid_value=grid_value,
    )


def chords(
    params: LinkParams, scenarios: Sequence[Scenario], grid: AngleGrid, m: int
) -> List[ChordLine]:
    """Chords of several scenarios on one interval."""
    return [chord(params, s, grid, m) for s in scenarios]
