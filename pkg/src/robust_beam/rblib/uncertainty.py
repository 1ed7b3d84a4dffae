"""The budgeted deviation uncertainty set, its members and random member generators."""

from dataclasses import dataclass, field
import logging
import math
from pathlib import Path
from typing import Iterator, List, Optional, Sequence, Set, Tuple, Union

import numpy as np
import pandas as pd

from robust_beam.rblib.exceptions import (
    ConfigError,
    CustomWarningCheck,
    PreconditionError,
    SamplingExhaustedError,
    ScenarioShapeError,
)
from robust_beam.rblib.util import get_config, murad_to_rad, rad_to_murad, write_csv

config = get_config()
logger = logging.getLogger(__name__)

FIRST_SLOT = "first-slot"
GAP = "gap"
BUDGET = "budget"
NON_NEGATIVE = "non-negative"

# tolerance when mapping an angular deviation back onto the integer grid
GRID_SNAP = 1e-9


@dataclass(frozen=True)
class UncertaintySpec:
    """Budgeted uncertainty set over T slots.

    Attributes:
        T: number of time slots.
        d_gap: bound on the first-slot deviation and on consecutive changes [rad].
        d_total: bound on the summed deviation over all slots [rad].
    """

    T: int
    d_gap: float
    d_total: float

    def __post_init__(self) -> None:
        """Validate the set parameters."""
        if int(self.T) != self.T or self.T < 1:
            raise ConfigError("T", f"number of time slots must be a positive integer, got {self.T!r}")
        if not (self.d_gap > 0.0 and math.isfinite(self.d_gap)):
            raise ConfigError("d_gap", f"d_gap must be positive, got {self.d_gap!r}")
        if not (0.0 < self.d_total < self.T * self.d_gap):
            raise ConfigError(
                "d_total",
                f"0 < d_total < T * d_gap is required, got d_total={self.d_total!r} "
                f"with T * d_gap={self.T * self.d_gap!r}",
            )

    @classmethod
    def from_table_units(
        cls, T: int, d_gap_murad: float, d_total_murad: float
    ) -> "UncertaintySpec":
        """Build a spec from microradian values."""
        return cls(T=int(T), d_gap=murad_to_rad(d_gap_murad), d_total=murad_to_rad(d_total_murad))


@dataclass(frozen=True)
class Scenario:
    """A sequence of non-negative angular deviations [rad], one per slot."""

    deviations: Tuple[float, ...]

    def __post_init__(self) -> None:
        """Store deviations as a tuple of floats and reject negative entries."""
        values = tuple(float(d) for d in self.deviations)
        object.__setattr__(self, "deviations", values)
        for t, d in enumerate(values, start=1):
            if not (d >= 0.0 and math.isfinite(d)):
                raise PreconditionError(f"deviation in slot {t} must be non-negative, got {d!r}")

    @classmethod
    def zeros(cls, T: int) -> "Scenario":
        """The no-deviation scenario."""
        return cls(tuple([0.0] * T))

    @classmethod
    def from_indices(cls, indices: Sequence[int], step: float) -> "Scenario":
        """Scenario with d_t = i_t * step."""
        return cls(tuple(int(i) * step for i in indices))

    @classmethod
    def from_murad(cls, values: Sequence[float]) -> "Scenario":
        """Scenario from microradian values."""
        return cls(tuple(murad_to_rad(v) for v in values))

    def to_murad(self) -> List[float]:
        """Deviations in microradians."""
        return [rad_to_murad(d) for d in self.deviations]

    def to_indices(self, step: float) -> Tuple[int, ...]:
        """Grid indices of the deviations, rounded down onto the step grid."""
        return tuple(int(math.floor(d / step + GRID_SNAP)) for d in self.deviations)

    def __len__(self) -> int:
        """Number of slots."""
        return len(self.deviations)

    def __iter__(self) -> Iterator[float]:
        """Iterate over the slot deviations."""
        return iter(self.deviations)

    def __getitem__(self, t: int) -> float:
        """Deviation of slot t (0-based)."""
        return self.deviations[t]


@dataclass(frozen=True)
class Violation:
    """One violated constraint of the uncertainty set.

    Attributes:
        constraint: FIRST_SLOT, GAP, BUDGET or NON_NEGATIVE.
        index: 1-based slot index; for GAP the pair (index, index + 1).
        excess: amount by which the bound is exceeded [rad].
    """

    constraint: str
    index: int
    excess: float


@dataclass(frozen=True)
class MembershipVerdict:
    """Outcome of a membership test."""

    violations: Tuple[Violation, ...] = ()

    @property
    def member(self) -> bool:
        """True if no constraint is violated."""
        return not self.violations

    def __bool__(self) -> bool:
        """Truthiness follows membership."""
        return self.member


def membership(
    spec: UncertaintySpec, s: Union[Scenario, Sequence[float]]
) -> MembershipVerdict:
    """Check a scenario against the first-slot, gap and budget constraints.

    Args:
        spec: the uncertainty set.
        s: the scenario, angular deviations [rad].

    Returns:
        Verdict listing every violated constraint with its slot index.

    Raises:
        ScenarioShapeError: If the scenario length differs from spec.T.
    """
    values = [float(d) for d in s]
    if len(values) != spec.T:
        raise ScenarioShapeError(f"scenario has {len(values)} slots, expected {spec.T}")
    slack = config["numerics"]["membership_slack_rad"]
    violations: List[Violation] = []

    for t, d in enumerate(values, start=1):
        if d < -slack:
            violations.append(Violation(NON_NEGATIVE, t, -d))
    if values[0] > spec.d_gap + slack:
        violations.append(Violation(FIRST_SLOT, 1, values[0] - spec.d_gap))
    for t in range(1, spec.T):
        change = abs(values[t] - values[t - 1])
        if change > spec.d_gap + slack:
            violations.append(Violation(GAP, t, change - spec.d_gap))
    total = math.fsum(values)
    if total > spec.d_total + slack:
        violations.append(Violation(BUDGET, spec.T, total - spec.d_total))

    return MembershipVerdict(tuple(violations))


def _member_mask(spec: UncertaintySpec, draws: np.ndarray) -> np.ndarray:
    slack = config["numerics"]["membership_slack_rad"]
    mask = draws[:, 0] <= spec.d_gap + slack
    if spec.T > 1:
        mask &= np.all(np.abs(np.diff(draws, axis=1)) <= spec.d_gap + slack, axis=1)
    mask &= draws.sum(axis=1) <= spec.d_total + slack
    return mask


@dataclass(frozen=True)
class ScenarioDraw:
    """A sampled member scenario with its sampling statistics."""

    scenario: Scenario
    attempts: int
    seed: int


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _first_member(
    spec: UncertaintySpec, draws: np.ndarray
) -> Tuple[Optional[Scenario], int]:
    # vectorized screening, confirmed by the scalar predicate
    for k in np.flatnonzero(_member_mask(spec, draws)):
        candidate = Scenario(tuple(draws[k]))
        if membership(spec, candidate):
            return candidate, int(k) + 1
    return None, draws.shape[0]


def _sequential_rows(spec: UncertaintySpec, uniforms: np.ndarray) -> np.ndarray:
    rows = np.empty_like(uniforms)
    rows[:, 0] = uniforms[:, 0] * spec.d_gap
    for t in range(1, spec.T):
        low = np.maximum(0.0, rows[:, t - 1] - spec.d_gap)
        high = rows[:, t - 1] + spec.d_gap
        rows[:, t] = low + uniforms[:, t] * (high - low)
    return rows


def draw_scenario(
    spec: UncertaintySpec,
    seed: int,
    max_attempts: int,
    sequential: bool = False,
) -> ScenarioDraw:
    """Draw one member scenario and report how many attempts it took.

    The default generator draws every d_t independently and uniformly on
    [0, d_total] and accepts the first draw inside the set. With
    ``sequential=True`` d_1 is uniform on [0, d_gap] and each following
    deviation is uniform on its feasible gap window; only the budget can
    reject. That distribution differs from the uniform rejection one.

    Args:
        spec: the uncertainty set.
        seed: seed of the PCG64 generator owned by this call.
        max_attempts: maximum number of draws.
        sequential: use the sequential generator.

    Returns:
        The accepted scenario with its attempt count and seed.

    Raises:
        PreconditionError: If max_attempts is below one.
        SamplingExhaustedError: If no draw is accepted within max_attempts.
    """
    if max_attempts < 1:
        raise PreconditionError(f"max_attempts must be at least 1, got {max_attempts!r}")
    rng = _rng(seed)
    batch = int(config["numerics"]["sample_batch"])
    attempts = 0
    while attempts < max_attempts:
        n = min(batch, max_attempts - attempts)
        if sequential:
            draws = _sequential_rows(spec, rng.random((n, spec.T)))
        else:
            draws = rng.uniform(0.0, spec.d_total, size=(n, spec.T))
        scenario, used = _first_member(spec, draws)
        attempts += used
        if scenario is not None:
            logger.debug("seed %d accepted after %d attempts", seed, attempts)
            return ScenarioDraw(scenario, attempts, seed)
    raise SamplingExhaustedError(attempts, seed)


def sample_scenario(spec: UncertaintySpec, seed: int, max_attempts: int) -> Scenario:
    """Draw a member scenario by uniform rejection sampling.

    Args:
        spec: the uncertainty set.
        seed: generator seed; the result is deterministic for a fixed seed.
        max_attempts: maximum number of draws.

    Returns:
        The first accepted scenario.
    """
    return draw_scenario(spec, seed, max_attempts).scenario


def sample_scenario_sequential(
    spec: UncertaintySpec, seed: int, max_attempts: int
) -> Scenario:
    """Draw a member scenario with the sequential gap-window generator."""
    CustomWarningCheck.sequential_sampler_warning()
    return draw_scenario(spec, seed, max_attempts, sequential=True).scenario


def project_to_grid(s: Scenario, spec: UncertaintySpec, step: float) -> Scenario:
    """Largest grid member lying entrywise below a member scenario.

    Flooring alone can widen a slot-to-slot change by one step, so the floored
    indices are lowered to the largest sequence starting from zero whose
    changes stay within floor(d_gap / step). The budget follows from i_t <= d_t / step.

    Args:
        s: A member of spec.
        spec: The uncertainty set.
        step: Grid step [rad].

    Returns:
        A scenario on the step grid with every entry at most the matching entry of s.
    """
    gap_steps = int(math.floor(spec.d_gap / step + GRID_SNAP))
    indices = list(s.to_indices(step))
    previous = 0
    for t, index in enumerate(indices):
        indices[t] = previous = min(index, previous + gap_steps)
    for t in range(len(indices) - 2, -1, -1):
        indices[t] = min(indices[t], indices[t + 1] + gap_steps)
    return Scenario.from_indices(indices, step)


@dataclass
class ScenarioPool:
    """Finite ordered collection of distinct member scenarios."""

    spec: UncertaintySpec
    scenarios: List[Scenario] = field(default_factory=list)
    _seen: Set[Tuple[float, ...]] = field(default_factory=set, init=False, repr=False)

    def __post_init__(self) -> None:
        """Validate and deduplicate the initial scenarios."""
        initial, self.scenarios = list(self.scenarios), []
        for scenario in initial:
            self.add(scenario)

    @classmethod
    def initial(cls, spec: UncertaintySpec) -> "ScenarioPool":
        """Pool holding only the no-deviation scenario."""
        return cls(spec, [Scenario.zeros(spec.T)])

    def add(self, scenario: Scenario) -> bool:
        """Insert a scenario; returns False if an equal scenario is present.

        Raises:
            PreconditionError: If the scenario is not a member of the set.
        """
        verdict = membership(self.spec, scenario)
        if not verdict:
            raise PreconditionError(f"scenario is not a member: {verdict.violations}")
        if scenario.deviations in self._seen:
            return False
        self._seen.add(scenario.deviations)
        self.scenarios.append(scenario)
        return True

    def __contains__(self, scenario: object) -> bool:
        """Exact-equality membership test."""
        return isinstance(scenario, Scenario) and scenario.deviations in self._seen

    def __len__(self) -> int:
        """Number of scenarios."""
        return len(self.scenarios)

    def __iter__(self) -> Iterator[Scenario]:
        """Iterate in insertion order."""
        return iter(self.scenarios)

    def to_df(self) -> pd.DataFrame:
        """One row per scenario, deviations in microradians, header d1..dT."""
        columns = [f"d{t}" for t in range(1, self.spec.T + 1)]
        return pd.DataFrame([s.to_murad() for s in self.scenarios], columns=columns)


def scenario_to_csv_row(s: Scenario) -> str:
    """One CSV row of microradian values."""
    return ",".join(repr(v) for v in s.to_murad())


def pool_to_csv(pool: ScenarioPool, path: Union[str, Path]) -> Path:
    """Write a pool as CSV with a header row."""
    return write_csv(pool.to_df(), path)


def pool_from_csv(spec: UncertaintySpec, path: Union[str, Path]) -> ScenarioPool:
    """Read a pool written by pool_to_csv."""
    df = pd.read_csv(path)
    if df.shape[1] != spec.T:
        raise ScenarioShapeError(f"pool file has {df.shape[1]} columns, expected {spec.T}")
    return ScenarioPool(spec, [Scenario.from_murad(row) for row in df.to_numpy(dtype=float)])
