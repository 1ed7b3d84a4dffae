"""User configuration of the experiments, read from a JSON document.

Keys are given in the units of the simulation parameter table (microradians,
km, cm, mW, nm, photons/bit, Gbit/s) and converted to SI once, here. Keys that
are absent fall back to the packaged defaults; unknown keys are rejected.
"""

from dataclasses import dataclass, field, replace
import json
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from robust_beam.rblib.adversary import DeviationGrid
from robust_beam.rblib.beam_model import LinkParams
from robust_beam.rblib.dmp_solver import AngleGrid
from robust_beam.rblib.exceptions import BeamDomainError, ConfigError, GridConfigError
from robust_beam.rblib.orchestrator import SolverConfig
from robust_beam.rblib.uncertainty import UncertaintySpec
from robust_beam.rblib.util import (
    convert_to_enum,
    gbps_to_bps,
    get_config,
    murad_to_rad,
)
from robust_beam.scheme_names import SamplerName

config = get_config()

LINK_KEYS = (
    "distance_km",
    "detector_radius_cm",
    "transmit_power_mw",
    "optical_efficiency",
    "wavelength_nm",
    "receiver_sensitivity_photons_per_bit",
)
LINK_FIELDS = dict(
    zip(
        (
            "distance_L",
            "detector_radius_r",
            "tx_power_P",
            "optical_efficiency_tau",
            "wavelength_lambda",
            "receiver_sensitivity_Nb",
        ),
        LINK_KEYS,
    )
)
POSITIVE_KEYS = LINK_KEYS + ("d_gap_murad", "epsilon_gbps", "deviation_step_fraction")
OPTIONAL_KEYS = ("d_total_murad",)
ALLOWED_KEYS = frozenset(config["defaults"]) | frozenset(OPTIONAL_KEYS)


def _number(key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(key, f"expected a finite number, got {value!r}")
    return float(value)


def _integer(key: str, value: Any, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(key, f"expected an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(key, f"must be at least {minimum}, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment configuration in SI units.

    Attributes:
        link: link parameters.
        alpha: lower end of the angle range [rad].
        omega: upper end of the angle range [rad].
        time_slots: horizon lengths of the worst-case sweep.
        d_gap: gap bound [rad].
        d_total_fraction: d_total = fraction * T * d_gap unless d_total is set.
        d_total: explicit budget [rad], overriding the fraction.
        epsilon: stopping tolerance [bit/s].
        deviation_step_fraction: grid step as a fraction of d_gap.
        angle_intervals: number of angle intervals M.
        refine_factor: local refinement of the winning interval.
        max_iterations: iteration cap of the robust solver.
        monte_carlo_count: number of sampled scenarios.
        monte_carlo_T: horizon of the Monte Carlo experiment.
        solve_T: horizon of the single robust solve.
        sampler: scenario generator.
        max_attempts: draw limit per sampled scenario.
        seed: base seed; scenario k uses seed + k.
        threads: worker count.
        out_dir: output directory.
        dump_graph: write adversary graphs next to the outputs.
    """

    link: LinkParams
    alpha: float
    omega: float
    time_slots: Tuple[int, ...]
    d_gap: float
    d_total_fraction: float
    d_total: Optional[float]
    epsilon: float
    deviation_step_fraction: float
    angle_intervals: int
    refine_factor: int
    max_iterations: int
    monte_carlo_count: int
    monte_carlo_T: int
    solve_T: int
    sampler: SamplerName
    max_attempts: int
    seed: int
    threads: int
    out_dir: Path = field(default_factory=Path.cwd)
    dump_graph: bool = False

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        """Build and validate a configuration from table-unit values.

        Args:
            data: user keys; missing keys take the packaged defaults.

        Returns:
            The validated configuration.

        Raises:
            ConfigError: If a key is unknown, malformed or violates an invariant.
        """
        if not isinstance(data, dict):
            raise ConfigError("<root>", "the configuration must be a JSON object")
        for key in data:
            if key not in ALLOWED_KEYS:
                raise ConfigError(key, "unknown configuration key")
        merged = {**config["defaults"], **data}

        for key in POSITIVE_KEYS:
            if _number(key, merged[key]) <= 0.0:
                raise ConfigError(key, f"must be positive, got {merged[key]!r}")
        try:
            link = LinkParams.from_table_units(**{key: float(merged[key]) for key in LINK_KEYS})
        except BeamDomainError as error:
            key = LINK_FIELDS.get(error.field or "", "<link>")
            raise ConfigError(key, str(error)) from error

        angles = merged["divergence_angle_murad"]
        if not isinstance(angles, list) or len(angles) != 2:
            raise ConfigError("divergence_angle_murad", "expected a list [alpha, omega]")
        alpha, omega = (murad_to_rad(_number("divergence_angle_murad", a)) for a in angles)
        if not 0.0 < alpha < omega:
            raise ConfigError("divergence_angle_murad", "0 < alpha < omega is required")

        time_slots = merged["time_slots"]
        if not isinstance(time_slots, list) or not time_slots:
            raise ConfigError("time_slots", "expected a non-empty list of slot counts")
        slots = tuple(_integer("time_slots", T, 1) for T in time_slots)

        if merged["deviation_step_fraction"] > 1.0:
            raise ConfigError("deviation_step_fraction", "must not exceed 1")
        fraction = _number("d_total_fraction", merged["d_total_fraction"])
        d_total = merged.get("d_total_murad")

        experiment = cls(
            link=link,
            alpha=alpha,
            omega=omega,
            time_slots=slots,
            d_gap=murad_to_rad(merged["d_gap_murad"]),
            d_total_fraction=fraction,
            d_total=None if d_total is None else murad_to_rad(_number("d_total_murad", d_total)),
            epsilon=gbps_to_bps(merged["epsilon_gbps"]),
            deviation_step_fraction=float(merged["deviation_step_fraction"]),
            angle_intervals=_integer("angle_intervals", merged["angle_intervals"], 1),
            refine_factor=_integer("refine_factor", merged["refine_factor"], 1),
            max_iterations=_integer("max_iterations", merged["max_iterations"], 1),
            monte_carlo_count=_integer("monte_carlo_count", merged["monte_carlo_count"], 1),
            monte_carlo_T=_integer("monte_carlo_T", merged["monte_carlo_T"], 1),
            solve_T=_integer("solve_T", merged["solve_T"], 1),
            sampler=_sampler(merged["sampler"]),
            max_attempts=_integer("max_attempts", merged["max_attempts"], 1),
            seed=_integer("seed", merged["seed"], 0),
            threads=_integer("threads", merged["threads"], 1),
        )
        experiment.validate()
        return experiment

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "ExperimentConfig":
        """Read and validate a JSON configuration file.

        Raises:
            ConfigError: If the file cannot be read or parsed, or is invalid.
        """
        try:
            data = json.loads(Path(path).read_text())
        except OSError as error:
            raise ConfigError("<file>", f"cannot read {path}: {error}") from error
        except json.JSONDecodeError as error:
            raise ConfigError("<file>", f"{path} is not valid JSON: {error}") from error
        return cls.from_dict(data)

    def with_overrides(
        self,
        seed: Optional[int] = None,
        out_dir: Optional[Union[str, Path]] = None,
        threads: Optional[int] = None,
        dump_graph: Optional[bool] = None,
    ) -> "ExperimentConfig":
        """Copy with command-line overrides applied."""
        changes: Dict[str, Any] = {}
        if seed is not None:
            changes["seed"] = _integer("seed", seed, 0)
        if out_dir is not None:
            changes["out_dir"] = Path(out_dir)
        if threads is not None:
            changes["threads"] = _integer("threads", threads, 1)
        if dump_graph is not None:
            changes["dump_graph"] = bool(dump_graph)
        return replace(self, **changes)

    @property
    def horizons(self) -> List[int]:
        """Every horizon any experiment uses, sorted."""
        return sorted(set(self.time_slots) | {self.monte_carlo_T, self.solve_T})

    def validate(self) -> None:
        """Build every derived object once so invariant violations surface early."""
        for T in self.horizons:
            self.solver_config(T)

    def uncertainty(self, T: int) -> UncertaintySpec:
        """Uncertainty set of horizon T.

        Raises:
            ConfigError: If the budget violates 0 < d_total < T * d_gap.
        """
        if self.d_total is not None:
            d_total, key = self.d_total, "d_total_murad"
        else:
            d_total, key = self.d_total_fraction * T * self.d_gap, "d_total_fraction"
        try:
            return UncertaintySpec(T=T, d_gap=self.d_gap, d_total=d_total)
        except ConfigError as error:
            raise ConfigError(key, f"T={T}: {error.args[0]}") from error

    def angle_grid(self) -> AngleGrid:
        """Angle grid of M intervals over [alpha, omega]."""
        return AngleGrid(self.alpha, self.omega, self.angle_intervals)

    def solver_config(self, T: int) -> SolverConfig:
        """Solver inputs for horizon T."""
        spec = self.uncertainty(T)
        try:
            deviation_grid = DeviationGrid.from_spec(spec, self.deviation_step_fraction)
        except GridConfigError as error:
            raise ConfigError("deviation_step_fraction", str(error)) from error
        return SolverConfig(
            link=self.link,
            uncertainty=spec,
            angle_grid=self.angle_grid(),
            deviation_grid=deviation_grid,
            epsilon=self.epsilon,
            max_iterations=self.max_iterations,
            refine_factor=self.refine_factor,
            graph_dump_dir=self.out_dir / "graphs" / f"T{T}" if self.dump_graph else None,
        )


def _sampler(value: Any) -> SamplerName:
    try:
        return convert_to_enum(value, SamplerName)
    except ValueError as error:
        raise ConfigError("sampler", str(error)) from error
