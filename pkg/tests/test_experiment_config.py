from pathlib import Path

import pytest

from robust_beam.rblib.exceptions import ConfigError
from robust_beam.rblib.experiment_config import ExperimentConfig
from robust_beam.scheme_names import SamplerName

MURAD = 1e-6


def test_packaged_defaults() -> None:
    experiment = ExperimentConfig.from_dict({})
    assert experiment.link.distance_L == pytest.approx(40e3)
    assert experiment.link.detector_radius_r == pytest.approx(0.15)
    assert (experiment.alpha, experiment.omega) == pytest.approx((0.01 * MURAD, 1000 * MURAD))
    assert experiment.time_slots == (6, 8, 10, 12, 14)
    assert experiment.epsilon == pytest.approx(1e5)
    assert experiment.sampler is SamplerName.UniformRejection
    assert experiment.solve_T == 8
    assert experiment.d_total is None
    assert experiment.uncertainty(8).d_total == pytest.approx(3.2 * MURAD)
    assert experiment.horizons == [6, 8, 10, 12, 14]


def test_solver_config_derives_the_deviation_grid() -> None:
    solver_config = ExperimentConfig.from_dict({}).solver_config(8)
    assert solver_config.deviation_grid.gap_steps_G == 10
    assert solver_config.deviation_grid.budget_steps_B == 32
    assert solver_config.angle_grid.M == 5000
    assert solver_config.graph_dump_dir is None


def test_unknown_key_is_rejected() -> None:
    with pytest.raises(ConfigError) as error:
        ExperimentConfig.from_dict({"distance_m": 40e3})
    assert error.value.key == "distance_m"
    assert str(error.value).startswith("Invalid config key 'distance_m'")


def test_explicit_budget_must_fit_every_horizon() -> None:
    with pytest.raises(ConfigError) as error:
        ExperimentConfig.from_dict({"d_total_murad": 10.0, "time_slots": [2]})
    assert error.value.key == "d_total_murad"
    assert "T=2" in str(error.value)


def test_budget_fraction_must_stay_below_one() -> None:
    with pytest.raises(ConfigError) as error:
        ExperimentConfig.from_dict({"d_total_fraction": 1.0})
    assert error.value.key == "d_total_fraction"


def test_explicit_budget_overrides_the_fraction(degenerate_config) -> None:
    experiment = ExperimentConfig.from_dict(degenerate_config)
    assert experiment.uncertainty(3).d_total == pytest.approx(0.05 * MURAD)
    assert experiment.solver_config(3).deviation_grid.budget_steps_B == 0
    assert experiment.horizons == [2, 3, 4]


@pytest.mark.parametrize(
    "data, key",
    [
        ({"time_slots": []}, "time_slots"),
        ({"time_slots": [0, 2]}, "time_slots"),
        ({"seed": True}, "seed"),
        ({"distance_km": True}, "distance_km"),
        ({"distance_km": "far"}, "distance_km"),
        ({"epsilon_gbps": 0.0}, "epsilon_gbps"),
        ({"threads": 0}, "threads"),
        ({"angle_intervals": 2.5}, "angle_intervals"),
        ({"optical_efficiency": 1.5}, "optical_efficiency"),
        ({"divergence_angle_murad": [5.0, 1.0]}, "divergence_angle_murad"),
        ({"deviation_step_fraction": 2.0}, "deviation_step_fraction"),
        ({"sampler": "importance"}, "sampler"),
    ],
)
def test_malformed_values_name_their_key(data, key) -> None:
    with pytest.raises(ConfigError) as error:
        ExperimentConfig.from_dict(data)
    assert error.value.key == key


def test_sampler_names_parse() -> None:
    assert ExperimentConfig.from_dict({"sampler": "sequential"}).sampler is SamplerName.Sequential
    assert (
        ExperimentConfig.from_dict({"sampler": "UniformRejection"}).sampler
        is SamplerName.UniformRejection
    )


def test_json_documents(tmp_path: Path, write_config, degenerate_config) -> None:
    assert ExperimentConfig.from_json(write_config(degenerate_config)).solve_T == 4
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    with pytest.raises(ConfigError) as error:
        ExperimentConfig.from_json(broken)
    assert error.value.key == "<file>"
    with pytest.raises(ConfigError):
        ExperimentConfig.from_json(tmp_path / "missing.json")
    listed = tmp_path / "list.json"
    listed.write_text("[]")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_json(listed)


def test_command_line_overrides(tmp_path: Path, degenerate_config) -> None:
    experiment = ExperimentConfig.from_dict(degenerate_config).with_overrides(
        seed=3, out_dir=tmp_path, threads=2, dump_graph=True
    )
    assert (experiment.seed, experiment.out_dir, experiment.threads) == (3, tmp_path, 2)
    assert experiment.solver_config(4).graph_dump_dir == tmp_path / "graphs" / "T4"
    unchanged = experiment.with_overrides()
    assert unchanged == experiment
    with pytest.raises(ConfigError):
        experiment.with_overrides(seed=-1)


@pytest.mark.parametrize(
    "data, key",
    [
        ({"distance_km": 1e306}, "distance_km"),
        ({"wavelength_nm": 1e-320}, "wavelength_nm"),
        ({"transmit_power_mw": 1e-322}, "transmit_power_mw"),
        ({"optical_efficiency": 1.01}, "optical_efficiency"),
    ],
)
def test_link_conversion_errors_name_the_failing_key(data, key) -> None:
    with pytest.raises(ConfigError) as error:
        ExperimentConfig.from_dict(data)
    assert error.value.key == key
