import json
from pathlib import Path
from typing import Any, Callable, Dict, Tuple

import pytest

from robust_beam.rblib.adversary import DeviationGrid
from robust_beam.rblib.beam_model import LinkParams
from robust_beam.rblib.uncertainty import UncertaintySpec

MURAD = 1e-6


@pytest.fixture
def table1_params() -> LinkParams:
    """Link parameters of the simulation parameter table."""
    return LinkParams.from_table_units(
        distance_km=40.0,
        detector_radius_cm=15.0,
        transmit_power_mw=70.0,
        optical_efficiency=0.01,
        wavelength_nm=850.0,
        receiver_sensitivity_photons_per_bit=100.0,
    )


@pytest.fixture
def stressed_params() -> LinkParams:
    """Table link with a 0.5 cm detector, so deviations of a few cm lose the beam."""
    return LinkParams.from_table_units(
        distance_km=40.0,
        detector_radius_cm=0.5,
        transmit_power_mw=70.0,
        optical_efficiency=0.01,
        wavelength_nm=850.0,
        receiver_sensitivity_photons_per_bit=100.0,
    )


@pytest.fixture
def grid_instance() -> Callable[..., Tuple[UncertaintySpec, DeviationGrid]]:
    """Factory of uncertainty sets with a consistent grid of given step counts."""

    def make(
        T: int, G: int, B: int, step: float = 0.1 * MURAD
    ) -> Tuple[UncertaintySpec, DeviationGrid]:
        spec = UncertaintySpec(T=T, d_gap=(G + 0.5) * step, d_total=(B + 0.5) * step)
        grid = DeviationGrid.from_step(spec, step)
        assert (grid.gap_steps_G, grid.budget_steps_B) == (G, B)
        return spec, grid

    return make


@pytest.fixture
def degenerate_config() -> Dict[str, Any]:
    """Budget of half a deviation step: the adversary can only return all zeros."""
    return {
        "d_total_murad": 0.05,
        "angle_intervals": 50,
        "refine_factor": 10,
        "monte_carlo_count": 5,
        "monte_carlo_T": 2,
        "solve_T": 4,
        "time_slots": [2, 3],
    }


@pytest.fixture
def stressed_config() -> Dict[str, Any]:
    """0.5 cm detector on an angle grid fine enough that chord error stays below epsilon."""
    return {
        "detector_radius_cm": 0.5,
        "divergence_angle_murad": [0.1, 2.1],
        "angle_intervals": 2000,
        "refine_factor": 10,
        "epsilon_gbps": 1.0e-3,
        "time_slots": [2, 3],
        "solve_T": 3,
        "monte_carlo_T": 3,
        "monte_carlo_count": 20,
    }


@pytest.fixture
def write_config(tmp_path: Path) -> Callable[[Dict[str, Any]], Path]:
    """Write a configuration dict as JSON and return its path."""

    def write(data: Dict[str, Any]) -> Path:
        path = tmp_path / "config.json"
        path.write_text(json.dumps(data))
        return path

    return write

