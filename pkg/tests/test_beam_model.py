import math

import numpy as np
import pytest
from scipy import integrate

from robust_beam.rblib.beam_model import (
    Deviation,
    LinkParams,
    centered_fraction,
    fraction_on_disk,
    intensity,
    radial_fraction,
    slot_rate,
    slot_rate_angular,
    sum_rate,
)
from robust_beam.rblib.exceptions import BeamDomainError

MURAD = 1e-6


def test_rate_prefactor_of_parameter_table(table1_params: LinkParams) -> None:
    assert table1_params.rate_prefactor == pytest.approx(2.995e13, rel=1e-3)
    assert table1_params.photon_energy == pytest.approx(2.337e-19, rel=1e-3)


def test_link_params_rejects_bad_values() -> None:
    with pytest.raises(BeamDomainError):
        LinkParams(40e3, 0.15, 0.07, 1.5, 850e-9, 100.0)
    with pytest.raises(BeamDomainError):
        LinkParams(40e3, 0.0, 0.07, 0.01, 850e-9, 100.0)


def test_radial_integral_matches_closed_form_when_centered(table1_params: LinkParams) -> None:
    for theta in np.geomspace(0.01 * MURAD, 1000 * MURAD, 200):
        numeric = radial_fraction(table1_params, float(theta), 0.0)
        assert abs(numeric - centered_fraction(table1_params, float(theta))) <= 1e-10


def test_offset_fraction_matches_polar_integral_of_intensity(table1_params: LinkParams) -> None:
    theta, d = 10 * MURAD, 0.1
    radius = table1_params.detector_radius_r

    def integrand(rho: float, phi: float) -> float:
        return rho * intensity(table1_params, theta, d + rho * math.cos(phi), rho * math.sin(phi))

    expected, _ = integrate.dblquad(
        integrand, 0.0, 2.0 * math.pi, 0.0, radius, epsabs=1e-13, epsrel=1e-11
    )
    assert fraction_on_disk(table1_params, theta, d) == pytest.approx(expected, rel=1e-7)


def test_fraction_decreases_with_deviation(table1_params: LinkParams) -> None:
    theta = 10 * MURAD
    fractions = [fraction_on_disk(table1_params, theta, d) for d in (0.0, 0.05, 0.1, 0.2, 0.4)]
    assert all(a > b for a, b in zip(fractions, fractions[1:]))
    assert all(0.0 <= f <= 1.0 for f in fractions)


def test_narrow_beam_far_from_detector_captures_nothing(table1_params: LinkParams) -> None:
    assert fraction_on_disk(table1_params, 0.01 * MURAD, 1.0) == 0.0


def test_deviation_object_uses_linear_offset(table1_params: LinkParams) -> None:
    deviation = Deviation(2 * MURAD, table1_params.distance_L)
    assert deviation.d_linear == pytest.approx(0.08)
    assert fraction_on_disk(table1_params, 10 * MURAD, deviation) == fraction_on_disk(
        table1_params, 10 * MURAD, deviation.d_linear
    )


def test_domain_errors(table1_params: LinkParams) -> None:
    with pytest.raises(BeamDomainError):
        fraction_on_disk(table1_params, 0.0, 0.0)
    with pytest.raises(BeamDomainError):
        fraction_on_disk(table1_params, 10 * MURAD, -1e-3)
    with pytest.raises(BeamDomainError):
        Deviation(-1.0, 40e3)


def test_slot_rate_scales_fraction(table1_params: LinkParams) -> None:
    theta = 50 * MURAD
    assert slot_rate(table1_params, theta, 0.0) == (
        table1_params.rate_prefactor * centered_fraction(table1_params, theta)
    )
    assert slot_rate_angular(table1_params, theta, 1 * MURAD) == slot_rate(
        table1_params, theta, 1 * MURAD * table1_params.distance_L
    )


def test_sum_rate_of_no_deviation(table1_params: LinkParams) -> None:
    theta = 20 * MURAD
    expected = 5 * slot_rate(table1_params, theta, 0.0)
    assert sum_rate(table1_params, theta, [0.0] * 5) == pytest.approx(expected, rel=1e-15)


def test_sum_rate_cache_is_filled_per_deviation(table1_params: LinkParams) -> None:
    cache: dict = {}
    sum_rate(table1_params, 20 * MURAD, [0.0, 1 * MURAD, 0.0, 1 * MURAD], cache)
    assert sorted(cache) == [0.0, 1 * MURAD]


def test_intensity_value_and_symmetry(table1_params: LinkParams) -> None:
    theta = 7.5 * MURAD
    expected = math.exp(-2.0) * 2.0 / (math.pi * 0.09)
    assert intensity(table1_params, theta, 0.3, 0.0) == pytest.approx(expected, rel=1e-12)
    for a, b in [(0.1, 0.25), (-0.3, 0.05), (0.0, 0.4)]:
        value = intensity(table1_params, theta, a, b)
        assert intensity(table1_params, theta, b, a) == value
        assert intensity(table1_params, theta, -a, -b) == value


def test_wide_detector_captures_the_whole_beam(table1_params: LinkParams) -> None:
    radius = table1_params.detector_radius_r
    for ratio in (5.0, 8.0, 50.0):
        theta = radius / (table1_params.distance_L * ratio)
        assert fraction_on_disk(table1_params, theta, 0.0) >= 1.0 - 1e-12
        assert radial_fraction(table1_params, theta, 0.0) >= 1.0 - 1e-10


def test_disk_outside_the_integration_window_gives_exact_zero(table1_params: LinkParams) -> None:
    theta = 0.01 * MURAD
    sigma = table1_params.distance_L * theta / 2.0
    d = table1_params.detector_radius_r + 41.0 * sigma
    assert radial_fraction(table1_params, theta, d) == 0.0
    assert slot_rate(table1_params, theta, d) == 0.0
