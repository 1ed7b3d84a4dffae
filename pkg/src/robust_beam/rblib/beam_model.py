"""Gaussian beam intensity and the energy captured by an offset detector disk."""

from dataclasses import dataclass
import logging
import math
from typing import Dict, Iterable, Optional, Sequence, Union

from scipy import integrate, special

from robust_beam.rblib.exceptions import BeamDomainError, QuadratureError
from robust_beam.rblib.util import get_config

config = get_config()
logger = logging.getLogger(__name__)

PLANCK_H: float = config["physics"]["planck_h"]
LIGHTSPEED_C: float = config["physics"]["lightspeed_c"]


@dataclass(frozen=True)
class LinkParams:
    """Physical constants of one inter-satellite link, in SI units.

    Attributes:
        distance_L: transmitter to detector plane distance [m].
        detector_radius_r: radius of the detector disk [m].
        tx_power_P: transmit power [W].
        optical_efficiency_tau: transmission optical efficiency in (0, 1].
        wavelength_lambda: laser wavelength [m].
        receiver_sensitivity_Nb: receiver sensitivity [photons/bit].
        planck_h: Planck constant [J s].
        lightspeed_c: speed of light [m/s].
    """

    distance_L: float
    detector_radius_r: float
    tx_power_P: float
    optical_efficiency_tau: float
    wavelength_lambda: float
    receiver_sensitivity_Nb: float
    planck_h: float = PLANCK_H
    lightspeed_c: float = LIGHTSPEED_C

    def __post_init__(self) -> None:
        """Validate that every constant is positive and tau is at most one."""
        for name, value in self.__dict__.items():
            if not (value > 0.0 and math.isfinite(value)):
                raise BeamDomainError(
                    f"{name} must be positive and finite, got {value!r}", field=name
                )
        if self.optical_efficiency_tau > 1.0:
            raise BeamDomainError(
                f"optical_efficiency_tau must be at most 1, got {self.optical_efficiency_tau!r}",
                field="optical_efficiency_tau",
            )

    @classmethod
    def from_table_units(
        cls,
        distance_km: float,
        detector_radius_cm: float,
        transmit_power_mw: float,
        optical_efficiency: float,
        wavelength_nm: float,
        receiver_sensitivity_photons_per_bit: float,
    ) -> "LinkParams":
        """Build link parameters from km, cm, mW and nm values."""
        return cls(
            distance_L=distance_km * 1e3,
            detector_radius_r=detector_radius_cm * 1e-2,
            tx_power_P=transmit_power_mw * 1e-3,
            optical_efficiency_tau=optical_efficiency,
            wavelength_lambda=wavelength_nm * 1e-9,
            receiver_sensitivity_Nb=receiver_sensitivity_photons_per_bit,
        )

    @property
    def photon_energy(self) -> float:
        """Photon energy h c / lambda [J]."""
        return self.planck_h * self.lightspeed_c / self.wavelength_lambda

    @property
    def rate_prefactor(self) -> float:
        """Rate prefactor P tau / (E_p N_b) [bit/s]."""
        return (
            self.tx_power_P
            * self.optical_efficiency_tau
            / (self.photon_energy * self.receiver_sensitivity_Nb)
        )


@dataclass(frozen=True)
class Deviation:
    """Deviation of the detector center from the beam axis.

    Attributes:
        d_angular: angular deviation [rad].
        distance_L: link distance used to convert to a linear offset [m].
    """

    d_angular: float
    distance_L: float

    def __post_init__(self) -> None:
        """Reject negative deviations."""
        _check_deviation(self.d_angular)

    @property
    def d_linear(self) -> float:
        """Linear offset in the detector plane [m]."""
        return self.d_angular * self.distance_L


def _check_theta(theta: float) -> None:
    if not (theta > 0.0 and math.isfinite(theta)):
        raise BeamDomainError(f"divergence angle must be positive, got {theta!r}")


def _check_deviation(d: float) -> None:
    if not (d >= 0.0 and math.isfinite(d)):
        raise BeamDomainError(f"deviation must be non-negative, got {d!r}")


def intensity(params: LinkParams, theta: float, x: float, y: float) -> float:
    """Normalized Gaussian beam intensity at (x, y) in the detector plane [1/m^2].

    Args:
        params: link parameters.
        theta: divergence angle [rad].
        x: horizontal coordinate [m].
        y: vertical coordinate [m].

    Returns:
        2 / (pi L^2 theta^2) * exp(-2 (x^2 + y^2) / (L^2 theta^2)).

    Raises:
        BeamDomainError: If theta is not positive.
    """
    _check_theta(theta)
    footprint_sq = (params.distance_L * theta) ** 2
    return 2.0 / (math.pi * footprint_sq) * math.exp(-2.0 * (x * x + y * y) / footprint_sq)


def centered_fraction(params: LinkParams, theta: float) -> float:
    """Closed form of the captured fraction for a detector centered on the beam."""
    _check_theta(theta)
    footprint = params.distance_L * theta
    return -math.expm1(-2.0 * params.detector_radius_r**2 / footprint**2)


def _radial_integrand(rho: float, d: float, sigma: float) -> float:
    # exp(-(rho^2 + d^2) / 2 sigma^2) I0(rho d / sigma^2), rewritten with the
    # exponentially scaled Bessel function so nothing overflows
    s2 = sigma * sigma
    return (rho / s2) * math.exp(-((rho - d) ** 2) / (2.0 * s2)) * special.i0e(rho * d / s2)


def radial_fraction(
    params: LinkParams, theta: float, d: Union[float, Deviation]
) -> float:
    """Captured fraction at offset d by adaptive quadrature of the radial integral.

    The intensity is a circular Gaussian density with per-axis standard
    deviation sigma = L theta / 2, so the disk integral reduces to the radial
    form int_0^r (rho / sigma^2) exp(-(rho^2 + d^2) / (2 sigma^2)) I0(rho d / sigma^2).

    Args:
        params: link parameters.
        theta: divergence angle [rad].
        d: linear deviation of the detector center [m], or a Deviation.

    Returns:
        Captured fraction in [0, 1]. Exactly 0.0 when the disk lies more than
        window_sigmas standard deviations from the offset, where the true value
        is below the smallest positive double.

    Raises:
        BeamDomainError: If theta is not positive or d is negative.
        QuadratureError: If the integral misses the configured tolerance.
    """
    if isinstance(d, Deviation):
        d = d.d_linear
    _check_theta(theta)
    _check_deviation(d)
    numerics = config["numerics"]
    radius = params.detector_radius_r
    sigma = params.distance_L * theta / 2.0

    # the integrand is negligible outside d +- window_sigmas * sigma
    reach = numerics["window_sigmas"] * sigma
    lower = max(0.0, d - reach)
    upper = min(radius, d + reach)
    if lower >= upper:
        return 0.0

    peak = d if d > 0.0 else sigma
    points = [peak] if lower < peak < upper else None
    result = integrate.quad(
        _radial_integrand,
        lower,
        upper,
        args=(d, sigma),
        points=points,
        epsabs=numerics["quad_epsabs"],
        epsrel=numerics["quad_epsrel"],
        limit=numerics["quad_limit"],
        full_output=1,
    )
    value, abserr = float(result[0]), float(result[1])
    if not math.isfinite(value) or abserr > numerics["quad_tolerance"]:
        raise QuadratureError(
            f"radial integral failed for theta={theta!r}, d={d!r}", value, abserr
        )
    if len(result) > 3:
        logger.debug("quad note at theta=%r, d=%r: %s", theta, d, result[3])
    return min(max(value, 0.0), 1.0)


def fraction_on_disk(
    params: LinkParams, theta: float, d: Union[float, Deviation]
) -> float:
    """Fraction of the beam energy captured by a detector disk at offset d.

    A centered detector uses the closed form, which is exactly monotone in
    theta; any other offset goes through radial_fraction.

    Args:
        params: link parameters.
        theta: divergence angle [rad].
        d: linear deviation of the detector center [m], or a Deviation.

    Returns:
        Captured fraction in [0, 1].
    """
    if isinstance(d, Deviation):
        d = d.d_linear
    _check_deviation(d)
    if d == 0.0:
        return centered_fraction(params, theta)
    return radial_fraction(params, theta, d)


def slot_rate(params: LinkParams, theta: float, d: Union[float, Deviation]) -> float:
    """Achievable rate in one time slot [bit/s].

    Args:
        params: link parameters.
        theta: divergence angle [rad].
        d: linear deviation of the detector center [m].

    Returns:
        rate_prefactor * fraction_on_disk(params, theta, d).
    """
    return params.rate_prefactor * fraction_on_disk(params, theta, d)


def slot_rate_angular(params: LinkParams, theta: float, d_angular: float) -> float:
    """Slot rate for an angular deviation [rad], converted with the link distance."""
    _check_deviation(d_angular)
    return slot_rate(params, theta, d_angular * params.distance_L)


def sum_rate(
    params: LinkParams,
    theta: float,
    scenario: Iterable[float],
    cache: Optional[Dict[float, float]] = None,
) -> float:
    """Sum rate over the slots of an angular deviation scenario [bit/s].

    Args:
        params: link parameters.
        theta: divergence angle [rad].
        scenario: angular deviations d_1..d_T [rad].
        cache: optional map from angular deviation to slot rate at this theta,
            used when many scenarios share deviation values.

    Returns:
        Sum of slot rates, accumulated with math.fsum.
    """
    if cache is None:
        cache = {}
    rates = []
    for d in scenario:
        d = float(d)
        if d not in cache:
            cache[d] = slot_rate_angular(params, theta, d)
        rates.append(cache[d])
    return math.fsum(rates)


def slot_rates(
    params: LinkParams, theta: float, deviations: Sequence[float]
) -> Dict[float, float]:
    """Slot rates for a collection of angular deviations, keyed by deviation."""
    return {float(d): slot_rate_angular(params, theta, float(d)) for d in deviations}
