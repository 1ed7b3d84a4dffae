from typing import Any, Optional
import warnings

STACKLEVEL = 2


class BeamDomainError(ValueError):
    """A beam quantity was evaluated outside its domain."""

    def __init__(self, message: str, field: Optional[str] = None) -> None:
        """Create new instance of BeamDomainError.

        Args:
            message: description of the failure.
            field: the offending link parameter, if one is to blame.
        """
        self.field = field
        super(BeamDomainError, self).__init__(message)


class QuadratureError(ArithmeticError):
    """The radial integral did not reach the requested tolerance."""

    def __init__(self, message: str, estimate: float, abserr: float) -> None:
        """Create new instance of QuadratureError.

        Args:
            message: description of the failure.
            estimate: the integral value achieved before giving up.
            abserr: the absolute error estimate reported by the integrator.
        """
        self.estimate = estimate
        self.abserr = abserr
        super(QuadratureError, self).__init__(message)

    def __str__(self) -> str:
        """Return str(self)."""
        return (
            f"{super(QuadratureError, self).__str__()} "
            f"(estimate={self.estimate!r}, abserr={self.abserr!r})"
        )


class ScenarioShapeError(ValueError):
    """A scenario does not have the length required by the uncertainty set."""

    pass


class SamplingExhaustedError(RuntimeError):
    """No member scenario was accepted within the allotted attempts."""

    def __init__(self, attempts: int, seed: Optional[int] = None) -> None:
        """Create new instance of SamplingExhaustedError.

        Args:
            attempts: number of draws made before giving up.
            seed: the seed of the exhausted generator.
        """
        self.attempts = attempts
        self.seed = seed
        super(SamplingExhaustedError, self).__init__(
            f"No scenario accepted after {attempts} attempts (seed={seed}). Uniform "
            f"rejection rarely accepts at long horizons; set \"sampler\": \"sequential\"."
        )


class GridConfigError(ValueError):
    """A deviation or angle grid is inconsistent with the uncertainty set."""

    pass


class InstanceTooLargeError(ValueError):
    """Throw when an exhaustive search would enumerate too many sequences."""

    pass


class PreconditionError(ValueError):
    """An operation was called with inputs violating its precondition."""

    pass


class ConfigError(ValueError):
    """A configuration document is malformed or violates an invariant."""

    def __init__(self, key: str, message: str) -> None:
        """Create new instance of ConfigError.

        Args:
            key: the configuration key at fault.
            message: what is wrong with it.
        """
        self.key = key
        super(ConfigError, self).__init__(message)

    def __str__(self) -> str:
        """Return str(self)."""
        return f"Invalid config key '{self.key}': {super(ConfigError, self).__str__()}"


class BoundMonotonicityError(RuntimeError):
    """The bounds moved in the wrong direction or crossed each other."""

    pass


class RobustBeamWarning(Warning):
    """Category which is used for robust-beam warnings only."""

    pass


class CustomWarning(Warning):
    """Throw custom instead of standard warning to indicate warning came from robust-beam."""

    def __init__(self, message: str, category: Any) -> None:
        """Create new instance of class.

        Args:
            message: warning message.
            category: warning category.
        """
        self.message = message
        warnings.warn(self.message, category=category, stacklevel=STACKLEVEL)


class CustomWarningCheck:
    """Class for containing custom warning messages."""

    @staticmethod
    def chord_slack_warning(chord_value: float, pool_value: float) -> None:
        """Warn when the chord value undercuts the exact pool minimum at its angle."""
        if chord_value < pool_value * (1.0 - 1e-6):
            message = (
                f"Chord approximation slack: chord value {chord_value:.6e} bit/s is "
                f"below the exact pool minimum {pool_value:.6e} bit/s."
            )
            CustomWarning(message, RobustBeamWarning)

    @staticmethod
    def duplicate_cut_warning(iteration: int, gap: float) -> None:
        """Warn when the adversary returns a scenario that is already in the pool."""
        message = (
            f"Iteration {iteration}: adversary returned a known scenario while the "
            f"gap is still {gap:.6e} bit/s."
        )
        CustomWarning(message, RobustBeamWarning)

    @staticmethod
    def sequential_sampler_warning() -> None:
        """Warn that scenarios are not drawn from the uniform rejection distribution."""
        message = (
            "Sequential sampler selected: scenarios are not drawn from the uniform "
            "rejection distribution."
        )
        CustomWarning(message, RobustBeamWarning)
