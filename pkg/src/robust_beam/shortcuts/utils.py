from robust_beam.rblib.exceptions import RobustBeamWarning


def disable_robust_beam_warnings() -> None:
    """Disable RobustBeamWarning warnings."""
    import warnings

    warnings.filterwarnings("ignore", category=RobustBeamWarning)
