"""The robust-beam service API."""

from .core import RobustBeamService

__all__ = ["RobustBeamService"]
