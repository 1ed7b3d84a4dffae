"""Script for various helper methods for the robust-beam library."""

from abc import ABC
from enum import Enum
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Type, TypeVar, Union

import pandas as pd
import yaml

MICRO = 1e-6
GIGA = 1e9

EnumT = TypeVar("EnumT", bound=Enum)


class ConfigContainer(ABC):
    """Store config data."""

    config: Dict = {}


def get_config(config_path: Optional[str] = None) -> Dict:
    """Find and return the packaged config file."""
    if ConfigContainer.config and config_path is None:
        return ConfigContainer.config

    if not config_path:
        config_path = str(Path(__file__).parent / "config.yml")
    with open(config_path) as file:
        ConfigContainer.config = yaml.safe_load(file)
    return ConfigContainer.config


def murad_to_rad(value: float) -> float:
    """Convert microradians to radians."""
    return float(value) * MICRO


def rad_to_murad(value: float) -> float:
    """Convert radians to microradians."""
    return float(value) / MICRO


def bps_to_gbps(value: float) -> float:
    """Convert bit/s to Gbit/s."""
    return float(value) / GIGA


def gbps_to_bps(value: float) -> float:
    """Convert Gbit/s to bit/s."""
    return float(value) * GIGA


def convert_to_enum(value: Union[str, EnumT], enum_type: Type[EnumT]) -> EnumT:
    """Convert a string or enum member to a member of the given enum.

    Args:
        value: enum member, member value or member name (case insensitive).
        enum_type: the target enum class.

    Returns:
        The matching enum member.

    Raises:
        ValueError: If the value does not name a member of enum_type.
    """
    if isinstance(value, enum_type):
        return value
    if isinstance(value, str):
        for member in enum_type:
            if value.lower() in (str(member.value).lower(), member.name.lower()):
                return member
    raise ValueError(f"{value!r} is not a valid {enum_type.__name__}")


def pretty_dict_string(
    d: Union[List, Dict], indent: int = 4, sort_keys: bool = True
) -> str:
    """Print dict content as nice-formatted JSON string."""
    return json.dumps(d, indent=indent, sort_keys=sort_keys) if d else "{}"


def write_csv(df: pd.DataFrame, path: Union[str, Path]) -> Path:
    """Write a frame with full-precision scientific floats and LF line endings."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format="%.17e", lineterminator="\n")
    return path


def write_json(data: Any, path: Union[str, Path]) -> Path:
    """Write a JSON document with sorted keys."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(pretty_dict_string(data) + "\n")
    return path
