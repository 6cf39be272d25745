"""
Configuration file loading.

TOML and YAML files hold the sections ``[surface]``, ``[sweep]``,
``[solver]``, ``[thresholds]`` and ``[output]``. Command-line flags are merged
on top of the file values.
"""

from pathlib import Path
from typing import Any, Dict, Optional
import logging

import toml
import yaml

logger = logging.getLogger(__name__)

SECTIONS = {
    "surface": {"spec", "basepoint", "basepoint_coords"},
    "sweep": {"m", "lambdas", "compare_gradient", "parallel", "workers"},
    "solver": {"tol", "omega", "max_iter", "tol_feas", "tol_gap", "gradient_max_iter"},
    "thresholds": {"contact_epsilon", "gradient_epsilon", "semiconcavity_samples", "semiconcavity_rho"},
    "output": {"directory", "seed", "write_fields"},
}


def load_config(path: str) -> Dict[str, Any]:
    """
    Load a sectioned configuration file.

    Args:
        path: .toml, .yaml or .yml file

    Returns:
        Mapping of section name to key/value mapping

    Raises:
        FileNotFoundError: If the file does not exist
        ValueError: On an unknown format, section or key
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    with open(path, "r") as f:
        if path.suffix == ".toml":
            data = toml.load(f)
        elif path.suffix in (".yaml", ".yml"):
            data = yaml.safe_load(f) or {}
        else:
            raise ValueError(f"unsupported config format {path.suffix!r} (use .toml or .yaml)")
    validate_sections(data)
    logger.debug(f"Loaded configuration from {path}")
    return data


def validate_sections(data: Dict[str, Any]) -> None:
    """Reject unknown sections and keys."""
    if not isinstance(data, dict):
        raise ValueError("configuration must be a mapping of sections")
    for section, values in data.items():
        if section not in SECTIONS:
            raise ValueError(f"unknown config section [{section}]")
        if not isinstance(values, dict):
            raise ValueError(f"config section [{section}] must be a table")
        unknown = set(values) - SECTIONS[section]
        if unknown:
            raise ValueError(f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}")


def merge_overrides(data: Dict[str, Any], overrides: Optional[Dict[str, Dict[str, Any]]]) -> Dict[str, Any]:
    """
    Merge flag values over file values.

    ``None`` override values mean "flag not given" and are skipped.
    """
    merged = {section: dict(values) for section, values in data.items()}
    for section, values in (overrides or {}).items():
        for key, value in values.items():
            if value is None:
                continue
            merged.setdefault(section, {})[key] = value
    validate_sections(merged)
    return merged
