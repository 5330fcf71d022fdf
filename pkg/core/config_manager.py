"""
Configuration Management
"""
import copy
import logging
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import yaml

from algebra.parse import parse_complex
from algebra.qcore import HahnParams
from core.errors import InvalidParameterError

OUTPUT_FORMATS = ("csv", "json")


class ConfigManager:
    """Manages run configuration"""

    def __init__(self, config_file: str = "config.yaml"):
        self.config_file = Path(config_file)
        self.logger = logging.getLogger(__name__)
        self.config: Dict[str, Any] = {}

    def load(self) -> Dict[str, Any]:
        """Load configuration from YAML file, merged over the defaults"""
        if not self.config_file.exists():
            self.logger.warning(f"Config file {self.config_file} not found, using defaults")
            return self._get_defaults()

        try:
            with open(self.config_file, 'r') as f:
                loaded = yaml.safe_load(f) or {}
            self.config = merge_config(self._get_defaults(), loaded)
            self.logger.info(f"Loaded configuration from {self.config_file}")
            return self.config
        except Exception as e:
            self.logger.error(f"Failed to load config: {e}")
            return self._get_defaults()

    def save(self, config: Dict[str, Any]):
        """Save configuration to file"""
        try:
            with open(self.config_file, 'w') as f:
                yaml.dump(config, f, default_flow_style=False)
            self.logger.info(f"Saved configuration to {self.config_file}")
        except Exception as e:
            self.logger.error(f"Failed to save config: {e}")

    def _get_defaults(self) -> Dict[str, Any]:
        """Get default configuration"""
        return {
            'hahn': {
                'q': 0.5,
                'c': 1.0
            },
            'grid': {
                'r_min': 1.0,
                'r_max': 2.0 ** 20,
                'points': 41
            },
            'quadrature': {
                'theta_samples': 256,
                'tol': 1e-12
            },
            'tolerances': {
                'cluster': 1e-7,
                'slack_fraction': 0.05
            },
            'output': {
                'format': 'csv',
                'path': None
            },
            'runtime': {
                'workers': 1
            },
            'logging': {
                'level': 'WARNING',
                'file': None
            }
        }


def merge_config(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Recursive dict merge; override wins"""
    merged = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge_config(merged[key], value)
        else:
            merged[key] = value
    return merged


def _to_complex(name: str, value: Any) -> complex:
    if isinstance(value, str):
        return parse_complex(value)
    try:
        return complex(value)
    except (TypeError, ValueError):
        raise InvalidParameterError("RunConfig", f"{name} must be a complex number, got {value!r}")


@dataclass(frozen=True)
class RunConfig:
    """Validated settings of one run"""
    q: complex = 0.5
    c: complex = 1.0
    r_min: float = 1.0
    r_max: float = 2.0 ** 20
    grid_points: int = 41
    theta_samples: int = 256
    quad_tol: float = 1e-12
    cluster_tol: float = 1e-7
    slack_fraction: float = 0.05
    output_format: str = "csv"
    output_path: Optional[str] = None
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "q", _to_complex("q", self.q))
        object.__setattr__(self, "c", _to_complex("c", self.c))
        if not self.r_min > 0:
            raise InvalidParameterError("RunConfig", f"r_min must be positive, got {self.r_min}")
        if not self.r_min < self.r_max:
            raise InvalidParameterError("RunConfig", f"r_min < r_max required, got {self.r_min} >= {self.r_max}")
        if self.grid_points < 2:
            raise InvalidParameterError("RunConfig", f"grid_points must be >= 2, got {self.grid_points}")
        if self.theta_samples < 8:
            raise InvalidParameterError("RunConfig", f"theta_samples must be >= 8, got {self.theta_samples}")
        if not self.quad_tol > 0 or not self.cluster_tol > 0:
            raise InvalidParameterError("RunConfig", "tolerances must be positive")
        if self.slack_fraction < 0:
            raise InvalidParameterError("RunConfig", f"slack_fraction must be >= 0, got {self.slack_fraction}")
        if self.output_format not in OUTPUT_FORMATS:
            raise InvalidParameterError("RunConfig", f"format must be one of {OUTPUT_FORMATS}")
        if self.workers < 1:
            raise InvalidParameterError("RunConfig", f"workers must be >= 1, got {self.workers}")

    @classmethod
    def from_dict(cls, config: Dict[str, Any]) -> "RunConfig":
        """Build from a ConfigManager dictionary"""
        hahn = config.get("hahn", {})
        grid = config.get("grid", {})
        quadrature = config.get("quadrature", {})
        tolerances = config.get("tolerances", {})
        output = config.get("output", {})
        runtime = config.get("runtime", {})
        try:
            values = dict(
                q=hahn.get("q", 0.5),
                c=hahn.get("c", 1.0),
                r_min=float(grid.get("r_min", 1.0)),
                r_max=float(grid.get("r_max", 2.0 ** 20)),
                grid_points=int(grid.get("points", 41)),
                theta_samples=int(quadrature.get("theta_samples", 256)),
                quad_tol=float(quadrature.get("tol", 1e-12)),
                cluster_tol=float(tolerances.get("cluster", 1e-7)),
                slack_fraction=float(tolerances.get("slack_fraction", 0.05)),
                output_format=output.get("format", "csv"),
                output_path=output.get("path"),
                workers=int(runtime.get("workers", 1)),
            )
        except (TypeError, ValueError) as e:
            raise InvalidParameterError("RunConfig", f"malformed configuration value: {e}")
        return cls(**values)

    def with_overrides(self, **overrides: Any) -> "RunConfig":
        """Copy with the non-None overrides applied"""
        return replace(self, **{key: value for key, value in overrides.items() if value is not None})

    @property
    def params(self) -> HahnParams:
        return HahnParams(self.q, self.c)

    def grid(self) -> np.ndarray:
        """Geometric radius grid r_min..r_max"""
        return np.geomspace(self.r_min, self.r_max, self.grid_points)

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready echo of every setting"""
        data = asdict(self)
        data["q"] = {"re": self.q.real, "im": self.q.imag}
        data["c"] = {"re": self.c.real, "im": self.c.imag}
        return data
