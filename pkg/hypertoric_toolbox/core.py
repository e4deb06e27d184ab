"""
Hypertoric toolbox configuration and error types.
"""

import os
import json
import hashlib
from dataclasses import dataclass, field
from typing import Optional
from collections import OrderedDict

from dotenv import dotenv_values


DEFAULT_GUARD_POINTS = 10**7
DEFAULT_RADIUS = 5
SCHEMA_VERSION = "hypertoric-report@1"
INPUT_SCHEMA_VERSION = "hypertoric-input@1"
TOOL_VERSION = "1.0.0"


class ToolboxError(ValueError):
    """Base error for every diagnostic raised by the toolbox."""
    exit_code: int = 1


class InputError(ToolboxError):
    """Malformed or mathematically invalid input."""
    exit_code = 2


class GuardExceeded(ToolboxError):
    """An enumeration would exceed the configured point guard."""
    exit_code = 3


class SoundnessError(ToolboxError):
    """An internal consistency check failed. Always a bug."""
    exit_code = 4


def get_env_vars(filepath: str = None) -> dict:
    """
    Reads an .env file if a path is provided,
    otherwise returns the environment variables from the OS.
    """
    if filepath and os.path.exists(filepath):
        return dotenv_values(filepath)

    env_dict = OrderedDict()
    for key in sorted(os.environ.keys()):
        env_dict[key] = os.environ[key]
    return env_dict


@dataclass
class HypertoricEnv:
    """Runtime configuration for the enumeration-heavy operations.

    The enumeration guard is resolved from, in order: the explicit
    `guard_points` argument, the `.env` file at `env_path`, the OS
    environment, and finally DEFAULT_GUARD_POINTS.
    """

    guard_points: Optional[int] = None
    env_path: Optional[str] = None
    env_var_name: str = "HYPERTORIC_GUARD_POINTS"
    default_radius: int = DEFAULT_RADIUS
    schema_version: str = SCHEMA_VERSION

    source: str = field(init=False, default="default")

    def __post_init__(self):
        if self.guard_points is not None:
            self.guard_points = self._parse_guard(self.guard_points)
            self.source = "argument"
            return

        raw = get_env_vars(self.env_path).get(self.env_var_name)
        if raw not in (None, ""):
            self.guard_points = self._parse_guard(raw)
            self.source = "env_file" if self.env_path else "environment"
        else:
            self.guard_points = DEFAULT_GUARD_POINTS

    def _parse_guard(self, raw) -> int:
        try:
            value = int(raw)
        except (TypeError, ValueError):
            raise InputError(f"{self.env_var_name} must be an integer, got {raw!r}")
        if value <= 0:
            raise InputError(f"{self.env_var_name} must be positive, got {value}")
        return value

    def check_points(self, count: int, what: str, hint: str = "") -> None:
        """Raise GuardExceeded if enumerating `count` points is over the guard."""
        if count > self.guard_points:
            err_msg = f"{what} needs {count} points, guard is {self.guard_points}."
            if hint:
                err_msg += f" {hint}"
            raise GuardExceeded(err_msg)

    def export_to_dict(self) -> dict:
        return {
            "guard_points": self.guard_points,
            "guard_source": self.source,
            "default_radius": self.default_radius,
        }


def canonical_json(payload) -> str:
    """Deterministic JSON text: sorted keys, no insignificant whitespace."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def sha256_canonical_json(payload) -> str:
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()
