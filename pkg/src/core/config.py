"""
Configuration management for adiavac

Settings come from built-in defaults, then an optional key=value run file,
then command-line flags (flags take precedence).
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple

from src.core.cosmology import ModeSpec, ScaleFactorModel
from src.core.errors import ConfigError

logger = logging.getLogger(__name__)

THREADS_ENV = "ADIAVAC_THREADS"


class Command(Enum):
    """Batch commands offered by the front end."""

    TOWER = "tower"
    MODES = "modes"
    BOGOLIUBOV = "bogoliubov"
    PROBE = "probe"
    CHECK = "check"

    @property
    def integrates(self) -> bool:
        return self in (Command.MODES, Command.BOGOLIUBOV)


class OutputFormat(Enum):
    CSV = "csv"
    JSON = "json"


@dataclass(frozen=True)
class RunConfig:
    """Validated settings for one command invocation."""

    command: Command
    model: ScaleFactorModel
    mode: ModeSpec
    k_list: List[float]
    t0: float
    t1: Optional[float]
    order_n: int
    tol: float
    output: Optional[Path] = None
    output_format: OutputFormat = OutputFormat.CSV
    grid: Optional[Tuple[float, float, int]] = None
    samples: int = 401
    trials: int = 1000
    seed: int = 0
    threads: int = 0

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        numbers = [self.t0, self.tol, *self.k_list]
        if self.t1 is not None:
            numbers.append(self.t1)
        if not all(math.isfinite(x) for x in numbers):
            raise ConfigError("All numeric settings must be finite.")
        if self.order_n < 0:
            raise ConfigError(f"Adiabatic order must be non-negative, got {self.order_n}.")
        if self.command.integrates:
            if self.t1 is None:
                raise ConfigError(f"Command '{self.command.value}' needs --t1.")
            if self.t1 == self.t0:
                raise ConfigError("t1 must differ from t0 for integration commands.")
        if self.samples < 2:
            raise ConfigError("At least two output samples are needed.")
        if self.trials < 1:
            raise ConfigError("At least one positivity trial is needed.")

    def modes(self) -> List[ModeSpec]:
        return [self.mode.with_k(k) for k in self.k_list]


class Config:
    """Configuration manager for a run"""

    def __init__(self, config_file: Optional[Path] = None):
        self.config_file = config_file
        self.settings: Dict[str, Any] = {
            "model": "constant",
            "kappa": 0,
            "k": 1.0,
            "m": 1.0,
            "t0": 0.0,
            "t1": None,
            "order": 0,
            "tol": 1e-10,
            "format": "csv",
            "samples": 401,
            "trials": 1000,
            "seed": 0,
        }

    def load(self):
        """Load key=value settings from the run file, if one was given"""
        if self.config_file is None:
            return
        path = Path(self.config_file)
        if not path.exists():
            raise ConfigError(f"Configuration file {path} does not exist.")
        try:
            lines = path.read_text().splitlines()
        except OSError as e:
            raise ConfigError(f"Error loading config {path}: {e}") from e
        for number, raw in enumerate(lines, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{number}: expected key=value, got {raw!r}.")
            key, value = (part.strip() for part in line.split("=", 1))
            self.set(_normalise_key(key), value)
        logger.debug("Loaded %d settings from %s", len(lines), path)

    def update(self, overrides: Mapping[str, Any]):
        """Apply flag values; None means 'not given on the command line'"""
        for key, value in overrides.items():
            if value is not None:
                self.set(_normalise_key(key), value)

    def get(self, key, default=None):
        """Get a configuration value"""
        return self.settings.get(key, default)

    def set(self, key, value):
        """Set a configuration value"""
        if key == "kind":
            key = "model"
        self.settings[key] = value

    def to_run_config(self, command: str) -> RunConfig:
        """Resolve the settings into a validated RunConfig"""
        try:
            command_enum = Command(command)
            model = ScaleFactorModel.from_settings(self.settings)
            k_list = self._k_list()
            mode = ModeSpec(int(self._number("kappa")), k_list[0], self._number("m"))
            t1 = self.get("t1")
            return RunConfig(
                command=command_enum,
                model=model,
                mode=mode,
                k_list=k_list,
                t0=self._number("t0"),
                t1=None if t1 in (None, "") else float(t1),
                order_n=int(self._number("order")),
                tol=self._number("tol"),
                output=Path(self.get("output")) if self.get("output") else None,
                output_format=OutputFormat(str(self.get("format")).lower()),
                grid=self._grid(),
                samples=int(self._number("samples")),
                trials=int(self._number("trials")),
                seed=int(self._number("seed")),
                threads=thread_limit(),
            )
        except ValueError as e:
            raise ConfigError(str(e)) from e

    def _number(self, key: str) -> float:
        raw = self.get(key)
        try:
            return float(raw)
        except (TypeError, ValueError):
            raise ConfigError(f"Setting '{key}' must be a number, got {raw!r}.")

    def _k_list(self) -> List[float]:
        raw = self.get("k_list")
        if raw in (None, ""):
            return [self._number("k")]
        items = raw if isinstance(raw, (list, tuple)) else str(raw).split(",")
        try:
            return [float(item) for item in items if str(item).strip()]
        except ValueError:
            raise ConfigError(f"k-list must be comma-separated numbers, got {raw!r}.")

    def _grid(self) -> Optional[Tuple[float, float, int]]:
        raw = self.get("grid")
        if raw in (None, ""):
            return None
        parts = str(raw).split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid must be start:stop:count, got {raw!r}.")
        return float(parts[0]), float(parts[1]), int(parts[2])


def _normalise_key(key: str) -> str:
    return key.strip().replace("-", "_")


def thread_limit() -> int:
    """Worker-pool cap from ADIAVAC_THREADS; 0 means automatic."""
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}.")
    if value < 0:
        raise ConfigError(f"{THREADS_ENV} must be non-negative, got {value}.")
    return value
