"""
Table and report emitters for the command-line front end.

CSV is written with a mandatory header row and 17 significant digits so that
every file parses back to the same values and re-emits byte-identically.
"""

from __future__ import annotations

import io
import json
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd

from src.core.adiabatic import AdiabaticFrequency
from src.core.config import OutputFormat
from src.core.errors import ConfigError
from src.core.modes import ModeSolution

FLOAT_FORMAT = "%.17g"

TRAJECTORY_COLUMNS = ["t", "Re T", "Im T", "Re Tdot", "Im Tdot", "wronskian_error"]
TOWER_COLUMNS = ["k", "n", "omega", "omega_squared", "H1", "H2", "H3"]
SWEEP_COLUMNS = ["k", "order", "Re alpha", "Im alpha", "Re beta", "Im beta", "beta_squared",
                 "normalization"]


def tower_frame(k: float, tower: Sequence[AdiabaticFrequency],
                failure: Optional[Dict[str, Any]] = None) -> pd.DataFrame:
    """One row per adiabatic order, plus a row for the failing order if any."""
    rows: List[Dict[str, Any]] = []
    for freq in tower:
        rows.append({"k": k, "n": freq.order_n, "omega": freq.omega,
                     "omega_squared": freq.omega_squared, **freq.flags})
    if failure is not None:
        value = failure.get("value")
        rows.append({
            "k": k,
            "n": failure["n"],
            "omega": np.nan,
            "omega_squared": np.nan if value is None else value,
            "H1": False,
            "H2": False,
            "H3": False,
        })
    return pd.DataFrame(rows, columns=TOWER_COLUMNS)


def trajectory_frame(solution: ModeSolution) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "t": solution.times,
            "Re T": solution.T.real,
            "Im T": solution.T.imag,
            "Re Tdot": solution.T_dot.real,
            "Im Tdot": solution.T_dot.imag,
            "wronskian_error": solution.wronskian_error,
        },
        columns=TRAJECTORY_COLUMNS,
    )


def grid_frame(times: Sequence[float], values: np.ndarray) -> pd.DataFrame:
    """(Omega^[n])^2 sampled on a time grid; one column per order."""
    frame = pd.DataFrame(values, columns=[f"omega_squared_{n}" for n in range(values.shape[1])])
    frame.insert(0, "t", np.asarray(times, dtype=float))
    return frame


def sweep_frame(rows: Iterable[Dict[str, Any]]) -> pd.DataFrame:
    return pd.DataFrame(list(rows), columns=SWEEP_COLUMNS)


def render_table(frame: pd.DataFrame, fmt: OutputFormat) -> str:
    if fmt is OutputFormat.JSON:
        records = frame.to_dict(orient="records")
        return json.dumps(_plain(records), indent=2) + "\n"
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return buffer.getvalue()


def write_text(text: str, path: Optional[Path]) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as e:
        raise ConfigError(f"Cannot write {path}: {e}") from e


def write_table(frame: pd.DataFrame, path: Optional[Path], fmt: OutputFormat) -> None:
    write_text(render_table(frame, fmt), path)


def read_table(path: Path, fmt: OutputFormat) -> pd.DataFrame:
    """Parse a table written by write_table back into a frame."""
    if fmt is OutputFormat.JSON:
        return pd.DataFrame(json.loads(path.read_text()))
    return pd.read_csv(path, float_precision="round_trip")


def render_report(report: Dict[str, Any]) -> str:
    return json.dumps(_plain(report), indent=2) + "\n"


def _plain(value: Any) -> Any:
    """Convert numpy scalars so json emits plain numbers."""
    if isinstance(value, dict):
        return {key: _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value
