"""
Command-line front end: towers, mode trajectories, Bogoliubov sweeps, probe
reports and the invariant check suite.

Exit codes: 0 success, 2 Hadamard violation, 3 order exhausted,
4 I/O or parse error, 5 invariant failure.
"""

from __future__ import annotations

import argparse
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, TypeVar

import numpy as np
import pandas as pd

from src.core.adiabatic import initial_data_for, omega_squared_series, omega_tower
from src.core.config import Command, Config, RunConfig
from src.core.cosmology import ModeSpec
from src.core.errors import AdiavacError, ConfigError, HadamardViolation, OrderExhausted
from src.core.logger import setup_logger
from src.core.modes import integrate_mode, particle_number
from src.core.probe import probe_report
from src.ui import writers
from src.ui.checks import all_passed, run_checks

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_HADAMARD = 2
EXIT_ORDER = 3
EXIT_IO = 4
EXIT_INVARIANT = 5

T = TypeVar("T")

# flags that map one-to-one onto configuration keys
_MODEL_FLAGS = ("A", "B", "H", "p", "t_offset", "tau", "knots")
_RUN_FLAGS = ("model", "kappa", "k", "k_list", "m", "t0", "t1", "order", "tol", "output",
              "format", "grid", "samples", "trials", "seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adiavac",
        description="Adiabatic vacuum states of a Klein-Gordon field on Robertson-Walker "
                    "backgrounds.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    helps = {
        Command.TOWER: "adiabatic frequencies Omega^[0..n] at t0 with validity flags",
        Command.MODES: "integrate one mode from order-n data and write its trajectory",
        Command.BOGOLIUBOV: "particle numbers |beta_k|^2 between t0 and t1 over --k-list",
        Command.PROBE: "JSON report on a'' recovery, the f_n chain and the maximal order",
        Command.CHECK: "run the invariant suite; exit 5 on any violation",
    }
    for command, text in helps.items():
        _add_options(subparsers.add_parser(command.value, help=text, description=text))
    return parser


def _add_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="key=value run file; flags override it")

    model = parser.add_argument_group("scale factor")
    model.add_argument("--model", help="constant | desitter | power_law | tanh | spline")
    model.add_argument("--A", type=float, help="constant value / amplitude / tanh offset")
    model.add_argument("--B", type=float, help="tanh step height")
    model.add_argument("--H", type=float, help="de Sitter expansion rate")
    model.add_argument("--p", type=float, help="power-law exponent")
    model.add_argument("--t-offset", type=float, help="power-law time offset")
    model.add_argument("--tau", type=float, help="tanh transition time")
    model.add_argument("--knots", help="two-column (t, a) CSV for the spline model")

    mode = parser.add_argument_group("mode")
    mode.add_argument("--kappa", type=int, choices=(-1, 0, 1), help="spatial curvature sign")
    mode.add_argument("--k", type=float, help="mode number")
    mode.add_argument("--k-list", help="comma-separated mode numbers, run in parallel")
    mode.add_argument("--m", type=float, help="field mass")

    run = parser.add_argument_group("run")
    run.add_argument("--t0", type=float, help="initial (adiabatic data) time")
    run.add_argument("--t1", type=float, help="final time for integrations")
    run.add_argument("--order", type=int, help="adiabatic order n (probe: order cap)")
    run.add_argument("--tol", type=float, help="integration tolerance (default 1e-10)")
    run.add_argument("--grid", help="start:stop:count grid for the global positivity probe")
    run.add_argument("--samples", type=int, help="trajectory output samples")
    run.add_argument("--trials", type=int, help="random trials for the positivity inequality")
    run.add_argument("--seed", type=int, help="random seed")
    run.add_argument("--output", help="output path (default: standard output)")
    run.add_argument("--format", choices=("csv", "json"), help="table format")

    logs = parser.add_mutually_exclusive_group()
    logs.add_argument("--verbose", action="store_true", help="debug diagnostics")
    logs.add_argument("--quiet", action="store_true", help="warnings and errors only")
    parser.add_argument("--log-file", type=Path, help="also write diagnostics to this file")


def _flag_values(args: argparse.Namespace) -> Dict[str, object]:
    return {key: getattr(args, key, None) for key in _MODEL_FLAGS + _RUN_FLAGS}


def _pool_map(fn: Callable[[ModeSpec], T], specs: Sequence[ModeSpec], threads: int) -> List[T]:
    """Per-mode fan-out; results come back in input order."""
    if len(specs) == 1:
        return [fn(specs[0])]
    with ThreadPoolExecutor(max_workers=threads or None) as pool:
        return list(pool.map(fn, specs))


# commands


def _tower_job(config: RunConfig) -> Callable[[ModeSpec], Tuple[pd.DataFrame, int]]:
    def job(spec: ModeSpec) -> Tuple[pd.DataFrame, int]:
        try:
            tower = omega_tower(config.model, spec, config.t0, config.order_n)
        except HadamardViolation as exc:
            logger.error("k=%s: %s", spec.k, exc)
            failure = {"kind": "HadamardViolation", "n": exc.order, "value": exc.value}
            return writers.tower_frame(spec.k, exc.partial, failure), EXIT_HADAMARD
        except OrderExhausted as exc:
            logger.error("k=%s: %s", spec.k, exc)
            failure = {"kind": "OrderExhausted", "n": exc.order, "value": None}
            return writers.tower_frame(spec.k, exc.partial, failure), EXIT_ORDER
        return writers.tower_frame(spec.k, tower), EXIT_OK

    return job


def _grid_output(path: Optional[Path]) -> Optional[Path]:
    return None if path is None else path.with_name(f"{path.stem}_grid{path.suffix}")


def run_tower(config: RunConfig) -> int:
    results = _pool_map(_tower_job(config), config.modes(), config.threads)
    frame = pd.concat([frame for frame, _ in results], ignore_index=True)
    writers.write_table(frame, config.output, config.output_format)
    code = next((code for _, code in results if code != EXIT_OK), EXIT_OK)

    if config.grid is not None:
        start, stop, count = config.grid
        times = np.linspace(start, stop, count)
        values = omega_squared_series(config.model, config.mode, times, config.order_n)
        writers.write_table(writers.grid_frame(times, values), _grid_output(config.output),
                            config.output_format)
        bad = np.flatnonzero(np.any(values <= 0, axis=1))
        if bad.size:
            logger.error("(Omega^[n])^2 <= 0 for some n <= %d at t=%s on the grid",
                         config.order_n, times[bad[0]])
            code = code or EXIT_HADAMARD
    return code


def run_modes(config: RunConfig) -> int:
    spec = config.mode
    init = initial_data_for(config.model, spec, config.t0, config.order_n)
    solution = integrate_mode(config.model, spec, init, config.t1, config.tol,
                              samples=config.samples)
    drift = solution.max_wronskian_error
    if drift > 10 * config.tol:
        logger.warning("Wronskian drift %.3e exceeds 10 * tol", drift)
    writers.write_table(writers.trajectory_frame(solution), config.output,
                        config.output_format)
    return EXIT_OK


def run_bogoliubov(config: RunConfig) -> int:
    def job(spec: ModeSpec) -> Dict[str, float]:
        pair = particle_number(config.model, spec, config.order_n, config.t0, config.t1,
                               config.tol)
        logger.debug("k=%s |beta|^2=%.6e", spec.k, pair.beta_squared)
        return {
            "k": spec.k, "order": config.order_n,
            "Re alpha": pair.alpha.real, "Im alpha": pair.alpha.imag,
            "Re beta": pair.beta.real, "Im beta": pair.beta.imag,
            "beta_squared": pair.beta_squared, "normalization": pair.normalization,
        }

    rows = _pool_map(job, config.modes(), config.threads)
    writers.write_table(writers.sweep_frame(rows), config.output, config.output_format)
    return EXIT_OK


def run_probe(config: RunConfig) -> int:
    report = probe_report(config.model, config.mode, config.t0, config.order_n)
    writers.write_text(writers.render_report(report.to_dict()), config.output)
    return EXIT_OK


def run_check(config: RunConfig) -> int:
    results = run_checks(config)
    writers.write_text("".join(result.line() + "\n" for result in results), config.output)
    return EXIT_OK if all_passed(results) else EXIT_INVARIANT


_HANDLERS: Dict[Command, Callable[[RunConfig], int]] = {
    Command.TOWER: run_tower,
    Command.MODES: run_modes,
    Command.BOGOLIUBOV: run_bogoliubov,
    Command.PROBE: run_probe,
    Command.CHECK: run_check,
}


def run(config: RunConfig) -> int:
    """Execute one command and return its exit status."""
    logger.info("Running %s on %s", config.command.value, config.model.label)
    return _HANDLERS[config.command](config)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    setup_logger(level=level, log_file=args.log_file)

    try:
        config = Config(args.config)
        config.load()
        config.update(_flag_values(args))
        return run(config.to_run_config(args.command))
    except HadamardViolation as exc:
        logger.error("%s", exc)
        return EXIT_HADAMARD
    except OrderExhausted as exc:
        logger.error("%s", exc)
        return EXIT_ORDER
    except ConfigError as exc:
        logger.error("%s", exc)
        return EXIT_IO
    except AdiavacError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code
    except OSError as exc:
        logger.error("I/O error: %s", exc)
        return EXIT_IO
