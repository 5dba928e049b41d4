"""
Invariant suite behind the ``check`` command.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, List, Union

from src.core.adiabatic import initial_data_for, omega_tower
from src.core.cosmology import ModeSpec, ScaleFactorKind
from src.core.config import RunConfig
from src.core.errors import AdiavacError
from src.core.modes import (
    integrate_mode,
    particle_number,
    quasifree_positivity_check,
    two_point_matrix,
)
from src.core.probe import (
    affine_decompose,
    fn_chain,
    max_adiabatic_order,
    omega1_squared,
    recover_addot,
    recovery_tolerance,
)

logger = logging.getLogger(__name__)

DEFAULT_SPAN = 10.0
MEASURED_RTOL = 1e-6
NORMALIZATION_TOL = 1e-8

Suite = Callable[[RunConfig, ModeSpec], Union["CheckResult", List["CheckResult"]]]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def _end_time(config: RunConfig) -> float:
    return config.t1 if config.t1 is not None else config.t0 + DEFAULT_SPAN


def _static_fixed_point(config: RunConfig, spec: ModeSpec) -> CheckResult:
    tower = omega_tower(config.model, spec, config.t0, 4)
    omega = tower[0].omega
    gap = max(abs(freq.omega - omega) for freq in tower)
    return CheckResult("static fixed point", gap <= 1e-12, f"max |Omega^[n] - omega| = {gap:.3e}")


def _initial_wronskian(config: RunConfig, spec: ModeSpec) -> CheckResult:
    init = initial_data_for(config.model, spec, config.t0, config.order_n)
    gap = abs(init.wronskian() + 1j)
    return CheckResult("initial-data Wronskian", gap <= 1e-12, f"|W + i| = {gap:.3e}")


def _integration_checks(config: RunConfig, spec: ModeSpec) -> List[CheckResult]:
    t1 = _end_time(config)
    init = initial_data_for(config.model, spec, config.t0, config.order_n)
    solution = integrate_mode(config.model, spec, init, t1, config.tol, samples=config.samples)
    drift = solution.max_wronskian_error
    results = [CheckResult("Wronskian drift", drift <= 10 * config.tol,
                           f"max |Im(conj(q) p) + 1/2| = {drift:.3e} (limit {10 * config.tol:.1e})")]

    worst_det, hermitian, psd = 0.0, True, True
    for S in solution.two_point_matrices():
        worst_det = max(worst_det, abs(S.det) / max(S.trace ** 2, 1.0))
        hermitian &= S.is_hermitian()
        psd &= S.is_positive_semidefinite()
    results.append(CheckResult("S(k) invariants", hermitian and psd and worst_det <= 1e-12,
                               f"hermitian={hermitian} psd={psd} max |det| = {worst_det:.3e}"))

    report = quasifree_positivity_check(two_point_matrix(init.q, init.p), config.trials,
                                        config.seed)
    results.append(CheckResult("quasifree positivity", report.passed,
                               f"{report.trials} trials, max violation {report.max_violation:.3e}"))
    return results


def _time_reversal(config: RunConfig, spec: ModeSpec) -> CheckResult:
    t1 = _end_time(config)
    init = initial_data_for(config.model, spec, config.t0, config.order_n)
    forward = integrate_mode(config.model, spec, init, t1, config.tol, samples=2)
    back = integrate_mode(config.model, spec, forward.data_at(t1), config.t0, config.tol,
                          samples=2)
    T, T_dot = back.state_at(config.t0)
    p = init.a0 ** 3 * T_dot
    gap = (abs(T - init.q) + abs(p - init.p)) / (abs(init.q) + abs(init.p))
    limit = 100 * config.tol
    return CheckResult("time reversal", gap <= limit,
                       f"t0 -> {t1:g} -> t0 relative gap {gap:.3e} (limit {limit:.1e})")


def _bogoliubov_normalization(config: RunConfig, spec: ModeSpec) -> CheckResult:
    pair = particle_number(config.model, spec, config.order_n, config.t0, _end_time(config),
                           config.tol)
    gap = abs(pair.normalization - 1.0)
    # |alpha|^2 - |beta|^2 - 1 is twice the Wronskian drift of the evolved mode
    limit = max(NORMALIZATION_TOL, 20 * config.tol)
    return CheckResult("Bogoliubov normalization", gap <= limit,
                       f"||alpha|^2 - |beta|^2 - 1| = {gap:.3e} (limit {limit:.1e}), "
                       f"|beta|^2 = {pair.beta_squared:.6g}")


def _probe_checks(config: RunConfig, spec: ModeSpec) -> List[CheckResult]:
    a_jet = config.model.jet(config.t0, 2)
    a, a_dot, a_ddot = a_jet.value, a_jet.derivative(1), a_jet.derivative(2)
    decomposition = affine_decompose(a, a_dot, spec)
    # evaluated independently of the decomposition it is inverted through
    omega1_sq = omega1_squared(a, a_dot, a_ddot, spec)
    recovered = recover_addot(omega1_sq, a, a_dot, spec)
    limit = recovery_tolerance(omega1_sq, decomposition.slope)
    results = [
        CheckResult("affine dependence on a''",
                    decomposition.slope < 0 and decomposition.quadratic_residual <= 1e-12,
                    f"slope {decomposition.slope:.6g}, residual "
                    f"{decomposition.quadratic_residual:.3e}"),
        CheckResult("a'' recovery", abs(recovered - a_ddot) <= limit,
                    f"|recovered - true| = {abs(recovered - a_ddot):.3e} (limit {limit:.1e})"),
    ]
    order = max_adiabatic_order(config.model, spec, config.t0, max(config.order_n, 1))
    if order.max_order >= 1:
        chain = fn_chain(config.model, spec, config.t0, order.max_order + 1)
        gap = chain.max_relative_gap(chain.closed_form)
        results.append(CheckResult("f_n recursion vs product", gap <= 1e-10,
                                   f"relative gap {gap:.3e}"))
        measured_gap = chain.max_relative_gap(chain.measured)
        results.append(CheckResult("f_n recursion vs direct measurement",
                                   measured_gap <= MEASURED_RTOL,
                                   f"relative gap {measured_gap:.3e}"))
    return results


def run_checks(config: RunConfig) -> List[CheckResult]:
    """Evaluate every applicable invariant for each mode of the configuration."""
    results: List[CheckResult] = []
    for spec in config.modes():
        suites: List[Suite] = [_initial_wronskian, _integration_checks, _time_reversal,
                              _bogoliubov_normalization, _probe_checks]
        if config.model.kind is ScaleFactorKind.CONSTANT:
            suites.insert(0, _static_fixed_point)
        for suite in suites:
            try:
                outcome = suite(config, spec)
            except (AdiavacError, ValueError) as exc:
                outcome = CheckResult(type(exc).__name__, False, str(exc))
            for result in outcome if isinstance(outcome, list) else [outcome]:
                logger.debug("k=%s %s", spec.k, result.line())
                results.append(CheckResult(f"k={spec.k} {result.name}", result.passed,
                                           result.detail))
    return results


def all_passed(results: List[CheckResult]) -> bool:
    return bool(results) and all(result.passed for result in results)
