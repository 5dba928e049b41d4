"""
Numerical probes of the smoothness argument behind the adiabatic iteration.

(Omega^[1])^2 is affine in a''(t) at fixed (a, a'), so a'' can be recovered
from Omega^[1].  More generally (Omega^[n-1])^2 is affine in a^(2n-2) with a
coefficient f_n obeying

    f_{n+1} = -1/4 f_n / (Omega^[n-1])^2

whose product form must never vanish while every (Omega^[i])^2 > 0.  f_2 is
taken as the measured coefficient of a'' in (Omega^[1])^2.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from src.core import jets
from src.core.adiabatic import (
    omega_tower,
    required_jet_order,
    squared_tower_values,
)
from src.core.cosmology import ModeSpec, ScaleFactorModel
from src.core.errors import DegenerateSlope, HadamardViolation, NotAffine, OrderExhausted
from src.core.jets import Jet

logger = logging.getLogger(__name__)

AFFINE_RTOL = 1e-9
PERTURBATION = 1e-3
RECOVERY_ATOL = 1e-9


@dataclass(frozen=True)
class AffineDecomposition:
    """(Omega^[1])^2 = slope * a'' + intercept at fixed (a, a')."""

    slope: float
    intercept: float
    quadratic_residual: float = 0.0

    def at(self, a_ddot: float) -> float:
        return self.slope * a_ddot + self.intercept


@dataclass(frozen=True)
class FnChain:
    """f_2..f_n at one point, evaluated three independent ways."""

    values: List[float]
    closed_form: List[float]
    measured: List[float]
    omegas: List[float]

    @property
    def n(self) -> int:
        return len(self.values) + 1

    def max_relative_gap(self, other: List[float]) -> float:
        ref = np.asarray(self.values)
        gap = np.abs(np.asarray(other) - ref) / np.maximum(np.abs(ref), np.finfo(float).tiny)
        return float(np.max(gap, initial=0.0))


@dataclass(frozen=True)
class AdiabaticOrderReport:
    """Largest adiabatic order reachable at t0, and why the next one is not."""

    max_order: int
    failure_kind: Optional[str] = None
    failure_n: Optional[int] = None
    failure_value: Optional[float] = None
    omegas_squared: List[float] = field(default_factory=list)

    @property
    def failure(self) -> Optional[Dict[str, Any]]:
        if self.failure_kind is None:
            return None
        return {"kind": self.failure_kind, "n": self.failure_n, "value": self.failure_value}


def point_jet(a: float, a_dot: float, a_ddot: float) -> Jet:
    return Jet.from_derivatives(0.0, [a, a_dot, a_ddot])


def first_iterate_squared(a_jet: Jet, spec: ModeSpec) -> float:
    """(Omega^[1])^2 at the base point of an order >= 2 scale-factor jet."""
    return float(squared_tower_values(a_jet.truncate(2), spec, 1)[1])


def omega1_squared(a: float, a_dot: float, a_ddot: float, spec: ModeSpec) -> float:
    return first_iterate_squared(point_jet(a, a_dot, a_ddot), spec)


def closed_form_slope(a: float, spec: ModeSpec) -> float:
    """-3/(2a) + E/(2 a^3 omega^2); negative whenever E + m^2 > 0."""
    w2 = spec.omega_squared(a)
    return -3.0 / (2.0 * a) + spec.energy / (2.0 * a ** 3 * w2)


def affine_decompose(a: float, a_dot: float, spec: ModeSpec) -> AffineDecomposition:
    """Fit (Omega^[1])^2 through a'' in {0, +h, -h} and verify zero curvature."""
    if not a > 0:
        raise ValueError(f"Scale factor must be positive, got a={a}.")
    w2 = spec.omega_squared(a)
    if not w2 > 0:
        raise ValueError("omega^2 vanishes identically (E = m = 0); nothing to decompose.")
    # the shift must move (Omega^[1])^2 by a fixed fraction of its size
    h = PERTURBATION * max(1.0, a * w2, a_dot * a_dot / a)
    f0 = omega1_squared(a, a_dot, 0.0, spec)
    f_plus = omega1_squared(a, a_dot, h, spec)
    f_minus = omega1_squared(a, a_dot, -h, spec)

    scale = max(1.0, w2, (a_dot / a) ** 2, abs(f0), abs(f_plus), abs(f_minus))
    residual = abs(f_plus - 2.0 * f0 + f_minus) / scale
    if residual > AFFINE_RTOL:
        raise NotAffine(
            f"(Omega^[1])^2 curves in a'' at a={a}, a'={a_dot}: residual {residual:.3e}"
        )
    return AffineDecomposition((f_plus - f_minus) / (2.0 * h), f0, residual)


def recover_addot(omega1_sq: float, a: float, a_dot: float, spec: ModeSpec) -> float:
    """Invert the affine relation: a'' from (Omega^[1])^2, a and a'."""
    decomposition = affine_decompose(a, a_dot, spec)
    if decomposition.slope == 0.0 or not math.isfinite(decomposition.slope):
        raise DegenerateSlope(f"Coefficient of a'' vanishes at a={a}, a'={a_dot}.")
    return (omega1_sq - decomposition.intercept) / decomposition.slope


def recovery_tolerance(omega1_sq: float, slope: float) -> float:
    """Round-trip bound on a'': fixed floor plus the rounding of (Omega^[1])^2 itself."""
    return RECOVERY_ATOL + 16.0 * np.finfo(float).eps * abs(omega1_sq) / abs(slope)


def _measured_top_coefficient(a_jet: Jet, spec: ModeSpec, j: int, expected: float) -> float:
    """Coefficient of a^(2j-2) in (Omega^[j-1])^2 by perturbing that derivative.

    ``expected`` sizes the shift so that it moves the frequency by a fixed
    fraction of its value.
    """
    order = 2 * j - 2
    base = a_jet.truncate(order)
    top = base.derivative(order)

    def evaluate(shift: float) -> float:
        derivs = base.derivatives()
        derivs[order] = top + shift
        return float(squared_tower_values(Jet.from_derivatives(base.base_point, derivs),
                                          spec, j - 1)[j - 1])

    size = abs(evaluate(0.0)) / max(abs(expected), np.finfo(float).tiny)
    h = PERTURBATION * max(1.0, abs(top), size)
    return (evaluate(h) - evaluate(-h)) / (2.0 * h)


def fn_chain(model: ScaleFactorModel, spec: ModeSpec, t0: float, n: int) -> FnChain:
    """f_2..f_n at t0 by recursion, by the closed product and by direct measurement."""
    if n < 2:
        raise ValueError(f"The f_n chain starts at n = 2, got {n}.")
    tower = omega_tower(model, spec, t0, n - 1)
    a_jet = model.jet(t0, int(min(required_jet_order(n - 1), model.smoothness_class)))
    omegas = [freq.omega_squared for freq in tower[1 : n - 1]]

    f2 = affine_decompose(a_jet.value, a_jet.derivative(1), spec).slope
    values = [f2]
    for omega_sq in omegas:
        values.append(-0.25 * values[-1] / omega_sq)

    closed = [f2]
    for j in range(3, n + 1):
        count = j - 2
        closed.append((-0.25) ** count * f2 * float(np.prod(1.0 / np.asarray(omegas[:count]))))

    measured = [_measured_top_coefficient(a_jet, spec, j, expected)
                for j, expected in zip(range(2, n + 1), values)]
    logger.debug("f chain at t0=%s: %s", t0, values)
    return FnChain(values=values, closed_form=closed, measured=measured, omegas=omegas)


def max_adiabatic_order(model: ScaleFactorModel, spec: ModeSpec, t0: float,
                        n_cap: int) -> AdiabaticOrderReport:
    """Largest n <= n_cap with (Omega^[n])^2(t0) > 0 inside the jet budget."""
    try:
        tower = omega_tower(model, spec, t0, n_cap)
    except HadamardViolation as exc:
        return AdiabaticOrderReport(
            max_order=len(exc.partial) - 1,
            failure_kind="HadamardViolation",
            failure_n=exc.order,
            failure_value=exc.value,
            omegas_squared=[f.omega_squared for f in exc.partial] + [exc.value],
        )
    except OrderExhausted as exc:
        return AdiabaticOrderReport(
            max_order=len(exc.partial) - 1,
            failure_kind="OrderExhausted",
            failure_n=exc.order,
            omegas_squared=[f.omega_squared for f in exc.partial],
        )
    return AdiabaticOrderReport(max_order=n_cap,
                                omegas_squared=[f.omega_squared for f in tower])


@dataclass(frozen=True)
class ProbeReport:
    """Everything the probe command writes, in report order."""

    model: Dict[str, Any]
    mode: Dict[str, float]
    t0: float
    max_order: int
    failure: Optional[Dict[str, Any]]
    fn_chain: List[Dict[str, float]]
    slope: float
    intercept: float
    closed_form_slope: float
    printed_f2: float
    printed_denominator: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def probe_report(model: ScaleFactorModel, spec: ModeSpec, t0: float, n_cap: int) -> ProbeReport:
    order_report = max_adiabatic_order(model, spec, t0, n_cap)
    a_jet = model.jet(t0, int(min(2, model.smoothness_class)))
    a, a_dot = a_jet.value, a_jet.derivative(1)
    decomposition = affine_decompose(a, a_dot, spec)

    chain_rows: List[Dict[str, float]] = []
    n_chain = order_report.max_order + 1
    if n_chain >= 2:
        chain = fn_chain(model, spec, t0, n_chain)
        for j, (value, closed, measured) in enumerate(
            zip(chain.values, chain.closed_form, chain.measured), start=2
        ):
            chain_rows.append({"n": j, "recursion": value, "closed_form": closed,
                               "measured": measured})

    w2 = spec.omega_squared(a)
    energy = spec.energy
    return ProbeReport(
        model=model.describe(),
        mode=spec.as_dict(),
        t0=float(t0),
        max_order=order_report.max_order,
        failure=order_report.failure,
        fn_chain=chain_rows,
        slope=decomposition.slope,
        intercept=decomposition.intercept,
        closed_form_slope=closed_form_slope(a, spec),
        # the two printed forms disagree in sign; both kept for comparison
        printed_f2=w2 * (3.0 * a ** 5 - energy * a ** 3),
        printed_denominator=2.0 * w2 * (3.0 * a ** 5 + energy * a ** 3),
    )
