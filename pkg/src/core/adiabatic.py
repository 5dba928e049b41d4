"""
Adiabatic frequency iteration and adiabatic initial data.

    (Omega^[0])^2   = omega^2 = E/a^2 + m^2
    (Omega^[n+1])^2 = omega^2 - 3/4 (a'/a)^2 - 3/2 a''/a
                      + 3/4 (Omega'/Omega)^2 - 1/2 Omega''/Omega

Every quantity is carried as a jet at the base point t0, so each iteration
consumes exactly two derivative orders.  A frequency is usable (twice
differentiable) while its jet order is at least two.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np

from src.core import jets
from src.core.cosmology import ModeSpec, ScaleFactorModel, omega_squared_jet
from src.core.errors import HadamardViolation, OrderExhausted, PositivityLoss
from src.core.jets import Jet

logger = logging.getLogger(__name__)

# derivative orders needed to keep the top frequency twice differentiable
USABLE_ORDER = 2


@dataclass(frozen=True, eq=False)
class AdiabaticFrequency:
    """Omega_k^[n] as a jet at t0."""

    omega_jet: Jet
    order_n: int
    mode: ModeSpec

    def __post_init__(self) -> None:
        if not self.omega_jet.value > 0:
            raise HadamardViolation(self.order_n, self.omega_jet.value ** 2)

    @property
    def jet_budget_consumed(self) -> int:
        return 2 * self.order_n

    @property
    def t0(self) -> float:
        return self.omega_jet.base_point

    @property
    def omega(self) -> float:
        return self.omega_jet.value

    @property
    def omega_squared(self) -> float:
        return self.omega_jet.value ** 2

    @property
    def flags(self) -> Dict[str, bool]:
        """Validity of (H1) existence, (H2) twice differentiable, (H3) positivity."""
        return {
            "H1": True,
            "H2": self.omega_jet.order >= USABLE_ORDER,
            "H3": self.omega_jet.value > 0,
        }


@dataclass(frozen=True)
class AdiabaticInitialData:
    """Mode value and velocity imposed at t0 by the order-n frequency."""

    T0: complex
    T0_dot: complex
    t0: float
    order_n: int
    a0: float

    @property
    def q(self) -> complex:
        return self.T0

    @property
    def p(self) -> complex:
        return self.a0 ** 3 * self.T0_dot

    def wronskian(self) -> complex:
        """conj(q) p - q conj(p); equals -i for normalised data."""
        q, p = self.q, self.p
        return q.conjugate() * p - q * p.conjugate()


def initial_frequency(a: Jet, spec: ModeSpec) -> AdiabaticFrequency:
    """Omega^[0] = omega."""
    w2 = omega_squared_jet(a, spec)
    if w2.value <= 0:
        raise HadamardViolation(0, w2.value)
    return AdiabaticFrequency(jets.sqrt(w2), 0, spec)


def next_omega_squared(prev: Jet, a: Jet, spec: ModeSpec) -> Jet:
    """(Omega^[n+1])^2 as a jet, without taking the square root."""
    if prev.order < 2:
        raise OrderExhausted(
            f"Omega jet of order {prev.order} has no second derivative at t0={prev.base_point}."
        )
    a_dot = jets.derivative_jet(a)
    a_ddot = jets.derivative_jet(a_dot)
    omega_dot = jets.derivative_jet(prev)
    omega_ddot = jets.derivative_jet(omega_dot)

    hubble = a_dot / a
    log_rate = omega_dot / prev
    return (
        omega_squared_jet(a, spec)
        - 0.75 * hubble * hubble
        - 1.5 * (a_ddot / a)
        + 0.75 * log_rate * log_rate
        - 0.5 * (omega_ddot / prev)
    )


def iterate_omega(prev: AdiabaticFrequency, a: Jet, spec: ModeSpec) -> AdiabaticFrequency:
    """One step of the frequency iteration: Omega^[n] -> Omega^[n+1]."""
    squared = next_omega_squared(prev.omega_jet, a, spec)
    order_n = prev.order_n + 1
    if squared.value <= 0:
        raise HadamardViolation(order_n, squared.value)
    return AdiabaticFrequency(jets.sqrt(squared), order_n, spec)


def required_jet_order(n_max: int) -> int:
    return 2 * n_max + USABLE_ORDER


def omega_tower(a_model: ScaleFactorModel, spec: ModeSpec, t0: float,
                n_max: int) -> List[AdiabaticFrequency]:
    """[Omega^[0], ..., Omega^[n_max]] at t0.

    Errors carry the failing adiabatic order and the partial tower.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be non-negative, got {n_max}.")
    demand = required_jet_order(n_max)
    # finite-regularity models get what they have; the loop reports the shortfall
    a = a_model.jet(t0, int(min(demand, a_model.smoothness_class)))

    tower: List[AdiabaticFrequency] = []
    try:
        current = initial_frequency(a, spec)
        tower.append(current)
        for n in range(1, n_max + 1):
            if current.omega_jet.order - 2 < USABLE_ORDER:
                raise OrderExhausted(
                    f"adiabatic order {n} needs a jet of order {required_jet_order(n)} "
                    f"but {a_model.label} is only C^{int(a_model.smoothness_class)}",
                    order=n,
                    partial=list(tower),
                )
            current = iterate_omega(current, a, spec)
            tower.append(current)
    except HadamardViolation as exc:
        logger.warning("Tower for k=%s at t0=%s stops: %s", spec.k, t0, exc)
        exc.partial = list(tower)
        raise
    logger.debug("Tower for k=%s at t0=%s: %s", spec.k, t0, [f.omega for f in tower])
    return tower


def adiabatic_initial_data(freq: AdiabaticFrequency, a: Jet, t0: float) -> AdiabaticInitialData:
    """(T, T') at t0 from the order-n frequency, with zero accumulated phase."""
    if freq.omega_jet.order < 1:
        raise OrderExhausted(f"Omega^[{freq.order_n}] carries no first derivative.",
                             order=freq.order_n)
    if a.order < 1:
        raise OrderExhausted("Scale-factor jet carries no first derivative.")
    omega = freq.omega_jet.value
    omega_dot = freq.omega_jet.derivative(1)
    a0, a_dot = a.value, a.derivative(1)
    if not a0 > 0:
        raise PositivityLoss(f"Scale factor a={a0} at t0={t0} is not positive.")

    T0 = 1.0 / (a0 ** 1.5 * math.sqrt(2.0 * omega))
    T0_dot = T0 * (-1j * omega - 1.5 * a_dot / a0 - omega_dot / (2.0 * omega))
    return AdiabaticInitialData(complex(T0), complex(T0_dot), float(t0), freq.order_n, a0)


def initial_data_for(model: ScaleFactorModel, spec: ModeSpec, t0: float,
                     order_n: int) -> AdiabaticInitialData:
    """Build the tower up to ``order_n`` and return its adiabatic initial data."""
    tower = omega_tower(model, spec, t0, order_n)
    a = model.jet(t0, int(min(required_jet_order(order_n), model.smoothness_class)))
    return adiabatic_initial_data(tower[-1], a, t0)


def squared_tower_values(a: Jet, spec: ModeSpec, n_max: int) -> np.ndarray:
    """(Omega^[n])^2 at the base point for n = 0..n_max.

    Unlike omega_tower this never raises: entries past a Hadamard violation or
    beyond the jet budget are NaN, and the violating value itself is kept.
    """
    values = np.full(n_max + 1, np.nan)
    squared = omega_squared_jet(a, spec)
    for n in range(n_max + 1):
        values[n] = squared.value
        if squared.value <= 0 or squared.order < 2 or n == n_max:
            break
        squared = next_omega_squared(jets.sqrt(squared), a, spec)
    return values


def omega_squared_series(model: ScaleFactorModel, spec: ModeSpec, times: Sequence[float],
                         n_max: int) -> np.ndarray:
    """Sample (Omega^[n])^2(t) on a grid; shape (len(times), n_max + 1).

    This is the global positivity probe: (H3) is otherwise only checked at t0.
    """
    order = int(min(2 * n_max, model.smoothness_class))
    rows = [squared_tower_values(model.jet(float(t), order), spec, n_max) for t in times]
    return np.vstack(rows) if rows else np.empty((0, n_max + 1))
