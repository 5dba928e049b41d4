"""
Mode functions, two-point matrices and Bogoliubov coefficients.

The mode equation  T'' + 3 (a'/a) T' + omega^2 T = 0  is integrated in the
canonical pair (q, p) = (T, a^3 T'):

    q' = p / a^3,    p' = -a^3 omega^2 q

so only a(t) itself is needed along the way and the Wronskian
conj(q) p - q conj(p) = -i is bilinear in the state.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from src.core.adiabatic import AdiabaticInitialData, initial_data_for
from src.core.cosmology import ModeSpec, ScaleFactorModel
from src.core.errors import ModeMismatch, PositivityLoss, StepFailure, WronskianBroken

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
TOL_RANGE = (1e-13, 1e-3)
STEPS_PER_PERIOD = 20
WRONSKIAN_TOL = 1e-8
# the integrator runs tighter than the requested tolerance so that the
# accumulated Wronskian drift over a long span stays within 10 * tol
_TIGHTENING = 1e-2
_RTOL_FLOOR = 100 * np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class ModeSolution:
    """Time series of one mode function and its canonical momentum."""

    times: np.ndarray
    T: np.ndarray
    T_dot: np.ndarray
    mode: ModeSpec
    order_n: int
    t0: float
    model: ScaleFactorModel
    a: np.ndarray
    dense: Optional[Any] = field(default=None, repr=False)

    @property
    def provenance(self) -> Tuple[int, float]:
        return self.order_n, self.t0

    @property
    def q(self) -> np.ndarray:
        return self.T

    @property
    def p(self) -> np.ndarray:
        return self.a ** 3 * self.T_dot

    @property
    def wronskian_error(self) -> np.ndarray:
        """|Im(conj(q) p) + 1/2| at every stored time."""
        return np.abs(np.imag(np.conj(self.q) * self.p) + 0.5)

    @property
    def max_wronskian_error(self) -> float:
        return float(np.max(self.wronskian_error))

    def state_at(self, t: float) -> Tuple[complex, complex]:
        """(T, T') at any t inside the integrated span."""
        lo, hi = sorted((self.times[0], self.times[-1]))
        if self.dense is not None and lo <= t <= hi:
            y = self.dense(t)
            a = float(self.model.value(t))
            q, p = complex(y[0], y[1]), complex(y[2], y[3])
            return q, p / a ** 3
        hits = np.flatnonzero(np.isclose(self.times, t, rtol=0.0, atol=1e-12))
        if hits.size == 0:
            raise ValueError(f"t={t} is outside the stored span [{lo}, {hi}].")
        i = int(hits[0])
        return complex(self.T[i]), complex(self.T_dot[i])

    def data_at(self, t: float) -> AdiabaticInitialData:
        """Restart data at t, e.g. to integrate back again."""
        T, T_dot = self.state_at(t)
        return AdiabaticInitialData(T, T_dot, float(t), self.order_n, float(self.model.value(t)))

    def two_point_matrices(self) -> List["TwoPointMatrix"]:
        return [two_point_matrix(q, p) for q, p in zip(self.q, self.p)]


@dataclass(frozen=True, eq=False)
class TwoPointMatrix:
    """S(k) = [[|p|^2, -q conj(p)], [-conj(q) p, |q|^2]]."""

    S: np.ndarray

    @property
    def det(self) -> complex:
        return complex(np.linalg.det(self.S))

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.S)))

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.S)

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.S, self.S.conj().T, rtol=0.0, atol=atol))

    def is_positive_semidefinite(self, atol: float = 1e-12) -> bool:
        return bool(np.all(self.eigenvalues >= -atol))


@dataclass(frozen=True)
class BogoliubovPair:
    """Coefficients expanding mode b as alpha * a + beta * conj(a)."""

    alpha: complex
    beta: complex

    @property
    def beta_squared(self) -> float:
        return abs(self.beta) ** 2

    @property
    def normalization(self) -> float:
        """|alpha|^2 - |beta|^2, which is 1 for normalised modes."""
        return abs(self.alpha) ** 2 - abs(self.beta) ** 2

    def compose(self, then: "BogoliubovPair") -> "BogoliubovPair":
        """Coefficients a -> c from self (a -> b) followed by ``then`` (b -> c)."""
        alpha = then.alpha * self.alpha + then.beta * self.beta.conjugate()
        beta = then.alpha * self.beta + then.beta * self.alpha.conjugate()
        return BogoliubovPair(alpha, beta)


@dataclass(frozen=True)
class PositivityReport:
    """Outcome of the quasifree-state positivity inequality test."""

    trials: int
    max_violation: float
    max_ratio: float

    @property
    def passed(self) -> bool:
        return self.max_violation <= 1e-10


# integration


def _check_tol(tol: float) -> None:
    lo, hi = TOL_RANGE
    if not lo <= tol <= hi:
        raise ValueError(f"Integration tolerance must lie in [{lo}, {hi}], got {tol}.")


def _sample_scale_factor(model: ScaleFactorModel, t0: float, t_end: float) -> np.ndarray:
    for t in (t0, t_end):
        if not model.in_domain(t):
            raise PositivityLoss(f"t={t} lies outside the domain of {model.label}.")
    a = np.asarray(model.value(np.linspace(t0, t_end, 2049)), dtype=float)
    if not np.all(a > 0):
        raise PositivityLoss(f"{model.label} is not positive on [{t0}, {t_end}].")
    return a


def _max_step(spec: ModeSpec, a_samples: np.ndarray) -> float:
    omega_max = math.sqrt(spec.omega_squared(float(np.min(a_samples))))
    if omega_max == 0.0:
        return np.inf
    return 2.0 * math.pi / omega_max / STEPS_PER_PERIOD


def _canonical_rhs(model: ScaleFactorModel, spec: ModeSpec):
    energy, m2 = spec.energy, spec.m ** 2

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        a = float(model.value(t))
        if a <= 0:
            raise PositivityLoss(f"a({t}) = {a} <= 0 for {model.label}.")
        a3 = a ** 3
        w2 = energy / (a * a) + m2
        return np.array([y[2] / a3, y[3] / a3, -a3 * w2 * y[0], -a3 * w2 * y[1]])

    return rhs


def _solution_from_canonical(times: np.ndarray, y: np.ndarray, model: ScaleFactorModel,
                             spec: ModeSpec, init: AdiabaticInitialData,
                             dense: Optional[Any] = None) -> ModeSolution:
    a = np.asarray(model.value(times), dtype=float)
    q = y[0] + 1j * y[1]
    p = y[2] + 1j * y[3]
    return ModeSolution(
        times=times, T=q, T_dot=p / a ** 3, mode=spec, order_n=init.order_n,
        t0=init.t0, model=model, a=a, dense=dense,
    )


def integrate_mode(model: ScaleFactorModel, spec: ModeSpec, init: AdiabaticInitialData,
                   t_end: float, tol: float = DEFAULT_TOL,
                   t_eval: Optional[Sequence[float]] = None,
                   samples: int = 401) -> ModeSolution:
    """Integrate the mode equation from ``init`` to ``t_end`` (either direction).

    Output is sampled on ``t_eval`` (default: ``samples`` equispaced points)
    through the integrator's dense output.
    """
    _check_tol(tol)
    t0 = init.t0
    if t_end == t0:
        raise ValueError("Integration span is empty: t_end equals t0.")
    a_samples = _sample_scale_factor(model, t0, t_end)
    grid = np.linspace(t0, t_end, samples) if t_eval is None else np.asarray(t_eval, float)

    y0 = np.array([init.q.real, init.q.imag, init.p.real, init.p.imag])
    rtol = max(tol * _TIGHTENING, _RTOL_FLOOR)
    atol = rtol * max(float(np.max(np.abs(y0))), 1e-300)
    max_step = _max_step(spec, a_samples)
    logger.debug("Integrating k=%s on [%s, %s] rtol=%.1e max_step=%.3g",
                 spec.k, t0, t_end, rtol, max_step)

    result = solve_ivp(
        _canonical_rhs(model, spec),
        (t0, t_end),
        y0,
        method="DOP853",
        t_eval=grid,
        dense_output=True,
        rtol=rtol,
        atol=atol,
        max_step=max_step,
    )
    if not result.success:
        raise StepFailure(f"Mode k={spec.k} on {model.label}: {result.message}")
    logger.debug("k=%s: %d right-hand-side evaluations", spec.k, result.nfev)
    return _solution_from_canonical(result.t, result.y, model, spec, init, result.sol)


def integrate_mode_fixed_step(model: ScaleFactorModel, spec: ModeSpec,
                              init: AdiabaticInitialData, t_end: float,
                              step: float) -> ModeSolution:
    """Classical fourth-order Runge-Kutta with a fixed step, for cross-checks."""
    t0 = init.t0
    if t_end == t0 or not step > 0:
        raise ValueError("Fixed-step integration needs t_end != t0 and a positive step.")
    _sample_scale_factor(model, t0, t_end)
    n_steps = int(math.ceil(abs(t_end - t0) / step))
    h = (t_end - t0) / n_steps
    rhs = _canonical_rhs(model, spec)

    y = np.array([init.q.real, init.q.imag, init.p.real, init.p.imag])
    ys = np.empty((4, n_steps + 1))
    ys[:, 0] = y
    t = t0
    for i in range(1, n_steps + 1):
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = t0 + i * h
        ys[:, i] = y
    times = t0 + h * np.arange(n_steps + 1)
    return _solution_from_canonical(times, ys, model, spec, init)


# two-point function


def _wronskian_deviation(q: complex, p: complex) -> float:
    return abs(np.conj(q) * p - q * np.conj(p) + 1j)


def two_point_matrix(q: complex, p: complex, tol: float = WRONSKIAN_TOL) -> TwoPointMatrix:
    deviation = _wronskian_deviation(q, p)
    if deviation > tol:
        raise WronskianBroken(
            f"conj(q) p - q conj(p) deviates from -i by {deviation:.3e}", deviation
        )
    q, p = complex(q), complex(p)
    S = np.array(
        [[abs(p) ** 2, -q * p.conjugate()],
         [-q.conjugate() * p, abs(q) ** 2]],
        dtype=complex,
    )
    return TwoPointMatrix(S)


def scalar_product(S: TwoPointMatrix, F: np.ndarray, G: np.ndarray) -> np.ndarray:
    """mu(F, G) = Re(F^T S G) for real test pairs F = (u, p); vectorised over rows."""
    return np.real(np.einsum("...i,ij,...j->...", F, S.S, G))


def symplectic_form(F: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Per-mode symplectic form -(u_F p_G - u_G p_F)."""
    return -(F[..., 0] * G[..., 1] - G[..., 0] * F[..., 1])


def quasifree_positivity_check(S: TwoPointMatrix, trials: int,
                               seed: int = 0) -> PositivityReport:
    """Test 1/4 |sigma(F1, F2)|^2 <= mu(F1, F1) mu(F2, F2) on random real pairs."""
    rng = np.random.default_rng(seed)
    F1 = rng.standard_normal((trials, 2))
    F2 = rng.standard_normal((trials, 2))
    lhs = 0.25 * symplectic_form(F1, F2) ** 2
    rhs = scalar_product(S, F1, F1) * scalar_product(S, F2, F2)
    violation = float(np.max(lhs - rhs, initial=0.0))
    ratio = float(np.max(lhs / np.maximum(rhs, np.finfo(float).tiny), initial=0.0))
    return PositivityReport(trials=trials, max_violation=max(violation, 0.0), max_ratio=ratio)


# Bogoliubov coefficients


def bogoliubov_from_states(Ta: complex, Ta_dot: complex, Tb: complex, Tb_dot: complex,
                           a: float) -> BogoliubovPair:
    a3 = a ** 3
    alpha = 1j * a3 * (np.conj(Ta) * Tb_dot - np.conj(Ta_dot) * Tb)
    beta = -1j * a3 * (Ta * Tb_dot - Ta_dot * Tb)
    return BogoliubovPair(complex(alpha), complex(beta))


def bogoliubov(sol_a: ModeSolution, sol_b: ModeSolution, t: float) -> BogoliubovPair:
    """Expand mode b in the basis (mode a, conj(mode a)) at time t."""
    if sol_a.mode != sol_b.mode:
        raise ModeMismatch(f"Modes differ: {sol_a.mode} vs {sol_b.mode}.")
    a = float(sol_a.model.value(t))
    states = []
    for sol in (sol_a, sol_b):
        T, T_dot = sol.state_at(t)
        deviation = _wronskian_deviation(T, a ** 3 * T_dot)
        if deviation > WRONSKIAN_TOL:
            raise WronskianBroken(f"Mode is not normalised at t={t} ({deviation:.3e}).",
                                  deviation)
        states.append((T, T_dot))
    (Ta, Ta_dot), (Tb, Tb_dot) = states
    return bogoliubov_from_states(Ta, Ta_dot, Tb, Tb_dot, a)


def particle_number(model: ScaleFactorModel, spec: ModeSpec, order_n: int, t0: float,
                    t1: float, tol: float = DEFAULT_TOL) -> BogoliubovPair:
    """Evolve order-n data from t0 to t1 and project on order-n data imposed at t1.

    |beta|^2 of the result is the particle content of the t0 vacuum seen by the
    t1 vacuum.
    """
    evolved = integrate_mode(model, spec, initial_data_for(model, spec, t0, order_n), t1, tol,
                             samples=2)
    reference = initial_data_for(model, spec, t1, order_n)
    T, T_dot = evolved.state_at(t1)
    deviation = _wronskian_deviation(T, reference.a0 ** 3 * T_dot)
    if deviation > WRONSKIAN_TOL:
        raise WronskianBroken(f"Evolved mode is not normalised at t={t1} ({deviation:.3e}).",
                              deviation)
    return bogoliubov_from_states(reference.T0, reference.T0_dot, T, T_dot, reference.a0)
