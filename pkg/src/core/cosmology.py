"""
Robertson-Walker background data.

Scale-factor models a(t), the spatial-curvature cases with their mode
energies E(k), and the mode frequency omega_k^2(t) = E(k)/a^2(t) + m^2.
Units are geometric (c = 1); masses and Hubble rates are inverse times.
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Mapping, Union

import numpy as np
import pandas as pd
from scipy.interpolate import CubicSpline

from src.core import jets
from src.core.errors import ConfigError, PositivityLoss, SmoothnessExceeded
from src.core.jets import Jet

logger = logging.getLogger(__name__)

ANALYTIC = math.inf
ArrayLike = Union[float, np.ndarray]


class Curvature(Enum):
    """Sign of the spatial curvature kappa."""

    OPEN = -1
    FLAT = 0
    CLOSED = 1


class ScaleFactorKind(Enum):
    """Built-in scale-factor families."""

    CONSTANT = "constant"
    DE_SITTER = "de_sitter"
    POWER_LAW = "power_law"
    TANH_TRANSITION = "tanh_transition"
    SPLINE = "spline"

    @classmethod
    def parse(cls, text: str) -> "ScaleFactorKind":
        key = text.strip().lower().replace("-", "_")
        key = _KIND_ALIASES.get(key, key)
        try:
            return cls(key)
        except ValueError:
            choices = ", ".join(kind.value for kind in cls)
            raise ConfigError(f"Unknown scale-factor kind {text!r}; expected one of {choices}.")


_KIND_ALIASES = {"desitter": "de_sitter", "tanh": "tanh_transition", "powerlaw": "power_law"}


@dataclass(frozen=True)
class ModeSpec:
    """A single mode: curvature sign, mode number and field mass."""

    kappa: int
    k: float
    m: float

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.kappa not in {c.value for c in Curvature}:
            raise ValueError(f"kappa must be -1, 0 or +1, got {self.kappa!r}.")
        if not (math.isfinite(self.k) and self.k >= 0):
            raise ValueError(f"Mode number k must be finite and non-negative, got {self.k!r}.")
        if self.kappa == Curvature.CLOSED.value and float(self.k) != int(self.k):
            raise ValueError(f"Closed slicing admits integer k only, got {self.k!r}.")
        if not (math.isfinite(self.m) and self.m >= 0):
            raise ValueError(f"Field mass must be finite and non-negative, got {self.m!r}.")

    @property
    def curvature(self) -> Curvature:
        return Curvature(self.kappa)

    @property
    def energy(self) -> float:
        return energy_eigenvalue(self)

    def omega_squared(self, a: ArrayLike) -> ArrayLike:
        """Plain (non-jet) omega_k^2 at scale factor a."""
        return self.energy / np.square(a) + self.m ** 2

    def with_k(self, k: float) -> "ModeSpec":
        return ModeSpec(self.kappa, k, self.m)

    def as_dict(self) -> Dict[str, float]:
        return {"kappa": self.kappa, "k": self.k, "m": self.m}


def energy_eigenvalue(spec: ModeSpec) -> float:
    """E(k): k(k+2) closed, k^2 flat, k^2+1 open."""
    k = float(spec.k)
    if spec.kappa == Curvature.CLOSED.value:
        return k * (k + 2.0)
    if spec.kappa == Curvature.FLAT.value:
        return k * k
    return k * k + 1.0


# scale-factor models


@dataclass(frozen=True)
class ScaleFactorModel(ABC):
    """A cosmology a(t) able to emit jets at any point of its domain."""

    @property
    @abstractmethod
    def kind(self) -> ScaleFactorKind:
        ...

    @property
    def smoothness_class(self) -> float:
        """Highest derivative order reliably available (inf when analytic)."""
        return ANALYTIC

    @abstractmethod
    def value(self, t: ArrayLike) -> ArrayLike:
        """a(t), vectorised over numpy arrays."""

    @abstractmethod
    def _jet(self, t: float, order: int) -> Jet:
        ...

    def in_domain(self, t: float) -> bool:
        return math.isfinite(t)

    def parameters(self) -> Dict[str, Any]:
        return {}

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, **self.parameters()}

    @property
    def label(self) -> str:
        params = ", ".join(f"{key}={value}" for key, value in self.parameters().items())
        return f"{self.kind.value}({params})"

    def jet(self, t: float, order: int) -> Jet:
        if order < 0:
            raise ValueError(f"Jet order must be non-negative, got {order}.")
        if order > self.smoothness_class:
            raise SmoothnessExceeded(
                f"{self.label} is only C^{int(self.smoothness_class)}; "
                f"a jet of order {order} was requested",
                requested=order,
                available=int(self.smoothness_class),
            )
        if not self.in_domain(t):
            raise ValueError(f"t={t} lies outside the domain of {self.label}.")
        return self._jet(float(t), order)

    @classmethod
    def from_settings(cls, settings: Mapping[str, Any]) -> "ScaleFactorModel":
        """Build a model from the key=value grammar (``kind=de_sitter``, ``H=0.1``...)."""
        kind = ScaleFactorKind.parse(str(settings.get("kind") or settings.get("model") or ""))

        def number(key: str, default: Any = None) -> float:
            raw = settings.get(key, default)
            if raw is None:
                raise ConfigError(f"Scale-factor kind {kind.value} needs '{key}'.")
            try:
                return float(raw)
            except (TypeError, ValueError):
                raise ConfigError(f"'{key}' must be a number, got {raw!r}.")

        try:
            if kind is ScaleFactorKind.CONSTANT:
                return ConstantModel(A=number("A", 1.0))
            if kind is ScaleFactorKind.DE_SITTER:
                return DeSitterModel(H=number("H"), A=number("A", 1.0))
            if kind is ScaleFactorKind.POWER_LAW:
                return PowerLawModel(p=number("p"), t_offset=number("t_offset", 0.0))
            if kind is ScaleFactorKind.TANH_TRANSITION:
                return TanhTransitionModel(A=number("A"), B=number("B"), tau=number("tau", 1.0))
            knots = settings.get("knots")
            if not knots:
                raise ConfigError("Scale-factor kind spline needs 'knots=<path to csv>'.")
            return SplineModel.from_csv(Path(str(knots)))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def scale_factor_jet(model: ScaleFactorModel, t: float, order: int) -> Jet:
    """Jet of a(t) at ``t`` of the requested order."""
    return model.jet(t, order)


@dataclass(frozen=True)
class ConstantModel(ScaleFactorModel):
    """Static universe a(t) = A."""

    A: float = 1.0

    def __post_init__(self) -> None:
        if not self.A > 0:
            raise ValueError(f"Constant scale factor must be positive, got A={self.A}.")

    @property
    def kind(self) -> ScaleFactorKind:
        return ScaleFactorKind.CONSTANT

    def parameters(self) -> Dict[str, Any]:
        return {"A": self.A}

    def value(self, t: ArrayLike) -> ArrayLike:
        return np.full_like(np.asarray(t, dtype=float), self.A)

    def _jet(self, t: float, order: int) -> Jet:
        return Jet.constant(self.A, order, t)


@dataclass(frozen=True)
class DeSitterModel(ScaleFactorModel):
    """Exponential expansion a(t) = A exp(H t)."""

    H: float
    A: float = 1.0

    def __post_init__(self) -> None:
        if not self.A > 0:
            raise ValueError(f"de Sitter amplitude must be positive, got A={self.A}.")

    @property
    def kind(self) -> ScaleFactorKind:
        return ScaleFactorKind.DE_SITTER

    def parameters(self) -> Dict[str, Any]:
        return {"H": self.H, "A": self.A}

    def value(self, t: ArrayLike) -> ArrayLike:
        return self.A * np.exp(self.H * np.asarray(t, dtype=float))

    def _jet(self, t: float, order: int) -> Jet:
        return jets.scale(jets.exp(Jet.variable(t, order, scale=self.H)), self.A)


@dataclass(frozen=True)
class PowerLawModel(ScaleFactorModel):
    """a(t) = (t + t_offset)^p on t > -t_offset."""

    p: float
    t_offset: float = 0.0

    @property
    def kind(self) -> ScaleFactorKind:
        return ScaleFactorKind.POWER_LAW

    def parameters(self) -> Dict[str, Any]:
        return {"p": self.p, "t_offset": self.t_offset}

    def in_domain(self, t: float) -> bool:
        return math.isfinite(t) and t + self.t_offset > 0

    def value(self, t: ArrayLike) -> ArrayLike:
        return np.power(np.asarray(t, dtype=float) + self.t_offset, self.p)

    def _jet(self, t: float, order: int) -> Jet:
        return jets.powf(Jet.variable(t, order, shift=self.t_offset), self.p)


@dataclass(frozen=True)
class TanhTransitionModel(ScaleFactorModel):
    """Smooth transition a(t) = A + B tanh(t / tau), static as t -> +-inf."""

    A: float
    B: float
    tau: float = 1.0

    def __post_init__(self) -> None:
        if not self.tau > 0:
            raise ValueError(f"Transition time tau must be positive, got {self.tau}.")
        if not self.A > abs(self.B):
            raise ValueError(
                f"tanh transition needs A > |B| to keep a(t) positive (A={self.A}, B={self.B})."
            )

    @property
    def kind(self) -> ScaleFactorKind:
        return ScaleFactorKind.TANH_TRANSITION

    def parameters(self) -> Dict[str, Any]:
        return {"A": self.A, "B": self.B, "tau": self.tau}

    def value(self, t: ArrayLike) -> ArrayLike:
        return self.A + self.B * np.tanh(np.asarray(t, dtype=float) / self.tau)

    def _jet(self, t: float, order: int) -> Jet:
        x = Jet.variable(t, order, scale=1.0 / self.tau)
        return jets.scale(jets.tanh(x), self.B) + self.A


@dataclass(frozen=True, eq=False)
class SplineModel(ScaleFactorModel):
    """C^2 natural cubic interpolant through tabulated (t, a) knots."""

    knots_t: np.ndarray
    knots_a: np.ndarray
    source: str = ""
    _spline: CubicSpline = field(init=False, repr=False)

    def __post_init__(self) -> None:
        t = np.asarray(self.knots_t, dtype=float)
        a = np.asarray(self.knots_a, dtype=float)
        if t.ndim != 1 or t.shape != a.shape or t.size < 3:
            raise ValueError("Spline needs at least three (t, a) knots.")
        if not np.all(np.diff(t) > 0):
            raise ValueError("Spline knot times must be strictly increasing.")
        if not np.all(a > 0):
            raise ValueError("Spline knot values a(t) must all be positive.")
        spline = CubicSpline(t, a, bc_type="natural")
        # interior minima sit at roots of the first derivative
        candidates = np.concatenate([t, spline.derivative().roots(extrapolate=False)])
        values = spline(candidates)
        lowest = int(np.argmin(values))
        if not values[lowest] > 0:
            raise ValueError(
                f"Spline interpolant dips to a={values[lowest]:.4g} at "
                f"t={candidates[lowest]:.4g}; a(t) must stay positive between knots."
            )
        object.__setattr__(self, "knots_t", t)
        object.__setattr__(self, "knots_a", a)
        object.__setattr__(self, "_spline", spline)

    @classmethod
    def from_csv(cls, path: Path) -> "SplineModel":
        """Read a two-column (t, a) table; a header row is skipped if present."""
        if not path.exists():
            raise ConfigError(f"Knot file {path} does not exist.")
        frame = pd.read_csv(path, header=None, comment="#", skipinitialspace=True)
        if frame.shape[1] < 2:
            raise ConfigError(f"Knot file {path} must have two columns (t, a).")
        frame = frame.iloc[:, :2].apply(pd.to_numeric, errors="coerce").dropna()
        logger.debug("Loaded %d spline knots from %s", len(frame), path)
        return cls(frame.iloc[:, 0].to_numpy(), frame.iloc[:, 1].to_numpy(), source=str(path))

    @property
    def kind(self) -> ScaleFactorKind:
        return ScaleFactorKind.SPLINE

    @property
    def smoothness_class(self) -> float:
        return 2

    def parameters(self) -> Dict[str, Any]:
        return {"knots": self.source or f"{self.knots_t.size} knots"}

    def in_domain(self, t: float) -> bool:
        return bool(self.knots_t[0] <= t <= self.knots_t[-1])

    def value(self, t: ArrayLike) -> ArrayLike:
        return self._spline(np.asarray(t, dtype=float))

    def _jet(self, t: float, order: int) -> Jet:
        derivs = [float(self._spline(t, nu)) for nu in range(order + 1)]
        return Jet.from_derivatives(t, derivs)


def omega_squared_jet(a: Jet, spec: ModeSpec) -> Jet:
    """Jet of omega_k^2(t) = E(k)/a^2(t) + m^2."""
    if not a.value > 0:
        raise PositivityLoss(f"Scale factor a={a.value} at t={a.base_point} is not positive.")
    return spec.energy * jets.powi(a, -2) + spec.m ** 2
