"""
Scale-factor models, mode energies and omega^2 jets.
"""

import math

import numpy as np
import pytest

from src.core.cosmology import (
    ConstantModel,
    Curvature,
    DeSitterModel,
    ModeSpec,
    PowerLawModel,
    ScaleFactorKind,
    ScaleFactorModel,
    SplineModel,
    TanhTransitionModel,
    energy_eigenvalue,
    omega_squared_jet,
    scale_factor_jet,
)
from src.core.errors import ConfigError, OrderExhausted, PositivityLoss, SmoothnessExceeded
from src.core.jets import Jet

RTOL = 1e-12


class TestModeSpec:
    @pytest.mark.parametrize(
        "kappa, k, energy",
        [(1, 2, 8.0), (0, 3.0, 9.0), (-1, 2.0, 5.0), (-1, 0.0, 1.0)],
    )
    def test_energy_eigenvalue(self, kappa, k, energy):
        spec = ModeSpec(kappa, k, 0.0)
        assert energy_eigenvalue(spec) == energy
        assert spec.energy == energy

    def test_curvature(self):
        assert ModeSpec(-1, 1.0, 0.0).curvature is Curvature.OPEN

    @pytest.mark.parametrize(
        "kappa, k, m",
        [(2, 1.0, 1.0), (1, 1.5, 1.0), (0, -1.0, 1.0), (0, 1.0, -0.5), (0, math.inf, 1.0)],
    )
    def test_invalid(self, kappa, k, m):
        with pytest.raises(ValueError):
            ModeSpec(kappa, k, m)

    def test_omega_squared(self, unit_mode):
        assert unit_mode.omega_squared(1.0) == 2.0
        assert unit_mode.omega_squared(2.0) == pytest.approx(1.25)

    def test_with_k(self, unit_mode):
        spec = unit_mode.with_k(4.0)
        assert (spec.kappa, spec.k, spec.m) == (0, 4.0, 1.0)


class TestAnalyticModels:
    def test_constant(self, minkowski):
        a = minkowski.jet(3.0, 4)
        assert a.value == 1.0
        np.testing.assert_array_equal(a.coeffs[1:], 0.0)
        assert minkowski.smoothness_class == math.inf

    def test_de_sitter_derivatives(self):
        model = DeSitterModel(H=0.3, A=2.0)
        a = scale_factor_jet(model, 1.0, 5)
        expected = [2.0 * 0.3 ** j * math.exp(0.3) for j in range(6)]
        np.testing.assert_allclose(a.derivatives(), expected, rtol=RTOL)

    def test_power_law_derivatives(self):
        a = PowerLawModel(p=0.5).jet(1.0, 2)
        np.testing.assert_allclose(a.derivatives(), [1.0, 0.5, -0.25], rtol=RTOL)

    def test_power_law_domain(self):
        with pytest.raises(ValueError):
            PowerLawModel(p=0.5, t_offset=1.0).jet(-2.0, 2)

    def test_tanh_derivatives(self, tanh_model):
        a = tanh_model.jet(0.0, 3)
        np.testing.assert_allclose(a.derivatives(), [2.0, 1.0, 0.0, -2.0], rtol=RTOL,
                                   atol=1e-15)

    def test_tanh_value_matches_jet(self, tanh_model):
        assert tanh_model.value(0.7) == pytest.approx(tanh_model.jet(0.7, 0).value, rel=RTOL)

    def test_tanh_requires_positive_scale_factor(self):
        with pytest.raises(ValueError):
            TanhTransitionModel(A=1.0, B=1.0)

    def test_negative_order(self, minkowski):
        with pytest.raises(ValueError):
            minkowski.jet(0.0, -1)


class TestSplineModel:
    def test_interpolates_knots(self, spline_model):
        np.testing.assert_allclose(spline_model.value(np.array([0.0, 2.0, 4.0])),
                                   [1.0, 1.5, 2.4], rtol=RTOL)

    def test_smoothness_class(self, spline_model):
        assert spline_model.smoothness_class == 2
        assert spline_model.jet(1.5, 2).order == 2
        with pytest.raises(SmoothnessExceeded) as info:
            spline_model.jet(1.5, 3)
        assert isinstance(info.value, OrderExhausted)
        assert (info.value.requested, info.value.available) == (3, 2)

    def test_outside_knots(self, spline_model):
        with pytest.raises(ValueError):
            spline_model.jet(5.0, 1)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            SplineModel.from_csv(tmp_path / "absent.csv")

    def test_rejects_unsorted_knots(self):
        with pytest.raises(ValueError):
            SplineModel(np.array([0.0, 2.0, 1.0]), np.array([1.0, 1.0, 1.0]))

    def test_rejects_interpolant_dipping_below_zero(self):
        # knots stay positive but the natural cubic reaches a < 0 near t = 1.5
        with pytest.raises(ValueError, match="between knots"):
            SplineModel(np.array([0.0, 1.0, 2.0, 3.0]), np.array([1.0, 0.01, 0.01, 1.0]))

    def test_dipping_knot_file_is_a_config_error(self, tmp_path):
        path = tmp_path / "dip.csv"
        path.write_text("t,a\n0,1\n1,0.01\n2,0.01\n3,1\n")
        with pytest.raises(ConfigError):
            ScaleFactorModel.from_settings({"model": "spline", "knots": str(path)})

    def test_interpolant_minimum_is_positive(self, spline_model):
        t = np.linspace(0.0, 4.0, 401)
        assert np.all(spline_model.value(t) > 0)


class TestFromSettings:
    @pytest.mark.parametrize(
        "settings, expected",
        [
            ({"model": "constant"}, ConstantModel(A=1.0)),
            ({"kind": "desitter", "H": "0.1"}, DeSitterModel(H=0.1)),
            ({"model": "power-law", "p": 0.5, "t_offset": 1}, PowerLawModel(0.5, 1.0)),
            ({"model": "tanh", "A": 2, "B": 1}, TanhTransitionModel(2.0, 1.0, 1.0)),
        ],
    )
    def test_builds_models(self, settings, expected):
        assert ScaleFactorModel.from_settings(settings) == expected

    def test_spline(self, knots_csv):
        model = ScaleFactorModel.from_settings({"model": "spline", "knots": str(knots_csv)})
        assert model.kind is ScaleFactorKind.SPLINE

    @pytest.mark.parametrize(
        "settings",
        [
            {"model": "wormhole"},
            {"model": "de_sitter"},
            {"model": "de_sitter", "H": "fast"},
            {"model": "tanh", "A": 1, "B": 2},
            {"model": "spline"},
        ],
    )
    def test_bad_settings(self, settings):
        with pytest.raises(ConfigError):
            ScaleFactorModel.from_settings(settings)

    def test_describe(self):
        assert DeSitterModel(H=0.1).describe() == {"kind": "de_sitter", "H": 0.1, "A": 1.0}


def test_omega_squared_jet(unit_mode):
    model = DeSitterModel(H=0.1)
    w2 = omega_squared_jet(model.jet(0.0, 2), unit_mode)
    # E e^{-2Ht} + m^2
    np.testing.assert_allclose(w2.derivatives(), [2.0, -0.2, 0.04], rtol=RTOL)


def test_omega_squared_jet_needs_positive_scale_factor(unit_mode):
    with pytest.raises(PositivityLoss):
        omega_squared_jet(Jet(0.0, [-0.5, 1.0, 0.0]), unit_mode)


def _tanh_derivatives(model: TanhTransitionModel, t: float, order: int) -> np.ndarray:
    """d^j/dt^j of A + B tanh(t/tau) from the polynomials P_{j+1} = P_j' (1 - y^2)."""
    y = math.tanh(t / model.tau)
    poly = np.polynomial.Polynomial([0.0, 1.0])
    out = [model.A + model.B * y]
    for j in range(1, order + 1):
        poly = poly.deriv() * np.polynomial.Polynomial([1.0, 0.0, -1.0])
        out.append(model.B * poly(y) / model.tau ** j)
    return np.asarray(out)


class TestAnalyticJetsToHighOrder:
    ORDER = 12

    def test_de_sitter(self):
        model = DeSitterModel(H=0.3, A=2.0)
        expected = [2.0 * 0.3 ** j * math.exp(0.3 * 0.7) for j in range(self.ORDER + 1)]
        np.testing.assert_allclose(model.jet(0.7, self.ORDER).derivatives(), expected,
                                   rtol=1e-12)

    def test_power_law(self, power_law):
        x = 0.5 + power_law.t_offset
        expected = [math.prod(power_law.p - i for i in range(j)) * x ** (power_law.p - j)
                    for j in range(self.ORDER + 1)]
        np.testing.assert_allclose(power_law.jet(0.5, self.ORDER).derivatives(), expected,
                                   rtol=1e-10)

    def test_tanh(self, tanh_model):
        expected = _tanh_derivatives(tanh_model, 0.4, self.ORDER)
        np.testing.assert_allclose(tanh_model.jet(0.4, self.ORDER).derivatives(), expected,
                                   rtol=1e-10, atol=1e-10 * np.max(np.abs(expected)))

    @pytest.mark.parametrize(
        "model, t",
        [
            (DeSitterModel(H=0.3, A=2.0), 0.7),
            (PowerLawModel(p=0.5, t_offset=1.0), 0.5),
            (PowerLawModel(p=2.0 / 3.0, t_offset=0.0), 1.3),
            (TanhTransitionModel(A=2.0, B=1.0, tau=1.0), 0.4),
        ],
    )
    def test_central_differences(self, model, t):
        h = 1e-4
        jet, left, right = model.jet(t, 4), model.jet(t - h, 4), model.jet(t + h, 4)
        slope = (model.value(t + h) - model.value(t - h)) / (2.0 * h)
        assert jet.derivative(1) == pytest.approx(slope, rel=1e-7)
        for j in range(2, 5):
            estimate = (right.derivative(j - 1) - left.derivative(j - 1)) / (2.0 * h)
            assert jet.derivative(j) == pytest.approx(estimate, rel=1e-6, abs=1e-8)
