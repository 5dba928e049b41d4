"""
Affine dependence of (Omega^[1])^2 on a'', recovery of a'' and the f_n chain.
"""

import json

import numpy as np
import pytest

from src.core.cosmology import ConstantModel, DeSitterModel, ModeSpec
from src.core.probe import (
    affine_decompose,
    closed_form_slope,
    fn_chain,
    max_adiabatic_order,
    omega1_squared,
    probe_report,
    recover_addot,
    recovery_tolerance,
)

RNG = np.random.default_rng(0)


class TestAffineDecomposition:
    def test_unit_slope(self, unit_mode):
        decomposition = affine_decompose(1.0, 0.1, unit_mode)
        assert decomposition.slope == pytest.approx(-1.25, rel=1e-10)
        assert decomposition.intercept == pytest.approx(1.988125, rel=1e-12)
        assert decomposition.at(0.01) == pytest.approx(1.975625, rel=1e-12)
        assert decomposition.quadratic_residual <= 1e-12

    @pytest.mark.parametrize(
        "a, a_dot, spec",
        [
            (1.0, 0.0, ModeSpec(0, 1.0, 1.0)),
            (0.7, -0.3, ModeSpec(1, 2, 0.5)),
            (2.5, 1.2, ModeSpec(-1, 3.0, 0.0)),
            (1.3, 0.4, ModeSpec(0, 0.0, 2.0)),
        ],
    )
    def test_slope_matches_closed_form(self, a, a_dot, spec):
        decomposition = affine_decompose(a, a_dot, spec)
        assert decomposition.slope == pytest.approx(closed_form_slope(a, spec), rel=1e-10)
        assert decomposition.slope < 0

    @pytest.mark.parametrize("a_ddot", [-0.5, 0.0, 0.01, 0.8])
    def test_recovery(self, unit_mode, a_ddot):
        a, a_dot = 1.2, 0.3
        recovered = recover_addot(omega1_squared(a, a_dot, a_ddot, unit_mode), a, a_dot,
                                  unit_mode)
        assert recovered == pytest.approx(a_ddot, abs=1e-9)

    def test_de_sitter_recovery(self, unit_mode):
        recovered = recover_addot(1.975625, 1.0, 0.1, unit_mode)
        assert recovered == pytest.approx(0.01, abs=1e-9)

    def test_rejects_trivial_frequency(self):
        with pytest.raises(ValueError):
            affine_decompose(1.0, 0.0, ModeSpec(0, 0.0, 0.0))

    def test_rejects_non_positive_scale_factor(self, unit_mode):
        with pytest.raises(ValueError):
            affine_decompose(0.0, 0.0, unit_mode)

    @pytest.mark.parametrize("k", [1.0, 10.0, 100.0, 1000.0])
    def test_large_wavenumber(self, k):
        a, a_dot, a_ddot = 0.5, 0.5, 0.7
        spec = ModeSpec(0, k, 1.0)
        decomposition = affine_decompose(a, a_dot, spec)
        assert decomposition.slope == pytest.approx(closed_form_slope(a, spec), rel=1e-10)
        omega1_sq = omega1_squared(a, a_dot, a_ddot, spec)
        recovered = recover_addot(omega1_sq, a, a_dot, spec)
        assert abs(recovered - a_ddot) <= recovery_tolerance(omega1_sq, decomposition.slope)

    def test_relative_correction_shrinks_with_wavenumber(self):
        gaps = []
        for k in (1.0, 10.0, 100.0, 1000.0):
            spec = ModeSpec(0, k, 1.0)
            gaps.append(abs(omega1_squared(1.0, 0.1, 0.01, spec) / spec.omega_squared(1.0) - 1))
        assert all(later < earlier for earlier, later in zip(gaps, gaps[1:]))

    def test_random_domain(self):
        samples = 10_000
        worst_residual = worst_slope_gap = 0.0
        for _ in range(samples):
            a = RNG.uniform(0.5, 2.0)
            a_dot = RNG.uniform(-1.0, 1.0)
            kappa = int(RNG.integers(-1, 2))
            k = float(RNG.integers(0, 21)) if kappa == 1 else RNG.uniform(0.0, 20.0)
            spec = ModeSpec(kappa, k, RNG.uniform(0.1, 2.0))
            decomposition = affine_decompose(a, a_dot, spec)
            closed = closed_form_slope(a, spec)
            assert decomposition.slope < 0
            worst_residual = max(worst_residual, decomposition.quadratic_residual)
            worst_slope_gap = max(worst_slope_gap, abs(decomposition.slope / closed - 1))
        assert worst_residual <= 1e-12
        assert worst_slope_gap <= 1e-10

    def test_random_round_trips(self):
        worst = 0.0
        for _ in range(1000):
            a, a_dot, a_ddot = RNG.uniform(0.5, 2.0), RNG.uniform(-1, 1), RNG.uniform(-1, 1)
            spec = ModeSpec(0, RNG.uniform(0.0, 20.0), RNG.uniform(0.1, 2.0))
            recovered = recover_addot(omega1_squared(a, a_dot, a_ddot, spec), a, a_dot, spec)
            worst = max(worst, abs(recovered - a_ddot))
        assert worst <= 1e-9


class TestFnChain:
    def test_static_ratio(self, minkowski, unit_mode):
        chain = fn_chain(minkowski, unit_mode, 0.0, 3)
        assert chain.n == 3
        f2, f3 = chain.values
        assert f2 == pytest.approx(-1.25, rel=1e-10)
        assert f3 / f2 == pytest.approx(-1.0 / 8.0, rel=1e-12)
        assert chain.omegas == [pytest.approx(2.0)]

    def test_three_evaluations_agree(self, de_sitter, unit_mode):
        chain = fn_chain(de_sitter, unit_mode, 0.0, 5)
        assert len(chain.values) == 4
        assert chain.max_relative_gap(chain.closed_form) <= 1e-10
        assert chain.max_relative_gap(chain.measured) <= 1e-6

    def test_three_evaluations_agree_on_transition(self, tanh_model):
        chain = fn_chain(tanh_model, ModeSpec(0, 8.0, 1.0), 0.3, 5)
        assert len(chain.values) == 4
        assert chain.max_relative_gap(chain.closed_form) <= 1e-10
        assert chain.max_relative_gap(chain.measured) <= 1e-6

    def test_static_agreement_to_order_five(self, minkowski, unit_mode):
        chain = fn_chain(minkowski, unit_mode, 0.0, 5)
        assert chain.max_relative_gap(chain.closed_form) <= 1e-10
        assert chain.max_relative_gap(chain.measured) <= 1e-6

    def test_alternating_signs_never_vanish(self, tanh_model):
        chain = fn_chain(tanh_model, ModeSpec(0, 8.0, 1.0), 0.3, 5)
        values = np.asarray(chain.values)
        assert np.all(values != 0.0)
        assert np.all(np.sign(values[1:]) == -np.sign(values[:-1]))

    def test_needs_two_terms(self, de_sitter, unit_mode):
        with pytest.raises(ValueError):
            fn_chain(de_sitter, unit_mode, 0.0, 1)


class TestMaxAdiabaticOrder:
    def test_reaches_cap(self, de_sitter, unit_mode):
        report = max_adiabatic_order(de_sitter, unit_mode, 0.0, 4)
        assert report.max_order == 4
        assert report.failure is None
        assert len(report.omegas_squared) == 5

    def test_hadamard_failure(self, unit_mode):
        report = max_adiabatic_order(DeSitterModel(H=1.0), unit_mode, 0.0, 4)
        assert report.max_order == 0
        assert report.failure["kind"] == "HadamardViolation"
        assert report.failure["n"] == 1
        assert report.failure["value"] == pytest.approx(-0.4375, rel=1e-12)

    def test_spline_failure(self, spline_model, unit_mode):
        report = max_adiabatic_order(spline_model, unit_mode, 1.5, 3)
        assert report.max_order == 0
        assert report.failure == {"kind": "OrderExhausted", "n": 1, "value": None}


class TestProbeReport:
    def test_fields(self, unit_mode):
        report = probe_report(ConstantModel(), unit_mode, 0.0, 3).to_dict()
        assert report["max_order"] == 3
        assert report["failure"] is None
        assert [row["n"] for row in report["fn_chain"]] == [2, 3, 4]
        assert report["slope"] == pytest.approx(report["closed_form_slope"], rel=1e-10)
        assert report["printed_f2"] == pytest.approx(4.0)
        assert report["printed_denominator"] == pytest.approx(16.0)
        assert report["model"] == {"kind": "constant", "A": 1.0}
        json.dumps(report)

    def test_spline_report_has_no_chain(self, spline_model, unit_mode):
        report = probe_report(spline_model, unit_mode, 1.5, 3).to_dict()
        assert report["max_order"] == 0
        assert report["fn_chain"] == []
        assert report["failure"]["kind"] == "OrderExhausted"
