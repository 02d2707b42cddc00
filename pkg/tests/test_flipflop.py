import math

import numpy as np
import pytest

from edgebit.flipflop import (
    DisagreementCurve,
    FlipflopParams,
    QuadratureError,
    b1_squared,
    b2_squared,
    classical_disagreement,
    disagreement_probability,
    joint_density,
    local_maxima,
    oscillation_nodes,
    quadrant_disagreement_numeric,
    s_lambda,
    simulate_curve,
    to_dimensionless,
    to_physical,
)

REF_PARAMS = FlipflopParams.dimensionless(lam=1.81, b=0.556)


class TestSLambda:
    def test_small_t_limit(self):
        # s_lambda(t) -> t^2 for any lam as t -> 0
        for lam in (0.3, 1.0, 1.81, 3.0):
            assert s_lambda(lam, 1e-5) == pytest.approx(1e-10, rel=1e-6)

    def test_oscillatory_branch(self):
        lam = 2.0
        t = np.linspace(0, 4, 50)
        assert np.allclose(s_lambda(lam, t), np.sin(t) ** 2, atol=1e-14)

    def test_hyperbolic_branch(self):
        lam = 0.0
        t = np.linspace(0, 3, 50)
        assert np.allclose(s_lambda(lam, t), np.sinh(t) ** 2, atol=1e-12)

    def test_continuity_across_lam_one(self):
        t = 1.7
        left = s_lambda(1.0 - 1e-7, t)
        mid = s_lambda(1.0, t)
        right = s_lambda(1.0 + 1e-7, t)
        assert left == pytest.approx(mid, rel=1e-6)
        assert right == pytest.approx(mid, rel=1e-6)
        assert mid == pytest.approx(t * t, rel=1e-12)

    def test_series_matches_exact_near_branch(self):
        # the guarded Taylor window should agree with the exact branch value
        t = 2.3
        for eps in (1e-10, -1e-10):
            lam = 1.0 + eps
            exact = np.sin(np.sqrt(complex(eps)) * t) ** 2 / complex(eps)
            assert s_lambda(lam, t) == pytest.approx(float(exact.real), rel=1e-10)


class TestWidths:
    def test_initial_values(self):
        b, hfac = 0.556, 1 / 0.556**4
        assert b1_squared(b, 0.0, hfac) == pytest.approx(b * b)
        assert b2_squared(b, 1.81, 0.0, hfac) == pytest.approx(b * b)

    def test_b1_grows_monotonically(self):
        b, hfac = 0.556, 1 / 0.556**4
        t = np.linspace(0, 3, 40)
        assert np.all(np.diff(b1_squared(b, t, hfac)) > 0)

    def test_b2_oscillates_for_stiff_coupling(self):
        b, lam = 0.556, 1.81
        hfac = 1 / b**4
        t = np.linspace(0, 10, 2001)
        vals = b2_squared(b, lam, t, hfac)
        assert np.min(vals) > 0
        assert local_maxima(vals)  # genuinely non-monotone

    def test_b2_negative_coefficient_cases(self):
        # large b makes hfac small; lam > hfac + 1 then shrinks B2 below b^2
        b, lam = 2.0, 3.0
        hfac = 1 / b**4
        t = math.pi / (2 * math.sqrt(lam - 1))  # s_lambda at its maximum
        assert b2_squared(b, lam, t, hfac) < b * b


class TestDisagreementProbability:
    def test_half_at_time_zero(self):
        assert disagreement_probability(0.0, REF_PARAMS) == pytest.approx(0.5, abs=1e-15)

    def test_vectorized_matches_scalar(self):
        t = np.linspace(0, 3, 7)
        vec = disagreement_probability(t, REF_PARAMS)
        assert np.allclose(vec, [disagreement_probability(x, REF_PARAMS) for x in t])

    def test_matches_quadrature(self):
        for t in (0.0, 0.5, 1.3, 2.0):
            closed = disagreement_probability(t, REF_PARAMS)
            numeric = quadrant_disagreement_numeric(t, REF_PARAMS)
            assert numeric == pytest.approx(closed, abs=1e-9)

    def test_long_time_decay(self):
        # B1 ~ cosh t dominates, so the probability falls toward zero
        assert disagreement_probability(8.0, REF_PARAMS) < 0.02

    def test_rejects_biased_start(self):
        biased = FlipflopParams.dimensionless(lam=1.81, b=0.556, c=0.4)
        with pytest.raises(ValueError):
            disagreement_probability(1.0, biased)

    def test_bias_lowers_disagreement(self):
        biased = FlipflopParams.dimensionless(lam=1.81, b=0.556, c=0.5)
        on_edge = quadrant_disagreement_numeric(1.0, REF_PARAMS)
        shifted = quadrant_disagreement_numeric(1.0, biased)
        assert shifted < on_edge


class TestJointDensity:
    def test_normalized(self):
        x = np.linspace(-30, 30, 1201)
        xx, yy = np.meshgrid(x, x, indexing="ij")
        for t in (0.0, 1.0, 2.0):
            rho = joint_density(xx, yy, t, REF_PARAMS)
            total = np.trapezoid(np.trapezoid(rho, x, axis=1), x)
            assert total == pytest.approx(1.0, abs=1e-6)

    def test_symmetric_under_swap_when_unbiased(self):
        x = np.linspace(-4, 4, 41)
        xx, yy = np.meshgrid(x, x, indexing="ij")
        rho = joint_density(xx, yy, 1.2, REF_PARAMS)
        assert np.allclose(rho, rho.T, atol=1e-14)


class TestClassicalLimit:
    def test_half_at_time_zero(self):
        assert classical_disagreement(0.0, 1.81) == pytest.approx(0.5)

    def test_matches_closed_form_at_tiny_hfac(self):
        t = np.linspace(0, 3, 31)
        for lam in (1.2, 1.81, 3.0):
            p = FlipflopParams.dimensionless(lam=lam, b=1.0)
            p = FlipflopParams(
                lam=lam, b=1e3, c=0.0, m=p.m, k=p.k, hbar=p.hbar, units=p.units
            )
            quantum = disagreement_probability(t, p)
            classical = classical_disagreement(t, lam)
            assert np.max(np.abs(quantum - classical)) < 1e-6

    def test_hits_zero_when_width_collapses(self):
        # for lam > 2 the classical v-width crosses zero, pinning Pr at 0 there
        lam = 3.0
        t_zero = math.pi / (2 * math.sqrt(lam - 1))
        assert classical_disagreement(t_zero, lam) == pytest.approx(0.0, abs=1e-9)


class TestQuadrature:
    def test_reports_accuracy_failure(self):
        with pytest.raises(QuadratureError):
            quadrant_disagreement_numeric(1.0, REF_PARAMS, abs_err=1e-18)


class TestUnits:
    def test_round_trip(self):
        p = FlipflopParams(lam=1.81, b=0.4, c=0.1, m=2.0, k=8.0, hbar=0.3, units="physical")
        d = to_dimensionless(p)
        assert d.units == "dimensionless"
        assert d.m == 1.0 and d.k == 1.0 and d.hbar == 1.0
        back = to_physical(d)
        for field in ("lam", "b", "c", "m", "k", "hbar"):
            assert getattr(back, field) == pytest.approx(getattr(p, field), rel=1e-14)

    def test_hfac_invariant(self):
        p = FlipflopParams(lam=1.81, b=0.4, c=0.0, m=2.0, k=8.0, hbar=0.3, units="physical")
        assert to_dimensionless(p).hfac == pytest.approx(p.hfac, rel=1e-14)

    def test_physical_curve_matches_dimensionless(self):
        p = FlipflopParams(lam=1.81, b=0.556, c=0.0, m=1.0, k=4.0, hbar=1.0, units="physical")
        d = to_dimensionless(p)
        t_phys = 1.0
        assert disagreement_probability(t_phys, p) == pytest.approx(
            disagreement_probability(p.omega * t_phys, d), rel=1e-12
        )


class TestCurveIO:
    def test_round_trip(self, tmp_path):
        curve = simulate_curve(REF_PARAMS, t_max=2.0, dt=0.25)
        path = tmp_path / "curve.csv"
        curve.write_csv(path)
        loaded = DisagreementCurve.read_csv(path)
        assert loaded.units == curve.units
        assert np.array_equal(loaded.times, curve.times)
        assert np.array_equal(loaded.probabilities, curve.probabilities)

    def test_rejects_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("time,value\n0.0,0.5\n")
        with pytest.raises(ValueError, match="header"):
            DisagreementCurve.read_csv(path)

    def test_rejects_out_of_range_probability(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,probability\n0.0,1.5\n")
        with pytest.raises(ValueError, match="outside"):
            DisagreementCurve.read_csv(path)

    def test_rejects_non_increasing_times(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,probability\n0.0,0.5\n0.0,0.4\n")
        with pytest.raises(ValueError, match="increasing"):
            DisagreementCurve.read_csv(path)

    def test_error_includes_line_number(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,probability\n0.0,0.5\nnot-a-number,0.4\n")
        with pytest.raises(ValueError, match=":3:"):
            DisagreementCurve.read_csv(path)


class TestOscillationStructure:
    def test_nodes_spacing(self):
        nodes = oscillation_nodes(1.81, 12.0)
        assert nodes[0] == 0.0
        assert np.allclose(np.diff(nodes), math.pi / 0.9, atol=1e-12)

    def test_node_values_strictly_decrease(self):
        nodes = oscillation_nodes(1.81, 15.0)
        vals = disagreement_probability(nodes, REF_PARAMS)
        assert np.all(np.diff(vals) < 0)

    def test_curve_is_non_monotone(self):
        curve = simulate_curve(REF_PARAMS, t_max=6.0, dt=0.01)
        assert local_maxima(curve.probabilities)
