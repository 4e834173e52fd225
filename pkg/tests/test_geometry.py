"""Tests for benchmark geometries, weight normalization, and radial quadrature."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from stickybounds.geometry import (
    CurvatureBounds,
    GeometryError,
    RadialProfile,
    RadialQuadrature,
    make_geometry,
    normalize_weights,
    sup_on_interval,
    tube_integral,
)


class TestMakeGeometry:
    def test_kinds(self):
        for kind in ("flat_disk", "spherical_cap", "hyperbolic_disk"):
            g = make_geometry(kind, 0.8)
            assert g.inradius == 0.8
            assert g.dim == 2

    def test_unknown_kind(self):
        with pytest.raises(GeometryError, match="unknown geometry kind"):
            make_geometry("torus", 1.0)

    def test_nonpositive_radius(self):
        with pytest.raises(GeometryError):
            make_geometry("flat_disk", 0.0)
        with pytest.raises(GeometryError):
            make_geometry("flat_disk", -1.0)

    def test_cap_radius_below_pi(self):
        with pytest.raises(GeometryError, match="theta0 < pi"):
            make_geometry("spherical_cap", math.pi)

    def test_closed_form_areas(self):
        R = 1.3
        assert make_geometry("flat_disk", R).area() == pytest.approx(math.pi * R * R, rel=1e-15)
        assert make_geometry("spherical_cap", R).area() == pytest.approx(
            2.0 * math.pi * (1.0 - math.cos(R)), rel=1e-15
        )
        assert make_geometry("hyperbolic_disk", R).area() == pytest.approx(
            2.0 * math.pi * (math.cosh(R) - 1.0), rel=1e-15
        )

    def test_boundary_length_is_jacobian_circumference(self):
        g = make_geometry("spherical_cap", 1.1)
        assert g.boundary_length() == pytest.approx(2.0 * math.pi * math.sin(1.1), rel=1e-15)

    def test_model_curvature_data(self):
        flat = make_geometry("flat_disk", 2.0)
        assert flat.sect == 0.0
        assert flat.second_fundamental == pytest.approx(0.5)
        cap = make_geometry("spherical_cap", 1.0)
        assert cap.sect == 1.0
        assert cap.second_fundamental == pytest.approx(1.0 / math.tan(1.0))
        hyp = make_geometry("hyperbolic_disk", 1.0)
        assert hyp.sect == -1.0
        assert hyp.second_fundamental == pytest.approx(1.0 / math.tanh(1.0))

    def test_exact_curvature_bounds_are_tight(self):
        g = make_geometry("hyperbolic_disk", 0.7)
        curv = g.exact_curvature()
        assert curv.k1 == curv.k2 == -1.0
        assert curv.gamma1 == curv.gamma2 == pytest.approx(1.0 / math.tanh(0.7))
        assert curv.d == 2


class TestCurvatureBounds:
    def test_gamma_order(self):
        with pytest.raises(GeometryError, match="exceeds"):
            CurvatureBounds(d=2, k1=0.0, k2=0.0, gamma1=2.0, gamma2=1.0)

    def test_k2_versus_gamma2(self):
        # k2 = -gamma2^2 leaves no first zero for the comparison profile
        with pytest.raises(GeometryError, match="k2 > -gamma2"):
            CurvatureBounds(d=2, k1=-1.0, k2=-1.0, gamma1=0.0, gamma2=1.0)

    def test_n_below_dimension(self):
        with pytest.raises(GeometryError):
            CurvatureBounds(d=3, k1=0.0, k2=0.0, gamma1=0.0, gamma2=1.0, n=2.5)

    def test_n_infinite_allowed(self):
        c = CurvatureBounds(d=3, k1=0.0, k2=0.0, gamma1=0.0, gamma2=1.0, n=math.inf)
        assert c.n == math.inf

    def test_dimension_at_least_two(self):
        with pytest.raises(GeometryError):
            CurvatureBounds(d=1, k1=0.0, k2=0.0, gamma1=0.0, gamma2=1.0)

    def test_flags_default_off(self):
        c = CurvatureBounds(d=2, k1=0.0, k2=0.0, gamma1=0.0, gamma2=1.0)
        assert not c.beta_equals_alpha_on_boundary
        assert not c.h_alpha_integral_nonneg
        assert not c.h_alpha_pointwise_nonneg
        assert not c.ii_lower_positive


class TestRadialProfile:
    def test_constant_derivative_exactly_zero(self):
        p = RadialProfile.constant(3.5)
        assert p(0.4) == 3.5
        assert p.deriv(0.4) == 0.0
        assert np.all(p.deriv(np.linspace(0, 1, 5)) == 0.0)

    def test_from_expression(self):
        p = RadialProfile.from_expression("exp(-r^2)")
        r = np.linspace(0.0, 1.0, 7)
        assert_allclose(p(r), np.exp(-(r**2)), rtol=1e-15)
        assert_allclose(p.deriv(r), -2.0 * r * np.exp(-(r**2)), rtol=1e-14)

    def test_from_callable_finite_differences(self):
        p = RadialProfile.from_callable(np.exp)
        assert p.deriv(0.3) == pytest.approx(math.exp(0.3), rel=1e-9)

    def test_from_callable_explicit_derivative(self):
        p = RadialProfile.from_callable(np.exp, dfn=lambda r: 7.0)
        assert p.deriv(0.3) == 7.0


class TestRadialQuadrature:
    def test_smooth_integral(self):
        quad = RadialQuadrature()
        assert quad.integrate(np.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-14)

    def test_breakpoint_restores_accuracy_at_kink(self):
        quad = RadialQuadrature()
        c = 1.0 / 3.0
        exact = (c**2 + (1.0 - c) ** 2) / 2.0
        with_bp = quad.integrate(lambda x: np.abs(x - c), 0.0, 1.0, breakpoints=[c])
        without = quad.integrate(lambda x: np.abs(x - c), 0.0, 1.0)
        assert with_bp == pytest.approx(exact, abs=1e-14)
        assert abs(without - exact) > abs(with_bp - exact)

    def test_empty_interval(self):
        assert RadialQuadrature().integrate(np.sin, 1.0, 1.0) == 0.0

    def test_validation(self):
        with pytest.raises(GeometryError):
            RadialQuadrature(order=1)
        with pytest.raises(GeometryError):
            RadialQuadrature(panels=0)


class TestNormalizeWeights:
    def test_flat_disk_constant_weights(self, flat_unit):
        one = RadialProfile.constant(1.0)
        w = normalize_weights(flat_unit, one, one)
        # interior mass pi, boundary mass 2 pi, common scale 1/(3 pi)
        assert w.scale == pytest.approx(1.0 / (3.0 * math.pi), rel=1e-13)
        assert w.A == pytest.approx(1.0 / 3.0, rel=1e-13)
        assert w.B == pytest.approx(2.0 / 3.0, rel=1e-13)
        assert abs(w.A + w.B - 1.0) < 1e-14

    def test_flat_disk_weighted_boundary(self, flat_unit):
        w = normalize_weights(flat_unit, RadialProfile.constant(1.0), RadialProfile.constant(2.0))
        assert w.A == pytest.approx(1.0 / 5.0, rel=1e-13)
        assert w.B == pytest.approx(4.0 / 5.0, rel=1e-13)

    def test_hemisphere_splits_evenly(self):
        g = make_geometry("spherical_cap", math.pi / 2.0)
        one = RadialProfile.constant(1.0)
        w = normalize_weights(g, one, one)
        assert w.A == pytest.approx(0.5, rel=1e-13)
        assert w.B == pytest.approx(0.5, rel=1e-13)

    def test_idempotent_on_normalized_pair(self, flat_unit):
        c = 1.0 / (3.0 * math.pi)
        w = normalize_weights(flat_unit, RadialProfile.constant(c), RadialProfile.constant(c))
        assert w.scale == 1.0

    def test_positivity_probe(self, flat_unit):
        with pytest.raises(GeometryError, match="alpha"):
            normalize_weights(
                flat_unit, RadialProfile.from_expression("1 - r"), RadialProfile.constant(1.0)
            )
        with pytest.raises(GeometryError, match="beta"):
            normalize_weights(
                flat_unit, RadialProfile.constant(1.0), RadialProfile.from_expression("r")
            )

    def test_scaled_profiles(self, flat_unit_const):
        w = flat_unit_const
        assert w.alpha(0.5) == pytest.approx(w.scale, rel=1e-15)
        assert w.beta(0.5) == pytest.approx(w.scale, rel=1e-15)

    def test_log_gradient_is_scale_free(self, flat_unit):
        w = normalize_weights(
            flat_unit, RadialProfile.constant(1.0), RadialProfile.from_expression("exp(-(1 - r))")
        )
        r = np.linspace(0.0, 1.0, 9)
        assert_allclose(w.grad_beta_over_beta(r), np.ones_like(r), rtol=1e-14)

    def test_log_gradient_of_constant_is_zero(self, flat_unit_const):
        assert np.all(flat_unit_const.grad_beta_over_beta(np.linspace(0, 1, 5)) == 0.0)


class TestWeightSups:
    def test_constant_ratio(self, flat_unit):
        w = normalize_weights(flat_unit, RadialProfile.constant(1.0), RadialProfile.constant(2.0))
        assert w.beta_over_alpha_sup == pytest.approx(2.0, rel=1e-12)

    def test_gaussian_interior_weight(self, flat_unit):
        w = normalize_weights(
            flat_unit, RadialProfile.from_expression("exp(-r^2)"), RadialProfile.constant(1.0)
        )
        # ratio exp(r^2) peaks on the rim
        assert w.beta_over_alpha_sup == pytest.approx(math.e, rel=1e-10)

    def test_normalized_sups(self, flat_unit_const):
        w = flat_unit_const
        assert w.beta_sup == pytest.approx(1.0 / (3.0 * math.pi), rel=1e-12)
        assert w.A_over_alpha_sup == pytest.approx(math.pi, rel=1e-12)

    @pytest.mark.parametrize("kind", ["flat_disk", "spherical_cap", "hyperbolic_disk"])
    def test_constant_weight_reduction_identity(self, kind):
        # for constants, |beta/alpha|_inf (B/A)^{-1} = |Omega|/|dOmega|
        rng = np.random.default_rng(42)
        g = make_geometry(kind, 1.1)
        for _ in range(10):
            a0, b0 = rng.uniform(0.2, 3.0, size=2)
            w = normalize_weights(g, RadialProfile.constant(a0), RadialProfile.constant(b0))
            lhs = w.beta_over_alpha_sup
            rhs = (w.B / w.A) * (g.area() / g.boundary_length())
            assert lhs == pytest.approx(rhs, rel=1e-11)


class TestSupOnInterval:
    def test_interior_maximum(self):
        val, arg = sup_on_interval(np.sin, 0.0, math.pi)
        assert val == pytest.approx(1.0, abs=1e-12)
        assert arg == pytest.approx(math.pi / 2.0, abs=1e-6)

    def test_boundary_maximum(self):
        val, arg = sup_on_interval(np.exp, 0.0, 1.0)
        assert val == pytest.approx(math.e, rel=1e-13)
        assert arg == pytest.approx(1.0, abs=1e-9)


class TestTubeIntegral:
    def test_full_tube_constant_integrand(self, flat_unit, flat_unit_const):
        # int beta dlambda over the whole disk = scale * pi = 1/3
        val = tube_integral(flat_unit, flat_unit_const, 1.0, lambda rho: np.ones_like(rho))
        assert val == pytest.approx(1.0 / 3.0, rel=1e-13)

    def test_half_tube(self, flat_unit, flat_unit_const):
        val = tube_integral(flat_unit, flat_unit_const, 0.5, lambda rho: np.ones_like(rho))
        assert val == pytest.approx(1.0 / 4.0, rel=1e-13)

    def test_quadratic_damping(self, flat_unit, flat_unit_const):
        # (1 - rho)^2 = r^2 gives 2 pi scale int r^3 = 1/6
        val = tube_integral(flat_unit, flat_unit_const, 1.0, lambda rho: (1.0 - rho) ** 2)
        assert val == pytest.approx(1.0 / 6.0, rel=1e-13)

    def test_depth_clamps_to_inradius(self, flat_unit, flat_unit_const):
        full = tube_integral(flat_unit, flat_unit_const, 1.0, lambda rho: np.ones_like(rho))
        clamped = tube_integral(flat_unit, flat_unit_const, 7.0, lambda rho: np.ones_like(rho))
        assert clamped == full

    def test_nonpositive_depth(self, flat_unit, flat_unit_const):
        with pytest.raises(GeometryError):
            tube_integral(flat_unit, flat_unit_const, 0.0, lambda rho: np.ones_like(rho))
