"""Tests for the P1 eigenvalue solvers and the Richardson extrapolation."""

import math

import numpy as np
import pytest

from stickybounds.geometry import RadialProfile, make_geometry, normalize_weights
from stickybounds.meshing import disk_mesh
from stickybounds.spectral import (
    assemble,
    discrete_entropy,
    discrete_variance,
    estimate_lsi_lower,
    estimate_trace_norm,
    richardson,
    solve_boundary_poincare,
    solve_neumann_poincare,
    solve_no_bd_poincare,
    solve_steklov,
    solve_sticky_poincare,
)

NEUMANN_GAP = 3.3899577166718897  # (j'_{1,1})^2 on the unit disk


@pytest.fixture(scope="module")
def flat_form(flat_unit, flat_unit_const):
    mesh = disk_mesh(flat_unit, 0.1)
    return assemble(flat_unit, flat_unit_const, mesh)


@pytest.fixture(scope="module")
def small_form(flat_unit, flat_unit_const):
    mesh = disk_mesh(flat_unit, 0.15)
    return assemble(flat_unit, flat_unit_const, mesh)


class TestAssembly:
    def test_discrete_masses(self, flat_form):
        assert flat_form.A_disc == pytest.approx(1.0 / 3.0, rel=1e-2)
        assert abs(flat_form.A_disc + flat_form.B_disc - 1.0) < 1e-13

    def test_lumped_masses_positive(self, flat_form):
        assert np.all(flat_form.lumped_int > 0.0)
        assert np.all(flat_form.M_bd_diag[flat_form.boundary_idx] > 0.0)

    def test_stiffness_annihilates_constants(self, flat_form):
        ones = np.ones(flat_form.n)
        assert np.linalg.norm(flat_form.K_int @ ones, np.inf) < 1e-12
        assert np.linalg.norm(flat_form.K_bd @ ones, np.inf) < 1e-12


class TestEigenvalueSolvers:
    def test_neumann_gap(self, flat_form):
        est = solve_neumann_poincare(flat_form)
        assert est.eigenvalue == pytest.approx(NEUMANN_GAP, rel=1e-2)
        assert est.value == pytest.approx(1.0 / NEUMANN_GAP, rel=1e-2)
        assert est.residual < 1e-8

    def test_boundary_circle_gap(self, flat_form):
        # first nonzero eigenvalue of the unit circle is 1
        est = solve_boundary_poincare(flat_form)
        assert est.value == pytest.approx(1.0, rel=5e-3)
        assert est.residual < 1e-8

    def test_steklov_unit_disk(self, flat_form):
        est = solve_steklov(flat_form)
        assert est.value == pytest.approx(1.0, rel=2e-2)
        assert est.residual < 1e-8

    def test_sticky_between_parts(self, flat_form):
        sticky = solve_sticky_poincare(flat_form)
        interior = solve_neumann_poincare(flat_form)
        boundary = solve_boundary_poincare(flat_form)
        # mixture constant dominates both restricted ones
        assert sticky.value >= interior.value - 1e-12
        assert sticky.value >= 0.2 * boundary.value
        assert sticky.residual < 1e-8

    def test_no_bd_exceeds_sticky(self, flat_form):
        # dropping the boundary Dirichlet energy can only slow mixing
        no_bd = solve_no_bd_poincare(flat_form)
        sticky = solve_sticky_poincare(flat_form)
        assert no_bd.value > sticky.value

    def test_trace_norm(self, flat_form):
        est = estimate_trace_norm(flat_form)
        # sqrt of the largest trace/energy ratio; frozen from this mesh family
        assert est.value == pytest.approx(1.5, rel=5e-2)
        assert est.value < math.sqrt(3.0)

    def test_dense_and_sparse_agree(self, flat_form):
        dense = solve_sticky_poincare(flat_form, dense_cutoff=10**6)
        sparse = solve_sticky_poincare(flat_form, dense_cutoff=1)
        assert dense.method == "dense"
        assert sparse.method == "sparse"
        assert sparse.value == pytest.approx(dense.value, rel=1e-8)


class TestDiscreteFunctionals:
    def test_variance_two_point(self):
        w = np.array([0.5, 0.5])
        f = np.array([0.0, 2.0])
        assert discrete_variance(w, f) == pytest.approx(1.0, rel=1e-15)

    def test_variance_shift_invariant(self):
        rng = np.random.default_rng(2)
        w = rng.uniform(0.1, 1.0, 40)
        w /= w.sum()
        f = rng.normal(size=40)
        assert discrete_variance(w, f + 3.7) == pytest.approx(
            discrete_variance(w, f), rel=1e-12
        )

    def test_entropy_two_point(self):
        w = np.array([0.5, 0.5])
        g = np.array([0.0, 2.0])
        # Ent(g) = E[g log g] - E[g] log E[g] = log 2
        assert discrete_entropy(w, g) == pytest.approx(math.log(2.0), rel=1e-14)

    def test_entropy_nonnegative_and_zero_on_constants(self):
        rng = np.random.default_rng(3)
        w = rng.uniform(0.1, 1.0, 30)
        w /= w.sum()
        assert discrete_entropy(w, np.full(30, 2.5)) == pytest.approx(0.0, abs=1e-14)
        for _ in range(20):
            g = rng.uniform(0.0, 4.0, 30)
            assert discrete_entropy(w, g) >= -1e-14

    def test_entropy_rejects_negative(self):
        with pytest.raises(ValueError):
            discrete_entropy(np.array([0.5, 0.5]), np.array([1.0, -1.0]))

    def test_entropy_homogeneous(self):
        rng = np.random.default_rng(4)
        w = rng.uniform(0.1, 1.0, 25)
        w /= w.sum()
        g = rng.uniform(0.0, 3.0, 25)
        assert discrete_entropy(w, 5.0 * g) == pytest.approx(
            5.0 * discrete_entropy(w, g), rel=1e-12
        )

    def test_rothaus_lemma(self):
        # Ent(f^2) <= Ent(ftilde^2) + 2 Var(f), ftilde = f - mean
        rng = np.random.default_rng(11)
        for _ in range(50):
            n = rng.integers(3, 40)
            w = rng.uniform(0.05, 1.0, n)
            w /= w.sum()
            f = rng.normal(0.0, 2.0, n)
            mean = float(w @ f)
            lhs = discrete_entropy(w, f**2)
            rhs = discrete_entropy(w, (f - mean) ** 2) + 2.0 * discrete_variance(w, f)
            assert lhs <= rhs + 1e-12


class TestLsiLower:
    @pytest.mark.parametrize(
        "which,solver",
        [
            ("sticky", solve_sticky_poincare),
            ("interior", solve_neumann_poincare),
            ("boundary", solve_boundary_poincare),
        ],
    )
    def test_dominates_twice_poincare(self, small_form, which, solver):
        # small perturbations 1 + eps u give Ent((1+eps u)^2) ~ 2 eps^2 Var(u),
        # so the ascent must reach at least 2x the matching Poincare constant
        est = estimate_lsi_lower(small_form, which, seed=0, restarts=4, iters=200)
        twice = 2.0 * solver(small_form).value
        assert est.value >= twice * (1.0 - 5e-3)
        assert est.value <= twice * 1.2
        assert est.which == which
        expected_ndof = len(small_form.boundary_idx) if which == "boundary" else small_form.n
        assert est.ndof == expected_ndof

    def test_deterministic_for_fixed_seed(self, small_form):
        a = estimate_lsi_lower(small_form, "sticky", seed=7, restarts=2, iters=50)
        b = estimate_lsi_lower(small_form, "sticky", seed=7, restarts=2, iters=50)
        assert a.value == b.value

    def test_unknown_functional(self, small_form):
        with pytest.raises(ValueError):
            estimate_lsi_lower(small_form, "bogus")


class TestRichardson:
    def test_synthetic_second_order(self):
        hs = (0.2, 0.1, 0.05)
        exact = 1.7
        values = [exact + 3.0 * h**2 for h in hs]
        res = richardson(hs, values)
        assert res.value == pytest.approx(exact, rel=1e-10)
        assert res.order == pytest.approx(2.0, abs=1e-6)
        assert res.monotone

    def test_synthetic_fractional_order(self):
        hs = (0.4, 0.2, 0.1, 0.05)
        exact = -0.3
        values = [exact + 2.0 * h**1.7 for h in hs]
        res = richardson(hs, values)
        assert res.value == pytest.approx(exact, rel=1e-6)
        assert res.order == pytest.approx(1.7, abs=1e-3)

    def test_non_monotone_flagged(self):
        res = richardson((0.2, 0.1, 0.05), (1.0, 1.5, 1.4))
        assert not res.monotone
        assert res.value == 1.4
        assert math.isnan(res.order)

    def test_non_contracting_flagged(self):
        res = richardson((0.2, 0.1, 0.05), (1.0, 1.1, 1.3))
        assert not res.monotone
        assert res.value == 1.3

    def test_validation(self):
        with pytest.raises(ValueError):
            richardson((0.2, 0.1), (1.0, 1.1))
        with pytest.raises(ValueError):
            richardson((0.1, 0.2, 0.3), (1.0, 1.1, 1.2))
