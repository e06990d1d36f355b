"""Tests for grid evaluation, quadrature and hybrid-field diagnostics."""

import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_density
from hybridwigner import states, wigner
from hybridwigner.errors import CompositionError, InvalidParameterError, NumericError
from hybridwigner.grids import DEFAULT_CV_GRID, CvGrid, SphereGrid
from hybridwigner.operators import Operator, identity, partial_trace, pauli, tensor
from oracles import (
    SQRT3,
    coherent_wigner,
    even_cat_wigner,
    excited_wigner,
    fock1_negativity,
    fock_wigner,
)


class TestGrids:
    def test_cv_weights_sum_to_area(self):
        g = CvGrid((-2, 3), (-1, 1), 11, 21)
        assert g.weights.sum() == pytest.approx(10 / np.pi)

    def test_sphere_weights_total(self):
        for rule in ("gauss", "midpoint"):
            assert SphereGrid(20, 40, rule).weights.sum() == pytest.approx(2, abs=1e-10)

    def test_default_shapes(self):
        assert DEFAULT_CV_GRID.shape == (201, 201)
        assert SphereGrid().shape == (64, 128)

    def test_index_of(self):
        g = CvGrid()
        i, j = g.index_of(3.0 - 3.0j)
        assert g.alphas[i, j] == pytest.approx(3.0 - 3.0j)
        assert g.index_of(0.01) is None

    def test_round_trip(self):
        g = CvGrid((-1, 2), (-3, 3), 5, 7)
        assert CvGrid.from_dict(g.to_dict()) == g
        s = SphereGrid(5, 9, "midpoint")
        assert SphereGrid.from_dict(s.to_dict()) == s

    def test_invalid(self):
        with pytest.raises(InvalidParameterError):
            CvGrid(n_re=1)
        with pytest.raises(InvalidParameterError):
            CvGrid(re_range=(1, -1))
        with pytest.raises(InvalidParameterError):
            SphereGrid(rule="simpson")


class TestEvaluateCv:
    def test_vacuum_gaussian(self, small_cv):
        w = wigner.evaluate_cv(states.fock(0, 10).proj(), small_cv)
        np.testing.assert_allclose(w, coherent_wigner(0, small_cv.alphas), atol=1e-8)

    def test_fock1_origin(self):
        g = CvGrid((-1, 1), (-1, 1), 3, 3)
        assert wigner.evaluate_cv(states.fock(1, 10).proj(), g)[1, 1] == pytest.approx(-2)

    @pytest.mark.parametrize("n", [2, 3, 7])
    def test_fock_laguerre(self, small_cv, n):
        w = wigner.evaluate_cv(states.fock(n, 20).proj(), small_cv)
        np.testing.assert_allclose(w, fock_wigner(n, small_cv.alphas), atol=1e-10)

    def test_cat_fringe(self):
        g = CvGrid((-0.1, 0.1), (-1, 1), 3, 201)
        w = wigner.evaluate_cv(states.cat(3, dim_field=60).proj(), g)
        np.testing.assert_allclose(w, even_cat_wigner(3, g.alphas), atol=1e-8)
        centre = w[1]
        assert abs(centre[100]) == pytest.approx(2, abs=1e-8)
        # zero crossings of cos(12 Im alpha) are spaced pi/12 apart
        im = g.im
        crossings = im[:-1][np.sign(centre[:-1]) != np.sign(centre[1:])]
        assert np.diff(crossings).mean() == pytest.approx(np.pi / 12, abs=0.02)

    def test_non_hermitian_is_complex(self, small_cv):
        a = Operator(np.triu(np.ones((4, 4))), 4)
        w = wigner.evaluate_cv(a, small_cv)
        assert np.iscomplexobj(w) and np.abs(w.imag).max() > 0.1

    def test_rejects_qubit_operator(self, small_cv):
        with pytest.raises(CompositionError):
            wigner.evaluate_cv(pauli("z"), small_cv)

    def test_threads_do_not_change_result(self, small_cv, monkeypatch):
        rho = states.coherent(1 + 1j, 20).proj()
        serial = wigner.evaluate_cv(rho, small_cv)
        monkeypatch.setenv(wigner.THREADS_ENV, "4")
        monkeypatch.setattr(wigner, "_KERNEL_BUDGET", 20 * 20 * 37)
        parallel = wigner.evaluate_cv(rho, small_cv)
        np.testing.assert_array_equal(serial, parallel)


class TestEvaluateDv:
    def test_excited(self, small_sphere):
        w = wigner.evaluate_dv(states.excited().proj(), small_sphere)
        np.testing.assert_allclose(w, excited_wigner(small_sphere.mesh()[0]), atol=1e-12)

    def test_excited_zero_crossing(self):
        theta = np.arccos(-1 / SQRT3)
        assert excited_wigner(theta) == pytest.approx(0, abs=1e-15)

    def test_sigma_z(self, small_sphere):
        w = wigner.evaluate_dv(pauli("z"), small_sphere)
        np.testing.assert_allclose(w, SQRT3 * np.cos(small_sphere.mesh()[0]), atol=1e-12)
        assert wigner.integrate(w, sphere_grid=small_sphere) == pytest.approx(0, abs=1e-10)

    def test_maximally_mixed(self, small_sphere):
        w = wigner.evaluate_dv(identity(1, 2) / 2, small_sphere)
        np.testing.assert_allclose(w, 0.5, atol=1e-14)

    def test_rejects_field_operator(self, small_sphere):
        with pytest.raises(CompositionError):
            wigner.evaluate_dv(identity(3), small_sphere)


class TestIntegrate:
    def test_vacuum_window_five(self):
        g = CvGrid((-5, 5), (-5, 5), 101, 101)
        w = wigner.evaluate_cv(states.fock(0, 10).proj(), g)
        assert wigner.integrate(w, cv_grid=g) == pytest.approx(1, abs=1e-6)

    @pytest.mark.parametrize("axis", "xyz")
    def test_pauli_zero(self, axis):
        g = SphereGrid()
        w = wigner.evaluate_dv(pauli(axis), g)
        assert wigner.integrate(w, sphere_grid=g) == pytest.approx(0, abs=1e-10)

    def test_trace_of_operator(self, small_sphere):
        op = Operator(np.array([[2.0, 1 - 1j], [1 + 1j, -0.5]]), 1, 2)
        w = wigner.evaluate_dv(op, small_sphere)
        assert wigner.integrate(w, sphere_grid=small_sphere) == pytest.approx(1.5)

    def test_needs_one_grid(self, small_cv):
        with pytest.raises(InvalidParameterError):
            wigner.integrate(np.zeros(small_cv.shape))

    def test_non_finite(self, small_cv):
        bad = np.full(small_cv.shape, np.nan)
        with pytest.raises(NumericError):
            wigner.integrate(bad, cv_grid=small_cv)


class TestNegativity:
    def test_vacuum(self):
        w = wigner.evaluate_cv(states.fock(0, 10).proj())
        assert wigner.negativity_volume(w, cv_grid=DEFAULT_CV_GRID) == pytest.approx(0, abs=1e-8)

    def test_fock1(self):
        w = wigner.evaluate_cv(states.fock(1, 10).proj())
        value = wigner.negativity_volume(w, cv_grid=DEFAULT_CV_GRID)
        assert value == pytest.approx(fock1_negativity(), abs=1e-3)
        assert fock1_negativity() == pytest.approx(0.21306131942526685, abs=1e-15)


class TestHybrid:
    def test_product_factorises(self, small_cv, small_sphere):
        rf = states.coherent(0.7 - 0.2j, 20).proj()
        ra = states.qubit(0.6, 0.8j).proj()
        field = wigner.evaluate_hybrid(tensor(rf, ra), small_cv, small_sphere)
        wf = wigner.evaluate_cv(rf, small_cv)
        wa = wigner.evaluate_dv(ra, small_sphere)
        np.testing.assert_allclose(field.values, np.einsum("ij,kl->ijkl", wf, wa), atol=1e-9)

    def test_matches_direct_trace(self, rng):
        from hybridwigner.kernels import hybrid_kernel

        rho = random_density(rng, 6, 2)
        cv = CvGrid((-1, 1), (-0.5, 0.5), 3, 3)
        sp = SphereGrid(4, 5)
        field = wigner.evaluate_hybrid(rho, cv, sp)
        theta, phi = sp.mesh()
        for (i, j), alpha in np.ndenumerate(cv.alphas):
            for k in range(4):
                for l in range(5):
                    k_op = hybrid_kernel(alpha, theta[k, l], phi[k, l], 6)
                    direct = np.trace(rho.data @ k_op.data).real
                    assert field.values[i, j, k, l] == pytest.approx(direct, abs=1e-12)

    def test_bounded(self, small_cv, small_sphere):
        field = wigner.evaluate_hybrid(states.bell_cat(2.0, 30).proj(), small_cv, small_sphere)
        assert np.abs(field.values).max() <= 1 + SQRT3 + 1e-9

    def test_slabs_cover_values(self, small_cv, small_sphere, monkeypatch):
        field = wigner.evaluate_hybrid(states.bell_fock("+", 4).proj(), small_cv, small_sphere)
        monkeypatch.setattr(wigner, "_SLAB_BUDGET", 1)
        rows = [s for s, _, _ in field.iter_slabs()]
        assert rows == list(range(small_cv.n_re))
        full = np.concatenate([v for _, _, v in field.iter_slabs()])
        np.testing.assert_array_equal(full, field.values)

    def test_from_values_round_trip(self, small_cv, small_sphere):
        field = wigner.evaluate_hybrid(states.bell_fock("-", 4).proj(), small_cv, small_sphere)
        copy = wigner.HybridField.from_values(field.values, small_cv, small_sphere)
        assert wigner.integrate(copy) == pytest.approx(wigner.integrate(field), abs=1e-14)

    def test_sphere_slice_needs_node(self, small_cv, small_sphere):
        field = wigner.evaluate_hybrid(states.bell_fock("+", 4).proj(), small_cv, small_sphere)
        with pytest.raises(InvalidParameterError):
            field.sphere_slice(0.05)

    def test_rejects_field_only(self, small_cv, small_sphere):
        with pytest.raises(CompositionError):
            wigner.evaluate_hybrid(states.fock(0, 4).proj(), small_cv, small_sphere)


class TestMarginals:
    def test_product_cv_marginal(self, small_cv, small_sphere):
        rho = tensor(states.fock(0, 10), states.excited()).proj()
        field = wigner.evaluate_hybrid(rho, small_cv, small_sphere)
        np.testing.assert_allclose(wigner.marginal(field, "cv"),
                                   coherent_wigner(0, small_cv.alphas), atol=1e-10)

    def test_bell_cat_dv_marginal(self):
        cv = CvGrid((-6, 6), (-6, 6), 121, 121)
        sp = SphereGrid(8, 16)
        field = wigner.evaluate_hybrid(states.bell_cat(3).proj(), cv, sp)
        np.testing.assert_allclose(wigner.marginal(field, "dv"), 0.5, atol=1e-6)

    @pytest.mark.parametrize("seed", range(5))
    def test_commutes_with_partial_trace(self, seed, small_sphere):
        rho = random_density(np.random.default_rng(seed), 5, 2)
        cv = CvGrid((-6, 6), (-6, 6), 121, 121)
        field = wigner.evaluate_hybrid(rho, cv, small_sphere)
        wf, wa = wigner.reduced_fields(rho, cv, small_sphere)
        assert np.abs(wigner.marginal(field, "cv") - wf).max() < 1e-6
        assert np.abs(wigner.marginal(field, "dv") - wa).max() < 1e-6

    def test_bad_keep(self, small_cv, small_sphere):
        field = wigner.evaluate_hybrid(states.bell_fock("+", 4).proj(), small_cv, small_sphere)
        with pytest.raises(InvalidParameterError):
            wigner.marginal(field, "both")


class TestMaxAbs:
    def test_product(self, small_cv, small_sphere):
        rho = tensor(states.fock(0, 10), states.excited()).proj()
        field = wigner.evaluate_hybrid(rho, small_cv, small_sphere)
        # the Gauss nodes miss theta = 0 exactly, so compare with the grid maximum
        dv_max = np.abs(wigner.evaluate_dv(states.excited().proj(), small_sphere)).max()
        expected = np.abs(coherent_wigner(0, small_cv.alphas)) * dv_max
        np.testing.assert_allclose(wigner.max_abs_per_alpha(field), expected, atol=1e-9)

    def test_zero_field(self, small_cv, small_sphere):
        field = wigner.HybridField.from_values(
            np.zeros(small_cv.shape + small_sphere.shape), small_cv, small_sphere)
        assert not wigner.max_abs_per_alpha(field).any()

    def test_bell_cat(self, small_sphere):
        cv = CvGrid((-4, 4), (-4, 4), 9, 9)
        field = wigner.evaluate_hybrid(states.bell_cat(3).proj(), cv, small_sphere)
        m = wigner.max_abs_per_alpha(field)
        lobe = m[cv.index_of(3.0)]
        assert lobe == pytest.approx(m[cv.index_of(-3.0)], rel=1e-10)
        assert lobe > 1.3
        assert m[cv.index_of(0.0)] > 0.1


class TestCorrelation:
    def test_self(self, rng):
        a = rng.normal(size=(5, 6))
        assert wigner.shape_correlation(a, a) == pytest.approx(1)
        assert wigner.shape_correlation(a, -3 * a + 2) == pytest.approx(-1)

    def test_constant(self):
        with pytest.raises(NumericError):
            wigner.shape_correlation(np.ones(4), np.arange(4))


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 1), st.integers(0, 2**31 - 1))
def test_linearity_in_the_operator(p, seed):
    rng = np.random.default_rng(seed)
    r1, r2 = random_density(rng, 4), random_density(rng, 4)
    g = CvGrid((-2, 2), (-2, 2), 7, 7)
    mixed = wigner.evaluate_cv(states.mixture([p, 1 - p], [r1, r2]), g)
    combo = p * wigner.evaluate_cv(r1, g) + (1 - p) * wigner.evaluate_cv(r2, g)
    np.testing.assert_allclose(mixed, combo, atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_density_fields_are_bounded(seed):
    rho = random_density(np.random.default_rng(seed), 6, 2)
    field = wigner.evaluate_hybrid(rho, CvGrid((-2, 2), (-2, 2), 9, 9), SphereGrid(6, 8))
    assert np.abs(field.values).max() <= 1 + SQRT3 + 1e-9
    wf, wa = wigner.reduced_fields(rho, CvGrid((-2, 2), (-2, 2), 9, 9), SphereGrid(6, 8))
    assert np.abs(wf).max() <= 2 + 1e-9
    assert np.abs(wa).max() <= (1 + SQRT3) / 2 + 1e-9
