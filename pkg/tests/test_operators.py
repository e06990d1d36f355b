"""Tests for the dense operator layer."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_density, random_hermitian
from hybridwigner.errors import (
    CompositionError,
    InvalidDimensionError,
    NothingToTraceError,
    NumericError,
)
from hybridwigner.operators import (
    Ket,
    Operator,
    annihilation,
    commutator,
    creation,
    density_report,
    identity,
    matrix_exponential,
    number,
    partial_trace,
    pauli,
    projector,
    sigma_minus,
    sigma_plus,
    tensor,
)
from hybridwigner.states import bell_fock, fock


class TestLadderOperators:
    def test_annihilation_dim2(self):
        np.testing.assert_array_equal(annihilation(2).data, [[0, 1], [0, 0]])

    def test_annihilation_dim3_entry(self):
        a = annihilation(3)
        assert a.data[1, 2] == pytest.approx(np.sqrt(2))
        # action on |2> lands on sqrt(2)|1>
        np.testing.assert_allclose((a @ fock(2, 3)).data, [0, np.sqrt(2), 0])

    def test_annihilates_vacuum(self):
        out = annihilation(6) @ fock(0, 6)
        np.testing.assert_array_equal(out.data, np.zeros(6))

    def test_small_dimension_rejected(self):
        with pytest.raises(InvalidDimensionError):
            annihilation(1)

    def test_creation_is_adjoint(self):
        np.testing.assert_array_equal(creation(5).data, annihilation(5).data.conj().T)

    def test_number_diagonal(self):
        np.testing.assert_allclose(np.diag(number(5).data).real, np.arange(5))

    @pytest.mark.parametrize("n", [2, 5, 17])
    def test_truncated_commutator(self, n):
        """[a, a^dag] is the identity except for the top Fock level."""
        c = commutator(annihilation(n), creation(n)).data
        np.testing.assert_allclose(c[: n - 1, : n - 1], np.eye(n - 1), atol=1e-12)
        assert c[n - 1, n - 1] == pytest.approx(1 - n)
        off = c - np.diag(np.diag(c))
        assert np.abs(off).max() < 1e-12


class TestPauli:
    def test_z(self):
        np.testing.assert_array_equal(pauli("z").data, np.diag([1, -1]))

    def test_squares(self):
        for axis in "xyz":
            p = pauli(axis)
            assert (p @ p).allclose(identity(1, 2))
            assert p.dims == (1, 2)

    def test_traceless(self):
        for axis in "xyz":
            assert abs(pauli(axis).tr()) == 0

    def test_ladder(self):
        sp, sm = sigma_plus(), sigma_minus()
        # sigma_+ raises |g> (index 1) to |e> (index 0)
        np.testing.assert_array_equal(sp.data, [[0, 1], [0, 0]])
        assert (sp.dag()).allclose(sm)

    def test_unknown_axis(self):
        with pytest.raises(ValueError):
            pauli("w")


class TestTensor:
    def test_identity(self):
        assert tensor(identity(2), identity(1, 2)).allclose(identity(2, 2))

    def test_basis_order(self):
        op = tensor(projector(0, 3), projector(0, 1, 2))
        nz = np.argwhere(np.abs(op.data) > 0)
        np.testing.assert_array_equal(nz, [[0, 0]])

    def test_field_major_index(self):
        psi = tensor(fock(2, 4), Ket([0, 1], 1, 2))  # |2, g>
        assert np.argmax(np.abs(psi.data)) == 2 * 2 + 1

    def test_trace_factorises(self, rng):
        for _ in range(5):
            a = Operator(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)), 3)
            b = Operator(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)), 1, 2)
            brute = np.trace(np.kron(a.data, b.data))
            assert tensor(a, b).tr() == pytest.approx(brute, abs=1e-12)
            assert tensor(a, b).tr() == pytest.approx(a.tr() * b.tr(), abs=1e-12)

    def test_wrong_roles(self):
        with pytest.raises(CompositionError):
            tensor(pauli("x"), identity(3))
        with pytest.raises(CompositionError):
            tensor(identity(3), identity(3))


class TestPartialTrace:
    def test_product(self, rng):
        rf = random_density(rng, 4)
        ra = random_density(rng, 1, 2)
        joint = tensor(rf, ra)
        assert partial_trace(joint, "field").allclose(rf)
        assert partial_trace(joint, "atom").allclose(ra)

    def test_product_with_unnormalised_atom(self, rng):
        rf = random_density(rng, 3)
        ra = Operator(np.array([[2.0, 0.3], [0.3, 0.5]]), 1, 2)
        out = partial_trace(tensor(rf, ra), "field")
        np.testing.assert_allclose(out.data, rf.data * 2.5, atol=1e-12)

    def test_bell_fock_reduced_atom(self):
        r = partial_trace(bell_fock("+", 4).proj(), "atom")
        np.testing.assert_allclose(r.data, np.eye(2) / 2, atol=1e-15)

    def test_bell_fock_reduced_field(self):
        r = partial_trace(bell_fock("-", 4).proj(), "field")
        np.testing.assert_allclose(r.data, np.diag([0.5, 0.5, 0, 0]), atol=1e-15)

    def test_trace_preserved(self, rng):
        rho = random_density(rng, 5, 2)
        for keep in ("field", "atom"):
            assert partial_trace(rho, keep).tr() == pytest.approx(rho.tr(), abs=1e-12)

    def test_nothing_to_trace(self):
        with pytest.raises(NothingToTraceError):
            partial_trace(projector(0, 3), "field")

    def test_bad_keep(self, rng):
        with pytest.raises(ValueError):
            partial_trace(random_density(rng, 2, 2), "both")


class TestMatrixExponential:
    def test_zero(self):
        assert matrix_exponential(Operator(np.zeros((3, 3)), 3)).allclose(identity(3))

    def test_diagonal_closed_form(self):
        out = matrix_exponential(pauli("z") * (1j * np.pi / 2))
        np.testing.assert_allclose(out.data, np.diag([1j, -1j]), atol=1e-15)

    @pytest.mark.parametrize("n", [2, 5, 8])
    def test_inverse(self, rng, n):
        h = Operator(random_hermitian(rng, n), n)
        prod = matrix_exponential(h * 1j) @ matrix_exponential(h * -1j)
        np.testing.assert_allclose(prod.data, np.eye(n), atol=1e-10)

    def test_hermitian_matches_eigendecomposition(self, rng):
        h = random_hermitian(rng, 6)
        w, v = np.linalg.eigh(h)
        ref = v @ np.diag(np.exp(-0.7j * w)) @ v.conj().T
        out = matrix_exponential(Operator(h, 6) * -0.7j)
        assert np.linalg.norm(out.data - ref, 2) / np.linalg.norm(ref, 2) < 1e-12

    def test_non_finite(self):
        with pytest.raises(NumericError):
            matrix_exponential(Operator(np.array([[np.nan, 0], [0, 1]]), 2))


class TestContainers:
    def test_immutable(self):
        op = identity(3)
        with pytest.raises(ValueError):
            op.data[0, 0] = 5

    def test_shape_check(self):
        with pytest.raises(InvalidDimensionError):
            Operator(np.eye(3), 2)
        with pytest.raises(InvalidDimensionError):
            Operator(np.eye(4), 2, 3)

    def test_ket_norm_and_fidelity(self):
        k = Ket([3, 4j], 2)
        assert k.norm() == pytest.approx(5)
        assert k.normalized().fidelity(Ket([0, 1], 2)) == pytest.approx(16 / 25)

    def test_density_report(self, rng):
        rep = density_report(random_density(rng, 3, 2))
        assert rep["valid"]
        assert rep["trace_real"] == pytest.approx(1)
        assert rep["purity"] < 1
        bad = density_report(Operator(np.diag([1.5, -0.5]), 2))
        assert not bad["valid"]
        assert bad["min_eigenvalue"] == pytest.approx(-0.5)

    def test_expect_ket_and_density(self):
        psi = fock(3, 6)
        assert number(6).expect(psi) == pytest.approx(3)
        assert number(6).expect(psi.proj()) == pytest.approx(3)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**31 - 1))
def test_partial_traces_are_consistent(dim, seed):
    """Tracing both ways and then the remainder always gives the full trace."""
    rho = random_density(np.random.default_rng(seed), dim, 2)
    rf, ra = partial_trace(rho, "field"), partial_trace(rho, "atom")
    assert rf.tr() == pytest.approx(1, abs=1e-12)
    assert ra.tr() == pytest.approx(1, abs=1e-12)
    assert rf.is_hermitian() and ra.is_hermitian()
    assert np.linalg.eigvalsh(rf.data).min() > -1e-12
