"""Dense operators and kets on a truncated field (x) qubit Hilbert space.

Basis order is field-major: ``index = n * dim_atom + level`` with level 0 the
excited state |e> and level 1 the ground state |g>.  ``dim_atom == 1`` means
there is no qubit factor, ``dim_field == 1`` means there is no field factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Number

import numpy as np
import scipy.linalg

from .errors import (
    CompositionError,
    InvalidDimensionError,
    NothingToTraceError,
    NumericError,
)

__all__ = [
    "Operator",
    "Ket",
    "annihilation",
    "creation",
    "number",
    "identity",
    "pauli",
    "sigma_plus",
    "sigma_minus",
    "projector",
    "tensor",
    "partial_trace",
    "matrix_exponential",
    "commutator",
    "density_report",
]


def _frozen(arr):
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


def _check_dims(dim_field, dim_atom):
    if int(dim_field) != dim_field or dim_field < 1:
        raise InvalidDimensionError(f"dim_field must be a positive integer, got {dim_field}")
    if dim_atom not in (1, 2):
        raise InvalidDimensionError(f"dim_atom must be 1 or 2, got {dim_atom}")


@dataclass(frozen=True, eq=False)
class Operator:
    """Square complex matrix tagged with its field/atom factor dimensions."""

    data: np.ndarray
    dim_field: int
    dim_atom: int = 1

    def __post_init__(self):
        _check_dims(self.dim_field, self.dim_atom)
        data = _frozen(self.data)
        side = self.dim_field * self.dim_atom
        if data.shape != (side, side):
            raise InvalidDimensionError(
                f"expected a {side}x{side} matrix for dims "
                f"({self.dim_field}, {self.dim_atom}), got shape {data.shape}"
            )
        object.__setattr__(self, "data", data)

    @property
    def dims(self):
        return (self.dim_field, self.dim_atom)

    @property
    def shape(self):
        return self.data.shape

    def _like(self, data):
        return Operator(data, self.dim_field, self.dim_atom)

    def _same_dims(self, other):
        if self.dims != other.dims:
            raise CompositionError(f"dimension mismatch: {self.dims} vs {other.dims}")

    def __matmul__(self, other):
        if isinstance(other, Ket):
            self._same_dims(other)
            return Ket(self.data @ other.data, self.dim_field, self.dim_atom)
        if isinstance(other, Operator):
            self._same_dims(other)
            return self._like(self.data @ other.data)
        return NotImplemented

    def __add__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        self._same_dims(other)
        return self._like(self.data + other.data)

    def __sub__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        self._same_dims(other)
        return self._like(self.data - other.data)

    def __mul__(self, scalar):
        if not isinstance(scalar, Number):
            return NotImplemented
        return self._like(self.data * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)

    def __neg__(self):
        return self._like(-self.data)

    def dag(self):
        return self._like(self.data.conj().T)

    def tr(self):
        return complex(np.trace(self.data))

    def is_hermitian(self, atol=1e-12):
        return bool(np.allclose(self.data, self.data.conj().T, rtol=0, atol=atol))

    def allclose(self, other, atol=1e-12):
        return self.dims == other.dims and bool(
            np.allclose(self.data, other.data, rtol=0, atol=atol)
        )

    def expect(self, state):
        """<psi|A|psi> for a ket, Tr[A rho] for a density operator."""
        if isinstance(state, Ket):
            return complex(np.vdot(state.data, self.data @ state.data))
        return complex(np.sum(self.data.T * state.data))


@dataclass(frozen=True, eq=False)
class Ket:
    """Complex amplitude vector in the same basis order as :class:`Operator`."""

    data: np.ndarray
    dim_field: int
    dim_atom: int = 1

    def __post_init__(self):
        _check_dims(self.dim_field, self.dim_atom)
        data = _frozen(self.data).ravel()
        if data.shape != (self.dim_field * self.dim_atom,):
            raise InvalidDimensionError(
                f"expected {self.dim_field * self.dim_atom} amplitudes, got {data.size}"
            )
        object.__setattr__(self, "data", data)

    @property
    def dims(self):
        return (self.dim_field, self.dim_atom)

    def norm(self):
        return float(np.linalg.norm(self.data))

    def normalized(self):
        nrm = self.norm()
        if nrm == 0 or not np.isfinite(nrm):
            raise NumericError("cannot normalize a zero or non-finite vector")
        return Ket(self.data / nrm, self.dim_field, self.dim_atom)

    def inner(self, other):
        """<self|other>."""
        if self.dims != other.dims:
            raise CompositionError(f"dimension mismatch: {self.dims} vs {other.dims}")
        return complex(np.vdot(self.data, other.data))

    def fidelity(self, other):
        return abs(self.inner(other)) ** 2

    def proj(self):
        return Operator(np.outer(self.data, self.data.conj()), self.dim_field, self.dim_atom)

    def __add__(self, other):
        if not isinstance(other, Ket):
            return NotImplemented
        if self.dims != other.dims:
            raise CompositionError(f"dimension mismatch: {self.dims} vs {other.dims}")
        return Ket(self.data + other.data, self.dim_field, self.dim_atom)

    def __sub__(self, other):
        return self + (-1) * other

    def __mul__(self, scalar):
        if not isinstance(scalar, Number):
            return NotImplemented
        return Ket(self.data * scalar, self.dim_field, self.dim_atom)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)


def annihilation(dim_field):
    """Truncated lowering operator, <m|a|n> = sqrt(n) delta_{m,n-1}."""
    if dim_field < 2:
        raise InvalidDimensionError(f"annihilation needs dim_field >= 2, got {dim_field}")
    return Operator(np.diag(np.sqrt(np.arange(1, dim_field)), k=1), dim_field)


def creation(dim_field):
    return annihilation(dim_field).dag()


def number(dim_field):
    return Operator(np.diag(np.arange(dim_field, dtype=float)), dim_field)


def identity(dim_field=1, dim_atom=1):
    return Operator(np.eye(dim_field * dim_atom), dim_field, dim_atom)


_PAULI = {
    "x": [[0, 1], [1, 0]],
    "y": [[0, -1j], [1j, 0]],
    "z": [[1, 0], [0, -1]],
}


def pauli(axis):
    """Pauli matrix on the qubit factor alone (|e> is the +1 eigenstate of z)."""
    try:
        return Operator(_PAULI[axis], 1, 2)
    except KeyError:
        raise InvalidDimensionError(f"unknown Pauli axis {axis!r}") from None


def sigma_plus():
    """(sx + i sy)/2 = |e><g|."""
    return (pauli("x") + 1j * pauli("y")) / 2


def sigma_minus():
    return sigma_plus().dag()


def projector(index, dim_field=1, dim_atom=1):
    data = np.zeros((dim_field * dim_atom,) * 2)
    data[index, index] = 1.0
    return Operator(data, dim_field, dim_atom)


def tensor(a, b):
    """Kronecker product of a field-only factor with an atom-only factor."""
    if a.dim_atom != 1 or b.dim_field != 1:
        raise CompositionError(
            "tensor expects (field-only, atom-only) operands, got dims "
            f"{a.dims} and {b.dims}"
        )
    if isinstance(a, Ket) and isinstance(b, Ket):
        return Ket(np.kron(a.data, b.data), a.dim_field, b.dim_atom)
    if isinstance(a, Operator) and isinstance(b, Operator):
        return Operator(np.kron(a.data, b.data), a.dim_field, b.dim_atom)
    raise CompositionError("tensor operands must both be kets or both be operators")


def partial_trace(rho, keep):
    """Reduced operator over ``keep`` ('field' or 'atom')."""
    if rho.dim_atom == 1 or rho.dim_field == 1:
        raise NothingToTraceError(f"operator with dims {rho.dims} has a single factor")
    t = rho.data.reshape(rho.dim_field, rho.dim_atom, rho.dim_field, rho.dim_atom)
    if keep == "field":
        return Operator(np.einsum("iaja->ij", t), rho.dim_field, 1)
    if keep == "atom":
        return Operator(np.einsum("iaib->ab", t), 1, rho.dim_atom)
    raise InvalidDimensionError(f"keep must be 'field' or 'atom', got {keep!r}")


def matrix_exponential(a):
    """exp(A) by scaling-and-squaring with Pade approximants (scipy.linalg.expm)."""
    if not np.all(np.isfinite(a.data)):
        raise NumericError("matrix_exponential: non-finite entries")
    return Operator(scipy.linalg.expm(a.data), a.dim_field, a.dim_atom)


def commutator(a, b):
    return a @ b - b @ a


def density_report(rho):
    """Invariant diagnostics of a candidate density operator."""
    data = rho.data
    herm_err = float(np.max(np.abs(data - data.conj().T))) if data.size else 0.0
    tr = np.trace(data)
    eig = np.linalg.eigvalsh((data + data.conj().T) / 2)
    report = {
        "trace_real": float(tr.real),
        "trace_imag": float(tr.imag),
        "hermiticity_error": herm_err,
        "min_eigenvalue": float(eig[0]),
        "purity": float(np.real(np.sum(data * data.T))),
    }
    report["valid"] = bool(
        herm_err <= 1e-12
        and abs(tr - 1) <= 1e-10
        and report["min_eigenvalue"] >= -1e-10
    )
    return report
