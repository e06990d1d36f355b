"""Wigner functions W_A = Tr[A Pi] on phase-space grids.

Hybrid fields are stored compactly: for every field node alpha we keep the
2x2 qubit operator M(alpha) = Tr_field[rho (Pi_f(alpha) x 1)], from which the
sphere slice is W(alpha, theta, phi) = Tr[M(alpha) Pi_a(theta, phi)].  The
full 4-D array is materialised on demand, slab by slab, so default grids
(201 x 201 x 64 x 128) never need to sit in memory at once.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from .errors import CompositionError, InvalidParameterError, NumericError
from .grids import DEFAULT_CV_GRID, DEFAULT_SPHERE_GRID, CvGrid, SphereGrid
from .kernels import cv_kernel_stack, dv_kernel_stack
from .operators import Operator, partial_trace

__all__ = [
    "HybridField",
    "num_threads",
    "evaluate_cv",
    "evaluate_dv",
    "evaluate_hybrid",
    "integrate",
    "marginal",
    "negativity_volume",
    "max_abs_per_alpha",
    "shape_correlation",
]

THREADS_ENV = "HYBRIDWIGNER_NUM_THREADS"
_KERNEL_BUDGET = 2_000_000  # complex entries per kernel chunk
_SLAB_BUDGET = 4_000_000  # float64 values per materialised slab


def num_threads():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _map_chunks(func, n_items, chunk):
    """Apply ``func(start, stop)`` over chunks; outputs are written by ``func``."""
    bounds = [(s, min(s + chunk, n_items)) for s in range(0, n_items, chunk)]
    workers = num_threads()
    if workers == 1 or len(bounds) == 1:
        for s, e in bounds:
            func(s, e)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(lambda b: func(*b), bounds))


def _hermitian_or_flag(op, values):
    if op.is_hermitian(atol=1e-12):
        resid = float(np.max(np.abs(values.imag))) if values.size else 0.0
        if resid > 1e-10:
            raise NumericError(f"imaginary residue {resid:.2e} for a Hermitian operator")
        return values.real.copy()
    return values


def evaluate_cv(op, grid=DEFAULT_CV_GRID):
    """W(alpha) = Tr[A Pi_f(alpha)] over ``grid`` for a field-only operator.

    Real for Hermitian ``op``; a non-Hermitian operator yields a complex array.
    """
    if op.dim_atom != 1:
        raise CompositionError(f"evaluate_cv needs a field-only operator, got dims {op.dims}")
    dim = op.dim_field
    alphas = grid.alphas.ravel()
    a_t = op.data.T.ravel()
    out = np.empty(alphas.size, dtype=complex)
    chunk = max(1, _KERNEL_BUDGET // dim**2)

    def work(s, e):
        kern = cv_kernel_stack(alphas[s:e], dim)
        out[s:e] = kern.reshape(e - s, -1) @ a_t

    _map_chunks(work, alphas.size, chunk)
    return _hermitian_or_flag(op, out.reshape(grid.shape))


def _sphere_kernel_matrix(sphere_grid):
    """(S, 4) array K with Tr[M Pi_s] = sum_ab M_ab K[s, 2a+b]."""
    theta, phi = sphere_grid.mesh()
    kern = dv_kernel_stack(theta, phi)
    return np.swapaxes(kern, -1, -2).reshape(-1, 4)


def evaluate_dv(op, grid=DEFAULT_SPHERE_GRID):
    """W(theta, phi) = Tr[A Pi_a(theta, phi)] for a qubit-only operator."""
    if op.dim_field != 1 or op.dim_atom != 2:
        raise CompositionError(f"evaluate_dv needs a qubit-only operator, got dims {op.dims}")
    vals = _sphere_kernel_matrix(grid) @ op.data.ravel()
    return _hermitian_or_flag(op, vals.reshape(grid.shape))


@dataclass(eq=False)
class HybridField:
    """Hybrid Wigner function W(alpha, theta, phi) on a CvGrid x SphereGrid.

    Backed either by per-node qubit operators ``reduced`` (shape
    (n_re, n_im, 2, 2)) or by an explicit 4-D ``values`` array.
    """

    cv_grid: CvGrid
    sphere_grid: SphereGrid
    reduced: Optional[np.ndarray] = None
    state_label: str = ""
    trace_target: float = 1.0
    _values: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if (self.reduced is None) == (self._values is None):
            raise InvalidParameterError("HybridField needs exactly one of reduced / values")
        expect = self.cv_grid.shape + self.sphere_grid.shape
        if self._values is not None and self._values.shape != expect:
            raise InvalidParameterError(f"values shape {self._values.shape} != {expect}")

    @classmethod
    def from_values(cls, values, cv_grid, sphere_grid, state_label="", trace_target=1.0):
        return cls(cv_grid, sphere_grid, None, state_label, trace_target,
                   np.asarray(values, dtype=float))

    @property
    def shape(self):
        return self.cv_grid.shape + self.sphere_grid.shape

    @cached_property
    def _kmat(self):
        return _sphere_kernel_matrix(self.sphere_grid)

    def slab(self, start, stop):
        """Values for Re(alpha) rows ``start:stop``, shape (k, n_im, n_theta, n_phi)."""
        if self._values is not None:
            return self._values[start:stop]
        m = self.reduced[start:stop]
        k, n_im = m.shape[:2]
        vals = (m.reshape(-1, 4) @ self._kmat.T).real
        return vals.reshape((k, n_im) + self.sphere_grid.shape)

    def iter_slabs(self):
        per_row = self.cv_grid.n_im * self.sphere_grid.n_theta * self.sphere_grid.n_phi
        step = max(1, _SLAB_BUDGET // per_row)
        for s in range(0, self.cv_grid.n_re, step):
            e = min(s + step, self.cv_grid.n_re)
            yield s, e, self.slab(s, e)

    @property
    def values(self):
        """Full 4-D array (i_re, i_im, i_theta, i_phi); materialised on request."""
        if self._values is None:
            self._values = np.concatenate([v for _, _, v in self.iter_slabs()], axis=0)
        return self._values

    def sphere_slice(self, alpha):
        idx = self.cv_grid.index_of(complex(alpha))
        if idx is None:
            raise InvalidParameterError(f"alpha={alpha} is not a node of the field grid")
        i, j = idx
        return self.slab(i, i + 1)[0, j]


def evaluate_hybrid(rho, cv_grid=DEFAULT_CV_GRID, sphere_grid=DEFAULT_SPHERE_GRID,
                    state_label=""):
    """Hybrid Wigner function Tr[rho (Pi_f(alpha) x Pi_a(theta, phi))]."""
    if rho.dim_atom != 2 or rho.dim_field < 2:
        raise CompositionError(f"evaluate_hybrid needs field x qubit dims, got {rho.dims}")
    if not rho.is_hermitian(atol=1e-12):
        raise NumericError("evaluate_hybrid expects a Hermitian operator")
    dim = rho.dim_field
    # r[a, b, m, n] = rho[(m, a), (n, b)]
    r = rho.data.reshape(dim, 2, dim, 2).transpose(1, 3, 0, 2).reshape(4, dim * dim)
    alphas = cv_grid.alphas.ravel()
    reduced = np.empty((alphas.size, 4), dtype=complex)
    chunk = max(1, _KERNEL_BUDGET // dim**2)

    def work(s, e):
        kern = cv_kernel_stack(alphas[s:e], dim)
        reduced[s:e] = np.swapaxes(kern, 1, 2).reshape(e - s, -1) @ r.T

    _map_chunks(work, alphas.size, chunk)
    return HybridField(
        cv_grid,
        sphere_grid,
        reduced.reshape(cv_grid.shape + (2, 2)),
        state_label,
        float(rho.tr().real),
    )


def _weights_for(values, cv_grid, sphere_grid):
    if cv_grid is not None and sphere_grid is None:
        w = cv_grid.weights
    elif sphere_grid is not None and cv_grid is None:
        w = sphere_grid.weights
    else:
        raise InvalidParameterError("pass exactly one grid for a 2-D field")
    if w.shape != np.shape(values):
        raise InvalidParameterError(f"field shape {np.shape(values)} != grid shape {w.shape}")
    return w


def _reduce(field, fn, cv_grid=None, sphere_grid=None):
    if isinstance(field, HybridField):
        wa, ws = field.cv_grid.weights, field.sphere_grid.weights
        total = 0.0
        for s, e, vals in field.iter_slabs():
            total += float(np.einsum("ij,ijkl,kl->", wa[s:e], fn(vals), ws))
        return total
    values = np.asarray(field)
    if not np.all(np.isfinite(values)):
        raise NumericError("field contains non-finite values")
    return float(np.sum(_weights_for(values, cv_grid, sphere_grid) * fn(values)))


def integrate(field, cv_grid=None, sphere_grid=None):
    """Quadrature integral; equals Tr[A] for the operator behind the field."""
    return _reduce(field, lambda v: v, cv_grid, sphere_grid)


def negativity_volume(field, cv_grid=None, sphere_grid=None):
    """Integral of the negative part, (|W| - W)/2, under the same quadrature."""
    return _reduce(field, lambda v: (np.abs(v) - v) / 2, cv_grid, sphere_grid)


def marginal(field, keep):
    """Integrate a HybridField over the discarded subsystem.

    ``keep='cv'`` returns an (n_re, n_im) array, ``keep='dv'`` an
    (n_theta, n_phi) array.
    """
    if keep == "cv":
        ws = field.sphere_grid.weights
        out = np.empty(field.cv_grid.shape)
        for s, e, vals in field.iter_slabs():
            out[s:e] = np.einsum("ijkl,kl->ij", vals, ws)
        return out
    if keep == "dv":
        wa = field.cv_grid.weights
        out = np.zeros(field.sphere_grid.shape)
        for s, e, vals in field.iter_slabs():
            out += np.einsum("ij,ijkl->kl", wa[s:e], vals)
        return out
    raise InvalidParameterError(f"keep must be 'cv' or 'dv', got {keep!r}")


def max_abs_per_alpha(field):
    """max over the sphere of |W(alpha, theta, phi)| at each field node."""
    out = np.empty(field.cv_grid.shape)
    for s, e, vals in field.iter_slabs():
        out[s:e] = np.abs(vals).max(axis=(2, 3))
    return out


def shape_correlation(a, b):
    """Pearson correlation of two equally shaped fields."""
    a, b = np.ravel(a), np.ravel(b)
    a, b = a - a.mean(), b - b.mean()
    denom = np.linalg.norm(a) * np.linalg.norm(b)
    if denom == 0:
        raise NumericError("shape correlation of a constant field is undefined")
    return float(a @ b / denom)


def reduced_fields(rho, cv_grid=DEFAULT_CV_GRID, sphere_grid=DEFAULT_SPHERE_GRID):
    """(W_field, W_qubit) of the partial traces of ``rho``."""
    return (
        evaluate_cv(partial_trace(rho, "field"), cv_grid),
        evaluate_dv(partial_trace(rho, "atom"), sphere_grid),
    )


def as_density(state):
    """Density operator for a ket or operator input."""
    if isinstance(state, Operator):
        return state
    return state.proj()
