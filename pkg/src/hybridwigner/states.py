"""Constructors for the field, qubit and hybrid states used throughout the package.

Superpositions of coherent states are normalised numerically, so the overlap
<beta|-beta> = exp(-2|beta|^2) is always accounted for.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .errors import (
    CompositionError,
    InvalidDimensionError,
    InvalidParameterError,
    TruncationError,
)
from .kernels import coherent_tail, required_dim
from .operators import Ket, Operator, tensor

__all__ = [
    "DEFAULT_DIM",
    "StateSpec",
    "fock",
    "coherent",
    "qubit",
    "excited",
    "ground",
    "cat",
    "separable_cat_qubit",
    "bell_cat",
    "lossy_bell_cat",
    "classical_mix",
    "bell_fock",
    "product",
    "mixture",
    "density",
]

#: Truncation used for beta = 3 states unless told otherwise.
DEFAULT_DIM = 40


def fock(n, dim_field):
    if not 0 <= n < dim_field:
        raise InvalidDimensionError(f"Fock level {n} out of range for dim_field={dim_field}")
    amps = np.zeros(dim_field, dtype=complex)
    amps[n] = 1.0
    return Ket(amps, dim_field)


def coherent(beta, dim_field=DEFAULT_DIM, tol=1e-10):
    """|beta> from its Poisson amplitudes, renormalised after truncation.

    Raises :class:`TruncationError` (carrying the needed dimension) when more
    than ``tol`` of the population would be cut off.
    """
    beta = complex(beta)
    if not np.isfinite(beta):
        raise InvalidParameterError(f"non-finite coherent amplitude {beta}")
    abs2 = abs(beta) ** 2
    if coherent_tail(abs2, dim_field) > tol:
        need = required_dim(abs2, tol)
        raise TruncationError(
            f"coherent state |beta|={abs(beta):.4g} needs dim_field >= {need} "
            f"(got {dim_field})",
            required_dim=need,
        )
    n = np.arange(dim_field)
    if beta == 0:
        return fock(0, dim_field)
    log_mag = -abs2 / 2 + n * np.log(abs(beta)) - 0.5 * gammaln(n + 1)
    amps = np.exp(log_mag) * np.exp(1j * np.angle(beta) * n)
    return Ket(amps, dim_field).normalized()


def qubit(a, b):
    """a|e> + b|g>, normalised."""
    return Ket([a, b], 1, 2).normalized()


def excited():
    return qubit(1, 0)


def ground():
    return qubit(0, 1)


def cat(beta, a=1.0, b=1.0, dim_field=DEFAULT_DIM):
    """a|beta> + b|-beta>, normalised including the coherent overlap."""
    return (a * coherent(beta, dim_field) + b * coherent(-beta, dim_field)).normalized()


def separable_cat_qubit(beta, dim_field=DEFAULT_DIM):
    """(|beta> + |-beta>)(|e> + |g>)/2 with exact normalisation."""
    return tensor(cat(beta, 1, 1, dim_field), qubit(1, 1))


def bell_cat(beta, dim_field=DEFAULT_DIM):
    """(|beta>|e> + |-beta>|g>)/sqrt(2)."""
    psi = tensor(coherent(beta, dim_field), excited()) + tensor(
        coherent(-beta, dim_field), ground()
    )
    return psi.normalized()


def _check_eta(eta):
    if not (0.0 <= eta <= 1.0):
        raise InvalidParameterError(f"eta must lie in [0, 1], got {eta}")


def lossy_bell_cat(beta, eta, dim_field=DEFAULT_DIM):
    """Bell-cat density operator with its coherences scaled by ``eta``.

    eta = 1 is the pure Bell-cat, eta = 0 the classically correlated mixture.
    """
    _check_eta(eta)
    plus = coherent(beta, dim_field).data
    minus = coherent(-beta, dim_field).data
    rho = np.zeros((dim_field * 2,) * 2, dtype=complex)
    rho4 = rho.reshape(dim_field, 2, dim_field, 2)
    kets = (plus, minus)
    for a in range(2):
        for b in range(2):
            weight = 1.0 if a == b else eta
            rho4[:, a, :, b] = 0.5 * weight * np.outer(kets[a], kets[b].conj())
    rho /= np.trace(rho).real
    return Operator(rho, dim_field, 2)


def classical_mix(beta, dim_field=DEFAULT_DIM):
    """(|beta><beta| |e><e| + |-beta><-beta| |g><g|)/2."""
    return lossy_bell_cat(beta, 0.0, dim_field)


def bell_fock(sign="+", dim_field=2, phase=1j):
    """(|0>|e> +/- phase |1>|g>)/sqrt(2); the default phase i gives |Phi+->."""
    if sign not in ("+", "-"):
        raise InvalidParameterError(f"sign must be '+' or '-', got {sign!r}")
    if dim_field < 2:
        raise InvalidDimensionError("bell_fock needs dim_field >= 2")
    s = 1 if sign == "+" else -1
    psi = tensor(fock(0, dim_field), excited()) + s * phase * tensor(
        fock(1, dim_field), ground()
    )
    return psi.normalized()


def product(state_f, state_a):
    return tensor(state_f, state_a)


def density(state):
    if isinstance(state, Operator):
        return state
    return state.proj()


def mixture(weights, operators):
    weights = np.asarray(weights, dtype=float)
    if len(weights) != len(operators) or len(operators) == 0:
        raise CompositionError("mixture needs one weight per operator")
    if np.any(weights < 0) or abs(weights.sum() - 1) > 1e-10:
        raise InvalidParameterError(f"weights must be nonnegative and sum to 1, got {weights}")
    ops = [density(op) for op in operators]
    dims = {op.dims for op in ops}
    if len(dims) != 1:
        raise CompositionError(f"mixture of operators with different dims {dims}")
    data = sum(w * op.data for w, op in zip(weights, ops))
    return Operator(data, *ops[0].dims)


# --------------------------------------------------------------------------
# Serialisable descriptions
# --------------------------------------------------------------------------

KINDS = (
    "fock",
    "coherent",
    "qubit",
    "cat",
    "separable_cat_qubit",
    "bell_fock",
    "bell_cat",
    "lossy_bell_cat",
    "classical_mix",
    "product",
    "mixture",
    "custom",
)


def _c2json(z):
    return None if z is None else [float(complex(z).real), float(complex(z).imag)]


def _json2c(v):
    if v is None:
        return None
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise InvalidParameterError(f"complex numbers are [re, im] pairs, got {v}")
        return complex(v[0], v[1])
    return complex(v)


_COMPLEX_FIELDS = ("beta", "a", "b", "phase")


@dataclass
class StateSpec:
    """Declarative state description with a canonical JSON form."""

    kind: str
    dim_field: int = DEFAULT_DIM
    n: Optional[int] = None
    beta: Optional[complex] = None
    a: Optional[complex] = None
    b: Optional[complex] = None
    eta: Optional[float] = None
    sign: Optional[str] = None
    phase: Optional[complex] = None
    weights: Optional[list] = None
    components: list = field(default_factory=list)
    amplitudes: Optional[list] = None
    dim_atom: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameterError(f"unknown state kind {self.kind!r}; expected one of {KINDS}")
        for name in _COMPLEX_FIELDS:
            val = getattr(self, name)
            if val is not None:
                setattr(self, name, _json2c(val))
        self.components = [
            c if isinstance(c, StateSpec) else StateSpec.from_dict(c) for c in self.components
        ]
        if self.eta is not None:
            self.eta = float(self.eta)
            _check_eta(self.eta)

    def to_dict(self):
        out = {}
        for key, val in asdict(self).items():
            if key == "components":
                val = [c.to_dict() for c in self.components]
                if not val:
                    continue
            elif key in _COMPLEX_FIELDS:
                val = _c2json(val)
            elif key == "amplitudes" and val is not None:
                val = [_c2json(z) for z in val]
            if val is not None:
                out[key] = val
        return out

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        if "kind" not in data:
            raise InvalidParameterError("state spec needs a 'kind'")
        if data.get("amplitudes") is not None:
            data["amplitudes"] = [_json2c(z) for z in data["amplitudes"]]
        try:
            return cls(**data)
        except TypeError as exc:
            raise InvalidParameterError(f"bad state spec: {exc}") from None

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InvalidParameterError(f"state spec is not valid JSON: {exc}") from None

    def _need(self, *names):
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise InvalidParameterError(f"kind {self.kind!r} needs parameters {missing}")

    def build(self):
        """Construct the state: a :class:`Ket` or a density :class:`Operator`."""
        k, dim = self.kind, self.dim_field
        if k == "fock":
            self._need("n")
            return fock(self.n, dim)
        if k == "coherent":
            self._need("beta")
            return coherent(self.beta, dim)
        if k == "qubit":
            self._need("a", "b")
            return qubit(self.a, self.b)
        if k == "cat":
            self._need("beta")
            a = 1.0 if self.a is None else self.a
            b = 1.0 if self.b is None else self.b
            return cat(self.beta, a, b, dim)
        if k == "separable_cat_qubit":
            self._need("beta")
            return separable_cat_qubit(self.beta, dim)
        if k == "bell_fock":
            return bell_fock(self.sign or "+", dim, 1j if self.phase is None else self.phase)
        if k == "bell_cat":
            self._need("beta")
            return bell_cat(self.beta, dim)
        if k == "lossy_bell_cat":
            self._need("beta", "eta")
            return lossy_bell_cat(self.beta, self.eta, dim)
        if k == "classical_mix":
            self._need("beta")
            return classical_mix(self.beta, dim)
        if k == "product":
            if len(self.components) != 2:
                raise InvalidParameterError("product needs exactly two components")
            f, a = (c.build() for c in self.components)
            if isinstance(f, Ket) and isinstance(a, Ket):
                return product(f, a)
            return tensor(density(f), density(a))
        if k == "mixture":
            self._need("weights")
            return mixture(self.weights, [c.build() for c in self.components])
        if k == "custom":
            self._need("amplitudes")
            dim_atom = self.dim_atom or 1
            return Ket(self.amplitudes, len(self.amplitudes) // dim_atom, dim_atom).normalized()
        raise InvalidParameterError(f"unhandled kind {k!r}")
