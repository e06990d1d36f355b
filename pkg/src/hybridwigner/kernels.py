"""Displaced parity kernels for the field mode, the qubit, and their product.

The field kernel uses the identity D(a) P D(a)^dag = D(2a) P, so its Fock
matrix elements are exact (no truncation of an intermediate sum) and only
need the closed-form displacement elements

    <m|D(b)|n> = sqrt(n!/m!) b^(m-n) exp(-|b|^2/2) L_n^(m-n)(|b|^2),   m >= n,

evaluated through a three-term recurrence on the normalised products
sqrt(j!/(j+k)!) |b|^k exp(-|b|^2/2) L_j^(k)(|b|^2), which never overflow.

Qubit rotations take (theta, phi) as polar and azimuthal angles on the
sphere; the Euler rotation exp(i sz phi) exp(i sy theta) exp(i sz Phi) is
applied with half angles so that the kernel direction sweeps the sphere once.
"""

from __future__ import annotations

import functools
import warnings

import numpy as np
from scipy.special import gammainc, gammaln

from .errors import InvalidParameterError, TruncationError, TruncationWarning
from .operators import Operator, tensor

SQRT3 = np.sqrt(3.0)
#: Largest |W| a density operator can reach for each kernel.
CV_BOUND = 2.0
DV_BOUND = (1 + SQRT3) / 2
HYBRID_BOUND = 1 + SQRT3

_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)

__all__ = [
    "SQRT3",
    "CV_BOUND",
    "DV_BOUND",
    "HYBRID_BOUND",
    "coherent_tail",
    "required_dim",
    "displacement_elements",
    "displacement",
    "cv_parity",
    "cv_kernel",
    "cv_kernel_stack",
    "dv_parity",
    "euler_rotation",
    "dv_kernel",
    "dv_kernel_stack",
    "kernel_direction",
    "hybrid_kernel",
]


def coherent_tail(abs2, dim_field):
    """Population of a coherent state with |beta|^2 = abs2 above level dim_field-1."""
    if abs2 == 0:
        return 0.0
    return float(gammainc(dim_field, abs2))


def required_dim(abs2, tol=1e-10):
    """Smallest truncation whose coherent-state tail population is <= tol."""
    n = max(2, int(abs2) + 1)
    while coherent_tail(abs2, n) > tol:
        n += 1
    return n


def displacement_elements(betas, dim_field):
    """Closed-form <m|D(beta)|n> for a batch of betas, shape (B, N, N)."""
    betas = np.atleast_1d(np.asarray(betas, dtype=complex)).ravel()
    n_b, dim = betas.size, int(dim_field)
    x = np.abs(betas) ** 2
    r = np.abs(betas)
    k = np.arange(dim)

    with np.errstate(divide="ignore", invalid="ignore"):
        logf0 = k * np.log(r)[:, None] - x[:, None] / 2 - 0.5 * gammaln(k + 1)
    # 0 * log(0) for the k = 0 column
    logf0[:, 0] = -x / 2
    f = np.exp(logf0)
    f_prev = np.zeros_like(f)

    phase_k = np.exp(1j * np.angle(betas))[:, None] ** k
    sign_k = (-1.0) ** k
    out = np.empty((n_b, dim, dim), dtype=complex)
    for j in range(dim):
        span = dim - j
        kk = np.arange(span)
        lower = f[:, :span] * phase_k[:, :span]
        out[:, j + kk, j] = lower
        out[:, j, j + kk] = sign_k[:span] * lower.conj()
        if j == dim - 1:
            break
        a = (2 * j + 1 + k - x[:, None]) / np.sqrt((j + 1) * (j + k + 1.0))
        b = np.sqrt(j * (j + k) / ((j + 1) * (j + k + 1.0)))
        f, f_prev = a * f - b * f_prev, f
    return out


def displacement(alpha, dim_field, strictness="warn", tol=1e-8):
    """Truncated displacement operator exp(alpha a^dag - alpha^* a).

    Entries are the exact infinite-dimensional matrix elements restricted to
    the first ``dim_field`` Fock levels.  When the image of the vacuum leaks
    more than ``tol`` population past the truncation a
    :class:`TruncationWarning` is emitted (``strictness='warn'``) or a
    :class:`TruncationError` raised (``strictness='error'``).
    """
    alpha = complex(alpha)
    if not np.isfinite(alpha):
        raise InvalidParameterError(f"non-finite displacement {alpha}")
    tail = coherent_tail(abs(alpha) ** 2, dim_field)
    if tail > tol and strictness != "ignore":
        need = required_dim(abs(alpha) ** 2, tol)
        msg = (
            f"displacement |alpha|={abs(alpha):.3g} leaks {tail:.2e} past "
            f"dim_field={dim_field}; need dim_field >= {need}"
        )
        if strictness == "error":
            raise TruncationError(msg, required_dim=need)
        warnings.warn(msg, TruncationWarning, stacklevel=2)
    return Operator(displacement_elements(alpha, dim_field)[0], dim_field)


def cv_parity(dim_field):
    return Operator(np.diag((-1.0) ** np.arange(dim_field)), dim_field)


def cv_kernel_stack(alphas, dim_field):
    """Field kernels 2 D(alpha) P D(alpha)^dag for a batch, shape (B, N, N)."""
    d2 = displacement_elements(2 * np.asarray(alphas, dtype=complex), dim_field)
    d2 *= 2 * (-1.0) ** np.arange(dim_field)
    return d2


@functools.lru_cache(maxsize=4096)
def _cv_kernel_cached(alpha, dim_field):
    data = cv_kernel_stack([alpha], dim_field)[0]
    data.setflags(write=False)
    return data


def cv_kernel(alpha, dim_field):
    """Field displaced parity 2 D(alpha) P D(alpha)^dag (memoised per point)."""
    return Operator(_cv_kernel_cached(complex(alpha), int(dim_field)), dim_field)


def dv_parity():
    """Generalised qubit parity (1 + sqrt(3) sz)/2."""
    return Operator((np.eye(2) + SQRT3 * _SZ) / 2, 1, 2)


def _exp_i_sigma(sigma, angle):
    angle = np.asarray(angle, dtype=float)[..., None, None]
    return np.cos(angle) * np.eye(2) + 1j * np.sin(angle) * sigma


def euler_rotation(theta, phi, Phi=0.0):
    """exp(i sz phi/2) exp(i sy theta/2) exp(i sz Phi/2); broadcasts over angles."""
    return (
        _exp_i_sigma(_SZ, np.asarray(phi) / 2)
        @ _exp_i_sigma(_SY, np.asarray(theta) / 2)
        @ _exp_i_sigma(_SZ, np.asarray(Phi) / 2)
    )


def dv_kernel_stack(theta, phi, Phi=0.0):
    """Qubit kernels U P U^dag broadcast over angle arrays, shape (..., 2, 2)."""
    u = euler_rotation(theta, phi, Phi)
    return u @ dv_parity().data @ np.conj(np.swapaxes(u, -1, -2))


def dv_kernel(theta, phi, Phi=0.0):
    return Operator(dv_kernel_stack(float(theta), float(phi), float(Phi)), 1, 2)


def kernel_direction(theta, phi):
    """Unit vector n with dv_kernel = (1 + sqrt(3) n.sigma)/2.

    Obtained by rotating z-hat with the same Euler rotation the kernel uses:
    n = (-sin(theta) cos(phi), sin(theta) sin(phi), cos(theta)).
    """
    theta, phi = np.asarray(theta, float), np.asarray(phi, float)
    return np.stack(
        [-np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)],
        axis=-1,
    )


def hybrid_kernel(alpha, theta, phi, dim_field):
    return tensor(cv_kernel(alpha, dim_field), dv_kernel(theta, phi))

