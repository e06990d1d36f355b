"""Resonant Jaynes-Cummings dynamics, H = w (a^dag s- + a s+).

H only couples |n, e> with |n+1, g>, so the propagator is assembled from
exact 2x2 rotations, one per excitation block, with frequencies w sqrt(n+1).
In a truncated space |0, g> is dark and |N-1, e> has no partner.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import uniform_filter1d

from .errors import InvalidDimensionError, InvalidParameterError, RevivalEstimationError
from .operators import (
    Ket,
    Operator,
    annihilation,
    creation,
    identity,
    number,
    projector,
    sigma_minus,
    sigma_plus,
    tensor,
)
from .states import coherent, excited, fock

__all__ = [
    "JcModel",
    "EvolutionResult",
    "jc_hamiltonian",
    "excitation_operator",
    "propagator",
    "evolve",
    "evolve_series",
    "analytic_vacuum_evolution",
    "inversion_series",
    "estimate_revival_time",
    "fig6_times",
    "fig7_schedule",
    "DEFAULT_JC_DIM",
]

#: Truncation for coherent-state (beta = 3) runs.
DEFAULT_JC_DIM = 60


@dataclass(frozen=True)
class JcModel:
    omega: float = 1.0
    dim_field: int = DEFAULT_JC_DIM

    def __post_init__(self):
        if not self.omega > 0:
            raise InvalidParameterError(f"coupling omega must be > 0, got {self.omega}")
        if self.dim_field < 2:
            raise InvalidDimensionError("JcModel needs dim_field >= 2")

    @property
    def block_frequencies(self):
        """Rabi frequency of the block {|n, e>, |n+1, g>} for n = 0 .. N-2."""
        return self.omega * np.sqrt(np.arange(1, self.dim_field))


@dataclass
class EvolutionResult:
    times: np.ndarray
    states: list
    inversion: np.ndarray


def jc_hamiltonian(model):
    n = model.dim_field
    return model.omega * (
        tensor(creation(n), sigma_minus()) + tensor(annihilation(n), sigma_plus())
    )


def excitation_operator(dim_field):
    """n + |e><e|, conserved by the resonant coupling."""
    return tensor(number(dim_field), identity(1, 2)) + tensor(
        identity(dim_field), projector(0, 1, 2)
    )


def _rotate(amps, model, times):
    """Block-wise exp(-iHt) on a (..., 2N) amplitude array for each time.

    Returns shape (T, ..., 2N).
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    freq = model.block_frequencies
    wt = times[:, None] * freq[None, :]
    c, s = np.cos(wt), np.sin(wt)
    shape = (times.size,) + (1,) * (amps.ndim - 1) + (freq.size,)
    c, s = c.reshape(shape), s.reshape(shape)
    e_part = amps[..., 0:-2:2]  # |n, e>,   n = 0..N-2
    g_part = amps[..., 3::2]  # |n+1, g>, n = 0..N-2
    out = np.broadcast_to(amps, (times.size,) + amps.shape).copy()
    out[..., 0:-2:2] = c * e_part - 1j * s * g_part
    out[..., 3::2] = -1j * s * e_part + c * g_part
    return out


def propagator(model, t):
    """exp(-i H t) as an :class:`Operator`."""
    eye = np.eye(2 * model.dim_field, dtype=complex)
    cols = _rotate(eye.T, model, [t])[0]
    return Operator(cols.T, model.dim_field, 2)


def _check_initial(model, initial):
    if initial.dims != (model.dim_field, 2):
        raise InvalidDimensionError(
            f"initial state dims {initial.dims} do not match model ({model.dim_field}, 2)"
        )
    if not np.isfinite(np.asarray(initial.data)).all():
        raise InvalidParameterError("initial state has non-finite entries")


def evolve(model, initial, t):
    """State at time ``t``; kets stay kets, density operators become U rho U^dag."""
    _check_initial(model, initial)
    if isinstance(initial, Ket):
        return Ket(_rotate(initial.data, model, [t])[0], model.dim_field, 2)
    u = propagator(model, t)
    return u @ initial @ u.dag()


def evolve_series(model, initial, times):
    _check_initial(model, initial)
    times = np.asarray(times, dtype=float)
    states = [evolve(model, initial, t) for t in times]
    return EvolutionResult(times, states, inversion_series(model, initial, times))


def analytic_vacuum_evolution(omega, t, dim_field=2):
    """cos(wt)|0,e> - i sin(wt)|1,g>."""
    e0 = tensor(fock(0, dim_field), excited())
    g1 = tensor(fock(1, dim_field), Ket([0, 1], 1, 2))
    return np.cos(omega * t) * e0 + (-1j * np.sin(omega * t)) * g1


def inversion_series(model, initial, times):
    """<sz>(t) for each entry of ``times``."""
    _check_initial(model, initial)
    levels = np.tile([1.0, -1.0], model.dim_field)
    if isinstance(initial, Ket):
        amps = _rotate(initial.data, model, times)
        return (np.abs(amps) ** 2) @ levels
    return np.array([np.real(np.diag(evolve(model, initial, t).data)) @ levels for t in times])


def _coherent_excited(model, beta):
    return tensor(coherent(beta, model.dim_field), excited())


def estimate_revival_time(model, beta, samples_per_unit=50):
    """Time of the first Rabi revival for the initial state |beta>|e>.

    The inversion is sampled on [0, 4 pi |beta|/w + 2 pi/w], smoothed with a
    moving RMS of width 4 pi/w and the envelope maximum is located inside
    [pi |beta|/w, 4 pi |beta|/w].  The textbook estimate 2 pi |beta|/w is
    not used, only the scan.
    """
    b = abs(complex(beta))
    if not b > 0:
        raise InvalidParameterError("revival estimation needs beta != 0")
    w = model.omega
    dt = 1.0 / (samples_per_unit * w)
    times = np.arange(0.0, (4 * np.pi * b + 2 * np.pi) / w, dt)
    inv = inversion_series(model, _coherent_excited(model, beta), times)
    width = max(1, int(round(4 * np.pi / (w * dt))))
    envelope = np.sqrt(uniform_filter1d(inv**2, width, mode="nearest"))

    lo, hi = np.pi * b / w, 4 * np.pi * b / w
    window = np.flatnonzero((times >= lo) & (times <= hi))
    k = window[np.argmax(envelope[window])]
    if k in (window[0], window[-1]):
        raise RevivalEstimationError(
            f"no interior envelope maximum in [{lo:.3g}, {hi:.3g}] for beta={beta}"
        )
    return float(times[k])


def fig6_times(omega=1.0):
    """Times at which the vacuum run passes through |Phi->, then |Phi+>."""
    return (np.pi / (4 * omega), 3 * np.pi / (4 * omega))


def fig7_schedule(model, beta, t_revival=None):
    """Snapshot times (t_r/9, t_r/2, ~t_r) for the coherent-state run.

    The last time is moved from the envelope peak to the nearest local
    maximum of <sz>, the instant in the revival where the qubit is closest to
    its initial excited state.
    """
    t_r = estimate_revival_time(model, beta) if t_revival is None else float(t_revival)
    w = model.omega
    # carrier period is about pi / (w sqrt(n+1)) < pi / w
    times = np.linspace(t_r - np.pi / w, t_r + np.pi / w, 2001)
    inv = inversion_series(model, _coherent_excited(model, beta), times)
    peaks = np.flatnonzero((inv[1:-1] > inv[:-2]) & (inv[1:-1] >= inv[2:])) + 1
    if peaks.size == 0:
        raise RevivalEstimationError("no inversion maximum near the revival")
    t_peak = times[peaks[np.argmin(np.abs(times[peaks] - t_r))]]
    return {"t_revival": t_r, "times": (t_r / 9, t_r / 2, float(t_peak))}
