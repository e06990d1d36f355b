"""Fast invariant suite backing the ``verify`` subcommand.

Every check compares the library against an independent closed form or an
algebraic identity and reports the worst deviation next to its tolerance.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from . import dynamics, kernels, operators, render, states, wigner
from .grids import CvGrid, SphereGrid

SQRT3 = np.sqrt(3.0)
_SIGMA = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_CHECKS = []


def check(tol):
    """Register a check returning its worst absolute deviation."""

    def wrap(fn):
        _CHECKS.append((fn.__name__, tol, fn))
        return fn

    return wrap


def _sphere():
    return SphereGrid(16, 32)


@check(1e-12)
def kernels_hermitian():
    ops = [
        kernels.cv_kernel(0.7 - 0.3j, 20),
        kernels.dv_kernel(1.1, 4.0),
        kernels.hybrid_kernel(-0.4 + 0.9j, 2.0, 0.3, 12),
    ]
    return max(np.abs(op.data - op.data.conj().T).max() for op in ops)


@check(1e-12)
def dv_kernel_matches_bloch_formula():
    worst = 0.0
    for theta, phi in [(0.3, 0.2), (1.2, 2.5), (2.8, 5.9), (np.pi / 2, 0.0)]:
        n = kernels.kernel_direction(theta, phi)
        expected = (np.eye(2) + SQRT3 * sum(n[i] * _SIGMA[a] for i, a in enumerate("xyz"))) / 2
        worst = max(worst, np.abs(kernels.dv_kernel(theta, phi).data - expected).max())
    return worst


@check(1e-12)
def dv_kernel_phi_independent_of_third_angle():
    a = kernels.dv_kernel(0.9, 1.7, 0.0).data
    b = kernels.dv_kernel(0.9, 1.7, 1.3).data
    return np.abs(a - b).max()


@check(1e-10)
def dv_excited_closed_form():
    grid = _sphere()
    w = wigner.evaluate_dv(states.excited().proj(), grid)
    theta = grid.mesh()[0]
    return np.abs(w - (1 + SQRT3 * np.cos(theta)) / 2).max()


@check(1e-10)
def dv_sigma_z_closed_form():
    grid = _sphere()
    w = wigner.evaluate_dv(operators.pauli("z"), grid)
    return np.abs(w - SQRT3 * np.cos(grid.mesh()[0])).max()


@check(1e-10)
def dv_pauli_integrals_vanish():
    grid = _sphere()
    return max(abs(wigner.integrate(wigner.evaluate_dv(operators.pauli(a), grid),
                                    sphere_grid=grid)) for a in "xyz")


@check(1e-10)
def dv_density_integrates_to_one():
    grid = _sphere()
    return abs(wigner.integrate(wigner.evaluate_dv(states.excited().proj(), grid),
                                sphere_grid=grid) - 1)


@check(1e-12)
def hybrid_peak_is_one_plus_sqrt3():
    rho = operators.tensor(states.fock(0, 8), states.excited()).proj()
    value = rho.expect(kernels.hybrid_kernel(0.0, 0.0, 0.0, 8)).real
    return abs(value - (1 + SQRT3))


@check(1e-12)
def cv_vacuum_and_fock1_at_origin():
    g = CvGrid((-1, 1), (-1, 1), 3, 3)
    w0 = wigner.evaluate_cv(states.fock(0, 6).proj(), g)[1, 1]
    w1 = wigner.evaluate_cv(states.fock(1, 6).proj(), g)[1, 1]
    return max(abs(w0 - 2), abs(w1 + 2))


@check(1e-8)
def cv_vacuum_gaussian_and_norm():
    g = CvGrid((-5, 5), (-5, 5), 81, 81)
    w = wigner.evaluate_cv(states.fock(0, 6).proj(), g)
    gauss = 2 * np.exp(-2 * np.abs(g.alphas) ** 2)
    return max(np.abs(w - gauss).max(), abs(wigner.integrate(w, cv_grid=g) - 1))


@check(1e-8)
def displacement_matches_expm():
    dim, alpha = 30, 1.1 - 0.6j
    a = operators.annihilation(dim).data
    ref = scipy.linalg.expm(alpha * a.conj().T - np.conj(alpha) * a)
    block = 12
    d = kernels.displacement(alpha, dim, strictness="ignore").data
    return np.abs(d[:block, :block] - ref[:block, :block]).max()


@check(1e-8)
def coherent_is_displaced_vacuum():
    c = states.coherent(1.5 + 0.5j, 40)
    d = kernels.displacement(1.5 + 0.5j, 40) @ states.fock(0, 40)
    return np.abs(c.data - d.data).max()


@check(1e-12)
def truncated_commutator():
    n = 7
    a = operators.annihilation(n)
    c = operators.commutator(a, a.dag()).data
    expected = np.eye(n)
    expected[-1, -1] = 1 - n
    return np.abs(c - expected).max()


@check(1e-12)
def partial_trace_of_product():
    rng = np.random.default_rng(7)
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho_f = operators.Operator(m @ m.conj().T, 3)
    rho_f = rho_f / rho_f.tr()
    rho_a = operators.Operator(np.array([[0.3, 0.1j], [-0.1j, 0.7]]), 1, 2)
    joint = operators.tensor(rho_f, rho_a)
    return max(
        np.abs(operators.partial_trace(joint, "field").data - rho_f.data).max(),
        np.abs(operators.partial_trace(joint, "atom").data - rho_a.data).max(),
    )


@check(1e-10)
def jc_vacuum_bell_fock_times():
    model = dynamics.JcModel(1.0, 4)
    psi0 = operators.tensor(states.fock(0, 4), states.excited())
    t_minus, t_plus = dynamics.fig6_times(1.0)
    return max(
        1 - dynamics.evolve(model, psi0, t_minus).fidelity(states.bell_fock("-", 4)),
        1 - dynamics.evolve(model, psi0, t_plus).fidelity(states.bell_fock("+", 4)),
        1 - dynamics.evolve(model, psi0, np.pi).fidelity(psi0),
    )


@check(1e-10)
def jc_norm_and_excitation_conserved():
    model = dynamics.JcModel(1.3, 30)
    psi0 = operators.tensor(states.coherent(2.0, 30), states.excited())
    exc = dynamics.excitation_operator(30)
    n0 = exc.expect(psi0).real
    worst = 0.0
    for t in (0.5, 3.0, 17.0):
        psi = dynamics.evolve(model, psi0, t)
        worst = max(worst, abs(psi.norm() - 1), abs(exc.expect(psi).real - n0))
    return worst


@check(1e-6)
def marginals_match_partial_traces():
    cv = CvGrid((-3, 3), (-3, 3), 41, 41)
    sp = SphereGrid(8, 16)
    rho = states.bell_fock("+", 6).proj()
    field = wigner.evaluate_hybrid(rho, cv, sp)
    w_f, w_a = wigner.reduced_fields(rho, cv, sp)
    return max(np.abs(wigner.marginal(field, "cv") - w_f).max(),
               np.abs(wigner.marginal(field, "dv") - w_a).max())


@check(1e-3)
def bell_cat_centre_is_sigma_x():
    cv = CvGrid((-1, 1), (-1, 1), 3, 3)
    sp = _sphere()
    field = wigner.evaluate_hybrid(states.bell_cat(3.0).proj(), cv, sp)
    corr = wigner.shape_correlation(field.sphere_slice(0), wigner.evaluate_dv(operators.pauli("x"), sp))
    return 1 - corr


@check(1e-12)
def lambert_equator_radius():
    x, y = render.lambert_project(np.pi / 2, 0.3)
    return abs(np.hypot(x, y) - 1 / np.sqrt(2))


@check(0)
def colormap_odd_symmetry():
    v = np.linspace(-3, 3, 61)
    a = render.colorize(v, -2, 2, (0, 0, 1), (1, 0, 0))
    b = render.colorize(-v, -2, 2, (1, 0, 0), (0, 0, 1))
    return int(np.abs(a.astype(int) - b.astype(int)).max())


def run_checks(names=None):
    """Run the suite; returns a JSON-ready report."""
    results = []
    for name, tol, fn in _CHECKS:
        if names and name not in names:
            continue
        try:
            value = float(fn())
            passed = bool(np.isfinite(value) and value <= tol)
            error = None
        except Exception as exc:  # a crashing check is a failed check
            value, passed, error = None, False, f"{type(exc).__name__}: {exc}"
        entry = {"name": name, "passed": passed, "value": value, "tolerance": tol}
        if error:
            entry["error"] = error
        results.append(entry)
    failed = [r["name"] for r in results if not r["passed"]]
    return {"passed": not failed, "n_checks": len(results), "failed": failed, "checks": results}


REPORT_SCHEMA = {
    "type": "object",
    "required": ["passed", "n_checks", "failed", "checks"],
    "properties": {
        "passed": {"type": "boolean"},
        "n_checks": {"type": "integer"},
        "failed": {"type": "array", "items": {"type": "string"}},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "passed", "value", "tolerance"],
                "properties": {
                    "name": {"type": "string"},
                    "passed": {"type": "boolean"},
                    "value": {"type": ["number", "null"]},
                    "tolerance": {"type": "number"},
                    "error": {"type": "string"},
                },
            },
        },
    },
}
