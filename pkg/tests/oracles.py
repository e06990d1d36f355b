"""Closed-form Wigner functions used as independent references.

Conventions: W(alpha) integrates to one under d^2 alpha / pi, so the vacuum
peak is 2; qubit fields integrate to Tr under sin(theta) dtheta dphi / (2 pi).
"""

import numpy as np
from scipy.special import eval_genlaguerre

SQRT3 = np.sqrt(3.0)


def fock_wigner(n, alpha):
    r2 = np.abs(alpha) ** 2
    return 2 * (-1) ** n * eval_genlaguerre(n, 0, 4 * r2) * np.exp(-2 * r2)


def coherent_wigner(beta, alpha):
    return 2 * np.exp(-2 * np.abs(alpha - beta) ** 2)


def even_cat_wigner(beta, alpha):
    """(|beta> + |-beta>)/N for real beta: two lobes plus a fringe along Im alpha."""
    lobes = np.exp(-2 * np.abs(alpha - beta) ** 2) + np.exp(-2 * np.abs(alpha + beta) ** 2)
    fringe = 2 * np.exp(-2 * np.abs(alpha) ** 2) * np.cos(4 * beta * alpha.imag)
    return (lobes + fringe) / (1 + np.exp(-2 * beta**2))


def excited_wigner(theta):
    return (1 + SQRT3 * np.cos(theta)) / 2


def fock1_negativity():
    # integral over r < 1/2 of 4 r (1 - 4 r^2) exp(-2 r^2) dr, done by hand
    return 2 * np.exp(-0.5) - 1
