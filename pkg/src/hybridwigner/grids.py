"""Quadrature grids over the field phase plane and the qubit sphere.

Measures are d^2(alpha)/pi on the plane and sin(theta) dtheta dphi / (2 pi) on
the sphere; with these, integrating a Wigner function returns the trace of the
operator it represents.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidParameterError

__all__ = ["CvGrid", "SphereGrid", "DEFAULT_CV_GRID", "DEFAULT_SPHERE_GRID"]


@dataclass(frozen=True)
class CvGrid:
    """Uniform tensor grid over Re(alpha) x Im(alpha) with trapezoid weights."""

    re_range: tuple = (-6.0, 6.0)
    im_range: tuple = (-6.0, 6.0)
    n_re: int = 201
    n_im: int = 201

    def __post_init__(self):
        if self.n_re < 2 or self.n_im < 2:
            raise InvalidParameterError("CvGrid needs at least 2 points per axis")
        for lo, hi in (self.re_range, self.im_range):
            if not hi > lo:
                raise InvalidParameterError(f"empty range ({lo}, {hi})")
        object.__setattr__(self, "re_range", tuple(map(float, self.re_range)))
        object.__setattr__(self, "im_range", tuple(map(float, self.im_range)))

    @property
    def shape(self):
        return (self.n_re, self.n_im)

    @cached_property
    def re(self):
        return np.linspace(*self.re_range, self.n_re)

    @cached_property
    def im(self):
        return np.linspace(*self.im_range, self.n_im)

    @cached_property
    def alphas(self):
        """Complex nodes, shape (n_re, n_im)."""
        return self.re[:, None] + 1j * self.im[None, :]

    @cached_property
    def weights(self):
        def trap(x):
            w = np.full(x.size, x[1] - x[0])
            w[[0, -1]] /= 2
            return w

        return np.outer(trap(self.re), trap(self.im)) / np.pi

    def index_of(self, alpha, atol=1e-9):
        """(i_re, i_im) of the node at ``alpha``, or None if there is none."""
        i = int(np.argmin(np.abs(self.re - alpha.real)))
        j = int(np.argmin(np.abs(self.im - alpha.imag)))
        if abs(self.re[i] - alpha.real) <= atol and abs(self.im[j] - alpha.imag) <= atol:
            return i, j
        return None

    def to_dict(self):
        return {
            "re_range": list(self.re_range),
            "im_range": list(self.im_range),
            "n_re": self.n_re,
            "n_im": self.n_im,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["re_range"]), tuple(d["im_range"]), int(d["n_re"]), int(d["n_im"]))


@dataclass(frozen=True)
class SphereGrid:
    """Product grid in (theta, phi); theta by Gauss-Legendre in cos(theta) or band midpoints.

    Nodes are sorted by increasing theta; phi is uniform on [0, 2 pi).
    """

    n_theta: int = 64
    n_phi: int = 128
    rule: str = "gauss"

    def __post_init__(self):
        if self.n_theta < 2 or self.n_phi < 2:
            raise InvalidParameterError("SphereGrid needs at least 2 points per axis")
        if self.rule not in ("gauss", "midpoint"):
            raise InvalidParameterError(f"unknown sphere rule {self.rule!r}")

    @property
    def shape(self):
        return (self.n_theta, self.n_phi)

    @cached_property
    def _theta_and_weight(self):
        if self.rule == "gauss":
            x, w = np.polynomial.legendre.leggauss(self.n_theta)
            theta = np.arccos(x)[::-1]
            return theta, w[::-1]
        # midpoint nodes carrying the exact band area cos(lo) - cos(hi)
        edges = np.linspace(0.0, np.pi, self.n_theta + 1)
        theta = (edges[:-1] + edges[1:]) / 2
        return theta, np.cos(edges[:-1]) - np.cos(edges[1:])

    @property
    def theta(self):
        return self._theta_and_weight[0]

    @cached_property
    def phi(self):
        return np.arange(self.n_phi) * (2 * np.pi / self.n_phi)

    @cached_property
    def weights(self):
        """Per-node weights summing to 2."""
        return np.outer(self._theta_and_weight[1], np.full(self.n_phi, 1.0 / self.n_phi))

    def mesh(self):
        return np.meshgrid(self.theta, self.phi, indexing="ij")

    def to_dict(self):
        return {"n_theta": self.n_theta, "n_phi": self.n_phi, "rule": self.rule}

    @classmethod
    def from_dict(cls, d):
        return cls(int(d["n_theta"]), int(d["n_phi"]), d.get("rule", "gauss"))


DEFAULT_CV_GRID = CvGrid()
DEFAULT_SPHERE_GRID = SphereGrid()
