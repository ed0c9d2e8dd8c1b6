"""Husimi-Q function on the Bloch sphere.

Q(theta, phi) = (2j+1)/(4 pi) |sum_n sqrt(C(2j,n)) cos^(2j-n)(theta/2)
sin^n(theta/2) e^(i n phi) c_n|^2, which peaks at (theta0, phi0) for
``coherent_state(j, (theta0, phi0))``.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .states import BlochDirection, half_angle_weights


class GridTooSmallError(ValueError):
    pass


@dataclass(frozen=True)
class QGrid:
    n_theta: int
    n_phi: int
    theta_nodes: np.ndarray
    phi_nodes: np.ndarray
    theta_weights: np.ndarray  # Gauss-Legendre weights in cos(theta)
    values: np.ndarray  # shape (n_theta, n_phi)
    cartesian: Optional[np.ndarray] = None  # shape (n_theta, n_phi, 3)

    def integral(self):
        dphi = 2.0 * math.pi / self.n_phi
        return float(self.theta_weights @ self.values.sum(axis=1) * dphi)


def _prefactor(two_j):
    return (two_j + 1) / (4.0 * math.pi)


def _overlaps(psi, theta, phi):
    """<theta, phi|psi> for 1-D arrays theta (rows) and phi (columns)."""
    n = np.arange(psi.two_j + 1)
    w = np.array([half_angle_weights(psi.two_j, t) for t in np.atleast_1d(theta)])
    fourier = np.exp(1j * np.outer(n, np.atleast_1d(phi)))
    return (w * psi.amplitudes[np.newaxis, :]) @ fourier


def q_value(psi, direction):
    d = BlochDirection(*direction)
    ov = _overlaps(psi, [d.theta], [d.phi])[0, 0]
    return float(_prefactor(psi.two_j) * abs(ov) ** 2)


def sphere_nodes(n_theta, n_phi):
    """Gauss-Legendre nodes in cos(theta) sorted so theta ascends, plus a
    uniform phi grid starting at 0."""
    x, w = np.polynomial.legendre.leggauss(n_theta)
    # x ascending -> theta descending; flip so theta ascends
    x, w = x[::-1], w[::-1]
    theta = np.arccos(x)
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    return theta, w, phi


def q_grid(psi, n_theta, n_phi, cartesian=False, require_exact=False):
    """Evaluate Q on a Gauss-Legendre x uniform grid.

    With ``require_exact`` the grid must be large enough for the quadrature
    to integrate Q exactly (n_theta >= 2j+1, n_phi >= 4j+2).
    """
    if n_theta < 2 or n_phi < 2:
        raise GridTooSmallError(f"grid needs n_theta, n_phi >= 2, got {n_theta}x{n_phi}")
    if require_exact and (n_theta < psi.two_j + 1 or n_phi < 2 * psi.two_j + 2):
        raise GridTooSmallError(
            f"normalization needs n_theta >= {psi.two_j + 1} and n_phi >= "
            f"{2 * psi.two_j + 2}, got {n_theta}x{n_phi}")
    theta, w, phi = sphere_nodes(n_theta, n_phi)
    q = _prefactor(psi.two_j) * np.abs(_overlaps(psi, theta, phi)) ** 2
    cart = None
    if cartesian:
        st = np.sin(theta)[:, None]
        cart = np.stack([q * st * np.cos(phi)[None, :],
                         q * st * np.sin(phi)[None, :],
                         q * np.cos(theta)[:, None]], axis=-1)
    return QGrid(n_theta, n_phi, theta, phi, w, q, cart)


def q_normalization(psi, n_theta=None, n_phi=None):
    """Integral of Q over the sphere; the default grid is exact."""
    n_theta = psi.two_j + 1 if n_theta is None else n_theta
    n_phi = 2 * psi.two_j + 2 if n_phi is None else n_phi
    return q_grid(psi, max(n_theta, 2), max(n_phi, 2)).integral()
