"""Tri-axis Hamiltonian, its rotation to the principal frame and the
asymmetric-rotor form.

The couplings multiply the bare quadratic forms: there is no 1/N prefactor
and no linear field term, so any N-scaling for large-j comparisons is left
to the caller.
"""

import math
from typing import NamedTuple

import numpy as np

from .spinalg import build_spin_operators, hermitize


class Couplings(NamedTuple):
    chi0: float
    chi1: float = 0.0
    chi2: float = 0.0

    def check(self):
        for name, v in zip(self._fields, self):
            if not math.isfinite(v):
                raise ValueError(f"coupling {name} must be finite, got {v!r}")
        return self


class RotorParams(NamedTuple):
    theta_rot: float
    chi: float


def _sq(a):
    return a @ a


def triaxis_hamiltonian(two_j, c):
    """H = chi0/2 (J^2 - Jz^2) + chi1/2 (Jx^2 - Jy^2) + chi2/2 (JxJy + JyJx)."""
    c = Couplings(*c).check()
    ops = build_spin_operators(two_j)
    jx, jy, jz = ops.jx, ops.jy, ops.jz
    h = (0.5 * c.chi0 * (ops.jsq - _sq(jz))
         + 0.5 * c.chi1 * (_sq(jx) - _sq(jy))
         + 0.5 * c.chi2 * (jx @ jy + jy @ jx))
    return hermitize(h)


def rotation_params(c):
    """Principal-frame angle theta = arg(chi1 - i chi2)/2 and strength chi.

    theta lies in (-pi/2, pi/2]; the isotropic case chi1 = chi2 = 0 gives 0.
    """
    c = Couplings(*c).check()
    chi = math.hypot(c.chi1, c.chi2)
    if chi == 0.0:
        return RotorParams(0.0, 0.0)
    arg = math.atan2(-c.chi2 + 0.0, c.chi1)  # +0.0 folds -0.0 so arg(-1) = +pi
    return RotorParams(0.5 * arg, chi)


def rotated_hamiltonian(two_j, chi0, chi):
    """H' = (chi0 + chi)/2 Ix^2 + (chi0 - chi)/2 Iy^2, the rotor form."""
    if not (math.isfinite(chi0) and math.isfinite(chi)):
        raise ValueError("chi0 and chi must be finite")
    if chi < 0:
        raise ValueError(f"chi must be non-negative, got {chi}")
    ops = build_spin_operators(two_j)
    h = 0.5 * (chi0 + chi) * _sq(ops.jx) + 0.5 * (chi0 - chi) * _sq(ops.jy)
    return hermitize(h)


def rotation_operator(two_j, theta):
    """Rz(theta) = exp(-i theta Jz), diagonal in the Dicke basis."""
    ops = build_spin_operators(two_j)
    return np.diag(np.exp(-1j * theta * ops.jz.diagonal().real))


def to_rotated_frame(h, two_j, theta):
    """Return Rz H Rz^dagger, which maps the general tri-axis form onto the rotor form
    when theta comes from :func:`rotation_params`."""
    rz = rotation_operator(two_j, theta)
    return rz @ h @ rz.conj().T
