"""Classical energy surface on the Bloch sphere, the (theta, phi) equations
of motion, RK4 trajectories and fixed-point classification.

The equations of motion are theta' = dH/dphi and phi' = -dH/dtheta. This is
not the canonical pair (phi, cos theta), which would add 1/sin(theta)
factors; the fixed points and their stability are the same off the poles.
"""

import math
from dataclasses import dataclass
from typing import List

import numpy as np

from . import kernels
from .model import Couplings

POLE_EPS = 1e-9
GRAD_TOL = 1e-10
DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class ClassicalState:
    theta: float
    phi: float
    t: float = 0.0


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    energy: np.ndarray
    terminated: bool  # left (eps, pi - eps) before the last step

    @property
    def energy_drift(self):
        return float(abs(self.energy[-1] - self.energy[0]))


@dataclass(frozen=True)
class FixedPoint:
    theta: float
    phi: float
    energy: float
    kind: str  # "elliptic" | "hyperbolic" | "degenerate"
    hessian_eigs: tuple

    @property
    def location(self):
        return (self.theta, self.phi)


class NoSeparatrixError(ValueError):
    pass


def classical_energy(theta, phi, c):
    c = Couplings(*c)
    s2 = np.sin(theta) ** 2
    return (0.5 * c.chi0 * (1.0 - np.cos(theta) ** 2)
            + 0.5 * c.chi1 * s2 * np.cos(2.0 * phi)
            + 0.5 * c.chi2 * s2 * np.sin(2.0 * phi))


def eom_rhs(theta, phi, c):
    """(theta', phi') = (dH/dphi, -dH/dtheta)."""
    c = Couplings(*c)
    s, co = np.sin(theta), np.cos(theta)
    c2, s2 = np.cos(2.0 * phi), np.sin(2.0 * phi)
    return (c.chi2 * s * s * c2 - c.chi1 * s * s * s2,
            -(c.chi0 + c.chi1 * c2 + c.chi2 * s2) * s * co)


def integrate_rk4(s0, c, dt, n_steps, eps=POLE_EPS):
    """Fixed-step RK4 from ``s0``; stops early with ``terminated=True`` when
    theta leaves (eps, pi - eps)."""
    c = Couplings(*c).check()
    if not (dt > 0 and math.isfinite(dt)):
        raise ValueError(f"dt must be positive and finite, got {dt}")
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    s0 = ClassicalState(*s0) if not isinstance(s0, ClassicalState) else s0
    if not eps < s0.theta < math.pi - eps:
        raise ValueError(f"start theta={s0.theta} lies at a pole; phi is undefined there")
    theta, phi, taken, term = kernels.rk4(
        float(s0.theta), float(s0.phi), c.chi0, c.chi1, c.chi2, float(dt), int(n_steps), eps)
    t = s0.t + dt * np.arange(taken + 1)
    return Trajectory(t, theta, phi, classical_energy(theta, phi, c), bool(term))


def _classify(eigs):
    a, b = eigs
    if abs(a) <= DEGENERATE_TOL or abs(b) <= DEGENERATE_TOL:
        return "degenerate"
    return "elliptic" if a * b > 0 else "hyperbolic"


def _pole_hessian(chi0, chi):
    # H' near a pole in local Cartesian coordinates (x, y) = sin(theta)(cos phi, sin phi):
    # H' ~ (chi0 + chi)/2 x^2 + (chi0 - chi)/2 y^2
    return (chi0 + chi, chi0 - chi)


def _equator_hessian(chi0, chi, phi):
    # second derivatives of H' in (theta, phi) at theta = pi/2; mixed term vanishes
    c2 = math.cos(2.0 * phi)
    return (-(chi0 + chi * c2), -2.0 * chi * c2)


def find_fixed_points(chi0, chi) -> List[FixedPoint]:
    """Poles and the four equatorial axis points of the rotor energy
    H' = chi0/2 sin^2(theta) + chi/2 sin^2(theta) cos(2 phi)."""
    if chi < 0:
        raise ValueError(f"chi must be non-negative, got {chi}")
    c = Couplings(chi0, chi, 0.0)
    out = []
    for theta in (0.0, math.pi):
        eigs = _pole_hessian(chi0, chi)
        out.append(FixedPoint(theta, 0.0, float(classical_energy(theta, 0.0, c)),
                              _classify(eigs), tuple(float(e) for e in eigs)))
    for phi in (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi):
        th = 0.5 * math.pi
        g = np.hypot(*eom_rhs(th, phi, c))
        if g > GRAD_TOL * max(1.0, abs(chi0) + abs(chi)):
            continue
        eigs = _equator_hessian(chi0, chi, phi)
        out.append(FixedPoint(th, phi, float(classical_energy(th, phi, c)),
                              _classify(eigs), tuple(float(e) for e in eigs)))
    return out


def separatrix_energy(chi0, chi):
    """Energy (chi0 - chi)/2 of the hyperbolic equatorial point (pi/2, pi/2)."""
    if not chi0 > chi > 0:
        raise NoSeparatrixError(
            f"no hyperbolic fixed point unless chi0 > chi > 0 (chi0={chi0}, chi={chi})")
    fp = [p for p in find_fixed_points(chi0, chi) if p.kind == "hyperbolic"]
    return min(p.energy for p in fp)
