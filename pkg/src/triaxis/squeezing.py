"""Kitagawa-Ueda squeezing parameter, perpendicular frame, optimal angle,
the closed-form one-axis result and survival probabilities."""

import math
from dataclasses import dataclass

import numpy as np

from .spinalg import build_spin_operators, evolve, hermitian_eigen

IMAG_TOL = 1e-10
FRAME_TOL = 1e-8
POLE_TOL = 1e-12
UNIT_TOL = 1e-9


class FrameUndefinedError(ValueError):
    """Raised when the mean spin is too small to define a perpendicular frame."""


@dataclass(frozen=True)
class SqueezingReport:
    mean_spin: np.ndarray
    mean_norm: float
    n1: np.ndarray
    n2: np.ndarray
    varJ: np.ndarray
    A: float
    B: float
    xi2: float
    phi_opt: float

    @property
    def n_opt(self):
        """Direction n1 cos(phi_opt) + n2 sin(phi_opt) of minimal variance."""
        return self.n1 * math.cos(self.phi_opt) + self.n2 * math.sin(self.phi_opt)


def _ops(two_j):
    o = build_spin_operators(two_j)
    return (o.jx, o.jy, o.jz)


def _real_expectation(value, what):
    if abs(value.imag) > IMAG_TOL:
        raise ArithmeticError(
            f"<{what}> has imaginary part {value.imag:.3e}; operator is not Hermitian")
    return float(value.real)


def mean_spin(psi):
    """(<Jx>, <Jy>, <Jz>) for a normalized state."""
    c = psi.amplitudes
    return np.array([_real_expectation(np.vdot(c, op @ c), name)
                     for op, name in zip(_ops(psi.two_j), "xyz")])


def covariance_matrix(psi):
    """Symmetrized covariance C_ab = <{Ja, Jb}>/2 - <Ja><Jb>."""
    c = psi.amplitudes
    vecs = [op @ c for op in _ops(psi.two_j)]
    mean = np.array([np.vdot(c, v).real for v in vecs])
    gram = np.array([[np.vdot(va, vb).real for vb in vecs] for va in vecs])
    cov = gram - np.outer(mean, mean)
    return 0.5 * (cov + cov.T)


def perp_frame(direction):
    """Orthonormal pair (n1, n2) perpendicular to ``direction``.

    n1 = (-sin phi, cos phi, 0), n2 = (cos theta cos phi, cos theta sin phi,
    -sin theta). Along +z phi is fixed to 0, along -z to pi, which gives
    n1 = (0, -1, 0), n2 = (1, 0, 0) for the south pole.
    """
    d = np.asarray(direction, dtype=float)
    r = float(np.linalg.norm(d))
    if not r > 0.0 or not math.isfinite(r):
        raise FrameUndefinedError("perpendicular frame undefined for a zero direction")
    x, y, z = d / r
    if math.hypot(x, y) <= POLE_TOL:
        theta, phi = (0.0, 0.0) if z > 0 else (math.pi, math.pi)
    else:
        theta = math.acos(max(-1.0, min(1.0, z)))
        phi = math.atan2(y, x)
    st, ct = math.sin(theta), math.cos(theta)
    sp, cp = math.sin(phi), math.cos(phi)
    return np.array([-sp, cp, 0.0]), np.array([ct * cp, ct * sp, -st])


def _unit(v, name):
    v = np.asarray(v, dtype=float)
    nrm = float(np.linalg.norm(v))
    if abs(nrm - 1.0) > UNIT_TOL:
        raise ValueError(f"{name} must be a unit vector (norm {nrm:.12g})")
    return v / nrm


def variance_cov(psi, a, b):
    """Cov(J_a, J_b) = <{J_a, J_b}>/2 - <J_a><J_b>; the variance when a = b."""
    a = _unit(a, "a")
    b = _unit(b, "b")
    return float(a @ covariance_matrix(psi) @ b)


def optimal_angle(A, B):
    """Angle phi in [0, pi) minimizing A cos 2phi + B sin 2phi."""
    R = math.hypot(A, B)
    if R == 0.0:
        return 0.0
    half = 0.5 * math.acos(max(-1.0, min(1.0, -A / R)))
    return half if B <= 0 else math.pi - half


def squeezing_report(psi, direction=None):
    """Squeezing parameter and optimal angle of a pure state.

    The frame is built from the mean spin. If it vanishes (below 1e-8 j) a
    :class:`FrameUndefinedError` is raised unless ``direction`` supplies
    the reference axis explicitly.
    """
    j = psi.j
    if j <= 0:
        raise ValueError("squeezing is undefined for j = 0")
    cov = covariance_matrix(psi)
    mean = mean_spin(psi)
    norm = float(np.linalg.norm(mean))
    if norm < FRAME_TOL * j:
        if direction is None:
            raise FrameUndefinedError(
                f"mean spin |<J>| = {norm:.3e} is below {FRAME_TOL:g} * j; "
                "pass an explicit direction")
        axis = np.asarray(direction, dtype=float)
    else:
        axis = mean
    n1, n2 = perp_frame(axis)
    v1 = float(n1 @ cov @ n1)
    v2 = float(n2 @ cov @ n2)
    c12 = float(n1 @ cov @ n2)
    A = v1 - v2
    B = 2.0 * c12
    xi2 = max(0.0, (v1 + v2 - math.hypot(A, B)) / j)
    return SqueezingReport(mean, norm, n1, n2, cov, A, B, xi2, optimal_angle(A, B))


def oat_xi_closed(N, mu):
    """Closed-form one-axis squeezing parameter for N = 2j spins."""
    if N < 1 or int(N) != N:
        raise ValueError(f"N must be a positive integer, got {N}")
    N = int(N)
    mu = np.asarray(mu, dtype=float)
    if N == 1:
        return np.ones_like(mu) if mu.ndim else 1.0
    a = 1.0 - np.cos(mu) ** (N - 2)
    b = 4.0 * np.sin(mu / 2.0) ** 2 * np.cos(mu / 2.0) ** (2 * (N - 2))
    out = 1.0 + 0.5 * (N - 1) * (0.5 * a - np.sqrt(0.25 * a * a + b))
    return out if out.ndim else float(out)


def survival_probability(psi0, h, t):
    """P(t) = |<psi0| exp(-i H t) |psi0>|^2."""
    h = np.asarray(h)
    if h.shape != (psi0.dim, psi0.dim):
        raise ValueError(
            f"Hamiltonian dimension {h.shape[0]} does not match state dimension {psi0.dim}")
    psi_t = evolve(h, t, psi0)
    return float(min(1.0, abs(np.vdot(psi0.amplitudes, psi_t.amplitudes)) ** 2))


def survival_curve(psi0, h, times):
    """Vectorized P(t) over many times from a single eigendecomposition."""
    h = np.asarray(h)
    if h.shape != (psi0.dim, psi0.dim):
        raise ValueError(
            f"Hamiltonian dimension {h.shape[0]} does not match state dimension {psi0.dim}")
    w, v = hermitian_eigen(h)
    weights = np.abs(v.conj().T @ psi0.amplitudes) ** 2
    times = np.asarray(times, dtype=float)
    amp = np.exp(-1j * np.outer(times, w)) @ weights
    return np.minimum(1.0, np.abs(amp) ** 2)

