"""Majorana polynomial, Aberth-Ehrlich roots and the stellar constellation.

The polynomial of a state is P(z) = sum_n a_n z^n with
a_n = (-1)^n sqrt(C(2j, n)) c_n; its roots map to the sphere by
z = cot(theta/2) exp(i phi), and a missing top degree counts as stars at
theta = 0.
"""

import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from . import kernels
from .spinalg import SpinState
from .states import BlochDirection, sqrt_binomials

INFINITY_TOL = 1e-12
RESIDUAL_TOL = 1e-10
MAX_ITER = 200
STEP_TOL = 1e-13
EPS = np.finfo(float).eps


class RootFindingError(RuntimeError):
    def __init__(self, message, worst_residual):
        super().__init__(message)
        self.worst_residual = worst_residual


@dataclass(frozen=True)
class MajoranaPolynomial:
    two_j: int
    coeffs: np.ndarray  # ascending powers of z

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        if c.shape[0] != self.two_j + 1:
            raise ValueError(f"expected {self.two_j + 1} coefficients, got {c.shape[0]}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coeffs)


@dataclass(frozen=True)
class Constellation:
    two_j: int
    finite_roots: np.ndarray
    infinity_count: int
    sphere_points: List[BlochDirection] = field(default_factory=list)

    @property
    def stars(self) -> List[Tuple[float, float]]:
        return [(p.theta, p.phi) for p in self.sphere_points]


def _signs(two_j):
    return np.where(np.arange(two_j + 1) % 2 == 0, 1.0, -1.0)


def polynomial_from_state(psi):
    a = _signs(psi.two_j) * sqrt_binomials(psi.two_j) * psi.amplitudes
    return MajoranaPolynomial(psi.two_j, a)


def state_from_polynomial(p):
    """Invert :func:`polynomial_from_state` (no renormalization)."""
    return SpinState(p.two_j, p.coeffs * _signs(p.two_j) / sqrt_binomials(p.two_j))


def oat_normalized_polynomial(N, mu):
    """F_N(z) = sum_n C(N, n) q^(n(N - n)) (-z)^n with q = exp(i mu / 2)."""
    if int(N) != N or N < 1:
        raise ValueError(f"N must be a positive integer, got {N}")
    N = int(N)
    n = np.arange(N + 1)
    binom = np.array([math.comb(N, k) for k in n], dtype=float)
    # integer powers of q keep the phase error at a few ulps even for large n(N - n)
    q = complex(math.cos(0.5 * mu), math.sin(0.5 * mu))
    phase = np.array([q ** int(e) for e in n * (N - n)])
    return MajoranaPolynomial(N, binom * phase * _signs(N))


def _initial_guesses(a):
    """Points on a circle whose radius is the geometric mean of the root
    moduli, |a_0 / a_deg|^(1/deg), rotated off the real axis."""
    deg = a.shape[0] - 1
    radius = float(abs(a[0] / a[-1])) ** (1.0 / deg)
    k = np.arange(deg)
    return radius * np.exp(1j * (2.0 * np.pi * k / deg + 0.4))


def _horner_derivs(a, z, m):
    """p^(k)(z)/k! for k = 0..m-1, via repeated synthetic division."""
    b = a[::-1].astype(complex).copy()  # descending
    out = []
    for _ in range(m):
        acc = 0j
        nb = np.empty(len(b) - 1, dtype=complex) if len(b) > 1 else np.empty(0, dtype=complex)
        for i, coef in enumerate(b):
            acc = acc * z + coef
            if i < len(b) - 1:
                nb[i] = acc
        out.append(acc)
        b = nb
        if len(b) == 0:
            break
    return out


def _residual_scale(a, z):
    deg = a.shape[0] - 1
    return float(np.max(np.abs(a))) * max(1.0, abs(z)) ** deg


def _polish_clusters(a, z):
    """Refine clusters of nearly coincident roots.

    Roots whose inclusion discs (radius deg |p/p'|, doubled for slack)
    overlap are grouped.
    For a group of size m the common centre is refined by Newton steps on
    p^(m-1); it is accepted only if p, ..., p^(m-1) all vanish there to
    rounding level, in which case all m members are moved onto it.
    """
    deg = a.shape[0] - 1
    n = z.shape[0]
    rad = np.empty(n)
    for i in range(n):
        d = _horner_derivs(a, z[i], 2)
        rad[i] = deg * abs(d[0] / d[1]) if len(d) > 1 and d[1] != 0 else np.inf
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for k in range(i + 1, n):
            if abs(z[i] - z[k]) <= 2.0 * (rad[i] + rad[k]):
                parent[find(i)] = find(k)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    for members in groups.values():
        m = len(members)
        if m < 2:
            continue
        c = complex(np.mean(z[members]))
        dm = np.polynomial.polynomial.polyder(a, m - 1)
        dm1 = np.polynomial.polynomial.polyder(a, m)
        for _ in range(50):
            f = np.polynomial.polynomial.polyval(c, dm)
            g = np.polynomial.polynomial.polyval(c, dm1)
            if g == 0:
                break
            step = f / g
            c -= step
            if abs(step) <= 4 * EPS * (1.0 + abs(c)):
                break
        derivs = _horner_derivs(a, c, m)
        abs_a = np.abs(a)
        ok = True
        for k, dk in enumerate(derivs):
            bound = np.polynomial.polynomial.polyval(
                abs(c), np.polynomial.polynomial.polyder(abs_a, k)) / math.factorial(k)
            ok = ok and abs(dk) <= 64.0 * deg * EPS * bound
        if ok:
            z[members] = c
    return z


def find_roots(p):
    """Finite roots and the count of roots at infinity of a Majorana polynomial."""
    a = np.asarray(p.coeffs, dtype=complex)
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if scale == 0.0:
        raise ValueError("the zero polynomial has no constellation")
    nz = np.nonzero(np.abs(a) > INFINITY_TOL * scale)[0]
    top = int(nz[-1])
    infinity = p.two_j - top
    a = a[: top + 1] / a[top]
    # zero roots factor out exactly
    low = int(nz[0])
    roots = [np.zeros(low, dtype=complex)]
    b = a[low:]
    deg = b.shape[0] - 1
    if deg == 1:
        roots.append(np.array([-b[0] / b[1]]))
    elif deg > 1:
        z = _initial_guesses(b)
        done, _ = kernels.aberth(b, z, MAX_ITER, STEP_TOL)
        z = _polish_clusters(b, z)
        res = np.abs(np.polynomial.polynomial.polyval(z, a))
        limit = np.array([RESIDUAL_TOL * _residual_scale(a, zi) for zi in z])
        if not np.all(np.isfinite(z)) or np.any(res > limit):
            bad = res / np.maximum(limit / RESIDUAL_TOL, np.finfo(float).tiny)
            raise RootFindingError(
                f"Aberth iteration did not converge in {MAX_ITER} steps "
                f"(worst scaled residual {np.nanmax(bad):.3e})", float(np.nanmax(bad)))
        roots.append(z)
    finite = np.concatenate(roots) if roots else np.zeros(0, dtype=complex)
    order = np.lexsort((np.mod(np.angle(finite), 2 * np.pi), np.round(np.abs(finite), 12)))
    return Constellation(p.two_j, finite[order], infinity)


def to_sphere(c):
    """Fill the sphere points: theta = 2 arctan(1/|z|), phi = arg z mod 2pi."""
    pts = []
    for z in c.finite_roots:
        r = abs(z)
        theta = math.pi if r == 0.0 else 2.0 * math.atan(1.0 / r)
        phi = math.atan2(z.imag, z.real) % (2.0 * math.pi) if r > 0 else 0.0
        pts.append(BlochDirection(theta, phi))
    pts.extend(BlochDirection(0.0, 0.0) for _ in range(c.infinity_count))
    return Constellation(c.two_j, c.finite_roots, c.infinity_count, pts)


def constellation(psi):
    """Polynomial, roots and stars of a state in one call."""
    return to_sphere(find_roots(polynomial_from_state(psi)))


def antipode(direction):
    d = BlochDirection(*direction)
    return BlochDirection(math.pi - d.theta, (d.phi + math.pi) % (2.0 * math.pi))


def rebuild_coefficients(c, leading):
    """Coefficients of leading * prod(z - z_k), padded for roots at infinity."""
    poly = np.array([leading], dtype=complex)
    for zk in c.finite_roots:
        poly = np.convolve(poly, np.array([-zk, 1.0]))
    out = np.zeros(c.two_j + 1, dtype=complex)
    out[: len(poly)] = poly
    return out
