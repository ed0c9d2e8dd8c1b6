"""Collective spin operators in the Dicke basis, Hermitian eigensolver and
unitary evolution.

Spin quantum numbers are carried as the doubled integer ``two_j`` (N = 2j) so
half-integers stay exact. Basis index ``n`` runs over ``0..two_j`` with
``m = -j + n``, i.e. ascending in m.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import kernels

HERMITIAN_TOL = 1e-12


class SpinOperators(NamedTuple):
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray
    jplus: np.ndarray
    jminus: np.ndarray
    jsq: np.ndarray


class EigenDecomposition(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


class NotHermitianError(ValueError):
    pass


class EigenConvergenceError(RuntimeError):
    pass


def two_j_from(j):
    """Convert a spin value (int, float, str such as ``"3/2"`` or ``"1.5"``)
    to the doubled integer ``two_j``."""
    frac = Fraction(str(j)) if not isinstance(j, Fraction) else j
    doubled = 2 * frac
    if doubled.denominator != 1 or doubled < 0:
        raise ValueError(f"j={j} is not a non-negative half-integer")
    return int(doubled)


def _check_two_j(two_j):
    if int(two_j) != two_j or two_j < 0:
        raise ValueError(f"two_j must be a non-negative integer, got {two_j!r}")
    return int(two_j)


def m_values(two_j):
    """Magnetic quantum numbers in basis order, as floats."""
    two_j = _check_two_j(two_j)
    return np.arange(two_j + 1) - two_j / 2.0


def _freeze(a):
    a.setflags(write=False)
    return a


@lru_cache(maxsize=64)
def build_spin_operators(two_j):
    """Return Jx, Jy, Jz, J+, J-, J^2 for spin ``j = two_j / 2``.

    Arrays are cached and read-only; copy before modifying.
    """
    two_j = _check_two_j(two_j)
    j = two_j / 2.0
    m = m_values(two_j)
    dim = two_j + 1
    jplus = np.zeros((dim, dim), dtype=complex)
    # <m+1| J+ |m> sits at row n+1, column n
    ladder = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    jplus[np.arange(1, dim), np.arange(dim - 1)] = ladder
    jminus = jplus.conj().T.copy()
    jx = 0.5 * (jplus + jminus)
    jy = -0.5j * (jplus - jminus)
    jz = np.diag(m).astype(complex)
    jsq = j * (j + 1) * np.eye(dim, dtype=complex)
    return SpinOperators(*(_freeze(a) for a in (jx, jy, jz, jplus, jminus, jsq)))


def parity_diagonal(two_j):
    """Diagonal of the parity operator (-1)^(Jz + j): +1 on even n, -1 on odd."""
    n = np.arange(_check_two_j(two_j) + 1)
    return np.where(n % 2 == 0, 1.0, -1.0)


def hermitize(h):
    """Return (h + h^H) / 2."""
    h = np.asarray(h, dtype=complex)
    return 0.5 * (h + h.conj().T)


def check_hermitian(h, tol=HERMITIAN_TOL):
    """Raise :class:`NotHermitianError` if ``h`` deviates from Hermiticity by
    more than ``tol * max(1, max|h|)`` in any entry."""
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {h.shape}")
    if h.size == 0:
        return
    dev = np.abs(h - h.conj().T)
    worst = np.unravel_index(np.argmax(dev), dev.shape)
    scale = max(1.0, float(np.abs(h).max()))
    if dev[worst] > tol * scale:
        a, b = worst
        raise NotHermitianError(
            f"matrix is not Hermitian: |H[{a},{b}] - conj(H[{b},{a}])| = "
            f"{dev[worst]:.3e} exceeds {tol:.1e} * {scale:.3e}")


def max_row_sum_norm(h):
    return float(np.abs(h).sum(axis=1).max()) if np.size(h) else 0.0


def _pow2_scale(a, k):
    """a * 2**k, applied in two halves so neither factor over/underflows."""
    half = k // 2
    return a * math.ldexp(1.0, half) * math.ldexp(1.0, k - half)


def hermitian_eigen(h):
    """Eigendecomposition of a Hermitian matrix.

    Householder reduction to a real tridiagonal matrix followed by implicit
    QL. Eigenvalues are ascending; each eigenvector is rotated so that its
    largest-magnitude component is real and positive.
    """
    h = np.asarray(h, dtype=complex)
    check_hermitian(h)
    n = h.shape[0]
    if n == 0:
        return EigenDecomposition(np.zeros(0), np.zeros((0, 0), dtype=complex))
    # power-of-two rescaling is exact and keeps QL away from under/overflow
    peak = float(np.abs(h).max())
    if peak == 0.0:
        return EigenDecomposition(np.zeros(n), np.eye(n, dtype=complex))
    expo = math.frexp(peak)[1]
    d, e, q = kernels.tridiagonalize(_pow2_scale(h, -expo))
    d = np.ascontiguousarray(d, dtype=float)
    e_full = np.zeros(n)
    e_full[: n - 1] = e
    zt = np.eye(n)
    status = kernels.tridiag_ql(d, e_full, zt)
    if status:
        raise EigenConvergenceError(
            f"implicit QL did not converge for level {status - 1} of {n}")
    order = np.argsort(d, kind="stable")
    values = _pow2_scale(d[order], expo)
    vectors = q @ zt[order].T
    idx = np.argmax(np.abs(vectors), axis=0)
    pivots = vectors[idx, np.arange(n)]
    vectors = vectors * (pivots.conj() / np.abs(pivots))[np.newaxis, :]
    return EigenDecomposition(values, vectors)


@dataclass(frozen=True)
class SpinState:
    """Pure spin-j state: amplitudes over Dicke states, ascending in m."""

    two_j: int
    amplitudes: np.ndarray

    def __post_init__(self):
        two_j = _check_two_j(self.two_j)
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != two_j + 1:
            raise ValueError(
                f"spin j={two_j}/2 needs {two_j + 1} amplitudes, got {amps.shape[0]}")
        amps.setflags(write=False)
        object.__setattr__(self, "two_j", two_j)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def j(self):
        return self.two_j / 2.0

    @property
    def dim(self):
        return self.two_j + 1

    def norm(self):
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))

    def normalized(self):
        nrm = self.norm()
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return SpinState(self.two_j, self.amplitudes / nrm)

    def __eq__(self, other):
        if not isinstance(other, SpinState):
            return NotImplemented
        return self.two_j == other.two_j and np.array_equal(self.amplitudes, other.amplitudes)

    __hash__ = None


def propagator(g, t):
    """exp(-i G t) as a dense matrix, via the eigendecomposition of G."""
    values, vectors = hermitian_eigen(g)
    return (vectors * np.exp(-1j * values * t)[np.newaxis, :]) @ vectors.conj().T


def evolve(g, t, psi):
    """Apply exp(-i G t) to ``psi`` using the eigendecomposition of G."""
    g = np.asarray(g, dtype=complex)
    if g.shape != (psi.dim, psi.dim):
        raise ValueError(
            f"generator dimension {g.shape[0]} does not match state dimension {psi.dim}")
    if t == 0:
        return SpinState(psi.two_j, psi.amplitudes.copy())
    values, vectors = hermitian_eigen(g)
    coeffs = vectors.conj().T @ psi.amplitudes
    return SpinState(psi.two_j, vectors @ (np.exp(-1j * values * t) * coeffs))
