"""Coherent, Dicke and twisted spin states, parity classification and the
j = 1 two-qubit concurrence.

Coherent states follow the stereographic convention
``tau = tan(theta0/2) exp(-i phi0)`` with ``c_n ~ tau**n``, so ``theta0 = 0``
is the lowest-weight state |j,-j> and the mean spin of ``coherent_state(j,
(theta0, phi0))`` points along ``(sin theta0 cos phi0, sin theta0 sin phi0,
-cos theta0)``.
"""

import math
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .model import Couplings, triaxis_hamiltonian
from .spinalg import SpinState, build_spin_operators, evolve, parity_diagonal

PARITY_TOL = 1e-12
LOG_KERNEL_MIN_TWO_J = 60  # j >= 30


class TwistParams(NamedTuple):
    mu0: float
    mu1: float = 0.0
    mu2: float = 0.0

    @property
    def xi(self):
        return complex(self.mu1, -self.mu2)

    @property
    def abs_xi(self):
        return math.hypot(self.mu1, self.mu2)

    @property
    def vartheta(self):
        return math.sqrt(self.mu0 ** 2 + 3.0 * self.abs_xi ** 2)


class BlochDirection(NamedTuple):
    theta: float
    phi: float = 0.0

    def normalized(self):
        if not (math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise ValueError("direction angles must be finite")
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        return BlochDirection(self.theta, self.phi % (2.0 * math.pi))

    @property
    def tau(self):
        return math.tan(self.theta / 2.0) * complex(math.cos(self.phi), -math.sin(self.phi))


SOUTH = BlochDirection(0.0, 0.0)  # |j,-j> under the tau convention


class Parity(NamedTuple):
    label: str
    max_violation: float


def log_binomials(two_j):
    """log C(2j, n) for n = 0..2j."""
    n = np.arange(two_j + 1)
    lg = np.vectorize(math.lgamma)
    return lg(two_j + 1.0) - lg(n + 1.0) - lg(two_j - n + 1.0)


def sqrt_binomials(two_j):
    if two_j < LOG_KERNEL_MIN_TWO_J:
        return np.sqrt(np.array([math.comb(two_j, k) for k in range(two_j + 1)], dtype=float))
    return np.exp(0.5 * log_binomials(two_j))


def half_angle_weights(two_j, theta):
    """Return sqrt(C(2j,n)) cos(theta/2)^(2j-n) sin(theta/2)^n for all n.

    Switches to log-space accumulation for large j so neither the binomials
    overflow nor the half-angle powers underflow prematurely.
    """
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    n = np.arange(two_j + 1)
    if two_j < LOG_KERNEL_MIN_TWO_J:
        return sqrt_binomials(two_j) * c ** (two_j - n) * s ** n
    logw = 0.5 * log_binomials(two_j)
    out = np.zeros(two_j + 1)
    ac, as_ = abs(c), abs(s)
    lc = math.log(ac) if ac > 0 else -math.inf
    ls = math.log(as_) if as_ > 0 else -math.inf
    # 0 * log(0) terms must contribute 0, not nan
    with np.errstate(invalid="ignore"):
        tc = np.where(two_j - n == 0, 0.0, (two_j - n) * lc)
        ts = np.where(n == 0, 0.0, n * ls)
    total = logw + tc + ts
    finite = np.isfinite(total)
    out[finite] = np.exp(total[finite])
    sign = np.where((c < 0) & ((two_j - n) % 2 == 1), -1.0, 1.0) * np.where(
        (s < 0) & (n % 2 == 1), -1.0, 1.0)
    return out * sign


def coherent_state(two_j, direction):
    """Spin coherent state c_n = sqrt(C(2j,n)) cos^(2j-n)(theta0/2)
    sin^n(theta0/2) exp(-i n phi0), equal to the tau form of the
    stereographic parametrization and regular at theta0 = pi."""
    d = BlochDirection(*direction).normalized()
    if d.theta == math.pi:
        amps = np.zeros(two_j + 1, dtype=complex)
        amps[two_j] = 1.0
        return SpinState(two_j, amps)
    n = np.arange(two_j + 1)
    w = half_angle_weights(two_j, d.theta)
    amps = w * np.exp(-1j * n * d.phi)
    return SpinState(two_j, amps / np.linalg.norm(amps))


def dicke_state(two_j, m):
    """Unit vector |j, m>; ``m`` may be given as float, Fraction or string."""
    frac = Fraction(str(m)) if not isinstance(m, Fraction) else m
    n = frac + Fraction(two_j, 2)
    if n.denominator != 1 or not 0 <= n <= two_j:
        raise ValueError(f"m={m} is not a valid magnetic number for j={two_j}/2")
    amps = np.zeros(two_j + 1, dtype=complex)
    amps[int(n)] = 1.0
    return SpinState(two_j, amps)


def lowest_weight(two_j):
    amps = np.zeros(two_j + 1, dtype=complex)
    amps[0] = 1.0
    return SpinState(two_j, amps)


def oat_state(two_j, mu):
    """One-axis twisted state exp(-i mu Jz^2 / 2)|pi/2, 0>."""
    m = np.arange(two_j + 1) - two_j / 2.0
    if two_j < LOG_KERNEL_MIN_TWO_J:
        w = sqrt_binomials(two_j) * 2.0 ** (-two_j / 2.0)
    else:
        w = np.exp(0.5 * (log_binomials(two_j) - two_j * math.log(2.0)))
    return SpinState(two_j, w * np.exp(-0.5j * mu * m * m))


def tact_generator(two_j):
    ops = build_spin_operators(two_j)
    return ops.jx @ ops.jy + ops.jy @ ops.jx


def tact_state(two_j, nu):
    """Two-axis counter-twisted state exp(-nu (J+^2 - J-^2)/2)|j,-j>,
    computed as exp(-i nu (JxJy + JyJx))|j,-j>."""
    return evolve(tact_generator(two_j), nu, lowest_weight(two_j))


def triaxis_generator(two_j, p):
    """G = [mu0 (J^2 - Jz^2) + mu1 (Jx^2 - Jy^2) + mu2 (JxJy + JyJx)] / 2."""
    p = TwistParams(*p)
    return triaxis_hamiltonian(two_j, Couplings(p.mu0, p.mu1, p.mu2))


def triaxis_state(two_j, p, init=SOUTH):
    """Tri-axis squeezed state exp(-i G) applied to a coherent state."""
    p = TwistParams(*p)
    for v in p:
        if not math.isfinite(v):
            raise ValueError("twist parameters must be finite")
    return evolve(triaxis_generator(two_j, p), 1.0, coherent_state(two_j, init))


CLOSED_FORM_TACT_TWO_J = (2, 3, 4, 5)
CLOSED_FORM_TRIAXIS_TWO_J = (2, 3)


def closed_form_tact(two_j, nu):
    """Closed-form two-axis states for j = 1, 3/2, 2, 5/2 (global phase as
    printed in the reference expressions)."""
    amps = np.zeros(two_j + 1, dtype=complex)
    if two_j == 2:
        amps[2], amps[0] = -math.sin(nu), math.cos(nu)
    elif two_j == 3:
        u = math.sqrt(3.0) * nu
        amps[2], amps[0] = -math.sin(u), math.cos(u)
    elif two_j == 4:
        u = math.sqrt(3.0) * nu
        amps[4] = math.sin(u) ** 2
        amps[2] = -math.sin(2 * u) / math.sqrt(2.0)
        amps[0] = math.cos(u) ** 2
    elif two_j == 5:
        u = math.sqrt(7.0) * nu
        s = math.sin(u)
        amps[4] = 3.0 * math.sqrt(5.0) / 7.0 * s * s
        amps[2] = -math.sqrt(10.0 / 7.0) * s * math.cos(u)
        amps[0] = 1.0 - 5.0 / 7.0 * s * s
    else:
        raise ValueError(f"no closed-form two-axis state for j={two_j}/2; "
                         f"supported two_j: {CLOSED_FORM_TACT_TWO_J}")
    return SpinState(two_j, amps)


def closed_form_triaxis(two_j, mu0, mu):
    """Closed-form tri-axis states (mu2 = 0, mu1 = mu) for j = 1 and 3/2.

    For j = 3/2 the two components sit on m = 1/2 and m = -3/2, the only
    labels compatible with parity conservation from |3/2, -3/2>.
    """
    amps = np.zeros(two_j + 1, dtype=complex)
    if two_j == 2:
        ph = np.exp(-0.5j * mu0)
        amps[2] = -1j * ph * math.sin(mu / 2.0)
        amps[0] = ph * math.cos(mu / 2.0)
    elif two_j == 3:
        th = math.sqrt(mu0 * mu0 + 3.0 * mu * mu)
        ph = np.exp(-1.25j * mu0)
        if th == 0.0:
            amps[0] = ph
        else:
            s, c = math.sin(th / 2.0), math.cos(th / 2.0)
            amps[2] = -ph * math.sqrt(3.0) * 1j * mu / th * s
            amps[0] = ph * (c + 1j * mu0 / th * s)
    else:
        raise ValueError(f"no closed-form tri-axis state for j={two_j}/2; "
                         f"supported two_j: {CLOSED_FORM_TRIAXIS_TWO_J}")
    return SpinState(two_j, amps)


def parity_of(psi, tol=PARITY_TOL):
    """Classify a state under (-1)^(Jz + j) by the support over even/odd n."""
    a = np.abs(psi.amplitudes)
    even = parity_diagonal(psi.two_j) > 0
    odd_max = float(a[~even].max()) if (~even).any() else 0.0
    even_max = float(a[even].max())
    if odd_max <= tol:
        return Parity("even", odd_max)
    if even_max <= tol:
        return Parity("odd", even_max)
    return Parity("mixed", min(odd_max, even_max))


def two_qubit_concurrence(psi):
    """Concurrence 2|det Gamma| of a j = 1 state mapped to two qubits via
    |1,1> -> |00>, |1,0> -> (|01> + |10>)/sqrt(2), |1,-1> -> |11>."""
    if psi.two_j != 2:
        raise ValueError(f"concurrence needs j=1 (two_j=2), got two_j={psi.two_j}")
    c_minus, c_zero, c_plus = psi.amplitudes
    off = c_zero / math.sqrt(2.0)
    gamma = np.array([[c_plus, off], [off, c_minus]])
    return float(min(1.0, 2.0 * abs(np.linalg.det(gamma))))


def fidelity_up_to_phase(psi, phi):
    """|<psi|phi>|, insensitive to global phases."""
    if psi.dim != phi.dim:
        raise ValueError(f"dimension mismatch: {psi.dim} vs {phi.dim}")
    return float(min(1.0, abs(np.vdot(psi.amplitudes, phi.amplitudes))))
