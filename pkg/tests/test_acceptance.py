"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run directly (``python tests/test_acceptance.py``) for the summary table, or
through pytest where every criterion is a separate test.
"""

import math
import sys

import numpy as np
import pytest
from scipy.optimize import bisect, minimize_scalar

from triaxis import (Couplings, closed_form_tact, coherent_state, find_roots, hermitian_eigen,
                     oat_normalized_polynomial, oat_state, polynomial_from_state, q_grid,
                     q_value, rotated_hamiltonian, squeezing_report, tact_state,
                     triaxis_hamiltonian, triaxis_state, two_qubit_concurrence)
from triaxis.majorana import MajoranaPolynomial, antipode, constellation
from triaxis.semiclassical import (classical_energy, eom_rhs, find_fixed_points,
                                   integrate_rk4, separatrix_energy)
from triaxis.spectrum import density_of_states, eigen_sweep, esqpt_estimate
from triaxis.spinalg import SpinState, evolve
from triaxis.squeezing import FrameUndefinedError, oat_xi_closed
from triaxis.states import tact_generator, triaxis_generator

X_AXIS = (1.0, 0.0, 0.0)


def _line(num, ok, detail):
    print(f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
    return ok, detail


def _xi2(psi, fallback):
    """xi^2 from the mean-spin frame; count the points that needed ``fallback``."""
    try:
        return squeezing_report(psi).xi2, 0
    except FrameUndefinedError:
        return squeezing_report(psi, direction=fallback).xi2, 1


def _tact_fallback(psi):
    # the TACT mean spin stays on the z axis; pick the sign from <Jz>
    dz = np.arange(psi.dim) - 0.5 * psi.two_j
    return (0.0, 0.0, 1.0 if float(dz @ np.abs(psi.amplitudes) ** 2) >= 0 else -1.0)


# -- 1 -----------------------------------------------------------------------

def criterion_1():
    mus = np.linspace(0.0, math.pi, 200)
    worst, fallback = 0.0, 0
    for two_j in (2, 3, 4, 10, 20, 40):
        closed = oat_xi_closed(two_j, mus)
        for mu, ref in zip(mus, closed):
            x, f = _xi2(oat_state(two_j, mu), X_AXIS)
            fallback += f
            worst = max(worst, abs(x - ref))
    return _line(1, worst <= 1e-10,
                 f"max |xi2 - closed| = {worst:.2e} (tol 1e-10); "
                 f"{fallback} points used the x-axis frame")


# -- 2 -----------------------------------------------------------------------

def criterion_2():
    r = bisect(lambda x: 8 * x ** 3 + 5 * x ** 2 - 6 * x + 1, 0.1, 0.3, xtol=1e-15)
    mus = np.linspace(0.0, math.pi, 4001)
    vals = np.array([_xi2(oat_state(4, m), X_AXIS)[0] for m in mus])
    k = int(np.argmin(vals))
    res = minimize_scalar(lambda m: squeezing_report(oat_state(4, m)).xi2,
                          bounds=(mus[max(k - 1, 0)], mus[min(k + 1, mus.size - 1)]),
                          method="bounded", options={"xatol": 1e-12})
    xmin, mu_min = float(res.fun), float(res.x)
    c2 = math.cos(mu_min / 2.0) ** 2
    ok = abs(xmin - 0.3025) <= 5e-4 and abs(c2 - (1.0 - r)) <= 1e-3
    return _line(2, ok, f"min xi2 = {xmin:.6f} (0.3025 +- 5e-4); cos^2(mu/2) = {c2:.6f}, "
                        f"1 - r = {1 - r:.6f} (r = {r:.6f}, tol 1e-3)")


# -- 3 -----------------------------------------------------------------------

def _tact_scan_min(two_j):
    g = tact_generator(two_j)
    psi0 = coherent_state(two_j, (0.0, 0.0))

    def f(nu):
        psi = evolve(g, nu, psi0)
        return _xi2(psi, _tact_fallback(psi))[0]

    grid = np.linspace(0.0, 1.5, 1501)
    vals = np.array([f(nu) for nu in grid])
    k = int(np.argmin(vals))
    res = minimize_scalar(f, bounds=(grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]),
                          method="bounded", options={"xatol": 1e-12})
    return float(min(res.fun, vals[k]))


def criterion_3():
    worst, fallback = 0.0, 0
    for nu in np.linspace(0.0, math.pi, 200):
        psi = tact_state(2, nu)
        x, f = _xi2(psi, _tact_fallback(psi))
        fallback += f
        worst = max(worst, abs(x - (1.0 - abs(math.sin(2 * nu)))))
    m3, m4 = _tact_scan_min(3), _tact_scan_min(4)
    ok = worst <= 1e-10 and abs(m3 - 1 / 3) <= 5e-4 and abs(m4 - 0.25) <= 5e-4
    return _line(3, ok, f"j=1 max dev {worst:.2e} ({fallback} points on the z-axis frame); "
                        f"min j=3/2 {m3:.6f} (1/3), min j=2 {m4:.6f} (1/4)")


# -- 4 -----------------------------------------------------------------------

def _triaxis_xi2(mu0, mu):
    psi = triaxis_state(3, (mu0, mu, 0.0))
    try:
        return squeezing_report(psi).xi2
    except FrameUndefinedError:
        return float("inf")


def criterion_4():
    target = (4.0 - math.sqrt(13.0)) / 3.0
    chi_target = math.sqrt(1 / 6 - 1 / (6 * math.sqrt(13.0)))
    # coarse grid, then a fine grid around the coarse minimum
    best = (math.inf, 0.0, 0.0)
    for mu0 in np.linspace(-4.0, 4.0, 81):
        for mu in np.linspace(0.0, 4.0, 81):
            x = _triaxis_xi2(mu0, mu)
            if x < best[0]:
                best = (x, mu0, mu)
    _, c0, c1 = best
    for mu0 in np.linspace(c0 - 0.1, c0 + 0.1, 81):
        for mu in np.linspace(max(c1 - 0.1, 0.0), c1 + 0.1, 81):
            x = _triaxis_xi2(mu0, mu)
            if x < best[0]:
                best = (x, mu0, mu)
    xmin, mu0, mu = best
    th = math.sqrt(mu0 ** 2 + 3 * mu ** 2)
    chi = abs(mu) * math.sin(th / 2) / th if th > 0 else 0.0
    ok = abs(xmin - target) <= 1e-3 and abs(chi - chi_target) <= 2e-3
    return _line(4, ok, f"min xi2 = {xmin:.6f} vs {target:.6f} (tol 1e-3); chi = {chi:.6f} "
                        f"vs {chi_target:.6f} (tol 2e-3) at (mu0, mu) = ({mu0:.4f}, {mu:.4f})")


# -- 5 -----------------------------------------------------------------------

# (binomial, exponent of q) per power of z; signs alternate as (-1)^n
F_LISTINGS = {
    1: [(1, 0), (1, 0)],
    2: [(1, 0), (2, 1), (1, 0)],
    3: [(1, 0), (3, 2), (3, 2), (1, 0)],
    4: [(1, 0), (4, 3), (6, 4), (4, 3), (1, 0)],
    5: [(1, 0), (5, 4), (10, 6), (10, 6), (5, 4), (1, 0)],
    6: [(1, 0), (6, 5), (15, 8), (20, 9), (15, 8), (6, 5), (1, 0)],
    7: [(1, 0), (7, 6), (21, 10), (35, 12), (35, 12), (21, 10), (7, 6), (1, 0)],
    8: [(1, 0), (8, 7), (28, 12), (56, 15), (70, 16), (56, 15), (28, 12), (8, 7), (1, 0)],
    9: [(1, 0), (9, 8), (36, 14), (84, 18), (126, 20), (126, 20), (84, 18), (36, 14),
        (9, 8), (1, 0)],
    10: [(1, 0), (10, 9), (45, 16), (120, 21), (210, 24), (252, 25), (210, 24), (120, 21),
         (45, 16), (10, 9), (1, 0)],
}


def listed_coeffs(N, mu):
    q = np.exp(0.5j * mu)
    return np.array([(-1) ** n * b * q ** e for n, (b, e) in enumerate(F_LISTINGS[N])])


def criterion_5():
    rng = np.random.default_rng(5)
    worst = 0.0
    for N in range(1, 11):
        for mu in rng.uniform(-2 * math.pi, 2 * math.pi, 20):
            worst = max(worst, float(np.max(np.abs(
                oat_normalized_polynomial(N, mu).coeffs - listed_coeffs(N, mu)))))
    root_err, count_ok = 0.0, True
    for N in range(1, 11):
        c = find_roots(oat_normalized_polynomial(N, 0.0))
        count_ok &= c.finite_roots.size == N and c.infinity_count == 0
        root_err = max(root_err, float(np.max(np.abs(c.finite_roots - 1.0))))
    ok = worst <= 1e-12 and count_ok and root_err <= 1e-6
    return _line(5, ok, f"listing max dev {worst:.2e} (tol 1e-12); mu=0 roots max |z-1| = "
                        f"{root_err:.2e} (tol 1e-6), all N roots present: {count_ok}")


# -- 6 -----------------------------------------------------------------------

def printed_tact_polys(nu):
    s3, s7 = math.sqrt(3.0), math.sqrt(7.0)
    u3, u7 = s3 * nu, s7 * nu
    return {
        2: [math.cos(nu), 0.0, -math.sin(nu)],
        3: [math.cos(u3), 0.0, -s3 * math.sin(u3), 0.0],
        4: [math.cos(u3) ** 2, 0.0, -s3 * math.sin(2 * u3), 0.0, math.sin(u3) ** 2],
        5: [1 - 5 / 7 * math.sin(u7) ** 2, 0.0, -5 / s7 * math.sin(2 * u7), 0.0,
            15 / 7 * math.sin(u7) ** 2, 0.0],
    }


def scaled_residual(coeffs, z):
    a = np.asarray(coeffs, dtype=complex)
    return float(abs(np.polynomial.polynomial.polyval(z, a))
                 / (np.max(np.abs(a)) * max(1.0, abs(z)) ** (a.size - 1)))


def criterion_6():
    rng = np.random.default_rng(6)
    worst_res, counts_ok, j1_err, j2_err = 0.0, True, 0.0, 0.0
    for nu in rng.uniform(0.05, 0.5, 20):
        polys = printed_tact_polys(nu)
        for two_j, want in zip((2, 3, 4, 5), (0, 1, 0, 1)):
            c = find_roots(MajoranaPolynomial(two_j, np.array(polys[two_j], dtype=complex)))
            counts_ok &= c.infinity_count == want
            worst_res = max(worst_res, max(scaled_residual(polys[two_j], z)
                                           for z in c.finite_roots))
        c = find_roots(MajoranaPolynomial(2, np.array(polys[2], dtype=complex)))
        r = math.sqrt(1.0 / math.tan(nu))
        j1_err = max(j1_err, float(np.max(np.abs(np.sort_complex(c.finite_roots)
                                                 - np.array([-r, r])))))
        # quadratic-in-z^2 oracle for j = 2: z^2 = cot(u) (sqrt3 +- sqrt2)
        u = math.sqrt(3.0) * nu
        c4 = find_roots(MajoranaPolynomial(4, np.array(polys[4], dtype=complex)))
        z2 = np.sort(np.unique(np.round((c4.finite_roots ** 2).real, 9)))
        oracle = np.sort((math.sqrt(3) + np.array([-1, 1]) * math.sqrt(2)) / math.tan(u))
        j2_err = max(j2_err, float(np.max(np.abs(z2 - oracle) / oracle)))
    ok = worst_res <= 1e-10 and counts_ok and j1_err <= 1e-10 and j2_err <= 1e-8
    return _line(6, ok, f"max scaled residual {worst_res:.2e} (tol 1e-10); infinity counts "
                        f"(0,1,0,1) ok: {counts_ok}; j=1 root err {j1_err:.2e}; j=2 z^2 vs "
                        f"cot u (sqrt3 +- sqrt2) rel err {j2_err:.2e}")


# -- 7 -----------------------------------------------------------------------

def random_state(rng, two_j):
    v = rng.normal(size=two_j + 1) + 1j * rng.normal(size=two_j + 1)
    return SpinState(two_j, v / np.linalg.norm(v))


def criterion_7():
    rng = np.random.default_rng(7)
    norm_err, zero_q = 0.0, 0.0
    for two_j in (2, 10, 40):
        for _ in range(5):
            psi = random_state(rng, two_j)
            for extra in (0, 3):
                g = q_grid(psi, two_j + 1 + extra, 2 * two_j + 2 + 2 * extra)
                norm_err = max(norm_err, abs(g.integral() - 1.0))
            for star in constellation(psi).sphere_points:
                zero_q = max(zero_q, q_value(psi, antipode(star)))
    ok = norm_err <= 1e-8 and zero_q <= 1e-10
    return _line(7, ok, f"max |int Q - 1| = {norm_err:.2e} (tol 1e-8); max Q at star "
                        f"antipodes = {zero_q:.2e} (tol 1e-10)")


# -- 8 -----------------------------------------------------------------------

def criterion_8():
    rng = np.random.default_rng(8)
    odd_w, norm_err = 0.0, 0.0
    for two_j in (2, 3, 7, 20, 40):
        odd = np.arange(two_j + 1) % 2 == 1
        for _ in range(4):
            for psi in (triaxis_state(two_j, tuple(rng.uniform(-2, 2, 3))),
                        tact_state(two_j, rng.uniform(0, 2))):
                odd_w = max(odd_w, float(np.sum(np.abs(psi.amplitudes[odd]) ** 2)))
            psi0 = random_state(rng, two_j)
            g = triaxis_generator(two_j, tuple(rng.uniform(-2, 2, 3)))
            norm_err = max(norm_err, abs(evolve(g, rng.uniform(0, 5), psi0).norm() - 1.0))
    eig_res = 0.0
    for dim in (51, 201, 401):
        a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        for h in (0.5 * (a + a.conj().T),
                  triaxis_hamiltonian(dim - 1, Couplings(*rng.uniform(-1, 1, 3)))):
            w, v = hermitian_eigen(h)
            r = np.max(np.abs(h @ v - v * w)) / np.linalg.norm(h, 2)
            eig_res = max(eig_res, float(r))
    ok = odd_w < 1e-12 and norm_err <= 1e-12 and eig_res <= 1e-10
    return _line(8, ok, f"opposite-parity weight {odd_w:.2e} (< 1e-12); norm drift "
                        f"{norm_err:.2e} (tol 1e-12); eigen residual / ||H|| {eig_res:.2e} "
                        f"(tol 1e-10, dim <= 401)")


# -- 9 -----------------------------------------------------------------------

def criterion_9():
    sweep = eigen_sweep(20, 1.0, 1.0, 2.0, 101)
    shape_ok = sweep.levels.shape == (101, 21)
    rng = np.random.default_rng(9)
    spec_err = 0.0
    for mu0 in sweep.mu0_grid[::10]:
        a = rng.uniform(0, 2 * math.pi)
        h = triaxis_hamiltonian(20, Couplings(mu0, math.cos(a), math.sin(a)))
        w = hermitian_eigen(h).values
        spec_err = max(spec_err, float(np.max(np.abs(
            w - hermitian_eigen(rotated_hamiltonian(20, mu0, 1.0)).values))))
    rep = esqpt_estimate(sweep)
    emitted = (len(rep.gaps) == 101 and rep.dos_peak.shape == (101,)
               and rep.min_normalized_gap.shape == (101,))
    region = rep.region
    ok = shape_ok and spec_err <= 1e-10 and emitted and region is not None
    shown = "none" if region is None else f"({region[0]:.3f}, {region[1]:.3f})"
    return _line(9, ok, f"levels per point 21: {shape_ok}; rotated vs unrotated max diff "
                        f"{spec_err:.2e} (tol 1e-10); per-point gaps and DOS emitted: "
                        f"{emitted}; clustering region mu0 in {shown}")


# -- 10 ----------------------------------------------------------------------

def criterion_10():
    target = separatrix_energy(1.5, 1.0)
    devs = []
    for two_j in (40, 80, 160):
        j = two_j / 2
        w = hermitian_eigen(rotated_hamiltonian(two_j, 1.5, 1.0)).values
        peak = density_of_states(w).peak_energy / j ** 2
        devs.append(abs(peak - target) / target)
    ok = target == 0.25 and devs[0] > devs[1] > devs[2]
    return _line(10, ok, "relative deviation of DOS peak / j^2 from 0.25 for j = 20, 40, 80: "
                         + ", ".join(f"{d:.4f}" for d in devs))


# -- 11 ----------------------------------------------------------------------

def criterion_11():
    rng = np.random.default_rng(11)
    h, fd_err = 1e-6, 0.0
    for _ in range(1000):
        th, ph = rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi)
        c = Couplings(*rng.uniform(-2, 2, 3))
        dth, dph = eom_rhs(th, ph, c)
        dH_dph = (classical_energy(th, ph + h, c) - classical_energy(th, ph - h, c)) / (2 * h)
        dH_dth = (classical_energy(th + h, ph, c) - classical_energy(th - h, ph, c)) / (2 * h)
        fd_err = max(fd_err, abs(dth - dH_dph), abs(dph + dH_dth))
    traj = integrate_rk4((1.3, 0.4), Couplings(1.5, 1.0, 0.3), 1e-3, 100_000)
    drift = traj.energy_drift / max(1.0, abs(traj.energy[0]))

    def kinds(chi0, chi):
        return {(round(p.theta, 6), round(p.phi, 6)): p.kind
                for p in find_fixed_points(chi0, chi)}

    half = round(math.pi / 2, 6)
    below, at, above = kinds(2.0, 1.0), kinds(1.0, 1.0), kinds(1.0, 2.0)
    flip_ok = (below[(half, half)] == "hyperbolic" and below[(half, 0.0)] == "elliptic"
               and below[(0.0, 0.0)] == "elliptic"
               and at[(0.0, 0.0)] == "degenerate" and at[(half, half)] == "degenerate"
               and above[(0.0, 0.0)] == "hyperbolic")
    ok = fd_err <= 1e-8 and drift <= 1e-8 and not traj.terminated and flip_ok
    return _line(11, ok, f"eom vs central differences {fd_err:.2e} (tol 1e-8); RK4 drift "
                         f"{drift:.2e} over 1e5 steps (tol 1e-8); classification flips "
                         f"across chi = chi0: {flip_ok}")


# -- 12 ----------------------------------------------------------------------

def criterion_12():
    rng = np.random.default_rng(12)
    worst = 0.0
    for _ in range(100):
        mu0, mu1, mu2 = rng.uniform(-2 * math.pi, 2 * math.pi, 3)
        c = two_qubit_concurrence(triaxis_state(2, (mu0, mu1, mu2)))
        worst = max(worst, abs(c - abs(math.sin(math.hypot(mu1, mu2)))))
    return _line(12, worst <= 1e-12, f"max |C - |sin|xi||| = {worst:.2e} (tol 1e-12)")


# -- 13 ----------------------------------------------------------------------

def criterion_13():
    rng = np.random.default_rng(13)
    # (a) j = 1 tri-axis: brute-force xi^2 is 1 - |sin mu|, not half of it
    dev_a = 0.0
    for mu in rng.uniform(0.05, math.pi - 0.05, 30):
        x = _xi2(triaxis_state(2, (rng.uniform(-2, 2), mu, 0.0)), (0.0, 0.0, -1.0))[0]
        dev_a = max(dev_a, abs(x - (1 - abs(math.sin(mu)))))
    # (b) j = 3/2 tri-axis: support on m = 1/2 and m = -3/2
    support_ok = True
    for mu0, mu in rng.uniform(0.1, 2.0, (30, 2)):
        a = np.abs(triaxis_state(3, (mu0, mu, 0.0)).amplitudes)
        support_ok &= bool(a[1] < 1e-13 and a[3] < 1e-13 and a[0] > 0 and a[2] > 0)
    # (c) j = 2 TACT roots: z^2 = cot u (sqrt3 +- sqrt2)
    dev_c = 0.0
    for nu in rng.uniform(0.05, 0.5, 30):
        u = math.sqrt(3) * nu
        z2 = np.sort(np.unique(np.round(
            (constellation(tact_state(4, nu)).finite_roots ** 2).real, 9)))
        oracle = np.sort((math.sqrt(3) + np.array([-1, 1]) * math.sqrt(2)) / math.tan(u))
        dev_c = max(dev_c, float(np.max(np.abs(z2 - oracle) / oracle)))
    ok = dev_a <= 1e-10 and support_ok and dev_c <= 1e-8
    return _line(13, ok, f"j=1 xi2 vs 1-|sin mu| {dev_a:.2e}; j=3/2 support on m=1/2,-3/2: "
                         f"{support_ok}; j=2 roots vs cot u (sqrt3 +- sqrt2) {dev_c:.2e}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12,
            criterion_13]


@pytest.mark.parametrize("check", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 14)])
def test_acceptance(check):
    ok, detail = check()
    assert ok, detail


if __name__ == "__main__":
    results = [c()[0] for c in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria pass")
    sys.exit(0 if all(results) else 1)
