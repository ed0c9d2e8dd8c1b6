# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: Hermitian tridiagonalization, implicit QL,
Aberth-Ehrlich root refinement and RK4 stepping.

Signatures and semantics match ``_pykernels``; the loops run without the GIL.
"""

import numpy as np

from libc.math cimport sqrt, hypot, fabs, copysign, sin, cos, M_PI

cdef double EPS = np.finfo(float).eps


cdef inline double cabs2(double complex z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline double cabs_(double complex z) noexcept nogil:
    return hypot(z.real, z.imag)


cdef inline double complex conj_(double complex z) noexcept nogil:
    return z.real - 1j * z.imag


cdef double _col_norm(double complex[:, ::1] a, Py_ssize_t r0, Py_ssize_t c, Py_ssize_t m) noexcept nogil:
    # 2-norm of a[r0:r0+m, c], scaled by the largest entry so tiny columns
    # do not underflow to zero when squared
    cdef Py_ssize_t i
    cdef double s = 0.0, acc = 0.0, t
    for i in range(m):
        t = fabs(a[r0 + i, c].real)
        if t > s:
            s = t
        t = fabs(a[r0 + i, c].imag)
        if t > s:
            s = t
    if s == 0.0:
        return 0.0
    for i in range(m):
        acc += cabs2(a[r0 + i, c] / s)
    return s * sqrt(acc)


cdef double _vec_norm(double complex[::1] v, Py_ssize_t m) noexcept nogil:
    cdef Py_ssize_t i
    cdef double s = 0.0, acc = 0.0, t
    for i in range(m):
        t = fabs(v[i].real)
        if t > s:
            s = t
        t = fabs(v[i].imag)
        if t > s:
            s = t
    if s == 0.0:
        return 0.0
    for i in range(m):
        acc += cabs2(v[i] / s)
    return s * sqrt(acc)


cdef void _householder(double complex[:, ::1] a, double complex[:, ::1] q,
                       double complex[::1] v, double complex[::1] p) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t k, i, r, m
    cdef double xnorm, vnorm, ax0
    cdef double complex x0, ph, alpha
    cdef double kr, ki, sr, si, ar, ai, br, bi, cr, ci, vr, vim, wr, wim
    for k in range(n - 2):
        m = n - k - 1
        xnorm = _col_norm(a, k + 1, k, m)
        if xnorm == 0.0:
            continue
        x0 = a[k + 1, k]
        ax0 = cabs_(x0)
        if ax0 != 0.0:
            ph = x0.real / ax0 + 1j * (x0.imag / ax0)
            ph = ph / cabs_(ph)
        else:
            ph = 1.0
        alpha = -ph * xnorm
        for i in range(m):
            v[i] = a[k + 1 + i, k]
        v[0] = v[0] - alpha
        vnorm = _vec_norm(v, m)
        for i in range(m):
            v[i] = v[i] / vnorm
        # inner loops use split real/imag arithmetic; C99 complex products
        # go through __muldc3 and are several times slower
        # p = sub @ v, kk = v^H p
        kr = 0.0
        ki = 0.0
        for r in range(m):
            sr = 0.0
            si = 0.0
            for i in range(m):
                ar = a[k + 1 + r, k + 1 + i].real
                ai = a[k + 1 + r, k + 1 + i].imag
                br = v[i].real
                bi = v[i].imag
                sr = sr + ar * br - ai * bi
                si = si + ar * bi + ai * br
            p[r] = sr + 1j * si
            br = v[r].real
            bi = v[r].imag
            kr = kr + br * sr + bi * si
            ki = ki + br * si - bi * sr
        # w = p - kk v  (stored in p)
        for r in range(m):
            br = v[r].real
            bi = v[r].imag
            p[r] = (p[r].real - (kr * br - ki * bi)) + 1j * (p[r].imag - (kr * bi + ki * br))
        for r in range(m):
            vr = v[r].real
            vim = v[r].imag
            wr = p[r].real
            wim = p[r].imag
            for i in range(m):
                # vi conj(w_i) + wi conj(v_i)
                br = p[i].real
                bi = p[i].imag
                cr = v[i].real
                ci = v[i].imag
                ar = vr * br + vim * bi + wr * cr + wim * ci
                ai = vim * br - vr * bi + wim * cr - wr * ci
                a[k + 1 + r, k + 1 + i] = (a[k + 1 + r, k + 1 + i].real - 2.0 * ar) + 1j * (
                    a[k + 1 + r, k + 1 + i].imag - 2.0 * ai)
        for i in range(m):
            a[k + 1 + i, k] = 0.0
            a[k, k + 1 + i] = 0.0
        a[k + 1, k] = alpha
        a[k, k + 1] = conj_(alpha)
        # q[:, k+1:] -= 2 (q[:, k+1:] v) v^H
        for r in range(n):
            sr = 0.0
            si = 0.0
            for i in range(m):
                ar = q[r, k + 1 + i].real
                ai = q[r, k + 1 + i].imag
                br = v[i].real
                bi = v[i].imag
                sr = sr + ar * br - ai * bi
                si = si + ar * bi + ai * br
            sr = 2.0 * sr
            si = 2.0 * si
            for i in range(m):
                br = v[i].real
                bi = v[i].imag
                # acc * conj(v_i)
                q[r, k + 1 + i] = (q[r, k + 1 + i].real - (sr * br + si * bi)) + 1j * (
                    q[r, k + 1 + i].imag - (si * br - sr * bi))

def tridiagonalize(a_in):
    """Reduce a Hermitian matrix to real symmetric tridiagonal form.

    Returns ``(d, e, q)`` with ``q^H a q`` tridiagonal, diagonal ``d`` and
    real non-negative off-diagonal ``e``.
    """
    a_arr = np.array(a_in, dtype=complex, order="C", copy=True)
    cdef Py_ssize_t n = a_arr.shape[0]
    q_arr = np.eye(n, dtype=complex)
    v_arr = np.zeros(max(n, 1), dtype=complex)
    p_arr = np.zeros(max(n, 1), dtype=complex)
    cdef double complex[:, ::1] a = a_arr
    cdef double complex[:, ::1] q = q_arr
    cdef double complex[::1] v = v_arr
    cdef double complex[::1] p = p_arr
    with nogil:
        _householder(a, q, v, p)

    d = a_arr.diagonal().real.copy()
    esub = a_arr.diagonal(-1).copy()
    e = np.abs(esub)
    phase = np.ones(n, dtype=complex)
    cdef Py_ssize_t k
    for k in range(n - 1):
        if e[k] != 0.0:
            # component-wise: complex division overflows for subnormal entries
            ph = complex(esub[k].real / e[k], esub[k].imag / e[k])
            phase[k + 1] = phase[k] * ph / abs(ph)
        else:
            phase[k + 1] = phase[k]
    q_arr *= phase[np.newaxis, :]
    return d, e, q_arr


cdef int _ql(double[::1] d, double[::1] e, double[:, ::1] zt, int max_iter) noexcept nogil:
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t l, m, i, k
    cdef int it, underflow
    cdef double dd, g, r, s, c, p, f, b, zi
    if n == 0:
        return 0
    e[n - 1] = 0.0
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = fabs(d[m]) + fabs(d[m + 1])
                if fabs(e[m]) <= EPS * dd:
                    break
                m += 1
            if m == l:
                break
            if it == max_iter:
                return <int>(l + 1)
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = 0
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = 1
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                for k in range(n):
                    zi = zt[i, k]
                    zt[i, k] = c * zi - s * zt[i + 1, k]
                    zt[i + 1, k] = s * zi + c * zt[i + 1, k]
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


def tridiag_ql(double[::1] d, double[::1] e, double[:, ::1] zt, int max_iter=60):
    """Implicit-shift QL in place; row k of ``zt`` becomes eigenvector k.

    Returns 0 on success, otherwise 1 + index of the non-converged level.
    """
    cdef int status
    with nogil:
        status = _ql(d, e, zt, max_iter)
    return status


cdef inline int _newton_ratio(double complex[::1] a, double complex z,
                              double complex *ratio) noexcept nogil:
    """Store p/p' in ``ratio``; return 1 if |p| is at the rounding floor."""
    cdef Py_ssize_t deg = a.shape[0] - 1
    cdef Py_ssize_t k
    cdef double complex pv, dp, y, denom
    cdef double bound, az, ay
    cdef int small
    if cabs_(z) <= 1.0:
        pv = a[deg]
        dp = 0.0
        bound = cabs_(a[deg])
        az = cabs_(z)
        k = deg - 1
        while k >= 0:
            dp = dp * z + pv
            pv = pv * z + a[k]
            bound = bound * az + cabs_(a[k])
            k -= 1
        small = cabs_(pv) <= 4.0 * deg * EPS * bound
        if dp == 0.0:
            if pv == 0.0:
                ratio[0] = 0.0
            else:
                ratio[0] = 1e300
            return small
        ratio[0] = pv / dp
        return small
    y = 1.0 / z
    ay = cabs_(y)
    pv = a[0]
    dp = 0.0
    bound = cabs_(a[0])
    for k in range(1, deg + 1):
        dp = dp * y + pv
        pv = pv * y + a[k]
        bound = bound * ay + cabs_(a[k])
    small = cabs_(pv) <= 4.0 * deg * EPS * bound
    if pv == 0.0:
        ratio[0] = 0.0
        return small
    denom = deg * y - y * y * dp / pv
    if denom == 0.0:
        ratio[0] = 1e300
        return small
    ratio[0] = 1.0 / denom
    return small


cdef int _aberth(double complex[::1] a, double complex[::1] z,
                 unsigned char[::1] done, int max_iter, double step_tol) noexcept nogil:
    cdef Py_ssize_t n = z.shape[0]
    cdef Py_ssize_t i, k
    cdef int it = 0
    cdef int remaining
    cdef double complex zi, ratio, s, diff, denom, w
    remaining = 0
    for i in range(n):
        if not done[i]:
            remaining += 1
    while it < max_iter and remaining > 0:
        it += 1
        for i in range(n):
            if done[i]:
                continue
            zi = z[i]
            if _newton_ratio(a, zi, &ratio):
                done[i] = 1
                remaining -= 1
                continue
            s = 0.0
            for k in range(n):
                if k == i:
                    continue
                diff = zi - z[k]
                if diff == 0.0:
                    diff = EPS
                s = s + 1.0 / diff
            denom = 1.0 - ratio * s
            if denom != 0.0:
                w = ratio / denom
            else:
                w = ratio
            z[i] = zi - w
            if cabs_(w) < step_tol * (1.0 + cabs_(z[i])):
                done[i] = 1
                remaining -= 1
    return it


def aberth(a_in, double complex[::1] z, int max_iter, double step_tol):
    """Aberth-Ehrlich refinement in place on ``z``; returns (done, iterations)."""
    a_arr = np.ascontiguousarray(a_in, dtype=complex)
    cdef double complex[::1] a = a_arr
    done_arr = np.zeros(z.shape[0], dtype=np.uint8)
    cdef unsigned char[::1] done = done_arr
    cdef int it
    with nogil:
        it = _aberth(a, z, done, max_iter, step_tol)
    return done_arr.astype(bool), it


cdef inline void _rhs(double th, double ph, double chi0, double chi1, double chi2,
                      double *dth, double *dph) noexcept nogil:
    cdef double s = sin(th)
    cdef double c = cos(th)
    cdef double c2 = cos(2.0 * ph)
    cdef double s2 = sin(2.0 * ph)
    dth[0] = chi2 * s * s * c2 - chi1 * s * s * s2
    dph[0] = -(chi0 + chi1 * c2 + chi2 * s2) * s * c


def rk4(double theta0, double phi0, double chi0, double chi1, double chi2,
        double dt, Py_ssize_t n_steps, double eps):
    """Fixed-step RK4; returns (theta, phi, steps_taken, terminated)."""
    theta_arr = np.empty(n_steps + 1)
    phi_arr = np.empty(n_steps + 1)
    cdef double[::1] theta = theta_arr
    cdef double[::1] phi = phi_arr
    cdef double th = theta0
    cdef double ph = phi0
    cdef double hi = M_PI - eps
    cdef double h2 = 0.5 * dt
    cdef double k1t, k1p, k2t, k2p, k3t, k3p, k4t, k4p
    cdef Py_ssize_t k
    cdef Py_ssize_t taken = n_steps
    cdef int terminated = 0
    theta[0] = th
    phi[0] = ph
    with nogil:
        for k in range(n_steps):
            _rhs(th, ph, chi0, chi1, chi2, &k1t, &k1p)
            _rhs(th + h2 * k1t, ph + h2 * k1p, chi0, chi1, chi2, &k2t, &k2p)
            _rhs(th + h2 * k2t, ph + h2 * k2p, chi0, chi1, chi2, &k3t, &k3p)
            _rhs(th + dt * k3t, ph + dt * k3p, chi0, chi1, chi2, &k4t, &k4p)
            th = th + dt / 6.0 * (k1t + 2.0 * k2t + 2.0 * k3t + k4t)
            ph = ph + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
            theta[k + 1] = th
            phi[k + 1] = ph
            if not (eps < th < hi):
                taken = k + 1
                terminated = 1
                break
    if terminated:
        return theta_arr[:taken + 1], phi_arr[:taken + 1], taken, True
    return theta_arr, phi_arr, n_steps, False
