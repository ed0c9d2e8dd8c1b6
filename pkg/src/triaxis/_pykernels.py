"""Pure-Python (numpy) implementations of the numerical hot loops.

These mirror ``_kernels.pyx`` call for call. They are selected automatically
when the compiled extension is unavailable and are also used by the test
suite to cross-check the compiled path.
"""

import math

import numpy as np

EPS = np.finfo(float).eps


def _norm(x):
    # scaled 2-norm: squaring tiny entries directly would underflow
    s = float(np.max(np.maximum(np.abs(x.real), np.abs(x.imag)))) if x.size else 0.0
    if s == 0.0:
        return 0.0
    y = x / s
    return s * math.sqrt(float(np.vdot(y, y).real))


def tridiagonalize(a):
    """Reduce a Hermitian matrix to real symmetric tridiagonal form.

    Returns ``(d, e, q)`` with ``q.conj().T @ a @ q`` equal to the real
    tridiagonal matrix with diagonal ``d`` and off-diagonal ``e``.
    """
    a = np.array(a, dtype=complex, copy=True)
    n = a.shape[0]
    q = np.eye(n, dtype=complex)
    for k in range(n - 2):
        x = a[k + 1:, k]
        xnorm = _norm(x)
        if xnorm == 0.0:
            continue
        x0 = x[0]
        ax0 = abs(x0)
        ph = complex(x0.real / ax0, x0.imag / ax0) if ax0 != 0 else 1.0
        ph /= abs(ph)
        alpha = -ph * xnorm
        v = x.copy()
        v[0] -= alpha
        v /= _norm(v)
        sub = a[k + 1:, k + 1:]
        p = sub @ v
        kk = np.vdot(v, p)
        w = p - kk * v
        sub -= 2.0 * (np.outer(v, w.conj()) + np.outer(w, v.conj()))
        a[k + 1:, k] = 0.0
        a[k, k + 1:] = 0.0
        a[k + 1, k] = alpha
        a[k, k + 1] = np.conj(alpha)
        qv = q[:, k + 1:] @ v
        q[:, k + 1:] -= 2.0 * np.outer(qv, v.conj())

    d = a.diagonal().real.copy()
    esub = a.diagonal(-1).copy()
    e = np.abs(esub)
    phase = np.ones(n, dtype=complex)
    for k in range(n - 1):
        if e[k] != 0.0:
            # component-wise: complex division overflows for subnormal entries
            ph = complex(esub[k].real / e[k], esub[k].imag / e[k])
            phase[k + 1] = phase[k] * ph / abs(ph)
        else:
            phase[k + 1] = phase[k]
    q *= phase[np.newaxis, :]
    return d, e, q


def tridiag_ql(d, e, zt, max_iter=60):
    """Implicit-shift QL on a real symmetric tridiagonal matrix, in place.

    ``d`` (length n) is the diagonal, ``e`` (length n) the off-diagonal with
    ``e[i]`` coupling rows i and i+1 (``e[n-1]`` is ignored). ``zt`` holds the
    *transposed* accumulator: on exit row k of ``zt`` is eigenvector k.

    Returns 0 on success, otherwise 1 + index of the non-converged level.
    """
    n = d.shape[0]
    if n == 0:
        return 0
    e[n - 1] = 0.0
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= EPS * dd:
                    break
                m += 1
            if m == l:
                break
            if it == max_iter:
                return l + 1
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zi = zt[i].copy()
                zt[i] = c * zi - s * zt[i + 1]
                zt[i + 1] = s * zi + c * zt[i + 1]
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


def _newton_ratio(a, z):
    """Return (p/p', residual_is_at_rounding_level) for coefficients ``a``
    (ascending powers) at ``z``, switching to the reversed polynomial for
    ``|z| > 1`` to keep the evaluation in range."""
    deg = a.shape[0] - 1
    if abs(z) <= 1.0:
        p = a[deg]
        dp = 0j
        bound = abs(a[deg])
        az = abs(z)
        for k in range(deg - 1, -1, -1):
            dp = dp * z + p
            p = p * z + a[k]
            bound = bound * az + abs(a[k])
        small = abs(p) <= 4.0 * deg * EPS * bound
        if dp == 0:
            return (0j if p == 0 else complex(1e300)), small
        return p / dp, small
    y = 1.0 / z
    ay = abs(y)
    # rev(y) = sum a[deg-k] y^k
    p = a[0]
    dp = 0j
    bound = abs(a[0])
    for k in range(1, deg + 1):
        dp = dp * y + p
        p = p * y + a[k]
        bound = bound * ay + abs(a[k])
    small = abs(p) <= 4.0 * deg * EPS * bound
    # p(z)/p'(z) = 1 / (deg/z - y^2 rev'(y)/rev(y))
    if p == 0:
        return 0j, small
    denom = deg * y - y * y * dp / p
    if denom == 0:
        return complex(1e300), small
    return 1.0 / denom, small


def aberth(a, z, max_iter, step_tol):
    """Aberth-Ehrlich simultaneous refinement of all roots, in place on ``z``.

    ``a`` holds the coefficients in ascending powers with a nonzero leading
    term. A root is frozen once its correction falls below
    ``step_tol * (1 + |z|)`` or its residual reaches the rounding floor of the
    evaluation. Returns ``(done_mask, iterations)``.
    """
    n = z.shape[0]
    done = np.zeros(n, dtype=bool)
    it = 0
    while it < max_iter and not done.all():
        it += 1
        for i in range(n):
            if done[i]:
                continue
            zi = z[i]
            ratio, small = _newton_ratio(a, zi)
            if small:
                done[i] = True
                continue
            diff = zi - np.delete(z, i)
            diff[diff == 0] = EPS
            s = complex(np.sum(1.0 / diff))
            denom = 1.0 - ratio * s
            w = ratio / denom if denom != 0 else ratio
            z[i] = zi - w
            if abs(w) < step_tol * (1.0 + abs(z[i])):
                done[i] = True
    return done, it


def _rhs(theta, phi, chi0, chi1, chi2):
    s = math.sin(theta)
    c = math.cos(theta)
    c2 = math.cos(2.0 * phi)
    s2 = math.sin(2.0 * phi)
    return (chi2 * s * s * c2 - chi1 * s * s * s2,
            -(chi0 + chi1 * c2 + chi2 * s2) * s * c)


def rk4(theta0, phi0, chi0, chi1, chi2, dt, n_steps, eps):
    """Classical fixed-step RK4 for the (theta, phi) equations of motion.

    Returns ``(theta, phi, steps_taken, terminated)``; integration stops early
    (``terminated=True``) once theta leaves ``(eps, pi - eps)``.
    """
    theta = np.empty(n_steps + 1)
    phi = np.empty(n_steps + 1)
    th, ph = theta0, phi0
    theta[0], phi[0] = th, ph
    hi = math.pi - eps
    h2 = 0.5 * dt
    for k in range(n_steps):
        k1t, k1p = _rhs(th, ph, chi0, chi1, chi2)
        k2t, k2p = _rhs(th + h2 * k1t, ph + h2 * k1p, chi0, chi1, chi2)
        k3t, k3p = _rhs(th + h2 * k2t, ph + h2 * k2p, chi0, chi1, chi2)
        k4t, k4p = _rhs(th + dt * k3t, ph + dt * k3p, chi0, chi1, chi2)
        th += dt / 6.0 * (k1t + 2.0 * k2t + 2.0 * k3t + k4t)
        ph += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        theta[k + 1], phi[k + 1] = th, ph
        if not (eps < th < hi):
            return theta[:k + 2], phi[:k + 2], k + 1, True
    return theta, phi, n_steps, False
