"""Backend selection for the numerical hot loops.

The compiled extension ``triaxis._kernels`` is used when it imports; otherwise
the numpy implementations in ``triaxis._pykernels`` take over. ``BACKEND``
names the active one and :func:`set_backend` switches at runtime (used by the
benchmark and by the cross-check tests).
"""

from . import _pykernels

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_IMPLS = {"python": _pykernels}
if _compiled is not None:
    _IMPLS["compiled"] = _compiled

BACKEND = "compiled" if _compiled is not None else "python"
_active = _IMPLS[BACKEND]


def available_backends():
    return sorted(_IMPLS)


def set_backend(name):
    """Select ``"compiled"`` or ``"python"``; returns the previous name."""
    global BACKEND, _active
    if name not in _IMPLS:
        raise ValueError(
            f"backend {name!r} unavailable; choose from {available_backends()}")
    previous = BACKEND
    BACKEND = name
    _active = _IMPLS[name]
    return previous


def tridiagonalize(a):
    return _active.tridiagonalize(a)


def tridiag_ql(d, e, zt, max_iter=60):
    return _active.tridiag_ql(d, e, zt, max_iter)


def aberth(a, z, max_iter, step_tol):
    return _active.aberth(a, z, max_iter, step_tol)


def rk4(theta0, phi0, chi0, chi1, chi2, dt, n_steps, eps):
    return _active.rk4(theta0, phi0, chi0, chi1, chi2, dt, n_steps, eps)
