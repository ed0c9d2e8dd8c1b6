import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from triaxis.model import Couplings, triaxis_hamiltonian
from triaxis.squeezing import (FrameUndefinedError, covariance_matrix, mean_spin, oat_xi_closed,
                               optimal_angle, perp_frame, squeezing_report, survival_curve,
                               survival_probability, variance_cov)
from triaxis.states import coherent_state, dicke_state, oat_state, tact_state

from conftest import random_state


@settings(max_examples=40, deadline=None)
@given(two_j=st.integers(1, 40), theta=st.floats(0, math.pi), phi=st.floats(0, 2 * math.pi))
def test_coherent_states_unsqueezed(two_j, theta, phi):
    rep = squeezing_report(coherent_state(two_j, (theta, phi)))
    assert rep.xi2 == pytest.approx(1.0, abs=1e-10)


def test_perp_frame_south_pole():
    n1, n2 = perp_frame((0, 0, -1))
    assert np.allclose(n1, [0, -1, 0]) and np.allclose(n2, [1, 0, 0])


@settings(max_examples=50, deadline=None)
@given(v=st.tuples(*[st.floats(-1, 1)] * 3).filter(lambda v: np.linalg.norm(v) > 1e-3))
def test_perp_frame_orthonormal(v):
    n1, n2 = perp_frame(v)
    u = np.asarray(v) / np.linalg.norm(v)
    m = np.array([n1, n2, u])
    assert np.allclose(m @ m.T, np.eye(3), atol=1e-12)


def test_perp_frame_zero():
    with pytest.raises(FrameUndefinedError):
        perp_frame((0, 0, 0))


def test_frame_undefined_for_vanishing_mean():
    psi = dicke_state(4, 0)
    with pytest.raises(FrameUndefinedError):
        squeezing_report(psi)
    rep = squeezing_report(psi, direction=(0, 0, 1))
    assert rep.xi2 == pytest.approx(3.0)  # (dJx)^2 = j(j+1)/2 = 3, over j/2 = 1


def test_covariance_symmetric_psd(rng):
    cov = covariance_matrix(random_state(rng, 7))
    assert np.allclose(cov, cov.T)
    assert np.all(np.linalg.eigvalsh(cov) >= -1e-12)


def test_variance_cov_unit_vectors(rng):
    psi = random_state(rng, 5)
    with pytest.raises(ValueError):
        variance_cov(psi, (1, 1, 0), (1, 0, 0))
    assert variance_cov(psi, (1, 0, 0), (1, 0, 0)) == pytest.approx(covariance_matrix(psi)[0, 0])


@settings(max_examples=100, deadline=None)
@given(A=st.floats(-10, 10), B=st.floats(-10, 10))
def test_optimal_angle_minimizes(A, B):
    phi = optimal_angle(A, B)
    assert 0 <= phi < math.pi + 1e-15
    grid = np.linspace(0, math.pi, 721)
    assert A * math.cos(2 * phi) + B * math.sin(2 * phi) <= \
        np.min(A * np.cos(2 * grid) + B * np.sin(2 * grid)) + 1e-9


def test_report_minimal_variance_consistent(rng):
    psi = oat_state(12, 0.3)
    rep = squeezing_report(psi)
    n = math.cos(rep.phi_opt) * rep.n1 + math.sin(rep.phi_opt) * rep.n2
    assert variance_cov(psi, n, n) / (psi.j / 2) == pytest.approx(rep.xi2, abs=1e-12)


@pytest.mark.parametrize("N", [2, 3, 4, 10, 40])
def test_oat_closed_form(N):
    for mu in np.linspace(0.01, 3.1, 25):
        # the mean spin of the OAT state vanishes at isolated mu; x is the reference axis
        assert squeezing_report(oat_state(N, mu), direction=(1, 0, 0)).xi2 == pytest.approx(
            oat_xi_closed(N, mu), abs=1e-10)


def test_oat_closed_validation():
    assert oat_xi_closed(1, 0.7) == 1.0
    with pytest.raises(ValueError):
        oat_xi_closed(0, 0.1)


def test_tact_optimal_angle_constant():
    angles = {round(squeezing_report(tact_state(10, nu)).phi_opt % (math.pi / 2), 9)
              for nu in (0.05, 0.1, 0.15)}
    assert len(angles) == 1


def test_survival():
    psi = coherent_state(6, (math.pi / 2, 0.0))
    h = triaxis_hamiltonian(6, Couplings(1.0, 0.5, 0.0))
    assert survival_probability(psi, h, 0.0) == pytest.approx(1.0)
    ts = np.linspace(0, 3, 7)
    curve = survival_curve(psi, h, ts)
    assert np.allclose(curve, [survival_probability(psi, h, t) for t in ts], atol=1e-12)
    assert np.all((curve >= 0) & (curve <= 1))
    with pytest.raises(ValueError):
        survival_probability(psi, np.eye(3), 1.0)


def test_mean_spin_lowest_weight():
    assert np.allclose(mean_spin(dicke_state(5, "-5/2")), [0, 0, -2.5])
