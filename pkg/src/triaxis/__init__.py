"""Tri-axis spin squeezing toolkit: collective-spin operators, squeezed
states, squeezing parameters, Majorana and Husimi phase-space pictures,
parity-resolved spectra and semiclassical dynamics."""

from .kernels import BACKEND, available_backends, set_backend
from .spinalg import (EigenDecomposition, SpinState, build_spin_operators, evolve,
                      hermitian_eigen, two_j_from)
from .model import Couplings, RotorParams, rotated_hamiltonian, rotation_params, triaxis_hamiltonian
from .states import (BlochDirection, TwistParams, closed_form_tact, closed_form_triaxis,
                     coherent_state, dicke_state, fidelity_up_to_phase, oat_state, parity_of,
                     tact_state, triaxis_state, two_qubit_concurrence)
from .squeezing import (FrameUndefinedError, SqueezingReport, mean_spin, oat_xi_closed,
                        perp_frame, squeezing_report, survival_probability, variance_cov)
from .majorana import (Constellation, MajoranaPolynomial, find_roots, oat_normalized_polynomial,
                       polynomial_from_state, to_sphere)
from .husimi import QGrid, q_grid, q_normalization, q_value
from .spectrum import (density_of_states, eigen_sweep, esqpt_estimate, parity_blocks,
                       spacing_distribution)
from .semiclassical import (classical_energy, eom_rhs, find_fixed_points, integrate_rk4,
                            separatrix_energy)

__version__ = "0.1.0"
