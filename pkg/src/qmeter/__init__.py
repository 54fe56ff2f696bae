"""Measurement error, weak values and quasiprobabilities for finite-dimensional quantum measurements."""

from .apparatus import Apparatus, CouplingFamily, conditional_meter_shift, induced_povm, kraus_operators
from .determinism import (Certificate, Decomposition, WeakValue, decompose, real_matrix_family_check,
                          weak_value, zero_error_residuals)
from .error_analysis import (ErrorReport, ValueAssignment, brute_force_assignment, optimal_assignment,
                             ozawa_error)
from .errors import DimensionMismatch, DomainError, ParseError, QMeterError, ValidationError
from .hilbert import (SIGMA_X, SIGMA_Y, SIGMA_Z, Eigensystem, Ket, Observable, eigensystem,
                      expectation, validate_hermitian)
from .measurement import (Povm, PovmElement, ProjectiveBasis, basis_to_povm, outcome_probabilities,
                          validate_povm, x_basis, z_basis)
from .quasiprob import JointQuasiprobTable, estimate_from_quasiprob, joint_quasiprob, negativity
from .sampler import SampleReport, sample_outcomes
from .scenario import Scenario, parse_scenario, serialize

__version__ = "0.1.0"
