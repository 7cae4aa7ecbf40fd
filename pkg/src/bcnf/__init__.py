"""Periodic solutions of the planar border-collision normal form.

Cycle solving and classification, the two multistability scenario frames
(saddle eigenbasis and repeated-unit-eigenvalue shear), exact certification
over quadratic fields, and perturbation sweeps with their scaling laws.
"""

from .core import (
    Cycle,
    CycleError,
    FrameError,
    MarginClass,
    Params,
    StabilityClass,
    UnitEigenvalueError,
    VerticalEigenvectorError,
    classify_stability,
    compose_word,
    half_matrix,
    margin,
    solve_cycle,
)
from .codim3 import Codim3Coeffs, Codim3Report, EigenBasis, check_codim3, conjugate_gY, eigen_basis, gamma22_prime
from .codim4 import (
    Codim4Candidate,
    Codim4Frame,
    Codim4Report,
    alpha_beta,
    check_codim4,
    find_codim4,
    frame,
    r_theta,
    truncation_coeffs,
    unit_eigen_constraints,
)
from .quadfield import Certificate, ExactCycle, Quad, exact_cycle, quad_sign, verify_proposition
from .sweep import Family, KInterval, Scenario, SweepResult, bound_check, family_params, k_interval, kappa_at, run_sweep
from .words import Word, WordError, family_word, is_primitive, parse_word, shift

__all__ = [name for name in dir() if not name.startswith("_")]
