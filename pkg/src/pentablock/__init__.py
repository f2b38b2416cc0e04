"""Numerical geometry and operator theory of the pentablock.

Modules
-------
linalg_kernel
    Norms, radii, polar decomposition, PSD square roots, joint diagonalization.
geometry
    Membership in the closed pentablock and its distinguished boundary.
classify
    Unitary / isometry / quasi-unitary checks for commuting matrix triples.
models
    Truncated Hardy-space models, the normal Fejer-Riesz factor, Wold split.
multipliers
    Matrix polynomials on the circle and Beurling-Lax-Halmos checks.
suites, cli
    Seeded verification suites and the ``pentablock`` command.
"""
from ._kernels import BACKEND
from .classify import (
    OperatorTriple,
    gamma_isometry_check,
    gamma_unitary_check,
    lemma25_inequality_check,
    p_isometry_check,
    p_unitary_check,
    pointwise_symbol_check,
    quasi_p_unitary_check,
)
from .errors import *  # noqa: F401,F403
from .geometry import (
    MembershipVerdict,
    PentaPoint,
    b_penta_membership,
    cross_section,
    penta_membership,
    pi_map,
    sup_psi,
    unitary_from_boundary,
)
from .linalg_kernel import DEFAULT_TOL, ToleranceProfile, joint_diagonalize, numerical_radius
from .models import (
    build_pure_gamma_isometry,
    build_pure_p_isometry,
    build_shift_tensor,
    fejer_riesz_normal,
    symmetrization_model,
    verify_five_equations,
    wold_decompose,
    wold_triple_decompose,
)
from .multipliers import CircleGrid, TrigMatrixPoly, blaschke_potapov, blh_converse_extract, blh_forward_check, is_inner
from .verdict import Verdict

__version__ = "0.1.0"
