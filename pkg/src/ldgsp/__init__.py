"""LDG solver on layer-adapted meshes for singularly perturbed problems."""

from .mesh import (
    Mesh1D,
    MeshSpec,
    TensorMesh2D,
    build_mesh_1d,
    layer_diagnostic_theta,
    max_abs_psi_prime,
    mesh_generating_lambda,
    tensor_mesh,
    transition_tau,
)
from .quadrature import (
    QuadratureRule,
    ReferenceBasis,
    cell_integrate,
    cell_integrate_2d,
    eval_basis_1d,
    eval_basis_1d_deriv,
    gauss_legendre_5,
    reference_basis,
)
from .space import FESpace1D, FESpace2D, ScalarField, fe_space_1d, fe_space_2d, zero_field
from .projection import (
    gr_minus_1d,
    gr_plus_1d,
    l2_project,
    pi_minus_2d,
    pi_x_plus_2d,
    pi_y_plus_2d,
    projection_rate_study,
)
from .ldg_2d import (
    ExactSolution2D,
    FieldTriple,
    ProblemDef2D,
    assemble_B_2d,
    energy_norm_2d,
    rhs_vector_2d,
)
from .ldg_1d import (
    ExactSolution1D,
    FieldPair,
    ProblemDef1D,
    assemble_B_1d,
    energy_norm_1d,
    rhs_vector_1d,
)
from .linalg import AssembledSystem, Factorization, SingularMatrixError, factorize, solve
from .timestep import (
    DGTimeConfig,
    SolverError,
    ThetaConfig,
    make_theta_config,
    run_dg_time_1d,
    run_theta,
)
from .ritz import bilinear_rhs_exact, galerkin_residual, ritz_project
from .analysis import (
    EnergyErrorAccumulator,
    StudyRecord,
    attach_rates,
    energy_error_accumulated,
    l2_error,
    rate_r2,
    rate_rS,
    records_to_csv,
    render_markdown,
    single_run_1d,
    single_run_2d,
    write_csv,
)
from .problems import paper1d_problem, paper2d_problem, poly1d_problem, poly2d_problem

__version__ = "0.1.0"
