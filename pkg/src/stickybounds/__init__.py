"""Explicit Poincare and log-Sobolev bounds for doubly weighted Brownian
motion with sticky-reflecting boundary diffusion, verified against P1
finite elements on rotationally symmetric benchmark surfaces."""

from .bounds import (
    BoundsError,
    InterpolationInputs,
    K1_alt,
    K1_general,
    K_boundary,
    K_from_steklov,
    L_boundary_interior,
    bernoulli_logfactor,
    boundary_interior_sobolev,
    coinciding_K1,
    coinciding_direct,
    entropy_from_trace,
    inf_max_affine,
    interpolate_logsob,
    interpolate_poincare,
    logsob_no_bd,
    poincare_no_bd,
    steklov_lower,
    trace_norm_bound,
    weighted_sobolev_const,
)
from .comparison import (
    ComparisonProfile,
    first_zero_bisect,
    h_eval,
    h_first_zero,
    laplace_comp_bounds,
    optimize_rho_negpart,
    phi_tube_integrals,
    rho_negpart_sup,
)
from .config import ConfigError, RunConfig, load_config, parse_config
from .geometry import (
    BenchmarkGeometry,
    CurvatureBounds,
    GeometryError,
    RadialProfile,
    WeightPair,
    make_geometry,
    normalize_weights,
    tube_integral,
)
from .meshing import MeshError, TriMesh, disk_mesh
from .pipeline import compute_bound_report, run_bounds, run_convergence, run_verify
from .spectral import (
    DiscreteForm,
    SolverError,
    SpectralEstimate,
    assemble,
    discrete_entropy,
    discrete_variance,
    estimate_lsi_lower,
    estimate_trace_norm,
    richardson,
    solve_boundary_poincare,
    solve_neumann_poincare,
    solve_no_bd_poincare,
    solve_steklov,
    solve_sticky_poincare,
)

__version__ = "0.1.0"
