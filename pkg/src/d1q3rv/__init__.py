"""Three-velocity 1D lattice Boltzmann advection scheme with relative velocity."""

from .scheme import (
    SchemeParameters,
    MomentVector,
    TAU_MAT,
    VELOCITIES,
    basis_commutator,
    build_E,
    build_M,
    build_S,
    build_T,
    build_relaxation_matrix,
    change_basis_relaxation_matrix,
    equilibrium_distributions,
    equilibrium_weights,
    inverse_M,
    inverse_T,
    mats_close,
    moments_from_distributions,
    relaxation_matrices,
)
from .stability import (
    GUARD_BAND,
    TAU_STAB,
    GammaInterval,
    ReducedParameters,
    StabilityVerdict,
    alpha_feasible,
    alpha_from_gamma,
    alpha_interval,
    chain_bounds,
    gamma_feasible_interval,
    matrix_entry_verdict,
    necessary_region,
    nine_inequalities,
    pinned_gamma,
    reduced_condition,
    reduced_parameters,
    relaxation_entries_closed_form,
    u_bar_bound_check,
    u_zero_alpha_bounds,
    u_zero_region,
)
from .regionscan import RegionCell, RegionGrid, ScanSpec, emit_csv, emit_svg, parse_csv, scan
from .simulator import (
    Grid1D,
    InitialProfile,
    LatticeState,
    RunDiagnostics,
    RunResult,
    default_grid,
    exact_density,
    init_state,
    relax,
    run,
    stream,
    unstream,
)

__version__ = "0.1.0"
