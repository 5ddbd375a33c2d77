"""Doubly symmetric densities on (0, inf).

A density f is log-symmetric about its median delta if y^2 f(delta*y) =
f(delta/y) and R-symmetric about its mode theta if f(theta*y) = f(theta/y).
This package constructs, checks, and samples densities with both symmetries
(ratio k = delta/theta > 1), plus the neighboring families that have exactly
one, or neither, of the two.
"""
from .core import (
    LOG_SYM,
    R_SYM,
    CenterSearch,
    DensityModel,
    GridSpec,
    NormInfo,
    NumericsError,
    PieceIndex,
    ResidualReport,
    SymmetryParams,
    best_symmetry_center,
    default_grid,
    ds_chain_residual,
    grid_index,
    piece_indices,
    power_transform,
    symmetry_residual,
)
from .densities import (
    PakesDensity,
    PolyDsDensity,
    StieltjesParams,
    make_lognormal,
    make_pakes_ds,
    make_poly_ds,
    make_stieltjes,
    pakes_evaluator_agreement,
    pakes_log_unnorm,
    pakes_log_unnorm_alt,
    poly_ds_boundary_limits,
    poly_ds_norm_const,
    stieltjes_cross_residual,
)
from .moments import (
    LogIdentityReport,
    MomentEstimate,
    MomentReport,
    ProbeResult,
    log_identities_report,
    moment,
    moment_ratio_periodicity,
    moment_recursion_residual,
    quadratic_fit_residual,
    theorem2_probe,
)
from .psi import (
    PsiFunction,
    PsiSeed,
    SmoothnessReport,
    UnimodalityReport,
    extend_seed,
    make_psi_alpha,
    make_psi_lognormal,
    psi_from_callable,
    psi_reflection_residual,
    smoothness_report,
    unimodality_check,
)
from .sampling import (
    CdfTable,
    SampleBatch,
    build_cdf,
    ks_critical_value,
    ks_statistic,
    ks_two_sample,
    poly_exact_cdf,
    poly_piece_masses,
    sample,
    sample_poly_exact,
)
from .theta import (
    AskeyBergDensity,
    ThetaEval,
    askey_berg_lognormal_gap,
    gridpoint_equality_check,
    make_askey_berg,
    ramanujan_theta,
    theta_log_values,
    theta_shift_identity_residual,
)

__version__ = "0.1.0"

__all__ = [
    "LOG_SYM",
    "R_SYM",
    "NumericsError",
    "SymmetryParams",
    "GridSpec",
    "default_grid",
    "PieceIndex",
    "grid_index",
    "piece_indices",
    "NormInfo",
    "DensityModel",
    "ResidualReport",
    "symmetry_residual",
    "ds_chain_residual",
    "CenterSearch",
    "best_symmetry_center",
    "power_transform",
    "PsiSeed",
    "PsiFunction",
    "make_psi_alpha",
    "make_psi_lognormal",
    "psi_from_callable",
    "extend_seed",
    "psi_reflection_residual",
    "SmoothnessReport",
    "smoothness_report",
    "UnimodalityReport",
    "unimodality_check",
    "make_lognormal",
    "StieltjesParams",
    "make_stieltjes",
    "stieltjes_cross_residual",
    "PakesDensity",
    "make_pakes_ds",
    "pakes_log_unnorm",
    "pakes_log_unnorm_alt",
    "pakes_evaluator_agreement",
    "PolyDsDensity",
    "poly_ds_norm_const",
    "make_poly_ds",
    "poly_ds_boundary_limits",
    "ThetaEval",
    "ramanujan_theta",
    "theta_log_values",
    "theta_shift_identity_residual",
    "AskeyBergDensity",
    "make_askey_berg",
    "askey_berg_lognormal_gap",
    "gridpoint_equality_check",
    "MomentEstimate",
    "moment",
    "MomentReport",
    "moment_recursion_residual",
    "moment_ratio_periodicity",
    "LogIdentityReport",
    "log_identities_report",
    "quadratic_fit_residual",
    "ProbeResult",
    "theorem2_probe",
    "CdfTable",
    "build_cdf",
    "SampleBatch",
    "sample",
    "poly_piece_masses",
    "poly_exact_cdf",
    "sample_poly_exact",
    "ks_statistic",
    "ks_two_sample",
    "ks_critical_value",
    "__version__",
]
