"""Sparse iterative-solver toolkit for gene-network ranking.

Builds and solves the damped gene-network ranking system in its spd and
Jacobi-scaled forms, with a multiplicative polynomial preconditioner,
Chebyshev semi-iteration, spectral verification of the operators'
documented guarantees, synthetic graph generators, and a benchmark CLI.
"""
from generank._backend import available_backends, backend_name
from generank.datagen import (
    AnnotationTable,
    RengaParams,
    build_adjacency_from_annotations,
    generate_renga,
    make_expression_vector,
    read_expression_file,
)
from generank.model import (
    GeneRankProblem,
    OperatorHandle,
    Solution,
    apply_damped_adjacency,
    apply_preconditioned_system,
    apply_preconditioner,
    apply_scaled_system,
    apply_spd_system,
    assemble_scaled_rhs,
    assemble_spd_rhs,
    build_degree_scaling,
    rank_genes,
    recover_solution,
    write_solution_csv,
)
from generank.solvers import (
    METHODS,
    SolveReport,
    SolverBreakdownError,
    SolverConfig,
    solve,
    solve_cg,
    solve_cg_malpha,
    solve_chebyshev,
    solve_pcg_jacobi,
)
from generank.sparse import (
    MatrixFormatError,
    SparseSymMatrix,
    read_matrix_market,
    spmv,
    write_matrix_market,
)
from generank.spectral import (
    ClaimVerdict,
    LanczosEstimate,
    MMatrixVerdict,
    SpectralReport,
    check_spectral_claims,
    dense_spectrum,
    extreme_eigs_lanczos,
    spectral_report,
    verify_m_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotationTable",
    "ClaimVerdict",
    "GeneRankProblem",
    "LanczosEstimate",
    "METHODS",
    "MatrixFormatError",
    "MMatrixVerdict",
    "OperatorHandle",
    "RengaParams",
    "Solution",
    "SolveReport",
    "SolverBreakdownError",
    "SolverConfig",
    "SparseSymMatrix",
    "SpectralReport",
    "apply_damped_adjacency",
    "apply_preconditioned_system",
    "apply_preconditioner",
    "apply_scaled_system",
    "apply_spd_system",
    "assemble_scaled_rhs",
    "assemble_spd_rhs",
    "available_backends",
    "backend_name",
    "build_adjacency_from_annotations",
    "build_degree_scaling",
    "check_spectral_claims",
    "dense_spectrum",
    "extreme_eigs_lanczos",
    "generate_renga",
    "make_expression_vector",
    "rank_genes",
    "read_expression_file",
    "read_matrix_market",
    "recover_solution",
    "solve",
    "solve_cg",
    "solve_cg_malpha",
    "solve_chebyshev",
    "solve_pcg_jacobi",
    "spectral_report",
    "spmv",
    "verify_m_matrix",
    "write_matrix_market",
    "write_solution_csv",
    "__version__",
]
