//! Dense complex linear algebra: matrices, Hermitian operators with
//! bipartite structure, a Jacobi eigensolver and spectral functions.

mod eigen;
mod functions;
mod hermitian;
mod matrix;

pub use eigen::{hermitian_eig, EigenDecomposition, MAX_SWEEPS, OFF_DIAGONAL_TOL};
pub use functions::{
    frobenius_norm, matrix_sqrt_psd, min_eigenvalue, operator_norm, positive_part, project_psd, support_projector, trace_norm,
    PSD_TOL, TIE_TOL,
};
pub use hermitian::{
    inner_product, partial_trace_a, partial_trace_b, partial_transpose_b, tensor_bipartite, tensor_product,
    tensor_product_capped, BipartiteState, HermitianOperator, DEFAULT_MAX_DIM, HERMITIAN_TOL,
};
pub use matrix::ComplexMatrix;
