//! Dense complex Hermitian linear algebra: Jacobi eigensolver, functional
//! calculus, Löwner-order comparisons and the JSON matrix format.

mod hermitian;
mod io;
mod jacobi;
mod matrix;
mod scalar;

pub use hermitian::{
    apply_function, eigh, inverse, loewner_leq, operator_norm, spectral_bounds, HermitianMatrix,
    LoewnerVerdict, SpectralBounds, SpectralDecomposition, DEFAULT_LOEWNER_TOL, PD_REL_THRESHOLD,
};
pub use io::{parse_hermitian, parse_matrix, read_hermitian, read_matrix, MatrixLiteral};
pub use jacobi::{jacobi_eigh, with_tight_tolerance, MAX_SWEEPS};
pub use matrix::{Matrix, C64};
pub use scalar::{Domain, ScalarFunction};
pub(crate) use scalar::powf_exact;
