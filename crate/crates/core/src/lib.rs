//! Operator means, positive linear maps, Kantorovich and Specht constants,
//! operator-valued determinants, and a randomized engine that checks
//! operator and trace inequalities on random Hermitian matrices.

pub mod constants;
pub mod error;
pub mod functionals;
pub mod maps;
pub mod matcore;
pub mod means;
pub mod verify;

pub use error::{Error, Result};
pub use matcore::{HermitianMatrix, Matrix, ScalarFunction, SpectralBounds, SpectralDecomposition};
pub use maps::{MultilinearMap, PositiveLinearMap};
pub use means::{OperatorMean, PathParams};
pub use verify::{InequalityReport, ProbeConfig};
