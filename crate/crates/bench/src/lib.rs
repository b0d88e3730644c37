//! Fixtures shared by the criterion benchmarks.

use lowner_core::verify::{Sampler, SpectrumLaw};
use lowner_core::HermitianMatrix;

/// A seeded positive definite `n × n` matrix with spectrum in `[0.5, 2]`.
pub fn pd(n: usize, seed: u64) -> HermitianMatrix {
    Sampler::new(seed, 0, 0.5, 2.0, SpectrumLaw::Uniform).pd(n)
}

/// A seeded Hermitian `n × n` matrix with Gaussian entries.
pub fn hermitian(n: usize, seed: u64) -> HermitianMatrix {
    let g = Sampler::new(seed, 1, 0.5, 2.0, SpectrumLaw::Uniform).gaussian(n, n);
    HermitianMatrix::new((&g + &g.adjoint()).scale(0.5)).expect("hermitian by construction")
}
