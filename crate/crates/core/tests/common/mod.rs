#![allow(dead_code)]

use lowner_core::matcore::{HermitianMatrix, Matrix};
use lowner_core::verify::{Sampler, SpectrumLaw};

pub fn sampler(seed: u64) -> Sampler {
    Sampler::new(seed, 0, 0.5, 2.0, SpectrumLaw::Uniform)
}

pub fn sampler_in(seed: u64, m: f64, big_m: f64) -> Sampler {
    Sampler::new(seed, 0, m, big_m, SpectrumLaw::Uniform)
}

/// `(G + G*)/2` for a complex Gaussian `G`.
pub fn hermitian(s: &mut Sampler, n: usize) -> HermitianMatrix {
    let g = s.gaussian(n, n);
    HermitianMatrix::new((&g + &g.adjoint()).scale(0.5)).unwrap()
}

pub fn op_diff(a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
    a.try_sub(b).unwrap().operator_norm().unwrap()
}

pub fn mat_diff(a: &Matrix, b: &Matrix) -> f64 {
    (a - b).max_abs()
}
