//! Seeded random matrices for the verification trials.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::ProbeConfig;
use crate::matcore::{HermitianMatrix, Matrix, C64};

/// How eigenvalues are spread over the window `[m, M]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumLaw {
    #[default]
    Uniform,
    /// Uniform in `log λ`; reaches the ill-conditioned corners far more often.
    LogUniform,
}

/// Random source for one trial: a ChaCha stream keyed by `(seed, trial)`.
pub struct Sampler {
    rng: ChaCha8Rng,
    m: f64,
    big_m: f64,
    law: SpectrumLaw,
    /// Index of the trial this sampler belongs to.
    pub trial: usize,
}

impl Sampler {
    pub fn new(seed: u64, stream: u64, m: f64, big_m: f64, law: SpectrumLaw) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self {
            rng,
            m,
            big_m,
            law,
            trial: stream as usize,
        }
    }

    pub fn for_trial(config: &ProbeConfig, trial: usize) -> Self {
        Self::new(config.seed, trial as u64, config.window.m, config.window.big_m, config.spectrum)
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn window(&self) -> (f64, f64) {
        (self.m, self.big_m)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        if lo == hi {
            lo
        } else {
            self.rng.random_range(lo..hi)
        }
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Entries with independent standard normal real and imaginary parts.
    pub fn gaussian(&mut self, rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(rows, cols, |_, _| C64::new(self.normal(), self.normal()))
    }

    /// Haar-distributed unitary from Gram–Schmidt on a complex Gaussian.
    pub fn unitary(&mut self, n: usize) -> Matrix {
        loop {
            let g = self.gaussian(n, n);
            if let Some(q) = orthonormalize_columns(&g) {
                return q;
            }
        }
    }

    fn eigenvalue(&mut self, m: f64, big_m: f64) -> f64 {
        if m == big_m {
            return m;
        }
        match self.law {
            SpectrumLaw::Uniform => self.uniform(m, big_m),
            SpectrumLaw::LogUniform => self.uniform(m.ln(), big_m.ln()).exp().clamp(m, big_m),
        }
    }

    /// `U diag(λ) U*` with `λ` drawn from `[m, M]` of the configured window.
    pub fn pd(&mut self, n: usize) -> HermitianMatrix {
        let (m, big_m) = (self.m, self.big_m);
        self.pd_in(n, m, big_m)
    }

    pub fn pd_in(&mut self, n: usize, m: f64, big_m: f64) -> HermitianMatrix {
        if m == big_m {
            return HermitianMatrix::scalar(n, m);
        }
        let spectrum: Vec<f64> = (0..n).map(|_| self.eigenvalue(m, big_m)).collect();
        let u = self.unitary(n);
        with_spectrum(&u, &spectrum)
    }

    /// Random positive semidefinite matrix `G G* / n`.
    pub fn psd(&mut self, n: usize) -> HermitianMatrix {
        let g = self.gaussian(n, n);
        HermitianMatrix::new((&g * &g.adjoint()).scale(1.0 / n as f64)).expect("square")
    }

    /// Random correlation matrix: positive semidefinite with unit diagonal.
    pub fn correlation(&mut self, n: usize) -> HermitianMatrix {
        let g = self.gaussian(n, n + 1);
        let gram = &g * &g.adjoint();
        let d: Vec<f64> = (0..n).map(|i| gram[(i, i)].re.sqrt()).collect();
        let mut c = Matrix::from_fn(n, n, |i, j| gram[(i, j)] / (d[i] * d[j]));
        for (i, _) in d.iter().enumerate() {
            c[(i, i)] = C64::new(1.0, 0.0);
        }
        HermitianMatrix::new(c).expect("square")
    }

    /// `U diag(s) V` with singular values in `[lo, hi]`.
    pub fn invertible(&mut self, n: usize, lo: f64, hi: f64) -> Matrix {
        let u = self.unitary(n);
        let v = self.unitary(n);
        let s: Vec<f64> = (0..n).map(|_| self.uniform(lo, hi)).collect();
        let d = Matrix::from_diag(&s);
        &(&u * &d) * &v
    }

    /// An `n_in × n_out` isometry (`K*K = I`).
    pub fn isometry(&mut self, n_in: usize, n_out: usize) -> Matrix {
        let u = self.unitary(n_in);
        u.block(0, 0, n_in, n_out)
    }

    /// Random Hermitian direction with unit Frobenius norm.
    pub fn hermitian_direction(&mut self, n: usize) -> HermitianMatrix {
        let g = self.gaussian(n, n);
        let h = HermitianMatrix::new(&g + &g.adjoint()).expect("square");
        let norm = h.frobenius_norm();
        h.scale(1.0 / norm)
    }
}

/// `U diag(λ) U*`.
pub fn with_spectrum(u: &Matrix, spectrum: &[f64]) -> HermitianMatrix {
    let d = Matrix::from_diag(spectrum);
    HermitianMatrix::new(&(u * &d) * &u.adjoint()).expect("square")
}

fn orthonormalize_columns(a: &Matrix) -> Option<Matrix> {
    let n = a.rows();
    let k = a.cols();
    let mut q = a.clone();
    for j in 0..k {
        for i in 0..j {
            let mut dot = C64::new(0.0, 0.0);
            for r in 0..n {
                dot += q[(r, i)].conj() * q[(r, j)];
            }
            for r in 0..n {
                let qi = q[(r, i)];
                q[(r, j)] -= qi * dot;
            }
        }
        let norm = (0..n).map(|r| q[(r, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return None;
        }
        for r in 0..n {
            q[(r, j)] /= norm;
        }
    }
    Some(q)
}

/// A positive definite sample for `config` on the generator of `trial`.
pub fn sample_pd(config: &ProbeConfig, trial: usize, n: usize) -> HermitianMatrix {
    Sampler::for_trial(config, trial).pd(n)
}
