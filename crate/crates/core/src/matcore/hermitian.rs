use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use super::jacobi::jacobi_eigh;
use super::matrix::{Matrix, C64};
use super::scalar::ScalarFunction;
use crate::error::{Error, Result};

/// Relative factor in the positive-definiteness threshold
/// `λ_min > dim · 1e-12 · (1 + ||A||_op)`.
pub const PD_REL_THRESHOLD: f64 = 1e-12;

/// Default Löwner-order tolerance.
pub const DEFAULT_LOEWNER_TOL: f64 = 1e-9;

/// Dense complex Hermitian matrix.
///
/// Construction symmetrizes the input as `(A + A*) / 2`, so the stored entries
/// satisfy `a_ij = conj(a_ji)` exactly.
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix {
    m: Matrix,
}

impl std::fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Hermitian{:?}", self.m)
    }
}

impl HermitianMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        if m.rows() == 0 {
            return Err(Error::InvalidParameter("matrix dimension must be at least 1".into()));
        }
        Ok(Self::symmetrized(m))
    }

    pub(crate) fn symmetrized(mut m: Matrix) -> Self {
        let n = m.rows();
        for i in 0..n {
            let d = m[(i, i)].re;
            m[(i, i)] = C64::new(d, 0.0);
            for j in (i + 1)..n {
                let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                m[(i, j)] = avg;
                m[(j, i)] = avg.conj();
            }
        }
        Self { m }
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Self::new(Matrix::from_real_rows(rows)?)
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        Self::symmetrized(Matrix::from_diag(diag))
    }

    pub fn identity(n: usize) -> Self {
        Self { m: Matrix::identity(n) }
    }

    /// `c · I_n`.
    pub fn scalar(n: usize, c: f64) -> Self {
        Self::from_diag(&vec![c; n])
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn into_matrix(self) -> Matrix {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn eigh(&self) -> Result<SpectralDecomposition> {
        let (eigenvalues, eigenvectors) = jacobi_eigh(&self.m)?;
        Ok(SpectralDecomposition {
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eigh()?.eigenvalues)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }

    pub fn max_eigenvalue(&self) -> Result<f64> {
        Ok(*self.eigenvalues()?.last().expect("dim >= 1"))
    }

    /// `max |λ_i|`.
    pub fn operator_norm(&self) -> Result<f64> {
        Ok(spectral_radius(&self.eigenvalues()?))
    }

    /// Real trace.
    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    /// Functional calculus with a domain-checked scalar function.
    pub fn apply(&self, f: &ScalarFunction) -> Result<Self> {
        if matches!(f, ScalarFunction::Identity | ScalarFunction::Power(1.0)) {
            return Ok(self.clone());
        }
        self.eigh()?.apply(f)
    }

    /// Functional calculus with an arbitrary closure (no domain check).
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Ok(self.eigh()?.map(f))
    }

    pub fn pow(&self, p: f64) -> Result<Self> {
        if p == 1.0 {
            return Ok(self.clone());
        }
        self.apply(&ScalarFunction::Power(p))
    }

    pub fn sqrt(&self) -> Result<Self> {
        self.apply(&ScalarFunction::Sqrt)
    }

    pub fn log(&self) -> Result<Self> {
        self.apply(&ScalarFunction::Log)
    }

    pub fn exp(&self) -> Result<Self> {
        self.apply(&ScalarFunction::Exp)
    }

    /// Inverse through reciprocal eigenvalues.
    pub fn inverse(&self) -> Result<Self> {
        self.eigh()?.inverse()
    }

    /// Checks `λ_min > dim · 1e-12 · (1 + ||A||_op)` and returns the
    /// decomposition used for the check.
    pub fn require_positive_definite(&self) -> Result<SpectralDecomposition> {
        let sd = self.eigh()?;
        sd.require_positive_definite()?;
        Ok(sd)
    }

    pub fn is_positive_definite(&self) -> Result<bool> {
        Ok(self.eigh()?.require_positive_definite().is_ok())
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        Ok(Self { m: self.m.try_add(&rhs.m)? })
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        Ok(Self { m: self.m.try_sub(&rhs.m)? })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { m: self.m.scale(s) }
    }

    /// `(1 - t) self + t rhs`.
    pub fn lerp(&self, rhs: &Self, t: f64) -> Result<Self> {
        self.scale(1.0 - t).try_add(&rhs.scale(t))
    }

    /// `K* A K`.
    pub fn congruence(&self, k: &Matrix) -> Result<Self> {
        let ak = self.m.try_mul(k)?;
        Ok(Self::symmetrized(k.adjoint().try_mul(&ak)?))
    }

    /// `X A X` for Hermitian `X`.
    pub fn sandwich(&self, x: &HermitianMatrix) -> Result<Self> {
        let ax = self.m.try_mul(&x.m)?;
        Ok(Self::symmetrized(x.m.try_mul(&ax)?))
    }

    pub fn kron(&self, rhs: &Self) -> Self {
        Self::symmetrized(self.m.kron(&rhs.m))
    }

    pub fn hadamard(&self, rhs: &Self) -> Result<Self> {
        Ok(Self::symmetrized(self.m.hadamard(&rhs.m)?))
    }

    /// `Tr(A B)` for Hermitian `A`, `B` (real by construction).
    pub fn trace_product(&self, rhs: &Self) -> Result<f64> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch {
                context: "trace product",
                expected: self.dim(),
                found: rhs.dim(),
            });
        }
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += (self.m[(i, j)] * rhs.m[(j, i)]).re;
            }
        }
        Ok(s)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.frobenius_norm()
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> Result<f64> {
        Ok(self.m.try_sub(&rhs.m)?.max_abs())
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;

    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        self.try_add(rhs).expect("Hermitian sum dimension mismatch")
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;

    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        self.try_sub(rhs).expect("Hermitian difference dimension mismatch")
    }
}

/// General (non-Hermitian) product.
impl Mul for &HermitianMatrix {
    type Output = Matrix;

    fn mul(self, rhs: &HermitianMatrix) -> Matrix {
        &self.m * &rhs.m
    }
}

fn spectral_radius(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Eigenvalues (ascending) with orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    pub fn operator_norm(&self) -> f64 {
        spectral_radius(&self.eigenvalues)
    }

    /// `U diag(f(λ)) U*` without domain checks.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let n = self.dim();
        let u = &self.eigenvectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        // Accumulate only the upper triangle; the lower one is its conjugate.
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut s = C64::new(0.0, 0.0);
                for (k, &w) in fl.iter().enumerate() {
                    if w != 0.0 {
                        s += u[(i, k)] * u[(j, k)].conj() * w;
                    }
                }
                out[(i, j)] = s;
                out[(j, i)] = s.conj();
            }
        }
        HermitianMatrix::symmetrized(out)
    }

    pub fn apply(&self, f: &ScalarFunction) -> Result<HermitianMatrix> {
        let domain = f.domain();
        if let Some(&bad) = self.eigenvalues.iter().find(|&&l| !domain.contains(l)) {
            return Err(Error::Domain {
                function: f.to_string(),
                eigenvalue: bad,
            });
        }
        Ok(self.map(|l| f.eval(l)))
    }

    pub fn inverse(&self) -> Result<HermitianMatrix> {
        let norm = self.operator_norm();
        let floor = self.dim() as f64 * PD_REL_THRESHOLD * norm;
        let min_abs = self
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
        if min_abs <= floor || min_abs == 0.0 {
            return Err(Error::Singular {
                min_abs_eigenvalue: min_abs,
            });
        }
        Ok(self.map(|l| 1.0 / l))
    }

    pub fn pd_threshold(&self) -> f64 {
        self.dim() as f64 * PD_REL_THRESHOLD * (1.0 + self.operator_norm())
    }

    pub fn require_positive_definite(&self) -> Result<()> {
        let threshold = self.pd_threshold();
        if self.min() > threshold {
            Ok(())
        } else {
            Err(Error::NotPositiveDefinite {
                min_eigenvalue: self.min(),
                threshold,
            })
        }
    }
}

/// Spectral window `m I ≤ A ≤ M I` of a positive definite matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralBounds {
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
}

impl SpectralBounds {
    pub fn new(m: f64, big_m: f64) -> Result<Self> {
        if !(m > 0.0 && big_m >= m && big_m.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "spectral bounds need 0 < m <= M, got m={m}, M={big_m}"
            )));
        }
        Ok(Self { m, big_m })
    }

    /// Generalized condition number `M / m`.
    pub fn condition_number(&self) -> f64 {
        self.big_m / self.m
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.m && x <= self.big_m
    }
}

/// Outcome of a Löwner-order comparison `A ≤ B`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoewnerVerdict {
    pub holds: bool,
    /// `λ_min(B − A)`.
    pub margin: f64,
    /// `||B − A||_op`.
    pub scale: f64,
}

/// Eigen-decomposition with ascending eigenvalues.
pub fn eigh(a: &HermitianMatrix) -> Result<SpectralDecomposition> {
    a.eigh()
}

pub fn apply_function(a: &HermitianMatrix, f: &ScalarFunction) -> Result<HermitianMatrix> {
    a.apply(f)
}

/// `A ≤ B` iff `λ_min(B − A) ≥ −tol · (1 + ||B − A||_op)`.
pub fn loewner_leq(a: &HermitianMatrix, b: &HermitianMatrix, tol: f64) -> Result<LoewnerVerdict> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            context: "Löwner comparison",
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let sd = b.try_sub(a)?.eigh()?;
    let margin = sd.min();
    let scale = sd.operator_norm();
    Ok(LoewnerVerdict {
        holds: margin >= -tol * (1.0 + scale),
        margin,
        scale,
    })
}

pub fn spectral_bounds(a: &HermitianMatrix) -> Result<SpectralBounds> {
    let sd = a.require_positive_definite()?;
    SpectralBounds::new(sd.min(), sd.max())
}

pub fn operator_norm(a: &HermitianMatrix) -> Result<f64> {
    a.operator_norm()
}

pub fn inverse(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    a.inverse()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(rows: &[[f64; 2]]) -> HermitianMatrix {
        HermitianMatrix::from_real_rows(rows).unwrap()
    }

    #[test]
    fn constructor_symmetrizes() {
        let m = Matrix::from_real_rows(&[[1.0, 2.0], [0.0, 1.0]]).unwrap();
        let a = HermitianMatrix::new(m).unwrap();
        assert_eq!(a.get(0, 1), a.get(1, 0).conj());
        assert_eq!(a.get(0, 1).re, 1.0);
    }

    #[test]
    fn constructor_rejects_non_square() {
        assert!(HermitianMatrix::new(Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn eigenvalues_of_two_by_two() {
        let w = h(&[[2.0, 1.0], [1.0, 2.0]]).eigenvalues().unwrap();
        assert!((w[0] - 1.0).abs() < 1e-14 && (w[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn identity_decomposition() {
        let sd = HermitianMatrix::identity(4).eigh().unwrap();
        assert!(sd.eigenvalues.iter().all(|&l| l == 1.0));
        assert_eq!(sd.eigenvectors, Matrix::identity(4));
    }

    #[test]
    fn square_through_calculus_matches_product() {
        let a = h(&[[2.0, 1.0], [1.0, 2.0]]);
        let sq = a.apply(&ScalarFunction::Power(2.0)).unwrap();
        let expected = h(&[[5.0, 4.0], [4.0, 5.0]]);
        assert!(sq.max_abs_diff(&expected).unwrap() < 1e-13);
    }

    #[test]
    fn sqrt_of_diagonal() {
        let r = HermitianMatrix::from_diag(&[1.0, 4.0]).sqrt().unwrap();
        assert!(r.max_abs_diff(&HermitianMatrix::from_diag(&[1.0, 2.0])).unwrap() < 1e-15);
    }

    #[test]
    fn log_of_indefinite_matrix_names_eigenvalue() {
        let a = HermitianMatrix::from_diag(&[-0.5, 2.0]);
        match a.log() {
            Err(Error::Domain { eigenvalue, function }) => {
                assert_eq!(eigenvalue, -0.5);
                assert_eq!(function, "log");
            }
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn loewner_examples() {
        let i = HermitianMatrix::identity(3);
        let v = loewner_leq(&i, &i.scale(2.0), 1e-9).unwrap();
        assert!(v.holds);
        assert!((v.margin - 1.0).abs() < 1e-15);
        let v = loewner_leq(&i, &i, 1e-9).unwrap();
        assert!(v.holds && v.margin == 0.0);
        assert!(!loewner_leq(&i.scale(2.0), &i, 1e-9).unwrap().holds);
        assert!(loewner_leq(&i, &HermitianMatrix::identity(2), 1e-9).is_err());
    }

    #[test]
    fn bounds_and_norms() {
        let b = spectral_bounds(&HermitianMatrix::from_diag(&[1.0, 4.0])).unwrap();
        assert_eq!((b.m, b.big_m, b.condition_number()), (1.0, 4.0, 4.0));
        let b = spectral_bounds(&HermitianMatrix::identity(3)).unwrap();
        assert_eq!(b.condition_number(), 1.0);
        let b = spectral_bounds(&h(&[[2.0, 1.0], [1.0, 2.0]])).unwrap();
        assert!((b.m - 1.0).abs() < 1e-14 && (b.big_m - 3.0).abs() < 1e-14);
        assert!(spectral_bounds(&HermitianMatrix::from_diag(&[0.0, 1.0])).is_err());
        assert_eq!(operator_norm(&HermitianMatrix::from_diag(&[-3.0, 2.0])).unwrap(), 3.0);
    }

    #[test]
    fn inverses() {
        let inv = inverse(&HermitianMatrix::from_diag(&[2.0, 4.0])).unwrap();
        assert!(inv.max_abs_diff(&HermitianMatrix::from_diag(&[0.5, 0.25])).unwrap() < 1e-15);
        let inv = inverse(&h(&[[2.0, 1.0], [1.0, 2.0]])).unwrap();
        let expected = h(&[[2.0, -1.0], [-1.0, 2.0]]).scale(1.0 / 3.0);
        assert!(inv.max_abs_diff(&expected).unwrap() < 1e-14);
        assert!(matches!(
            inverse(&HermitianMatrix::from_diag(&[0.0, 1.0])),
            Err(Error::Singular { .. })
        ));
    }
}
