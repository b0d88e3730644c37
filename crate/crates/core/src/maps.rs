//! Positive linear and multilinear maps, applied structurally.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{read_hermitian, read_matrix, HermitianMatrix, Matrix, C64};
use crate::means::OperatorMean;
use crate::verify::{self, InequalityReport, ProbeConfig};

/// Tolerance for the unitality checks `Φ(I) = I`, `K*K = I`, `diag C = 1`.
pub const UNITAL_TOL: f64 = 1e-10;

/// A positive linear map between matrix algebras.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PositiveLinearMap {
    Identity,
    /// `A ↦ K*AK` for any `K` (`n×m`, maps `M_n → M_m`).
    Congruence { k: Matrix },
    /// `A ↦ K*AK` with `K*K = I`.
    UnitalCongruence { k: Matrix },
    /// `A₁ ⊕ ⋯ ⊕ A_n ↦ (A₁ + ⋯ + A_n)/n`, reading the diagonal blocks of an
    /// `nb × nb` input.
    Averaging { blocks: usize },
    /// Keeps the diagonal blocks with the given sizes and zeros the rest;
    /// `None` keeps only the diagonal.
    Pinching { block_sizes: Option<Vec<usize>> },
    /// `A ↦ C ∘ A` for a positive semidefinite `C`.
    Schur { c: HermitianMatrix },
    /// `A ↦ Tr A` (or `Tr A / n` when normalized) as a `1×1` matrix.
    Trace { normalized: bool },
}

fn is_identity(m: &Matrix, tol: f64) -> bool {
    let n = m.rows();
    m.is_square()
        && (0..n).all(|i| {
            (0..n).all(|j| {
                let target = if i == j { 1.0 } else { 0.0 };
                (m[(i, j)] - C64::new(target, 0.0)).norm() <= tol
            })
        })
}

impl PositiveLinearMap {
    pub fn identity() -> Self {
        Self::Identity
    }

    pub fn congruence(k: Matrix) -> Self {
        Self::Congruence { k }
    }

    /// Congruence by an isometry; fails unless `K*K = I`.
    pub fn unital_congruence(k: Matrix) -> Result<Self> {
        let map = Self::UnitalCongruence { k };
        map.validate()?;
        Ok(map)
    }

    pub fn averaging(blocks: usize) -> Result<Self> {
        let map = Self::Averaging { blocks };
        map.validate()?;
        Ok(map)
    }

    pub fn pinching() -> Self {
        Self::Pinching { block_sizes: None }
    }

    pub fn pinching_blocks(sizes: Vec<usize>) -> Result<Self> {
        let map = Self::Pinching { block_sizes: Some(sizes) };
        map.validate()?;
        Ok(map)
    }

    /// Schur multiplier; `C` must be positive semidefinite.
    pub fn schur(c: HermitianMatrix) -> Result<Self> {
        let map = Self::Schur { c };
        map.validate()?;
        Ok(map)
    }

    pub fn trace(normalized: bool) -> Self {
        Self::Trace { normalized }
    }

    /// Checks the structural invariants of deserialized or hand-built maps.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::UnitalCongruence { k } => {
                let kk = k.adjoint().try_mul(k)?;
                if !is_identity(&kk, UNITAL_TOL) {
                    return Err(Error::NotUnital(format!("{self}: K*K differs from I")));
                }
            }
            Self::Averaging { blocks: 0 } => {
                return Err(Error::InvalidParameter("averaging map needs at least one block".into()));
            }
            Self::Pinching { block_sizes: Some(sizes) } => {
                if sizes.is_empty() || sizes.contains(&0) {
                    return Err(Error::InvalidParameter(format!("bad pinching partition {sizes:?}")));
                }
            }
            Self::Schur { c } => {
                let sd = c.eigh()?;
                let floor = -UNITAL_TOL * (1.0 + sd.operator_norm());
                if sd.min() < floor {
                    return Err(Error::InvalidParameter(format!(
                        "Schur multiplier is not positive semidefinite (λ_min = {})",
                        sd.min()
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Dimension of `Φ(A)` for an `n × n` input.
    pub fn output_dim(&self, n: usize) -> Result<usize> {
        let mismatch = |context, expected| Error::DimensionMismatch { context, expected, found: n };
        match self {
            Self::Identity => Ok(n),
            Self::Congruence { k } | Self::UnitalCongruence { k } => {
                if k.rows() == n {
                    Ok(k.cols())
                } else {
                    Err(mismatch("congruence map input", k.rows()))
                }
            }
            Self::Averaging { blocks } => {
                if n % blocks == 0 {
                    Ok(n / blocks)
                } else {
                    Err(mismatch("averaging map input", blocks * (n / blocks).max(1)))
                }
            }
            Self::Pinching { block_sizes } => match block_sizes {
                Some(sizes) if sizes.iter().sum::<usize>() != n => {
                    Err(mismatch("pinching partition", sizes.iter().sum()))
                }
                _ => Ok(n),
            },
            Self::Schur { c } => {
                if c.dim() == n {
                    Ok(n)
                } else {
                    Err(mismatch("Schur multiplier", c.dim()))
                }
            }
            Self::Trace { .. } => Ok(1),
        }
    }

    /// Input dimension needed to produce an `n × n` output, when it is
    /// determined by the map alone.
    pub fn input_dim_for_output(&self, n: usize) -> Option<usize> {
        match self {
            Self::Identity | Self::Pinching { block_sizes: None } => Some(n),
            Self::Averaging { blocks } => Some(blocks * n),
            Self::Pinching { block_sizes: Some(sizes) } => {
                (sizes.iter().sum::<usize>() == n).then_some(n)
            }
            Self::Schur { c } => (c.dim() == n).then_some(n),
            Self::Congruence { k } | Self::UnitalCongruence { k } => (k.cols() == n).then_some(k.rows()),
            Self::Trace { .. } => None,
        }
    }

    /// `Φ(I) = I`.
    pub fn is_unital(&self) -> bool {
        match self {
            Self::Identity
            | Self::UnitalCongruence { .. }
            | Self::Averaging { .. }
            | Self::Pinching { .. } => true,
            Self::Congruence { k } => k
                .adjoint()
                .try_mul(k)
                .map(|kk| is_identity(&kk, UNITAL_TOL))
                .unwrap_or(false),
            Self::Schur { c } => (0..c.dim()).all(|i| (c.get(i, i) - C64::new(1.0, 0.0)).norm() <= UNITAL_TOL),
            Self::Trace { normalized } => *normalized,
        }
    }

    pub fn require_unital(&self) -> Result<()> {
        if self.is_unital() {
            Ok(())
        } else {
            Err(Error::NotUnital(self.to_string()))
        }
    }

    pub fn apply(&self, a: &HermitianMatrix) -> Result<HermitianMatrix> {
        let n = a.dim();
        let out = self.output_dim(n)?;
        match self {
            Self::Identity => Ok(a.clone()),
            Self::Congruence { k } | Self::UnitalCongruence { k } => a.congruence(k),
            Self::Averaging { blocks } => {
                let m = a.as_matrix();
                let mut acc = Matrix::zeros(out, out);
                for i in 0..*blocks {
                    acc = &acc + &m.block(i * out, i * out, out, out);
                }
                HermitianMatrix::new(acc.scale(1.0 / *blocks as f64))
            }
            Self::Pinching { block_sizes } => {
                let m = a.as_matrix();
                let mut res = Matrix::zeros(n, n);
                match block_sizes {
                    None => {
                        for i in 0..n {
                            res[(i, i)] = m[(i, i)];
                        }
                    }
                    Some(sizes) => {
                        let mut start = 0;
                        for &s in sizes {
                            res.set_block(start, start, &m.block(start, start, s, s));
                            start += s;
                        }
                    }
                }
                HermitianMatrix::new(res)
            }
            Self::Schur { c } => a.hadamard(c),
            Self::Trace { normalized } => {
                let t = if *normalized { a.trace() / n as f64 } else { a.trace() };
                Ok(HermitianMatrix::from_diag(&[t]))
            }
        }
    }

    /// Parses a CLI map id: `id`, `avg:n`, `pinch`, `pinch:2,1`, `trace`,
    /// `ntrace`, `congr:<file>`, `ucongr:<file>`, `schur:<file>`.
    pub fn parse(spec: &str) -> Result<Self> {
        Self::parse_relative(spec, None::<&Path>)
    }

    /// Like [`parse`](Self::parse), resolving matrix files against `base`.
    pub fn parse_relative(spec: &str, base: Option<impl AsRef<Path>>) -> Result<Self> {
        let spec = spec.trim();
        let (head, arg) = match spec.split_once(':') {
            Some((h, a)) => (h, Some(a.trim())),
            None => (spec, None),
        };
        let file = |a: Option<&str>| -> Result<std::path::PathBuf> {
            let a = a.filter(|s| !s.is_empty()).ok_or_else(|| Error::Parse(format!("`{head}` needs a matrix file")))?;
            Ok(match &base {
                Some(b) => b.as_ref().join(a),
                None => a.into(),
            })
        };
        match (head, arg) {
            ("id" | "identity", None) => Ok(Self::Identity),
            ("avg", None) => Self::averaging(2),
            ("avg", Some(n)) => Self::averaging(
                n.parse()
                    .map_err(|e| Error::Parse(format!("bad block count in `{spec}`: {e}")))?,
            ),
            ("pinch", None) => Ok(Self::pinching()),
            ("pinch", Some(sizes)) => {
                let sizes = sizes
                    .split(',')
                    .map(|s| s.trim().parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| Error::Parse(format!("bad partition in `{spec}`: {e}")))?;
                Self::pinching_blocks(sizes)
            }
            ("trace", None) => Ok(Self::trace(false)),
            ("ntrace", None) => Ok(Self::trace(true)),
            ("congr", a) => Ok(Self::congruence(read_matrix(file(a)?)?)),
            ("ucongr", a) => Self::unital_congruence(read_matrix(file(a)?)?),
            ("schur", a) => Self::schur(read_hermitian(file(a)?)?),
            _ => Err(Error::Parse(format!(
                "unknown map `{spec}` (expected id, avg:n, pinch, trace, ntrace, congr:<file>, ucongr:<file>, schur:<file>)"
            ))),
        }
    }
}

impl fmt::Display for PositiveLinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity => write!(f, "id"),
            Self::Congruence { k } => write!(f, "congr({}x{})", k.rows(), k.cols()),
            Self::UnitalCongruence { k } => write!(f, "ucongr({}x{})", k.rows(), k.cols()),
            Self::Averaging { blocks } => write!(f, "avg:{blocks}"),
            Self::Pinching { block_sizes: None } => write!(f, "pinch"),
            Self::Pinching { block_sizes: Some(s) } => {
                let parts: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                write!(f, "pinch:{}", parts.join(","))
            }
            Self::Schur { c } => write!(f, "schur({})", c.dim()),
            Self::Trace { normalized: false } => write!(f, "trace"),
            Self::Trace { normalized: true } => write!(f, "ntrace"),
        }
    }
}

/// `(A₁, …, A_k) ↦ Ψ(A₁ ⊗ ⋯ ⊗ A_k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultilinearMap {
    arity: usize,
    post: PositiveLinearMap,
}

impl MultilinearMap {
    pub fn new(arity: usize, post: PositiveLinearMap) -> Result<Self> {
        if arity == 0 {
            return Err(Error::InvalidParameter("multilinear map needs arity >= 1".into()));
        }
        post.validate()?;
        Ok(Self { arity, post })
    }

    /// The plain tensor product of `k` slots.
    pub fn tensor(arity: usize) -> Result<Self> {
        Self::new(arity, PositiveLinearMap::Identity)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn post_map(&self) -> &PositiveLinearMap {
        &self.post
    }

    pub fn is_unital(&self) -> bool {
        self.post.is_unital()
    }

    pub fn apply(&self, args: &[HermitianMatrix]) -> Result<HermitianMatrix> {
        multi_apply(self, args)
    }
}

impl fmt::Display for MultilinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tensor{}/{}", self.arity, self.post)
    }
}

pub fn apply(phi: &PositiveLinearMap, a: &HermitianMatrix) -> Result<HermitianMatrix> {
    phi.apply(a)
}

pub fn multi_apply(phi: &MultilinearMap, args: &[HermitianMatrix]) -> Result<HermitianMatrix> {
    if args.len() != phi.arity {
        return Err(Error::DimensionMismatch {
            context: "multilinear map arity",
            expected: phi.arity,
            found: args.len(),
        });
    }
    let n = args[0].dim();
    if let Some(bad) = args.iter().find(|a| a.dim() != n) {
        return Err(Error::DimensionMismatch {
            context: "multilinear map slot",
            expected: n,
            found: bad.dim(),
        });
    }
    let mut acc = args[0].clone();
    for a in &args[1..] {
        acc = acc.kron(a);
    }
    phi.post.apply(&acc)
}

pub fn kron(a: &HermitianMatrix, b: &HermitianMatrix) -> HermitianMatrix {
    a.kron(b)
}

pub fn hadamard(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    a.hadamard(b)
}

/// Randomized check of `Φ(A σ B) ≤ Φ(A) σ Φ(B)`.
pub fn check_mean_monotonicity(
    phi: &PositiveLinearMap,
    sigma: &OperatorMean,
    config: &ProbeConfig,
) -> Result<InequalityReport> {
    let probe = verify::probes::mean_through_map(verify::probes::MapChoice::Fixed(phi.clone()), sigma.clone());
    verify::run_probe(&probe, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a22() -> HermitianMatrix {
        HermitianMatrix::from_real_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap()
    }

    #[test]
    fn identity_map() {
        assert_eq!(apply(&PositiveLinearMap::Identity, &a22()).unwrap(), a22());
    }

    #[test]
    fn averaging_two_blocks() {
        let mut m = Matrix::zeros(4, 4);
        m.set_block(0, 0, &Matrix::from_diag(&[1.0, 1.0]));
        m.set_block(2, 2, &Matrix::from_diag(&[3.0, 3.0]));
        let a = HermitianMatrix::new(m).unwrap();
        let out = PositiveLinearMap::averaging(2).unwrap().apply(&a).unwrap();
        assert_eq!(out, HermitianMatrix::from_diag(&[2.0, 2.0]));
        assert!(PositiveLinearMap::averaging(2).unwrap().apply(&HermitianMatrix::identity(3)).is_err());
    }

    #[test]
    fn permutation_congruence() {
        let k = Matrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let out = PositiveLinearMap::unital_congruence(k).unwrap().apply(&HermitianMatrix::from_diag(&[1.0, 2.0])).unwrap();
        assert_eq!(out, HermitianMatrix::from_diag(&[2.0, 1.0]));
    }

    #[test]
    fn unitality_flags() {
        let k = Matrix::from_real_rows(&[[2.0, 0.0], [0.0, 1.0]]).unwrap();
        assert!(PositiveLinearMap::unital_congruence(k.clone()).is_err());
        assert!(!PositiveLinearMap::congruence(k).is_unital());
        let c = HermitianMatrix::from_real_rows(&[[1.0, 0.5], [0.5, 1.0]]).unwrap();
        assert!(PositiveLinearMap::schur(c).unwrap().is_unital());
        let c2 = HermitianMatrix::from_real_rows(&[[2.0, 0.5], [0.5, 1.0]]).unwrap();
        let s = PositiveLinearMap::schur(c2).unwrap();
        assert!(!s.is_unital());
        assert!(matches!(s.require_unital(), Err(Error::NotUnital(_))));
        let not_psd = HermitianMatrix::from_real_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        assert!(PositiveLinearMap::schur(not_psd).is_err());
        for m in [PositiveLinearMap::pinching(), PositiveLinearMap::averaging(3).unwrap(), PositiveLinearMap::trace(true)] {
            let n = m.input_dim_for_output(2).unwrap_or(4);
            let out = m.apply(&HermitianMatrix::identity(n)).unwrap();
            assert_eq!(out, HermitianMatrix::identity(out.dim()), "{m}");
        }
    }

    #[test]
    fn pinching_blocks_keep_diagonal_blocks() {
        let a = HermitianMatrix::from_real_rows(&[[1.0, 2.0, 3.0], [2.0, 4.0, 5.0], [3.0, 5.0, 6.0]]).unwrap();
        let p = PositiveLinearMap::pinching_blocks(vec![2, 1]).unwrap().apply(&a).unwrap();
        let expected = HermitianMatrix::from_real_rows(&[[1.0, 2.0, 0.0], [2.0, 4.0, 0.0], [0.0, 0.0, 6.0]]).unwrap();
        assert_eq!(p, expected);
        assert!(PositiveLinearMap::pinching_blocks(vec![2, 2]).unwrap().apply(&a).is_err());
    }

    #[test]
    fn multilinear_examples() {
        let a = HermitianMatrix::from_diag(&[2.0, 3.0]);
        let b = HermitianMatrix::from_diag(&[5.0, 7.0]);
        let t = MultilinearMap::tensor(2).unwrap();
        assert_eq!(multi_apply(&t, &[a.clone(), b.clone()]).unwrap(), a.kron(&b));
        let p = MultilinearMap::new(2, PositiveLinearMap::pinching()).unwrap();
        assert_eq!(
            multi_apply(&p, &[a.clone(), b.clone()]).unwrap(),
            HermitianMatrix::from_diag(&[10.0, 14.0, 15.0, 21.0])
        );
        let i = HermitianMatrix::identity(2);
        assert_eq!(multi_apply(&p, &[i.clone(), i.clone()]).unwrap(), HermitianMatrix::identity(4));
        assert!(multi_apply(&t, &[a]).is_err());
    }

    #[test]
    fn kron_and_hadamard_examples() {
        assert_eq!(
            kron(&HermitianMatrix::from_diag(&[1.0, 2.0]), &HermitianMatrix::from_diag(&[3.0, 4.0])),
            HermitianMatrix::from_diag(&[3.0, 4.0, 6.0, 8.0])
        );
        assert_eq!(hadamard(&HermitianMatrix::identity(2), &a22()).unwrap(), HermitianMatrix::from_diag(&[2.0, 2.0]));
        let w = kron(&a22(), &HermitianMatrix::identity(2)).eigenvalues().unwrap();
        for (x, y) in w.iter().zip([1.0, 1.0, 3.0, 3.0]) {
            assert!((x - y).abs() < 1e-13);
        }
        assert!(hadamard(&a22(), &HermitianMatrix::identity(3)).is_err());
    }

    #[test]
    fn parse_ids() {
        assert_eq!(PositiveLinearMap::parse("id").unwrap(), PositiveLinearMap::Identity);
        assert_eq!(PositiveLinearMap::parse("avg:3").unwrap(), PositiveLinearMap::Averaging { blocks: 3 });
        assert_eq!(PositiveLinearMap::parse("pinch").unwrap(), PositiveLinearMap::pinching());
        assert!(PositiveLinearMap::parse("avg:0").is_err());
        assert!(PositiveLinearMap::parse("congr").is_err());
        assert!(PositiveLinearMap::parse("rotate").is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = PositiveLinearMap::pinching_blocks(vec![1, 2]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<PositiveLinearMap>(&s).unwrap(), m);
    }
}
