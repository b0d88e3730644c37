//! Composite operator and trace functionals built from scalar functions,
//! positive maps and operator means, plus the operator-valued determinant.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::maps::PositiveLinearMap;
use crate::matcore::{read_matrix, HermitianMatrix, Matrix, MatrixLiteral, ScalarFunction, C64};
use crate::means::{mean, OperatorMean};

/// Traces whose imaginary part is at most this fraction of `max(1, |Re|)`
/// are accepted as real.
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;

/// Data for `F₁`, `F₂`, `F₃`: scalar functions `f, g, h`, maps `Φ, Ψ`, a mean
/// `σ`, and an optional fixed matrix `K` with exponent `p` for the Lieb form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionalSpec {
    pub f: ScalarFunction,
    pub g: ScalarFunction,
    pub h: ScalarFunction,
    pub phi: PositiveLinearMap,
    pub psi: PositiveLinearMap,
    pub sigma: OperatorMean,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<Matrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

impl Default for FunctionalSpec {
    fn default() -> Self {
        Self {
            f: ScalarFunction::Identity,
            g: ScalarFunction::Identity,
            h: ScalarFunction::Identity,
            phi: PositiveLinearMap::Identity,
            psi: PositiveLinearMap::Identity,
            sigma: OperatorMean::geometric(),
            k: None,
            p: None,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    f: Option<ScalarFunction>,
    g: Option<ScalarFunction>,
    h: Option<ScalarFunction>,
    phi: Option<Value>,
    psi: Option<Value>,
    sigma: Option<OperatorMean>,
    #[serde(rename = "K")]
    k: Option<Value>,
    p: Option<f64>,
}

fn map_from_value(v: Value, base: Option<&Path>) -> Result<PositiveLinearMap> {
    match v {
        Value::String(s) => PositiveLinearMap::parse_relative(&s, base),
        other => {
            let m: PositiveLinearMap = serde_json::from_value(other)?;
            m.validate()?;
            Ok(m)
        }
    }
}

fn matrix_from_value(v: Value, base: Option<&Path>) -> Result<Matrix> {
    match v {
        Value::String(s) => read_matrix(match base {
            Some(b) => b.join(&s),
            None => s.into(),
        }),
        other => serde_json::from_value::<MatrixLiteral>(other)?.to_matrix(),
    }
}

impl FunctionalSpec {
    /// Parses the JSON form. Map entries may be ids (`"avg:2"`) or tagged
    /// objects; `K` may be a matrix literal or a path, resolved against `base`.
    pub fn from_json(json: &str, base: Option<&Path>) -> Result<Self> {
        let raw: RawSpec = serde_json::from_str(json)?;
        let d = Self::default();
        Ok(Self {
            f: raw.f.unwrap_or(d.f),
            g: raw.g.unwrap_or(d.g),
            h: raw.h.unwrap_or(d.h),
            phi: raw.phi.map(|v| map_from_value(v, base)).transpose()?.unwrap_or(d.phi),
            psi: raw.psi.map(|v| map_from_value(v, base)).transpose()?.unwrap_or(d.psi),
            sigma: raw.sigma.unwrap_or(d.sigma),
            k: raw.k.map(|v| matrix_from_value(v, base)).transpose()?,
            p: raw.p,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text, path.parent())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// `F₁(A, B) = h[Φ(f(A))^{1/2} Ψ(g(B)) Φ(f(A))^{1/2}]`.
pub fn f1(spec: &FunctionalSpec, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    let x = spec.phi.apply(&a.apply(&spec.f)?)?;
    let x_half = x.require_positive_definite()?.map(f64::sqrt);
    let y = spec.psi.apply(&b.apply(&spec.g)?)?;
    y.sandwich(&x_half)?.apply(&spec.h)
}

/// `F₂(A, B) = h[Φ(f(A)) σ Ψ(g(B))]`.
pub fn f2(spec: &FunctionalSpec, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    let x = spec.phi.apply(&a.apply(&spec.f)?)?;
    let y = spec.psi.apply(&b.apply(&spec.g)?)?;
    mean(&spec.sigma, &x, &y)?.apply(&spec.h)
}

/// `F₃(A) = h[Φ(f(A))]`.
pub fn f3(spec: &FunctionalSpec, a: &HermitianMatrix) -> Result<HermitianMatrix> {
    spec.phi.apply(&a.apply(&spec.f)?)?.apply(&spec.h)
}

/// `Tr F₂(A, B)`.
pub fn trace_f2(spec: &FunctionalSpec, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    Ok(f2(spec, a, b)?.trace())
}

/// Which exponent the `B` slot of [`lieb_trace`] carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiebMode {
    /// `Ψ(f₂(B))^{1−p}`, `p ∈ [0, 1]`.
    Concave,
    /// `Ψ(f₂(B))^{−1−p}`, `p ∈ [−1, 0]`.
    Convex,
}

impl LiebMode {
    pub fn b_exponent(self, p: f64) -> f64 {
        match self {
            LiebMode::Concave => 1.0 - p,
            LiebMode::Convex => -1.0 - p,
        }
    }
}

/// Real part of a trace after checking that the imaginary part is noise.
pub fn real_trace(z: C64) -> Result<f64> {
    let allowed = IMAG_RESIDUE_TOL * z.re.abs().max(1.0);
    if z.im.abs() > allowed {
        return Err(Error::ImaginaryResidue { re: z.re, im: z.im });
    }
    if z.im != 0.0 {
        log::debug!("discarding imaginary trace residue {:e}", z.im);
    }
    Ok(z.re)
}

/// `Tr(X K* Y K)` for Hermitian `X`, `Y`.
pub fn trace_congruence_product(x: &HermitianMatrix, k: &Matrix, y: &HermitianMatrix) -> Result<f64> {
    let xk = x.as_matrix().try_mul(&k.adjoint())?;
    let yk = y.as_matrix().try_mul(k)?;
    if xk.rows() != yk.cols() || xk.cols() != yk.rows() {
        return Err(Error::DimensionMismatch {
            context: "trace of congruence product",
            expected: xk.rows(),
            found: yk.cols(),
        });
    }
    let n = xk.rows();
    let m = xk.cols();
    let mut z = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..m {
            z += xk[(i, j)] * yk[(j, i)];
        }
    }
    real_trace(z)
}

/// `Tr{Φ(f₁(A))^p K* Ψ(f₂(B))^q K}` with `q = 1 − p` or `q = −1 − p`.
#[allow(clippy::too_many_arguments)]
pub fn lieb_trace(
    phi: &PositiveLinearMap,
    psi: &PositiveLinearMap,
    f1: &ScalarFunction,
    f2: &ScalarFunction,
    k: &Matrix,
    p: f64,
    mode: LiebMode,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
) -> Result<f64> {
    let range_ok = match mode {
        LiebMode::Concave => (0.0..=1.0).contains(&p),
        LiebMode::Convex => (-1.0..=0.0).contains(&p),
    };
    if !range_ok {
        return Err(Error::InvalidParameter(format!("exponent p={p} outside the range of {mode:?} mode")));
    }
    let x = phi.apply(&a.apply(f1)?)?.pow(p)?;
    let y = psi.apply(&b.apply(f2)?)?.pow(mode.b_exponent(p))?;
    trace_congruence_product(&x, k, &y)
}

/// `Tr[Φ(A^p)^{1/p}]` for a unital `Φ`.
pub fn trace_minkowski_power(phi: &PositiveLinearMap, a: &HermitianMatrix, p: f64) -> Result<f64> {
    Ok(map_power_root(phi, a, p)?.trace())
}

/// `Φ(A^p)^{1/p}` for a unital `Φ`.
pub fn map_power_root(phi: &PositiveLinearMap, a: &HermitianMatrix, p: f64) -> Result<HermitianMatrix> {
    if p == 0.0 {
        return Err(Error::InvalidParameter("power p must be non-zero".into()));
    }
    phi.require_unital()?;
    let ap = a.require_positive_definite()?.apply(&ScalarFunction::Power(p))?;
    phi.apply(&ap)?.pow(1.0 / p)
}

/// `(A₁^p + ⋯ + A_n^p)^{1/p}`.
pub fn power_sum_root(mats: &[HermitianMatrix], p: f64) -> Result<HermitianMatrix> {
    if p == 0.0 {
        return Err(Error::InvalidParameter("power p must be non-zero".into()));
    }
    let (first, rest) = mats
        .split_first()
        .ok_or_else(|| Error::InvalidParameter("empty matrix list".into()))?;
    // Integer powers are defined on the whole positive semidefinite cone.
    let power = |m: &HermitianMatrix| {
        if p > 0.0 && p.fract() == 0.0 {
            m.apply(&ScalarFunction::Power(p))
        } else {
            m.require_positive_definite()?.apply(&ScalarFunction::Power(p))
        }
    };
    let mut acc = power(first)?;
    for m in rest {
        acc = acc.try_add(&power(m)?)?;
    }
    acc.pow(1.0 / p)
}

/// `Δ_Φ(A) = exp Φ(log A)` for a unital `Φ`.
pub fn op_determinant(phi: &PositiveLinearMap, a: &HermitianMatrix) -> Result<HermitianMatrix> {
    phi.require_unital()?;
    let log_a = a.require_positive_definite()?.apply(&ScalarFunction::Log)?;
    phi.apply(&log_a)?.exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a22() -> HermitianMatrix {
        HermitianMatrix::from_real_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap()
    }

    fn b22() -> HermitianMatrix {
        HermitianMatrix::from_real_rows(&[[3.0, -1.0], [-1.0, 1.5]]).unwrap()
    }

    fn close(a: &HermitianMatrix, b: &HermitianMatrix, tol: f64) -> bool {
        a.max_abs_diff(b).unwrap() <= tol
    }

    fn block_diag(a: &HermitianMatrix, b: &HermitianMatrix) -> HermitianMatrix {
        let n = a.dim();
        let mut m = Matrix::zeros(2 * n, 2 * n);
        m.set_block(0, 0, a.as_matrix());
        m.set_block(n, n, b.as_matrix());
        HermitianMatrix::new(m).unwrap()
    }

    #[test]
    fn f1_with_identity_first_slot() {
        let spec = FunctionalSpec::default();
        assert!(close(&f1(&spec, &HermitianMatrix::identity(2), &b22()).unwrap(), &b22(), 1e-14));
        let i = HermitianMatrix::identity(2);
        assert!(close(&f1(&spec, &i, &i).unwrap(), &i, 1e-15));
    }

    #[test]
    fn f2_arithmetic_is_average() {
        let spec = FunctionalSpec { sigma: OperatorMean::arithmetic(), ..Default::default() };
        assert!(close(&f2(&spec, &a22(), &b22()).unwrap(), &(&a22() + &b22()).scale(0.5), 1e-15));
        let t = trace_f2(&spec, &a22(), &b22()).unwrap();
        assert!((t - 0.5 * (4.0 + 4.5)).abs() < 1e-14);
    }

    #[test]
    fn f3_examples() {
        let spec = FunctionalSpec::default();
        assert_eq!(f3(&spec, &a22()).unwrap(), a22());
        let p = 0.5;
        let spec = FunctionalSpec {
            f: ScalarFunction::Power(p),
            h: ScalarFunction::Power(-1.0 / p),
            phi: PositiveLinearMap::averaging(2).unwrap(),
            ..Default::default()
        };
        assert!(close(&f3(&spec, &HermitianMatrix::identity(4)).unwrap(), &HermitianMatrix::identity(2), 1e-15));
        // diag(1,4) split into two 1x1 blocks: ((1 + 2)/2)^{-2} = 4/9
        let v = f3(&spec, &HermitianMatrix::from_diag(&[1.0, 4.0])).unwrap();
        assert!((v.get(0, 0).re - 4.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn f1_lieb_kernel_matches_lieb_trace() {
        let p = 0.3;
        let k = Matrix::from_parts(&[[1.0, 0.5], [-0.2, 0.7]], Some(&[[0.0, 0.3], [0.1, -0.4]])).unwrap();
        let spec = FunctionalSpec {
            f: ScalarFunction::Power(1.0 - p),
            g: ScalarFunction::Power(p),
            psi: PositiveLinearMap::congruence(k.adjoint()),
            ..Default::default()
        };
        // Tr F₁ = Tr B^{(1-p)/2} K A^p K* B^{(1-p)/2} = Tr K* B^{1-p} K A^p
        let via_f1 = f1(&spec, &b22(), &a22()).unwrap().trace();
        let direct = lieb_trace(
            &PositiveLinearMap::Identity,
            &PositiveLinearMap::Identity,
            &ScalarFunction::Identity,
            &ScalarFunction::Identity,
            &k,
            p,
            LiebMode::Concave,
            &a22(),
            &b22(),
        )
        .unwrap();
        assert!((via_f1 - direct).abs() < 1e-12, "{via_f1} vs {direct}");
    }

    #[test]
    fn lieb_trace_examples() {
        let id = PositiveLinearMap::Identity;
        let f = ScalarFunction::Identity;
        let a = HermitianMatrix::from_diag(&[4.0, 9.0]);
        let v = lieb_trace(&id, &id, &f, &f, &Matrix::identity(2), 0.5, LiebMode::Concave, &a, &a).unwrap();
        assert!((v - 13.0).abs() < 1e-13);
        let k = Matrix::from_real_rows(&[[1.0, 2.0], [0.0, 1.0]]).unwrap();
        let v0 = lieb_trace(&id, &id, &f, &f, &k, 0.0, LiebMode::Concave, &a22(), &b22()).unwrap();
        assert!((v0 - b22().congruence(&k).unwrap().trace()).abs() < 1e-13);
        assert!(lieb_trace(&id, &id, &f, &f, &k, 0.5, LiebMode::Convex, &a22(), &b22()).is_err());
    }

    #[test]
    fn imaginary_residue_guard() {
        assert_eq!(real_trace(C64::new(5.0, 1e-12)).unwrap(), 5.0);
        assert!(matches!(real_trace(C64::new(5.0, 1e-6)), Err(Error::ImaginaryResidue { .. })));
    }

    #[test]
    fn trace_minkowski_examples() {
        let id = PositiveLinearMap::Identity;
        for p in [-1.0, 0.5, 2.0] {
            assert!((trace_minkowski_power(&id, &a22(), p).unwrap() - 4.0).abs() < 1e-13);
        }
        let avg = PositiveLinearMap::averaging(2).unwrap();
        let a = block_diag(&HermitianMatrix::identity(2), &HermitianMatrix::scalar(2, 4.0));
        let v = trace_minkowski_power(&avg, &a, 2.0).unwrap();
        assert!((v - 2.0 * 8.5f64.sqrt()).abs() < 1e-13);
        let w = trace_minkowski_power(&avg, &a, 1.0).unwrap();
        assert!((w - avg.apply(&a).unwrap().trace()).abs() < 1e-14);
        assert!(trace_minkowski_power(&id, &a22(), 0.0).is_err());
    }

    #[test]
    fn determinant_examples() {
        let id = PositiveLinearMap::Identity;
        assert!(close(&op_determinant(&id, &a22()).unwrap(), &a22(), 1e-13));
        let c = HermitianMatrix::scalar(3, 2.5);
        assert!(close(&op_determinant(&PositiveLinearMap::pinching(), &c).unwrap(), &c, 1e-14));
        // log [[2,1],[1,2]] has diagonal (ln 1 + ln 3)/2 = ln(3)/2
        let d = op_determinant(&PositiveLinearMap::pinching(), &a22()).unwrap();
        let s3 = 3f64.sqrt();
        assert!(close(&d, &HermitianMatrix::from_diag(&[s3, s3]), 1e-13));
        let k = Matrix::from_real_rows(&[[2.0, 0.0], [0.0, 1.0]]).unwrap();
        assert!(matches!(
            op_determinant(&PositiveLinearMap::congruence(k), &a22()),
            Err(Error::NotUnital(_))
        ));
    }

    #[test]
    fn power_sum_root_at_one_is_sum() {
        let s = power_sum_root(&[a22(), b22()], 1.0).unwrap();
        assert!(close(&s, &(&a22() + &b22()), 1e-13));
    }

    #[test]
    fn spec_json() {
        let s = FunctionalSpec::from_json(
            r#"{"f":"power:0.5","g":"power:0.5","h":"id","phi":"avg:2","psi":"id","sigma":"geo:0.5"}"#,
            None,
        )
        .unwrap();
        assert_eq!(s.f, ScalarFunction::Power(0.5));
        assert_eq!(s.phi, PositiveLinearMap::Averaging { blocks: 2 });
        let back = FunctionalSpec::from_json(&s.to_json().unwrap(), None).unwrap();
        assert_eq!(back, s);
        let with_k = FunctionalSpec::from_json(r#"{"K":{"dim":2,"re":[[1,0],[0,2]]},"p":0.5}"#, None).unwrap();
        assert_eq!(with_k.k.unwrap(), Matrix::from_diag(&[1.0, 2.0]));
        assert!(FunctionalSpec::from_json(r#"{"f":"cosh"}"#, None).is_err());
        assert!(FunctionalSpec::from_json(r#"{"q":1}"#, None).is_err());
    }

    #[test]
    fn domain_errors_name_the_eigenvalue() {
        let spec = FunctionalSpec { f: ScalarFunction::Log, ..Default::default() };
        let bad = HermitianMatrix::from_diag(&[1.0, -2.0]);
        match f3(&spec, &bad) {
            Err(Error::Domain { eigenvalue, .. }) => assert_eq!(eigenvalue, -2.0),
            other => panic!("unexpected {other:?}"),
        }
    }
}
