//! Kubo–Ando operator means, their weighted forms, adjoints and the
//! interpolational paths `m_{r,t}` joining `!_t`, `#_t` and `∇_t`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{powf_exact, HermitianMatrix, SpectralDecomposition};

/// Below this `|r|` the path `m_{r,t}` is evaluated as its `r → 0` limit `#_t`.
pub const PATH_R_EPS: f64 = 1e-4;

/// Parameters `(r, t)` of the interpolational path `m_{r,t}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathParams {
    r: f64,
    t: f64,
}

impl PathParams {
    pub fn new(r: f64, t: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&r) {
            return Err(Error::InvalidParameter(format!("path exponent r={r} outside [-1, 1]")));
        }
        check_weight(t)?;
        Ok(Self { r, t })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn t(&self) -> f64 {
        self.t
    }
}

fn check_weight(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("weight t={t} outside [0, 1]")))
    }
}

type RepFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-supplied mean given by its representing function.
///
/// Only `f(1) = 1` and positivity on a sample grid are checked; operator
/// monotonicity cannot be decided from samples and is the caller's promise.
#[derive(Clone)]
pub struct CustomMean {
    name: String,
    f: RepFn,
}

impl CustomMean {
    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for CustomMean {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomMean").field("name", &self.name).finish()
    }
}

/// An operator mean `σ`.
#[derive(Clone, Debug)]
pub enum OperatorMean {
    /// `∇_t`: `(1 − t)A + tB`.
    Arithmetic { t: f64 },
    /// `#_t`: `A^{1/2}(A^{-1/2}BA^{-1/2})^t A^{1/2}`.
    Geometric { t: f64 },
    /// `!_t`: `((1 − t)A^{-1} + tB^{-1})^{-1}`.
    Harmonic { t: f64 },
    /// `m_{r,t}`.
    Path(PathParams),
    Custom(CustomMean),
    /// `σ*`: `(A^{-1} σ B^{-1})^{-1}`.
    Adjoint(Box<OperatorMean>),
}

impl PartialEq for OperatorMean {
    fn eq(&self, other: &Self) -> bool {
        use OperatorMean::*;
        match (self, other) {
            (Arithmetic { t: a }, Arithmetic { t: b })
            | (Geometric { t: a }, Geometric { t: b })
            | (Harmonic { t: a }, Harmonic { t: b }) => a == b,
            (Path(a), Path(b)) => a == b,
            (Custom(a), Custom(b)) => a.name == b.name && Arc::ptr_eq(&a.f, &b.f),
            (Adjoint(a), Adjoint(b)) => a == b,
            _ => false,
        }
    }
}

impl OperatorMean {
    pub fn arithmetic() -> Self {
        Self::Arithmetic { t: 0.5 }
    }

    pub fn geometric() -> Self {
        Self::Geometric { t: 0.5 }
    }

    pub fn harmonic() -> Self {
        Self::Harmonic { t: 0.5 }
    }

    pub fn weighted_arithmetic(t: f64) -> Result<Self> {
        check_weight(t)?;
        Ok(Self::Arithmetic { t })
    }

    pub fn weighted_geometric(t: f64) -> Result<Self> {
        check_weight(t)?;
        Ok(Self::Geometric { t })
    }

    pub fn weighted_harmonic(t: f64) -> Result<Self> {
        check_weight(t)?;
        Ok(Self::Harmonic { t })
    }

    pub fn path(r: f64, t: f64) -> Result<Self> {
        Ok(Self::Path(PathParams::new(r, t)?))
    }

    /// A mean from an arbitrary representing function.
    pub fn custom(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let name = name.into();
        let one = f(1.0);
        if (one - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "representing function of `{name}` has f(1) = {one}, expected 1"
            )));
        }
        for k in -60..=60 {
            let x = 10f64.powf(k as f64 / 10.0);
            let y = f(x);
            if !(y > 0.0 && y.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "representing function of `{name}` is not positive at {x}: {y}"
                )));
            }
        }
        Ok(Self::Custom(CustomMean { name, f: Arc::new(f) }))
    }

    /// The weight `t`, when the mean carries one.
    pub fn weight(&self) -> Option<f64> {
        match self {
            Self::Arithmetic { t } | Self::Geometric { t } | Self::Harmonic { t } => Some(*t),
            Self::Path(p) => Some(p.t),
            Self::Custom(_) => None,
            Self::Adjoint(inner) => inner.weight(),
        }
    }

    /// The representing function `f` with `A σ B = A^{1/2} f(A^{-1/2}BA^{-1/2}) A^{1/2}`.
    pub fn representing_function(&self) -> Box<dyn Fn(f64) -> f64 + Send + Sync> {
        match self.clone() {
            Self::Arithmetic { t } => Box::new(move |x| (1.0 - t) + t * x),
            Self::Geometric { t } => Box::new(move |x| powf_exact(x, t)),
            Self::Harmonic { t } => Box::new(move |x| 1.0 / ((1.0 - t) + t / x)),
            Self::Path(p) => Box::new(move |x| path_scalar(p, x)),
            Self::Custom(c) => Box::new(move |x| (c.f)(x)),
            Self::Adjoint(inner) => {
                let f = inner.representing_function();
                Box::new(move |x| 1.0 / f(1.0 / x))
            }
        }
    }

    /// Evaluates `A σ B` for positive definite `A`, `B`.
    pub fn apply(&self, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
        mean(self, a, b)
    }
}

fn path_scalar(p: PathParams, x: f64) -> f64 {
    if p.r.abs() < PATH_R_EPS {
        powf_exact(x, p.t)
    } else {
        powf_exact((1.0 - p.t) + p.t * powf_exact(x, p.r), 1.0 / p.r)
    }
}

/// The adjoint mean `σ*`; arithmetic and harmonic swap, geometric is fixed
/// and `m_{r,t}* = m_{-r,t}`.
pub fn adjoint_mean(sigma: &OperatorMean) -> OperatorMean {
    match sigma {
        OperatorMean::Arithmetic { t } => OperatorMean::Harmonic { t: *t },
        OperatorMean::Harmonic { t } => OperatorMean::Arithmetic { t: *t },
        OperatorMean::Geometric { t } => OperatorMean::Geometric { t: *t },
        OperatorMean::Path(p) => OperatorMean::Path(PathParams { r: -p.r, t: p.t }),
        OperatorMean::Custom(_) => OperatorMean::Adjoint(Box::new(sigma.clone())),
        OperatorMean::Adjoint(inner) => (**inner).clone(),
    }
}

fn same_dim(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<()> {
    if a.dim() == b.dim() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context: "operator mean",
            expected: a.dim(),
            found: b.dim(),
        })
    }
}

/// Shared `A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}` kernel. `f` acts on the
/// spectrum of the congruence `C = A^{-1/2} B A^{-1/2}`, which is positive
/// definite exactly when `B` is.
fn kubo_ando(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    f: impl Fn(f64) -> f64,
) -> Result<HermitianMatrix> {
    same_dim(a, b)?;
    let sd_a = a.require_positive_definite()?;
    let a_half = sd_a.map(f64::sqrt);
    let a_neg_half = sd_a.map(|l| 1.0 / l.sqrt());
    let c = b.sandwich(&a_neg_half)?;
    let sd_c = c.require_positive_definite()?;
    sd_c.map(f).sandwich(&a_half)
}

fn inverse_pd(a: &HermitianMatrix) -> Result<(SpectralDecomposition, HermitianMatrix)> {
    let sd = a.require_positive_definite()?;
    let inv = sd.map(|l| 1.0 / l);
    Ok((sd, inv))
}

/// `A ∇_t B = (1 − t)A + tB`.
pub fn weighted_arithmetic(a: &HermitianMatrix, b: &HermitianMatrix, t: f64) -> Result<HermitianMatrix> {
    check_weight(t)?;
    same_dim(a, b)?;
    a.require_positive_definite()?;
    b.require_positive_definite()?;
    if t == 0.0 {
        return Ok(a.clone());
    }
    if t == 1.0 {
        return Ok(b.clone());
    }
    a.lerp(b, t)
}

/// `A !_t B = ((1 − t)A^{-1} + tB^{-1})^{-1}`.
pub fn weighted_harmonic(a: &HermitianMatrix, b: &HermitianMatrix, t: f64) -> Result<HermitianMatrix> {
    check_weight(t)?;
    same_dim(a, b)?;
    let (_, a_inv) = inverse_pd(a)?;
    let (_, b_inv) = inverse_pd(b)?;
    if t == 0.0 {
        return Ok(a.clone());
    }
    if t == 1.0 {
        return Ok(b.clone());
    }
    a_inv.lerp(&b_inv, t)?.inverse()
}

/// `A #_t B = A^{1/2}(A^{-1/2}BA^{-1/2})^t A^{1/2}`.
pub fn weighted_geometric(a: &HermitianMatrix, b: &HermitianMatrix, t: f64) -> Result<HermitianMatrix> {
    check_weight(t)?;
    if t == 0.0 || t == 1.0 {
        same_dim(a, b)?;
        a.require_positive_definite()?;
        b.require_positive_definite()?;
        return Ok(if t == 0.0 { a.clone() } else { b.clone() });
    }
    kubo_ando(a, b, |x| powf_exact(x, t))
}

/// `A m_{r,t} B = A^{1/2}((1 − t)I + t(A^{-1/2}BA^{-1/2})^r)^{1/r}A^{1/2}`.
///
/// `r = ±1` dispatch to `∇_t` / `!_t`; `|r| < PATH_R_EPS` to `#_t`.
pub fn interpolational_path(a: &HermitianMatrix, b: &HermitianMatrix, params: PathParams) -> Result<HermitianMatrix> {
    let PathParams { r, t } = params;
    if r == 1.0 {
        return weighted_arithmetic(a, b, t);
    }
    if r == -1.0 {
        return weighted_harmonic(a, b, t);
    }
    if r.abs() < PATH_R_EPS {
        return weighted_geometric(a, b, t);
    }
    if t == 0.0 || t == 1.0 {
        return weighted_geometric(a, b, t);
    }
    kubo_ando(a, b, |x| path_scalar(params, x))
}

/// `A σ B` for positive definite `A`, `B`.
pub fn mean(sigma: &OperatorMean, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    match sigma {
        OperatorMean::Arithmetic { t } => weighted_arithmetic(a, b, *t),
        OperatorMean::Geometric { t } => weighted_geometric(a, b, *t),
        OperatorMean::Harmonic { t } => weighted_harmonic(a, b, *t),
        OperatorMean::Path(p) => interpolational_path(a, b, *p),
        OperatorMean::Custom(c) => kubo_ando(a, b, |x| (c.f)(x)),
        OperatorMean::Adjoint(inner) => {
            let (_, a_inv) = inverse_pd(a)?;
            let (_, b_inv) = inverse_pd(b)?;
            mean(inner, &a_inv, &b_inv)?.inverse()
        }
    }
}

impl fmt::Display for OperatorMean {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Arithmetic { t } => write!(f, "arith:{t}"),
            Self::Geometric { t } => write!(f, "geo:{t}"),
            Self::Harmonic { t } => write!(f, "harm:{t}"),
            Self::Path(p) => write!(f, "path:{}:{}", p.r, p.t),
            Self::Custom(c) => write!(f, "custom:{}", c.name),
            Self::Adjoint(inner) => write!(f, "adjoint:{inner}"),
        }
    }
}

/// Parses `arith:t`, `geo:t`, `harm:t`, `path:r:t` and `adjoint:<mean>`;
/// a missing weight means `t = 1/2`.
impl FromStr for OperatorMean {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix("adjoint:") {
            return Ok(adjoint_mean(&inner.parse()?));
        }
        let parts: Vec<&str> = s.split(':').collect();
        let num = |x: &str| -> Result<f64> {
            x.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad number `{x}` in mean `{s}`: {e}")))
        };
        let weight = |rest: &[&str]| -> Result<f64> {
            match rest {
                [] => Ok(0.5),
                [t] => num(t),
                _ => Err(Error::Parse(format!("too many parameters in mean `{s}`"))),
            }
        };
        match parts.as_slice() {
            ["arith" | "arithmetic", rest @ ..] => Self::weighted_arithmetic(weight(rest)?),
            ["geo" | "geometric", rest @ ..] => Self::weighted_geometric(weight(rest)?),
            ["harm" | "harmonic", rest @ ..] => Self::weighted_harmonic(weight(rest)?),
            ["path", r, t] => Self::path(num(r)?, num(t)?),
            _ => Err(Error::Parse(format!(
                "unknown mean `{s}` (expected arith:t, geo:t, harm:t or path:r:t)"
            ))),
        }
    }
}

impl Serialize for OperatorMean {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for OperatorMean {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: &[f64]) -> HermitianMatrix {
        HermitianMatrix::from_diag(d)
    }

    fn close(a: &HermitianMatrix, b: &HermitianMatrix, tol: f64) -> bool {
        a.max_abs_diff(b).unwrap() <= tol
    }

    fn a22() -> HermitianMatrix {
        HermitianMatrix::from_real_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap()
    }

    #[test]
    fn geometric_commuting_case() {
        let g = mean(&OperatorMean::geometric(), &diag(&[1.0, 4.0]), &diag(&[4.0, 1.0])).unwrap();
        assert!(close(&g, &diag(&[2.0, 2.0]), 1e-14));
    }

    #[test]
    fn geometric_with_identity_is_square_root() {
        let g = mean(&OperatorMean::geometric(), &a22(), &HermitianMatrix::identity(2)).unwrap();
        assert!(close(&g, &a22().sqrt().unwrap(), 1e-14));
    }

    #[test]
    fn arithmetic_is_average() {
        let b = diag(&[3.0, 5.0]);
        let m = mean(&OperatorMean::arithmetic(), &a22(), &b).unwrap();
        assert!(close(&m, &(&a22() + &b).scale(0.5), 0.0));
    }

    #[test]
    fn weighted_examples() {
        let m = weighted_arithmetic(&diag(&[1.0, 3.0]), &diag(&[3.0, 1.0]), 0.5).unwrap();
        assert!(close(&m, &diag(&[2.0, 2.0]), 0.0));
        let h = weighted_harmonic(&diag(&[1.0, 1.0]), &diag(&[3.0, 3.0]), 0.5).unwrap();
        assert!(close(&h, &diag(&[1.5, 1.5]), 1e-14));
        for t in [0.0, 0.3, 1.0] {
            assert!(close(&weighted_geometric(&a22(), &a22(), t).unwrap(), &a22(), 1e-13));
        }
    }

    #[test]
    fn endpoints_are_exact() {
        let b = diag(&[3.0, 0.5]);
        for sigma in [
            OperatorMean::weighted_arithmetic(0.0).unwrap(),
            OperatorMean::weighted_geometric(0.0).unwrap(),
            OperatorMean::weighted_harmonic(0.0).unwrap(),
        ] {
            assert_eq!(mean(&sigma, &a22(), &b).unwrap(), a22());
        }
        assert_eq!(weighted_harmonic(&a22(), &b, 1.0).unwrap(), b);
    }

    #[test]
    fn path_examples() {
        let p = interpolational_path(&diag(&[1.0, 1.0]), &diag(&[9.0, 9.0]), PathParams::new(0.5, 0.5).unwrap()).unwrap();
        assert!(close(&p, &diag(&[4.0, 4.0]), 1e-13));
        let b = diag(&[3.0, 0.5]);
        let p1 = interpolational_path(&a22(), &b, PathParams::new(1.0, 0.3).unwrap()).unwrap();
        assert!(close(&p1, &a22().lerp(&b, 0.3).unwrap(), 0.0));
        let same = interpolational_path(&a22(), &a22(), PathParams::new(-0.4, 0.7).unwrap()).unwrap();
        assert!(close(&same, &a22(), 1e-13));
    }

    #[test]
    fn path_near_zero_uses_geometric_limit() {
        let b = diag(&[3.0, 0.5]);
        let near = interpolational_path(&a22(), &b, PathParams::new(5e-5, 0.4).unwrap()).unwrap();
        let geo = weighted_geometric(&a22(), &b, 0.4).unwrap();
        assert_eq!(near, geo);
        // Just outside the cutoff the formula is still within O(r) of the limit.
        let outside = interpolational_path(&a22(), &b, PathParams::new(2e-4, 0.4).unwrap()).unwrap();
        assert!(close(&outside, &geo, 1e-3));
    }

    #[test]
    fn parameter_ranges() {
        assert!(PathParams::new(1.5, 0.5).is_err());
        assert!(PathParams::new(0.5, -0.1).is_err());
        assert!(weighted_arithmetic(&a22(), &a22(), 1.1).is_err());
        assert!(OperatorMean::weighted_geometric(2.0).is_err());
    }

    #[test]
    fn non_positive_input_rejected() {
        let bad = diag(&[1.0, -1.0]);
        assert!(matches!(
            mean(&OperatorMean::geometric(), &bad, &a22()),
            Err(Error::NotPositiveDefinite { .. })
        ));
        assert!(mean(&OperatorMean::harmonic(), &a22(), &bad).is_err());
        assert!(mean(&OperatorMean::geometric(), &a22(), &bad).is_err());
    }

    #[test]
    fn adjoint_structure() {
        assert_eq!(adjoint_mean(&OperatorMean::arithmetic()), OperatorMean::harmonic());
        assert_eq!(adjoint_mean(&OperatorMean::geometric()), OperatorMean::geometric());
        let h = OperatorMean::weighted_harmonic(0.3).unwrap();
        assert_eq!(adjoint_mean(&adjoint_mean(&h)), h);
        let p = OperatorMean::path(0.25, 0.6).unwrap();
        assert_eq!(adjoint_mean(&p), OperatorMean::path(-0.25, 0.6).unwrap());
    }

    #[test]
    fn adjoint_of_arithmetic_evaluates_to_harmonic() {
        let star = OperatorMean::Adjoint(Box::new(OperatorMean::arithmetic()));
        let v = mean(&star, &diag(&[1.0, 1.0]), &diag(&[3.0, 3.0])).unwrap();
        assert!(close(&v, &diag(&[1.5, 1.5]), 1e-14));
    }

    #[test]
    fn custom_mean_checks_normalization() {
        assert!(OperatorMean::custom("twice", |x| 2.0 * x).is_err());
        assert!(OperatorMean::custom("neg", |x| 1.0 - (x - 1.0) * 10.0).is_err());
        let log_mean = OperatorMean::custom("logarithmic", |x: f64| {
            if (x - 1.0).abs() < 1e-12 { 1.0 } else { (x - 1.0) / x.ln() }
        })
        .unwrap();
        let v = mean(&log_mean, &diag(&[1.0, 2.0]), &diag(&[1.0, 2.0])).unwrap();
        assert!(close(&v, &diag(&[1.0, 2.0]), 1e-12));
        // Custom adjoint round-trips structurally.
        assert_eq!(adjoint_mean(&adjoint_mean(&log_mean)), log_mean);
    }

    #[test]
    fn representing_functions_are_normalized() {
        for s in ["arith:0.3", "geo:0.7", "harm:0.2", "path:0.5:0.4", "path:-0.7:0.9", "adjoint:path:0.3:0.5"] {
            let sigma: OperatorMean = s.parse().unwrap();
            assert!((sigma.representing_function()(1.0) - 1.0).abs() < 1e-15, "{s}");
        }
    }

    #[test]
    fn parse_ids() {
        assert_eq!("geo:0.5".parse::<OperatorMean>().unwrap(), OperatorMean::geometric());
        assert_eq!("harm".parse::<OperatorMean>().unwrap(), OperatorMean::harmonic());
        assert_eq!("adjoint:arith:0.2".parse::<OperatorMean>().unwrap(), OperatorMean::Harmonic { t: 0.2 });
        assert!("path:0.5".parse::<OperatorMean>().is_err());
        assert!("median:0.5".parse::<OperatorMean>().is_err());
        let p: OperatorMean = "path:-0.5:0.25".parse().unwrap();
        assert_eq!(p.to_string().parse::<OperatorMean>().unwrap(), p);
    }
}
