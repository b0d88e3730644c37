//! Probe builders: generic joint-convexity checks and the concrete operator
//! and trace inequalities exercised by the registry.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{run_probe, InequalityReport, Margin, Probe, ProbeConfig, Sample, Sampler};
use crate::constants::{kantorovich, specht};
use crate::error::{Error, Result};
use crate::functionals::{f2, lieb_trace, power_sum_root, real_trace, trace_congruence_product, FunctionalSpec, LiebMode};
use crate::maps::{MultilinearMap, PositiveLinearMap};
use crate::matcore::{HermitianMatrix, ScalarFunction};
use crate::means::{weighted_arithmetic, weighted_geometric, weighted_harmonic, OperatorMean};

type H = HermitianMatrix;

// ---------------------------------------------------------------------------
// Maps

/// How a probe obtains its positive linear map for an `n × n` output.
#[derive(Clone, Debug, PartialEq)]
pub enum MapChoice {
    Fixed(PositiveLinearMap),
    Identity,
    Avg(usize),
    Pinch,
    /// Schur multiplier by a fresh random correlation matrix (unital).
    Schur,
    /// `K*·K` with a fresh well-conditioned square `K` (not unital).
    Congruence,
    /// `K*·K` with a fresh `(k n) × n` isometry (unital).
    UnitalCongruence(usize),
}

impl fmt::Display for MapChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapChoice::Fixed(m) => write!(f, "{m}"),
            MapChoice::Identity => write!(f, "id"),
            MapChoice::Avg(k) => write!(f, "avg:{k}"),
            MapChoice::Pinch => write!(f, "pinch"),
            MapChoice::Schur => write!(f, "schur"),
            MapChoice::Congruence => write!(f, "congr"),
            MapChoice::UnitalCongruence(k) => write!(f, "ucongr:{k}"),
        }
    }
}

/// Random-map ids (`id`, `avg:k`, `pinch`, `schur`, `congr`, `ucongr:k`);
/// anything else, such as `ucongr:<file>`, is parsed as a fixed map.
impl FromStr for MapChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let count = |k: &str| {
            k.parse::<usize>()
                .ok()
                .filter(|&k| k > 0)
                .ok_or_else(|| Error::Parse(format!("bad block count in map id {s:?}")))
        };
        Ok(match s {
            "id" => Self::Identity,
            "pinch" => Self::Pinch,
            "schur" => Self::Schur,
            "congr" => Self::Congruence,
            _ => match s.split_once(':') {
                Some(("avg", k)) => Self::Avg(count(k)?),
                Some(("ucongr", k)) if k.parse::<usize>().is_ok() => Self::UnitalCongruence(count(k)?),
                _ => Self::Fixed(PositiveLinearMap::parse(s)?),
            },
        })
    }
}

impl MapChoice {
    pub fn is_unital(&self) -> bool {
        match self {
            MapChoice::Fixed(m) => m.is_unital(),
            MapChoice::Congruence => false,
            _ => true,
        }
    }

    /// Output dimension forced by a fixed map, if any.
    pub fn fixed_dim(&self) -> Option<usize> {
        match self {
            MapChoice::Fixed(PositiveLinearMap::Schur { c }) => Some(c.dim()),
            MapChoice::Fixed(PositiveLinearMap::Congruence { k } | PositiveLinearMap::UnitalCongruence { k }) => {
                Some(k.cols())
            }
            MapChoice::Fixed(PositiveLinearMap::Pinching { block_sizes: Some(s) }) => Some(s.iter().sum()),
            _ => None,
        }
    }

    /// A concrete map with `n × n` outputs and its input dimension.
    pub fn instantiate(&self, s: &mut Sampler, n: usize) -> Result<(PositiveLinearMap, usize)> {
        let map = match self {
            MapChoice::Fixed(m) => m.clone(),
            MapChoice::Identity => PositiveLinearMap::Identity,
            MapChoice::Avg(k) => PositiveLinearMap::averaging(*k)?,
            MapChoice::Pinch => PositiveLinearMap::pinching(),
            MapChoice::Schur => PositiveLinearMap::schur(s.correlation(n))?,
            MapChoice::Congruence => PositiveLinearMap::congruence(s.invertible(n, 0.5, 2.0)),
            MapChoice::UnitalCongruence(k) => PositiveLinearMap::unital_congruence(s.isometry(k * n, n))?,
        };
        let input = match &map {
            PositiveLinearMap::Trace { .. } => n,
            m => m.input_dim_for_output(n).ok_or(Error::DimensionMismatch {
                context: "map output dimension",
                expected: self.fixed_dim().unwrap_or(n),
                found: n,
            })?,
        };
        Ok((map, input))
    }
}

/// Unital maps used by the reverse-Jensen style checks.
pub fn unital_maps() -> Vec<MapChoice> {
    vec![MapChoice::Avg(2), MapChoice::Pinch, MapChoice::Schur]
}

/// Positive (not necessarily unital) maps.
pub fn positive_maps() -> Vec<MapChoice> {
    vec![MapChoice::Avg(2), MapChoice::Pinch, MapChoice::Schur, MapChoice::Congruence]
}

// ---------------------------------------------------------------------------
// Generic joint convexity

/// Which defining inequality a joint-convexity check evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvexityMode {
    Convex,
    Concave,
    LogConvex,
    LogConcave,
}

impl fmt::Display for ConvexityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConvexityMode::Convex => "convex",
            ConvexityMode::Concave => "concave",
            ConvexityMode::LogConvex => "log-convex",
            ConvexityMode::LogConcave => "log-concave",
        })
    }
}

impl FromStr for ConvexityMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "convex" => Ok(Self::Convex),
            "concave" => Ok(Self::Concave),
            "log-convex" => Ok(Self::LogConvex),
            "log-concave" => Ok(Self::LogConcave),
            other => Err(Error::Parse(format!("unknown convexity mode {other:?}"))),
        }
    }
}

/// Values that can be interpolated and compared: matrices (Löwner order) and
/// scalars.
pub trait Interpolable: Sized {
    fn lerp(a: &Self, b: &Self, t: f64) -> Result<Self>;
    fn geo(a: &Self, b: &Self, t: f64) -> Result<Self>;
    fn harm(a: &Self, b: &Self, t: f64) -> Result<Self>;
    /// Margin of `lhs ≤ rhs`.
    fn leq(lhs: &Self, rhs: &Self) -> Result<Margin>;
}

impl Interpolable for H {
    fn lerp(a: &Self, b: &Self, t: f64) -> Result<Self> {
        weighted_arithmetic(a, b, t)
    }

    fn geo(a: &Self, b: &Self, t: f64) -> Result<Self> {
        weighted_geometric(a, b, t)
    }

    fn harm(a: &Self, b: &Self, t: f64) -> Result<Self> {
        weighted_harmonic(a, b, t)
    }

    fn leq(lhs: &Self, rhs: &Self) -> Result<Margin> {
        Margin::loewner(lhs, rhs)
    }
}

fn positive(x: f64) -> Result<f64> {
    if x > 0.0 {
        Ok(x)
    } else {
        Err(Error::NotPositiveDefinite {
            min_eigenvalue: x,
            threshold: 0.0,
        })
    }
}

impl Interpolable for f64 {
    fn lerp(a: &Self, b: &Self, t: f64) -> Result<Self> {
        Ok((1.0 - t) * a + t * b)
    }

    fn geo(a: &Self, b: &Self, t: f64) -> Result<Self> {
        Ok(((1.0 - t) * positive(*a)?.ln() + t * positive(*b)?.ln()).exp())
    }

    fn harm(a: &Self, b: &Self, t: f64) -> Result<Self> {
        Ok(1.0 / ((1.0 - t) / positive(*a)? + t / positive(*b)?))
    }

    fn leq(lhs: &Self, rhs: &Self) -> Result<Margin> {
        Ok(Margin::scalar(*lhs, *rhs))
    }
}

/// Margin of the defining inequality of `mode` for `F` at the endpoints
/// `x = (x₁…x_k)`, `y = (y₁…y_k)` and weight `λ`.
///
/// With `secondary`, log-convex checks also record `F(mid) ≤ F(x) !_λ F(y)`
/// and log-concave checks `F(mid) ≥ F(x) ∇_λ F(y)`.
pub fn joint_margin<T: Interpolable>(
    mode: ConvexityMode,
    lambda: f64,
    secondary: bool,
    f: impl Fn(&[H]) -> Result<T>,
    x: &[H],
    y: &[H],
) -> Result<Margin> {
    let mid = x.iter().zip(y).map(|(a, b)| a.lerp(b, lambda)).collect::<Result<Vec<_>>>()?;
    let fm = f(&mid)?;
    let fx = f(x)?;
    let fy = f(y)?;
    Ok(match mode {
        ConvexityMode::Convex => T::leq(&fm, &T::lerp(&fx, &fy, lambda)?)?,
        ConvexityMode::Concave => T::leq(&T::lerp(&fx, &fy, lambda)?, &fm)?,
        ConvexityMode::LogConvex => {
            let m = T::leq(&fm, &T::geo(&fx, &fy, lambda)?)?;
            if secondary {
                m.with_secondary(T::leq(&fm, &T::harm(&fx, &fy, lambda)?)?.normalized())
            } else {
                m
            }
        }
        ConvexityMode::LogConcave => {
            let m = T::leq(&T::geo(&fx, &fy, lambda)?, &fm)?;
            if secondary {
                m.with_secondary(T::leq(&T::lerp(&fx, &fy, lambda)?, &fm)?.normalized())
            } else {
                m
            }
        }
    })
}

/// Draws endpoints `X0…X{k−1}` and `Y0…Y{k−1}` with the given dimensions.
pub fn draw_endpoints(s: &mut Sampler, sample: &mut Sample, dims: &[usize]) {
    for (i, &d) in dims.iter().enumerate() {
        sample.set_h(format!("X{i}"), s.pd(d));
        sample.set_h(format!("Y{i}"), s.pd(d));
    }
}

pub fn endpoints(sample: &Sample, k: usize) -> Result<(Vec<H>, Vec<H>)> {
    Ok((sample.hs("X", k)?, sample.hs("Y", k)?))
}

/// A functional of `k` positive definite arguments of a common dimension.
#[derive(Clone)]
pub enum Functional {
    Operator(Arc<dyn Fn(&[H]) -> Result<H> + Send + Sync>),
    Scalar(Arc<dyn Fn(&[H]) -> Result<f64> + Send + Sync>),
}

impl Functional {
    pub fn operator(f: impl Fn(&[H]) -> Result<H> + Send + Sync + 'static) -> Self {
        Self::Operator(Arc::new(f))
    }

    pub fn scalar(f: impl Fn(&[H]) -> Result<f64> + Send + Sync + 'static) -> Self {
        Self::Scalar(Arc::new(f))
    }

    pub fn margin(&self, mode: ConvexityMode, lambda: f64, x: &[H], y: &[H]) -> Result<Margin> {
        match self {
            Functional::Operator(f) => joint_margin(mode, lambda, false, |a| f(a), x, y),
            Functional::Scalar(f) => joint_margin(mode, lambda, false, |a| f(a), x, y),
        }
    }
}

/// Joint-convexity probe of `f` in `slots` arguments of the trial dimension.
pub fn joint_convexity_probe(
    id: impl Into<String>,
    description: impl Into<String>,
    f: Functional,
    mode: ConvexityMode,
    slots: usize,
) -> Probe {
    Probe::new(
        id,
        description,
        move |s, n| {
            let mut sample = Sample::new(n);
            draw_endpoints(s, &mut sample, &vec![n; slots]);
            Ok(sample)
        },
        move |sample, lambda| {
            let (x, y) = endpoints(sample, slots)?;
            f.margin(mode, lambda, &x, &y)
        },
    )
    .with_lambda()
}

/// Runs [`joint_convexity_probe`] under `config`.
pub fn check_joint_convexity(
    id: &str,
    f: Functional,
    mode: ConvexityMode,
    slots: usize,
    config: &ProbeConfig,
) -> Result<InequalityReport> {
    run_probe(&joint_convexity_probe(id, format!("joint {mode} check"), f, mode, slots), config)
}

// ---------------------------------------------------------------------------
// Operator means

/// The built-in means exercised by the axiom checks.
pub fn builtin_means() -> Vec<OperatorMean> {
    let w = |s: &str| s.parse::<OperatorMean>().expect("valid mean id");
    ["arith:0.5", "geo:0.5", "harm:0.5", "arith:0.3", "geo:0.7", "harm:0.2", "path:0.5:0.4", "path:-0.5:0.6"]
        .into_iter()
        .map(w)
        .collect()
}

fn pd_sample(s: &mut Sampler, n: usize, names: &[&str]) -> Sample {
    let mut sample = Sample::new(n);
    for name in names {
        sample.set_h(*name, s.pd(n));
    }
    sample
}

/// `Φ(A σ B) ≤ Φ(A) σ Φ(B)`.
pub fn mean_through_map(map: MapChoice, sigma: OperatorMean) -> Probe {
    let fixed = map.fixed_dim();
    let id = format!("mean-axioms/map-monotonicity/{map}/{sigma}");
    let probe = Probe::new(
        id,
        "positive maps are monotone for operator means",
        move |s, n| {
            let (phi, input) = map.instantiate(s, n)?;
            let mut sample = Sample::new(n);
            sample.set_map("phi", phi);
            sample.set_h("A", s.pd(input));
            sample.set_h("B", s.pd(input));
            Ok(sample)
        },
        move |sample, _| {
            let phi = sample.map("phi")?;
            let (a, b) = (sample.h("A")?, sample.h("B")?);
            let lhs = phi.apply(&sigma.apply(a, b)?)?;
            let rhs = sigma.apply(&phi.apply(a)?, &phi.apply(b)?)?;
            Margin::loewner(&lhs, &rhs)
        },
    );
    match fixed {
        Some(d) => probe.dims(d, d),
        None => probe,
    }
}

/// `A ≤ C, B ≤ D ⟹ A σ B ≤ C σ D` with `C = A + P`, `D = B + Q`.
pub fn mean_joint_monotonicity(sigma: OperatorMean) -> Probe {
    Probe::new(
        format!("mean-axioms/joint-monotonicity/{sigma}"),
        "operator means are jointly monotone",
        |s, n| {
            let mut sample = pd_sample(s, n, &["A", "B"]);
            sample.set_h("P", s.psd(n));
            sample.set_h("Q", s.psd(n));
            Ok(sample)
        },
        move |sample, _| {
            let (a, b) = (sample.h("A")?, sample.h("B")?);
            let c = a + sample.h("P")?;
            let d = b + sample.h("Q")?;
            Margin::loewner(&sigma.apply(a, b)?, &sigma.apply(&c, &d)?)
        },
    )
}

/// `X*(A σ B)X = (X*AX) σ (X*BX)` for invertible `X`, both directions.
pub fn mean_transformer(sigma: OperatorMean) -> Probe {
    Probe::new(
        format!("mean-axioms/transformer/{sigma}"),
        "transformer equality for invertible congruences",
        |s, n| {
            let mut sample = pd_sample(s, n, &["A", "B"]);
            sample.set_m("X", s.invertible(n, 0.5, 2.0));
            Ok(sample)
        },
        move |sample, _| {
            let (a, b, x) = (sample.h("A")?, sample.h("B")?, sample.m("X")?);
            let lhs = sigma.apply(a, b)?.congruence(x)?;
            let rhs = sigma.apply(&a.congruence(x)?, &b.congruence(x)?)?;
            Margin::loewner_eq(&lhs, &rhs)
        },
    )
}

/// `[X!Y] σ [Z!W] ≤ [XσZ] ! [YσW]`.
pub fn mean_harmonic_interchange(sigma: OperatorMean) -> Probe {
    Probe::new(
        format!("mean-axioms/harmonic-interchange/{sigma}"),
        "interchange of an operator mean with the harmonic mean",
        |s, n| Ok(pd_sample(s, n, &["X", "Y", "Z", "W"])),
        move |sample, _| {
            let (x, y, z, w) = (sample.h("X")?, sample.h("Y")?, sample.h("Z")?, sample.h("W")?);
            let lhs = sigma.apply(&weighted_harmonic(x, y, 0.5)?, &weighted_harmonic(z, w, 0.5)?)?;
            let rhs = weighted_harmonic(&sigma.apply(x, z)?, &sigma.apply(y, w)?, 0.5)?;
            Margin::loewner(&lhs, &rhs)
        },
    )
}

/// `σ** = σ` on random pairs.
pub fn mean_adjoint_involution(sigma: OperatorMean) -> Probe {
    Probe::new(
        format!("mean-axioms/adjoint-involution/{sigma}"),
        "the adjoint of the adjoint mean is the mean",
        |s, n| Ok(pd_sample(s, n, &["A", "B"])),
        move |sample, _| {
            let (a, b) = (sample.h("A")?, sample.h("B")?);
            let twice = crate::means::adjoint_mean(&crate::means::adjoint_mean(&sigma));
            Margin::loewner_eq(&sigma.apply(a, b)?, &twice.apply(a, b)?)
        },
    )
}

const PATH_R_GRID: [f64; 6] = [-1.0, -0.5, -1e-5, 1e-5, 0.5, 1.0];

fn t_grid() -> Vec<f64> {
    (1..10).map(|i| i as f64 / 10.0).collect()
}

/// `A !_t B ≤ A m_{r,t} B ≤ A ∇_t B` over the r and t grids.
pub fn path_sandwich() -> Probe {
    Probe::new(
        "mean-axioms/path-sandwich",
        "interpolational paths lie between the harmonic and arithmetic means",
        |s, n| Ok(pd_sample(s, n, &["A", "B"])),
        |sample, _| {
            let (a, b) = (sample.h("A")?, sample.h("B")?);
            let mut margins = Vec::new();
            for t in t_grid() {
                let lo = weighted_harmonic(a, b, t)?;
                let hi = weighted_arithmetic(a, b, t)?;
                for r in PATH_R_GRID {
                    let m = OperatorMean::path(r, t)?.apply(a, b)?;
                    margins.push(Margin::loewner(&lo, &m)?);
                    margins.push(Margin::loewner(&m, &hi)?);
                }
            }
            Margin::all(margins)
        },
    )
}

/// `r ↦ A m_{r,t} B` is nondecreasing.
pub fn path_monotone_in_r() -> Probe {
    Probe::new(
        "mean-axioms/path-monotone-in-r",
        "interpolational paths are nondecreasing in r",
        |s, n| Ok(pd_sample(s, n, &["A", "B"])),
        |sample, _| {
            let (a, b) = (sample.h("A")?, sample.h("B")?);
            let mut margins = Vec::new();
            for t in t_grid() {
                let path = PATH_R_GRID
                    .iter()
                    .map(|&r| OperatorMean::path(r, t)?.apply(a, b))
                    .collect::<Result<Vec<_>>>()?;
                for w in path.windows(2) {
                    margins.push(Margin::loewner(&w[0], &w[1])?);
                }
            }
            Margin::all(margins)
        },
    )
}

/// `A !_t B ≤ A #_t B ≤ A ∇_t B` for a random weight.
pub fn harmonic_geometric_arithmetic() -> Probe {
    Probe::new(
        "mean-axioms/harmonic-geometric-arithmetic",
        "weighted harmonic, geometric and arithmetic means are ordered",
        |s, n| {
            let mut sample = pd_sample(s, n, &["A", "B"]);
            sample.set_param("t", s.uniform(0.0, 1.0));
            Ok(sample)
        },
        |sample, _| {
            let (a, b, t) = (sample.h("A")?, sample.h("B")?, sample.param("t")?);
            let g = weighted_geometric(a, b, t)?;
            Ok(Margin::loewner(&weighted_harmonic(a, b, t)?, &g)?.and(Margin::loewner(&g, &weighted_arithmetic(a, b, t)?)?))
        },
    )
}

// ---------------------------------------------------------------------------
// Log-convexity lemmas

fn pair_with_weight(s: &mut Sampler, n: usize) -> Sample {
    let mut sample = pd_sample(s, n, &["A", "B"]);
    sample.set_param("t", s.uniform(0.0, 1.0));
    sample
}

/// `f(A ∇_t B) ≤ f(A) #_t f(B)` for `f(x) = x^{−p}`.
pub fn lemma_decreasing_log_convex(p: f64) -> Probe {
    let f = ScalarFunction::Power(-p);
    Probe::new(
        format!("log-convexity-lemmas/decreasing-power/{p}"),
        "operator monotone decreasing functions are operator log-convex",
        |s, n| Ok(pair_with_weight(s, n)),
        move |sample, _| {
            let (a, b, t) = (sample.h("A")?, sample.h("B")?, sample.param("t")?);
            let lhs = weighted_arithmetic(a, b, t)?.apply(&f)?;
            let rhs = weighted_geometric(&a.apply(&f)?, &b.apply(&f)?, t)?;
            Margin::loewner(&lhs, &rhs)
        },
    )
}

/// `f(A ∇_t B) ≥ f(A) #_t f(B)` for `f(x) = x^p`.
pub fn lemma_monotone_log_concave(p: f64) -> Probe {
    let f = ScalarFunction::Power(p);
    Probe::new(
        format!("log-convexity-lemmas/monotone-power/{p}"),
        "operator monotone functions are operator log-concave",
        |s, n| Ok(pair_with_weight(s, n)),
        move |sample, _| {
            let (a, b, t) = (sample.h("A")?, sample.h("B")?, sample.param("t")?);
            let lhs = weighted_geometric(&a.apply(&f)?, &b.apply(&f)?, t)?;
            let rhs = weighted_arithmetic(a, b, t)?.apply(&f)?;
            Margin::loewner(&lhs, &rhs)
        },
    )
}

/// `h(A !_t B) ≤ h(A) !_t h(B)` for operator monotone `h`.
pub fn lemma_harmonic(h: ScalarFunction) -> Probe {
    Probe::new(
        format!("log-convexity-lemmas/harmonic/{h}"),
        "operator monotone functions are sub-harmonic",
        |s, n| Ok(pair_with_weight(s, n)),
        move |sample, _| {
            let (a, b, t) = (sample.h("A")?, sample.h("B")?, sample.param("t")?);
            let lhs = weighted_harmonic(a, b, t)?.apply(&h)?;
            let rhs = weighted_harmonic(&a.apply(&h)?, &b.apply(&h)?, t)?;
            Margin::loewner(&lhs, &rhs)
        },
    )
}

/// `f(A ∇_t B) ≤ f(A) m_{r,t} f(B)` for `f(x) = x^{−1/2}` over r and t grids.
pub fn lemma_path_equivalence() -> Probe {
    let f = ScalarFunction::Power(-0.5);
    Probe::new(
        "log-convexity-lemmas/path-equivalence",
        "the decreasing square root is dominated by every interpolational path",
        |s, n| Ok(pd_sample(s, n, &["A", "B"])),
        move |sample, _| {
            let (a, b) = (sample.h("A")?, sample.h("B")?);
            let (fa, fb) = (a.apply(&f)?, b.apply(&f)?);
            let mut margins = Vec::new();
            for t in [0.25, 0.5, 0.75] {
                let lhs = weighted_arithmetic(a, b, t)?.apply(&f)?;
                for r in [-1.0, -0.5, 0.0, 0.5] {
                    margins.push(Margin::loewner(&lhs, &OperatorMean::path(r, t)?.apply(&fa, &fb)?)?);
                }
            }
            Margin::all(margins)
        },
    )
}

// ---------------------------------------------------------------------------
// Two-map functionals

/// Draws `Φ`, `Ψ` for `n × n` outputs and endpoints in their input spaces.
fn draw_two_maps(s: &mut Sampler, n: usize, phi: &MapChoice, psi: &MapChoice) -> Result<Sample> {
    let (pm, pin) = phi.instantiate(s, n)?;
    let (qm, qin) = psi.instantiate(s, n)?;
    let mut sample = Sample::new(n);
    sample.set_map("phi", pm);
    sample.set_map("psi", qm);
    draw_endpoints(s, &mut sample, &[pin, qin]);
    Ok(sample)
}

/// Operator-level joint log-convexity (`convex = true`) or log-concavity of
/// `h(Φ(f(A)) σ Ψ(g(B)))`.
#[allow(clippy::too_many_arguments)]
pub fn operator_log_convexity(
    case: &str,
    convex: bool,
    phi: MapChoice,
    psi: MapChoice,
    sigma: OperatorMean,
    f: ScalarFunction,
    g: ScalarFunction,
    h: ScalarFunction,
) -> Probe {
    let mode = if convex {
        ConvexityMode::LogConvex
    } else {
        ConvexityMode::LogConcave
    };
    let description = format!("h(Φ(f(A)) σ Ψ(g(B))) is jointly {mode} with f={f}, g={g}, h={h}, Φ={phi}, Ψ={psi}, σ={sigma}");
    Probe::new(
        format!("operator-log-convexity/{mode}/{case}"),
        description,
        move |s, n| draw_two_maps(s, n, &phi, &psi),
        move |sample, lambda| {
            let spec = FunctionalSpec {
                f,
                g,
                h,
                phi: sample.map("phi")?.clone(),
                psi: sample.map("psi")?.clone(),
                sigma: sigma.clone(),
                k: None,
                p: None,
            };
            let (x, y) = endpoints(sample, 2)?;
            joint_margin(mode, lambda, true, |v| f2(&spec, &v[0], &v[1]), &x, &y)
        },
    )
    .with_lambda()
}

/// Scalar-function families of the trace-convexity cases.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceCase {
    /// `f, g = t^{−p}`, `h = x^s`, `0 < s ≤ 1`: log-convex.
    DecreasingLogConvex,
    /// `f, g = t^{−p}`, `h = x^s` (`s ≥ 1`) or `exp`: convex.
    DecreasingConvex,
    /// `f, g = t^{−p}`, `h = −x^s`, `s ≥ 1`: concave.
    DecreasingConcave,
    /// `f, g = t^p`, `h = x^s` (`0 < s ≤ 1`) or `log`: concave.
    IncreasingConcave,
    /// `f, g = t^p`, `h = x^{−s}`: convex.
    IncreasingConvex,
    /// `f, g = t^p`, `h = x^{−s}`, `0 < s ≤ 1`: log-convex.
    IncreasingLogConvex,
    /// `f, g = 1/log t`, `h = x^s`, `0 < s ≤ 1`: log-convex.
    InvLogLogConvex,
    /// `f, g = 1/log t`, `h = x^s` (`s ≥ 1`) or `exp`: convex.
    InvLogConvex,
}

impl TraceCase {
    pub const ALL: [TraceCase; 8] = [
        TraceCase::DecreasingLogConvex,
        TraceCase::DecreasingConvex,
        TraceCase::DecreasingConcave,
        TraceCase::IncreasingConcave,
        TraceCase::IncreasingConvex,
        TraceCase::IncreasingLogConvex,
        TraceCase::InvLogLogConvex,
        TraceCase::InvLogConvex,
    ];

    pub fn id(self) -> &'static str {
        match self {
            TraceCase::DecreasingLogConvex => "decreasing-f/log-convex",
            TraceCase::DecreasingConvex => "decreasing-f/convex",
            TraceCase::DecreasingConcave => "decreasing-f/concave",
            TraceCase::IncreasingConcave => "increasing-f/concave",
            TraceCase::IncreasingConvex => "increasing-f/convex",
            TraceCase::IncreasingLogConvex => "increasing-f/log-convex",
            TraceCase::InvLogLogConvex => "inv-log-f/log-convex",
            TraceCase::InvLogConvex => "inv-log-f/convex",
        }
    }

    fn mode(self) -> ConvexityMode {
        match self {
            TraceCase::DecreasingLogConvex | TraceCase::IncreasingLogConvex | TraceCase::InvLogLogConvex => {
                ConvexityMode::LogConvex
            }
            TraceCase::DecreasingConvex | TraceCase::IncreasingConvex | TraceCase::InvLogConvex => {
                ConvexityMode::Convex
            }
            TraceCase::DecreasingConcave | TraceCase::IncreasingConcave => ConvexityMode::Concave,
        }
    }

    /// Draws `(f, g, h)` parameters into `sample`.
    fn draw_params(self, s: &mut Sampler, sample: &mut Sample) {
        let unit = |s: &mut Sampler| s.uniform(0.05, 1.0);
        sample.set_param("p", unit(s));
        sample.set_param("q", unit(s));
        let (s_lo, s_hi) = match self {
            TraceCase::DecreasingLogConvex | TraceCase::IncreasingLogConvex | TraceCase::InvLogLogConvex => (0.05, 1.0),
            TraceCase::IncreasingConcave => (0.05, 1.0),
            TraceCase::IncreasingConvex => (0.05, 2.0),
            _ => (1.0, 3.0),
        };
        sample.set_param("s", s.uniform(s_lo, s_hi));
        sample.set_param("alt", s.index(2) as f64);
    }

    fn functions(self, sample: &Sample) -> Result<(ScalarFunction, ScalarFunction, ScalarFunction)> {
        let (p, q, s) = (sample.param("p")?, sample.param("q")?, sample.param("s")?);
        let alt = sample.param("alt")? > 0.5;
        use ScalarFunction as F;
        Ok(match self {
            TraceCase::DecreasingLogConvex => (F::Power(-p), F::Power(-q), F::Power(s)),
            TraceCase::DecreasingConvex => (F::Power(-p), F::Power(-q), if alt { F::Exp } else { F::Power(s) }),
            TraceCase::DecreasingConcave => (F::Power(-p), F::Power(-q), F::NegPower(s)),
            TraceCase::IncreasingConcave => (F::Power(p), F::Power(q), if alt { F::Log } else { F::Power(s) }),
            TraceCase::IncreasingConvex | TraceCase::IncreasingLogConvex => (F::Power(p), F::Power(q), F::Power(-s)),
            TraceCase::InvLogLogConvex => (F::InvLog, F::InvLog, F::Power(s)),
            TraceCase::InvLogConvex => (F::InvLog, F::InvLog, if alt { F::Exp } else { F::Power(s) }),
        })
    }
}

fn trace_means() -> Vec<OperatorMean> {
    ["arith:0.5", "geo:0.5", "harm:0.5", "geo:0.3", "path:0.5:0.6", "path:-0.5:0.4"]
        .into_iter()
        .map(|s| s.parse().expect("valid mean id"))
        .collect()
}

/// `(A, B) ↦ Tr h[Φ(f(A)) σ Ψ(g(B))]` for one of the trace cases, with random
/// exponents, maps and means per trial.
pub fn trace_functional(case: TraceCase) -> Probe {
    let mode = case.mode();
    let probe = Probe::new(
        format!("trace-convexity/{}", case.id()),
        format!("Tr h[Φ(f(A)) σ Ψ(g(B))] is jointly {mode}"),
        move |s, n| {
            let maps = positive_maps();
            let phi = maps[s.index(maps.len())].clone();
            let psi = maps[s.index(maps.len())].clone();
            let mut sample = draw_two_maps(s, n, &phi, &psi)?;
            case.draw_params(s, &mut sample);
            sample.set_param("sigma", s.index(trace_means().len()) as f64);
            Ok(sample)
        },
        move |sample, lambda| {
            let (f, g, h) = case.functions(sample)?;
            let sigma = trace_means()[sample.param("sigma")? as usize].clone();
            let spec = FunctionalSpec {
                f,
                g,
                h,
                phi: sample.map("phi")?.clone(),
                psi: sample.map("psi")?.clone(),
                sigma,
                k: None,
                p: None,
            };
            let (x, y) = endpoints(sample, 2)?;
            joint_margin(mode, lambda, true, |v| crate::functionals::trace_f2(&spec, &v[0], &v[1]), &x, &y)
        },
    )
    .with_lambda();
    match case {
        TraceCase::InvLogLogConvex | TraceCase::InvLogConvex => probe.window(1.5, 4.0),
        _ => probe,
    }
}

/// `Φ(A^p)^{−1/p}` for unital `Φ`.
fn map_power_inverse_root(phi: &PositiveLinearMap, a: &H, p: f64) -> Result<H> {
    phi.apply(&a.pow(p)?)?.pow(-1.0 / p)
}

/// `A ↦ Tr[Φ(A^p)^{−1/p}]` is convex.
pub fn trace_power_convexity(p: f64, map: MapChoice) -> Probe {
    Probe::new(
        format!("trace-convexity/power-root/{map}/{p}"),
        format!("A ↦ Tr Φ(A^p)^(−1/p) is convex for p={p}"),
        move |s, n| {
            let (phi, input) = map.instantiate(s, n)?;
            let mut sample = Sample::new(n);
            sample.set_map("phi", phi);
            draw_endpoints(s, &mut sample, &[input]);
            Ok(sample)
        },
        move |sample, lambda| {
            let phi = sample.map("phi")?;
            let (x, y) = endpoints(sample, 1)?;
            joint_margin(
                ConvexityMode::Convex,
                lambda,
                false,
                |v| Ok(map_power_inverse_root(phi, &v[0], p)?.trace()),
                &x,
                &y,
            )
        },
    )
    .with_lambda()
}

/// `Tr Φ((A+B)^p)^{−1/p} ≤ Tr Φ(A^p)^{−1/p} + Tr Φ(B^p)^{−1/p}`.
pub fn deformed_minkowski_trace(p: f64, map: MapChoice) -> Probe {
    Probe::new(
        format!("trace-convexity/deformed-minkowski/{map}/{p}"),
        format!("subadditivity of Tr Φ(A^p)^(−1/p) for p={p}"),
        move |s, n| {
            let (phi, input) = map.instantiate(s, n)?;
            let mut sample = Sample::new(n);
            sample.set_map("phi", phi);
            sample.set_h("A", s.pd(input));
            sample.set_h("B", s.pd(input));
            Ok(sample)
        },
        move |sample, _| {
            let phi = sample.map("phi")?;
            let (a, b) = (sample.h("A")?, sample.h("B")?);
            let tr = |m: &H| Ok::<_, Error>(map_power_inverse_root(phi, m, p)?.trace());
            Ok(Margin::scalar(tr(&(a + b))?, tr(a)? + tr(b)?))
        },
    )
}

// ---------------------------------------------------------------------------
// Lieb-type trace functionals

/// `Tr{Φ(f₁(A))^p K* Ψ(f₂(B))^q K}` with `q = 1 − p` (concave) or `q = −1 − p`
/// (convex), random `K` and random `p` in the admissible range.
pub fn lieb_type(mode: LiebMode, f1: ScalarFunction, f2: ScalarFunction, phi: MapChoice, psi: MapChoice) -> Probe {
    let (conv, range) = match mode {
        LiebMode::Concave => (ConvexityMode::Concave, (0.0, 1.0)),
        LiebMode::Convex => (ConvexityMode::Convex, (-1.0, 0.0)),
    };
    Probe::new(
        format!("lieb-trace/{conv}/{f1}-{f2}/{phi}-{psi}"),
        format!("Tr Φ(f1(A))^p K* Ψ(f2(B))^q K is jointly {conv}"),
        move |s, n| {
            let mut sample = draw_two_maps(s, n, &phi, &psi)?;
            sample.set_m("K", s.gaussian(n, n));
            sample.set_param("p", s.uniform(range.0, range.1));
            Ok(sample)
        },
        move |sample, lambda| {
            let (phi, psi) = (sample.map("phi")?, sample.map("psi")?);
            let k = sample.m("K")?;
            let p = sample.param("p")?;
            let (x, y) = endpoints(sample, 2)?;
            joint_margin(conv, lambda, false, |v| lieb_trace(phi, psi, &f1, &f2, k, p, mode, &v[0], &v[1]), &x, &y)
        },
    )
    .with_lambda()
}

/// `(A, B) ↦ Tr K*A^pKB^{1−p}` is jointly concave.
pub fn lieb_concavity(p: f64, identity_k: bool) -> Probe {
    let label = if identity_k { "identity" } else { "random" };
    Probe::new(
        format!("lieb-trace/lieb-concavity/{label}-k/{p}"),
        format!("(A, B) ↦ Tr K*A^pKB^(1−p) is jointly concave for p={p}"),
        move |s, n| {
            let mut sample = Sample::new(n);
            draw_endpoints(s, &mut sample, &[n, n]);
            let k = if identity_k {
                crate::matcore::Matrix::identity(n)
            } else {
                s.gaussian(n, n)
            };
            sample.set_m("K", k);
            Ok(sample)
        },
        move |sample, lambda| {
            let k = sample.m("K")?;
            let (x, y) = endpoints(sample, 2)?;
            joint_margin(
                ConvexityMode::Concave,
                lambda,
                false,
                |v| trace_congruence_product(&v[1].pow(1.0 - p)?, &k.adjoint(), &v[0].pow(p)?),
                &x,
                &y,
            )
        },
    )
    .with_lambda()
}

// ---------------------------------------------------------------------------
// Multilinear maps

/// Tensor product, optionally followed by pinching onto the diagonal.
pub fn multilinear(k: usize, pinched: bool) -> Result<MultilinearMap> {
    if pinched {
        MultilinearMap::new(k, PositiveLinearMap::pinching())
    } else {
        MultilinearMap::tensor(k)
    }
}

fn multilinear_label(pinched: bool) -> &'static str {
    if pinched {
        "pinched-tensor"
    } else {
        "tensor"
    }
}

fn tensor_dims(probe: Probe, k: usize) -> Probe {
    if k >= 3 {
        probe.dims(2, 2)
    } else {
        probe.max_dim(3)
    }
}

/// `Φ(A₁#B₁, …, A_k#B_k) ≤ Φ(A₁, …, A_k) # Φ(B₁, …, B_k)`.
pub fn multilinear_geometric(k: usize, pinched: bool) -> Probe {
    let probe = Probe::new(
        format!("tensor-log-convexity/geometric-mean/{}/{k}", multilinear_label(pinched)),
        "multilinear maps are monotone for the geometric mean",
        move |s, n| {
            let mut sample = Sample::new(n);
            draw_endpoints(s, &mut sample, &vec![n; k]);
            Ok(sample)
        },
        move |sample, _| {
            let phi = multilinear(k, pinched)?;
            let (x, y) = endpoints(sample, k)?;
            let geo = x.iter().zip(&y).map(|(a, b)| weighted_geometric(a, b, 0.5)).collect::<Result<Vec<_>>>()?;
            let lhs = phi.apply(&geo)?;
            let rhs = weighted_geometric(&phi.apply(&x)?, &phi.apply(&y)?, 0.5)?;
            Margin::loewner(&lhs, &rhs)
        },
    );
    tensor_dims(probe, k)
}

/// Which statement about `Φ(f₁(A₁), …, f_k(A_k))` a tensor probe checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TensorPart {
    /// Jointly log-convex.
    LogConvex,
    /// The inverse is jointly log-concave.
    InverseLogConcave,
    /// `Tr h(·)` is jointly convex for convex increasing `h`.
    TraceConvex(TensorTrace),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TensorTrace {
    Identity,
    Square,
    Exp,
}

impl TensorPart {
    fn id(self) -> &'static str {
        match self {
            TensorPart::LogConvex => "log-convex",
            TensorPart::InverseLogConcave => "inverse-log-concave",
            TensorPart::TraceConvex(TensorTrace::Identity) => "trace-convex/id",
            TensorPart::TraceConvex(TensorTrace::Square) => "trace-convex/power:2",
            TensorPart::TraceConvex(TensorTrace::Exp) => "trace-convex/exp",
        }
    }
}

/// Joint log-convexity and its consequences for `f_i(x) = x^{−p_i}`.
pub fn tensor_log_convexity(k: usize, pinched: bool, part: TensorPart) -> Probe {
    let probe = Probe::new(
        format!("tensor-log-convexity/{}/{}/{k}", part.id(), multilinear_label(pinched)),
        "multilinear images of operator log-convex functions",
        move |s, n| {
            let mut sample = Sample::new(n);
            draw_endpoints(s, &mut sample, &vec![n; k]);
            for i in 0..k {
                sample.set_param(format!("p{i}"), s.uniform(0.05, 1.0));
            }
            Ok(sample)
        },
        move |sample, lambda| {
            let phi = multilinear(k, pinched)?;
            let ps = (0..k).map(|i| sample.param(&format!("p{i}"))).collect::<Result<Vec<_>>>()?;
            let image = |v: &[H]| {
                let args = v.iter().zip(&ps).map(|(a, &p)| a.pow(-p)).collect::<Result<Vec<_>>>()?;
                phi.apply(&args)
            };
            let (x, y) = endpoints(sample, k)?;
            match part {
                TensorPart::LogConvex => joint_margin(ConvexityMode::LogConvex, lambda, false, image, &x, &y),
                TensorPart::InverseLogConcave => {
                    joint_margin(ConvexityMode::LogConcave, lambda, false, |v| image(v)?.inverse(), &x, &y)
                }
                TensorPart::TraceConvex(h) => {
                    let f = match h {
                        TensorTrace::Identity => ScalarFunction::Identity,
                        TensorTrace::Square => ScalarFunction::Power(2.0),
                        TensorTrace::Exp => ScalarFunction::Exp,
                    };
                    joint_margin(ConvexityMode::Convex, lambda, false, |v| Ok(image(v)?.apply(&f)?.trace()), &x, &y)
                }
            }
        },
    )
    .with_lambda();
    tensor_dims(probe, k)
}

/// `(A, B) ↦ A^p ⊗ B^q`: log-concave for `p, q ∈ [0, 1]`, concave for
/// `p, q ≥ 0` with `p + q ≤ 1`; with `lieb = true`, `q = 1 − p`.
pub fn tensor_power_concavity(mode: ConvexityMode, lieb: bool) -> Probe {
    let label = if lieb { "lieb" } else { "power" };
    Probe::new(
        format!("tensor-log-convexity/{label}-tensor/{mode}"),
        format!("(A, B) ↦ A^p ⊗ B^q is jointly {mode}"),
        move |s, n| {
            let mut sample = Sample::new(n);
            draw_endpoints(s, &mut sample, &[n, n]);
            let p = s.uniform(0.0, 1.0);
            let q = match (lieb, mode) {
                (true, _) => 1.0 - p,
                (false, ConvexityMode::Concave) => s.uniform(0.0, 1.0 - p),
                _ => s.uniform(0.0, 1.0),
            };
            sample.set_param("p", p);
            sample.set_param("q", q);
            Ok(sample)
        },
        move |sample, lambda| {
            let (p, q) = (sample.param("p")?, sample.param("q")?);
            let (x, y) = endpoints(sample, 2)?;
            joint_margin(mode, lambda, false, |v| Ok(v[0].pow(p)?.kron(&v[1].pow(q)?)), &x, &y)
        },
    )
    .with_lambda()
    .max_dim(3)
}

/// Concavity of `(A, B) ↦ A^p ⊗ B^q` with `p, q ∈ [0, 1]` and `p + q > 1`,
/// which already fails on scalar matrices.
pub fn tensor_power_concavity_beyond_unit_sum() -> Probe {
    Probe::new(
        "tensor-log-convexity/power-tensor/concave-beyond-unit-sum",
        "(A, B) ↦ A^p ⊗ B^q is not jointly concave when p + q > 1",
        |s, n| {
            let mut sample = Sample::new(n);
            draw_endpoints(s, &mut sample, &[n, n]);
            let p = s.uniform(0.5, 1.0);
            sample.set_param("p", p);
            sample.set_param("q", s.uniform(1.0 - p + 0.25, 1.0));
            Ok(sample)
        },
        |sample, lambda| {
            let (p, q) = (sample.param("p")?, sample.param("q")?);
            let (x, y) = endpoints(sample, 2)?;
            joint_margin(ConvexityMode::Concave, lambda, false, |v| Ok(v[0].pow(p)?.kron(&v[1].pow(q)?)), &x, &y)
        },
    )
    .with_lambda()
    .max_dim(3)
    .expecting_violation()
}

// ---------------------------------------------------------------------------
// Minkowski-type trace functionals

/// `Tr[(A₁^p + ⋯ + A_k^p)^{1/p}]`.
pub fn carlen_lieb_value(args: &[H], p: f64) -> Result<f64> {
    Ok(power_sum_root(args, p)?.trace())
}

/// Joint convexity or concavity of `(A₁, A₂) ↦ Tr[(A₁^p + A₂^p)^{1/p}]`.
///
/// Where the statement fails in general (`p > 2`, or the wrong direction
/// for `p ≠ 1`) the probe expects a violation and hill-climbs from the
/// worst random trial.
pub fn carlen_lieb_convexity(p: f64, mode: ConvexityMode) -> Probe {
    let probe = Probe::new(
        format!("carlen-lieb/{mode}/{p}"),
        format!("(A₁, A₂) ↦ Tr (A₁^p + A₂^p)^(1/p) is jointly {mode}"),
        |s, n| {
            let mut sample = Sample::new(n);
            draw_endpoints(s, &mut sample, &[n, n]);
            Ok(sample)
        },
        move |sample, lambda| {
            let (x, y) = endpoints(sample, 2)?;
            joint_margin(mode, lambda, false, |v| carlen_lieb_value(v, p), &x, &y)
        },
    )
    .with_lambda();
    let expected = p > 2.0 || (p < 1.0 && mode == ConvexityMode::Convex) || (p > 1.0 && mode == ConvexityMode::Concave);
    if !expected {
        return probe;
    }
    let probe = probe.expecting_violation();
    if p > 2.0 && mode == ConvexityMode::Convex {
        probe.dims(2, 2).trials(1000).refine(2000)
    } else {
        probe.dims(2, 2).trials(1000).refine(200)
    }
}

/// `Tr[(Σ(Aᵢ+Bᵢ)^p)^{1/p}]` against `Tr[(ΣAᵢ^p)^{1/p}] + Tr[(ΣBᵢ^p)^{1/p}]`:
/// superadditive for `0 < p ≤ 1`, subadditive for `1 ≤ p ≤ 2`.
pub fn carlen_lieb_minkowski(p: f64, pairs: usize) -> Probe {
    let dir = if p <= 1.0 { "superadditive" } else { "subadditive" };
    Probe::new(
        format!("carlen-lieb/minkowski-{dir}/{pairs}/{p}"),
        format!("Minkowski trace inequality with {pairs} pairs, p={p}"),
        move |s, n| {
            let mut sample = Sample::new(n);
            draw_endpoints(s, &mut sample, &vec![n; pairs]);
            Ok(sample)
        },
        move |sample, _| {
            let (a, b) = endpoints(sample, pairs)?;
            let sums = a.iter().zip(&b).map(|(x, y)| x + y).collect::<Vec<_>>();
            let whole = carlen_lieb_value(&sums, p)?;
            let parts = carlen_lieb_value(&a, p)? + carlen_lieb_value(&b, p)?;
            Ok(if p <= 1.0 {
                Margin::scalar(parts, whole)
            } else {
                Margin::scalar(whole, parts)
            })
        },
    )
}

// ---------------------------------------------------------------------------
// Kantorovich-constant bounds

fn window_of(mats: &[&H]) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for m in mats {
        let sd = m.require_positive_definite()?;
        lo = lo.min(sd.min());
        hi = hi.max(sd.max());
    }
    Ok((lo, hi))
}

/// `h = M/m` from the spectra of `mats`.
pub fn condition_of(mats: &[&H]) -> Result<f64> {
    let (m, big_m) = window_of(mats)?;
    Ok(big_m / m)
}

fn unital_map_sample(s: &mut Sampler, n: usize, map: &MapChoice, names: &[&str]) -> Result<Sample> {
    let (phi, input) = map.instantiate(s, n)?;
    let mut sample = Sample::new(n);
    sample.set_map("phi", phi);
    for name in names {
        sample.set_h(*name, s.pd(input));
    }
    Ok(sample)
}

/// Regime of the reverse Jensen bounds for `x^p`.
pub fn reverse_jensen_regime(p: f64) -> u8 {
    if p > 0.0 && p <= 1.0 {
        1
    } else if (-1.0..0.0).contains(&p) || (p > 1.0 && p <= 2.0) {
        2
    } else {
        3
    }
}

/// Two-sided bound on `Φ(A^p)` by multiples of `Φ(A)^p`.
pub fn reverse_jensen(p: f64, map: MapChoice) -> Probe {
    Probe::new(
        format!("reverse-jensen/{map}/{p}"),
        format!("Kantorovich bounds between Φ(A^p) and Φ(A)^p, p={p}"),
        move |s, n| unital_map_sample(s, n, &map, &["A"]),
        move |sample, _| {
            let phi = sample.map("phi")?;
            let a = sample.h("A")?;
            let k = kantorovich(condition_of(&[a])?, p);
            let mid = phi.apply(&a.pow(p)?)?;
            let base = phi.apply(a)?.pow(p)?;
            let (lo, hi) = match reverse_jensen_regime(p) {
                1 => (k, 1.0),
                2 => (1.0, k),
                _ => (1.0 / k, k),
            };
            Ok(Margin::loewner(&base.scale(lo), &mid)?.and(Margin::loewner(&mid, &base.scale(hi))?))
        },
    )
}

/// `(c_lo, c_hi)` multiplying `Φ(A^p)^{1/p} + Φ(B^p)^{1/p}` in the operator
/// Minkowski sandwich.
pub fn minkowski_constants(h: f64, p: f64) -> (f64, f64) {
    let k = kantorovich(h, p);
    if p >= 1.0 {
        (k.powf(-1.0 / p), k.powf(1.0 / p))
    } else if p <= -1.0 || (0.5..=1.0).contains(&p) {
        (k.powf(1.0 / p), k.powf(-1.0 / p))
    } else {
        (k.powf(2.0 / p), k.powf(-2.0 / p))
    }
}

/// `c_lo [Φ(A^p)^{1/p} + Φ(B^p)^{1/p}] ≤ Φ((A+B)^p)^{1/p} ≤ c_hi […]`.
pub fn minkowski_sandwich(p: f64, map: MapChoice) -> Probe {
    Probe::new(
        format!("minkowski-sandwich/{map}/{p}"),
        format!("operator Minkowski sandwich with Kantorovich constants, p={p}"),
        move |s, n| unital_map_sample(s, n, &map, &["A", "B"]),
        move |sample, _| {
            let phi = sample.map("phi")?;
            let (a, b) = (sample.h("A")?, sample.h("B")?);
            let (lo, hi) = minkowski_constants(condition_of(&[a, b])?, p);
            let root = |m: &H| phi.apply(&m.pow(p)?)?.pow(1.0 / p);
            let parts = &root(a)? + &root(b)?;
            let whole = root(&(a + b))?;
            Ok(Margin::loewner(&parts.scale(lo), &whole)?.and(Margin::loewner(&whole, &parts.scale(hi))?))
        },
    )
}

/// Operator-sum form with `n` pairs, `p ≥ 1`.
pub fn minkowski_operator_sum(p: f64, pairs: usize) -> Probe {
    Probe::new(
        format!("minkowski-sandwich/operator-sum/{pairs}/{p}"),
        format!("Kantorovich bounds for the operator Minkowski sum with {pairs} pairs, p={p}"),
        move |s, n| {
            let mut sample = Sample::new(n);
            draw_endpoints(s, &mut sample, &vec![n; pairs]);
            Ok(sample)
        },
        move |sample, _| {
            let (a, b) = endpoints(sample, pairs)?;
            let all: Vec<&H> = a.iter().chain(&b).collect();
            let k = kantorovich(condition_of(&all)?, p);
            let sums = a.iter().zip(&b).map(|(x, y)| x + y).collect::<Vec<_>>();
            let whole = power_sum_root(&sums, p)?;
            let parts = &power_sum_root(&a, p)? + &power_sum_root(&b, p)?;
            let (lo, hi) = (k.powf(-1.0 / p), k.powf(1.0 / p));
            Ok(Margin::loewner(&parts.scale(lo), &whole)?.and(Margin::loewner(&whole, &parts.scale(hi))?))
        },
    )
}

/// The operator Minkowski inequality `(Σ(Aᵢ+Bᵢ)^p)^{1/p} ≤ (ΣAᵢ^p)^{1/p} + (ΣBᵢ^p)^{1/p}`,
/// which fails in general.
pub fn operator_minkowski(p: f64, pairs: usize) -> Probe {
    Probe::new(
        format!("search-operator-minkowski/{pairs}/{p}"),
        format!("operator Minkowski inequality with {pairs} pairs, p={p}"),
        move |s, n| {
            let mut sample = Sample::new(n);
            draw_endpoints(s, &mut sample, &vec![n; pairs]);
            Ok(sample)
        },
        move |sample, _| {
            let (a, b) = endpoints(sample, pairs)?;
            let sums = a.iter().zip(&b).map(|(x, y)| x + y).collect::<Vec<_>>();
            let whole = power_sum_root(&sums, p)?;
            let parts = &power_sum_root(&a, p)? + &power_sum_root(&b, p)?;
            Margin::loewner(&whole, &parts)
        },
    )
    .expecting_violation()
}

/// Trace bounds `Tr Φ((A+B)^p)^{1/p}` against `Tr Φ(A^p)^{1/p} + Tr Φ(B^p)^{1/p}`.
pub fn trace_minkowski_bounds(p: f64, map: MapChoice) -> Probe {
    Probe::new(
        format!("trace-minkowski/{map}/{p}"),
        format!("Kantorovich bounds for the trace Minkowski functional, p={p}"),
        move |s, n| unital_map_sample(s, n, &map, &["A", "B"]),
        move |sample, _| {
            let phi = sample.map("phi")?;
            let (a, b) = (sample.h("A")?, sample.h("B")?);
            let k = kantorovich(condition_of(&[a, b])?, p);
            let tr = |m: &H| Ok::<_, Error>(phi.apply(&m.pow(p)?)?.pow(1.0 / p)?.trace());
            let parts = tr(a)? + tr(b)?;
            let whole = tr(&(a + b))?;
            let (lo, hi) = trace_bound_constants(k, p);
            Ok(Margin::scalar(lo * parts, whole).and(Margin::scalar(whole, hi * parts)))
        },
    )
}

/// `(K^{1/p}, K^{−1/p})` for `p ≤ 1`, `(K^{−1/p}, K^{1/p})` for `p ≥ 1`.
pub fn trace_bound_constants(k: f64, p: f64) -> (f64, f64) {
    if p <= 1.0 {
        (k.powf(1.0 / p), k.powf(-1.0 / p))
    } else {
        (k.powf(-1.0 / p), k.powf(1.0 / p))
    }
}

/// Kantorovich bounds for the Minkowski trace functional with `n` pairs.
pub fn trace_minkowski_pairs(p: f64, pairs: usize) -> Probe {
    Probe::new(
        format!("trace-minkowski/pairs/{pairs}/{p}"),
        format!("Kantorovich bounds for the Minkowski trace inequality with {pairs} pairs, p={p}"),
        move |s, n| {
            let mut sample = Sample::new(n);
            draw_endpoints(s, &mut sample, &vec![n; pairs]);
            Ok(sample)
        },
        move |sample, _| {
            let (a, b) = endpoints(sample, pairs)?;
            let all: Vec<&H> = a.iter().chain(&b).collect();
            let k = kantorovich(condition_of(&all)?, p);
            let sums = a.iter().zip(&b).map(|(x, y)| x + y).collect::<Vec<_>>();
            let whole = carlen_lieb_value(&sums, p)?;
            let parts = carlen_lieb_value(&a, p)? + carlen_lieb_value(&b, p)?;
            let (lo, hi) = trace_bound_constants(k, p);
            Ok(Margin::scalar(lo * parts, whole).and(Margin::scalar(whole, hi * parts)))
        },
    )
}

// ---------------------------------------------------------------------------
// Operator-valued determinant

fn det(phi: &PositiveLinearMap, a: &H) -> Result<H> {
    crate::functionals::op_determinant(phi, a)
}

/// Determinant identities and bounds, by name: `power`, `homogeneity`, `bounds`.
pub fn determinant_property(property: &'static str, map: MapChoice) -> Probe {
    let probe = Probe::new(
        format!("determinant/{property}/{map}"),
        format!("operator-valued determinant: {property}"),
        move |s, n| unital_map_sample(s, n, &map, &["A"]),
        move |sample, _| {
            let phi = sample.map("phi")?;
            let a = sample.h("A")?;
            let d = det(phi, a)?;
            match property {
                "power" => Margin::all(
                    [-1.0, 0.5, 2.0, std::f64::consts::PI]
                        .into_iter()
                        .map(|t| Margin::loewner_eq(&det(phi, &a.pow(t)?)?, &d.pow(t)?))
                        .collect::<Result<Vec<_>>>()?,
                ),
                "homogeneity" => Margin::all(
                    [0.1, 3.0]
                        .into_iter()
                        .map(|t| Margin::loewner_eq(&det(phi, &a.scale(t))?, &d.scale(t)))
                        .collect::<Result<Vec<_>>>()?,
                ),
                "bounds" => {
                    let sd = a.eigh()?;
                    let dd = d.eigh()?;
                    Ok(Margin::scalar(sd.min(), dd.min()).and(Margin::scalar(dd.max(), sd.max())))
                }
                other => Err(Error::UnknownTheorem(other.to_string())),
            }
        },
    );
    if property == "homogeneity" {
        probe.tol(1e-10)
    } else {
        probe
    }
}

/// `S(h)^{−2}[Δ(A) + Δ(B)] ≤ Δ(A+B) ≤ S(h)²[Δ(A) + Δ(B)]`.
pub fn determinant_specht(map: MapChoice) -> Probe {
    Probe::new(
        format!("determinant/specht-sum/{map}"),
        "Specht-ratio bounds for the determinant of a sum",
        move |s, n| unital_map_sample(s, n, &map, &["A", "B"]),
        move |sample, _| {
            let phi = sample.map("phi")?;
            let (a, b) = (sample.h("A")?, sample.h("B")?);
            let s2 = specht(condition_of(&[a, b])?).powi(2);
            let parts = &det(phi, a)? + &det(phi, b)?;
            let whole = det(phi, &(a + b))?;
            Ok(Margin::loewner(&parts.scale(1.0 / s2), &whole)?.and(Margin::loewner(&whole, &parts.scale(s2))?))
        },
    )
}

/// Minkowski-type bounds for `Δ(A)^{1/p} + Δ(B)^{1/p}`, `p ≥ 1`.
pub fn determinant_minkowski(p: f64, map: MapChoice) -> Probe {
    Probe::new(
        format!("determinant/minkowski/{map}/{p}"),
        format!("Specht/Kantorovich bounds for Δ(A)^(1/p) + Δ(B)^(1/p), p={p}"),
        move |s, n| unital_map_sample(s, n, &map, &["A", "B"]),
        move |sample, _| {
            let phi = sample.map("phi")?;
            let (a, b) = (sample.h("A")?, sample.h("B")?);
            let h = condition_of(&[a, b])?;
            let q = 1.0 / p;
            let s3 = specht(h.powf(q)).powi(3);
            let c = 2f64.powf(1.0 - q);
            let whole = det(phi, &(a + b))?.pow(q)?;
            let parts = &det(phi, a)?.pow(q)? + &det(phi, b)?.pow(q)?;
            let lo = whole.scale(c * kantorovich(h, q) / s3);
            let hi = whole.scale(c * s3);
            Ok(Margin::loewner(&lo, &parts)?.and(Margin::loewner(&parts, &hi)?))
        },
    )
}

// ---------------------------------------------------------------------------
// Constants

const K_H: [f64; 6] = [1.01, 1.5, 2.0, 5.0, 20.0, 100.0];
const K_P: [f64; 10] = [-3.0, -1.5, -0.5, 0.1, 0.25, 0.5, 0.75, 1.5, 2.0, 4.0];
const K_R: [f64; 4] = [-2.0, -0.5, 0.5, 3.0];

fn rel_eq(a: f64, b: f64) -> Margin {
    Margin::new(-(a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE), 0.0)
}

/// Symmetry and duality identities of `K(h, p)` over a fixed grid; one trial
/// per grid point.
pub fn kantorovich_identities() -> Probe {
    let grid = K_H.len() * K_P.len() * K_R.len();
    Probe::new(
        "kantorovich-identities/symmetries",
        "K(h,p) = K(1/h,p) = K(h,1−p); K(h,0) = K(h,1) = K(1,p) = 1; K(h^r,p/r)^(1/p) = K(h^p,r/p)^(−1/r)",
        |s, n| {
            let i = s.trial;
            let mut sample = Sample::new(n);
            sample.set_param("h", K_H[i % K_H.len()]);
            sample.set_param("p", K_P[(i / K_H.len()) % K_P.len()]);
            sample.set_param("r", K_R[i / (K_H.len() * K_P.len())]);
            Ok(sample)
        },
        |sample, _| {
            let (h, p, r) = (sample.param("h")?, sample.param("p")?, sample.param("r")?);
            let k = kantorovich(h, p);
            let duality_lhs = kantorovich(h.powf(r), p / r).powf(1.0 / p);
            let duality_rhs = kantorovich(h.powf(p), r / p).powf(-1.0 / r);
            Margin::all([
                rel_eq(k, kantorovich(1.0 / h, p)),
                rel_eq(k, kantorovich(h, 1.0 - p)),
                rel_eq(kantorovich(h, 0.0), 1.0),
                rel_eq(kantorovich(h, 1.0), 1.0),
                rel_eq(kantorovich(1.0, p), 1.0),
                rel_eq(duality_lhs, duality_rhs),
            ])
        },
    )
    .trials(grid)
    .dims(1, 1)
    .tol(1e-10)
}

const LIMIT_H: [f64; 3] = [1.5, 2.0, 5.0];
const LIMIT_P: [f64; 3] = [0.5, 1.0, 2.0];

/// `|K(h^r, p/r) − S(h^p)| ≤ 1e-4` at `r = ±1e-5`.
pub fn kantorovich_specht_limit() -> Probe {
    Probe::new(
        "kantorovich-identities/specht-limit",
        "K(h^r, p/r) tends to S(h^p) as r → 0",
        |s, n| {
            let i = s.trial;
            let mut sample = Sample::new(n);
            sample.set_param("h", LIMIT_H[i % 3]);
            sample.set_param("p", LIMIT_P[(i / 3) % 3]);
            sample.set_param("r", if i < 9 { 1e-5 } else { -1e-5 });
            Ok(sample)
        },
        |sample, _| {
            let (h, p, r) = (sample.param("h")?, sample.param("p")?, sample.param("r")?);
            let k = crate::constants::kantorovich_specht_limit(h, p, r)?;
            Ok(Margin::new(-(k - specht(h.powf(p))).abs(), 0.0))
        },
    )
    .trials(18)
    .dims(1, 1)
    .tol(1e-4)
}

/// `K(4, 2) = 1.5625`.
pub fn kantorovich_spot_value() -> Probe {
    Probe::new(
        "kantorovich-identities/spot-value",
        "K(4,2) = 25/16",
        |_, n| Ok(Sample::new(n)),
        |_, _| Ok(Margin::new(-(kantorovich(4.0, 2.0) - 1.5625).abs(), 0.0)),
    )
    .trials(1)
    .dims(1, 1)
    .tol(1e-12)
}

// ---------------------------------------------------------------------------
// Positive maps

/// `Φ(A) ≥ 0` for positive semidefinite `A`.
pub fn map_positivity(map: MapChoice) -> Probe {
    Probe::new(
        format!("maps/positivity/{map}"),
        "positive maps send positive semidefinite matrices to positive semidefinite matrices",
        move |s, n| {
            let (phi, input) = map.instantiate(s, n)?;
            let mut sample = Sample::new(n);
            sample.set_map("phi", phi);
            sample.set_h("P", s.psd(input));
            Ok(sample)
        },
        |sample, _| {
            let image = sample.map("phi")?.apply(sample.h("P")?)?;
            Margin::loewner(&HermitianMatrix::scalar(image.dim(), 0.0), &image)
        },
    )
}

/// `Φ(αA + B) = αΦ(A) + Φ(B)`.
pub fn map_linearity(map: MapChoice) -> Probe {
    Probe::new(
        format!("maps/linearity/{map}"),
        "positive maps are linear",
        move |s, n| {
            let (phi, input) = map.instantiate(s, n)?;
            let mut sample = Sample::new(n);
            sample.set_map("phi", phi);
            sample.set_h("A", s.hermitian_direction(input));
            sample.set_h("B", s.hermitian_direction(input));
            sample.set_param("alpha", s.uniform(-3.0, 3.0));
            Ok(sample)
        },
        |sample, _| {
            let phi = sample.map("phi")?;
            let (a, b, alpha) = (sample.h("A")?, sample.h("B")?, sample.param("alpha")?);
            let lhs = phi.apply(&(&a.scale(alpha) + b))?;
            let rhs = &phi.apply(a)?.scale(alpha) + &phi.apply(b)?;
            Margin::loewner_eq(&lhs, &rhs)
        },
    )
    .tol(1e-10)
}

/// `(A ⊗ B)(C ⊗ D) = AC ⊗ BD`.
pub fn kron_mixed_product() -> Probe {
    Probe::new(
        "maps/kron-mixed-product",
        "mixed-product property of the Kronecker product",
        |s, n| {
            let mut sample = Sample::new(n);
            for name in ["A", "B", "C", "D"] {
                sample.set_m(name, s.gaussian(n, n));
            }
            Ok(sample)
        },
        |sample, _| {
            let (a, b, c, d) = (sample.m("A")?, sample.m("B")?, sample.m("C")?, sample.m("D")?);
            let lhs = &a.kron(b) * &c.kron(d);
            let rhs = (a * c).kron(&(b * d));
            let scale = lhs.frobenius_norm();
            Ok(Margin::new(-(&lhs - &rhs).max_abs(), scale))
        },
    )
    .max_dim(4)
}

// ---------------------------------------------------------------------------
// Falsification targets

/// `(A, B) ↦ (A² # B²)^{1/2}`, convex only in the commutative case.
pub fn sqrt_of_geometric_squares() -> Functional {
    Functional::operator(|v| {
        let sq = |m: &H| m.pow(2.0);
        weighted_geometric(&sq(&v[0])?, &sq(&v[1])?, 0.5)?.sqrt()
    })
}

/// Search for a convexity violation of [`sqrt_of_geometric_squares`].
pub fn search_sqrt_geo() -> Probe {
    joint_convexity_probe(
        "search-sqrt-geo",
        "(A, B) ↦ (A² # B²)^(1/2) is not jointly convex",
        sqrt_of_geometric_squares(),
        ConvexityMode::Convex,
        2,
    )
    .expecting_violation()
    .dims(2, 2)
    .trials(1000)
    .refine(200)
}

/// `(A, B) ↦ A ∇ B` is affine, so convexity never fails.
pub fn affine_sanity() -> Probe {
    joint_convexity_probe(
        "sanity/arithmetic-mean-affine",
        "(A, B) ↦ A ∇ B is jointly convex",
        Functional::operator(|v| weighted_arithmetic(&v[0], &v[1], 0.5)),
        ConvexityMode::Convex,
        2,
    )
}

/// `Tr` of a real-valued congruence product, as used by the Lieb forms.
pub fn trace_of(m: &crate::matcore::Matrix) -> Result<f64> {
    real_trace(m.trace())
}
