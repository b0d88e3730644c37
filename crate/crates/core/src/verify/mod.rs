//! Randomized verification of operator and trace inequalities.
//!
//! A [`Probe`] draws a [`Sample`] of matrices for each trial and evaluates a
//! signed [`Margin`]; [`run_probe`] drives the trials in parallel and reduces
//! them into an [`InequalityReport`].

mod harness;
pub mod golden;
pub mod probes;
pub mod registry;
pub mod sampling;
pub mod search;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::PositiveLinearMap;
use crate::matcore::{HermitianMatrix, Matrix, SpectralBounds};

pub use golden::{reproduce_counterexample_minkowski, reproduce_counterexample_sqrt_geo, GoldenEntry, GoldenReport};
pub use harness::{replay, run_probe};
pub use probes::{check_joint_convexity, ConvexityMode, MapChoice};
pub use registry::{registry, resolve, run_check, run_checks, run_suite, Check, CheckOutcome, SuiteReport};
pub use sampling::{sample_pd, Sampler, SpectrumLaw};
pub use search::{scan_carlen_lieb, search_violations, ScanRow};

/// Sampling contract shared by every probe.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeConfig {
    pub dim_min: usize,
    pub dim_max: usize,
    pub trials: usize,
    /// Convexity weights `λ`; probes that do not interpolate ignore it.
    pub lambda_grid: Vec<f64>,
    pub tol: f64,
    pub seed: u64,
    pub window: SpectralBounds,
    pub spectrum: SpectrumLaw,
    /// Hill-climbing steps applied to the worst trial; zero disables it.
    pub refine_steps: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            dim_min: 2,
            dim_max: 5,
            trials: 200,
            lambda_grid: vec![0.5],
            tol: 1e-9,
            seed: 42,
            window: SpectralBounds { m: 0.5, big_m: 2.0 },
            spectrum: SpectrumLaw::Uniform,
            refine_steps: 0,
        }
    }
}

impl ProbeConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.dim_min == 0 || self.dim_min > self.dim_max {
            return bad(format!("invalid dimension range {}..={}", self.dim_min, self.dim_max));
        }
        SpectralBounds::new(self.window.m, self.window.big_m)?;
        if self.lambda_grid.is_empty() || self.lambda_grid.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return bad(format!("lambda grid must be a non-empty subset of [0, 1], got {:?}", self.lambda_grid));
        }
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return bad(format!("tolerance must be finite and non-negative, got {}", self.tol));
        }
        Ok(())
    }

    pub fn dims(&self) -> RangeInclusive<usize> {
        self.dim_min..=self.dim_max
    }

    /// `{0.1, 0.2, …, 0.9}`.
    pub fn full_lambda_grid() -> Vec<f64> {
        (1..10).map(|i| i as f64 / 10.0).collect()
    }
}

/// Signed slack of an inequality `lhs ≤ rhs`; negative means violated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    /// `λ_min(rhs − lhs)` or `rhs − lhs`.
    pub value: f64,
    /// Magnitude of the compared quantities.
    pub scale: f64,
    /// Normalized margin of a companion inequality, recorded but not judged.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub secondary: Option<f64>,
}

impl Margin {
    pub fn new(value: f64, scale: f64) -> Self {
        Self {
            value,
            scale,
            secondary: None,
        }
    }

    /// `value / (1 + scale)`; a violation is `normalized < −tol`.
    pub fn normalized(&self) -> f64 {
        self.value / (1.0 + self.scale)
    }

    /// `lhs ≤ rhs` in the Löwner order.
    pub fn loewner(lhs: &HermitianMatrix, rhs: &HermitianMatrix) -> Result<Self> {
        let value = rhs.try_sub(lhs)?.min_eigenvalue()?;
        Ok(Self::new(value, lhs.frobenius_norm().max(rhs.frobenius_norm())))
    }

    /// `lhs = rhs` in the Löwner order: `−||lhs − rhs||_op`.
    pub fn loewner_eq(lhs: &HermitianMatrix, rhs: &HermitianMatrix) -> Result<Self> {
        let value = -rhs.try_sub(lhs)?.operator_norm()?;
        Ok(Self::new(value, lhs.frobenius_norm().max(rhs.frobenius_norm())))
    }

    pub fn scalar(lhs: f64, rhs: f64) -> Self {
        Self::new(rhs - lhs, lhs.abs().max(rhs.abs()))
    }

    /// `−|lhs − rhs|` relative to the magnitudes.
    pub fn scalar_eq(lhs: f64, rhs: f64) -> Self {
        Self::new(-(lhs - rhs).abs(), lhs.abs().max(rhs.abs()))
    }

    pub fn with_secondary(mut self, s: f64) -> Self {
        self.secondary = Some(s);
        self
    }

    /// The tighter of two margins; secondaries combine by minimum.
    pub fn and(self, other: Margin) -> Margin {
        let secondary = match (self.secondary, other.secondary) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let mut worst = if other.normalized() < self.normalized() || other.normalized().is_nan() {
            other
        } else {
            self
        };
        worst.secondary = secondary;
        worst
    }

    /// Combines `margins`, failing on an empty list.
    pub fn all(margins: impl IntoIterator<Item = Margin>) -> Result<Margin> {
        margins
            .into_iter()
            .reduce(Margin::and)
            .ok_or_else(|| Error::InvalidParameter("no inequality evaluated".into()))
    }
}

/// Inputs of one trial, keyed by name so witnesses are self-describing.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub hermitian: BTreeMap<String, HermitianMatrix>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub general: BTreeMap<String, Matrix>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub maps: BTreeMap<String, PositiveLinearMap>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

fn missing(kind: &str, name: &str) -> Error {
    Error::InvalidParameter(format!("sample has no {kind} named {name:?}"))
}

impl Sample {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            ..Self::default()
        }
    }

    pub fn set_h(&mut self, name: impl Into<String>, h: HermitianMatrix) {
        self.hermitian.insert(name.into(), h);
    }

    pub fn set_m(&mut self, name: impl Into<String>, m: Matrix) {
        self.general.insert(name.into(), m);
    }

    pub fn set_map(&mut self, name: impl Into<String>, map: PositiveLinearMap) {
        self.maps.insert(name.into(), map);
    }

    pub fn set_param(&mut self, name: impl Into<String>, v: f64) {
        self.params.insert(name.into(), v);
    }

    pub fn h(&self, name: &str) -> Result<&HermitianMatrix> {
        self.hermitian.get(name).ok_or_else(|| missing("matrix", name))
    }

    /// `prefix0, prefix1, …, prefix{count−1}`.
    pub fn hs(&self, prefix: &str, count: usize) -> Result<Vec<HermitianMatrix>> {
        (0..count).map(|i| self.h(&format!("{prefix}{i}")).cloned()).collect()
    }

    pub fn m(&self, name: &str) -> Result<&Matrix> {
        self.general.get(name).ok_or_else(|| missing("general matrix", name))
    }

    pub fn map(&self, name: &str) -> Result<&PositiveLinearMap> {
        self.maps.get(name).ok_or_else(|| missing("map", name))
    }

    pub fn param(&self, name: &str) -> Result<f64> {
        self.params.get(name).copied().ok_or_else(|| missing("parameter", name))
    }
}

/// Per-probe adjustments of the run configuration.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Overrides {
    /// Replaces the configured dimension range.
    pub dims: Option<(usize, usize)>,
    /// Caps the configured dimension range.
    pub max_dim: Option<usize>,
    pub window: Option<SpectralBounds>,
    pub spectrum: Option<SpectrumLaw>,
    pub trials: Option<usize>,
    pub tol: Option<f64>,
    pub refine_steps: Option<usize>,
}

pub type DrawFn = dyn Fn(&mut Sampler, usize) -> Result<Sample> + Send + Sync;
pub type EvalFn = dyn Fn(&Sample, f64) -> Result<Margin> + Send + Sync;

/// A randomized check: how to draw inputs and how to score them.
#[derive(Clone)]
pub struct Probe {
    pub id: String,
    pub description: String,
    /// Pass iff at least one violation is found.
    pub expect_violation: bool,
    /// Evaluate once per weight of the λ grid instead of once per trial.
    pub uses_lambda: bool,
    pub overrides: Overrides,
    draw: Arc<DrawFn>,
    eval: Arc<EvalFn>,
}

impl fmt::Debug for Probe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Probe")
            .field("id", &self.id)
            .field("expect_violation", &self.expect_violation)
            .field("uses_lambda", &self.uses_lambda)
            .field("overrides", &self.overrides)
            .finish_non_exhaustive()
    }
}

impl Probe {
    pub fn new(
        id: impl Into<String>,
        description: impl Into<String>,
        draw: impl Fn(&mut Sampler, usize) -> Result<Sample> + Send + Sync + 'static,
        eval: impl Fn(&Sample, f64) -> Result<Margin> + Send + Sync + 'static,
    ) -> Self {
        Self {
            id: id.into(),
            description: description.into(),
            expect_violation: false,
            uses_lambda: false,
            overrides: Overrides::default(),
            draw: Arc::new(draw),
            eval: Arc::new(eval),
        }
    }

    pub fn expecting_violation(mut self) -> Self {
        self.expect_violation = true;
        self
    }

    pub fn with_lambda(mut self) -> Self {
        self.uses_lambda = true;
        self
    }

    pub fn dims(mut self, lo: usize, hi: usize) -> Self {
        self.overrides.dims = Some((lo, hi));
        self
    }

    pub fn max_dim(mut self, n: usize) -> Self {
        self.overrides.max_dim = Some(n);
        self
    }

    pub fn window(mut self, m: f64, big_m: f64) -> Self {
        self.overrides.window = Some(SpectralBounds { m, big_m });
        self
    }

    pub fn spectrum(mut self, law: SpectrumLaw) -> Self {
        self.overrides.spectrum = Some(law);
        self
    }

    pub fn trials(mut self, n: usize) -> Self {
        self.overrides.trials = Some(n);
        self
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.overrides.tol = Some(tol);
        self
    }

    pub fn refine(mut self, steps: usize) -> Self {
        self.overrides.refine_steps = Some(steps);
        self
    }

    /// `config` with this probe's overrides applied.
    pub fn effective_config(&self, config: &ProbeConfig) -> ProbeConfig {
        let o = &self.overrides;
        let mut c = config.clone();
        if let Some((lo, hi)) = o.dims {
            c.dim_min = lo;
            c.dim_max = hi;
        }
        if let Some(cap) = o.max_dim {
            c.dim_max = c.dim_max.min(cap);
            c.dim_min = c.dim_min.min(c.dim_max);
        }
        if let Some(w) = o.window {
            c.window = w;
        }
        if let Some(law) = o.spectrum {
            c.spectrum = law;
        }
        if let Some(t) = o.trials {
            c.trials = t;
        }
        if let Some(t) = o.tol {
            c.tol = t;
        }
        if let Some(r) = o.refine_steps {
            c.refine_steps = c.refine_steps.max(r);
        }
        if !self.uses_lambda {
            c.lambda_grid = vec![0.5];
        }
        c
    }

    pub fn draw(&self, sampler: &mut Sampler, dim: usize) -> Result<Sample> {
        (self.draw)(sampler, dim)
    }

    pub fn eval(&self, sample: &Sample, lambda: f64) -> Result<Margin> {
        (self.eval)(sample, lambda)
    }
}

/// The worst violating trial, with everything needed to replay it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub trial: usize,
    pub lambda: f64,
    pub margin: Margin,
    pub normalized: f64,
    /// Evaluated with the tightened eigensolver tolerance.
    pub tight: bool,
    /// Produced by hill-climbing from the worst random trial.
    pub refined: bool,
    pub sample: Sample,
}

/// A trial whose evaluation failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorWitness {
    pub trial: usize,
    pub lambda: Option<f64>,
    pub message: String,
    pub sample: Option<Sample>,
}

/// Outcome of hill-climbing on the worst trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Refinement {
    pub steps: usize,
    pub accepted: usize,
    pub start: f64,
    pub end: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub theorem: String,
    pub description: String,
    pub trials: usize,
    pub violations: usize,
    /// Most negative normalized margin over all trials.
    pub worst_margin: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_secondary: Option<f64>,
    pub marginal_count: usize,
    pub errors: usize,
    pub expect_violation: bool,
    pub passed: bool,
    pub seed: u64,
    pub config: ProbeConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_witness: Option<ErrorWitness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refinement: Option<Refinement>,
    pub elapsed_ms: u64,
}

impl InequalityReport {
    /// One-line human summary.
    pub fn summary(&self) -> String {
        format!(
            "{} {}: {} trials, {} violations, {} errors, worst margin {:.3e}{}",
            if self.passed { "PASS" } else { "FAIL" },
            self.theorem,
            self.trials,
            self.violations,
            self.errors,
            self.worst_margin,
            if self.expect_violation { " (violation expected)" } else { "" },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margin_combination_keeps_the_worst() {
        let a = Margin::new(1.0, 0.0);
        let b = Margin::new(-1.0, 3.0).with_secondary(0.5);
        let c = a.and(b);
        assert_eq!(c.value, -1.0);
        assert_eq!(c.secondary, Some(0.5));
        assert_eq!(c.normalized(), -0.25);
    }

    #[test]
    fn config_validation() {
        assert!(ProbeConfig::default().validate().is_ok());
        let mut c = ProbeConfig::default();
        c.lambda_grid = vec![1.5];
        assert!(c.validate().is_err());
        c = ProbeConfig::default();
        c.trials = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn sample_round_trips_bit_exactly() {
        let mut s = Sampler::new(3, 1, 0.5, 2.0, SpectrumLaw::Uniform);
        let mut sample = Sample::new(3);
        sample.set_h("A", s.pd(3));
        sample.set_m("K", s.gaussian(3, 2));
        sample.set_param("t", s.uniform(0.0, 1.0));
        let json = serde_json::to_string(&sample).unwrap();
        let back: Sample = serde_json::from_str(&json).unwrap();
        assert_eq!(back, sample);
    }
}
