//! Named checks, grouped as `group/case`.

use serde::{Deserialize, Serialize};

use super::golden::{reproduce_counterexample_minkowski, reproduce_counterexample_sqrt_geo, GoldenReport};
use super::probes::*;
use super::{run_probe, InequalityReport, Probe, ProbeConfig};
use crate::error::{Error, Result};
use crate::functionals::LiebMode;
use crate::matcore::ScalarFunction;
use crate::means::OperatorMean;

/// A registered check: randomized probe or fixed-input reproduction.
#[derive(Clone, Debug)]
pub enum Check {
    Probe(Probe),
    Golden {
        id: &'static str,
        run: fn() -> Result<GoldenReport>,
    },
}

impl Check {
    pub fn id(&self) -> &str {
        match self {
            Check::Probe(p) => &p.id,
            Check::Golden { id, .. } => id,
        }
    }

    pub fn group(&self) -> &str {
        self.id().split('/').next().unwrap_or_default()
    }

    pub fn description(&self) -> &str {
        match self {
            Check::Probe(p) => &p.description,
            Check::Golden { .. } => "reproduction of a fixed numeric counterexample",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CheckOutcome {
    Randomized(InequalityReport),
    Golden(GoldenReport),
}

impl CheckOutcome {
    pub fn id(&self) -> &str {
        match self {
            CheckOutcome::Randomized(r) => &r.theorem,
            CheckOutcome::Golden(g) => &g.id,
        }
    }

    pub fn passed(&self) -> bool {
        match self {
            CheckOutcome::Randomized(r) => r.passed,
            CheckOutcome::Golden(g) => g.passed,
        }
    }

    pub fn summary(&self) -> String {
        match self {
            CheckOutcome::Randomized(r) => r.summary(),
            CheckOutcome::Golden(g) => g.summary(),
        }
    }

    /// Clears wall-clock fields so reports can be compared byte for byte.
    pub fn without_timing(mut self) -> Self {
        match &mut self {
            CheckOutcome::Randomized(r) => r.elapsed_ms = 0,
            CheckOutcome::Golden(g) => g.elapsed_ms = 0,
        }
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub passed: bool,
    pub total: usize,
    pub failed: Vec<String>,
    pub outcomes: Vec<CheckOutcome>,
}

fn mean(s: &str) -> OperatorMean {
    s.parse().expect("valid mean id")
}

fn f(s: &str) -> ScalarFunction {
    s.parse().expect("valid function id")
}

fn mean_axioms(out: &mut Vec<Check>) {
    for sigma in builtin_means() {
        out.push(Check::Probe(mean_joint_monotonicity(sigma.clone())));
        out.push(Check::Probe(mean_transformer(sigma.clone())));
        for map in [MapChoice::Avg(2), MapChoice::Pinch, MapChoice::Schur, MapChoice::Congruence] {
            out.push(Check::Probe(mean_through_map(map, sigma.clone())));
        }
        out.push(Check::Probe(mean_harmonic_interchange(sigma.clone())));
        out.push(Check::Probe(mean_adjoint_involution(sigma)));
    }
    out.push(Check::Probe(path_sandwich()));
    out.push(Check::Probe(path_monotone_in_r()));
    out.push(Check::Probe(harmonic_geometric_arithmetic()));
}

fn lemmas(out: &mut Vec<Check>) {
    for p in [0.3, 0.7, 1.0] {
        out.push(Check::Probe(lemma_decreasing_log_convex(p)));
        out.push(Check::Probe(lemma_monotone_log_concave(p)));
    }
    for h in ["sqrt", "log1p", "frac"] {
        out.push(Check::Probe(lemma_harmonic(f(h))));
    }
    out.push(Check::Probe(lemma_path_equivalence()));
}

fn operator_log(out: &mut Vec<Check>) {
    use MapChoice::*;
    let convex = [
        ("avg-avg-geo", Avg(2), Avg(2), "geo:0.5", "power:-1", "power:-1", "sqrt"),
        ("pinch-schur-harm", Pinch, Schur, "harm:0.5", "power:-0.5", "power:-0.7", "frac"),
        ("id-congr-path", Identity, Congruence, "path:0.5:0.3", "power:-0.3", "power:-0.3", "log1p"),
    ];
    let concave = [
        ("avg-avg-geo", Avg(2), Avg(2), "geo:0.5", "power:0.5", "power:0.5", "sqrt"),
        ("pinch-schur-harm", Pinch, Schur, "harm:0.5", "power:0.3", "sqrt", "id"),
        ("id-congr-arith", Identity, Congruence, "arith:0.4", "id", "power:0.7", "log1p"),
    ];
    for (is_convex, list) in [(true, convex), (false, concave)] {
        for (case, phi, psi, sigma, ff, g, h) in list {
            out.push(Check::Probe(operator_log_convexity(case, is_convex, phi, psi, mean(sigma), f(ff), f(g), f(h))));
        }
    }
}

fn kantorovich(out: &mut Vec<Check>) {
    out.push(Check::Probe(kantorovich_identities()));
    out.push(Check::Probe(kantorovich_specht_limit()));
    out.push(Check::Probe(kantorovich_spot_value()));
}

fn reverse_jensen_group(out: &mut Vec<Check>) {
    for p in [-2.0, -1.0, -0.5, 0.5, 1.0, 1.5, 2.0, 3.0] {
        for map in unital_maps() {
            out.push(Check::Probe(reverse_jensen(p, map)));
        }
    }
}

fn minkowski(out: &mut Vec<Check>) {
    for p in [-2.0, -1.0, -0.5, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0] {
        for map in unital_maps() {
            out.push(Check::Probe(minkowski_sandwich(p, map)));
        }
    }
    for pairs in [2, 3] {
        for p in [1.0, 1.5, 2.0, 3.0] {
            out.push(Check::Probe(minkowski_operator_sum(p, pairs)));
        }
    }
}

fn determinant(out: &mut Vec<Check>) {
    let maps = [MapChoice::Avg(2), MapChoice::Pinch, MapChoice::Schur, MapChoice::UnitalCongruence(2)];
    for map in &maps {
        for property in ["power", "homogeneity", "bounds"] {
            out.push(Check::Probe(determinant_property(property, map.clone())));
        }
        out.push(Check::Probe(determinant_specht(map.clone())));
    }
    for p in [1.0, 2.0, 3.0] {
        for map in [MapChoice::Avg(2), MapChoice::Pinch] {
            out.push(Check::Probe(determinant_minkowski(p, map)));
        }
    }
}

fn trace(out: &mut Vec<Check>) {
    for case in TraceCase::ALL {
        out.push(Check::Probe(trace_functional(case)));
    }
    for p in [-1.0, -0.5, 0.5, 1.0] {
        for map in unital_maps() {
            out.push(Check::Probe(trace_power_convexity(p, map)));
        }
    }
    for p in [-1.0, -0.5, 0.3, 0.5, 1.0] {
        out.push(Check::Probe(deformed_minkowski_trace(p, MapChoice::Avg(2))));
        out.push(Check::Probe(deformed_minkowski_trace(p, MapChoice::Schur)));
    }
}

fn lieb(out: &mut Vec<Check>) {
    for p in [0.25, 0.5, 0.75] {
        out.push(Check::Probe(lieb_concavity(p, false)));
    }
    out.push(Check::Probe(lieb_concavity(0.5, true)));
    let fs = [("id", "id"), ("id", "sqrt"), ("sqrt", "sqrt"), ("sqrt", "log1p")];
    let maps = [
        (MapChoice::Avg(2), MapChoice::Pinch),
        (MapChoice::Schur, MapChoice::UnitalCongruence(2)),
        (MapChoice::Pinch, MapChoice::Avg(2)),
        (MapChoice::UnitalCongruence(2), MapChoice::Schur),
    ];
    for mode in [LiebMode::Concave, LiebMode::Convex] {
        for ((f1, f2), (phi, psi)) in fs.iter().zip(maps.iter()) {
            out.push(Check::Probe(lieb_type(mode, f(f1), f(f2), phi.clone(), psi.clone())));
        }
    }
}

fn tensor(out: &mut Vec<Check>) {
    for k in [2, 3] {
        for pinched in [false, true] {
            out.push(Check::Probe(multilinear_geometric(k, pinched)));
            for part in [
                TensorPart::LogConvex,
                TensorPart::InverseLogConcave,
                TensorPart::TraceConvex(TensorTrace::Identity),
                TensorPart::TraceConvex(TensorTrace::Square),
                TensorPart::TraceConvex(TensorTrace::Exp),
            ] {
                out.push(Check::Probe(tensor_log_convexity(k, pinched, part)));
            }
        }
    }
    for lieb in [false, true] {
        for mode in [ConvexityMode::LogConcave, ConvexityMode::Concave] {
            out.push(Check::Probe(tensor_power_concavity(mode, lieb)));
        }
    }
    out.push(Check::Probe(tensor_power_concavity_beyond_unit_sum()));
}

fn carlen_lieb(out: &mut Vec<Check>) {
    for pairs in [2, 3] {
        for p in [0.3, 0.7, 1.0, 1.5, 2.0] {
            out.push(Check::Probe(carlen_lieb_minkowski(p, pairs)));
        }
    }
    for p in [0.3, 0.7, 1.0] {
        out.push(Check::Probe(carlen_lieb_convexity(p, ConvexityMode::Concave)));
    }
    for p in [1.0, 1.5, 2.0] {
        out.push(Check::Probe(carlen_lieb_convexity(p, ConvexityMode::Convex)));
    }
    out.push(Check::Probe(carlen_lieb_convexity(3.0, ConvexityMode::Convex)));
    out.push(Check::Probe(carlen_lieb_convexity(3.0, ConvexityMode::Concave)));
}

fn trace_minkowski(out: &mut Vec<Check>) {
    for p in [-2.0, -1.0, -0.5, 0.3, 0.5, 1.0, 1.5, 2.0, 3.0] {
        for map in unital_maps() {
            out.push(Check::Probe(trace_minkowski_bounds(p, map)));
        }
    }
    for pairs in [2, 3] {
        for p in [-1.0, 0.5, 1.0, 2.0, 3.0] {
            out.push(Check::Probe(trace_minkowski_pairs(p, pairs)));
        }
    }
}

fn maps(out: &mut Vec<Check>) {
    let all = [
        MapChoice::Identity,
        MapChoice::Avg(2),
        MapChoice::Avg(3),
        MapChoice::Pinch,
        MapChoice::Schur,
        MapChoice::Congruence,
        MapChoice::UnitalCongruence(2),
    ];
    for map in all {
        out.push(Check::Probe(map_positivity(map.clone())));
        out.push(Check::Probe(map_linearity(map)));
    }
    out.push(Check::Probe(kron_mixed_product()));
    out.push(Check::Probe(affine_sanity()));
}

fn falsification(out: &mut Vec<Check>) {
    out.push(Check::Probe(search_sqrt_geo()));
    out.push(Check::Probe(operator_minkowski(2.0, 2).dims(3, 3).trials(1000).refine(200)));
    out.push(Check::Golden {
        id: "counterexample-sqrt-geo",
        run: reproduce_counterexample_sqrt_geo,
    });
    out.push(Check::Golden {
        id: "counterexample-minkowski",
        run: reproduce_counterexample_minkowski,
    });
}

/// Every registered check, in a fixed order.
pub fn registry() -> Vec<Check> {
    let mut out = Vec::new();
    mean_axioms(&mut out);
    lemmas(&mut out);
    operator_log(&mut out);
    kantorovich(&mut out);
    reverse_jensen_group(&mut out);
    minkowski(&mut out);
    determinant(&mut out);
    trace(&mut out);
    lieb(&mut out);
    tensor(&mut out);
    carlen_lieb(&mut out);
    trace_minkowski(&mut out);
    maps(&mut out);
    falsification(&mut out);
    out
}

/// Checks selected by `id`: `all`, a group name, any `/`-prefix, or an
/// exact id.
pub fn resolve(id: &str) -> Result<Vec<Check>> {
    let all = registry();
    if id == "all" {
        return Ok(all);
    }
    let prefix = format!("{}/", id.trim_end_matches('/'));
    let hits: Vec<Check> = all.into_iter().filter(|c| c.id() == id || c.id().starts_with(&prefix)).collect();
    if hits.is_empty() {
        Err(Error::UnknownTheorem(id.to_string()))
    } else {
        Ok(hits)
    }
}

pub fn run_check(check: &Check, config: &ProbeConfig) -> Result<CheckOutcome> {
    match check {
        Check::Probe(p) => {
            let r = run_probe(p, config)?;
            log::info!("{}", r.summary());
            Ok(CheckOutcome::Randomized(r))
        }
        Check::Golden { run, .. } => {
            let g = run()?;
            log::info!("{}", g.summary());
            Ok(CheckOutcome::Golden(g))
        }
    }
}

/// Runs `checks` in order and collects the outcomes.
pub fn run_checks(checks: &[Check], config: &ProbeConfig) -> Result<SuiteReport> {
    let outcomes = checks.iter().map(|c| run_check(c, config)).collect::<Result<Vec<_>>>()?;
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed()).map(|o| o.id().to_string()).collect();
    Ok(SuiteReport {
        passed: failed.is_empty(),
        total: outcomes.len(),
        failed,
        outcomes,
    })
}

/// Runs every check selected by each of `ids`, in registry order per id.
pub fn run_suite(ids: &[&str], config: &ProbeConfig) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    for id in ids {
        checks.extend(resolve(id)?);
    }
    run_checks(&checks, config)
}
