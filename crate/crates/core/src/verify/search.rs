//! Local refinement of witnesses and randomized falsification.

use serde::{Deserialize, Serialize};

use super::probes::{carlen_lieb_convexity, joint_convexity_probe, ConvexityMode, Functional};
use super::{run_probe, InequalityReport, Probe, ProbeConfig, Refinement, Sampler, Witness};
use crate::error::Result;
use crate::matcore::HermitianMatrix;

const STREAM_OFFSET: u64 = 1 << 63;

/// Hill-climbing on the margin, starting from `start`.
///
/// Each step picks one Hermitian input `X = S S*` (`S = X^{1/2}`) and tries
/// `(S ± δE)(S ± δE)*` for a random complex direction `E`, keeping a move
/// that lowers the margin and leaves every input positive definite.
pub fn refine(probe: &Probe, start: &Witness, cfg: &ProbeConfig) -> (Witness, Refinement) {
    let mut s = Sampler::new(cfg.seed, STREAM_OFFSET + start.trial as u64, cfg.window.m, cfg.window.big_m, cfg.spectrum);
    let mut best = start.clone();
    let keys: Vec<String> = best.sample.hermitian.keys().cloned().collect();
    let mut step = 0.05;
    let mut accepted = 0;
    if !keys.is_empty() {
        for _ in 0..cfg.refine_steps {
            let key = &keys[s.index(keys.len())];
            let x = &best.sample.hermitian[key];
            let n = x.dim();
            let e = s.gaussian(n, n);
            let Ok(root) = x.sqrt() else { break };
            let root = root.into_matrix();
            let scale = step * root.frobenius_norm() / e.frobenius_norm();
            let mut improved = false;
            for sign in [1.0, -1.0] {
                let factor = &root + &e.scale(sign * scale);
                let Ok(moved) = HermitianMatrix::new(&factor * &factor.adjoint()) else { continue };
                if !moved.is_positive_definite().unwrap_or(false) {
                    continue;
                }
                let mut candidate = best.sample.clone();
                candidate.set_h(key.clone(), moved);
                if let Ok(m) = probe.eval(&candidate, best.lambda) {
                    if m.normalized().is_finite() && m.normalized() < best.normalized {
                        best.sample = candidate;
                        best.margin = m;
                        best.normalized = m.normalized();
                        best.tight = false;
                        best.refined = true;
                        improved = true;
                        break;
                    }
                }
            }
            if improved {
                accepted += 1;
                step = (step * 1.5).min(0.5);
            } else {
                step = (step * 0.8).max(1e-8);
            }
        }
    }
    let info = Refinement {
        steps: cfg.refine_steps,
        accepted,
        start: start.normalized,
        end: best.normalized,
    };
    (best, info)
}

/// Randomized search for a violation of the `mode` inequality of `f`; the
/// report passes iff one is found.
pub fn search_violations(
    id: &str,
    f: Functional,
    mode: ConvexityMode,
    slots: usize,
    config: &ProbeConfig,
) -> Result<InequalityReport> {
    let probe = joint_convexity_probe(id, format!("search for a {mode} violation"), f, mode, slots)
        .expecting_violation()
        .refine(200);
    run_probe(&probe, config)
}

/// One `p` of the Carlen–Lieb scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub p: f64,
    /// `concave` for `p ≤ 1`, `convex` for `1 < p ≤ 2`, `neither` above.
    pub regime: String,
    pub convex_violations: usize,
    pub concave_violations: usize,
    /// Violations of the regime's own statement; for `neither`, the total.
    pub violations: usize,
    pub worst_convex: f64,
    pub worst_concave: f64,
}

pub fn carlen_lieb_regime(p: f64) -> &'static str {
    if p <= 1.0 {
        "concave"
    } else if p <= 2.0 {
        "convex"
    } else {
        "neither"
    }
}

/// Convexity and concavity search for `(A₁, A₂) ↦ Tr (A₁^p + A₂^p)^{1/p}` at
/// each `p` of `p_grid`.
pub fn scan_carlen_lieb(p_grid: &[f64], config: &ProbeConfig) -> Result<Vec<ScanRow>> {
    p_grid
        .iter()
        .map(|&p| {
            let convex = run_probe(&carlen_lieb_convexity(p, ConvexityMode::Convex), config)?;
            let concave = run_probe(&carlen_lieb_convexity(p, ConvexityMode::Concave), config)?;
            let regime = carlen_lieb_regime(p);
            let violations = match regime {
                "concave" => concave.violations,
                "convex" => convex.violations,
                _ => convex.violations + concave.violations,
            };
            Ok(ScanRow {
                p,
                regime: regime.into(),
                convex_violations: convex.violations,
                concave_violations: concave.violations,
                violations,
                worst_convex: convex.worst_margin,
                worst_concave: concave.worst_margin,
            })
        })
        .collect()
}
