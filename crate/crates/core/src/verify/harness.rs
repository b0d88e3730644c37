use std::time::Instant;

use rayon::prelude::*;

use super::{search, ErrorWitness, InequalityReport, Margin, Probe, ProbeConfig, Refinement, Sample, Sampler, Witness};
use crate::error::{Error, Result};
use crate::matcore::with_tight_tolerance;

/// Margins within this many tolerances of zero are re-evaluated tightly.
const MARGINAL_FACTOR: f64 = 10.0;

/// Number of worst trials used as hill-climbing starts.
const REFINE_STARTS: usize = 8;

struct Scored {
    lambda: f64,
    margin: Margin,
    tight: bool,
}

struct Trial {
    index: usize,
    sample: Option<Sample>,
    marginal: usize,
    outcome: std::result::Result<Scored, (Option<f64>, String)>,
}

fn finite(m: Margin) -> Result<Margin> {
    if m.normalized().is_finite() {
        Ok(m)
    } else {
        Err(Error::InvalidParameter(format!("non-finite margin {m:?}")))
    }
}

/// Evaluates one `(sample, λ)`; returns the margin and whether it was re-run.
fn score(probe: &Probe, sample: &Sample, lambda: f64, tol: f64) -> Result<(Margin, bool)> {
    let m = finite(probe.eval(sample, lambda)?)?;
    if m.normalized().abs() <= MARGINAL_FACTOR * tol {
        let tight = finite(with_tight_tolerance(|| probe.eval(sample, lambda))?)?;
        log::debug!("{}: marginal trial re-run, {:e} -> {:e}", probe.id, m.normalized(), tight.normalized());
        return Ok((tight, true));
    }
    Ok((m, false))
}

fn run_trial(probe: &Probe, config: &ProbeConfig, index: usize) -> Trial {
    let dims: Vec<usize> = config.dims().collect();
    let dim = dims[index % dims.len()];
    let mut sampler = Sampler::for_trial(config, index);
    let sample = match probe.draw(&mut sampler, dim) {
        Ok(s) => s,
        Err(e) => {
            return Trial {
                index,
                sample: None,
                marginal: 0,
                outcome: Err((None, format!("sampling failed: {e}"))),
            }
        }
    };
    let mut best: Option<Scored> = None;
    let mut marginal = 0;
    for &lambda in &config.lambda_grid {
        match score(probe, &sample, lambda, config.tol) {
            Ok((margin, tight)) => {
                marginal += usize::from(tight);
                if best.as_ref().is_none_or(|b| margin.normalized() < b.margin.normalized()) {
                    best = Some(Scored { lambda, margin, tight });
                }
            }
            Err(e) => {
                return Trial {
                    index,
                    sample: Some(sample),
                    marginal,
                    outcome: Err((Some(lambda), e.to_string())),
                }
            }
        }
    }
    Trial {
        index,
        sample: Some(sample),
        marginal,
        outcome: best.ok_or((None, "empty lambda grid".to_string())),
    }
}

/// Runs every trial of `probe` under `config` (after the probe's overrides).
///
/// Trials are independent and seeded by `(seed, trial index)`, so the report
/// does not depend on the number of worker threads.
pub fn run_probe(probe: &Probe, config: &ProbeConfig) -> Result<InequalityReport> {
    let start = Instant::now();
    let cfg = probe.effective_config(config);
    cfg.validate()?;
    let trials: Vec<Trial> = (0..cfg.trials).into_par_iter().map(|i| run_trial(probe, &cfg, i)).collect();

    let tol = cfg.tol;
    let mut violations = 0;
    let mut errors = 0;
    let mut marginal_count = 0;
    let mut worst: Option<(usize, Scored)> = None;
    let mut worst_secondary: Option<f64> = None;
    let mut error_witness = None;
    let mut samples: Vec<Option<Sample>> = Vec::with_capacity(trials.len());
    let mut ranked: Vec<(f64, usize, f64, Margin, bool)> = Vec::new();
    for t in trials {
        marginal_count += t.marginal;
        match t.outcome {
            Ok(scored) => {
                let n = scored.margin.normalized();
                if n < -tol {
                    violations += 1;
                }
                if let Some(s) = scored.margin.secondary {
                    worst_secondary = Some(worst_secondary.map_or(s, |w: f64| w.min(s)));
                }
                ranked.push((n, t.index, scored.lambda, scored.margin, scored.tight));
                if worst.as_ref().is_none_or(|(_, w)| n < w.margin.normalized()) {
                    worst = Some((t.index, scored));
                }
            }
            Err((lambda, message)) => {
                errors += 1;
                if error_witness.is_none() {
                    error_witness = Some(ErrorWitness {
                        trial: t.index,
                        lambda,
                        message,
                        sample: t.sample.clone(),
                    });
                }
            }
        }
        samples.push(t.sample);
    }

    let mut witness = worst.as_ref().and_then(|(i, s)| {
        samples[*i].as_ref().map(|sample| Witness {
            trial: *i,
            lambda: s.lambda,
            margin: s.margin,
            normalized: s.margin.normalized(),
            tight: s.tight,
            refined: false,
            sample: sample.clone(),
        })
    });
    let mut refinement = None;
    if cfg.refine_steps > 0 && !ranked.is_empty() {
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let starts: Vec<Witness> = ranked
            .iter()
            .take(REFINE_STARTS)
            .filter_map(|&(n, i, lambda, margin, tight)| {
                samples[i].as_ref().map(|sample| Witness {
                    trial: i,
                    lambda,
                    margin,
                    normalized: n,
                    tight,
                    refined: false,
                    sample: sample.clone(),
                })
            })
            .collect();
        let results: Vec<(Witness, Refinement)> = starts.par_iter().map(|w| search::refine(probe, w, &cfg)).collect();
        let before = witness.as_ref().map_or(f64::MAX, |w| w.normalized);
        if let Some((refined, info)) = results.into_iter().reduce(|a, b| if b.0.normalized < a.0.normalized { b } else { a }) {
            if refined.normalized < before {
                if refined.normalized < -tol && before >= -tol {
                    violations += 1;
                }
                witness = Some(refined);
            }
            refinement = Some(info);
        }
    }
    let worst_margin = witness.as_ref().map_or(f64::MAX, |w| w.normalized);
    if violations == 0 {
        witness = None;
    }
    let passed = if probe.expect_violation {
        violations > 0
    } else {
        violations == 0 && errors == 0
    };
    Ok(InequalityReport {
        theorem: probe.id.clone(),
        description: probe.description.clone(),
        trials: cfg.trials,
        violations,
        worst_margin,
        worst_secondary,
        marginal_count,
        errors,
        expect_violation: probe.expect_violation,
        passed,
        seed: cfg.seed,
        config: cfg,
        witness,
        error_witness,
        refinement,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

/// Re-evaluates a witness exactly as the harness did.
pub fn replay(probe: &Probe, witness: &Witness) -> Result<Margin> {
    if witness.tight {
        with_tight_tolerance(|| probe.eval(&witness.sample, witness.lambda))
    } else {
        probe.eval(&witness.sample, witness.lambda)
    }
}
