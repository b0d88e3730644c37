use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use lowner_core::constants::{kantorovich, specht};
use lowner_core::functionals::{f1, f2, f3, lieb_trace, op_determinant, FunctionalSpec, LiebMode};
use lowner_core::matcore::{read_hermitian, MatrixLiteral};
use lowner_core::verify::probes::{
    determinant_minkowski, minkowski_sandwich, reverse_jensen, reverse_jensen_regime, trace_minkowski_bounds,
};
use lowner_core::verify::{registry, resolve, run_checks, run_probe, scan_carlen_lieb, Check, MapChoice, SuiteReport};
use lowner_core::ProbeConfig;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cli::{Family, Functional, Lieb};

/// Exit status plus the text written to the result sink.
pub struct Output {
    pub body: String,
    pub code: i32,
}

fn same_exponent(segment: &str, p: f64) -> bool {
    segment.parse::<f64>().is_ok_and(|x| x == p)
}

pub fn verify(id: &str, p: Option<f64>, config: &ProbeConfig) -> anyhow::Result<SuiteReport> {
    let mut checks = resolve(id)?;
    if let Some(p) = p {
        checks.retain(|c: &Check| c.id().rsplit('/').next().is_some_and(|seg| same_exponent(seg, p)));
        if checks.is_empty() {
            return Err(lowner_core::Error::UnknownTheorem(format!("{id} with p = {p}")).into());
        }
    }
    let report = run_checks(&checks, config)?;
    eprintln!(
        "{}: {}/{} checks passed",
        if report.passed { "PASS" } else { "FAIL" },
        report.total - report.failed.len(),
        report.total
    );
    for id in &report.failed {
        eprintln!("  failed: {id}");
    }
    Ok(report)
}

#[derive(Serialize)]
struct Listed<'a> {
    id: &'a str,
    group: &'a str,
    description: &'a str,
}

pub fn list() -> anyhow::Result<String> {
    let all = registry();
    let rows: Vec<Listed> = all
        .iter()
        .map(|c| Listed {
            id: c.id(),
            group: c.group(),
            description: c.description(),
        })
        .collect();
    Ok(serde_json::to_string_pretty(&rows)?)
}

/// Registered ids on standard error, for unknown-id diagnostics.
pub fn print_registry() {
    eprintln!("registered checks (select with `all`, a group, an id prefix or an exact id):");
    for c in registry() {
        eprintln!("  {}", c.id());
    }
}

pub fn eval(spec: Option<&Path>, functional: Functional, mode: Lieb, matrices: &[PathBuf]) -> anyhow::Result<Value> {
    let spec = match spec {
        Some(p) => FunctionalSpec::read(p).with_context(|| format!("reading {}", p.display()))?,
        None => FunctionalSpec::default(),
    };
    let read = |i: usize| -> anyhow::Result<_> {
        let path = matrices.get(i).context("this functional needs two matrices")?;
        read_hermitian(path).with_context(|| format!("reading {}", path.display()))
    };
    let a = read(0)?;
    let matrix = |m: &lowner_core::HermitianMatrix| serde_json::to_value(MatrixLiteral::from(m));
    let value = match functional {
        Functional::F1 => matrix(&f1(&spec, &a, &read(1)?)?)?,
        Functional::F2 => matrix(&f2(&spec, &a, &read(1)?)?)?,
        Functional::F3 => matrix(&f3(&spec, &a)?)?,
        Functional::TraceF2 => json!(f2(&spec, &a, &read(1)?)?.trace()),
        Functional::Determinant => matrix(&op_determinant(&spec.phi, &a)?)?,
        Functional::Lieb => {
            let k = spec.k.as_ref().context("the Lieb form needs `K` in the spec")?;
            let p = spec.p.context("the Lieb form needs `p` in the spec")?;
            let mode = match mode {
                Lieb::Concave => LiebMode::Concave,
                Lieb::Convex => LiebMode::Convex,
            };
            json!(lieb_trace(&spec.phi, &spec.psi, &spec.f, &spec.g, k, p, mode, &a, &read(1)?)?)
        }
    };
    Ok(json!({ "functional": format!("{functional:?}").to_lowercase(), "value": value }))
}

pub fn constants(h: f64, p: f64) -> anyhow::Result<Value> {
    if !(h > 0.0 && h.is_finite()) {
        bail!("h must be positive and finite, got {h}");
    }
    Ok(json!({
        "h": h,
        "p": p,
        "kantorovich": kantorovich(h, p),
        "specht": specht(h),
        "specht_hp": specht(h.powf(p)),
    }))
}

const CSV_HEADER: &str = "p,regime,convex_violations,concave_violations,violations,worst_margin";

pub fn scan(family: Family, p_grid: &[f64], map: &str, config: &ProbeConfig) -> anyhow::Result<Output> {
    if p_grid.is_empty() {
        bail!("empty p grid");
    }
    let mut lines = vec![CSV_HEADER.to_string()];
    if family == Family::CarlenLieb {
        for row in scan_carlen_lieb(p_grid, config)? {
            eprintln!("p = {}: {} ({} violations)", row.p, row.regime, row.violations);
            lines.push(format!(
                "{},{},{},{},{},{}",
                row.p,
                row.regime,
                row.convex_violations,
                row.concave_violations,
                row.violations,
                row.worst_convex.min(row.worst_concave)
            ));
        }
    } else {
        let map: MapChoice = map.parse()?;
        for &p in p_grid {
            let probe = match family {
                Family::ReverseJensen => reverse_jensen(p, map.clone()),
                Family::MinkowskiSandwich => minkowski_sandwich(p, map.clone()),
                Family::TraceMinkowski => trace_minkowski_bounds(p, map.clone()),
                Family::DeterminantMinkowski => determinant_minkowski(p, map.clone()),
                Family::CarlenLieb => unreachable!(),
            };
            let r = run_probe(&probe, config)?;
            eprintln!("{}", r.summary());
            let regime = match family {
                Family::ReverseJensen | Family::MinkowskiSandwich => reverse_jensen_regime(p).to_string(),
                _ => String::new(),
            };
            lines.push(format!("{p},{regime},,,{},{}", r.violations, r.worst_margin));
        }
    }
    lines.push(String::new());
    Ok(Output {
        body: lines.join("\n"),
        code: 0,
    })
}
