//! Acceptance criteria 1–12, one PASS/FAIL line each. Exits non-zero if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use lowner_core::constants::{kantorovich, kantorovich_specht_limit, specht};
use lowner_core::verify::{
    reproduce_counterexample_minkowski, reproduce_counterexample_sqrt_geo, run_suite, scan_carlen_lieb, CheckOutcome,
    SuiteReport,
};
use lowner_core::ProbeConfig;
use serde_json::Value;

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

/// 200 trials, dims 2–5, tol 1e-9.
fn config() -> ProbeConfig {
    ProbeConfig {
        trials: 200,
        dim_min: 2,
        dim_max: 5,
        tol: 1e-9,
        seed: 42,
        ..Default::default()
    }
}

fn total_violations(r: &SuiteReport) -> usize {
    r.outcomes
        .iter()
        .map(|o| match o {
            CheckOutcome::Randomized(r) if !r.expect_violation => r.violations + r.errors,
            _ => 0,
        })
        .sum()
}

fn suite(groups: &[&str], expect_checks: usize, limit: Option<Duration>) -> Verdict {
    let start = Instant::now();
    let r = match run_suite(groups, &config()) {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("error: {e}")),
    };
    let elapsed = start.elapsed();
    let fast = limit.is_none_or(|l| elapsed < l);
    let v = total_violations(&r);
    verdict(
        r.passed && v == 0 && r.total >= expect_checks && fast,
        format!(
            "{} checks, {} failed {:?}, {} violations, {:.1} s",
            r.total,
            r.failed.len(),
            r.failed,
            v,
            elapsed.as_secs_f64()
        ),
    )
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let g = reproduce_counterexample_sqrt_geo().expect("golden run");
    let elapsed = start.elapsed();
    let lhs = g.lhs.to_matrix().unwrap();
    let rhs = g.rhs.to_matrix().unwrap();
    let want_lhs = [[1.7915, -0.3082], [-0.3082, 2.1739]];
    let want_rhs = [[1.6622, -0.3026], [-0.3026, 2.1916]];
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            worst = worst.max((lhs[(i, j)].re - want_lhs[i][j]).abs());
            worst = worst.max((rhs[(i, j)].re - want_rhs[i][j]).abs());
        }
    }
    verdict(
        worst <= 5e-4 && !g.verdict && elapsed < Duration::from_secs(1),
        format!("max entry error {worst:.2e}, Löwner comparison {}, {:?}", g.verdict, elapsed),
    )
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let g = reproduce_counterexample_minkowski().expect("golden run");
    let elapsed = start.elapsed();
    let d = g.difference.to_matrix().unwrap();
    let want = [
        [0.180869, -0.119435, -0.238421],
        [-0.119435, 0.501802, 0.0713442],
        [-0.238421, 0.0713442, 0.188193],
    ];
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            worst = worst.max((d[(i, j)].re - want[i][j]).abs());
        }
    }
    let printed = [-0.0562778, 0.32367, 0.603875];
    let eig_err: Vec<f64> = g.eigenvalues.iter().zip(printed).map(|(c, p)| (c - p).abs()).collect();
    let eig_ok = eig_err.iter().all(|&e| e <= 1e-5);
    verdict(
        worst <= 5e-6 && eig_ok && g.eigenvalues[0] < 0.0 && elapsed < Duration::from_secs(1),
        format!(
            "max entry error {worst:.2e}; eigenvalues {:?} vs printed {:?} (errors {:.1e}, {:.1e}, {:.1e}); {:?}",
            g.eigenvalues, printed, eig_err[0], eig_err[1], eig_err[2], elapsed
        ),
    )
}

fn criterion_6() -> Verdict {
    let s = suite(&["kantorovich-identities"], 3, None);
    let spot = kantorovich(4.0, 2.0);
    let mut limit_worst: f64 = 0.0;
    for h in [1.5, 2.0, 5.0] {
        for p in [0.5, 1.0, 2.0] {
            let k = kantorovich_specht_limit(h, p, 1e-5).unwrap();
            limit_worst = limit_worst.max((k - specht(f64::powf(h, p))).abs());
        }
    }
    verdict(
        s.ok && close(spot, 1.5625, 1e-12) && limit_worst <= 1e-4,
        format!("{}; K(4,2) = {spot}; limit error {limit_worst:.2e}", s.detail),
    )
}

fn criterion_11() -> Verdict {
    let r = match run_suite(&["search-sqrt-geo", "search-operator-minkowski"], &config()) {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("error: {e}")),
    };
    let mut details = Vec::new();
    let mut ok = r.passed;
    for o in &r.outcomes {
        if let CheckOutcome::Randomized(rep) = o {
            let c = &rep.config;
            ok &= rep.violations > 0 && c.trials <= 1000;
            details.push(format!(
                "{}: {}/{} at dim {}..={}",
                rep.theorem, rep.violations, rep.trials, c.dim_min, c.dim_max
            ));
        }
    }
    match scan_carlen_lieb(&[3.0], &config()) {
        Ok(rows) => {
            let row = &rows[0];
            ok &= row.convex_violations > 0 && row.concave_violations > 0;
            details.push(format!(
                "Carlen–Lieb p=3: {} convexity, {} concavity violations",
                row.convex_violations, row.concave_violations
            ));
        }
        Err(e) => {
            ok = false;
            details.push(format!("scan error: {e}"));
        }
    }
    verdict(ok, details.join("; "))
}

fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("elapsed_ms");
            map.values_mut().for_each(strip_timing);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

fn criterion_12() -> Verdict {
    let run = || -> Result<(Vec<u8>, Duration, bool), String> {
        let start = Instant::now();
        let out = Command::new(env!("CARGO_BIN_EXE_lowner"))
            .args(["verify", "all", "--seed", "7"])
            .env("RUST_LOG", "warn")
            .output()
            .map_err(|e| e.to_string())?;
        Ok((out.stdout, start.elapsed(), out.status.success()))
    };
    let (a, ta, ok_a) = match run() {
        Ok(x) => x,
        Err(e) => return verdict(false, e),
    };
    let (b, tb, _) = match run() {
        Ok(x) => x,
        Err(e) => return verdict(false, e),
    };
    let normalize = |bytes: &[u8]| -> Option<String> {
        let mut v: Value = serde_json::from_slice(bytes).ok()?;
        strip_timing(&mut v);
        serde_json::to_string(&v).ok()
    };
    let (na, nb) = (normalize(&a), normalize(&b));
    let same = na.is_some() && na == nb;
    let budget = Duration::from_secs(300);
    verdict(
        same && ta < budget && tb < budget,
        format!(
            "identical reports: {same}; suite passed: {ok_a}; {} bytes; {:.1} s and {:.1} s",
            a.len(),
            ta.as_secs_f64(),
            tb.as_secs_f64()
        ),
    )
}

fn main() {
    let criteria: Vec<(u32, &str, Box<dyn Fn() -> Verdict>)> = vec![
        (1, "square-root geometric-mean counterexample", Box::new(criterion_1)),
        (2, "operator Minkowski counterexample", Box::new(criterion_2)),
        (
            3,
            "mean axioms and sandwiches",
            Box::new(|| suite(&["mean-axioms"], 60, Some(Duration::from_secs(60)))),
        ),
        (4, "log-convexity lemmas", Box::new(|| suite(&["log-convexity-lemmas"], 10, None))),
        (5, "operator joint log-convexity", Box::new(|| suite(&["operator-log-convexity"], 6, None))),
        (6, "Kantorovich and Specht identities", Box::new(criterion_6)),
        (7, "reverse Jensen", Box::new(|| suite(&["reverse-jensen"], 24, None))),
        (8, "Minkowski sandwiches", Box::new(|| suite(&["minkowski-sandwich"], 30, None))),
        (9, "operator-valued determinant", Box::new(|| suite(&["determinant"], 20, None))),
        (
            10,
            "trace functionals",
            Box::new(|| {
                suite(
                    &["trace-convexity", "lieb-trace", "tensor-log-convexity", "carlen-lieb", "trace-minkowski"],
                    100,
                    None,
                )
            }),
        ),
        (11, "expected violations", Box::new(criterion_11)),
        (12, "determinism of `verify all`", Box::new(criterion_12)),
    ];
    let mut failed = Vec::new();
    for (n, name, check) in &criteria {
        let v = check();
        println!("{} criterion {n:>2} ({name}): {}", if v.ok { "PASS" } else { "FAIL" }, v.detail);
        if !v.ok {
            failed.push(*n);
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
