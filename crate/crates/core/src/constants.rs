//! The generalized Kantorovich constant `K(h, p)` and the Specht ratio `S(h)`.
//!
//! Both are evaluated in log space so that large `h^p` does not overflow.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Width of the removable-singularity branches at `p = 0`, `p = 1`, `h = 1`.
pub const SINGULAR_EPS: f64 = 1e-8;

/// Generalized condition number `h = M / m`, normalized to `h ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ConditionNumber(f64);

impl ConditionNumber {
    /// Accepts any `h > 0`; values below one are replaced by `1 / h`.
    pub fn new(h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!("condition number must be positive, got {h}")));
        }
        Ok(Self(if h < 1.0 { 1.0 / h } else { h }))
    }

    pub fn from_bounds(m: f64, big_m: f64) -> Result<Self> {
        if !(m > 0.0 && big_m > 0.0) {
            return Err(Error::InvalidParameter(format!("bounds must be positive, got m={m}, M={big_m}")));
        }
        Self::new(big_m / m)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn kantorovich(self, p: f64) -> f64 {
        kantorovich(self.0, p)
    }

    pub fn specht(self) -> f64 {
        specht(self.0)
    }
}

impl TryFrom<f64> for ConditionNumber {
    type Error = Error;

    fn try_from(h: f64) -> Result<Self> {
        Self::new(h)
    }
}

impl From<ConditionNumber> for f64 {
    fn from(h: ConditionNumber) -> f64 {
        h.0
    }
}

/// `ln |e^x − 1|` for `x ≠ 0`.
fn ln_abs_expm1(x: f64) -> f64 {
    if x > 0.0 {
        x + (-(-x).exp_m1()).ln()
    } else {
        (-x.exp_m1()).ln()
    }
}

/// `ln K(e^l, p)` for `l = ln h`.
pub fn ln_kantorovich_from_ln_h(l: f64, p: f64) -> f64 {
    if p.abs() < SINGULAR_EPS || (p - 1.0).abs() < SINGULAR_EPS || l.abs() < SINGULAR_EPS {
        return 0.0;
    }
    // K(h, p) = K(1/h, p)
    let l = l.abs();
    // h^p − h = h (h^{p−1} − 1), h^p − 1, h − 1
    let ln_hp_minus_h = l + ln_abs_expm1((p - 1.0) * l);
    let ln_hp_minus_1 = ln_abs_expm1(p * l);
    let ln_h_minus_1 = ln_abs_expm1(l);
    let ln_p1 = (p - 1.0).abs().ln();
    let ln_p = p.abs().ln();
    ln_hp_minus_h - ln_p1 - ln_h_minus_1 + p * (ln_p1 - ln_p + ln_hp_minus_1 - ln_hp_minus_h)
}

/// `K(h, p) = (h^p − h) / ((p − 1)(h − 1)) · ((p − 1)/p · (h^p − 1)/(h^p − h))^p`.
///
/// Returns NaN for `h ≤ 0`.
pub fn kantorovich(h: f64, p: f64) -> f64 {
    if !(h > 0.0) {
        return f64::NAN;
    }
    ln_kantorovich_from_ln_h(h.ln(), p).exp()
}

/// `ln S(e^l)`.
pub fn ln_specht_from_ln_h(l: f64) -> f64 {
    if l.abs() < SINGULAR_EPS {
        let d = l.exp_m1();
        return (d * d / 24.0).ln_1p();
    }
    let e = l.exp_m1();
    (e / l).ln() + l / e - 1.0
}

/// `S(h) = (h − 1) h^{1/(h−1)} / (e log h)`, with `S(1) = 1`.
///
/// Returns NaN for `h ≤ 0`.
pub fn specht(h: f64) -> f64 {
    if !(h > 0.0) {
        return f64::NAN;
    }
    if (h - 1.0).abs() < SINGULAR_EPS {
        return 1.0 + (h - 1.0) * (h - 1.0) / 24.0;
    }
    ln_specht_from_ln_h(h.ln()).exp()
}

/// `K(h^r, p / r)`, which tends to `S(h^p)` as `r → 0`.
pub fn kantorovich_specht_limit(h: f64, p: f64, r: f64) -> Result<f64> {
    if r == 0.0 {
        return Err(Error::InvalidParameter("r must be non-zero".into()));
    }
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("h must be positive, got {h}")));
    }
    Ok(ln_kantorovich_from_ln_h(r * h.ln(), p / r).exp())
}
