use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where a scalar function may be evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Real,
    Positive,
    /// `(1, ∞)`.
    GreaterThanOne,
    /// `(-1, ∞)`.
    GreaterThanMinusOne,
}

impl Domain {
    pub fn contains(self, x: f64) -> bool {
        match self {
            Domain::Real => x.is_finite(),
            Domain::Positive => x > 0.0,
            Domain::GreaterThanOne => x > 1.0,
            Domain::GreaterThanMinusOne => x > -1.0,
        }
    }
}

/// Named scalar functions that drive the functional calculus.
///
/// Textual ids: `id`, `sqrt`, `log`, `exp`, `inv_log`, `log1p`, `frac`
/// (t ↦ t/(1+t)), `power:p` and `negpower:p` (t ↦ −t^p).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ScalarFunction {
    Identity,
    Sqrt,
    Log,
    Exp,
    InvLog,
    Log1p,
    Frac,
    Power(f64),
    NegPower(f64),
}

fn is_nonnegative_integer(p: f64) -> bool {
    p >= 0.0 && p.fract() == 0.0
}

impl ScalarFunction {
    pub fn domain(&self) -> Domain {
        match *self {
            ScalarFunction::Identity | ScalarFunction::Exp => Domain::Real,
            ScalarFunction::Sqrt | ScalarFunction::Log => Domain::Positive,
            ScalarFunction::InvLog => Domain::GreaterThanOne,
            ScalarFunction::Log1p | ScalarFunction::Frac => Domain::GreaterThanMinusOne,
            ScalarFunction::Power(p) | ScalarFunction::NegPower(p) => {
                if is_nonnegative_integer(p) {
                    Domain::Real
                } else {
                    Domain::Positive
                }
            }
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            ScalarFunction::Identity => x,
            ScalarFunction::Sqrt => x.sqrt(),
            ScalarFunction::Log => x.ln(),
            ScalarFunction::Exp => x.exp(),
            ScalarFunction::InvLog => 1.0 / x.ln(),
            ScalarFunction::Log1p => x.ln_1p(),
            ScalarFunction::Frac => x / (1.0 + x),
            ScalarFunction::Power(p) => powf_exact(x, p),
            ScalarFunction::NegPower(p) => -powf_exact(x, p),
        }
    }

    /// Evaluates after checking the domain.
    pub fn try_eval(&self, x: f64) -> Result<f64> {
        if self.domain().contains(x) {
            Ok(self.eval(x))
        } else {
            Err(Error::Domain {
                function: self.to_string(),
                eigenvalue: x,
            })
        }
    }
}

/// `x^p` with exact results for small integer exponents.
pub(crate) fn powf_exact(x: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else if p == 1.0 {
        x
    } else if p.fract() == 0.0 && p.abs() <= 64.0 {
        x.powi(p as i32)
    } else if p == 0.5 {
        x.sqrt()
    } else {
        x.powf(p)
    }
}

impl fmt::Display for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarFunction::Identity => write!(f, "id"),
            ScalarFunction::Sqrt => write!(f, "sqrt"),
            ScalarFunction::Log => write!(f, "log"),
            ScalarFunction::Exp => write!(f, "exp"),
            ScalarFunction::InvLog => write!(f, "inv_log"),
            ScalarFunction::Log1p => write!(f, "log1p"),
            ScalarFunction::Frac => write!(f, "frac"),
            ScalarFunction::Power(p) => write!(f, "power:{p}"),
            ScalarFunction::NegPower(p) => write!(f, "negpower:{p}"),
        }
    }
}

impl FromStr for ScalarFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let exponent = || -> Result<f64> {
            let a = arg.ok_or_else(|| Error::Parse(format!("`{s}` needs an exponent")))?;
            a.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad exponent in `{s}`: {e}")))
        };
        let f = match head {
            "id" | "identity" => ScalarFunction::Identity,
            "sqrt" => ScalarFunction::Sqrt,
            "log" => ScalarFunction::Log,
            "exp" => ScalarFunction::Exp,
            "inv_log" => ScalarFunction::InvLog,
            "log1p" => ScalarFunction::Log1p,
            "frac" => ScalarFunction::Frac,
            "power" | "pow" => ScalarFunction::Power(exponent()?),
            "negpower" => ScalarFunction::NegPower(exponent()?),
            _ => return Err(Error::Parse(format!("unknown scalar function `{s}`"))),
        };
        if arg.is_some() && !matches!(f, ScalarFunction::Power(_) | ScalarFunction::NegPower(_)) {
            return Err(Error::Parse(format!("`{head}` takes no parameter")));
        }
        Ok(f)
    }
}

impl TryFrom<String> for ScalarFunction {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ScalarFunction> for String {
    fn from(f: ScalarFunction) -> String {
        f.to_string()
    }
}
