use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{usage, Error, Result};

/// A nondecreasing weight `φ: [0, ∞) → [0, ∞)` applied to transfer distances.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "parameter", rename_all = "lowercase")]
pub enum IntegrabilityGauge {
    /// `t^p`, `p > 0`.
    Power(f64),
    /// `e^{ct}`, `c > 0`.
    Exp(f64),
    /// `ln(1 + t)^{1+ε}`, `ε ≥ 0`.
    LogPower(f64),
    Identity,
}

impl IntegrabilityGauge {
    pub fn power(p: f64) -> Result<Self> {
        Self::Power(p).validated()
    }

    pub fn exp(c: f64) -> Result<Self> {
        Self::Exp(c).validated()
    }

    pub fn log_power(eps: f64) -> Result<Self> {
        Self::LogPower(eps).validated()
    }

    fn validated(self) -> Result<Self> {
        match self {
            Self::Power(p) if !(p.is_finite() && p > 0.0) => usage(format!("power gauge needs p > 0, got {p}")),
            Self::Exp(c) if !(c.is_finite() && c > 0.0) => usage(format!("exp gauge needs c > 0, got {c}")),
            Self::LogPower(e) if !(e.is_finite() && e >= 0.0) => {
                usage(format!("logpow gauge needs eps >= 0, got {e}"))
            }
            g => Ok(g),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Self::Power(p) => t.powf(p),
            Self::Exp(c) => (c * t).exp(),
            Self::LogPower(e) => t.ln_1p().powf(1.0 + e),
            Self::Identity => t,
        }
    }
}

impl fmt::Display for IntegrabilityGauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Power(p) => write!(f, "power:{p}"),
            Self::Exp(c) => write!(f, "exp:{c}"),
            Self::LogPower(e) => write!(f, "logpow:{e}"),
            Self::Identity => write!(f, "identity"),
        }
    }
}

impl FromStr for IntegrabilityGauge {
    type Err = Error;

    /// Accepts `power:P`, `exp:C`, `logpow:E` and `identity`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
        let value = || -> Result<f64> {
            arg.trim()
                .parse::<f64>()
                .or_else(|_| usage(format!("bad gauge parameter in {s:?}")))
        };
        match kind.trim() {
            "power" => Self::power(value()?),
            "exp" => Self::exp(value()?),
            "logpow" => Self::log_power(value()?),
            "identity" if arg.is_empty() => Ok(Self::Identity),
            _ => usage(format!("unknown gauge {s:?}; expected power:P, exp:C, logpow:E or identity")),
        }
    }
}
