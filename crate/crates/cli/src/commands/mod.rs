pub mod bsll;
pub mod couple;
pub mod hyp;
pub mod profile;
pub mod selftest;
pub mod tiling;
pub mod wreath;

use clap::ValueEnum;
use oelab_core::{Error, GroupElement, MatchedCoupling, Result, Side, TilingSequence};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SideArg {
    Left,
    Right,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
        }
    }
}

pub fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}

/// Exactly `zn:N`, the only spec whose grouping can be raised automatically.
fn plain_zn(spec: &str) -> Option<usize> {
    spec.trim().strip_prefix("zn:")?.parse().ok()
}

/// Builds the matched coupling of two builtin specs. When the letter sizes
/// disagree and one side is a plain `zn:N`, its grouping is raised until they agree.
pub fn matched(left: &str, right: &str, max_depth: usize) -> Result<(MatchedCoupling, Option<String>)> {
    let (l, r) = (TilingSequence::builtin(left)?, TilingSequence::builtin(right)?);
    let first = match MatchedCoupling::new(l.clone(), r.clone(), max_depth) {
        Ok(c) => return Ok((c, None)),
        Err(e) => e,
    };
    for (spec, is_left) in [(left, true), (right, false)] {
        let Some(n) = plain_zn(spec) else { continue };
        for g in 2..=32u32 {
            let Ok(regrouped) = TilingSequence::zn(n, g) else { break };
            let attempt = if is_left {
                MatchedCoupling::new(regrouped, r.clone(), max_depth)
            } else {
                MatchedCoupling::new(l.clone(), regrouped, max_depth)
            };
            if let Ok(c) = attempt {
                let note = format!("{spec} regrouped as zn:{n}:grouped:{g} to match letter sizes");
                return Ok((c, Some(note)));
            }
        }
    }
    Err(first)
}

/// Splits `L/R` into two specs; a single spec is coupled with itself.
pub fn split_matched(spec: &str) -> (&str, &str) {
    spec.split_once('/').unwrap_or((spec, spec))
}

/// Parses `gamma` in the group of the requested side, or infers the side from
/// which group accepts it (left first).
pub fn side_and_element(c: &MatchedCoupling, gamma: &str, side: Option<SideArg>) -> Result<(Side, GroupElement)> {
    let parse = |s: Side| -> Result<GroupElement> {
        let group = c.tiling(s).group();
        let g = group.parse_element(gamma)?;
        group.check(&g)?;
        Ok(g)
    };
    match side {
        Some(s) => parse(s.into()).map(|g| (s.into(), g)),
        None => match parse(Side::Left) {
            Ok(g) => Ok((Side::Left, g)),
            Err(left_err) => parse(Side::Right).map(|g| (Side::Right, g)).map_err(|_| left_err),
        },
    }
}

pub fn side_name(s: Side) -> &'static str {
    match s {
        Side::Left => "left",
        Side::Right => "right",
    }
}

pub fn rational(q: &oelab_core::Rational) -> String {
    q.to_string()
}

pub fn to_f64(q: &oelab_core::Rational) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}
