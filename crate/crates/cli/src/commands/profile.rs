use clap::Args;
use oelab_core::functional::{isoperimetric_profile, ProfileMode};
use oelab_core::{Family, GroupDescriptor};
use serde::Serialize;

use super::usage;
use crate::report::{to_value, Outcome, Table};

#[derive(Args, Debug, Serialize)]
pub struct ProfileArgs {
    /// Group: zn:N, heis, ll:M or bs:K.
    #[arg(long)]
    pub group: String,
    /// Largest support size.
    #[arg(long)]
    pub n: usize,
    /// `sets` for indicators, `int:V` for functions with values in 1..=V.
    #[arg(long, default_value = "sets")]
    pub mode: String,
}

fn parse_mode(s: &str) -> oelab_core::Result<ProfileMode> {
    match s.trim().split_once(':') {
        None if s.trim() == "sets" => Ok(ProfileMode::SetsOnly),
        Some(("int", v)) => match v.parse::<u32>() {
            Ok(v) if v >= 1 => Ok(ProfileMode::IntegerValued(v)),
            _ => usage(format!("int mode needs a positive bound, got {v:?}")),
        },
        _ => usage(format!("unknown profile mode {s:?}; expected sets or int:V")),
    }
}

pub fn run(a: &ProfileArgs) -> oelab_core::Result<Outcome> {
    let group = GroupDescriptor::new(Family::parse(&a.group)?)?;
    let report = isoperimetric_profile(&group, a.n, parse_mode(&a.mode)?)?;
    let mut table = Table::new(&["n", "value_num", "value_den", "witness"]);
    for r in &report.rows {
        table.push(vec![
            r.n.to_string(),
            r.value_num.to_string(),
            r.value_den.to_string(),
            r.witness.join(" "),
        ]);
    }
    Ok(Outcome {
        results: to_value(&report),
        table,
        pass: true,
    })
}
