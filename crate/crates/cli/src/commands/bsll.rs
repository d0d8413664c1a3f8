use clap::{Args, Subcommand};
use oelab_core::odometer::OdometerCoupling;
use oelab_core::GroupDescriptor;
use serde::Serialize;
use serde_json::json;

use super::usage;
use crate::report::{to_value, Outcome, Table};

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BsLlCmd {
    /// Frequency of large lamplighter displacements under a BS(1,k) element against the exponential bound.
    Tail(BsTailArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct BsTailArgs {
    #[arg(long)]
    pub k: u32,
    /// BS(1,k) element, e.g. bs:a=1,s=0,n=0.
    #[arg(long)]
    pub g: String,
    /// Values of M; repeat or comma-separate.
    #[arg(long = "M", value_delimiter = ',', required = true)]
    #[serde(rename = "M")]
    pub m: Vec<u32>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
}

pub fn run(cmd: &BsLlCmd, seed: u64) -> oelab_core::Result<Outcome> {
    let BsLlCmd::Tail(a) = cmd;
    let coupling = OdometerCoupling::new(a.k)?;
    let group = GroupDescriptor::baumslag_solitar(a.k);
    let g = group.parse_element(&a.g)?;
    group.check(&g)?;
    let Some(b) = g.as_bs() else {
        return usage(format!("{} is not a BS(1,{}) element", a.g, a.k));
    };
    let reports = coupling.tail_bound_check(b, &a.m, a.samples, seed)?;
    let mut table = Table::new(&["k", "g", "g_length", "M", "threshold", "freq", "stderr", "paper_bound", "window_exhausted", "pass"]);
    let mut pass = true;
    let mut rows = Vec::new();
    for r in &reports {
        pass &= r.pass;
        table.push(vec![
            r.k.to_string(),
            r.g.clone(),
            r.g_length.to_string(),
            r.m.to_string(),
            r.threshold.to_string(),
            r.freq.to_string(),
            r.stderr.to_string(),
            r.paper_bound.to_string(),
            r.window_exhausted.to_string(),
            r.pass.to_string(),
        ]);
        rows.push(to_value(r));
    }
    let mut results = json!({ "k": a.k, "g": a.g, "samples": a.samples, "rows": rows, "pass": pass });
    if let [only] = &reports[..] {
        results["freq"] = json!(only.freq);
        results["stderr"] = json!(only.stderr);
        results["paper_bound"] = json!(only.paper_bound);
    }
    Ok(Outcome { results, table, pass })
}
