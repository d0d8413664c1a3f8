use clap::{Args, Subcommand};
use oelab_core::coupling::CylinderSet;
use oelab_core::{IntegrabilityGauge, MatchedCoupling, Side, TilingSequence};
use serde::Serialize;
use serde_json::json;

use super::{matched, rational, side_and_element, side_name, usage, SideArg};
use crate::report::{to_value, Outcome, Table};

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoupleCmd {
    /// Exact and simulated tail law of the stabilization depth.
    Tail(TailArgs),
    /// Monte Carlo integrability of transfer distances under a gauge.
    Integrate(IntegrateArgs),
    /// Return-time density of a union of cylinder sets.
    ReturnTime(ReturnArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct CouplingArgs {
    /// Builtin tiling on the left.
    #[arg(long)]
    pub left: String,
    /// Builtin tiling on the right.
    #[arg(long)]
    pub right: String,
    /// Group element acting, e.g. zn:1,0 or heis:1,0,0.
    #[arg(long)]
    pub gamma: String,
    /// Acting side; inferred from the group of gamma when omitted.
    #[arg(long, value_enum)]
    pub side: Option<SideArg>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 60)]
    pub max_depth: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct TailArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub coupling: CouplingArgs,
    /// Largest level reported.
    #[arg(long, default_value_t = 6)]
    pub k: usize,
    /// Agreement tolerance in standard errors.
    #[arg(long, default_value_t = 4.0)]
    pub z: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct IntegrateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub coupling: CouplingArgs,
    /// Gauges power:P, exp:C, logpow:E or identity; repeat or comma-separate.
    #[arg(long, value_delimiter = ',', default_value = "power:0.5")]
    pub gauge: Vec<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct ReturnArgs {
    #[arg(long)]
    pub left: String,
    /// Partner tiling; only the acting side is used.
    #[arg(long)]
    pub right: Option<String>,
    #[arg(long, value_enum, default_value_t = SideArg::Left)]
    pub side: SideArg,
    /// Cylinders as digit lists separated by `;`, e.g. "0,1;1", or `all`.
    #[arg(long)]
    pub cylinders: String,
    /// Ball radius.
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 60)]
    pub max_depth: usize,
    #[arg(long, default_value_t = 3.0)]
    pub z: f64,
}

pub fn run(cmd: &CoupleCmd, seed: u64) -> oelab_core::Result<Outcome> {
    match cmd {
        CoupleCmd::Tail(a) => tail(a, seed),
        CoupleCmd::Integrate(a) => integrate(a, seed),
        CoupleCmd::ReturnTime(a) => return_time(a, seed),
    }
}

fn coupling(a: &CouplingArgs) -> oelab_core::Result<(MatchedCoupling, Option<String>, Side, oelab_core::GroupElement)> {
    let (c, note) = matched(&a.left, &a.right, a.max_depth)?;
    let (side, gamma) = side_and_element(&c, &a.gamma, a.side)?;
    Ok((c, note, side, gamma))
}

fn header(c: &MatchedCoupling, note: &Option<String>, side: Side, gamma: &str) -> serde_json::Value {
    json!({
        "left": c.left().name(),
        "right": c.right().name(),
        "side": side_name(side),
        "gamma": gamma,
        "max_depth": c.max_depth(),
        "note": note,
    })
}

fn tail(a: &TailArgs, seed: u64) -> oelab_core::Result<Outcome> {
    let (c, note, side, gamma) = coupling(&a.coupling)?;
    let rows = c.tail_law(side, &gamma, a.k, a.coupling.samples, seed)?;
    let mut table = Table::new(&["k", "exact_tail", "mc_freq", "stderr"]);
    let mut pass = true;
    let mut out = Vec::new();
    for r in &rows {
        let agrees = r.agrees(a.z, a.coupling.samples);
        pass &= agrees != Some(false);
        let exact = r.exact.as_ref().map(rational);
        table.push(vec![
            r.k.to_string(),
            exact.clone().unwrap_or_default(),
            r.mc_freq.to_string(),
            r.stderr.to_string(),
        ]);
        out.push(json!({
            "k": r.k,
            "exact_tail": exact,
            "exact_f64": r.exact_f64,
            "mc_freq": r.mc_freq,
            "stderr": r.stderr,
            "agrees": agrees,
        }));
    }
    let mut results = header(&c, &note, side, &a.coupling.gamma);
    results["samples"] = json!(a.coupling.samples);
    results["z"] = json!(a.z);
    results["rows"] = json!(out);
    results["pass"] = json!(pass);
    Ok(Outcome { results, table, pass })
}

fn integrate(a: &IntegrateArgs, seed: u64) -> oelab_core::Result<Outcome> {
    let (c, note, side, gamma) = coupling(&a.coupling)?;
    let mut table = Table::new(&["gauge", "estimate", "stderr", "stratified_bound", "exhausted_fraction"]);
    let mut out = Vec::new();
    for spec in &a.gauge {
        let gauge: IntegrabilityGauge = spec.parse()?;
        let e = c.mc_integrability(side, &gamma, &gauge, a.coupling.samples, seed)?;
        table.push(vec![
            e.gauge.clone(),
            e.estimate.to_string(),
            e.stderr.to_string(),
            e.stratified_bound.map(|b| b.to_string()).unwrap_or_default(),
            e.exhausted_fraction.to_string(),
        ]);
        out.push(to_value(&e));
    }
    let mut results = header(&c, &note, side, &a.coupling.gamma);
    results["estimates"] = json!(out);
    Ok(Outcome { results, table, pass: true })
}

fn parse_cylinders(spec: &str) -> oelab_core::Result<Option<Vec<Vec<u128>>>> {
    if spec.trim() == "all" {
        return Ok(None);
    }
    spec.split(';')
        .map(|cyl| {
            cyl.split(',')
                .filter(|d| !d.trim().is_empty())
                .map(|d| d.trim().parse::<u128>().or_else(|_| usage(format!("bad cylinder digit {d:?}"))))
                .collect()
        })
        .collect::<oelab_core::Result<Vec<Vec<u128>>>>()
        .map(Some)
}

fn return_time(a: &ReturnArgs, seed: u64) -> oelab_core::Result<Outcome> {
    let tiling = match (&a.right, a.side) {
        (Some(right), _) => {
            let (c, _) = matched(&a.left, right, a.max_depth)?;
            c.tiling(a.side.into()).clone()
        }
        (None, SideArg::Left) => TilingSequence::builtin(&a.left)?,
        (None, SideArg::Right) => return usage("--side right needs --right"),
    };
    let set = match parse_cylinders(&a.cylinders)? {
        None => CylinderSet::everything(),
        Some(cyls) => CylinderSet::new(&tiling, cyls)?,
    };
    let r = tiling.return_time_density(&set, a.n, a.samples, seed, a.max_depth)?;
    let pass = r.lhs + a.z * r.stderr >= r.rhs;
    let mut results = to_value(&r);
    results["tiling"] = json!(tiling.name());
    results["z"] = json!(a.z);
    results["pass"] = json!(pass);
    let mut table = Table::new(&["radius", "ball_size", "measure", "lhs", "stderr", "rhs", "exhausted_fraction", "pass"]);
    table.push(vec![
        r.radius.to_string(),
        r.ball_size.to_string(),
        r.measure.to_string(),
        r.lhs.to_string(),
        r.stderr.to_string(),
        r.rhs.to_string(),
        r.exhausted_fraction.to_string(),
        pass.to_string(),
    ]);
    Ok(Outcome { results, table, pass })
}
