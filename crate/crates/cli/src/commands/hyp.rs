use clap::{Args, Subcommand};
use oelab_core::hyperbolicity::{
    cycle_distortion, extract_fat_cycle, four_point_delta, prop92_bound, rips_delta, ExtractParams, GraphSummary,
    MetricGraph,
};
use oelab_core::Rational;
use serde::Serialize;
use serde_json::json;

use super::{rational, to_f64, usage};
use crate::report::{key_value_table, to_value, Outcome};

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HypCmd {
    /// Exact interval Rips constant, optionally with the four-point constant.
    Delta(DeltaArgs),
    /// Distortion of a cycle and the thin-cycle bound it must respect.
    AuditCycle(AuditArgs),
    /// Searches for a fat quasi-isometric cycle.
    Extract(ExtractArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct GraphArgs {
    /// Generated graph: grid:N, cycle:N, path:N, tree:N:SEED or cayley-ball:GROUP:R.
    #[arg(long, conflicts_with = "edges", required_unless_present = "edges")]
    pub family: Option<String>,
    /// Edge-list file, one `u v` pair per line.
    #[arg(long)]
    pub edges: Option<std::path::PathBuf>,
}

impl GraphArgs {
    fn load(&self) -> oelab_core::Result<MetricGraph> {
        match (&self.family, &self.edges) {
            (Some(f), _) => MetricGraph::family(f),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .or_else(|e| usage(format!("cannot read {}: {e}", path.display())))?;
                MetricGraph::parse_edge_list(&text)
            }
            (None, None) => usage("give --family or --edges"),
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct DeltaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub graph: GraphArgs,
    /// Also compute the four-point constant.
    #[arg(long)]
    pub four_point: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct AuditArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub graph: GraphArgs,
    /// Cycle as a comma-separated vertex list.
    #[arg(long, conflicts_with = "boundary", required_unless_present = "boundary")]
    pub cycle: Option<String>,
    /// Use the outer boundary of a grid family.
    #[arg(long)]
    pub boundary: bool,
    /// Hyperbolicity constant to audit against; computed when omitted.
    #[arg(long)]
    pub delta: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct ExtractArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub graph: GraphArgs,
    /// Additive slack allowed on the length target.
    #[arg(long, default_value_t = 2)]
    pub slack: i128,
    /// Hyperbolicity constant to use instead of the computed one.
    #[arg(long)]
    pub delta: Option<String>,
}

fn parse_rational(s: &str) -> oelab_core::Result<Rational> {
    s.trim().parse::<Rational>().or_else(|_| usage(format!("bad rational {s:?}")))
}

pub fn run(cmd: &HypCmd) -> oelab_core::Result<Outcome> {
    match cmd {
        HypCmd::Delta(a) => delta(a),
        HypCmd::AuditCycle(a) => audit(a),
        HypCmd::Extract(a) => extract(a),
    }
}

fn delta(a: &DeltaArgs) -> oelab_core::Result<Outcome> {
    let g = a.graph.load()?;
    let rips = rips_delta(&g)?;
    let fp = if a.four_point { Some(four_point_delta(&g)?) } else { None };
    let results = json!({
        "graph": to_value(GraphSummary::from(&g)),
        "rips_delta": rational(&rips.delta),
        "rips_witness": rips.witness,
        "four_point_delta": fp.as_ref().map(|f| rational(&f.delta)),
        "four_point_witness": fp.as_ref().and_then(|f| f.witness),
        "vertices": g.vertex_count(),
        "diameter": g.diameter(),
    });
    Ok(Outcome { table: key_value_table(&results), results, pass: true })
}

fn grid_side(name: &str) -> Option<usize> {
    name.strip_prefix("grid:")?.parse().ok()
}

fn audit(a: &AuditArgs) -> oelab_core::Result<Outcome> {
    let g = a.graph.load()?;
    let cycle: Vec<usize> = match (&a.cycle, a.boundary) {
        (Some(list), _) => list
            .split(',')
            .map(|v| v.trim().parse::<usize>().or_else(|_| usage(format!("bad vertex {v:?}"))))
            .collect::<oelab_core::Result<_>>()?,
        (None, true) => match a.graph.family.as_deref().and_then(grid_side) {
            Some(n) => MetricGraph::grid_boundary(n),
            None => return usage("--boundary needs --family grid:N"),
        },
        (None, false) => return usage("give --cycle or --boundary"),
    };
    let delta = match &a.delta {
        Some(d) => parse_rational(d)?,
        None => rips_delta(&g)?.delta,
    };
    let dist = cycle_distortion(&g, &cycle)?;
    let half = cycle.len() as f64 / 2.0;
    let (af, bf, df) = (to_f64(&dist.a), to_f64(&dist.b), to_f64(&delta));
    let bound = prop92_bound(df, half, bf);
    let holds = af <= bound.half_length_form * (1.0 + 1e-12);
    let delta_lower = (af * half - 4.0 - 2.0 * bf) / (4.0 * (bf * half).log2());
    let results = json!({
        "graph": to_value(GraphSummary::from(&g)),
        "cycle_length": cycle.len(),
        "delta": rational(&delta),
        "a": rational(&dist.a),
        "b": rational(&dist.b),
        "a_witness": dist.a_witness,
        "b_witness": dist.b_witness,
        "bound": bound.half_length_form,
        "asymptotic_bound": bound.asymptotic_form,
        "delta_lower_bound": delta_lower,
        "holds": holds,
    });
    Ok(Outcome { table: key_value_table(&results), results, pass: holds })
}

fn extract(a: &ExtractArgs) -> oelab_core::Result<Outcome> {
    let g = a.graph.load()?;
    let params = ExtractParams {
        slack: a.slack,
        delta: a.delta.as_deref().map(parse_rational).transpose()?,
    };
    let f = extract_fat_cycle(&g, &params)?;
    let pass = f.passes();
    let mut results = to_value(&f);
    results["graph"] = to_value(GraphSummary::from(&g));
    results["cycle_length"] = json!(f.cycle.len());
    results["a"] = json!(rational(&f.distortion.a));
    results["b"] = json!(rational(&f.distortion.b));
    results["cycle_vertices"] = json!(f.cycle.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "));
    results["pass"] = json!(pass);
    Ok(Outcome { table: key_value_table(&results), results, pass })
}
