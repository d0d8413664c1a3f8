use clap::{Args, Subcommand};
use oelab_core::{DiameterMode, Error, Family, TilingSequence};
use serde::Serialize;
use serde_json::json;

use super::{rational, usage};
use crate::report::{Outcome, Table};

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TilingCmd {
    /// Builds T_0..T_K, checks disjointness and compares Følner constants and diameters with their claimed bounds.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    /// Builtin tiling: zn:N, zn:N:grouped:M, heis, ll:M or zmatched:ll:M.
    #[arg(long)]
    pub builtin: String,
    /// Expected group of the tiling (zn:N, heis, ll:M, bs:K).
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long)]
    pub k: usize,
    /// Exact diameters by breadth-first search instead of sampled lower bounds.
    #[arg(long)]
    pub exact_diameter: bool,
    /// Pairs per level for sampled diameters.
    #[arg(long, default_value_t = 10_000)]
    pub pairs: u64,
}

pub fn run(cmd: &TilingCmd, seed: u64) -> oelab_core::Result<Outcome> {
    let TilingCmd::Verify(a) = cmd;
    let t = TilingSequence::builtin(&a.builtin)?;
    if let Some(g) = &a.group {
        let want = Family::parse(g)?;
        if &want != t.group().family() {
            return usage(format!("{} is a tiling of {}, not {}", t.name(), t.group().family().name(), want.name()));
        }
    }
    let tiles = t.build_tiles(a.k)?;
    let mut table = Table::new(&[
        "k",
        "size",
        "boundary",
        "epsilon_computed",
        "epsilon_claimed",
        "diameter",
        "diameter_exact",
        "radius_claimed",
        "ok",
    ]);
    let mut levels = Vec::new();
    let mut all_ok = true;
    for tile in &tiles {
        let f = t.folner_constant(tile);
        let mode = if a.exact_diameter {
            DiameterMode::Exact
        } else {
            DiameterMode::Sampled { pairs: a.pairs, seed }
        };
        let (d, diameter_note) = match t.tile_diameter(tile.k, mode) {
            Ok(d) => (Some(d), None),
            Err(e @ (Error::CapExceeded { .. } | Error::ResourceExhausted { .. })) => (None, Some(e.to_string())),
            Err(e) => return Err(e),
        };
        let d_ok = d.as_ref().and_then(|d| d.within_claim);
        let ok = f.within_claim != Some(false) && d_ok != Some(false);
        all_ok &= ok;
        let eps_claimed = f.claimed.as_ref().map(rational);
        table.push(vec![
            tile.k.to_string(),
            f.size.to_string(),
            f.boundary.to_string(),
            rational(&f.computed),
            eps_claimed.clone().unwrap_or_default(),
            d.as_ref().map(|d| d.value.to_string()).unwrap_or_default(),
            d.as_ref().map(|d| d.exact.to_string()).unwrap_or_default(),
            t.claimed_radius(tile.k).map(|r| r.to_string()).unwrap_or_default(),
            ok.to_string(),
        ]);
        levels.push(json!({
            "k": tile.k,
            "size": f.size.to_string(),
            "boundary": f.boundary.to_string(),
            "epsilon_computed": rational(&f.computed),
            "epsilon_claimed": eps_claimed,
            "diameter": d.as_ref().map(|d| d.value),
            "diameter_exact": d.as_ref().map(|d| d.exact),
            "diameter_note": diameter_note,
            "radius_claimed": t.claimed_radius(tile.k).map(|r| r.to_string()),
            "ok": ok,
        }));
    }
    let top = levels.last().cloned().unwrap_or_default();
    let results = json!({
        "tiling": t.name(),
        "group": t.group().family().name(),
        "k": a.k,
        "size": top["size"],
        "epsilon_computed": top["epsilon_computed"],
        "epsilon_claimed": top["epsilon_claimed"],
        "diameter": top["diameter"],
        "diameter_exact": top["diameter_exact"],
        "diameter_note": top["diameter_note"],
        "radius_claimed": top["radius_claimed"],
        "ok": all_ok,
        "levels": levels,
    });
    Ok(Outcome { results, table, pass: all_ok })
}
