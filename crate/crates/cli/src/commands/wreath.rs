use clap::{Args, Subcommand};
use oelab_core::wreath::{LampCoupling, WreathCoupling, WreathElement};
use oelab_core::{rng, Side};
use serde::Serialize;
use serde_json::json;

use super::{matched, side_name, split_matched, usage};
use crate::report::{Outcome, Table};

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WreathCmd {
    /// Checks the distance identities for base and lamp moves, and the action law, at random points.
    Check(CheckArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct CheckArgs {
    /// Base coupling as LEFT/RIGHT builtin tilings; a single spec is coupled with itself.
    #[arg(long)]
    pub base: String,
    /// Lamp coupling: cyclic:K or LEFT/RIGHT builtin tilings.
    #[arg(long)]
    pub lamp: String,
    /// Random points per identity.
    #[arg(long, default_value_t = 200)]
    pub samples: u64,
    #[arg(long, default_value_t = 40)]
    pub max_depth: usize,
}

#[derive(Default)]
struct Tally {
    checked: u64,
    failures: u64,
    skipped: u64,
    first_failure: Option<String>,
}

impl Tally {
    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            self.first_failure.get_or_insert_with(what);
        }
    }
}

fn lamp_coupling(spec: &str, max_depth: usize) -> oelab_core::Result<(LampCoupling, Option<String>)> {
    if let Some(k) = spec.trim().strip_prefix("cyclic:") {
        let k: u32 = k.parse().or_else(|_| usage(format!("bad lamp order {k:?}")))?;
        return Ok((LampCoupling::cyclic(k)?, None));
    }
    let (l, r) = split_matched(spec);
    let (c, note) = matched(l, r, max_depth)?;
    Ok((LampCoupling::Matched(c), note))
}

pub fn run(cmd: &WreathCmd, seed: u64) -> oelab_core::Result<Outcome> {
    let WreathCmd::Check(a) = cmd;
    if a.samples == 0 {
        return usage("wreath check needs at least one sample");
    }
    let (l, r) = split_matched(&a.base);
    let (base, base_note) = matched(l, r, a.max_depth)?;
    let (lamp, lamp_note) = lamp_coupling(&a.lamp, a.max_depth)?;
    let w = WreathCoupling::new(base, lamp);

    let mut table = Table::new(&["side", "identity", "checked", "failures", "skipped", "pass"]);
    let mut rows = Vec::new();
    let mut pass = true;
    for side in [Side::Left, Side::Right] {
        let group = w.base().tiling(side).group().clone();
        let mut moves: Vec<(&str, WreathElement)> = vec![("identity", w.identity(side))];
        for s in group.generators() {
            moves.push(("base", w.base_move(side, s.clone())?));
        }
        for l in w.lamp().generators(side) {
            moves.push(("lamp", w.lamp_move(side, l)?));
        }
        let mut tallies: Vec<(&str, Tally)> = ["identity", "base", "lamp", "action"].map(|k| (k, Tally::default())).into();
        let tally = |tallies: &mut Vec<(&str, Tally)>, kind: &str| -> usize { tallies.iter().position(|(k, _)| *k == kind).unwrap() };
        for i in 0..a.samples {
            let p = w.random_point(rng::mix(seed, &[side as u64, i]));
            for (kind, m) in &moves {
                let t = tally(&mut tallies, kind);
                match w.prop72_check(side, m, &p) {
                    Ok(rep) => tallies[t].1.record(rep.holds, || {
                        format!("sample {i}: distance {:?} expected {}", rep.dist, rep.expected)
                    }),
                    Err(oelab_core::Error::DepthExhausted { .. }) => tallies[t].1.skipped += 1,
                    Err(e) => return Err(e),
                }
            }
            let (x, y) = (&moves[1 + (i as usize) % (moves.len() - 1)].1, &moves[1 + (i as usize / 2) % (moves.len() - 1)].1);
            let t = tally(&mut tallies, "action");
            let lhs = w.mul(side, x, y).and_then(|xy| w.act(side, &xy, &p));
            let rhs = w.act(side, y, &p).and_then(|yp| w.act(side, x, &yp));
            match (lhs, rhs) {
                (Ok(u), Ok(v)) => tallies[t].1.record(same_point(&w, &u, &v), || format!("sample {i}: (xy)p != x(yp)")),
                (Err(oelab_core::Error::DepthExhausted { .. }), _) | (_, Err(oelab_core::Error::DepthExhausted { .. })) => {
                    tallies[t].1.skipped += 1
                }
                (Err(e), _) | (_, Err(e)) => return Err(e),
            }
        }
        for (kind, t) in tallies {
            let ok = t.failures == 0 && t.checked > 0;
            pass &= ok;
            table.push(vec![
                side_name(side).into(),
                kind.into(),
                t.checked.to_string(),
                t.failures.to_string(),
                t.skipped.to_string(),
                ok.to_string(),
            ]);
            rows.push(json!({
                "side": side_name(side),
                "identity": kind,
                "checked": t.checked,
                "failures": t.failures,
                "skipped": t.skipped,
                "first_failure": t.first_failure,
                "pass": ok,
            }));
        }
    }
    let results = json!({
        "base": { "left": w.base().left().name(), "right": w.base().right().name(), "note": base_note },
        "lamp": a.lamp,
        "lamp_note": lamp_note,
        "samples": a.samples,
        "checks": rows,
        "pass": pass,
    });
    Ok(Outcome { results, table, pass })
}

/// Points agree when their base points agree and every lamp realized in either one reads the same.
fn same_point(w: &WreathCoupling, u: &oelab_core::wreath::WreathPoint, v: &oelab_core::wreath::WreathPoint) -> bool {
    if u.base() != v.base() {
        return false;
    }
    u.realized()
        .keys()
        .chain(v.realized().keys())
        .all(|prefix| {
            let y = oelab_core::CouplingPoint::new(prefix.clone(), u.base().tail_seed());
            w.lamp_at(u, &y) == w.lamp_at(v, &y)
        })
}
