use std::collections::VecDeque;
use std::sync::atomic::{AtomicU32, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use super::MetricGraph;
use crate::error::{Error, Result};
use crate::Rational;

/// A triangle `(a, b, c)` and a point `x ∈ I(a,b)` at distance `value` from `I(a,c) ∪ I(b,c)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RipsWitness {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub x: usize,
    pub value: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct RipsReport {
    #[serde(serialize_with = "crate::rational_string")]
    pub delta: Rational,
    pub witness: Option<RipsWitness>,
    pub vertices: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FourPointReport {
    #[serde(serialize_with = "crate::rational_string")]
    pub delta: Rational,
    pub witness: Option<[usize; 4]>,
}

/// `table[a·n + x] = d(x, I(a, c))`, one multi-source search per `a`.
fn interval_distances(g: &MetricGraph, c: usize, table: &mut [u16], queue: &mut VecDeque<usize>) {
    let n = g.vertex_count();
    let rc = g.row(c);
    for a in 0..n {
        let ra = g.row(a);
        let dac = ra[c];
        let row = &mut table[a * n..(a + 1) * n];
        row.fill(u16::MAX);
        for x in 0..n {
            if ra[x] + rc[x] == dac {
                row[x] = 0;
                queue.push_back(x);
            }
        }
        while let Some(u) = queue.pop_front() {
            for w in g.neighbors(u) {
                if row[w] == u16::MAX {
                    row[w] = row[u] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
}

/// Largest defect over triangles with third vertex `c`, ignoring candidates
/// that cannot reach `floor` (or cannot exceed it when `strict`).
fn best_for_apex(
    g: &MetricGraph,
    c: usize,
    pairs: &[(u16, u32, u32)],
    table: &[u16],
    floor: u32,
    strict: bool,
) -> Option<RipsWitness> {
    let n = g.vertex_count();
    let mut best: Option<RipsWitness> = None;
    let mut level = floor;
    let beats = |v: u32, level: u32, have: bool| if strict || have { v > level } else { v >= level };
    for &(dab, a, b) in pairs {
        let (a, b) = (a as usize, b as usize);
        if !beats(dab as u32 / 2, level, best.is_some()) {
            break;
        }
        let (ra, rb) = (g.row(a), g.row(b));
        let (ta, tb) = (&table[a * n..(a + 1) * n], &table[b * n..(b + 1) * n]);
        for x in 0..n {
            if ra[x] + rb[x] != dab {
                continue;
            }
            let v = ta[x].min(tb[x]) as u32;
            if beats(v, level, best.is_some()) {
                level = v;
                best = Some(RipsWitness { a, b, c, x, value: v });
            }
        }
    }
    best
}

fn check_budget(g: &MetricGraph, per_worker_tables: u64) -> Result<()> {
    let n = g.vertex_count() as u64;
    let bytes = n * n * 2 * (1 + per_worker_tables);
    if bytes > g.budget().max_bytes {
        return Err(Error::ResourceExhausted {
            what: "Rips interval tables".into(),
            reached: bytes,
        });
    }
    Ok(())
}

/// The exact interval Rips constant: the largest `d(x, I(a,c) ∪ I(b,c))`
/// over triples `(a,b,c)` and `x ∈ I(a,b)`.
///
/// A first parallel pass finds the value with aggressive pruning; a second pass
/// scans apexes in a fixed order for the first witness, so the reported witness
/// does not depend on thread scheduling.
pub fn rips_delta(g: &MetricGraph) -> Result<RipsReport> {
    let n = g.vertex_count();
    check_budget(g, rayon::current_num_threads() as u64)?;
    let mut pairs: Vec<(u16, u32, u32)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .map(|(a, b)| (g.d(a, b) as u16, a as u32, b as u32))
        .collect();
    pairs.sort_by(|p, q| q.0.cmp(&p.0).then((p.1, p.2).cmp(&(q.1, q.2))));
    let mut apexes: Vec<usize> = (0..n).collect();
    apexes.sort_by_key(|&c| (std::cmp::Reverse(g.eccentricity(c)), c));

    let best = AtomicU32::new(0);
    apexes.par_iter().for_each_init(
        || (vec![0u16; n * n], VecDeque::new()),
        |(table, queue), &c| {
            let floor = best.load(Ordering::Relaxed);
            if pairs.first().is_none_or(|p| p.0 as u32 / 2 <= floor) {
                return;
            }
            interval_distances(g, c, table, queue);
            if let Some(w) = best_for_apex(g, c, &pairs, table, floor, true) {
                best.fetch_max(w.value, Ordering::Relaxed);
            }
        },
    );
    let delta = best.into_inner();
    let witness = if delta == 0 {
        None
    } else {
        apexes.par_iter().map_init(
            || (vec![0u16; n * n], VecDeque::new()),
            |(table, queue), &c| {
                interval_distances(g, c, table, queue);
                best_for_apex(g, c, &pairs, table, delta, false).filter(|w| w.value == delta)
            },
        )
        .find_first(Option::is_some)
        .flatten()
    };
    Ok(RipsReport {
        delta: Rational::from_integer(delta as i128),
        witness,
        vertices: n,
    })
}

/// Gromov's four-point constant: half the largest gap between the two largest
/// of the three pair sums, over all quadruples.
pub fn four_point_delta(g: &MetricGraph) -> Result<FourPointReport> {
    let n = g.vertex_count();
    let quads = (n as u128).pow(4) / 24;
    const LIMIT: u128 = 2_000_000_000;
    if quads > LIMIT {
        return Err(Error::ResourceExhausted {
            what: "four-point quadruple scan".into(),
            reached: quads.min(u64::MAX as u128) as u64,
        });
    }
    let best = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best: (u32, [usize; 4]) = (0, [0; 4]);
            let ri = g.row(i);
            for j in i + 1..n {
                let rj = g.row(j);
                let dij = ri[j] as u32;
                for k in j + 1..n {
                    let rk = g.row(k);
                    let (dik, djk) = (ri[k] as u32, rj[k] as u32);
                    for l in k + 1..n {
                        let s1 = dij + rk[l] as u32;
                        let s2 = dik + rj[l] as u32;
                        let s3 = ri[l] as u32 + djk;
                        let (hi, mid) = top_two(s1, s2, s3);
                        if hi - mid > best.0 {
                            best = (hi - mid, [i, j, k, l]);
                        }
                    }
                }
            }
            best
        })
        .reduce(|| (0, [0; 4]), |p, q| if q.0 > p.0 || (q.0 == p.0 && q.1 < p.1) { q } else { p });
    Ok(FourPointReport {
        delta: Rational::new(best.0 as i128, 2),
        witness: (best.0 > 0).then_some(best.1),
    })
}

fn top_two(a: u32, b: u32, c: u32) -> (u32, u32) {
    let hi = a.max(b).max(c);
    let lo = a.min(b).min(c);
    (hi, a + b + c - hi - lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        let path = MetricGraph::path(10).unwrap();
        assert_eq!(rips_delta(&path).unwrap().delta, Rational::from_integer(0));
        assert!(rips_delta(&path).unwrap().witness.is_none());
        let edge = MetricGraph::path(2).unwrap();
        assert_eq!(four_point_delta(&edge).unwrap().delta, Rational::from_integer(0));
        let c8 = MetricGraph::cycle(8).unwrap();
        let r = rips_delta(&c8).unwrap();
        assert_eq!(r.delta, Rational::from_integer(2));
        let w = r.witness.unwrap();
        assert_eq!(w.value, 2);
        assert_eq!(c8.d(w.a, w.x) + c8.d(w.x, w.b), c8.d(w.a, w.b));
    }

    #[test]
    fn four_point_on_cycles() {
        // Four equally spaced points on C8: pair sums 8, 4, 4, so the defect is 2.
        let c8 = MetricGraph::cycle(8).unwrap();
        assert_eq!(four_point_delta(&c8).unwrap().delta, Rational::from_integer(2));
        let c4 = MetricGraph::cycle(4).unwrap();
        assert_eq!(four_point_delta(&c4).unwrap().delta, Rational::from_integer(1));
    }
}
