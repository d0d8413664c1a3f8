use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::{IntegrabilityGauge, MatchedCoupling, Side};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::tiling::LetterRule;

/// The outcome `d_{S'}(x, γ·x) = distance` reached at `depth`, with its measure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Atom {
    pub distance: u128,
    pub depth: usize,
    pub prob: f64,
}

/// The exact joint law of transfer distance and depth, truncated at `depth`.
/// Probabilities are dyadic or products of letter-size reciprocals, so `f64`
/// holds them exactly at the depths reached here.
#[derive(Clone, Debug, Serialize)]
pub struct DistanceLaw {
    pub atoms: Vec<Atom>,
    /// Measure of points not absorbed by level `depth`.
    pub exhausted: f64,
    pub depth: usize,
}

const BYTES_PER_FRONTIER_ENTRY: u64 = 256;

impl DistanceLaw {
    fn from_map(map: BTreeMap<(usize, u128), f64>, exhausted: f64, depth: usize) -> Self {
        let atoms = map
            .into_iter()
            .map(|((depth, distance), prob)| Atom { distance, depth, prob })
            .collect();
        DistanceLaw { atoms, exhausted, depth }
    }

    pub fn expectation(&self, gauge: &IntegrabilityGauge) -> f64 {
        self.atoms.iter().map(|a| a.prob * gauge.eval(a.distance as f64)).sum()
    }

    /// `μ{depth > k}`, counting exhausted mass as deeper than every level.
    pub fn depth_tail(&self, k: usize) -> f64 {
        self.exhausted + self.atoms.iter().filter(|a| a.depth > k).map(|a| a.prob).sum::<f64>()
    }

    /// Contributions `∫ φ(d) 1{d ∈ (2R_{k-1}, 2R_k]} dμ` for `k = 0..=max_k`.
    /// Mass beyond `2R_{max_k}` is left out.
    pub fn strata(&self, gauge: &IntegrabilityGauge, radius: impl Fn(usize) -> Option<u128>, max_k: usize) -> Vec<f64> {
        let bounds: Vec<u128> = (0..=max_k).map(|k| radius(k).map_or(u128::MAX, |r| r.saturating_mul(2))).collect();
        let mut out = vec![0.0; max_k + 1];
        for a in &self.atoms {
            if let Some(k) = bounds.iter().position(|&b| a.distance <= b) {
                out[k] += a.prob * gauge.eval(a.distance as f64);
            }
        }
        out
    }

    pub fn total_mass(&self) -> f64 {
        self.exhausted + self.atoms.iter().map(|a| a.prob).sum::<f64>()
    }
}

impl MatchedCoupling {
    /// Exact law by walking every unresolved prefix cylinder level by level.
    pub fn enumerated_law(&self, side: Side, gamma: &GroupElement, depth: usize) -> Result<DistanceLaw> {
        let acting = self.tiling(side);
        let partner = self.tiling(side.other());
        acting.group().check(gamma)?;
        let depth = depth.min(self.max_depth());
        let budget = acting.group().budget().max_items(BYTES_PER_FRONTIER_ENTRY) as usize;
        let mut atoms: BTreeMap<(usize, u128), f64> = BTreeMap::new();
        let mut frontier: Vec<(Vec<u128>, GroupElement)> = vec![(Vec::new(), acting.group().identity())];
        let mut weight = 1.0;
        for n in 0..=depth {
            let size = acting.letter_size(n).expect("level within range");
            weight /= size as f64;
            let mut next = Vec::new();
            for (idx, g) in &frontier {
                for i in 0..size {
                    let g2 = acting.extend(g, &acting.letter(n, i));
                    let mut idx2 = idx.clone();
                    idx2.push(i);
                    match acting.decode(&acting.translate(gamma, &g2), n) {
                        Ok(new) => {
                            let lambda = partner.connecting_element(&idx2, &new);
                            let d = partner.group().word_length(&lambda)? as u128;
                            *atoms.entry((n, d)).or_insert(0.0) += weight;
                        }
                        Err(_) => next.push((idx2, g2)),
                    }
                }
                if next.len() > budget {
                    return Err(Error::ResourceExhausted {
                        what: format!("unresolved cylinders at level {n}"),
                        reached: next.len() as u64,
                    });
                }
            }
            frontier = next;
        }
        Ok(DistanceLaw::from_map(atoms, frontier.len() as f64 * weight, depth))
    }

    /// Exact law for a pair of dyadic `Z^n` tilings, tracking only the carry
    /// still to be added and the partner displacement accumulated so far.
    /// Cylinders with equal state are merged, so depths near the representable
    /// limit are reachable. Falls back to [`MatchedCoupling::enumerated_law`]
    /// for other tilings.
    pub fn distance_law(&self, side: Side, gamma: &GroupElement, depth: usize) -> Result<DistanceLaw> {
        let acting = self.tiling(side);
        let partner = self.tiling(side.other());
        let (
            LetterRule::ZnDyadic { n, grouping: g },
            LetterRule::ZnDyadic { n: n2, grouping: g2 },
        ) = (acting.rule(), partner.rule())
        else {
            return self.enumerated_law(side, gamma, depth);
        };
        acting.group().check(gamma)?;
        let carry0 = gamma.as_zn().expect("checked Z^n element").to_vec();
        merged_zn_law(*n, *g, *n2, *g2, carry0, depth.min(self.max_depth()), acting.group().budget().max_items(BYTES_PER_FRONTIER_ENTRY))
    }
}

fn overflow(what: &str) -> Error {
    Error::ResourceExhausted {
        what: format!("i128 range in {what}"),
        reached: 128,
    }
}

fn merged_zn_law(
    n: usize,
    g: u32,
    n2: usize,
    g2: u32,
    carry0: Vec<i128>,
    depth: usize,
    budget: u64,
) -> Result<DistanceLaw> {
    let size = 1u128 << (g * n as u32);
    let base = 1i128 << g;
    let digits = |i: u128, nn: usize, gg: u32| -> Vec<i128> {
        (0..nn).map(|j| ((i >> (gg * j as u32)) & ((1 << gg) - 1)) as i128).collect()
    };
    let mut atoms: BTreeMap<(usize, u128), f64> = BTreeMap::new();
    let mut states: HashMap<(Vec<i128>, Vec<i128>), f64> = HashMap::new();
    states.insert((carry0, vec![0; n2]), 1.0);
    for k in 0..=depth {
        let scale = 1i128.checked_shl(g2 * k as u32).filter(|s| *s > 0).ok_or_else(|| overflow("partner scale"))?;
        let mut next: HashMap<(Vec<i128>, Vec<i128>), f64> = HashMap::new();
        for ((carry, lam), p) in &states {
            let q = p / size as f64;
            if carry.iter().all(|&c| c == 0) {
                *atoms.entry((k, l1(lam)?)).or_insert(0.0) += *p;
                continue;
            }
            for i in 0..size {
                let d = digits(i, n, g);
                let mut new_carry = Vec::with_capacity(n);
                let mut i2: u128 = 0;
                for j in 0..n {
                    let s = d[j].checked_add(carry[j]).ok_or_else(|| overflow("carry"))?;
                    i2 |= (s.rem_euclid(base) as u128) << (g * j as u32);
                    new_carry.push(s.div_euclid(base));
                }
                let (old_p, new_p) = (digits(i, n2, g2), digits(i2, n2, g2));
                let lam2 = lam
                    .iter()
                    .zip(old_p.iter().zip(&new_p))
                    .map(|(l, (a, b))| (b - a).checked_mul(scale).and_then(|v| v.checked_add(*l)))
                    .collect::<Option<Vec<i128>>>()
                    .ok_or_else(|| overflow("partner displacement"))?;
                if new_carry.iter().all(|&c| c == 0) {
                    *atoms.entry((k, l1(&lam2)?)).or_insert(0.0) += q;
                } else {
                    *next.entry((new_carry, lam2)).or_insert(0.0) += q;
                }
            }
        }
        if next.len() as u64 > budget {
            return Err(Error::ResourceExhausted {
                what: format!("merged carry states at level {k}"),
                reached: next.len() as u64,
            });
        }
        states = next;
    }
    Ok(DistanceLaw::from_map(atoms, states.values().sum(), depth))
}

fn l1(v: &[i128]) -> Result<u128> {
    v.iter()
        .try_fold(0u128, |acc, c| acc.checked_add(c.unsigned_abs()))
        .ok_or_else(|| overflow("distance"))
}
