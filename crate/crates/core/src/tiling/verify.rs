use std::collections::{HashMap, HashSet};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{Orientation, TilingSequence};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::rng;
use crate::Rational;

const BYTES_PER_TILE_ELEMENT: u64 = 192;

/// A materialized tile `T_k`.
#[derive(Clone, Debug)]
pub struct Tile {
    pub k: usize,
    pub elements: HashSet<GroupElement>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FolnerReport {
    pub k: usize,
    /// Worst boundary count over the generators.
    pub boundary: u128,
    pub size: u128,
    #[serde(skip)]
    pub computed: Rational,
    #[serde(skip)]
    pub claimed: Option<Rational>,
    pub within_claim: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiameterMode {
    Exact,
    Sampled { pairs: u64, seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct DiameterReport {
    pub k: usize,
    pub value: u64,
    /// `false` for sampled runs, whose value is only a lower bound.
    pub exact: bool,
    pub claimed: Option<u128>,
    pub within_claim: Option<bool>,
}

impl TilingSequence {
    /// Materializes `T_0, …, T_K` and proves each is a disjoint union of
    /// translates by checking `|T_k| = ∏|F_i|`.
    pub fn build_tiles(&self, max_k: usize) -> Result<Vec<Tile>> {
        let budget = self.group.budget().max_items(BYTES_PER_TILE_ELEMENT) as u128;
        let needed: u128 = (0..=max_k)
            .map(|k| self.tile_size(k))
            .try_fold(0u128, |acc, s| s.map(|s| acc.saturating_add(s)))
            .unwrap_or(u128::MAX);
        if needed > budget {
            return Err(Error::ResourceExhausted {
                what: format!("materializing tiles up to level {max_k}"),
                reached: budget as u64,
            });
        }
        let mut tiles: Vec<Tile> = Vec::with_capacity(max_k + 1);
        let mut current: Vec<GroupElement> = Vec::new();
        for k in 0..=max_k {
            let letters: Vec<GroupElement> = (0..self.letter_size(k).unwrap())
                .map(|i| self.letter(k, i))
                .collect();
            let next: Vec<GroupElement> = if k == 0 {
                letters
            } else {
                current
                    .par_iter()
                    .flat_map_iter(|t| letters.iter().map(move |f| self.extend(t, f)))
                    .collect()
            };
            let expected = self.tile_size(k).unwrap();
            let set: HashSet<GroupElement> = next.iter().cloned().collect();
            if set.len() as u128 != expected {
                return Err(self.find_overlap(k));
            }
            current = next;
            tiles.push(Tile { k, elements: set });
        }
        Ok(tiles)
    }

    fn find_overlap(&self, k: usize) -> Error {
        let mut seen: HashMap<GroupElement, Vec<u128>> = HashMap::new();
        let size: u128 = (0..=k).map(|j| self.letter_size(j).unwrap()).product();
        for flat in 0..size {
            let idx = self.unflatten(flat, k);
            let g = self.product(&idx);
            if let Some(prev) = seen.insert(g, idx.clone()) {
                return self.violation(k, &prev, &idx);
            }
        }
        Error::TilingViolation {
            k,
            first: "?".into(),
            second: "?".into(),
        }
    }

    /// `max_s |T_k \ s T_k| / |T_k|` (left) or `max_s |T_k \ T_k s| / |T_k|` (right),
    /// counted on the materialized tile.
    pub fn folner_constant(&self, tile: &Tile) -> FolnerReport {
        let worst = self
            .group
            .generators()
            .iter()
            .map(|s| {
                let s_inv = self.group.inv(s);
                tile.elements
                    .par_iter()
                    .filter(|t| {
                        let moved = match self.orientation {
                            Orientation::Left => self.group.mul(&s_inv, t),
                            Orientation::Right => self.group.mul(t, &s_inv),
                        };
                        !tile.elements.contains(&moved)
                    })
                    .count() as u128
            })
            .max()
            .unwrap_or(0);
        let size = tile.elements.len() as u128;
        let computed = Rational::new(worst as i128, size as i128);
        let claimed = self.claimed_epsilon(tile.k);
        FolnerReport {
            k: tile.k,
            boundary: worst,
            size,
            computed,
            claimed,
            within_claim: claimed.map(|c| computed <= c),
        }
    }

    /// Exact or sampled `d_S`-diameter of `T_k`.
    pub fn tile_diameter(&self, k: usize, mode: DiameterMode) -> Result<DiameterReport> {
        let (value, exact) = match mode {
            DiameterMode::Exact => (self.exact_diameter(k)?, true),
            DiameterMode::Sampled { pairs, seed } => (self.sampled_diameter(k, pairs, seed)?, false),
        };
        let claimed = self.claimed_radius(k);
        Ok(DiameterReport {
            k,
            value,
            exact,
            claimed,
            within_claim: claimed.map(|r| value as u128 <= r),
        })
    }

    fn exact_diameter(&self, k: usize) -> Result<u64> {
        if let crate::group::Family::Zn(n) = *self.group.family() {
            return self.zn_diameter(k, n);
        }
        let tile = self.build_tiles(k)?.pop().unwrap();
        let elems: Vec<GroupElement> = tile.elements.into_iter().collect();
        if (elems.len() as u128).pow(2) > self.group.budget().max_items(64) as u128 {
            return Err(Error::ResourceExhausted {
                what: "pairwise diameter".into(),
                reached: elems.len() as u64,
            });
        }
        let quotients: HashSet<GroupElement> = elems
            .par_iter()
            .flat_map_iter(|u| {
                let ui = self.group.inv(u);
                elems.iter().map(move |v| self.group.mul(&ui, v))
            })
            .collect();
        let quotients: Vec<GroupElement> = quotients.into_iter().collect();
        quotients
            .par_iter()
            .map(|q| self.group.word_length(q))
            .try_reduce(|| 0, |a, b| Ok(a.max(b)))
    }

    /// ℓ¹ diameter as `max_σ (max σ·p − min σ·p)` over sign vectors `σ`.
    fn zn_diameter(&self, k: usize, n: usize) -> Result<u64> {
        let size = self.tile_size(k).ok_or(Error::NotInTile { k })?;
        if size > self.group.budget().max_items(16) as u128 {
            return Err(Error::ResourceExhausted {
                what: "streaming diameter".into(),
                reached: size as u64,
            });
        }
        let signs: Vec<Vec<i128>> = (0..1u32 << n)
            .map(|mask| (0..n).map(|j| if mask >> j & 1 == 1 { -1 } else { 1 }).collect())
            .collect();
        let extremes = (0..size as u64)
            .into_par_iter()
            .fold(
                || vec![(i128::MAX, i128::MIN); signs.len()],
                |mut acc, flat| {
                    let g = self.product(&self.unflatten(flat as u128, k));
                    let p = g.as_zn().expect("Z^n element");
                    for (e, sigma) in acc.iter_mut().zip(&signs) {
                        let dot: i128 = p.iter().zip(sigma).map(|(a, b)| a * b).sum();
                        e.0 = e.0.min(dot);
                        e.1 = e.1.max(dot);
                    }
                    acc
                },
            )
            .reduce(
                || vec![(i128::MAX, i128::MIN); signs.len()],
                |a, b| a.iter().zip(&b).map(|(x, y)| (x.0.min(y.0), x.1.max(y.1))).collect(),
            );
        Ok(extremes.iter().map(|(lo, hi)| (hi - lo) as u64).max().unwrap_or(0))
    }

    fn sampled_diameter(&self, k: usize, pairs: u64, seed: u64) -> Result<u64> {
        let size = self.tile_size(k).ok_or(Error::NotInTile { k })?;
        let lengths = rng::par_samples(pairs, seed, |_, r| {
            let u = self.product(&self.unflatten(r.random_range(0..size), k));
            let v = self.product(&self.unflatten(r.random_range(0..size), k));
            self.group.word_length(&self.group.mul(&self.group.inv(&u), &v))
        });
        lengths.into_iter().try_fold(0, |acc, l| Ok(acc.max(l?)))
    }
}
