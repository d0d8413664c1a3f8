//! The orbit-equivalence coupling induced by two Følner tiling sequences with
//! equal letter sizes.
//!
//! A point of `X = ∏_k F_k` is a finite prefix of letter indices followed by a
//! lazily generated uniform tail. Index `i` at level `k` names the `i`-th letter
//! of both tilings, which is the identification of the two product spaces.

mod gauge;
mod integrate;
mod law;
mod returns;

pub use gauge::IntegrabilityGauge;
pub use integrate::{stratified_bound, IntegrabilityEstimate, StratifiedBound};
pub use law::{Atom, DistanceLaw};
pub use returns::{CylinderSet, ReturnTimeReport};

use serde::Serialize;

use crate::error::{usage, Error, Result};
use crate::group::GroupElement;
use crate::rng;
use crate::tiling::{Orientation, TilingSequence};
use crate::Rational;

/// A point of `∏_k F_k`: explicit coordinates `0..prefix.len()`, then
/// coordinates drawn uniformly from `(tail_seed, k)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CouplingPoint {
    prefix: Vec<u128>,
    tail_seed: u64,
}

impl CouplingPoint {
    pub fn new(prefix: Vec<u128>, tail_seed: u64) -> Self {
        CouplingPoint { prefix, tail_seed }
    }

    /// A point with no explicit coordinates.
    pub fn random(tail_seed: u64) -> Self {
        Self::new(Vec::new(), tail_seed)
    }

    pub fn prefix(&self) -> &[u128] {
        &self.prefix
    }

    pub fn tail_seed(&self) -> u64 {
        self.tail_seed
    }

    /// Coordinate `k`, for a level of size `size`.
    pub fn coordinate(&self, k: usize, size: u128) -> u128 {
        match self.prefix.get(k) {
            Some(&i) => i,
            None => rng::uniform_below(self.tail_seed, &[k as u64], size),
        }
    }

    /// Coordinates `0..=k` under the letter sizes of `tiling`.
    pub fn coordinates(&self, tiling: &TilingSequence, k: usize) -> Vec<u128> {
        (0..=k)
            .map(|j| self.coordinate(j, tiling.letter_size(j).expect("level within range")))
            .collect()
    }

    /// Drops trailing explicit coordinates that agree with the lazy tail, so
    /// that equal points have equal representations.
    fn trimmed(mut self, tiling: &TilingSequence) -> Self {
        while let Some(&last) = self.prefix.last() {
            let k = self.prefix.len() - 1;
            let size = tiling.letter_size(k).expect("level within range");
            if rng::uniform_below(self.tail_seed, &[k as u64], size) != last {
                break;
            }
            self.prefix.pop();
        }
        self
    }

    fn check(&self, tiling: &TilingSequence) -> Result<()> {
        for (k, &i) in self.prefix.iter().enumerate() {
            match tiling.letter_size(k) {
                Some(s) if i < s => {}
                _ => return usage(format!("coordinate {k} = {i} is not a letter index")),
            }
        }
        Ok(())
    }
}

impl TilingSequence {
    /// The induced action: the smallest `n ≤ max_depth` with `γ·g_n(x) ∈ T_n`,
    /// and `x` with coordinates `0..=n` rewritten to spell `γ·g_n(x)`.
    pub fn act(&self, gamma: &GroupElement, x: &CouplingPoint, max_depth: usize) -> Result<(CouplingPoint, usize)> {
        let (new, n) = self.act_prefix(gamma, x, max_depth)?;
        let mut prefix = new;
        prefix.extend(x.prefix.iter().skip(n + 1));
        Ok((CouplingPoint::new(prefix, x.tail_seed).trimmed(self), n))
    }

    /// The rewritten coordinates `0..=n` and the depth `n`.
    fn act_prefix(&self, gamma: &GroupElement, x: &CouplingPoint, max_depth: usize) -> Result<(Vec<u128>, usize)> {
        self.group().check(gamma)?;
        x.check(self)?;
        let limit = max_depth.min(self.max_depth());
        let mut g = self.group().identity();
        for n in 0..=limit {
            let size = self.letter_size(n).expect("level within range");
            g = self.extend(&g, &self.letter(n, x.coordinate(n, size)));
            if let Ok(idx) = self.decode(&self.translate(gamma, &g), n) {
                return Ok((idx, n));
            }
        }
        Err(Error::DepthExhausted { max_depth: limit })
    }

    /// `ρ(γ·x, x)`: one past the last coordinate that changes, `0` if none does.
    pub fn stabilization_depth(&self, gamma: &GroupElement, x: &CouplingPoint, max_depth: usize) -> Result<usize> {
        let (new, _) = self.act_prefix(gamma, x, max_depth)?;
        let old = x.coordinates(self, new.len() - 1);
        Ok(new
            .iter()
            .zip(&old)
            .rposition(|(a, b)| a != b)
            .map_or(0, |j| j + 1))
    }

    /// The element `λ` with `translate(λ, g_n(from)) = g_n(to)`.
    fn connecting_element(&self, from: &[u128], to: &[u128]) -> GroupElement {
        let (t, t2) = (self.product(from), self.product(to));
        let group = self.group();
        match self.orientation() {
            Orientation::Left => group.mul(&t2, &group.inv(&t)),
            Orientation::Right => group.mul(&group.inv(&t2), &t),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Two tilings with `|F_k| = |F'_k|` for every level up to `max_depth`.
#[derive(Clone, Debug)]
pub struct MatchedCoupling {
    left: TilingSequence,
    right: TilingSequence,
    max_depth: usize,
}

/// One row of the tail law: `μ{γ g_k(x) ∉ T_k}` exactly and by simulation.
#[derive(Clone, Debug, Serialize)]
pub struct TailRow {
    pub k: usize,
    #[serde(skip)]
    pub exact: Option<Rational>,
    pub exact_f64: Option<f64>,
    pub mc_freq: f64,
    pub stderr: f64,
}

impl TailRow {
    /// Whether the simulated frequency is within `z` standard errors of the
    /// exact value. A zero standard error is widened to one sample.
    pub fn agrees(&self, z: f64, samples: u64) -> Option<bool> {
        let exact = self.exact_f64?;
        let se = self.stderr.max(1.0 / samples as f64);
        Some((self.mc_freq - exact).abs() <= z * se)
    }
}

impl MatchedCoupling {
    pub fn new(left: TilingSequence, right: TilingSequence, max_depth: usize) -> Result<Self> {
        let max_depth = max_depth.min(left.max_depth()).min(right.max_depth());
        for k in 0..=max_depth {
            let (a, b) = (left.letter_size(k), right.letter_size(k));
            if a != b {
                return usage(format!(
                    "letter sizes differ at level {k}: {} has {a:?}, {} has {b:?}",
                    left.name(),
                    right.name()
                ));
            }
        }
        Ok(MatchedCoupling { left, right, max_depth })
    }

    /// The same tiling on both sides, so the identification is the identity.
    pub fn diagonal(tiling: TilingSequence, max_depth: usize) -> Result<Self> {
        Self::new(tiling.clone(), tiling, max_depth)
    }

    pub fn left(&self) -> &TilingSequence {
        &self.left
    }

    pub fn right(&self) -> &TilingSequence {
        &self.right
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn tiling(&self, side: Side) -> &TilingSequence {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn act(&self, side: Side, gamma: &GroupElement, x: &CouplingPoint) -> Result<(CouplingPoint, usize)> {
        self.tiling(side).act(gamma, x, self.max_depth)
    }

    pub fn stabilization_depth(&self, side: Side, gamma: &GroupElement, x: &CouplingPoint) -> Result<usize> {
        self.tiling(side).stabilization_depth(gamma, x, self.max_depth)
    }

    /// The element of the partner group carrying `x` to `γ·x` under the partner action.
    pub fn transfer_cocycle(&self, side: Side, gamma: &GroupElement, x: &CouplingPoint) -> Result<GroupElement> {
        Ok(self.transfer_with_depth(side, gamma, x)?.0)
    }

    fn transfer_with_depth(&self, side: Side, gamma: &GroupElement, x: &CouplingPoint) -> Result<(GroupElement, usize)> {
        let acting = self.tiling(side);
        let (new, n) = acting.act_prefix(gamma, x, self.max_depth)?;
        let old = x.coordinates(acting, n);
        Ok((self.tiling(side.other()).connecting_element(&old, &new), n))
    }

    /// `d_{S'}(x, γ·x)`, the partner word length of the transfer cocycle, and the depth.
    pub fn transfer_distance(&self, side: Side, gamma: &GroupElement, x: &CouplingPoint) -> Result<(u64, usize)> {
        let (lambda, n) = self.transfer_with_depth(side, gamma, x)?;
        Ok((self.tiling(side.other()).group().word_length(&lambda)?, n))
    }

    pub fn exact_tail(&self, side: Side, gamma: &GroupElement, k: usize) -> Result<Rational> {
        self.tiling(side).exact_tail(gamma, k)
    }

    /// Exact and simulated `μ{γ g_k(x) ∉ T_k}` for `k = 0..=max_k`.
    ///
    /// The event is `depth > k`; the stabilization depth `ρ` of a moved point
    /// equals its depth plus one. Points exhausting `max_depth` count as
    /// escaping every level.
    pub fn tail_law(&self, side: Side, gamma: &GroupElement, max_k: usize, samples: u64, seed: u64) -> Result<Vec<TailRow>> {
        if samples == 0 {
            return usage("tail law needs at least one sample");
        }
        let acting = self.tiling(side);
        acting.group().check(gamma)?;
        let depths = rng::par_samples(samples, seed, |i, _| {
            let x = CouplingPoint::random(rng::mix(seed, &[i]));
            match acting.act_prefix(gamma, &x, self.max_depth) {
                Ok((_, n)) => Ok(Some(n)),
                Err(Error::DepthExhausted { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        });
        let depths: Vec<Option<usize>> = depths.into_iter().collect::<Result<_>>()?;
        (0..=max_k)
            .map(|k| {
                let hits: Vec<f64> = depths
                    .iter()
                    .map(|d| if d.is_none_or(|n| n > k) { 1.0 } else { 0.0 })
                    .collect();
                let (mc_freq, stderr) = rng::mean_stderr(&hits);
                let exact = match acting.exact_tail(gamma, k) {
                    Ok(r) => Some(r),
                    Err(Error::ResourceExhausted { .. }) => None,
                    Err(e) => return Err(e),
                };
                Ok(TailRow {
                    k,
                    exact,
                    exact_f64: exact.map(|r| *r.numer() as f64 / *r.denom() as f64),
                    mc_freq,
                    stderr,
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z1() -> TilingSequence {
        TilingSequence::zn(1, 1).unwrap()
    }

    #[test]
    fn odometer_examples() {
        let t = z1();
        let x = CouplingPoint::new(vec![1, 1, 1], 9);
        let one = GroupElement::Zn(vec![1]);
        let (y, n) = t.act(&one, &x, 40).unwrap();
        assert_eq!(n, 3);
        assert_eq!(y.coordinates(&t, 3), vec![0, 0, 0, 1]);
        assert_eq!(t.letter(3, 1), GroupElement::Zn(vec![8]));
        assert_eq!(t.stabilization_depth(&one, &x, 40).unwrap(), 4);

        let x = CouplingPoint::new(vec![1, 0], 9);
        assert_eq!(t.stabilization_depth(&one, &x, 40).unwrap(), 2);
        let (y, _) = t.act(&one, &x, 40).unwrap();
        assert_eq!(y.coordinates(&t, 1), vec![0, 1]);

        let x = CouplingPoint::new(vec![0], 9);
        let (y, n) = t.act(&one, &x, 40).unwrap();
        assert_eq!((y.coordinate(0, 2), n), (1, 0));

        let zero = GroupElement::Zn(vec![0]);
        let (y, n) = t.act(&zero, &x, 40).unwrap();
        assert_eq!((y, n), (x.trimmed(&t), 0));
        assert_eq!(t.stabilization_depth(&zero, &CouplingPoint::random(4), 40).unwrap(), 0);
    }

    #[test]
    fn depth_exhaustion_is_reported() {
        let t = z1();
        let far = GroupElement::Zn(vec![1 << 20]);
        assert_eq!(
            t.act(&far, &CouplingPoint::random(1), 5),
            Err(Error::DepthExhausted { max_depth: 5 })
        );
    }

    #[test]
    fn diagonal_transfer_is_gamma() {
        let c = MatchedCoupling::diagonal(TilingSequence::heisenberg(), 30).unwrap();
        let g = GroupElement::Heis([1, -2, 3]);
        for seed in 0..50 {
            let x = CouplingPoint::random(seed);
            assert_eq!(c.transfer_cocycle(Side::Left, &g, &x).unwrap(), g);
        }
        let e = c.left().group().identity();
        assert_eq!(c.transfer_cocycle(Side::Left, &e, &CouplingPoint::random(3)).unwrap(), e);
    }

    #[test]
    fn grouped_z2_to_z_transfer_at_depth_zero() {
        let c = MatchedCoupling::new(
            TilingSequence::zn(2, 1).unwrap(),
            TilingSequence::zn(1, 2).unwrap(),
            20,
        )
        .unwrap();
        let x = CouplingPoint::new(vec![0], 0);
        let e1 = GroupElement::Zn(vec![1, 0]);
        let lambda = c.transfer_cocycle(Side::Left, &e1, &x).unwrap();
        let (y, n) = c.act(Side::Left, &e1, &x).unwrap();
        assert_eq!(n, 0);
        let right = c.right();
        let expected = right.letter(0, y.coordinate(0, 4)).as_zn().unwrap()[0] - right.letter(0, 0).as_zn().unwrap()[0];
        assert_eq!(lambda, GroupElement::Zn(vec![expected]));
        assert_eq!(lambda, GroupElement::Zn(vec![1]));
    }

    #[test]
    fn mismatched_sizes_are_rejected() {
        assert!(MatchedCoupling::new(TilingSequence::zn(2, 1).unwrap(), TilingSequence::zn(1, 1).unwrap(), 5).is_err());
    }
}
