//! The lamplighter `Z/k ≀ Z` and `BS(1,k) = Z[1/k] ⋊ Z` acting on the same
//! bi-infinite product `∏_{i∈Z} Z/k`.
//!
//! The lamplighter element `(f, m)` shifts right by `m` and then adds `f`.
//! `BS(1,k)` acts through `(z, n) = (z, 0)(0, n)`: `(0, n)` shifts left by `n`
//! and `z = Σ a_i k^i` is added as a `k`-adic number, carrying toward larger
//! indices. A left shift is what makes `(0,1)(z,0)(0,−1) = (z/k, 0)` hold for
//! the odometer, so the `Z`-generator of `BS(1,k)` acts as the inverse of the
//! lamplighter cursor move.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{usage, Error, Result};
use crate::group::{BsElement, GroupDescriptor, GroupElement, LampElement};
use crate::rng;

/// A point of `∏_Z Z/k`: coordinates written so far, over a seeded uniform background.
#[derive(Clone, Debug)]
pub struct BiInfinitePoint {
    k: u32,
    seed: u64,
    /// Background coordinate `i` is the seeded value at `i − offset`.
    offset: i64,
    window: BTreeMap<i64, u32>,
}

impl BiInfinitePoint {
    pub fn random(k: u32, seed: u64) -> Result<Self> {
        if k < 2 {
            return usage(format!("the odometer needs k >= 2, got {k}"));
        }
        Ok(BiInfinitePoint {
            k,
            seed,
            offset: 0,
            window: BTreeMap::new(),
        })
    }

    /// A random point with some coordinates fixed.
    pub fn with_coordinates(k: u32, seed: u64, coords: &[(i64, u32)]) -> Result<Self> {
        let mut x = Self::random(k, seed)?;
        for &(i, v) in coords {
            if v >= k {
                return usage(format!("coordinate value {v} is not in Z/{k}"));
            }
            x.window.insert(i, v);
        }
        Ok(x)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn get(&self, i: i64) -> u32 {
        match self.window.get(&i) {
            Some(&v) => v,
            None => rng::uniform_below(self.seed, &[i.wrapping_sub(self.offset) as u64], self.k as u128) as u32,
        }
    }

    fn set(&mut self, i: i64, v: u32) {
        self.window.insert(i, v);
    }

    /// Coordinates that have been written, as an interval `[a, b]`.
    pub fn window(&self) -> Option<(i64, i64)> {
        Some((*self.window.keys().next()?, *self.window.keys().next_back()?))
    }

    /// New coordinate `i` is old coordinate `i − m`.
    fn shift_right(&mut self, m: i64) {
        if m == 0 {
            return;
        }
        self.offset += m;
        self.window = std::mem::take(&mut self.window).into_iter().map(|(p, v)| (p + m, v)).collect();
    }

    /// `y_i − x_i` at every position where the points differ, or `None` when
    /// they differ at infinitely many positions (distinct backgrounds).
    pub fn difference(&self, other: &Self) -> Option<Vec<(i64, i64)>> {
        if self.k != other.k || self.seed != other.seed || self.offset != other.offset {
            return None;
        }
        let mut keys: Vec<i64> = self.window.keys().chain(other.window.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        Some(
            keys.into_iter()
                .filter_map(|i| {
                    let d = other.get(i) as i64 - self.get(i) as i64;
                    (d != 0).then_some((i, d))
                })
                .collect(),
        )
    }
}

impl PartialEq for BiInfinitePoint {
    fn eq(&self, other: &Self) -> bool {
        self.difference(other).is_some_and(|d| d.is_empty())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Lamplighter,
    BaumslagSolitar,
}

#[derive(Clone, Debug, Serialize)]
pub struct TailBoundReport {
    pub k: u32,
    pub g: String,
    pub g_length: u64,
    #[serde(rename = "M")]
    pub m: u32,
    pub threshold: u64,
    pub freq: f64,
    pub stderr: f64,
    pub paper_bound: f64,
    /// Samples whose carry ran past the window bound; counted as exceeding the threshold.
    pub window_exhausted: u64,
    pub pass: bool,
}

/// The pair of actions for a fixed `k`.
#[derive(Clone, Debug)]
pub struct OdometerCoupling {
    k: u32,
    window_bound: usize,
    lamplighter: GroupDescriptor,
    bs: GroupDescriptor,
}

pub const DEFAULT_WINDOW_BOUND: usize = 64;

impl OdometerCoupling {
    pub fn new(k: u32) -> Result<Self> {
        if k < 2 {
            return usage(format!("the odometer needs k >= 2, got {k}"));
        }
        Ok(OdometerCoupling {
            k,
            window_bound: DEFAULT_WINDOW_BOUND,
            lamplighter: GroupDescriptor::lamplighter(k),
            bs: GroupDescriptor::baumslag_solitar(k),
        })
    }

    pub fn with_window_bound(mut self, bound: usize) -> Self {
        self.window_bound = bound;
        self
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn lamplighter(&self) -> &GroupDescriptor {
        &self.lamplighter
    }

    pub fn bs(&self) -> &GroupDescriptor {
        &self.bs
    }

    pub fn ll_act(&self, g: &LampElement, x: &BiInfinitePoint) -> BiInfinitePoint {
        let mut y = x.clone();
        y.shift_right(g.cursor());
        for &(p, v) in g.lamps() {
            let cur = y.get(p);
            y.set(p, (cur + v) % self.k);
        }
        y
    }

    pub fn bs_act(&self, g: &BsElement, x: &BiInfinitePoint) -> Result<BiInfinitePoint> {
        let mut y = x.clone();
        y.shift_right(-g.shift());
        self.add(&mut y, g.numerator(), -(g.scale() as i64))?;
        Ok(y)
    }

    /// Adds `a · k^low` with carries (or borrows) running toward larger indices.
    fn add(&self, y: &mut BiInfinitePoint, a: i128, low: i64) -> Result<()> {
        let k = self.k as i128;
        let sign: i128 = if a < 0 { -1 } else { 1 };
        let mut rest = a.unsigned_abs();
        let mut carry: i128 = 0;
        let mut p = low;
        while rest > 0 {
            let digit = (rest % k as u128) as i128;
            rest /= k as u128;
            let v = y.get(p) as i128 + sign * digit + carry;
            y.set(p, v.rem_euclid(k) as u32);
            carry = v.div_euclid(k);
            p += 1;
        }
        let mut steps = 0;
        while carry != 0 {
            if steps == self.window_bound {
                return Err(Error::WindowExhausted { bound: self.window_bound });
            }
            let v = y.get(p) as i128 + carry;
            y.set(p, v.rem_euclid(k) as u32);
            carry = v.div_euclid(k);
            p += 1;
            steps += 1;
        }
        Ok(())
    }

    pub fn act(&self, g: &GroupElement, x: &BiInfinitePoint) -> Result<BiInfinitePoint> {
        match g {
            GroupElement::Lamp(l) if self.lamplighter.family().contains(g) => Ok(self.ll_act(l, x)),
            GroupElement::Bs(b) if self.bs.family().contains(g) => self.bs_act(b, x),
            _ => usage(format!("{g:?} is in neither Z/{0} wr Z nor BS(1,{0})", self.k)),
        }
    }

    /// The lamplighter element `(y − S_m x, m)` carrying `x` to `y`.
    pub fn lamplighter_between(&self, x: &BiInfinitePoint, y: &BiInfinitePoint) -> Option<LampElement> {
        let m = y.offset - x.offset;
        let mut shifted = x.clone();
        shifted.shift_right(m);
        let diff = shifted.difference(y)?;
        Some(LampElement::new(self.k, diff, m))
    }

    /// The `BS(1,k)` element `(Σ (y_i − w_i) k^i, j)` with `w` the `j`-fold left shift of `x`.
    pub fn bs_between(&self, x: &BiInfinitePoint, y: &BiInfinitePoint) -> Result<Option<BsElement>> {
        let j = x.offset - y.offset;
        let mut shifted = x.clone();
        shifted.shift_right(-j);
        let Some(diff) = shifted.difference(y) else { return Ok(None) };
        let Some(&(low, _)) = diff.first() else {
            return Ok(Some(BsElement::new(self.k, 0, 0, j)));
        };
        let k = self.k as i128;
        let high = diff.last().expect("nonempty").0;
        let digits: BTreeMap<i64, i64> = diff.into_iter().collect();
        let mut a: i128 = 0;
        for i in (low..=high).rev() {
            a = a
                .checked_mul(k)
                .and_then(|v| v.checked_add(*digits.get(&i).unwrap_or(&0) as i128))
                .ok_or(Error::ResourceExhausted {
                    what: "Z[1/k] numerator".into(),
                    reached: (high - low) as u64,
                })?;
        }
        Ok(Some(BsElement::from_scaled(self.k, a, low, j)))
    }

    /// Word length, in `metric`'s group, of the element carrying `x` to `g·x`.
    pub fn move_distance(&self, metric: Metric, g: &GroupElement, x: &BiInfinitePoint) -> Result<u64> {
        let y = self.act(g, x)?;
        match metric {
            Metric::Lamplighter => {
                let l = self.lamplighter_between(x, &y).expect("moves stay in one orbit");
                Ok(l.word_length(self.k))
            }
            Metric::BaumslagSolitar => {
                let b = self.bs_between(x, &y)?.expect("moves stay in one orbit");
                self.bs.word_length(&GroupElement::Bs(b))
            }
        }
    }

    /// Number of consecutive `k − 1` digits starting at `p`: the carry length
    /// of adding `k^p`.
    pub fn carry_length(&self, x: &BiInfinitePoint, p: i64) -> usize {
        (0..).take_while(|j| x.get(p + j) == self.k - 1).count()
    }

    /// Frequencies of `d_S(g·x, x) ≥ (k+1)(2|g|_T + 2M + 3)` in the lamplighter
    /// metric, for each `M`, against the bound `k^{−M+1}`.
    pub fn tail_bound_check(&self, g: &BsElement, ms: &[u32], samples: u64, seed: u64) -> Result<Vec<TailBoundReport>> {
        if samples == 0 {
            return usage("tail check needs at least one sample");
        }
        let ge = GroupElement::Bs(*g);
        let g_length = self.bs.word_length(&ge)?;
        let distances = rng::par_samples(samples, seed, |i, _| -> Result<Option<u64>> {
            let x = BiInfinitePoint::random(self.k, rng::mix(seed, &[i]))?;
            match self.move_distance(Metric::Lamplighter, &ge, &x) {
                Ok(d) => Ok(Some(d)),
                Err(Error::WindowExhausted { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        });
        let distances: Vec<Option<u64>> = distances.into_iter().collect::<Result<_>>()?;
        let exhausted = distances.iter().filter(|d| d.is_none()).count() as u64;
        Ok(ms
            .iter()
            .map(|&m| {
                let threshold = (self.k as u64 + 1) * (2 * g_length + 2 * m as u64 + 3);
                let hits: Vec<f64> = distances
                    .iter()
                    .map(|d| d.is_none_or(|d| d >= threshold) as u8 as f64)
                    .collect();
                let (freq, stderr) = rng::mean_stderr(&hits);
                let paper_bound = (self.k as f64).powi(1 - m as i32);
                TailBoundReport {
                    k: self.k,
                    g: self.bs.format_element(&ge),
                    g_length,
                    m,
                    threshold,
                    freq,
                    stderr,
                    paper_bound,
                    window_exhausted: exhausted,
                    pass: freq <= paper_bound + 4.0 * stderr,
                }
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples() {
        let c = OdometerCoupling::new(2).unwrap();
        let x = BiInfinitePoint::with_coordinates(2, 7, &[(0, 1), (1, 1), (2, 0)]).unwrap();
        let one = BsElement::new(2, 1, 0, 0);
        let y = c.bs_act(&one, &x).unwrap();
        assert_eq!((y.get(0), y.get(1), y.get(2)), (0, 0, 1));
        assert_eq!(y.get(3), x.get(3));
        assert_eq!(c.move_distance(Metric::Lamplighter, &GroupElement::Bs(one), &x).unwrap(), 7);

        let x0 = BiInfinitePoint::with_coordinates(2, 7, &[(0, 0)]).unwrap();
        let y = c.bs_act(&one, &x0).unwrap();
        assert_eq!(x0.difference(&y).unwrap(), vec![(0, 1)]);

        let delta = LampElement::new(2, [(0, 1)], 0);
        let y = c.ll_act(&delta, &x0);
        assert_eq!(x0.difference(&y).unwrap(), vec![(0, 1)]);

        let t = LampElement::new(2, [], 1);
        let y = c.ll_act(&t, &x);
        for i in -5..5 {
            assert_eq!(y.get(i), x.get(i - 1));
        }
        let sigma = BsElement::new(2, 0, 0, 1);
        let y = c.bs_act(&sigma, &x).unwrap();
        for i in -5..5 {
            assert_eq!(y.get(i), x.get(i + 1));
        }
        assert_eq!(c.move_distance(Metric::Lamplighter, &GroupElement::Bs(sigma), &x).unwrap(), 1);
    }

    #[test]
    fn lamp_has_order_k() {
        let c = OdometerCoupling::new(3).unwrap();
        let x = BiInfinitePoint::random(3, 1).unwrap();
        let delta = LampElement::new(3, [(0, 1)], 0);
        let y = (0..3).fold(x.clone(), |acc, _| c.ll_act(&delta, &acc));
        assert_eq!(y, x);
    }

    #[test]
    fn window_bound_is_enforced() {
        let c = OdometerCoupling::new(2).unwrap().with_window_bound(3);
        let ones: Vec<(i64, u32)> = (0..10).map(|i| (i, 1)).collect();
        let x = BiInfinitePoint::with_coordinates(2, 0, &ones).unwrap();
        assert_eq!(
            c.bs_act(&BsElement::new(2, 1, 0, 0), &x),
            Err(Error::WindowExhausted { bound: 3 })
        );
    }
}
