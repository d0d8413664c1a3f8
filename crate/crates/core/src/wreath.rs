//! Wreath products of orbit couplings.
//!
//! A point is a base point `x` together with a lamp state `l_y` at every point `y`
//! of the base orbit. Lamps are keyed by the canonical coordinates of `y`, which are
//! shared by both sides of the base coupling; unrealized lamps are drawn lazily from
//! a seed, so re-reading a lamp gives the same state.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::coupling::{CouplingPoint, IntegrabilityGauge, MatchedCoupling, Side};
use crate::error::{usage, Error, Result};
use crate::group::GroupElement;
use crate::rng;

/// The coupling between the lamp groups.
#[derive(Clone, Debug)]
pub enum LampCoupling {
    Matched(MatchedCoupling),
    /// `Z/k` acting on itself on both sides, elements written as `Zn([a])` with `0 ≤ a < k`.
    Cyclic(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LampState {
    Point(CouplingPoint),
    Residue(u32),
}

impl LampCoupling {
    pub fn cyclic(k: u32) -> Result<Self> {
        if k < 2 {
            return usage("cyclic lamps need k >= 2");
        }
        Ok(LampCoupling::Cyclic(k))
    }

    fn residue(k: u32, g: &GroupElement) -> Result<u32> {
        match g.as_zn() {
            Some(&[a]) => Ok(a.rem_euclid(k as i128) as u32),
            _ => usage(format!("{g:?} is not an element of Z/{k}")),
        }
    }

    fn random_state(&self, seed: u64) -> LampState {
        match self {
            LampCoupling::Matched(_) => LampState::Point(CouplingPoint::random(seed)),
            LampCoupling::Cyclic(k) => LampState::Residue(rng::uniform_below(seed, &[], *k as u128) as u32),
        }
    }

    pub fn identity(&self, side: Side) -> GroupElement {
        match self {
            LampCoupling::Matched(c) => c.tiling(side).group().identity(),
            LampCoupling::Cyclic(_) => GroupElement::Zn(vec![0]),
        }
    }

    pub fn generators(&self, side: Side) -> Vec<GroupElement> {
        match self {
            LampCoupling::Matched(c) => c.tiling(side).group().generators().to_vec(),
            LampCoupling::Cyclic(2) => vec![GroupElement::Zn(vec![1])],
            LampCoupling::Cyclic(k) => vec![GroupElement::Zn(vec![1]), GroupElement::Zn(vec![*k as i128 - 1])],
        }
    }

    pub fn check(&self, side: Side, g: &GroupElement) -> Result<()> {
        match self {
            LampCoupling::Matched(c) => c.tiling(side).group().check(g),
            LampCoupling::Cyclic(k) => match g.as_zn() {
                Some(&[a]) if (0..*k as i128).contains(&a) => Ok(()),
                _ => usage(format!("{g:?} is not a reduced element of Z/{k}")),
            },
        }
    }

    pub fn mul(&self, side: Side, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        match self {
            LampCoupling::Matched(c) => c.tiling(side).group().multiply(a, b),
            LampCoupling::Cyclic(k) => {
                Ok(GroupElement::Zn(vec![((Self::residue(*k, a)? + Self::residue(*k, b)?) % k) as i128]))
            }
        }
    }

    pub fn is_identity(&self, side: Side, g: &GroupElement) -> bool {
        *g == self.identity(side)
    }

    pub fn length(&self, side: Side, g: &GroupElement) -> Result<u64> {
        match self {
            LampCoupling::Matched(c) => c.tiling(side).group().word_length(g),
            LampCoupling::Cyclic(k) => {
                let a = Self::residue(*k, g)?;
                Ok(a.min(k - a) as u64)
            }
        }
    }

    pub fn act(&self, side: Side, lambda: &GroupElement, l: &LampState) -> Result<LampState> {
        match (self, l) {
            (LampCoupling::Matched(c), LampState::Point(p)) => Ok(LampState::Point(c.act(side, lambda, p)?.0)),
            (LampCoupling::Cyclic(k), LampState::Residue(r)) => {
                Ok(LampState::Residue((r + Self::residue(*k, lambda)?) % k))
            }
            _ => usage("lamp state does not belong to this lamp coupling"),
        }
    }

    /// The partner element carrying `l` to `λ·l`.
    pub fn transfer(&self, side: Side, lambda: &GroupElement, l: &LampState) -> Result<GroupElement> {
        match (self, l) {
            (LampCoupling::Matched(c), LampState::Point(p)) => c.transfer_cocycle(side, lambda, p),
            (LampCoupling::Cyclic(k), LampState::Residue(_)) => {
                Ok(GroupElement::Zn(vec![Self::residue(*k, lambda)? as i128]))
            }
            _ => usage("lamp state does not belong to this lamp coupling"),
        }
    }
}

/// An element `(f, γ)` of `Λ ≀ Γ`; `lamps` holds the finitely many non-identity values of `f`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WreathElement {
    pub lamps: BTreeMap<GroupElement, GroupElement>,
    pub base: GroupElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WreathPoint {
    base: CouplingPoint,
    lamps: BTreeMap<Vec<u128>, LampState>,
    lamp_seed: u64,
}

impl WreathPoint {
    pub fn base(&self) -> &CouplingPoint {
        &self.base
    }

    /// Lamps whose state differs from the lazily drawn default.
    pub fn realized(&self) -> &BTreeMap<Vec<u128>, LampState> {
        &self.lamps
    }

    pub fn lamp_seed(&self) -> u64 {
        self.lamp_seed
    }
}

/// Exact or bracketed word length in `Λ ≀ Γ` for the generators `S_Λ ∪ S_Γ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WreathLength {
    pub lower: u64,
    pub upper: u64,
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Prop72Report {
    pub kind: &'static str,
    pub dist: WreathLength,
    pub expected: u64,
    pub holds: bool,
}

/// Largest support for which the traversal is solved exactly.
pub const EXACT_SUPPORT: usize = 12;

#[derive(Clone, Debug)]
pub struct WreathCoupling {
    base: MatchedCoupling,
    lamp: LampCoupling,
}

impl WreathCoupling {
    pub fn new(base: MatchedCoupling, lamp: LampCoupling) -> Self {
        WreathCoupling { base, lamp }
    }

    pub fn base(&self) -> &MatchedCoupling {
        &self.base
    }

    pub fn lamp(&self) -> &LampCoupling {
        &self.lamp
    }

    pub fn random_point(&self, seed: u64) -> WreathPoint {
        WreathPoint {
            base: CouplingPoint::random(rng::mix(seed, &[0])),
            lamps: BTreeMap::new(),
            lamp_seed: rng::mix(seed, &[1]),
        }
    }

    fn default_lamp(&self, p: &WreathPoint, key: &[u128]) -> LampState {
        let mut words = Vec::with_capacity(2 * key.len() + 1);
        words.push(key.len() as u64);
        for &c in key {
            words.push(c as u64);
            words.push((c >> 64) as u64);
        }
        self.lamp.random_state(rng::mix(p.lamp_seed, &words))
    }

    /// The lamp at orbit point `y`.
    pub fn lamp_at(&self, p: &WreathPoint, y: &CouplingPoint) -> LampState {
        p.lamps.get(y.prefix()).cloned().unwrap_or_else(|| self.default_lamp(p, y.prefix()))
    }

    fn set_lamp(&self, p: &mut WreathPoint, key: Vec<u128>, state: LampState) {
        if state == self.default_lamp(p, &key) {
            p.lamps.remove(&key);
        } else {
            p.lamps.insert(key, state);
        }
    }

    pub fn identity(&self, side: Side) -> WreathElement {
        WreathElement {
            lamps: BTreeMap::new(),
            base: self.base.tiling(side).group().identity(),
        }
    }

    /// `(e, γ)`.
    pub fn base_move(&self, side: Side, gamma: GroupElement) -> Result<WreathElement> {
        self.base.tiling(side).group().check(&gamma)?;
        Ok(WreathElement {
            lamps: BTreeMap::new(),
            base: gamma,
        })
    }

    /// `(ι(λ), e)`.
    pub fn lamp_move(&self, side: Side, lambda: GroupElement) -> Result<WreathElement> {
        self.element(side, [(self.base.tiling(side).group().identity(), lambda)], self.identity(side).base)
    }

    /// Builds `(f, γ)`, multiplying repeated positions and dropping identities.
    pub fn element(
        &self,
        side: Side,
        lamps: impl IntoIterator<Item = (GroupElement, GroupElement)>,
        base: GroupElement,
    ) -> Result<WreathElement> {
        let group = self.base.tiling(side).group();
        group.check(&base)?;
        let mut out: BTreeMap<GroupElement, GroupElement> = BTreeMap::new();
        for (g, l) in lamps {
            group.check(&g)?;
            self.lamp.check(side, &l)?;
            let prev = out.remove(&g).unwrap_or_else(|| self.lamp.identity(side));
            let v = self.lamp.mul(side, &prev, &l)?;
            if !self.lamp.is_identity(side, &v) {
                out.insert(g, v);
            }
        }
        Ok(WreathElement { lamps: out, base })
    }

    /// `(f, γ)(f', γ') = (f · γf', γγ')` with `(γf')(g) = f'(γ^{-1} g)`.
    pub fn mul(&self, side: Side, a: &WreathElement, b: &WreathElement) -> Result<WreathElement> {
        let group = self.base.tiling(side).group();
        let mut combined = a.lamps.clone();
        for (g, l) in &b.lamps {
            let h = group.mul(&a.base, g);
            let prev = combined.remove(&h).unwrap_or_else(|| self.lamp.identity(side));
            let v = self.lamp.mul(side, &prev, l)?;
            if !self.lamp.is_identity(side, &v) {
                combined.insert(h, v);
            }
        }
        Ok(WreathElement {
            lamps: combined,
            base: group.mul(&a.base, &b.base),
        })
    }

    /// `(f, γ)·(x, l) = (γ·x, (f(c(y, γ·x))·l_y)_y)`.
    pub fn act(&self, side: Side, w: &WreathElement, p: &WreathPoint) -> Result<WreathPoint> {
        let group = self.base.tiling(side).group();
        let (x, _) = self.base.act(side, &w.base, &p.base)?;
        let mut out = WreathPoint {
            base: x.clone(),
            lamps: p.lamps.clone(),
            lamp_seed: p.lamp_seed,
        };
        for (g, lambda) in &w.lamps {
            let (y, _) = self.base.act(side, &group.inv(g), &x)?;
            let state = self.lamp.act(side, lambda, &self.lamp_at(p, &y))?;
            self.set_lamp(&mut out, y.prefix().to_vec(), state);
        }
        Ok(out)
    }

    /// The element of the partner wreath product with the same effect on `p`.
    pub fn transfer(&self, side: Side, w: &WreathElement, p: &WreathPoint) -> Result<WreathElement> {
        let group = self.base.tiling(side).group();
        let (x, _) = self.base.act(side, &w.base, &p.base)?;
        let base = self.base.transfer_cocycle(side, &w.base, &p.base)?;
        let mut lamps = Vec::with_capacity(w.lamps.len());
        for (g, lambda) in &w.lamps {
            let (y, _) = self.base.act(side, &group.inv(g), &x)?;
            let g2 = self.base.transfer_cocycle(side, g, &y)?;
            lamps.push((g2, self.lamp.transfer(side, lambda, &self.lamp_at(p, &y))?));
        }
        self.element(side.other(), lamps, base)
    }

    /// Word length for `S_Λ ∪ S_Γ`: lamp switch costs plus the shortest walk from the
    /// identity through every lit position to the final base position.
    pub fn length(&self, side: Side, w: &WreathElement) -> Result<WreathLength> {
        let group = self.base.tiling(side).group();
        let mut switches = 0u64;
        for l in w.lamps.values() {
            switches += self.lamp.length(side, l)?;
        }
        let sites: Vec<&GroupElement> = w.lamps.keys().collect();
        let dist = |a: &GroupElement, b: &GroupElement| group.word_length(&group.mul(&group.inv(a), b));
        let e = group.identity();
        let n = sites.len();
        if n == 0 {
            let d = group.word_length(&w.base)?;
            return Ok(WreathLength {
                lower: d,
                upper: d,
                exact: true,
            });
        }
        let from_start: Vec<u64> = sites.iter().map(|s| dist(&e, s)).collect::<Result<_>>()?;
        let to_end: Vec<u64> = sites.iter().map(|s| dist(s, &w.base)).collect::<Result<_>>()?;
        if n <= EXACT_SUPPORT {
            let mut between = vec![vec![0u64; n]; n];
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        between[i][j] = dist(sites[i], sites[j])?;
                    }
                }
            }
            let full = (1usize << n) - 1;
            let mut best = vec![vec![u64::MAX; n]; 1 << n];
            for i in 0..n {
                best[1 << i][i] = from_start[i];
            }
            for mask in 1..=full {
                for last in 0..n {
                    let here = best[mask][last];
                    if here == u64::MAX || mask & (1 << last) == 0 {
                        continue;
                    }
                    for next in 0..n {
                        if mask & (1 << next) == 0 {
                            let m2 = mask | (1 << next);
                            let v = here + between[last][next];
                            if v < best[m2][next] {
                                best[m2][next] = v;
                            }
                        }
                    }
                }
            }
            let travel = (0..n).map(|i| best[full][i] + to_end[i]).min().expect("nonempty support");
            return Ok(WreathLength {
                lower: switches + travel,
                upper: switches + travel,
                exact: true,
            });
        }
        // Greedy nearest-neighbour walk above, a single detour below.
        let mut left: Vec<usize> = (0..n).collect();
        let mut at = e.clone();
        let mut walk = 0u64;
        while !left.is_empty() {
            let mut choice = (u64::MAX, 0usize);
            for (pos, &i) in left.iter().enumerate() {
                let d = dist(&at, sites[i])?;
                if d < choice.0 {
                    choice = (d, pos);
                }
            }
            walk += choice.0;
            at = sites[left.swap_remove(choice.1)].clone();
        }
        walk += dist(&at, &w.base)?;
        let detour = (0..n).map(|i| from_start[i] + to_end[i]).max().expect("nonempty support");
        Ok(WreathLength {
            lower: switches + detour.max(group.word_length(&w.base)?),
            upper: switches + walk,
            exact: false,
        })
    }

    /// Distance in the partner wreath product between `p` and `w·p`.
    pub fn move_distance(&self, side: Side, w: &WreathElement, p: &WreathPoint) -> Result<WreathLength> {
        let t = self.transfer(side, w, p)?;
        self.length(side.other(), &t)
    }

    /// Checks the distance identities for pure base and pure lamp moves.
    pub fn prop72_check(&self, side: Side, w: &WreathElement, p: &WreathPoint) -> Result<Prop72Report> {
        let group = self.base.tiling(side).group();
        let e = group.identity();
        let dist = self.move_distance(side, w, p)?;
        let (kind, expected) = if w.lamps.is_empty() {
            let kind = if w.base == e { "identity" } else { "base" };
            (kind, self.base.transfer_distance(side, &w.base, &p.base)?.0)
        } else if w.base == e && w.lamps.len() == 1 && w.lamps.contains_key(&e) {
            let lambda = &w.lamps[&e];
            let moved = self.lamp.transfer(side, lambda, &self.lamp_at(p, &p.base))?;
            ("lamp", self.lamp.length(side.other(), &moved)?)
        } else {
            return Err(Error::NotApplicable("the identities cover pure base or pure lamp moves".into()));
        };
        Ok(Prop72Report {
            kind,
            dist,
            expected,
            holds: dist.exact && dist.lower == expected,
        })
    }

    /// Mean gauge of the wreath move distance over random points, using the upper
    /// bound when the length is not exact. Returns `(mean, stderr, exhausted fraction)`.
    pub fn mc_gauge(
        &self,
        side: Side,
        w: &WreathElement,
        gauge: &IntegrabilityGauge,
        samples: u64,
        seed: u64,
    ) -> Result<(f64, f64, f64)> {
        if samples == 0 {
            return usage("gauge estimate needs at least one sample");
        }
        let outcomes = rng::par_samples(samples, seed, |i, _| {
            let p = self.random_point(rng::mix(seed, &[i]));
            match self.move_distance(side, w, &p) {
                Ok(d) => Ok(Some(gauge.eval(d.upper as f64))),
                Err(Error::DepthExhausted { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        });
        let values: Vec<f64> = outcomes.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
        let exhausted = (samples as usize - values.len()) as f64 / samples as f64;
        let (mean, se) = if values.is_empty() { (0.0, 0.0) } else { rng::mean_stderr(&values) };
        Ok((mean, se, exhausted))
    }
}
