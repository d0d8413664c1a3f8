//! `ℓ^p` gradients of finitely supported functions, their push-forward to
//! transitive sets and to couplings, isoperimetric profiles and Følner quality.

mod induced;
mod orbit;
mod profile;

pub use induced::{GaugeGradientReport, InducedGradientReport};
pub use orbit::{
    gauge_push_check, push_to_orbit, CyclicQuotient, LamplighterCycle, GaugePushReport, PushReport, RegularAction,
    TransitiveSet, Windowed,
};
pub use profile::{isoperimetric_profile, ProfileMode, ProfileReport, ProfileRow, CONVENTION as PROFILE_CONVENTION};

use std::collections::{HashMap, HashSet};

use crate::error::{usage, Result};
use crate::group::{GroupDescriptor, GroupElement};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradientSide {
    /// `∇^l f(s, λ) = f(λ) − f(s^{-1} λ)`.
    Left,
    /// `∇^r f(s, λ) = f(λ) − f(λ s)`.
    Right,
}

/// A real function on a group with finite support; zero entries are dropped.
#[derive(Clone, Debug)]
pub struct FiniteSupportFunction {
    group: GroupDescriptor,
    entries: HashMap<GroupElement, f64>,
}

impl FiniteSupportFunction {
    pub fn new(group: &GroupDescriptor, entries: impl IntoIterator<Item = (GroupElement, f64)>) -> Result<Self> {
        let mut map: HashMap<GroupElement, f64> = HashMap::new();
        for (g, v) in entries {
            group.check(&g)?;
            if !v.is_finite() {
                return usage(format!("function value {v} is not finite"));
            }
            *map.entry(g).or_insert(0.0) += v;
        }
        map.retain(|_, v| *v != 0.0);
        Ok(FiniteSupportFunction {
            group: group.clone(),
            entries: map,
        })
    }

    pub fn zero(group: &GroupDescriptor) -> Self {
        FiniteSupportFunction {
            group: group.clone(),
            entries: HashMap::new(),
        }
    }

    /// The indicator of a finite set.
    pub fn indicator(group: &GroupDescriptor, set: impl IntoIterator<Item = GroupElement>) -> Result<Self> {
        let unique: HashSet<GroupElement> = set.into_iter().collect();
        Self::new(group, unique.into_iter().map(|g| (g, 1.0)))
    }

    pub fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    pub fn get(&self, g: &GroupElement) -> f64 {
        self.entries.get(g).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> impl Iterator<Item = (&GroupElement, &f64)> {
        self.entries.iter()
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn scaled(&self, c: f64) -> Self {
        FiniteSupportFunction {
            group: self.group.clone(),
            entries: self.entries.iter().map(|(g, v)| (g.clone(), v * c)).filter(|(_, v)| *v != 0.0).collect(),
        }
    }

    /// `‖f‖_p^p`.
    pub fn norm_pow(&self, p: f64) -> f64 {
        self.entries.values().map(|v| v.abs().powf(p)).sum()
    }

    pub fn norm(&self, p: f64) -> f64 {
        self.norm_pow(p).powf(1.0 / p)
    }

    /// `‖∇f‖_p^p`, summed over the finite set where a term can be nonzero.
    pub fn gradient_norm_pow(&self, side: GradientSide, p: f64) -> f64 {
        let group = &self.group;
        let mut total = 0.0;
        for s in group.generators() {
            let s_inv = group.inv(s);
            // Positions λ whose term involves the support: λ ∈ supp or its neighbour ∈ supp.
            let mut positions: HashSet<GroupElement> = self.entries.keys().cloned().collect();
            for g in self.entries.keys() {
                positions.insert(match side {
                    GradientSide::Left => group.mul(s, g),
                    GradientSide::Right => group.mul(g, &s_inv),
                });
            }
            for lam in &positions {
                let other = match side {
                    GradientSide::Left => group.mul(&s_inv, lam),
                    GradientSide::Right => group.mul(lam, s),
                };
                total += (self.get(lam) - self.get(&other)).abs().powf(p);
            }
        }
        total
    }

    pub fn gradient_norm(&self, side: GradientSide, p: f64) -> Result<f64> {
        if !(p > 0.0 && p.is_finite()) {
            return usage(format!("gradient exponent must be positive, got {p}"));
        }
        Ok(self.gradient_norm_pow(side, p).powf(1.0 / p))
    }
}

/// `|S A \ A| / |A|`, the outer vertex boundary for left multiplication.
pub fn folner_set_quality(group: &GroupDescriptor, set: &HashSet<GroupElement>) -> Result<Rational> {
    quality(group, set, false)
}

/// `|A S \ A| / |A|`, for right-oriented tilings.
pub fn folner_set_quality_right(group: &GroupDescriptor, set: &HashSet<GroupElement>) -> Result<Rational> {
    quality(group, set, true)
}

fn quality(group: &GroupDescriptor, set: &HashSet<GroupElement>, right: bool) -> Result<Rational> {
    if set.is_empty() {
        return usage("Følner quality needs a nonempty set");
    }
    for g in set {
        group.check(g)?;
    }
    let mut boundary: HashSet<GroupElement> = HashSet::new();
    for a in set {
        for s in group.generators() {
            let b = if right { group.mul(a, s) } else { group.mul(s, a) };
            if !set.contains(&b) {
                boundary.insert(b);
            }
        }
    }
    Ok(Rational::new(boundary.len() as i128, set.len() as i128))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: i128) -> GroupElement {
        GroupElement::Zn(vec![v])
    }

    #[test]
    fn gradient_examples() {
        let g = GroupDescriptor::zn(1);
        let f = FiniteSupportFunction::indicator(&g, (0..4).map(z)).unwrap();
        assert_eq!(f.gradient_norm(GradientSide::Left, 1.0).unwrap(), 4.0);
        assert_eq!(f.gradient_norm(GradientSide::Right, 1.0).unwrap(), 4.0);
        for group in [GroupDescriptor::zn(2), GroupDescriptor::heisenberg(), GroupDescriptor::lamplighter(3)] {
            let delta = FiniteSupportFunction::indicator(&group, [group.identity()]).unwrap();
            let s = group.generators().len() as f64;
            assert_eq!(delta.gradient_norm(GradientSide::Left, 1.0).unwrap(), 2.0 * s);
            assert_eq!(FiniteSupportFunction::zero(&group).gradient_norm(GradientSide::Left, 2.0).unwrap(), 0.0);
        }
        assert!(f.gradient_norm(GradientSide::Left, 0.0).is_err());
    }

    #[test]
    fn left_and_right_gradients_differ_off_abelian() {
        let h = GroupDescriptor::heisenberg();
        let f = FiniteSupportFunction::indicator(&h, [h.identity(), h.word(&[0, 2]), h.word(&[2, 2, 0])]).unwrap();
        let inv = FiniteSupportFunction::indicator(&h, f.support().map(|(g, _)| h.inv(g))).unwrap();
        let l = f.gradient_norm_pow(GradientSide::Left, 1.0);
        assert_eq!(l, inv.gradient_norm_pow(GradientSide::Right, 1.0));
    }

    #[test]
    fn quality_examples() {
        let g = GroupDescriptor::zn(1);
        let a: HashSet<GroupElement> = (0..8).map(z).collect();
        assert_eq!(folner_set_quality(&g, &a).unwrap(), Rational::new(1, 4));
        assert_eq!(folner_set_quality(&g, &[z(0)].into()).unwrap(), Rational::from_integer(2));
        let g2 = GroupDescriptor::zn(2);
        let ball: HashSet<GroupElement> = g2.ball(1).unwrap().into_iter().collect();
        assert_eq!(folner_set_quality(&g2, &ball).unwrap(), Rational::new(8, 5));
        assert!(folner_set_quality(&g, &HashSet::new()).is_err());
    }
}
