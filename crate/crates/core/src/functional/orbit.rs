use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use serde::Serialize;

use super::{FiniteSupportFunction, GradientSide};
use crate::coupling::IntegrabilityGauge;
use crate::error::{usage, Error, Result};
use crate::group::{Family, GroupDescriptor, GroupElement};

/// A transitive left action of a group on a set, viewed through its Schreier graph.
pub trait TransitiveSet {
    type Point: Clone + Eq + Hash + Debug;

    fn group(&self) -> &GroupDescriptor;

    fn act(&self, lambda: &GroupElement, x: &Self::Point) -> Result<Self::Point>;

    /// Schreier-graph distance. The default is a breadth-first search bounded by the group's budget.
    fn distance(&self, x: &Self::Point, y: &Self::Point) -> Result<u64> {
        if x == y {
            return Ok(0);
        }
        let limit = self.group().budget().max_items(256);
        let mut seen: HashSet<Self::Point> = HashSet::from([x.clone()]);
        let mut queue = VecDeque::from([(x.clone(), 0u64)]);
        while let Some((p, d)) = queue.pop_front() {
            for s in self.group().generators() {
                let q = self.act(s, &p)?;
                if &q == y {
                    return Ok(d + 1);
                }
                if seen.insert(q.clone()) {
                    if seen.len() as u64 > limit {
                        return Err(Error::ResourceExhausted {
                            what: "Schreier distance search".into(),
                            reached: d + 1,
                        });
                    }
                    queue.push_back((q, d + 1));
                }
            }
        }
        usage("points lie in different orbits")
    }
}

/// A group acting on itself by left multiplication.
#[derive(Clone, Debug)]
pub struct RegularAction(pub GroupDescriptor);

impl TransitiveSet for RegularAction {
    type Point = GroupElement;

    fn group(&self) -> &GroupDescriptor {
        &self.0
    }

    fn act(&self, lambda: &GroupElement, x: &GroupElement) -> Result<GroupElement> {
        self.0.multiply(lambda, x)
    }

    fn distance(&self, x: &GroupElement, y: &GroupElement) -> Result<u64> {
        self.0.word_length(&self.0.mul(y, &self.0.inv(x)))
    }
}

/// `Z` acting on `Z/n` by translation.
#[derive(Clone, Debug)]
pub struct CyclicQuotient {
    n: u64,
    group: GroupDescriptor,
}

impl CyclicQuotient {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return usage("cycle length must be positive");
        }
        Ok(CyclicQuotient {
            n,
            group: GroupDescriptor::zn(1),
        })
    }
}

impl TransitiveSet for CyclicQuotient {
    type Point = u64;

    fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    fn act(&self, lambda: &GroupElement, x: &u64) -> Result<u64> {
        let a = match lambda.as_zn() {
            Some(&[a]) => a,
            _ => return usage("the cycle is acted on by Z"),
        };
        Ok((*x as i128 + a).rem_euclid(self.n as i128) as u64)
    }

    fn distance(&self, x: &u64, y: &u64) -> Result<u64> {
        let d = (*x as i128 - *y as i128).rem_euclid(self.n as i128) as u64;
        Ok(d.min(self.n - d))
    }
}

/// `Z/m ≀ Z` acting on the finite lamplighter `Z/m ≀ Z/n` through the quotient map.
#[derive(Clone, Debug)]
pub struct LamplighterCycle {
    m: u32,
    n: u32,
    group: GroupDescriptor,
}

impl LamplighterCycle {
    pub fn new(m: u32, n: u32) -> Result<Self> {
        if n == 0 {
            return usage("cycle length must be positive");
        }
        let group = GroupDescriptor::new(Family::Lamplighter(m))?;
        Ok(LamplighterCycle { m, n, group })
    }

    pub fn origin(&self) -> (Vec<u32>, u32) {
        (vec![0; self.n as usize], 0)
    }
}

impl TransitiveSet for LamplighterCycle {
    type Point = (Vec<u32>, u32);

    fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    fn act(&self, lambda: &GroupElement, x: &(Vec<u32>, u32)) -> Result<(Vec<u32>, u32)> {
        let l = lambda.as_lamp().ok_or_else(|| Error::Usage("expected a lamplighter element".into()))?;
        let n = self.n as i64;
        let a = l.cursor().rem_euclid(n) as usize;
        let (lamps, cursor) = x;
        let mut out = vec![0u32; self.n as usize];
        for (i, v) in lamps.iter().enumerate() {
            out[(i + a) % self.n as usize] = *v;
        }
        for &(pos, v) in l.lamps() {
            let i = pos.rem_euclid(n) as usize;
            out[i] = (out[i] + v) % self.m;
        }
        Ok((out, ((*cursor as usize + a) % self.n as usize) as u32))
    }
}

/// The regular action restricted to a ball around the identity; leaving it is a truncation.
#[derive(Clone, Debug)]
pub struct Windowed {
    group: GroupDescriptor,
    radius: u64,
}

impl Windowed {
    pub fn new(group: GroupDescriptor, radius: u64) -> Self {
        Windowed { group, radius }
    }
}

impl TransitiveSet for Windowed {
    type Point = GroupElement;

    fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    fn act(&self, lambda: &GroupElement, x: &GroupElement) -> Result<GroupElement> {
        let y = self.group.multiply(lambda, x)?;
        if self.group.word_length(&y)? > self.radius {
            return Err(Error::Truncation(format!(
                "{} leaves the ball of radius {}",
                self.group.format_element(&y),
                self.radius
            )));
        }
        Ok(y)
    }

    fn distance(&self, x: &GroupElement, y: &GroupElement) -> Result<u64> {
        self.group.word_length(&self.group.mul(y, &self.group.inv(x)))
    }
}

fn pushed<S: TransitiveSet>(f: &FiniteSupportFunction, set: &S, x: &S::Point, p: f64) -> Result<HashMap<S::Point, f64>> {
    let mut out: HashMap<S::Point, f64> = HashMap::new();
    for (lam, v) in f.support() {
        *out.entry(set.act(lam, x)?).or_insert(0.0) += v.abs().powf(p);
    }
    Ok(out)
}

/// Both sides of `‖f_{x0} − f_{x1}‖_p ≤ d(x0, x1) ‖∇^r f‖_p`, with the norms of `f` and `f_{x0}`.
#[derive(Clone, Debug, Serialize)]
pub struct PushReport {
    pub distance: u64,
    pub lhs: f64,
    pub rhs: f64,
    /// `‖f‖_p^p` and `‖f_{x0}‖_p^p`, which agree exactly.
    pub norm_pow: f64,
    pub pushed_norm_pow: f64,
    pub holds: bool,
}

pub fn push_to_orbit<S: TransitiveSet>(
    f: &FiniteSupportFunction,
    set: &S,
    x0: &S::Point,
    x1: &S::Point,
    p: f64,
) -> Result<PushReport> {
    if !(p >= 1.0 && p.is_finite()) {
        return usage(format!("push-forward needs p >= 1, got {p}"));
    }
    if f.group() != set.group() {
        return usage("function and action live on different groups");
    }
    let a = pushed(f, set, x0, p)?;
    let b = pushed(f, set, x1, p)?;
    let keys: HashSet<&S::Point> = a.keys().chain(b.keys()).collect();
    let diff: f64 = keys
        .into_iter()
        .map(|y| {
            let u = a.get(y).map_or(0.0, |v| v.powf(1.0 / p));
            let w = b.get(y).map_or(0.0, |v| v.powf(1.0 / p));
            (u - w).abs().powf(p)
        })
        .sum();
    let lhs = diff.powf(1.0 / p);
    let distance = set.distance(x0, x1)?;
    let rhs = distance as f64 * f.gradient_norm_pow(GradientSide::Right, p).powf(1.0 / p);
    Ok(PushReport {
        distance,
        lhs,
        rhs,
        norm_pow: f.norm_pow(p),
        pushed_norm_pow: a.values().sum(),
        holds: lhs <= rhs * (1.0 + 1e-12) + 1e-12,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GaugePushReport {
    pub gauge: String,
    pub distance: u64,
    /// `‖f‖_1 / ‖f_{x0} − f_{x1}‖_1` after scaling to `‖∇^r f‖_1 = 1`; infinite when the push-forwards agree.
    pub ratio: f64,
    /// `φ(‖f‖_1) / (2 φ(d(x0, x1)))`.
    pub bound: f64,
    pub holds: bool,
}

/// The `ℓ¹` ratio form of the push-forward inequality, for gauges with `φ` and `t/φ` nondecreasing.
pub fn gauge_push_check<S: TransitiveSet>(
    f: &FiniteSupportFunction,
    set: &S,
    x0: &S::Point,
    x1: &S::Point,
    phi: &IntegrabilityGauge,
) -> Result<GaugePushReport> {
    match phi {
        IntegrabilityGauge::Identity => {}
        IntegrabilityGauge::Power(q) if *q <= 1.0 => {}
        IntegrabilityGauge::LogPower(e) if *e == 0.0 => {}
        _ => return Err(Error::NotApplicable(format!("{phi} does not have t/φ(t) nondecreasing"))),
    }
    let grad = f.gradient_norm_pow(GradientSide::Right, 1.0);
    if grad == 0.0 {
        return Err(Error::NotApplicable("the zero function has no normalization".into()));
    }
    let g = f.scaled(1.0 / grad);
    let r = push_to_orbit(&g, set, x0, x1, 1.0)?;
    let ratio = if r.lhs == 0.0 { f64::INFINITY } else { g.norm_pow(1.0) / r.lhs };
    let bound = if r.distance == 0 {
        0.0
    } else {
        phi.eval(g.norm_pow(1.0)) / (2.0 * phi.eval(r.distance as f64))
    };
    Ok(GaugePushReport {
        gauge: phi.to_string(),
        distance: r.distance,
        ratio,
        bound,
        holds: ratio >= bound * (1.0 - 1e-12),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: i128) -> GroupElement {
        GroupElement::Zn(vec![v])
    }

    #[test]
    fn interval_on_the_integers() {
        let g = GroupDescriptor::zn(1);
        let f = FiniteSupportFunction::indicator(&g, (0..4).map(z)).unwrap();
        let r = push_to_orbit(&f, &RegularAction(g.clone()), &z(0), &z(1), 1.0).unwrap();
        assert_eq!((r.lhs, r.rhs, r.distance), (2.0, 4.0, 1));
        let same = push_to_orbit(&f, &RegularAction(g), &z(3), &z(3), 2.0).unwrap();
        assert_eq!(same.lhs, 0.0);
        assert_eq!(same.norm_pow, same.pushed_norm_pow);
    }

    #[test]
    fn collisions_on_a_cycle() {
        let g = GroupDescriptor::zn(1);
        let f = FiniteSupportFunction::indicator(&g, [z(0), z(5)]).unwrap();
        let c = CyclicQuotient::new(5).unwrap();
        let r = push_to_orbit(&f, &c, &0, &1, 1.0).unwrap();
        assert_eq!(r.pushed_norm_pow, 2.0);
        assert_eq!((r.lhs, r.rhs), (4.0, 8.0));
        assert!(r.holds);
        let r2 = push_to_orbit(&f, &c, &0, &2, 2.0).unwrap();
        assert!(r2.holds, "{r2:?}");
        assert_eq!(c.distance(&1, &4).unwrap(), 2);
    }

    #[test]
    fn lamplighter_cycle_is_an_action() {
        let set = LamplighterCycle::new(3, 4).unwrap();
        let g = set.group().clone();
        let x = set.origin();
        let a = g.word(&[0, 2, 2, 1, 3]);
        let b = g.word(&[2, 0, 0, 3, 3, 3, 1]);
        let lhs = set.act(&b, &set.act(&a, &x).unwrap()).unwrap();
        assert_eq!(lhs, set.act(&g.mul(&b, &a), &x).unwrap());
        let y = set.act(&g.word(&[0, 2]), &x).unwrap();
        assert_eq!(set.distance(&x, &y).unwrap(), 2);
    }

    #[test]
    fn windows_raise_truncation() {
        let g = GroupDescriptor::zn(2);
        let w = Windowed::new(g.clone(), 2);
        let f = FiniteSupportFunction::indicator(&g, [g.word(&[0, 0, 0])]).unwrap();
        let e = g.identity();
        assert!(matches!(push_to_orbit(&f, &w, &e, &e, 1.0), Err(Error::Truncation(_))));
        let f = FiniteSupportFunction::indicator(&g, [g.word(&[0])]).unwrap();
        assert!(push_to_orbit(&f, &w, &e, &g.word(&[2]), 1.0).unwrap().holds);
    }

    #[test]
    fn ratio_form_rejects_unsuitable_gauges() {
        let g = GroupDescriptor::zn(1);
        let f = FiniteSupportFunction::indicator(&g, [z(0)]).unwrap();
        let set = RegularAction(g.clone());
        assert!(gauge_push_check(&f, &set, &z(0), &z(1), &IntegrabilityGauge::Exp(1.0)).is_err());
        assert!(gauge_push_check(&FiniteSupportFunction::zero(&g), &set, &z(0), &z(1), &IntegrabilityGauge::Identity).is_err());
        let r = gauge_push_check(&f, &set, &z(0), &z(3), &IntegrabilityGauge::Identity).unwrap();
        assert!(r.holds && r.ratio == 0.5, "{r:?}");
    }
}
