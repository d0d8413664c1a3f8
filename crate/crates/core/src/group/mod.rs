//! The four group families: `Z^n`, the discrete Heisenberg group, the lamplighter
//! groups `Z/m ≀ Z` and the solvable Baumslag–Solitar groups `BS(1,k)`.

mod bs;
mod lamp;
mod metric;
mod text;

pub use bs::BsElement;
pub use lamp::LampElement;

use std::sync::{Arc, RwLock};

use crate::budget::Budget;
use crate::error::{usage, Result};
use metric::BallCache;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Zn(usize),
    Heisenberg,
    Lamplighter(u32),
    BaumslagSolitar(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Zn(Vec<i128>),
    Heis([i128; 3]),
    Lamp(LampElement),
    Bs(BsElement),
}

impl GroupElement {
    pub fn as_zn(&self) -> Option<&[i128]> {
        match self {
            GroupElement::Zn(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_heis(&self) -> Option<[i128; 3]> {
        match self {
            GroupElement::Heis(h) => Some(*h),
            _ => None,
        }
    }

    pub fn as_lamp(&self) -> Option<&LampElement> {
        match self {
            GroupElement::Lamp(l) => Some(l),
            _ => None,
        }
    }

    pub fn as_bs(&self) -> Option<&BsElement> {
        match self {
            GroupElement::Bs(b) => Some(b),
            _ => None,
        }
    }
}

impl Family {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Family::Zn(0) => usage("Z^n needs n >= 1"),
            Family::Lamplighter(m) if m < 2 => usage("lamplighter needs m >= 2"),
            Family::BaumslagSolitar(k) if k < 2 => usage("BS(1,k) needs k >= 2"),
            _ => Ok(()),
        }
    }

    pub fn identity(&self) -> GroupElement {
        match *self {
            Family::Zn(n) => GroupElement::Zn(vec![0; n]),
            Family::Heisenberg => GroupElement::Heis([0; 3]),
            Family::Lamplighter(_) => GroupElement::Lamp(LampElement::identity()),
            Family::BaumslagSolitar(_) => GroupElement::Bs(BsElement::identity()),
        }
    }

    /// The standard symmetric generating set, in a fixed order:
    /// `±e_i` for `Z^n`; `E₁^{±1}, E₂^{±1}` for Heisenberg; `(δ₀)^{±1}, (0,±1)`
    /// for the lamplighter; `(±1, 0), (0, ±1)` for `BS(1,k)`.
    pub fn generators(&self) -> Vec<GroupElement> {
        match *self {
            Family::Zn(n) => (0..n)
                .flat_map(|i| {
                    [1i128, -1].into_iter().map(move |sgn| {
                        let mut v = vec![0; n];
                        v[i] = sgn;
                        GroupElement::Zn(v)
                    })
                })
                .collect(),
            Family::Heisenberg => [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0]]
                .into_iter()
                .map(GroupElement::Heis)
                .collect(),
            Family::Lamplighter(m) => {
                let mut g = vec![GroupElement::Lamp(LampElement::new(m, [(0, 1)], 0))];
                if m > 2 {
                    g.push(GroupElement::Lamp(LampElement::new(m, [(0, -1)], 0)));
                }
                g.push(GroupElement::Lamp(LampElement::new(m, [], 1)));
                g.push(GroupElement::Lamp(LampElement::new(m, [], -1)));
                g
            }
            Family::BaumslagSolitar(k) => [(1, 0), (-1, 0), (0, 1), (0, -1)]
                .into_iter()
                .map(|(a, n)| GroupElement::Bs(BsElement::new(k, a, 0, n)))
                .collect(),
        }
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        match (self, g) {
            (Family::Zn(n), GroupElement::Zn(v)) => v.len() == *n,
            (Family::Heisenberg, GroupElement::Heis(_)) => true,
            (Family::Lamplighter(m), GroupElement::Lamp(l)) => {
                l.lamps().iter().all(|&(_, v)| v > 0 && v < *m)
            }
            (Family::BaumslagSolitar(_), GroupElement::Bs(_)) => true,
            _ => false,
        }
    }

    pub fn check(&self, g: &GroupElement) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            usage(format!("element {g:?} is not in {}", self.name()))
        }
    }

    /// Group law. Panics when an operand belongs to another family;
    /// use [`Family::multiply`] on unvalidated input.
    pub fn mul(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        match (self, g, h) {
            (Family::Zn(_), GroupElement::Zn(a), GroupElement::Zn(b)) => {
                GroupElement::Zn(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (Family::Heisenberg, GroupElement::Heis(a), GroupElement::Heis(b)) => {
                let z = a[1]
                    .checked_mul(b[0])
                    .and_then(|c| c.checked_add(a[2]))
                    .and_then(|c| c.checked_add(b[2]))
                    .expect("Heisenberg arithmetic left the 128-bit range");
                GroupElement::Heis([a[0] + b[0], a[1] + b[1], z])
            }
            (Family::Lamplighter(m), GroupElement::Lamp(a), GroupElement::Lamp(b)) => {
                GroupElement::Lamp(a.mul(b, *m))
            }
            (Family::BaumslagSolitar(k), GroupElement::Bs(a), GroupElement::Bs(b)) => {
                GroupElement::Bs(a.mul(b, *k))
            }
            _ => panic!("group law applied across families: {g:?}, {h:?}"),
        }
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.mul(g, h))
    }

    pub fn inv(&self, g: &GroupElement) -> GroupElement {
        match (self, g) {
            (Family::Zn(_), GroupElement::Zn(a)) => GroupElement::Zn(a.iter().map(|x| -x).collect()),
            (Family::Heisenberg, GroupElement::Heis([x, y, z])) => {
                GroupElement::Heis([-x, -y, x * y - z])
            }
            (Family::Lamplighter(m), GroupElement::Lamp(a)) => GroupElement::Lamp(a.inverse(*m)),
            (Family::BaumslagSolitar(k), GroupElement::Bs(a)) => GroupElement::Bs(a.inverse(*k)),
            _ => panic!("inverse of {g:?} taken in {self:?}"),
        }
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        Ok(self.inv(g))
    }

    pub fn is_identity(&self, g: &GroupElement) -> bool {
        *g == self.identity()
    }

    /// Word length when a closed form exists (`Z^n` and lamplighter).
    pub fn closed_form_length(&self, g: &GroupElement) -> Option<u64> {
        match (self, g) {
            (Family::Zn(_), GroupElement::Zn(v)) => Some(v.iter().map(|x| x.unsigned_abs() as u64).sum()),
            (Family::Lamplighter(m), GroupElement::Lamp(l)) => Some(l.word_length(*m)),
            _ => None,
        }
    }
}

/// A group family together with its generating set and a shared BFS ball cache.
///
/// Clones share the cache. The cache only grows, layer by layer, so readers
/// never observe a partially built layer.
#[derive(Clone, Debug)]
pub struct GroupDescriptor {
    family: Family,
    generators: Vec<GroupElement>,
    cap: u32,
    budget: Budget,
    ball: Arc<RwLock<BallCache>>,
}

impl PartialEq for GroupDescriptor {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family
    }
}

impl GroupDescriptor {
    pub const DEFAULT_CAP: u32 = 64;

    pub fn new(family: Family) -> Result<Self> {
        Self::with_limits(family, Self::DEFAULT_CAP, Budget::default())
    }

    pub fn with_limits(family: Family, cap: u32, budget: Budget) -> Result<Self> {
        family.validate()?;
        let generators = family.generators();
        let ball = BallCache::new(family.identity());
        Ok(GroupDescriptor {
            family,
            generators,
            cap,
            budget,
            ball: Arc::new(RwLock::new(ball)),
        })
    }

    pub fn zn(n: usize) -> Self {
        Self::new(Family::Zn(n)).expect("n >= 1")
    }

    pub fn heisenberg() -> Self {
        Self::new(Family::Heisenberg).expect("valid family")
    }

    pub fn lamplighter(m: u32) -> Self {
        Self::new(Family::Lamplighter(m)).expect("m >= 2")
    }

    pub fn baumslag_solitar(k: u32) -> Self {
        Self::new(Family::BaumslagSolitar(k)).expect("k >= 2")
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn identity(&self) -> GroupElement {
        self.family.identity()
    }

    pub fn mul(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        self.family.mul(g, h)
    }

    pub fn inv(&self, g: &GroupElement) -> GroupElement {
        self.family.inv(g)
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.family.multiply(g, h)
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        self.family.inverse(g)
    }

    pub fn check(&self, g: &GroupElement) -> Result<()> {
        self.family.check(g)
    }

    /// Product of a word in the generators, each letter an index into [`Self::generators`].
    pub fn word(&self, letters: &[usize]) -> GroupElement {
        letters.iter().fold(self.identity(), |acc, &i| {
            self.mul(&acc, &self.generators[i % self.generators.len()])
        })
    }
}
