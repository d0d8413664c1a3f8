use std::collections::HashMap;

use super::{Family, GroupDescriptor, GroupElement};
use crate::error::{Error, Result};

const BYTES_PER_BALL_ENTRY: u64 = 160;

/// Breadth-first layers of the Cayley graph around the identity.
#[derive(Debug)]
pub(super) struct BallCache {
    dist: HashMap<GroupElement, u32>,
    frontier: Vec<GroupElement>,
    radius: u32,
    spheres: Vec<u64>,
}

impl BallCache {
    pub(super) fn new(identity: GroupElement) -> Self {
        let mut dist = HashMap::new();
        dist.insert(identity.clone(), 0);
        BallCache {
            dist,
            frontier: vec![identity],
            radius: 0,
            spheres: vec![1],
        }
    }

    fn extend(&mut self, family: &Family, gens: &[GroupElement], max_entries: u64) -> Result<()> {
        let next_radius = self.radius + 1;
        let mut next = Vec::new();
        for g in &self.frontier {
            for s in gens {
                let h = family.mul(g, s);
                if !self.dist.contains_key(&h) {
                    self.dist.insert(h.clone(), next_radius);
                    next.push(h);
                }
            }
            if self.dist.len() as u64 > max_entries {
                return Err(Error::ResourceExhausted {
                    what: "ball enumeration".into(),
                    reached: self.radius as u64,
                });
            }
        }
        next.sort_unstable();
        self.spheres.push(next.len() as u64);
        self.frontier = next;
        self.radius = next_radius;
        Ok(())
    }
}

impl GroupDescriptor {
    /// Exact word length with respect to [`GroupDescriptor::generators`].
    ///
    /// `Z^n` and the lamplighter use closed forms and ignore the cap; the
    /// Heisenberg and Baumslag–Solitar families search the memoized ball and
    /// report [`Error::CapExceeded`] beyond the cap.
    pub fn word_length(&self, g: &GroupElement) -> Result<u64> {
        self.check(g)?;
        if let Some(len) = self.family.closed_form_length(g) {
            return Ok(len);
        }
        self.bfs_word_length(g)
    }

    /// Word length read off the breadth-first ball, for every family.
    pub fn bfs_word_length(&self, g: &GroupElement) -> Result<u64> {
        self.check(g)?;
        if self.length_lower_bound(g) > self.cap as u64 {
            return Err(Error::CapExceeded { cap: self.cap });
        }
        {
            let cache = self.ball.read().expect("ball cache poisoned");
            if let Some(&d) = cache.dist.get(g) {
                return Ok(d as u64);
            }
            if cache.radius >= self.cap {
                return Err(Error::CapExceeded { cap: self.cap });
            }
        }
        let mut cache = self.ball.write().expect("ball cache poisoned");
        loop {
            if let Some(&d) = cache.dist.get(g) {
                return Ok(d as u64);
            }
            if cache.radius >= self.cap {
                return Err(Error::CapExceeded { cap: self.cap });
            }
            cache.extend(&self.family, &self.generators, self.max_ball_entries())?;
        }
    }

    fn length_lower_bound(&self, g: &GroupElement) -> u64 {
        match g {
            GroupElement::Heis([x, y, _]) => (x.unsigned_abs() + y.unsigned_abs()) as u64,
            GroupElement::Bs(b) => b.shift().unsigned_abs(),
            _ => 0,
        }
    }

    fn max_ball_entries(&self) -> u64 {
        self.budget.max_items(BYTES_PER_BALL_ENTRY)
    }

    fn ensure_radius(&self, n: u32) -> Result<()> {
        if n > self.cap {
            return Err(Error::CapExceeded { cap: self.cap });
        }
        if self.ball.read().expect("ball cache poisoned").radius >= n {
            return Ok(());
        }
        let mut cache = self.ball.write().expect("ball cache poisoned");
        while cache.radius < n {
            cache.extend(&self.family, &self.generators, self.max_ball_entries())?;
        }
        Ok(())
    }

    /// Sizes of the spheres of radius `0..=n`.
    pub fn sphere_sizes(&self, n: u32) -> Result<Vec<u64>> {
        self.ensure_radius(n)?;
        let cache = self.ball.read().expect("ball cache poisoned");
        Ok(cache.spheres[..=n as usize].to_vec())
    }

    /// `V(n) = |B(e, n)|`.
    pub fn growth_function(&self, n: u32) -> Result<u64> {
        Ok(self.sphere_sizes(n)?.iter().sum())
    }

    /// The ball `B(e, n)`, sorted.
    pub fn ball(&self, n: u32) -> Result<Vec<GroupElement>> {
        self.ensure_radius(n)?;
        let cache = self.ball.read().expect("ball cache poisoned");
        let mut out: Vec<GroupElement> = cache
            .dist
            .iter()
            .filter(|(_, &d)| d <= n)
            .map(|(g, _)| g.clone())
            .collect();
        out.sort_unstable();
        Ok(out)
    }
}
