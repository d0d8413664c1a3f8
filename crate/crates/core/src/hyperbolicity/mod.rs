//! Rips thinness and cycle distortion on finite connected graphs.
//!
//! Graphs carry the discrete path metric. Geodesic triangles are handled
//! through metric intervals `I(a,b) = {x : d(a,x) + d(x,b) = d(a,b)}`, the
//! union of every vertex geodesic from `a` to `b`.

mod audit;
mod fat;
mod rips;

use std::collections::{BTreeSet, VecDeque};

use rand::Rng;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{usage, Error, Result};
use crate::group::{Family, GroupDescriptor, GroupElement};

pub use audit::{cycle_distortion, lemma91_check, prop92_bound, DistortionReport, Lemma91Report, Prop92Bound};
pub use fat::{extract_fat_cycle, ExtractParams, FatCycle, CONTRACTION_TARGET};
pub use rips::{four_point_delta, rips_delta, FourPointReport, RipsReport, RipsWitness};

/// A connected graph with its all-pairs distance matrix.
#[derive(Clone, Debug)]
pub struct MetricGraph {
    name: String,
    adj: Vec<Vec<u32>>,
    dist: Vec<u16>,
    labels: Option<(GroupDescriptor, Vec<GroupElement>)>,
    budget: Budget,
}

impl MetricGraph {
    /// Builds the graph on vertices `0..n`. Repeated edges are merged.
    pub fn from_edges(name: impl Into<String>, n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::build(name.into(), n, edges, None, Budget::from_env())
    }

    fn build(
        name: String,
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        labels: Option<(GroupDescriptor, Vec<GroupElement>)>,
        budget: Budget,
    ) -> Result<Self> {
        if n == 0 {
            return usage("a graph needs at least one vertex");
        }
        if n > u16::MAX as usize {
            return usage(format!("{n} vertices exceed the supported maximum of {}", u16::MAX));
        }
        let bytes = (n as u64) * (n as u64) * 2;
        if bytes > budget.max_bytes {
            return Err(Error::ResourceExhausted {
                what: "distance matrix".into(),
                reached: bytes,
            });
        }
        let mut sets = vec![BTreeSet::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return usage(format!("edge {u} {v} names a vertex outside 0..{n}"));
            }
            if u == v {
                return usage(format!("self-loop at vertex {u}"));
            }
            sets[u].insert(v as u32);
            sets[v].insert(u as u32);
        }
        let adj: Vec<Vec<u32>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        let mut dist = vec![u16::MAX; n * n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            let row = &mut dist[s * n..(s + 1) * n];
            row[s] = 0;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &w in &adj[u] {
                    let w = w as usize;
                    if row[w] == u16::MAX {
                        row[w] = row[u] + 1;
                        queue.push_back(w);
                    }
                }
            }
            if let Some(v) = row.iter().position(|&d| d == u16::MAX) {
                return usage(format!("graph is not connected: vertex {v} is unreachable from {s}"));
            }
        }
        Ok(MetricGraph {
            name,
            adj,
            dist,
            labels,
            budget,
        })
    }

    /// Reads one `u v` pair per line with 0-indexed vertices. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        let mut n = 0;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<usize>()
                    .or_else(|_| usage(format!("line {}: {s:?} is not a vertex index", lineno + 1)))
            };
            match parts.as_slice() {
                [u, v] => {
                    let (u, v) = (parse(u)?, parse(v)?);
                    n = n.max(u + 1).max(v + 1);
                    edges.push((u, v));
                }
                _ => return usage(format!("line {}: expected `u v`, found {line:?}", lineno + 1)),
            }
        }
        Self::from_edges("edge-list", n, edges)
    }

    /// The square grid with `n × n` cells, so `(n+1)²` vertices. Vertex `(i, j)`
    /// has index `j·(n+1) + i`.
    pub fn grid(n: usize) -> Result<Self> {
        if n == 0 {
            return usage("grid needs at least one cell");
        }
        let w = n + 1;
        let mut edges = Vec::new();
        for j in 0..w {
            for i in 0..w {
                if i + 1 < w {
                    edges.push((j * w + i, j * w + i + 1));
                }
                if j + 1 < w {
                    edges.push((j * w + i, (j + 1) * w + i));
                }
            }
        }
        Self::from_edges(format!("grid:{n}"), w * w, edges)
    }

    /// The boundary of `grid(n)` as a cycle of `4n` vertices, starting at the
    /// corner `(0,0)` and running counterclockwise.
    pub fn grid_boundary(n: usize) -> Vec<usize> {
        let w = n + 1;
        let mut out = Vec::with_capacity(4 * n);
        out.extend((0..n).map(|i| i));
        out.extend((0..n).map(|j| j * w + n));
        out.extend((0..n).map(|i| n * w + n - i));
        out.extend((0..n).map(|j| (n - j) * w));
        out
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return usage("a cycle graph needs at least 3 vertices");
        }
        Self::from_edges(format!("cycle:{n}"), n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn path(n: usize) -> Result<Self> {
        Self::from_edges(format!("path:{n}"), n, (1..n).map(|i| (i - 1, i)))
    }

    /// A random tree where vertex `i > 0` attaches to a uniform earlier vertex.
    pub fn random_tree(n: usize, seed: u64) -> Result<Self> {
        let mut rng = crate::rng::stream(seed, 0);
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (rng.random_range(0..i), i)).collect();
        Self::from_edges(format!("tree:{n}:{seed}"), n, edges)
    }

    /// The subgraph of the right Cayley graph induced on the ball of radius `r`.
    /// The identity is vertex 0.
    pub fn cayley_ball(group: &GroupDescriptor, radius: u32) -> Result<Self> {
        let mut elements = group.ball(radius)?;
        let e = elements.iter().position(|g| *g == group.identity()).expect("ball contains the identity");
        elements.swap(0, e);
        let index: std::collections::HashMap<&GroupElement, usize> =
            elements.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let mut edges = Vec::new();
        for (i, g) in elements.iter().enumerate() {
            for s in group.generators() {
                if let Some(&j) = index.get(&group.mul(g, s)) {
                    if i != j {
                        edges.push((i, j));
                    }
                }
            }
        }
        let name = format!("cayley-ball:{}:{radius}", group.family().name());
        let n = elements.len();
        Self::build(name, n, edges, Some((group.clone(), elements)), group.budget())
    }

    /// Parses `grid:N`, `cycle:N`, `path:N`, `tree:N:SEED` or `cayley-ball:GROUP:R`.
    pub fn family(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let num = |s: &str| {
            s.parse::<usize>()
                .or_else(|_| usage(format!("cannot read a size from {s:?} in {spec:?}")))
        };
        if let Some(rest) = spec.strip_prefix("cayley-ball:") {
            let Some((group, r)) = rest.rsplit_once(':') else {
                return usage(format!("expected cayley-ball:GROUP:RADIUS, found {spec:?}"));
            };
            let group = GroupDescriptor::new(Family::parse(group)?)?;
            return Self::cayley_ball(&group, num(r)? as u32);
        }
        let parts: Vec<&str> = spec.split(':').collect();
        match parts.as_slice() {
            ["grid", n] => Self::grid(num(n)?),
            ["cycle", n] => Self::cycle(num(n)?),
            ["path", n] => Self::path(num(n)?),
            ["tree", n, seed] => Self::random_tree(num(n)?, num(seed)? as u64),
            _ => usage(format!(
                "unknown graph family {spec:?}; expected grid:N, cycle:N, path:N, tree:N:SEED or cayley-ball:GROUP:R"
            )),
        }
    }

    /// The same graph with vertex `v` renamed to `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return usage("relabeling must be a permutation of the vertices");
        }
        let edges = self.edges().into_iter().map(|(u, v)| (perm[u], perm[v]));
        Self::build(format!("{} (relabeled)", self.name), n, edges, None, self.budget)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().map(|&w| w as usize)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.vertex_count())
            .flat_map(|u| self.neighbors(u).filter(move |&v| u < v).map(move |v| (u, v)))
            .collect()
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&(v as u32)).is_ok()
    }

    #[inline]
    pub fn d(&self, u: usize, v: usize) -> u32 {
        self.dist[u * self.vertex_count() + v] as u32
    }

    pub(crate) fn row(&self, u: usize) -> &[u16] {
        let n = self.vertex_count();
        &self.dist[u * n..(u + 1) * n]
    }

    pub fn eccentricity(&self, v: usize) -> u32 {
        self.row(v).iter().copied().max().unwrap_or(0) as u32
    }

    pub fn diameter(&self) -> u32 {
        (0..self.vertex_count()).map(|v| self.eccentricity(v)).max().unwrap_or(0)
    }

    pub fn is_tree(&self) -> bool {
        self.edges().len() + 1 == self.vertex_count()
    }

    pub fn element(&self, v: usize) -> Option<&GroupElement> {
        self.labels.as_ref().map(|(_, e)| &e[v])
    }

    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some((g, e)) => g.format_element(&e[v]),
            None => v.to_string(),
        }
    }

    /// Vertices on some geodesic from `a` to `b`.
    pub fn interval(&self, a: usize, b: usize) -> Vec<usize> {
        let dab = self.d(a, b);
        (0..self.vertex_count()).filter(|&x| self.d(a, x) + self.d(x, b) == dab).collect()
    }

    /// The geodesic from `u` to `v` that always steps to the smallest admissible neighbour.
    pub fn geodesic(&self, u: usize, v: usize) -> Vec<usize> {
        let mut out = vec![u];
        let mut cur = u;
        while cur != v {
            cur = self
                .neighbors(cur)
                .find(|&w| self.d(w, v) + 1 == self.d(cur, v))
                .expect("connected graph has a closer neighbour");
            out.push(cur);
        }
        out
    }

    pub fn distance_to_set(&self, v: usize, set: &[usize]) -> u32 {
        set.iter().map(|&s| self.d(v, s)).min().unwrap_or(u32::MAX)
    }

    /// Whether consecutive entries are adjacent (a discrete path).
    pub fn is_path(&self, path: &[usize]) -> bool {
        path.iter().all(|&v| v < self.vertex_count()) && path.windows(2).all(|w| self.adjacent(w[0], w[1]))
    }
}

/// Summary of a graph for reports.
#[derive(Clone, Debug, Serialize)]
pub struct GraphSummary {
    pub name: String,
    pub vertices: usize,
    pub edges: usize,
    pub diameter: u32,
}

impl From<&MetricGraph> for GraphSummary {
    fn from(g: &MetricGraph) -> Self {
        GraphSummary {
            name: g.name.clone(),
            vertices: g.vertex_count(),
            edges: g.edges().len(),
            diameter: g.diameter(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_distances_are_l1() {
        let g = MetricGraph::grid(4).unwrap();
        assert_eq!(g.vertex_count(), 25);
        assert_eq!(g.d(0, 24), 8);
        assert_eq!(g.d(2, 2 * 5), 4);
        let b = MetricGraph::grid_boundary(4);
        assert_eq!(b.len(), 16);
        assert!(g.is_path(&b) && g.adjacent(b[15], b[0]));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(MetricGraph::from_edges("x", 3, [(0, 1)]).is_err());
        assert!(MetricGraph::from_edges("x", 2, [(0, 0)]).is_err());
        assert!(MetricGraph::parse_edge_list("0 1\n1 x\n").is_err());
        assert!(MetricGraph::family("torus:3").is_err());
    }

    #[test]
    fn edge_list_and_families() {
        let g = MetricGraph::parse_edge_list("# square\n0 1\n1 2\n\n2 3\n3 0\n").unwrap();
        assert_eq!(g.diameter(), 2);
        assert_eq!(g.interval(0, 2), vec![0, 1, 2, 3]);
        let t = MetricGraph::family("tree:30:4").unwrap();
        assert!(t.is_tree());
        let c = MetricGraph::family("cayley-ball:zn:2:2").unwrap();
        assert_eq!(c.vertex_count(), 13);
        assert_eq!(c.label(0), "zn:0,0");
        assert_eq!(MetricGraph::family("cycle:8").unwrap().diameter(), 4);
    }

    #[test]
    fn geodesics_have_the_right_length() {
        let g = MetricGraph::grid(3).unwrap();
        let p = g.geodesic(0, 15);
        assert_eq!(p.len(), 7);
        assert!(g.is_path(&p));
    }
}
