//! Fat triangles to bi-Lipschitz cycles, on vertex geodesics.
//!
//! Intermediate-value steps become "first vertex along the geodesic where the
//! distance drops to the threshold", which is exact in graphs because the
//! distance to a set changes by at most one per edge.

use serde::Serialize;

use super::{cycle_distortion, rips_delta, DistortionReport, MetricGraph, RipsWitness};
use crate::error::{Error, Result};
use crate::Rational;

/// Contraction factor targeted by the construction.
pub const CONTRACTION_TARGET: i128 = 17820;

const MAX_DEPTH: usize = 64;

#[derive(Clone, Debug)]
pub struct ExtractParams {
    /// Multiplier on the contraction target accepted by the audit.
    pub slack: i128,
    /// Thinness level the graph must violate; defaults to its Rips constant.
    pub delta: Option<Rational>,
}

impl Default for ExtractParams {
    fn default() -> Self {
        ExtractParams { slack: 2, delta: None }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FatCycle {
    #[serde(serialize_with = "crate::rational_string")]
    pub delta: Rational,
    pub triangle: RipsWitness,
    /// Distance from the chosen point to the other two chosen geodesics.
    pub defect: u32,
    pub trace: Vec<String>,
    /// Length of the closed walk before it is reduced to a simple cycle.
    pub walk_length: usize,
    pub cycle: Vec<usize>,
    pub distortion: DistortionReport,
    pub length_target: i128,
    pub slack: i128,
    #[serde(serialize_with = "crate::rational_string")]
    pub a_target: Rational,
    pub length_ok: bool,
    pub contraction_ok: bool,
}

impl FatCycle {
    pub fn passes(&self) -> bool {
        self.length_ok && self.contraction_ok
    }
}

type Path = Vec<usize>;

/// Inclusive sub-path between two indices, reversed when `to < from`.
fn sub(path: &[usize], from: usize, to: usize) -> Path {
    if from <= to {
        path[from..=to].to_vec()
    } else {
        path[to..=from].iter().rev().copied().collect()
    }
}

/// Index on `path` of the vertex nearest to `v` (smallest index on ties).
fn nearest(g: &MetricGraph, v: usize, path: &[usize]) -> (usize, u32) {
    path.iter()
        .enumerate()
        .map(|(i, &p)| (i, g.d(v, p)))
        .min_by_key(|&(i, d)| (d, i))
        .expect("non-empty path")
}

struct Builder<'g> {
    g: &'g MetricGraph,
    trace: Vec<String>,
}

impl Builder<'_> {
    fn geo(&self, u: usize, v: usize) -> Path {
        self.g.geodesic(u, v)
    }

    /// Corner cutting: at each corner `a_i` pick `b_i` on the incoming side and
    /// `c_i` on the outgoing side, as far out as possible with
    /// `d(b_i, c_i) ≤ D/(8R)·(d(b_i, a_i) + d(a_i, c_i))`, then join the pieces.
    fn polygon(&mut self, sides: &[Path], d: f64) -> Path {
        let k = sides.len();
        let len: Vec<usize> = sides.iter().map(|s| s.len() - 1).collect();
        let r = len.iter().copied().max().unwrap_or(0).max(1) as f64;
        let lam = d / (8.0 * r);
        self.trace.push(format!("polygon with {k} sides, D = {d:.3}, R = {r}"));
        let (mut p, mut q) = (vec![0usize; k], vec![0usize; k]);
        for i in 0..k {
            let inc = (i + k - 1) % k;
            let max_p = if i == 0 { len[inc] / 2 } else { len[inc] - q[inc] };
            let max_q = if i == k - 1 { len[i] - p[0] } else { len[i] };
            let mut best = (0usize, 0usize);
            for pp in 0..=max_p {
                let b = sides[inc][len[inc] - pp];
                for qq in 0..=max_q {
                    if pp + qq <= best.0 + best.1 {
                        continue;
                    }
                    if self.g.d(b, sides[i][qq]) as f64 <= lam * (pp + qq) as f64 {
                        best = (pp, qq);
                    }
                }
            }
            (p[i], q[i]) = best;
        }
        let mut walk = Vec::new();
        for i in 0..k {
            let next = (i + 1) % k;
            let b = sides[(i + k - 1) % k][len[(i + k - 1) % k] - p[i]];
            let c = sides[i][q[i]];
            walk.extend(self.geo(b, c));
            walk.extend(sub(&sides[i], q[i], len[i] - p[next]));
        }
        walk
    }

    /// Quadrilateral `[a1, a2, a3, a4]` with a long side `a2 → a3` kept at
    /// distance about `r/2` from the opposite side `a4 → a1`.
    fn square(&mut self, quad: [Path; 4], r: f64, depth: usize) -> Path {
        let [s12, s23, s34, s41] = quad;
        let long = s23.len() - 1;
        if long as f64 <= 12.0 * r || depth >= MAX_DEPTH {
            return self.polygon(&[s12, s23, s34, s41], r / 2.0);
        }
        let close: Vec<(usize, u32)> = s23.iter().map(|&v| nearest(self.g, v, &s41)).collect();
        let split = (0..=long)
            .find(|&t| t as f64 >= 2.0 * r && (long - t) as f64 >= 2.0 * r && (close[t].1 as f64) < r);
        if let Some(t) = split {
            let (b, u) = (s23[t], close[t].0);
            let c = s41[u];
            self.trace.push(format!("square split at {} (long side {long}, r = {r:.3})", self.g.label(b)));
            if t >= long - t {
                let quad = [s12, sub(&s23, 0, t), self.geo(b, c), sub(&s41, u, s41.len() - 1)];
                return self.square(quad, r, depth + 1);
            }
            let quad = [self.geo(c, b), sub(&s23, t, long), s34, sub(&s41, 0, u)];
            return self.square(quad, r, depth + 1);
        }
        let t2 = (0..=long)
            .take_while(|&t| t as f64 <= 2.0 * r)
            .filter(|&t| close[t].1 as f64 <= r)
            .last()
            .unwrap_or(0);
        let t3 = (0..=long)
            .rev()
            .take_while(|&t| (long - t) as f64 <= 2.0 * r)
            .filter(|&t| close[t].1 as f64 <= r)
            .last()
            .unwrap_or(long);
        let (u1, u4) = (close[t2].0, close[t3].0);
        self.trace.push(format!("square narrowed to [{t2}, {t3}] of {long}, r doubled to {:.3}", 2.0 * r));
        let quad = [
            self.geo(s41[u1], s23[t2]),
            sub(&s23, t2, t3),
            self.geo(s23[t3], s41[u4]),
            sub(&s41, u4, u1),
        ];
        self.square(quad, 2.0 * r, depth + 1)
    }

    /// As `square`, but with a third side up to `big` long: first cut the
    /// quadrilateral where the long side comes within `r` of the opposite side.
    fn square_long(&mut self, quad: [Path; 4], r: f64, big: f64) -> Path {
        if big <= 2.0 * r {
            return self.square(quad, r, 0);
        }
        let [s12, s23, s34, s41] = quad;
        let t = (0..s23.len()).rev().find(|&t| nearest(self.g, s23[t], &s41).1 as f64 <= r).unwrap_or(0);
        let u = nearest(self.g, s23[t], &s41).0;
        let (b, c) = (s23[t], s41[u]);
        if t as f64 >= 4.0 * r {
            self.trace.push(format!("long quadrilateral cut at distance {t} from its corner"));
            let quad = [s12, sub(&s23, 0, t), self.geo(b, c), sub(&s41, u, s41.len() - 1)];
            return self.square(quad, r, 0);
        }
        if t == 0 {
            return self.square([s12, s23, s34, s41], r, 0);
        }
        self.trace.push(format!("long quadrilateral trimmed by {t}"));
        let quad = [self.geo(c, b), sub(&s23, t, s23.len() - 1), s34, sub(&s41, 0, u)];
        self.square(quad, r, 0)
    }
}

/// Splits a closed walk into simple cycles by chronological loop erasure and
/// keeps the longest.
fn longest_simple_cycle(walk: &[usize], vertices: usize) -> Path {
    let mut pos = vec![usize::MAX; vertices];
    let mut stack: Vec<usize> = Vec::new();
    let mut best: Path = Vec::new();
    for &v in walk.iter().chain(walk.first()) {
        if pos[v] != usize::MAX {
            let i = pos[v];
            if stack.len() - i > best.len() {
                best = stack[i..].to_vec();
            }
            for w in stack.drain(i..) {
                pos[w] = usize::MAX;
            }
        }
        pos[v] = stack.len();
        stack.push(v);
    }
    best
}

/// Finds a fattest triangle and turns it into a cycle whose distortion is audited.
pub fn extract_fat_cycle(g: &MetricGraph, params: &ExtractParams) -> Result<FatCycle> {
    let rips = rips_delta(g)?;
    let target = params.delta.unwrap_or(rips.delta);
    let Some(w) = rips.witness.filter(|_| rips.delta > target || (params.delta.is_none() && rips.delta > Rational::from_integer(0)))
    else {
        return Err(Error::NotApplicable(format!(
            "{} is {}-thin, so it has no fat triangle at that level",
            g.name(),
            rips.delta
        )));
    };
    let mut bld = Builder { g, trace: Vec::new() };
    let sab: Path = {
        let mut p = g.geodesic(w.a, w.x);
        p.extend(g.geodesic(w.x, w.b).into_iter().skip(1));
        p
    };
    let ix = g.d(w.a, w.x) as usize;
    let sides = [g.geodesic(w.a, w.c), g.geodesic(w.b, w.c)];
    let dist_y = |v: usize| sides.iter().map(|s| nearest(g, v, s)).min_by_key(|&(_, d)| d).map_or(0, |(_, d)| d);
    let defect = dist_y(w.x);
    let d = defect as f64;
    let t = defect / 15;
    bld.trace.push(format!("triangle defect {defect}, threshold {t}"));

    let ia = (0..=ix).rev().find(|&i| dist_y(sab[i]) <= t).unwrap_or(0);
    let ib = (ix..sab.len()).find(|&i| dist_y(sab[i]) <= t).unwrap_or(sab.len() - 1);
    let (xa, xb) = (sab[ia], sab[ib]);
    // Foot of a point on the other two sides: (side, index).
    let foot = |v: usize| {
        let (i0, d0) = nearest(g, v, &sides[0]);
        let (i1, d1) = nearest(g, v, &sides[1]);
        if d0 <= d1 {
            (0usize, i0)
        } else {
            (1usize, i1)
        }
    };
    let (sa, ja) = foot(xa);
    let (sb, jb) = foot(xb);
    let (ya, yb) = (sides[sa][ja], sides[sb][jb]);
    let r = 2.0 * d / 15.0;

    let walk = if sa == sb {
        bld.trace.push("both feet on one side".into());
        let quad = [g.geodesic(ya, xa), sub(&sab, ia, ib), g.geodesic(xb, yb), sub(&sides[sa], jb, ja)];
        bld.square_long(quad, r, r)
    } else {
        // Toward the shared vertex c, each side is traversed by increasing index.
        let tail_b = &sides[sb][jb..];
        let tail_a = &sides[sa][ja..];
        let (ub, dub) = nearest(g, ya, tail_b);
        let (ua, dua) = nearest(g, yb, tail_a);
        if dub as f64 <= 3.0 * d / 15.0 {
            bld.trace.push("feet on different sides, close near the apex".into());
            let quad = [g.geodesic(yb, xb), sub(&sab, ib, ia), g.geodesic(xa, tail_b[ub]), sub(tail_b, ub, 0)];
            bld.square_long(quad, r, 2.0 * r)
        } else if dua as f64 <= 3.0 * d / 15.0 {
            bld.trace.push("feet on different sides, close near the apex".into());
            let quad = [g.geodesic(ya, xa), sub(&sab, ia, ib), g.geodesic(xb, tail_a[ua]), sub(tail_a, ua, 0)];
            bld.square_long(quad, r, 2.0 * r)
        } else {
            let za = (0..tail_a.len())
                .find(|&i| nearest(g, tail_a[i], tail_b).1 <= t)
                .unwrap_or(tail_a.len() - 1);
            let zb = nearest(g, tail_a[za], tail_b).0;
            let hexagon = vec![
                sub(&sab, ia, ib),
                g.geodesic(xb, yb),
                sub(tail_b, 0, zb),
                g.geodesic(tail_b[zb], tail_a[za]),
                sub(tail_a, za, 0),
                g.geodesic(ya, xa),
            ];
            let longest = hexagon.iter().map(|s| s.len() - 1).max().unwrap_or(0);
            if longest as f64 > 22.0 * d {
                bld.trace.push(format!("hexagon side {longest} exceeds 22D; cutting corners directly"));
            } else {
                bld.trace.push("hexagon".into());
            }
            bld.polygon(&hexagon, d / 45.0)
        }
    };

    let mut walk = walk;
    walk.dedup();
    if walk.len() > 1 && walk.first() == walk.last() {
        walk.pop();
    }
    let walk_length = walk.len();
    let cycle = longest_simple_cycle(&walk, g.vertex_count());
    if cycle.len() < 3 {
        return Err(Error::NotApplicable(format!(
            "the construction collapsed to a closed walk without a cycle (walk length {walk_length})"
        )));
    }
    bld.trace.push(format!("closed walk of length {walk_length}, simple cycle of length {}", cycle.len()));
    let distortion = cycle_distortion(g, &cycle)?;
    let length_target = (target / 15).ceil().to_integer();
    let a_target = Rational::new(1, params.slack * CONTRACTION_TARGET);
    Ok(FatCycle {
        delta: rips.delta,
        triangle: w,
        defect,
        trace: bld.trace,
        walk_length,
        length_ok: cycle.len() as i128 >= length_target,
        contraction_ok: distortion.a >= a_target,
        cycle,
        distortion,
        length_target,
        slack: params.slack,
        a_target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loop_erasure_keeps_the_longest_loop() {
        // 0-1-2-3-0 with a spur 3-4-3 in the middle.
        let walk = [0, 1, 2, 3, 4, 3];
        let c = longest_simple_cycle(&walk, 5);
        assert_eq!(c, vec![0, 1, 2, 3]);
    }

    fn rectangle(w: usize, h: usize) -> MetricGraph {
        let id = |i: usize, j: usize| j * (w + 1) + i;
        let mut edges = Vec::new();
        for j in 0..=h {
            for i in 0..=w {
                if i < w {
                    edges.push((id(i, j), id(i + 1, j)));
                }
                if j < h {
                    edges.push((id(i, j), id(i, j + 1)));
                }
            }
        }
        MetricGraph::from_edges("rectangle", (w + 1) * (h + 1), edges).unwrap()
    }

    #[test]
    fn long_quadrilaterals_are_subdivided() {
        // Bottom-left, top-left, top-right, bottom-right of a 60 × 3 strip.
        let g = rectangle(60, 3);
        let id = |i: usize, j: usize| j * 61 + i;
        let quad = [
            (0..=3).map(|j| id(0, j)).collect(),
            (0..=60).map(|i| id(i, 3)).collect(),
            (0..=3).rev().map(|j| id(60, j)).collect(),
            (0..=60).rev().map(|i| id(i, 0)).collect(),
        ];
        let mut b = Builder { g: &g, trace: Vec::new() };
        let mut walk = b.square(quad, 3.0, 0);
        assert!(b.trace.iter().any(|t| t.starts_with("square")), "{:?}", b.trace);
        walk.dedup();
        if walk.first() == walk.last() {
            walk.pop();
        }
        let cycle = longest_simple_cycle(&walk, g.vertex_count());
        let r = cycle_distortion(&g, &cycle).unwrap();
        assert!(cycle.len() >= 3 && r.a > Rational::from_integer(0) && r.b == Rational::from_integer(1));
    }

    #[test]
    fn trees_have_no_fat_triangle() {
        let t = MetricGraph::random_tree(25, 3).unwrap();
        assert!(matches!(extract_fat_cycle(&t, &ExtractParams::default()), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn cycle_graph_returns_itself() {
        let g = MetricGraph::cycle(12).unwrap();
        let f = extract_fat_cycle(&g, &ExtractParams::default()).unwrap();
        assert_eq!(f.cycle.len(), 12);
        assert!(f.passes());
    }
}
