use serde::Serialize;

use super::MetricGraph;
use crate::error::{usage, Result};
use crate::Rational;

/// Bi-Lipschitz constants of a closed walk `v_0, …, v_{n-1}` viewed as a map `C_n → G`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistortionReport {
    pub n: usize,
    /// Smallest `d(φx, φy) / d_C(x, y)` over distinct positions.
    #[serde(serialize_with = "crate::rational_string")]
    pub a: Rational,
    /// Largest such ratio.
    #[serde(serialize_with = "crate::rational_string")]
    pub b: Rational,
    pub a_witness: (usize, usize),
    pub b_witness: (usize, usize),
}

pub fn cycle_distortion(g: &MetricGraph, cycle: &[usize]) -> Result<DistortionReport> {
    let n = cycle.len();
    if n < 2 {
        return usage("a cycle needs at least two positions");
    }
    if let Some(&v) = cycle.iter().find(|&&v| v >= g.vertex_count()) {
        return usage(format!("vertex {v} is not in the graph"));
    }
    for i in 0..n {
        let (u, v) = (cycle[i], cycle[(i + 1) % n]);
        if !g.adjacent(u, v) {
            return usage(format!("positions {i} and {} ({u}, {v}) are not adjacent", (i + 1) % n));
        }
    }
    let mut a = (Rational::from_integer(i128::MAX), (0, 0));
    let mut b = (Rational::from_integer(-1), (0, 0));
    for i in 0..n {
        for j in i + 1..n {
            let dc = (j - i).min(n - (j - i)) as i128;
            let r = Rational::new(g.d(cycle[i], cycle[j]) as i128, dc);
            if r < a.0 {
                a = (r, (i, j));
            }
            if r > b.0 {
                b = (r, (i, j));
            }
        }
    }
    Ok(DistortionReport {
        n,
        a: a.0,
        b: b.0,
        a_witness: a.1,
        b_witness: b.1,
    })
}

/// Upper bounds on the lower constant `a` of a bi-Lipschitz cycle in a
/// δ-hyperbolic space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Prop92Bound {
    /// `(4δ·log₂(b·n) + 4 + 2b) / n`, for a cycle of length `2n`.
    pub half_length_form: f64,
    /// `12δ·ln(n) / n`, for a cycle of length `n` (asymptotic form).
    pub asymptotic_form: f64,
}

pub fn prop92_bound(delta: f64, n: f64, b: f64) -> Prop92Bound {
    Prop92Bound {
        half_length_form: (4.0 * delta * (b * n).log2() + 4.0 + 2.0 * b) / n,
        asymptotic_form: 12.0 * delta * n.ln() / n,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma91Report {
    pub length: usize,
    /// Largest distance from a vertex of `I(x₁, x₂)` to the path.
    pub max_defect: u32,
    pub witness: usize,
    pub bound: f64,
    pub holds: bool,
}

/// Checks that every geodesic between the endpoints of `path` stays within
/// `δ·log₂(ℓ) + 1` of it.
pub fn lemma91_check(g: &MetricGraph, path: &[usize], delta: Rational) -> Result<Lemma91Report> {
    if path.len() < 2 {
        return usage("the path needs length at least 1");
    }
    if !g.is_path(path) {
        return usage("consecutive path vertices must be adjacent");
    }
    let (x1, x2) = (path[0], path[path.len() - 1]);
    let (max_defect, witness) = g
        .interval(x1, x2)
        .into_iter()
        .map(|y| (g.distance_to_set(y, path), y))
        .max_by_key(|&(d, y)| (d, std::cmp::Reverse(y)))
        .expect("interval contains its endpoints");
    let length = path.len() - 1;
    let delta = *delta.numer() as f64 / *delta.denom() as f64;
    let bound = delta * (length as f64).log2() + 1.0;
    Ok(Lemma91Report {
        length,
        max_defect,
        witness,
        bound,
        holds: max_defect as f64 <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_boundary_distortion() {
        for n in [2, 4, 6] {
            let g = MetricGraph::grid(n).unwrap();
            let r = cycle_distortion(&g, &MetricGraph::grid_boundary(n)).unwrap();
            assert_eq!((r.a, r.b), (Rational::new(1, 2), Rational::from_integer(1)));
        }
    }

    #[test]
    fn isometric_cycle_and_degenerate_input() {
        let c = MetricGraph::cycle(7).unwrap();
        let r = cycle_distortion(&c, &(0..7).collect::<Vec<_>>()).unwrap();
        assert_eq!((r.a, r.b), (Rational::from_integer(1), Rational::from_integer(1)));
        assert!(cycle_distortion(&c, &[3, 3, 3]).is_err());
        assert!(cycle_distortion(&c, &[0, 1, 2]).is_err());
    }

    #[test]
    fn bound_formulas() {
        let b = prop92_bound(0.0, 10.0, 1.0);
        assert!((b.half_length_form - 0.6).abs() < 1e-15);
        let b = prop92_bound(1.0, 1024.0, 1.0);
        assert!((b.half_length_form - 46.0 / 1024.0).abs() < 1e-15);
        let e2 = std::f64::consts::E.powi(2);
        assert!((prop92_bound(1.0, e2, 1.0).asymptotic_form - 24.0 / e2).abs() < 1e-12);
    }

    #[test]
    fn path_audit_examples() {
        let c8 = MetricGraph::cycle(8).unwrap();
        let r = lemma91_check(&c8, &[0, 1, 2, 3, 4], Rational::from_integer(2)).unwrap();
        assert_eq!(r.max_defect, 2);
        assert_eq!(r.bound, 5.0);
        assert!(r.holds);
        let r = lemma91_check(&c8, &[0, 1, 2], Rational::from_integer(2)).unwrap();
        assert_eq!(r.max_defect, 0);
        let tree = MetricGraph::path(6).unwrap();
        let r = lemma91_check(&tree, &[0, 1, 2, 3, 2, 3, 4], Rational::from_integer(0)).unwrap();
        assert_eq!((r.max_defect, r.bound), (0, 1.0));
    }
}
