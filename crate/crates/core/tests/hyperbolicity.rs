use oelab_core::hyperbolicity::{
    cycle_distortion, extract_fat_cycle, four_point_delta, lemma91_check, prop92_bound, rips_delta, ExtractParams,
    MetricGraph,
};
use oelab_core::{GroupDescriptor, Rational};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

/// Brute force over all triples and interval points, straight from the definition.
fn naive_rips(g: &MetricGraph) -> u32 {
    let n = g.vertex_count();
    let interval = |a: usize, b: usize| -> Vec<usize> { (0..n).filter(|&x| g.d(a, x) + g.d(x, b) == g.d(a, b)).collect() };
    let mut best = 0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut others = interval(a, c);
                others.extend(interval(b, c));
                for x in interval(a, b) {
                    let d = others.iter().map(|&y| g.d(x, y)).min().unwrap();
                    best = best.max(d);
                }
            }
        }
    }
    best
}

fn random_connected(n: usize, extra: usize, seed: u64) -> MetricGraph {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (rng.random_range(0..i), i)).collect();
    for _ in 0..extra {
        let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
        if u != v {
            edges.push((u, v));
        }
    }
    MetricGraph::from_edges("random", n, edges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rips_matches_the_brute_force_oracle(n in 2usize..14, extra in 0usize..10, seed in any::<u64>()) {
        let g = random_connected(n, extra, seed);
        let r = rips_delta(&g).unwrap();
        prop_assert_eq!(r.delta, Rational::from_integer(naive_rips(&g) as i128));
        if let Some(w) = r.witness {
            prop_assert_eq!(g.d(w.a, w.x) + g.d(w.x, w.b), g.d(w.a, w.b));
            let mut others = g.interval(w.a, w.c);
            others.extend(g.interval(w.b, w.c));
            prop_assert_eq!(g.distance_to_set(w.x, &others), w.value);
        }
        // Four-point and Rips constants control each other up to a factor.
        let fp = four_point_delta(&g).unwrap().delta;
        prop_assert!(fp <= r.delta * 2 + 1);
    }

    #[test]
    fn rips_is_invariant_under_relabeling(n in 2usize..40, extra in 0usize..30, seed in any::<u64>()) {
        let g = random_connected(n, extra, seed);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 1));
        let h = g.relabeled(&perm).unwrap();
        prop_assert_eq!(rips_delta(&g).unwrap().delta, rips_delta(&h).unwrap().delta);
        prop_assert_eq!(four_point_delta(&g).unwrap().delta, four_point_delta(&h).unwrap().delta);
    }
}

#[test]
fn trees_are_zero_thin() {
    for seed in 0..20 {
        let t = MetricGraph::random_tree(10 + 3 * seed as usize, seed).unwrap();
        assert_eq!(rips_delta(&t).unwrap().delta, Rational::from_integer(0), "seed {seed}");
        assert_eq!(four_point_delta(&t).unwrap().delta, Rational::from_integer(0));
    }
}

#[test]
fn cycles_and_grids() {
    let c8 = MetricGraph::cycle(8).unwrap();
    assert_eq!(rips_delta(&c8).unwrap().delta, Rational::from_integer(naive_rips(&c8) as i128));
    assert_eq!(rips_delta(&c8).unwrap().delta, Rational::from_integer(2));
    let fp = four_point_delta(&c8).unwrap().delta;
    assert!(fp > Rational::from_integer(0) && fp <= Rational::from_integer(2));
    let g5 = MetricGraph::grid(5).unwrap();
    let d5 = rips_delta(&g5).unwrap().delta;
    assert_eq!(d5, Rational::from_integer(naive_rips(&g5) as i128));
    assert!(d5 >= Rational::from_integer(2));
}

#[test]
fn grid_boundaries_respect_the_cycle_bound() {
    for n in [6usize, 10, 14, 18] {
        let g = MetricGraph::grid(n).unwrap();
        let r = cycle_distortion(&g, &MetricGraph::grid_boundary(n)).unwrap();
        assert_eq!((r.a, r.b), (Rational::new(1, 2), Rational::from_integer(1)));
        let delta = rips_delta(&g).unwrap().delta.to_integer() as f64;
        let half = 2.0 * n as f64;
        assert!(0.5 <= prop92_bound(delta, half, 1.0).half_length_form, "n={n} delta={delta}");
        assert!(delta >= (0.5 * half - 6.0) / (4.0 * half.log2()));
    }
}

fn random_walk(g: &MetricGraph, start: usize, steps: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut path = vec![start];
    for _ in 0..steps {
        let v = *path.last().unwrap();
        let nbrs: Vec<usize> = g.neighbors(v).collect();
        path.push(nbrs[rng.random_range(0..nbrs.len())]);
    }
    path
}

#[test]
fn path_audit_on_random_paths() {
    let graphs = vec![
        MetricGraph::random_tree(40, 1).unwrap(),
        MetricGraph::random_tree(60, 2).unwrap(),
        MetricGraph::cycle(9).unwrap(),
        MetricGraph::cycle(16).unwrap(),
        MetricGraph::grid(6).unwrap(),
        MetricGraph::grid(9).unwrap(),
        MetricGraph::cayley_ball(&GroupDescriptor::zn(2), 5).unwrap(),
        MetricGraph::cayley_ball(&GroupDescriptor::lamplighter(2), 5).unwrap(),
        MetricGraph::cayley_ball(&GroupDescriptor::baumslag_solitar(2), 5).unwrap(),
        MetricGraph::cayley_ball(&GroupDescriptor::heisenberg(), 4).unwrap(),
    ];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(91);
    let mut violations = 0;
    for g in &graphs {
        let delta = rips_delta(g).unwrap().delta;
        for _ in 0..100 {
            let start = rng.random_range(0..g.vertex_count());
            let steps = rng.random_range(1..=3 * g.diameter() as usize + 1);
            let path = random_walk(g, start, steps, &mut rng);
            let r = lemma91_check(g, &path, delta).unwrap();
            violations += usize::from(!r.holds);
        }
        let geo = g.geodesic(0, g.vertex_count() - 1);
        if geo.len() > 1 {
            let r = lemma91_check(g, &geo, delta).unwrap();
            assert!(r.holds);
            if g.is_tree() {
                assert_eq!(r.max_defect, 0);
            }
        }
    }
    assert_eq!(violations, 0);
}

#[test]
fn fat_cycle_in_the_large_grid() {
    let g = MetricGraph::grid(20).unwrap();
    let f = extract_fat_cycle(&g, &ExtractParams::default()).unwrap();
    assert_eq!(f.distortion, cycle_distortion(&g, &f.cycle).unwrap());
    assert!(f.passes(), "{f:?}");
    assert!(f.cycle.len() as i128 >= f.length_target);
}

#[test]
fn fat_cycles_pass_their_own_audit() {
    for spec in ["grid:5", "grid:9", "cycle:30", "cayley-ball:zn:2:6", "cayley-ball:ll:2:5", "cayley-ball:heis:4", "cayley-ball:bs:2:5"] {
        let g = MetricGraph::family(spec).unwrap();
        let f = extract_fat_cycle(&g, &ExtractParams::default()).unwrap_or_else(|e| panic!("{spec}: {e}"));
        assert_eq!(f.distortion, cycle_distortion(&g, &f.cycle).unwrap(), "{spec}");
        assert!(f.passes(), "{spec}: {f:?}");
    }
    let tree = MetricGraph::random_tree(50, 9).unwrap();
    assert!(extract_fat_cycle(&tree, &ExtractParams::default()).is_err());
    let thin = ExtractParams { delta: Some(Rational::from_integer(100)), ..ExtractParams::default() };
    assert!(extract_fat_cycle(&MetricGraph::grid(4).unwrap(), &thin).is_err());
}
