//! End-to-end acceptance checks. Each criterion prints one line:
//! `AC<n> PASS|FAIL <seconds>s <details>`. Run with `--nocapture` to see them.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use oelab_core::coupling::CylinderSet;
use oelab_core::functional::{
    push_to_orbit, CyclicQuotient, FiniteSupportFunction, LamplighterCycle, RegularAction, TransitiveSet,
};
use oelab_core::hyperbolicity::{
    cycle_distortion, extract_fat_cycle, lemma91_check, rips_delta, ExtractParams, MetricGraph, CONTRACTION_TARGET,
};
use oelab_core::odometer::{BiInfinitePoint, Metric, OdometerCoupling};
use oelab_core::{
    DiameterMode, GroupDescriptor, GroupElement, IntegrabilityGauge, MatchedCoupling, Rational, Side, TilingSequence,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn z(v: &[i128]) -> GroupElement {
    GroupElement::Zn(v.to_vec())
}

fn to_f64(q: Rational) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

fn z2_z() -> MatchedCoupling {
    MatchedCoupling::new(TilingSequence::zn(2, 1).unwrap(), TilingSequence::zn(1, 2).unwrap(), 60).unwrap()
}

fn z4_heis() -> MatchedCoupling {
    MatchedCoupling::new(TilingSequence::zn(4, 1).unwrap(), TilingSequence::heisenberg(), 28).unwrap()
}

/// Counts `|T + e_i \ T|` straight from the materialized tile.
fn cube_boundary(tile: &HashSet<GroupElement>, n: usize) -> usize {
    (0..n)
        .map(|i| {
            tile.iter()
                .filter(|g| {
                    let mut v = g.as_zn().unwrap().to_vec();
                    v[i] += 1;
                    !tile.contains(&GroupElement::Zn(v))
                })
                .count()
        })
        .max()
        .unwrap()
}

fn ac1() -> Verdict {
    let mut bad = Vec::new();
    for n in 1..=3usize {
        let t = TilingSequence::zn(n, 1).unwrap();
        for tile in t.build_tiles(5).unwrap() {
            let k = tile.k;
            let eps = Rational::new(1, 1 << (k + 1));
            let f = t.folner_constant(&tile);
            let counted = Rational::new(cube_boundary(&tile.elements, n) as i128, tile.elements.len() as i128);
            let d = t.tile_diameter(k, DiameterMode::Exact).unwrap().value;
            if f.computed != eps || counted != eps || d > (n as u64) << (k + 1) {
                bad.push(format!("n={n} k={k} eps={} counted={counted} diam={d}", f.computed));
            }
        }
    }
    verdict(bad.is_empty(), format!("18 tiles, epsilon = 2^-(k+1) exactly, diam <= n 2^(k+1); failures {bad:?}"))
}

fn ac2() -> Verdict {
    let t = TilingSequence::heisenberg();
    let mut notes = Vec::new();
    let mut pass = true;
    let tiles = t.build_tiles(3).unwrap();
    pass &= tiles[3].elements.len() == 65_536;
    for tile in &tiles {
        let f = t.folner_constant(tile);
        let ok = f.computed <= Rational::new(1, 1 << tile.k);
        pass &= ok;
        notes.push(format!("k={} eps={}", tile.k, f.computed));
    }
    let started = Instant::now();
    let t4 = t.build_tiles(4).unwrap().pop().unwrap();
    let f4 = t.folner_constant(&t4);
    let k4_time = started.elapsed();
    pass &= t4.elements.len() == 1 << 20 && f4.computed <= Rational::new(1, 16) && k4_time < Duration::from_secs(60);
    notes.push(format!("k=4 size={} eps={} in {:.1}s", t4.elements.len(), f4.computed, k4_time.as_secs_f64()));
    for k in 0..=1 {
        let d = t.tile_diameter(k, DiameterMode::Exact).unwrap().value;
        pass &= d <= 10 << (k + 2);
        notes.push(format!("diam T_{k}={d}"));
    }
    verdict(pass, notes.join(", "))
}

fn ac3() -> Verdict {
    let m = 2u64;
    let t = TilingSequence::lamplighter(m as u32).unwrap();
    let mut notes = Vec::new();
    let mut pass = true;
    for tile in t.build_tiles(3).unwrap() {
        let k = tile.k;
        let f = t.folner_constant(&tile);
        let d = t.tile_diameter(k, DiameterMode::Sampled { pairs: 100_000, seed: 30 + k as u64 }).unwrap().value;
        let bound = (m + 1) << (k + 1);
        let ok = f.computed <= Rational::new(1, 1 << (k + 1)) && d <= bound;
        pass &= ok;
        notes.push(format!("k={k} eps={} diam={d}/{bound}", f.computed));
    }
    verdict(pass, notes.join(", "))
}

fn ac4() -> Verdict {
    let n = 100_000;
    let mut worst: f64 = 0.0;
    let mut rows = 0;
    let mut failures = Vec::new();
    for (name, c) in [("Z2-Z", z2_z()), ("Z4-Heis", z4_heis())] {
        for side in [Side::Left, Side::Right] {
            for (j, s) in c.tiling(side).group().generators().iter().enumerate() {
                for row in c.tail_law(side, s, 6, n, 400 + j as u64).unwrap() {
                    let exact = row.exact_f64.expect("exact tail available");
                    let se = row.stderr.max(1.0 / n as f64);
                    worst = worst.max((row.mc_freq - exact).abs() / se);
                    rows += 1;
                    if row.agrees(4.0, n) != Some(true) {
                        failures.push(format!("{name} {side:?} gen {j} k={}", row.k));
                    }
                }
            }
        }
    }
    verdict(failures.is_empty(), format!("{rows} (generator, k) rows, worst deviation {worst:.2} se; failures {failures:?}"))
}

fn ac5() -> Verdict {
    let c = z2_z();
    let partner = c.tiling(Side::Right).clone();
    let radius = |k: usize| partner.claimed_radius(k);
    let mut notes = Vec::new();
    let mut pass = true;
    for g in [z(&[1, 0]), z(&[0, 1])] {
        let law = c.distance_law(Side::Left, &g, 60).unwrap();
        let low = IntegrabilityGauge::Power(0.4);
        let strata = law.strata(&low, radius, 12);
        let total = law.expectation(&low);
        let share = (strata[11] + strata[12]) / total;
        let mc = c.mc_integrability(Side::Left, &g, &low, 100_000, 55).unwrap();
        let mc_ok = (mc.estimate - total).abs() <= 4.0 * mc.stderr;

        let high = IntegrabilityGauge::Power(0.6);
        let sums: Vec<f64> = law
            .strata(&high, radius, 12)
            .iter()
            .scan(0.0, |acc, s| {
                *acc += s;
                Some(*acc)
            })
            .collect();
        let increments: Vec<f64> = sums.windows(2).map(|w| w[1] - w[0]).collect();
        let growing = increments.iter().all(|&d| d > 0.0) && increments.windows(2).all(|w| w[1] >= w[0]);
        let high_share = (sums[12] - sums[10]) / sums[12];
        pass &= share < 0.05 && mc_ok && growing && high_share >= 0.05;
        notes.push(format!(
            "{g:?}: p=0.4 last-two share {:.2}% (mc {:.4} vs exact {:.4}), p=0.6 partial sums increasing with growing increments, last-two share {:.1}%",
            100.0 * share,
            mc.estimate,
            total,
            100.0 * high_share
        ));
    }
    verdict(pass, notes.join("; "))
}

fn ac6() -> Verdict {
    let mut pass = true;
    let mut notes = Vec::new();
    for k in [2u32, 3] {
        let c = OdometerCoupling::new(k).unwrap();
        let ll = c.lamplighter();
        let shift = ll.generators().iter().find(|g| g.as_lamp().unwrap().cursor() == 1).unwrap().clone();
        let lamp = ll.word(&[0]);
        let (mut shift_max, mut lamp_max) = (0, 0);
        let mut shift_min = u64::MAX;
        for window in 0..k.pow(3) {
            let coords = [(-1, window % k), (0, window / k % k), (1, window / (k * k))];
            for seed in 0..20 {
                let x = BiInfinitePoint::with_coordinates(k, seed, &coords).unwrap();
                let ds = c.move_distance(Metric::BaumslagSolitar, &shift, &x).unwrap();
                shift_max = shift_max.max(ds);
                shift_min = shift_min.min(ds);
                lamp_max = lamp_max.max(c.move_distance(Metric::BaumslagSolitar, &lamp, &x).unwrap());
            }
        }
        let exact_ok = shift_min == 1 && shift_max == 1 && lamp_max <= (k - 1) as u64;
        pass &= exact_ok;

        let bs = c.bs().clone();
        let elements: Vec<GroupElement> = bs
            .ball(3)
            .unwrap()
            .into_iter()
            .filter(|g| *g != bs.identity())
            .collect();
        let ms: Vec<u32> = (1..=8).collect();
        let mut failures = 0;
        let mut worst: f64 = f64::NEG_INFINITY;
        for (i, g) in elements.iter().enumerate() {
            for r in c.tail_bound_check(g.as_bs().unwrap(), &ms, 1_000_000, 600 + i as u64).unwrap() {
                failures += usize::from(!r.pass);
                worst = worst.max(r.freq - r.paper_bound);
            }
        }
        pass &= failures == 0;
        notes.push(format!(
            "k={k}: shift distance 1, lamp distance <= {lamp_max}; {} elements x 8 values of M at N=1e6, {failures} failures, max(freq - bound) {worst:.3e}",
            elements.len()
        ));
    }
    verdict(pass, notes.join("; "))
}

fn random_function(group: &GroupDescriptor, rng: &mut ChaCha8Rng) -> FiniteSupportFunction {
    let gens = group.generators().len();
    let entries: Vec<(GroupElement, f64)> = (0..rng.random_range(1..7))
        .map(|_| {
            let word: Vec<usize> = (0..rng.random_range(0..6)).map(|_| rng.random_range(0..gens)).collect();
            (group.word(&word), rng.random_range(-3..4) as f64)
        })
        .collect();
    FiniteSupportFunction::new(group, entries).unwrap()
}

fn random_point<S: TransitiveSet>(set: &S, base: &S::Point, rng: &mut ChaCha8Rng) -> S::Point {
    let gens = set.group().generators().len();
    let word: Vec<usize> = (0..rng.random_range(0..6)).map(|_| rng.random_range(0..gens)).collect();
    set.act(&set.group().word(&word), base).unwrap()
}

/// Norm preservation must be exact for integer-valued functions; the difference bound must hold.
fn push_preserves_norms<S: TransitiveSet>(set: &S, base: &S::Point, rng: &mut ChaCha8Rng) -> bool {
    let f = random_function(set.group(), rng);
    let (x0, x1) = (random_point(set, base, rng), random_point(set, base, rng));
    [1.0, 2.0, 3.0].iter().all(|&p| {
        let r = push_to_orbit(&f, set, &x0, &x1, p).unwrap();
        r.norm_pow == r.pushed_norm_pow && r.holds
    })
}

fn ac7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut failures = 0;
    for i in 0..1000 {
        let ok = match i % 4 {
            0 => {
                let set = RegularAction(GroupDescriptor::zn(2));
                push_preserves_norms(&set, &set.group().identity(), &mut rng)
            }
            1 => {
                let set = CyclicQuotient::new(rng.random_range(1..12)).unwrap();
                push_preserves_norms(&set, &0, &mut rng)
            }
            2 => {
                let set = LamplighterCycle::new(2 + (i % 3) as u32, rng.random_range(1..8)).unwrap();
                let o = set.origin();
                push_preserves_norms(&set, &o, &mut rng)
            }
            _ => {
                let set = RegularAction(GroupDescriptor::heisenberg());
                push_preserves_norms(&set, &set.group().identity(), &mut rng)
            }
        };
        failures += usize::from(!ok);
    }

    let plane = GroupDescriptor::zn(2);
    let functions = [
        FiniteSupportFunction::indicator(&plane, plane.ball(3).unwrap()).unwrap(),
        FiniteSupportFunction::indicator(&plane, [plane.identity()]).unwrap(),
        random_function(&plane, &mut rng),
    ];
    let diagonal = MatchedCoupling::diagonal(TilingSequence::zn(2, 1).unwrap(), 60).unwrap();
    let coupled = z2_z();
    let mut prop_fail = Vec::new();
    let mut checks = 0;
    for (fi, f) in functions.iter().enumerate() {
        for p in [1.0, 2.0] {
            let d = diagonal.induced_gradient_check(Side::Right, f, p, 200, 7).unwrap();
            let ok_d = d.holds && d.lhs_stderr == 0.0;
            let c = coupled.induced_gradient_check(Side::Right, f, p, 10_000, 8).unwrap();
            checks += 2;
            if !ok_d {
                prop_fail.push(format!("identity f{fi} p={p}"));
            }
            if !c.holds {
                prop_fail.push(format!("Z2-Z f{fi} p={p} lhs={} rhs={}", c.lhs, c.rhs));
            }
        }
    }
    verdict(
        failures == 0 && prop_fail.is_empty(),
        format!("1000 push-forward instances, {failures} failures; {checks} induced-gradient checks, failures {prop_fail:?}"),
    )
}

fn random_cylinders(t: &TilingSequence, rng: &mut ChaCha8Rng) -> CylinderSet {
    let count = rng.random_range(1..5);
    let cylinders = (0..count)
        .map(|_| {
            let len = rng.random_range(1..3);
            (0..len).map(|k| rng.random_range(0..t.letter_size(k).unwrap())).collect()
        })
        .collect();
    CylinderSet::new(t, cylinders).unwrap()
}

fn ac8() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let tilings = [z2_z().tiling(Side::Left).clone(), z4_heis().tiling(Side::Right).clone()];
    let mut failures = Vec::new();
    let mut worst = f64::INFINITY;
    for i in 0..20 {
        let t = &tilings[i % 2];
        let set = random_cylinders(t, &mut rng);
        let radius = 1 + (i / 2) as u32 % 6;
        let samples = if i % 2 == 0 { 4000 } else { 1000 };
        let r = t.return_time_density(&set, radius, samples, 800 + i as u64, 60).unwrap();
        worst = worst.min((r.lhs - r.rhs) / r.stderr.max(1e-12));
        if !r.holds {
            failures.push(format!("{} set {i} n={radius}: lhs {} rhs {}", t.name(), r.lhs, r.rhs));
        }
    }
    verdict(
        failures.is_empty(),
        format!("20 cylinder sets on zn:2 and heis, n <= 6; smallest margin {worst:.2} se; failures {failures:?}"),
    )
}

fn ac9() -> Verdict {
    let mut notes = Vec::new();
    let mut pass = true;

    let trees_ok = (0..20).all(|s| rips_delta(&MetricGraph::random_tree(10 + 5 * s as usize, s).unwrap()).unwrap().delta == Rational::from_integer(0))
        && rips_delta(&MetricGraph::path(10).unwrap()).unwrap().delta == Rational::from_integer(0);
    pass &= trees_ok;
    notes.push(format!("trees 0-thin: {trees_ok}"));

    let graphs = [
        "tree:40:1", "tree:80:2", "cycle:9", "cycle:16", "grid:6", "grid:9", "cayley-ball:zn:2:5", "cayley-ball:ll:2:5",
        "cayley-ball:bs:2:5", "cayley-ball:heis:4",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    let mut violations = 0;
    for spec in graphs {
        let g = MetricGraph::family(spec).unwrap();
        let delta = rips_delta(&g).unwrap().delta;
        for _ in 0..100 {
            let mut path = vec![rng.random_range(0..g.vertex_count())];
            for _ in 0..rng.random_range(1..=3 * g.diameter() as usize + 1) {
                let nbrs: Vec<usize> = g.neighbors(*path.last().unwrap()).collect();
                path.push(nbrs[rng.random_range(0..nbrs.len())]);
            }
            violations += usize::from(!lemma91_check(&g, &path, delta).unwrap().holds);
        }
    }
    pass &= violations == 0;
    notes.push(format!("path audit: {violations} violations in 1000"));

    for n in [6usize, 10, 14, 18] {
        let g = MetricGraph::grid(n).unwrap();
        let r = cycle_distortion(&g, &MetricGraph::grid_boundary(n)).unwrap();
        let delta = to_f64(rips_delta(&g).unwrap().delta);
        let (a, b) = (to_f64(r.a), to_f64(r.b));
        let half = 4.0 * n as f64 / 2.0;
        let lower = (a * half - 4.0 - 2.0 * b) / (4.0 * (b * half).log2());
        let ok = r.a == Rational::new(1, 2) && r.b == Rational::from_integer(1) && delta >= lower;
        pass &= ok;
        notes.push(format!("grid {n}: a={} b={} delta={delta} >= {lower:.3}", r.a, r.b));
    }

    let g = MetricGraph::grid(20).unwrap();
    let f = extract_fat_cycle(&g, &ExtractParams::default()).unwrap();
    let audit = cycle_distortion(&g, &f.cycle).unwrap();
    let length_goal = (f.delta / 15).ceil().to_integer();
    let ok = f.passes()
        && audit == f.distortion
        && audit.a >= Rational::new(1, 2 * CONTRACTION_TARGET as i128)
        && f.cycle.len() as i128 >= length_goal;
    pass &= ok;
    notes.push(format!("20x20 fat cycle: length {} >= {length_goal}, a={} (delta {})", f.cycle.len(), audit.a, f.delta));
    verdict(pass, notes.join("; "))
}

#[test]
fn acceptance() {
    let criteria: [(u32, fn() -> Verdict, u64); 9] = [
        (1, ac1, 10),
        (2, ac2, 120),
        (3, ac3, 120),
        (4, ac4, 300),
        (5, ac5, 120),
        (6, ac6, 300),
        (7, ac7, 300),
        (8, ac8, 300),
        (9, ac9, 180),
    ];
    let mut failed = Vec::new();
    for (n, run, budget) in criteria {
        let started = Instant::now();
        let v = run();
        let secs = started.elapsed().as_secs_f64();
        let pass = v.pass && secs < budget as f64;
        println!("AC{n} {} {secs:.1}s (budget {budget}s) {}", if pass { "PASS" } else { "FAIL" }, v.detail);
        if !pass {
            failed.push(n);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
