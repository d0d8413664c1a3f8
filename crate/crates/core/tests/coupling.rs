use std::collections::HashSet;

use oelab_core::coupling::{CylinderSet, DistanceLaw};
use oelab_core::{CouplingPoint, Error, GroupElement, IntegrabilityGauge, MatchedCoupling, Side, TilingSequence};
use proptest::prelude::*;

fn z2_z() -> MatchedCoupling {
    MatchedCoupling::new(TilingSequence::zn(2, 1).unwrap(), TilingSequence::zn(1, 2).unwrap(), 60).unwrap()
}

fn z4_heis() -> MatchedCoupling {
    MatchedCoupling::new(TilingSequence::zn(4, 1).unwrap(), TilingSequence::heisenberg(), 28).unwrap()
}

fn ll_z() -> MatchedCoupling {
    MatchedCoupling::new(
        TilingSequence::lamplighter(2).unwrap(),
        TilingSequence::z_matched_to_lamplighter(2).unwrap(),
        5,
    )
    .unwrap()
}

fn couplings() -> Vec<MatchedCoupling> {
    vec![z2_z(), z4_heis(), ll_z()]
}

fn random_word(c: &MatchedCoupling, side: Side, letters: &[usize]) -> GroupElement {
    let group = c.tiling(side).group();
    let gens = group.generators().len();
    group.word(&letters.iter().map(|l| l % gens).collect::<Vec<_>>())
}

fn sides() -> impl Strategy<Value = Side> {
    prop_oneof![Just(Side::Left), Just(Side::Right)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn action_law(
        which in 0usize..3,
        side in sides(),
        w1 in prop::collection::vec(0usize..8, 0..5),
        w2 in prop::collection::vec(0usize..8, 0..5),
        seed in any::<u64>(),
    ) {
        let c = &couplings()[which];
        let t = c.tiling(side);
        let (g1, g2) = (random_word(c, side, &w1), random_word(c, side, &w2));
        let x = CouplingPoint::random(seed);
        let step = c.act(side, &g1, &x).and_then(|(y, n1)| c.act(side, &g2, &y).map(|(z, n2)| (z, n1.max(n2))));
        let direct = c.act(side, &t.group().mul(&g2, &g1), &x);
        match (step, direct) {
            (Ok((z, n)), Ok((z2, n2))) => {
                let k = n.max(n2);
                prop_assert_eq!(z.coordinates(t, k), z2.coordinates(t, k));
                prop_assert_eq!(z, z2);
            }
            (Err(Error::DepthExhausted { .. }), _) | (_, Err(Error::DepthExhausted { .. })) => {}
            (a, b) => prop_assert!(false, "{:?} {:?}", a, b),
        }
    }

    #[test]
    fn orbit_identity(
        which in 0usize..3,
        side in sides(),
        w in prop::collection::vec(0usize..8, 0..6),
        seed in any::<u64>(),
    ) {
        let c = &couplings()[which];
        let g = random_word(c, side, &w);
        let x = CouplingPoint::random(seed);
        let Ok((y, _)) = c.act(side, &g, &x) else { return Ok(()) };
        let lambda = c.transfer_cocycle(side, &g, &x).unwrap();
        let (y2, _) = c.act(side.other(), &lambda, &x).unwrap();
        prop_assert_eq!(y, y2);
    }
}

#[test]
fn moves_within_a_level_are_partial_permutations() {
    for c in couplings() {
        for side in [Side::Left, Side::Right] {
            let t = c.tiling(side);
            for s in t.group().generators() {
                let s_inv = t.group().inv(s);
                for k in 0..=3usize {
                    let size = t.tile_size(k).unwrap();
                    if size > 1 << 16 {
                        continue;
                    }
                    let mut images = HashSet::new();
                    let mut moved = 0u128;
                    for flat in 0..size {
                        let p = t.unflatten(flat, k);
                        let Ok(q) = t.decode(&t.translate(s, &t.product(&p)), k) else { continue };
                        moved += 1;
                        assert!(images.insert(q.clone()), "{} not injective", t.name());
                        assert_eq!(t.decode(&t.translate(&s_inv, &t.product(&q)), k).unwrap(), p);
                    }
                    let stay = size - t.exact_tail(s, k).unwrap().numer().unsigned_abs() * size
                        / t.exact_tail(s, k).unwrap().denom().unsigned_abs();
                    assert_eq!(moved, stay);
                }
            }
        }
    }
}

fn assert_laws_match(a: &DistanceLaw, b: &DistanceLaw) {
    assert_eq!(a.atoms.len(), b.atoms.len(), "{a:?} vs {b:?}");
    for (x, y) in a.atoms.iter().zip(&b.atoms) {
        assert_eq!((x.distance, x.depth), (y.distance, y.depth));
        assert!((x.prob - y.prob).abs() < 1e-15);
    }
    assert!((a.exhausted - b.exhausted).abs() < 1e-15);
}

#[test]
fn merged_law_matches_enumeration() {
    let pairs = [
        (TilingSequence::zn(2, 1).unwrap(), TilingSequence::zn(1, 2).unwrap()),
        (TilingSequence::zn(1, 2).unwrap(), TilingSequence::zn(2, 1).unwrap()),
        (TilingSequence::zn(2, 2).unwrap(), TilingSequence::zn(4, 1).unwrap()),
    ];
    for (l, r) in pairs {
        let c = MatchedCoupling::new(l, r, 30).unwrap();
        for side in [Side::Left, Side::Right] {
            let group = c.tiling(side).group();
            let mut gammas = group.generators().to_vec();
            gammas.push(group.word(&[0, 0, 0, 1, 0]));
            gammas.push(group.identity());
            for g in gammas {
                let merged = c.distance_law(side, &g, 3).unwrap();
                let enumerated = c.enumerated_law(side, &g, 3).unwrap();
                assert_laws_match(&merged, &enumerated);
                assert!((merged.total_mass() - 1.0).abs() < 1e-15);
            }
        }
    }
}

#[test]
fn z2_to_z_law_has_closed_form() {
    let c = z2_z();
    for (g, scale) in [(vec![1i128, 0], 1u128), (vec![0, 1], 2)] {
        let law = c.distance_law(Side::Left, &GroupElement::Zn(g), 60).unwrap();
        assert_eq!(law.atoms.len(), 60);
        for (n, a) in law.atoms.iter().enumerate() {
            assert_eq!(a.depth, n);
            assert_eq!(a.distance, scale * (2 * (1u128 << (2 * n)) + 1) / 3);
            assert_eq!(a.prob, 0.5f64.powi(n as i32 + 1));
        }
    }
}

#[test]
fn law_depth_tail_equals_exact_tail() {
    for c in [z2_z(), z4_heis()] {
        for side in [Side::Left, Side::Right] {
            for s in c.tiling(side).group().generators() {
                let law = c.distance_law(side, s, 2).unwrap();
                for k in 0..=2 {
                    let exact = c.exact_tail(side, s, k).unwrap();
                    let exact = *exact.numer() as f64 / *exact.denom() as f64;
                    assert!((law.depth_tail(k) - exact).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn tail_frequencies_track_exact_tails() {
    let c = z4_heis();
    let n = 20_000;
    for side in [Side::Left, Side::Right] {
        let s = &c.tiling(side).group().generators()[1];
        for row in c.tail_law(side, s, 4, n, 17).unwrap() {
            assert_eq!(row.agrees(4.0, n), Some(true), "{row:?}");
        }
    }
}

#[test]
fn identity_gauge_on_diagonal_is_exact() {
    let c = MatchedCoupling::diagonal(TilingSequence::zn(2, 1).unwrap(), 40).unwrap();
    let s = GroupElement::Zn(vec![0, -1]);
    let r = c.mc_integrability(Side::Left, &s, &IntegrabilityGauge::Identity, 500, 5).unwrap();
    assert_eq!((r.estimate, r.stderr, r.exhausted_fraction), (1.0, 0.0, 0.0));
}

#[test]
fn monte_carlo_matches_exact_law() {
    let c = z2_z();
    let g = GroupElement::Zn(vec![1, 0]);
    let gauge = IntegrabilityGauge::log_power(1.0).unwrap();
    let exact = c.distance_law(Side::Left, &g, 60).unwrap().expectation(&gauge);
    let mc = c.mc_integrability(Side::Left, &g, &gauge, 40_000, 11).unwrap();
    assert!((mc.estimate - exact).abs() < 4.0 * mc.stderr, "{mc:?} vs {exact}");
}

#[test]
fn stratified_bounds_separate_exponents() {
    let c = z2_z();
    let g = GroupElement::Zn(vec![1, 0]);
    let low = c.mc_integrability(Side::Left, &g, &IntegrabilityGauge::power(0.4).unwrap(), 20_000, 3).unwrap();
    assert_eq!(low.diverging, Some(false));
    assert!(low.estimate < low.stratified_bound.unwrap());
    let exact = c.distance_law(Side::Left, &g, 60).unwrap().expectation(&IntegrabilityGauge::Power(0.4));
    assert!(exact < low.stratified_bound.unwrap());
    for gauge in [IntegrabilityGauge::Power(0.6), IntegrabilityGauge::Exp(2.0)] {
        let r = c.mc_integrability(Side::Left, &g, &gauge, 100, 3).unwrap();
        assert_eq!(r.diverging, Some(true), "{gauge}");
    }
}

#[test]
fn return_time_on_half_cylinder() {
    let t = TilingSequence::zn(1, 1).unwrap();
    let set = CylinderSet::new(&t, vec![vec![0]]).unwrap();
    let r = t.return_time_density(&set, 4, 4000, 8, 60).unwrap();
    assert_eq!(r.rhs, 0.0);
    assert!(r.holds, "{r:?}");
}
