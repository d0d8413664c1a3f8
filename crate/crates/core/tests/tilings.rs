use oelab_core::{DiameterMode, GroupElement, LampElement, Rational, TilingSequence};
use proptest::prelude::*;

fn builtins() -> Vec<TilingSequence> {
    vec![
        TilingSequence::builtin("zn:1").unwrap(),
        TilingSequence::builtin("zn:2").unwrap(),
        TilingSequence::builtin("zn:1:grouped:2").unwrap(),
        TilingSequence::builtin("heis").unwrap(),
        TilingSequence::builtin("ll:2").unwrap(),
        TilingSequence::builtin("ll:3").unwrap(),
        TilingSequence::builtin("zmatched:ll:2").unwrap(),
    ]
}

#[test]
fn decode_inverts_product_on_small_tiles() {
    for t in builtins() {
        for k in 0..=3 {
            let size = t.tile_size(k).unwrap();
            let step = (size / 20_000).max(1);
            let mut flat = 0;
            while flat < size {
                let idx = t.unflatten(flat, k);
                let g = t.product(&idx);
                assert_eq!(t.decode(&g, k).unwrap(), idx, "{} k={k}", t.name());
                flat += step;
            }
        }
    }
}

#[test]
fn tile_sizes_match_closed_forms() {
    for k in 0..6usize {
        for n in 1..=3u32 {
            let t = TilingSequence::zn(n as usize, 1).unwrap();
            assert_eq!(t.tile_size(k), Some(1u128 << (n * (k as u32 + 1))));
        }
        let h = TilingSequence::heisenberg();
        assert_eq!(h.tile_size(k), Some(1u128 << (4 * k + 4)));
    }
    for m in [2u128, 3] {
        let ll = TilingSequence::lamplighter(m as u32).unwrap();
        for k in 0..4usize {
            let width = 1u32 << (k + 1);
            assert_eq!(ll.tile_size(k), Some((width as u128) * m.pow(width)));
        }
    }
}

#[test]
fn materialized_tiles_have_product_size() {
    let cases = [("zn:3", 3), ("heis", 2), ("ll:2", 2), ("ll:3", 1)];
    for (spec, k) in cases {
        let t = TilingSequence::builtin(spec).unwrap();
        let tiles = t.build_tiles(k).unwrap();
        for tile in &tiles {
            assert_eq!(tile.elements.len() as u128, t.tile_size(tile.k).unwrap());
        }
    }
}

#[test]
fn folner_constants_within_claims_and_nonincreasing() {
    let cases = [("zn:1", 5), ("zn:2", 4), ("heis", 2), ("ll:2", 2), ("ll:3", 1), ("zmatched:ll:2", 1)];
    for (spec, k) in cases {
        let t = TilingSequence::builtin(spec).unwrap();
        let tiles = t.build_tiles(k).unwrap();
        let eps: Vec<Rational> = tiles.iter().map(|tile| t.folner_constant(tile).computed).collect();
        for (j, e) in eps.iter().enumerate() {
            assert!(*e <= t.claimed_epsilon(j).unwrap(), "{spec} k={j}");
        }
        assert!(eps.windows(2).all(|w| w[1] <= w[0]), "{spec}: {eps:?}");
    }
}

#[test]
fn folner_constant_equals_tail_of_worst_generator() {
    for (spec, k) in [("heis", 2), ("ll:2", 2), ("zn:2", 3)] {
        let t = TilingSequence::builtin(spec).unwrap();
        let tile = t.build_tiles(k).unwrap().pop().unwrap();
        let via_tail = t
            .group()
            .generators()
            .iter()
            .map(|s| t.exact_tail(s, k).unwrap())
            .max()
            .unwrap();
        assert_eq!(t.folner_constant(&tile).computed, via_tail, "{spec}");
    }
}

#[test]
fn heisenberg_and_lamplighter_exact_diameters() {
    let h = TilingSequence::heisenberg();
    for k in 0..=1 {
        let d = h.tile_diameter(k, DiameterMode::Exact).unwrap();
        assert_eq!(d.within_claim, Some(true), "{d:?}");
    }
    let ll = TilingSequence::lamplighter(2).unwrap();
    let exact = ll.tile_diameter(1, DiameterMode::Exact).unwrap();
    let sampled = ll
        .tile_diameter(1, DiameterMode::Sampled { pairs: 5000, seed: 3 })
        .unwrap();
    assert!(sampled.value <= exact.value);
    assert!(exact.value as u128 <= exact.claimed.unwrap());
}

fn heis_gamma() -> impl Strategy<Value = GroupElement> {
    (-5i128..5, -5i128..5, -40i128..40).prop_map(|(a, b, c)| GroupElement::Heis([a, b, c]))
}

fn lamp_gamma() -> impl Strategy<Value = GroupElement> {
    (prop::collection::vec((-4i64..8, 0i64..2), 0..4), -5i64..5)
        .prop_map(|(l, c)| GroupElement::Lamp(LampElement::new(2, l, c)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn heisenberg_fast_tail_matches_enumeration(g in heis_gamma(), k in 0usize..3) {
        let t = TilingSequence::heisenberg();
        let fast = t.exact_tail(&g, k).unwrap();
        let slow = t.enumerated_escape_count(&g, k).unwrap();
        prop_assert_eq!(fast, Rational::new(slow as i128, t.tile_size(k).unwrap() as i128));
    }

    #[test]
    fn lamplighter_fast_tail_matches_enumeration(g in lamp_gamma(), k in 0usize..3) {
        let t = TilingSequence::lamplighter(2).unwrap();
        let fast = t.exact_tail(&g, k).unwrap();
        let slow = t.enumerated_escape_count(&g, k).unwrap();
        prop_assert_eq!(fast, Rational::new(slow as i128, t.tile_size(k).unwrap() as i128));
    }

    #[test]
    fn zn_fast_tail_matches_enumeration(a in -9i128..9, b in -9i128..9, k in 0usize..3, grouping in 1u32..3) {
        let t = TilingSequence::zn(2, grouping).unwrap();
        let g = GroupElement::Zn(vec![a, b]);
        let fast = t.exact_tail(&g, k).unwrap();
        let slow = t.enumerated_escape_count(&g, k).unwrap();
        prop_assert_eq!(fast, Rational::new(slow as i128, t.tile_size(k).unwrap() as i128));
    }

    #[test]
    fn tails_are_monotone_in_depth(a in -20i128..20) {
        let t = TilingSequence::zn(1, 1).unwrap();
        let g = GroupElement::Zn(vec![a]);
        let tails: Vec<Rational> = (0..6).map(|k| t.exact_tail(&g, k).unwrap()).collect();
        prop_assert!(tails.windows(2).all(|w| w[1] <= w[0]));
    }
}
