use std::collections::HashSet;

use clap::Args;
use oelab_core::coupling::CylinderSet;
use oelab_core::functional::{
    folner_set_quality, isoperimetric_profile, push_to_orbit, FiniteSupportFunction, GradientSide, ProfileMode, RegularAction,
};
use oelab_core::hyperbolicity::{
    cycle_distortion, extract_fat_cycle, four_point_delta, lemma91_check, prop92_bound, rips_delta, ExtractParams,
    MetricGraph,
};
use oelab_core::odometer::{BiInfinitePoint, OdometerCoupling};
use oelab_core::wreath::{LampCoupling, WreathCoupling};
use oelab_core::{
    BsElement, CouplingPoint, DiameterMode, Error, GroupDescriptor, GroupElement, IntegrabilityGauge, LampElement,
    MatchedCoupling, Orientation, Rational, Result, Side, TilingSequence,
};
use serde::Serialize;
use serde_json::json;

use crate::report::{Outcome, Table};

#[derive(Args, Debug, Serialize)]
pub struct SelftestArgs {
    /// Only the instant checks; without it a few small tiling levels are verified too.
    #[arg(long)]
    pub quick: bool,
}

fn z(v: &[i128]) -> GroupElement {
    GroupElement::Zn(v.to_vec())
}

type Check = (&'static str, fn(u64) -> Result<bool>);

const QUICK: &[Check] = &[
    ("group: (1,0)(0,1) = (1,1) in Z^2", |_| {
        Ok(GroupDescriptor::zn(2).mul(&z(&[1, 0]), &z(&[0, 1])) == z(&[1, 1]))
    }),
    ("group: identity has length 0", |_| {
        let groups = [GroupDescriptor::zn(3), GroupDescriptor::heisenberg(), GroupDescriptor::lamplighter(2), GroupDescriptor::baumslag_solitar(2)];
        groups.iter().try_fold(true, |ok, g| Ok(ok && g.word_length(&g.identity())? == 0))
    }),
    ("group: |(3,-2)| = 5 in Z^2", |_| Ok(GroupDescriptor::zn(2).word_length(&z(&[3, -2]))? == 5)),
    ("group: |B(3)| = 7 in Z", |_| Ok(GroupDescriptor::zn(1).growth_function(3)? == 7)),
    ("group: |B(1)| = 5 in the Heisenberg group", |_| Ok(GroupDescriptor::heisenberg().growth_function(1)? == 5)),
    ("group: B(1) = {-1,0,1} in Z", |_| {
        let ball: HashSet<GroupElement> = GroupDescriptor::zn(1).ball(1)?.into_iter().collect();
        Ok(ball == [z(&[-1]), z(&[0]), z(&[1])].into_iter().collect())
    }),
    ("group: |B(1)| = 5 in Z^2", |_| Ok(GroupDescriptor::zn(2).ball(1)?.len() == 5)),
    ("tiling: F_0 = F_1 = {0,1} collides at level 1", |_| {
        let letters = vec![vec![z(&[0]), z(&[1])], vec![z(&[0]), z(&[1])]];
        let t = TilingSequence::explicit("collide", GroupDescriptor::zn(1), Orientation::Right, letters)?;
        Ok(matches!(t.build_tiles(1), Err(Error::TilingViolation { k: 1, .. })))
    }),
    ("tiling: diam T_0 = 2 for Z^2", |_| {
        Ok(TilingSequence::zn(2, 1)?.tile_diameter(0, DiameterMode::Exact)?.value == 2)
    }),
    ("tiling: 5 has binary digits 1,0,1 in Z", |_| Ok(TilingSequence::zn(1, 1)?.decode(&z(&[5]), 2)? == vec![1, 0, 1])),
    ("tiling: (1,1,1) is a single Heisenberg letter", |_| {
        Ok(TilingSequence::heisenberg().contains(&GroupElement::Heis([1, 1, 1]), 0))
    }),
    ("coupling: gamma = 0 fixes x at depth 0", |seed| {
        let t = TilingSequence::zn(1, 1)?;
        let x = CouplingPoint::random(seed);
        let (y, n) = t.act(&z(&[0]), &x, 60)?;
        Ok(n == 0 && y.coordinates(&t, 8) == x.coordinates(&t, 8))
    }),
    ("coupling: gamma = 1 moves prefix (0,...) to (1,...)", |seed| {
        let t = TilingSequence::zn(1, 1)?;
        let x = CouplingPoint::new(vec![0], seed);
        let (y, n) = t.act(&z(&[1]), &x, 60)?;
        Ok(n == 0 && y.coordinate(0, 2) == 1 && y.coordinates(&t, 8)[1..] == x.coordinates(&t, 8)[1..])
    }),
    ("coupling: identity moves distance 0", |seed| {
        let c = MatchedCoupling::new(TilingSequence::zn(2, 1)?, TilingSequence::zn(1, 2)?, 60)?;
        let x = CouplingPoint::random(seed);
        Ok(c.transfer_distance(Side::Left, &z(&[0, 0]), &x)?.0 == 0 && c.transfer_distance(Side::Right, &z(&[0]), &x)?.0 == 0)
    }),
    ("coupling: identical tilings transfer gamma to itself", |seed| {
        let c = MatchedCoupling::diagonal(TilingSequence::zn(2, 1)?, 60)?;
        (0..20).try_fold(true, |ok, i| {
            let x = CouplingPoint::random(seed ^ i);
            Ok(ok && c.transfer_cocycle(Side::Left, &z(&[3, -1]), &x)? == z(&[3, -1]))
        })
    }),
    ("coupling: identity gauge of a generator on the diagonal is 1 with no error", |seed| {
        let c = MatchedCoupling::diagonal(TilingSequence::zn(1, 1)?, 60)?;
        let e = c.mc_integrability(Side::Left, &z(&[1]), &IntegrabilityGauge::Identity, 200, seed)?;
        Ok(e.estimate == 1.0 && e.stderr == 0.0)
    }),
    ("returns: the whole space gives lhs 1 >= rhs 1", |seed| {
        let r = TilingSequence::zn(1, 1)?.return_time_density(&CylinderSet::everything(), 2, 50, seed, 60)?;
        Ok(r.lhs == 1.0 && r.rhs == 1.0 && r.holds)
    }),
    ("returns: measure 3/4 gives rhs 1/2", |seed| {
        let t = TilingSequence::zn(1, 1)?;
        let set = CylinderSet::new(&t, vec![vec![0], vec![1, 0]])?;
        let r = t.return_time_density(&set, 1, 50, seed, 60)?;
        Ok(set.measure(&t)? == Rational::new(3, 4) && r.rhs == 0.5)
    }),
    ("odometer: a lamp at 0 flips x_0 only, and k flips return", |seed| {
        let c = OdometerCoupling::new(2)?;
        let x = BiInfinitePoint::with_coordinates(2, seed, &[(0, 0)])?;
        let g = LampElement::new(2, [(0, 1)], 0);
        let y = c.ll_act(&g, &x);
        let yy = c.ll_act(&g, &y);
        Ok(y.get(0) == 1 && (-6..=6).filter(|&i| i != 0).all(|i| y.get(i) == x.get(i)) && (-6..=6).all(|i| yy.get(i) == x.get(i)))
    }),
    ("odometer: (1,0) at x_0 = 0 changes only y_0", |seed| {
        let c = OdometerCoupling::new(2)?;
        let x = BiInfinitePoint::with_coordinates(2, seed, &[(0, 0)])?;
        let y = c.bs_act(&BsElement::new(2, 1, 0, 0), &x)?;
        Ok(y.get(0) == 1 && (-6..=6).filter(|&i| i != 0).all(|i| y.get(i) == x.get(i)))
    }),
    ("odometer: the shift never exceeds the tail threshold", |seed| {
        let r = OdometerCoupling::new(2)?.tail_bound_check(&BsElement::new(2, 0, 0, 1), &[2, 3], 200, seed)?;
        Ok(r.iter().all(|r| r.freq == 0.0 && r.pass))
    }),
    ("functional: the delta function has gradient 2|S| in Z^2", |_| {
        let g = GroupDescriptor::zn(2);
        let f = FiniteSupportFunction::indicator(&g, [g.identity()])?;
        Ok(f.gradient_norm(GradientSide::Left, 1.0)? == 2.0 * g.generators().len() as f64)
    }),
    ("functional: the zero function has gradient 0", |_| {
        let f = FiniteSupportFunction::zero(&GroupDescriptor::heisenberg());
        Ok(f.gradient_norm(GradientSide::Right, 2.0)? == 0.0)
    }),
    ("functional: pushing to the same point gives 0", |_| {
        let g = GroupDescriptor::zn(1);
        let f = FiniteSupportFunction::indicator(&g, [z(&[0]), z(&[1])])?;
        let e = g.identity();
        Ok(push_to_orbit(&f, &RegularAction(g.clone()), &e, &e, 1.0)?.lhs == 0.0)
    }),
    ("profile: empty support gives 0, a singleton in Z gives 1/4", |_| {
        let r = isoperimetric_profile(&GroupDescriptor::zn(1), 1, ProfileMode::SetsOnly)?;
        Ok(r.rows[0].value() == Rational::from_integer(0) && r.rows[1].value() == Rational::new(1, 4))
    }),
    ("functional: a singleton in Z has Folner quality 2", |_| {
        let g = GroupDescriptor::zn(1);
        Ok(folner_set_quality(&g, &HashSet::from([g.identity()]))? == Rational::from_integer(2))
    }),
    ("wreath: the identity moves distance 0", |seed| {
        let base = MatchedCoupling::diagonal(TilingSequence::zn(1, 1)?, 40)?;
        let w = WreathCoupling::new(base, LampCoupling::cyclic(2)?);
        let r = w.prop72_check(Side::Left, &w.identity(Side::Left), &w.random_point(seed))?;
        Ok(r.holds && r.expected == 0)
    }),
    ("hyp: the path P_10 is 0-thin", |_| Ok(rips_delta(&MetricGraph::path(10)?)?.delta == Rational::from_integer(0))),
    ("hyp: a single edge has four-point constant 0", |_| {
        Ok(four_point_delta(&MetricGraph::path(2)?)?.delta == Rational::from_integer(0))
    }),
    ("hyp: C_9 in itself has a = b = 1", |_| {
        let r = cycle_distortion(&MetricGraph::cycle(9)?, &(0..9).collect::<Vec<_>>())?;
        Ok(r.a == Rational::from_integer(1) && r.b == Rational::from_integer(1))
    }),
    ("hyp: a constant map is not a cycle", |_| Ok(cycle_distortion(&MetricGraph::cycle(5)?, &[2, 2, 2]).is_err())),
    ("hyp: thin-cycle bound formula values", |_| {
        let close = |x: f64, y: f64| (x - y).abs() < 1e-12;
        Ok(close(prop92_bound(0.0, 10.0, 1.0).half_length_form, 0.6)
            && close(prop92_bound(1.0, 1024.0, 1.0).half_length_form, 46.0 / 1024.0)
            && close(prop92_bound(1.0, std::f64::consts::E.powi(2), 1.0).asymptotic_form, 24.0 / std::f64::consts::E.powi(2)))
    }),
    ("hyp: paths in a tree have defect 0", |seed| {
        let t = MetricGraph::random_tree(30, seed)?;
        let walk = t.geodesic(0, 29);
        let mut back_and_forth = walk.clone();
        back_and_forth.extend(walk.iter().rev().skip(1));
        back_and_forth.extend(walk.iter().skip(1));
        let a = lemma91_check(&t, &walk, Rational::from_integer(0))?;
        let b = lemma91_check(&t, &back_and_forth, Rational::from_integer(0))?;
        Ok(a.max_defect == 0 && b.max_defect == 0 && a.holds && b.holds)
    }),
    ("hyp: trees have no fat cycle", |seed| {
        Ok(matches!(
            extract_fat_cycle(&MetricGraph::random_tree(25, seed)?, &ExtractParams::default()),
            Err(Error::NotApplicable(_))
        ))
    }),
];

const FULL: &[Check] = &[
    ("tiling: Z^n levels up to 3 have epsilon exactly 2^-(k+1)", |_| {
        (1..=3).try_fold(true, |ok, n| {
            let t = TilingSequence::zn(n, 1)?;
            let tiles = t.build_tiles(3)?;
            Ok(ok && tiles.iter().all(|tile| t.folner_constant(tile).computed == Rational::new(1, 1 << (tile.k + 1))))
        })
    }),
    ("tiling: Heisenberg levels up to 2 are within their claims", |_| {
        let t = TilingSequence::heisenberg();
        Ok(t.build_tiles(2)?.iter().all(|tile| t.folner_constant(tile).within_claim == Some(true)))
    }),
    ("tiling: lamplighter levels up to 2 are within their claims", |_| {
        let t = TilingSequence::lamplighter(2)?;
        Ok(t.build_tiles(2)?.iter().all(|tile| t.folner_constant(tile).within_claim == Some(true)))
    }),
];

pub fn run(a: &SelftestArgs, seed: u64) -> Result<Outcome> {
    let checks = QUICK.iter().chain(if a.quick { &[][..] } else { FULL });
    let mut table = Table::new(&["check", "pass", "error"]);
    let mut rows = Vec::new();
    let mut pass = true;
    for (name, f) in checks {
        let (ok, err) = match f(seed) {
            Ok(ok) => (ok, None),
            Err(e) => (false, Some(e.to_string())),
        };
        pass &= ok;
        table.push(vec![name.to_string(), ok.to_string(), err.clone().unwrap_or_default()]);
        rows.push(json!({ "check": name, "pass": ok, "error": err }));
    }
    let failed = rows.iter().filter(|r| r["pass"] == false).count();
    let results = json!({ "quick": a.quick, "checks": rows, "failed": failed, "pass": pass });
    Ok(Outcome { results, table, pass })
}
