use rayon::prelude::*;

use super::rules::heis_cross;
use super::{LetterRule, Orientation, TilingSequence};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::Rational;

impl TilingSequence {
    /// `|{t ∈ T_k : γ·t ∉ T_k}| / |T_k|`, where `γ·t` is [`TilingSequence::translate`].
    /// This is the measure of `{x : ρ(γx, x) > k}` in the induced action.
    pub fn exact_tail(&self, gamma: &GroupElement, k: usize) -> Result<Rational> {
        self.group.check(gamma)?;
        let size = self.tile_size(k).ok_or(Error::ResourceExhausted {
            what: "tile size".into(),
            reached: k as u64,
        })?;
        let escapes = match self.fast_escape_count(gamma, k) {
            Some(c) => c,
            None => self.enumerated_escape_count(gamma, k)?,
        };
        Ok(Rational::new(escapes as i128, size as i128))
    }

    /// Same count by brute force over `T_k`, regardless of family.
    pub fn enumerated_escape_count(&self, gamma: &GroupElement, k: usize) -> Result<u128> {
        let size = self.tile_size(k).unwrap_or(u128::MAX);
        if size > self.group.budget().max_items(64) as u128 {
            return Err(Error::ResourceExhausted {
                what: format!("enumerating T_{k} for an exact tail"),
                reached: size.min(u64::MAX as u128) as u64,
            });
        }
        Ok((0..size as u64)
            .into_par_iter()
            .filter(|&flat| {
                let t = self.product(&self.unflatten(flat as u128, k));
                !self.contains(&self.translate(gamma, &t), k)
            })
            .count() as u128)
    }

    fn fast_escape_count(&self, gamma: &GroupElement, k: usize) -> Option<u128> {
        let size = self.tile_size(k)?;
        match (&self.rule, gamma) {
            (LetterRule::ZnDyadic { grouping, .. }, GroupElement::Zn(v)) => {
                let side = 1u128 << (grouping * (k as u32 + 1));
                let inside = v
                    .iter()
                    .map(|c| side.saturating_sub(c.unsigned_abs()))
                    .try_fold(1u128, |acc, s| acc.checked_mul(s))?;
                Some(size - inside)
            }
            (LetterRule::MixedRadix { .. }, GroupElement::Zn(v)) => {
                Some(size - size.saturating_sub(v[0].unsigned_abs()))
            }
            (LetterRule::Heisenberg, GroupElement::Heis(g)) if self.orientation == Orientation::Left => {
                Some(size - heis_inside(*g, k))
            }
            (LetterRule::Lamplighter { m }, GroupElement::Lamp(_)) if self.orientation == Orientation::Right => {
                // t γ^{-1} = (f + h(· − n), n + c) with γ^{-1} = (h, c): inside iff the
                // cursor and every shifted lamp of h stay in [0, L).
                let inv = self.group.inv(gamma);
                let h = inv.as_lamp()?;
                let width = 1i64 << (k + 1);
                let lo = h.lamps().first().map_or(0, |p| p.0).min(h.cursor()).min(0);
                let hi = h.lamps().last().map_or(0, |p| p.0).max(h.cursor()).max(0);
                let good = (width - (hi - lo)).max(0) as u128;
                let per_cursor = (*m as u128).checked_pow(width as u32)?;
                Some(size - good * per_cursor)
            }
            _ => None,
        }
    }
}

/// Number of `t ∈ T_k` with `γ t ∈ T_k` in the Heisenberg tiling.
///
/// For fixed `(x, y)` the fiber of `T_k` is a `z`-interval of length `4^{k+1}`
/// starting at the cross term `c(x, y)`; left multiplication by `(a, b, c)`
/// shifts it by `c + b x`, so the overlap is an interval intersection.
fn heis_inside(gamma: [i128; 3], k: usize) -> u128 {
    let [a, b, c] = gamma;
    let side = 1i128 << (k + 1);
    let depth = 1i128 << (2 * (k + 1));
    (0..side)
        .into_par_iter()
        .map(|x| {
            let mut total = 0u128;
            let x2 = x + a;
            if x2 < 0 || x2 >= side {
                return 0;
            }
            for y in 0..side {
                let y2 = y + b;
                if y2 < 0 || y2 >= side {
                    continue;
                }
                let start = heis_cross(x, y) + c + b * x;
                let target = heis_cross(x2, y2);
                total += (depth - (start - target).abs()).max(0) as u128;
            }
            total
        })
        .sum()
}
