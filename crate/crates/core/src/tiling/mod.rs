//! Følner tiling sequences `(F_k)` with `T_k = T_{k-1} F_k` (left orientation)
//! or `T_k = F_k T_{k-1}` (right orientation).
//!
//! Elements of `T_k` are addressed by their letter indices `(i_0, …, i_k)`,
//! `i_j < |F_j|`; the index of a letter is shared across matched tilings.

mod rules;
mod tail;
mod verify;

pub use verify::{DiameterMode, DiameterReport, FolnerReport, Tile};

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::error::{usage, Error, Result};
use crate::group::{Family, GroupDescriptor, GroupElement};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Orientation {
    Left,
    Right,
}

/// How the letter sets `F_k` are generated.
#[derive(Clone, Debug, PartialEq)]
pub enum LetterRule {
    /// `F_k = {0, …, 2^g − 1}^n · 2^{gk}` in `Z^n`.
    ZnDyadic { n: usize, grouping: u32 },
    /// `F_k = {(2^k x, 2^k y, 4^k z) : x, y ∈ {0,1}, z ∈ {0..3}}`.
    Heisenberg,
    /// The right-oriented lamplighter letters with `T_k = [0, 2^{k+1})`-supported lamps and cursor.
    Lamplighter { m: u32 },
    /// `F_k = |T_{k-1}| · [0, s_k − 1]` in `Z`, so `T_k = [0, s_0 ⋯ s_k)`.
    MixedRadix { sizes: Vec<u128> },
    /// User-supplied finite letter sets.
    Explicit { letters: Vec<Vec<GroupElement>> },
}

type DecodeTable = Arc<HashMap<GroupElement, Vec<u128>>>;

#[derive(Clone, Debug)]
pub struct TilingSequence {
    name: String,
    group: GroupDescriptor,
    orientation: Orientation,
    rule: LetterRule,
    memo: Arc<Mutex<HashMap<usize, DecodeTable>>>,
}

impl PartialEq for TilingSequence {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.orientation == other.orientation && self.rule == other.rule
    }
}

const MAX_TILE: u128 = 1 << 120;

impl TilingSequence {
    fn from_rule(name: String, group: GroupDescriptor, orientation: Orientation, rule: LetterRule) -> Self {
        TilingSequence {
            name,
            group,
            orientation,
            rule,
            memo: Arc::new(Mutex::new(HashMap::new())),
        }
    }

    /// Dyadic boxes in `Z^n`, grouping `grouping` consecutive binary levels into one letter.
    pub fn zn(n: usize, grouping: u32) -> Result<Self> {
        if n == 0 || grouping == 0 {
            return usage("Z^n tilings need n >= 1 and grouping >= 1");
        }
        if grouping as u64 * n as u64 > 60 {
            return usage("letter sets larger than 2^60 are not supported");
        }
        let name = if grouping == 1 {
            format!("zn:{n}")
        } else {
            format!("zn:{n}:grouped:{grouping}")
        };
        Ok(Self::from_rule(
            name,
            GroupDescriptor::new(Family::Zn(n))?,
            Orientation::Left,
            LetterRule::ZnDyadic { n, grouping },
        ))
    }

    pub fn heisenberg() -> Self {
        Self::from_rule(
            "heis".into(),
            GroupDescriptor::heisenberg(),
            Orientation::Left,
            LetterRule::Heisenberg,
        )
    }

    pub fn lamplighter(m: u32) -> Result<Self> {
        Ok(Self::from_rule(
            format!("ll:{m}"),
            GroupDescriptor::new(Family::Lamplighter(m))?,
            Orientation::Right,
            LetterRule::Lamplighter { m },
        ))
    }

    /// Intervals `[0, s_0 ⋯ s_k)` of `Z` with the given letter sizes.
    pub fn z_mixed_radix(name: impl Into<String>, sizes: Vec<u128>) -> Result<Self> {
        if sizes.is_empty() || sizes.iter().any(|&s| s == 0) {
            return usage("mixed-radix tilings need nonempty positive sizes");
        }
        Ok(Self::from_rule(
            name.into(),
            GroupDescriptor::zn(1),
            Orientation::Left,
            LetterRule::MixedRadix { sizes },
        ))
    }

    /// The interval tiling of `Z` whose letter sizes equal those of the lamplighter tiling.
    pub fn z_matched_to_lamplighter(m: u32) -> Result<Self> {
        let ll = Self::lamplighter(m)?;
        let sizes = (0..=ll.max_depth()).map(|k| ll.letter_size(k).unwrap()).collect();
        Self::z_mixed_radix(format!("zmatched:ll:{m}"), sizes)
    }

    pub fn explicit(
        name: impl Into<String>,
        group: GroupDescriptor,
        orientation: Orientation,
        letters: Vec<Vec<GroupElement>>,
    ) -> Result<Self> {
        if letters.is_empty() || letters.iter().any(|f| f.is_empty()) {
            return usage("explicit tilings need nonempty letter sets");
        }
        for g in letters.iter().flatten() {
            group.check(g)?;
        }
        Ok(Self::from_rule(
            name.into(),
            group,
            orientation,
            LetterRule::Explicit { letters },
        ))
    }

    /// Parses `zn:N`, `zn:N:grouped:M`, `heis`, `ll:M` or `zmatched:ll:M`.
    pub fn builtin(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.trim().split(':').collect();
        let int = |s: &str| -> Result<u32> {
            s.parse::<u32>()
                .or_else(|_| usage(format!("bad integer {s:?} in tiling spec {spec:?}")))
        };
        match parts[..] {
            ["zn", n] => Self::zn(int(n)? as usize, 1),
            ["zn", n, "grouped", g] => Self::zn(int(n)? as usize, int(g)?),
            ["heis"] => Ok(Self::heisenberg()),
            ["ll", m] => Self::lamplighter(int(m)?),
            ["zmatched", "ll", m] => Self::z_matched_to_lamplighter(int(m)?),
            _ => usage(format!(
                "unknown tiling {spec:?}; expected zn:N, zn:N:grouped:M, heis, ll:M or zmatched:ll:M"
            )),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn rule(&self) -> &LetterRule {
        &self.rule
    }

    /// `|F_k|`, or `None` past the representable range.
    pub fn letter_size(&self, k: usize) -> Option<u128> {
        rules::letter_size(&self.rule, k)
    }

    /// `|T_k| = ∏_{i≤k} |F_i|`, or `None` past the representable range.
    pub fn tile_size(&self, k: usize) -> Option<u128> {
        let mut total: u128 = 1;
        for i in 0..=k {
            total = total.checked_mul(self.letter_size(i)?)?;
            if total > MAX_TILE {
                return None;
            }
        }
        Some(total)
    }

    /// Deepest level whose tile size is representable.
    pub fn max_depth(&self) -> usize {
        let mut k = 0;
        while k < 126 && self.tile_size(k + 1).is_some() {
            k += 1;
        }
        k
    }

    /// The letter of `F_k` with index `idx`.
    pub fn letter(&self, k: usize, idx: u128) -> GroupElement {
        rules::letter(&self.rule, k, idx)
    }

    /// Appends letter `f` of level `k` to a level `k-1` prefix product.
    pub fn extend(&self, prefix: &GroupElement, f: &GroupElement) -> GroupElement {
        match self.orientation {
            Orientation::Left => self.group.mul(prefix, f),
            Orientation::Right => self.group.mul(f, prefix),
        }
    }

    /// `g_k = f_0 ⋯ f_k` (left) or `f_k ⋯ f_0` (right).
    pub fn product(&self, indices: &[u128]) -> GroupElement {
        indices
            .iter()
            .enumerate()
            .fold(self.group.identity(), |acc, (k, &i)| self.extend(&acc, &self.letter(k, i)))
    }

    /// Image of a tile element under the action of `γ`: `γ t` (left) or `t γ^{-1}` (right).
    pub fn translate(&self, gamma: &GroupElement, t: &GroupElement) -> GroupElement {
        match self.orientation {
            Orientation::Left => self.group.mul(gamma, t),
            Orientation::Right => self.group.mul(t, &self.group.inv(gamma)),
        }
    }

    /// The letter indices `(i_0, …, i_k)` with `product = g`.
    pub fn decode(&self, g: &GroupElement, k: usize) -> Result<Vec<u128>> {
        if let LetterRule::Explicit { .. } = self.rule {
            let table = self.decode_table(k)?;
            return table.get(g).cloned().ok_or(Error::NotInTile { k });
        }
        rules::decode(&self.rule, g, k).ok_or(Error::NotInTile { k })
    }

    pub fn contains(&self, g: &GroupElement, k: usize) -> bool {
        self.decode(g, k).is_ok()
    }

    fn decode_table(&self, k: usize) -> Result<DecodeTable> {
        if let Some(t) = self.memo.lock().expect("decode memo poisoned").get(&k) {
            return Ok(t.clone());
        }
        let size = self.tile_size(k).ok_or(Error::ResourceExhausted {
            what: "explicit decode table".into(),
            reached: k as u64,
        })?;
        if size > self.group.budget().max_items(256) as u128 {
            return Err(Error::ResourceExhausted {
                what: "explicit decode table".into(),
                reached: k as u64,
            });
        }
        let mut table = HashMap::with_capacity(size as usize);
        for flat in 0..size {
            let idx = self.unflatten(flat, k);
            let g = self.product(&idx);
            if let Some(prev) = table.insert(g, idx.clone()) {
                return Err(self.violation(k, &prev, &idx));
            }
        }
        let table = Arc::new(table);
        self.memo
            .lock()
            .expect("decode memo poisoned")
            .insert(k, table.clone());
        Ok(table)
    }

    pub(crate) fn violation(&self, k: usize, a: &[u128], b: &[u128]) -> Error {
        let show = |idx: &[u128]| {
            idx.iter()
                .enumerate()
                .map(|(j, &i)| self.group.format_element(&self.letter(j, i)))
                .collect::<Vec<_>>()
                .join(" * ")
        };
        Error::TilingViolation {
            k,
            first: show(a),
            second: show(b),
        }
    }

    /// Mixed-radix expansion of a flat index into letter indices `0..=k`.
    pub fn unflatten(&self, mut flat: u128, k: usize) -> Vec<u128> {
        (0..=k)
            .map(|j| {
                let s = self.letter_size(j).expect("level within range");
                let i = flat % s;
                flat /= s;
                i
            })
            .collect()
    }

    /// The parameter `ε_k` stated for the builtin tilings.
    pub fn claimed_epsilon(&self, k: usize) -> Option<Rational> {
        let pow2 = |e: u64| -> Option<i128> { 1i128.checked_shl(u32::try_from(e).ok()?) };
        match &self.rule {
            LetterRule::ZnDyadic { grouping, .. } => {
                Some(Rational::new(1, pow2(*grouping as u64 * (k as u64 + 1))?))
            }
            LetterRule::Heisenberg => Some(Rational::new(1, pow2(k as u64)?)),
            LetterRule::Lamplighter { .. } => Some(Rational::new(1, pow2(k as u64 + 1)?)),
            LetterRule::MixedRadix { .. } => {
                Some(Rational::new(2, i128::try_from(self.tile_size(k)?).ok()?))
            }
            LetterRule::Explicit { .. } => None,
        }
    }

    /// The diameter bound `R_k` stated for the builtin tilings.
    pub fn claimed_radius(&self, k: usize) -> Option<u128> {
        match &self.rule {
            LetterRule::ZnDyadic { n, grouping } => {
                (*n as u128).checked_mul(1u128.checked_shl(grouping * (k as u32 + 1))?)
            }
            LetterRule::Heisenberg => 10u128.checked_mul(1u128.checked_shl(k as u32 + 2)?),
            LetterRule::Lamplighter { m } => (*m as u128 + 1).checked_mul(1u128.checked_shl(k as u32 + 1)?),
            LetterRule::MixedRadix { .. } => Some(self.tile_size(k)? - 1),
            LetterRule::Explicit { .. } => None,
        }
    }
}
