/// Element `(f, n)` of `Z/m ≀ Z`: finitely many lit lamps and a cursor.
///
/// Lamps are kept sorted by position with no zero values, so derived
/// equality and hashing are equality and hashing of group elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LampElement {
    lamps: Vec<(i64, u32)>,
    cursor: i64,
}

impl LampElement {
    pub fn identity() -> Self {
        LampElement {
            lamps: Vec::new(),
            cursor: 0,
        }
    }

    /// Builds an element from arbitrary `(position, value)` pairs, reducing mod `m`
    /// and summing repeated positions.
    pub fn new(m: u32, lamps: impl IntoIterator<Item = (i64, i64)>, cursor: i64) -> Self {
        let mut v: Vec<(i64, i64)> = lamps.into_iter().collect();
        v.sort_unstable_by_key(|p| p.0);
        let mut out: Vec<(i64, u32)> = Vec::with_capacity(v.len());
        for (pos, val) in v {
            let r = val.rem_euclid(m as i64) as u32;
            match out.last_mut() {
                Some(last) if last.0 == pos => last.1 = (last.1 + r) % m,
                _ => out.push((pos, r)),
            }
        }
        out.retain(|p| p.1 != 0);
        LampElement { lamps: out, cursor }
    }

    pub(crate) fn from_sorted(lamps: Vec<(i64, u32)>, cursor: i64) -> Self {
        debug_assert!(lamps.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(lamps.iter().all(|p| p.1 != 0));
        LampElement { lamps, cursor }
    }

    pub fn lamps(&self) -> &[(i64, u32)] {
        &self.lamps
    }

    pub fn cursor(&self) -> i64 {
        self.cursor
    }

    pub fn lamp(&self, pos: i64) -> u32 {
        self.lamps
            .binary_search_by_key(&pos, |p| p.0)
            .map(|i| self.lamps[i].1)
            .unwrap_or(0)
    }

    /// `(f, n)(g, k) = (f + g(· − n), n + k)`.
    pub fn mul(&self, other: &Self, m: u32) -> Self {
        let shift = self.cursor;
        let mut out = Vec::with_capacity(self.lamps.len() + other.lamps.len());
        let (mut i, mut j) = (0, 0);
        let a = &self.lamps;
        let b = &other.lamps;
        while i < a.len() || j < b.len() {
            let pa = a.get(i).map(|p| p.0);
            let pb = b.get(j).map(|p| p.0 + shift);
            match (pa, pb) {
                (Some(x), Some(y)) if x == y => {
                    let v = (a[i].1 + b[j].1) % m;
                    if v != 0 {
                        out.push((x, v));
                    }
                    i += 1;
                    j += 1;
                }
                (Some(x), Some(y)) if x < y => {
                    out.push(a[i]);
                    i += 1;
                }
                (Some(_), Some(y)) => {
                    out.push((y, b[j].1));
                    j += 1;
                }
                (Some(_), None) => {
                    out.push(a[i]);
                    i += 1;
                }
                (None, Some(y)) => {
                    out.push((y, b[j].1));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        LampElement {
            lamps: out,
            cursor: self.cursor + other.cursor,
        }
    }

    pub fn inverse(&self, m: u32) -> Self {
        let lamps = self
            .lamps
            .iter()
            .map(|&(p, v)| (p - self.cursor, m - v))
            .collect();
        LampElement {
            lamps,
            cursor: -self.cursor,
        }
    }

    /// Exact word length for the generators `(δ₀)^{±1}` and `(0, ±1)`:
    /// switch presses plus the shorter of the left-first and right-first sweeps.
    pub fn word_length(&self, m: u32) -> u64 {
        let presses: u64 = self
            .lamps
            .iter()
            .map(|&(_, v)| v.min(m - v) as u64)
            .sum();
        let n = self.cursor;
        let lo = self.lamps.first().map_or(0, |p| p.0).min(0).min(n);
        let hi = self.lamps.last().map_or(0, |p| p.0).max(0).max(n);
        let left_first = -lo + (hi - lo) + (hi - n);
        let right_first = hi + (hi - lo) + (n - lo);
        presses + left_first.min(right_first) as u64
    }
}
