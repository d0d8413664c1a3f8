use super::LetterRule;
use crate::group::{GroupElement, LampElement};

pub(super) fn letter_size(rule: &LetterRule, k: usize) -> Option<u128> {
    match rule {
        LetterRule::ZnDyadic { n, grouping } => 1u128.checked_shl(grouping * *n as u32),
        LetterRule::Heisenberg => Some(16),
        LetterRule::Lamplighter { m } => {
            let m = *m as u128;
            if k == 0 {
                Some(2 * m * m)
            } else {
                let width = 1u32.checked_shl(k as u32)?;
                m.checked_pow(width)?.checked_mul(2)
            }
        }
        LetterRule::MixedRadix { sizes } => sizes.get(k).copied(),
        LetterRule::Explicit { letters } => letters.get(k).map(|f| f.len() as u128),
    }
}

fn mixed_offset(sizes: &[u128], k: usize) -> u128 {
    sizes[..k].iter().product()
}

pub(super) fn letter(rule: &LetterRule, k: usize, idx: u128) -> GroupElement {
    match rule {
        LetterRule::ZnDyadic { n, grouping } => {
            let g = *grouping;
            let mask = (1u128 << g) - 1;
            GroupElement::Zn(
                (0..*n)
                    .map(|j| (((idx >> (g * j as u32)) & mask) as i128) << (g * k as u32))
                    .collect(),
            )
        }
        LetterRule::Heisenberg => {
            let x = (idx & 1) as i128;
            let y = ((idx >> 1) & 1) as i128;
            let z = (idx >> 2) as i128;
            GroupElement::Heis([x << k, y << k, z << (2 * k)])
        }
        LetterRule::Lamplighter { m } => {
            let mm = *m as u128;
            if k == 0 {
                let f0 = (idx % mm) as i64;
                let f1 = ((idx / mm) % mm) as i64;
                let n = (idx / (mm * mm)) as i64;
                GroupElement::Lamp(LampElement::new(*m, [(0, f0), (1, f1)], n))
            } else {
                let width = 1i64 << k;
                let half = mm.pow(width as u32);
                let branch = idx / half;
                let mut r = idx % half;
                let (base, cursor) = if branch == 0 { (width, 0) } else { (0, width) };
                let mut lamps = Vec::new();
                for i in 0..width {
                    let v = (r % mm) as i64;
                    r /= mm;
                    if v != 0 {
                        lamps.push((base + i, v));
                    }
                }
                GroupElement::Lamp(LampElement::new(*m, lamps, cursor))
            }
        }
        LetterRule::MixedRadix { sizes } => {
            GroupElement::Zn(vec![(idx * mixed_offset(sizes, k)) as i128])
        }
        LetterRule::Explicit { letters } => letters[k][idx as usize].clone(),
    }
}

/// Digit extraction for the structured rules; `None` when `g ∉ T_k`.
/// Explicit rules are decoded through a memo table by the caller.
pub(super) fn decode(rule: &LetterRule, g: &GroupElement, k: usize) -> Option<Vec<u128>> {
    match (rule, g) {
        (LetterRule::ZnDyadic { n, grouping }, GroupElement::Zn(v)) if v.len() == *n => {
            let gr = *grouping;
            let bound = 1i128 << (gr * (k as u32 + 1));
            if v.iter().any(|&c| c < 0 || c >= bound) {
                return None;
            }
            let mask = (1i128 << gr) - 1;
            Some(
                (0..=k)
                    .map(|i| {
                        v.iter().enumerate().fold(0u128, |acc, (j, &c)| {
                            let digit = ((c >> (gr * i as u32)) & mask) as u128;
                            acc | (digit << (gr * j as u32))
                        })
                    })
                    .collect(),
            )
        }
        (LetterRule::Heisenberg, GroupElement::Heis([x, y, z])) => {
            let side = 1i128 << (k + 1);
            if *x < 0 || *x >= side || *y < 0 || *y >= side {
                return None;
            }
            let w = z - heis_cross(*x, *y);
            if w < 0 || w >= 1i128 << (2 * (k + 1)) {
                return None;
            }
            Some(
                (0..=k)
                    .map(|i| {
                        let xi = (x >> i) & 1;
                        let yi = (y >> i) & 1;
                        let zi = (w >> (2 * i)) & 3;
                        (xi + 2 * yi + 4 * zi) as u128
                    })
                    .collect(),
            )
        }
        (LetterRule::Lamplighter { m }, GroupElement::Lamp(l)) => decode_lamplighter(*m, l, k),
        (LetterRule::MixedRadix { sizes }, GroupElement::Zn(v)) if v.len() == 1 => {
            if k >= sizes.len() {
                return None;
            }
            let total: u128 = sizes[..=k].iter().product();
            if v[0] < 0 || v[0] as u128 >= total {
                return None;
            }
            let mut r = v[0] as u128;
            Some(
                sizes[..=k]
                    .iter()
                    .map(|&s| {
                        let i = r % s;
                        r /= s;
                        i
                    })
                    .collect(),
            )
        }
        _ => None,
    }
}

/// `Σ_j 2^j x_j · (y mod 2^j)`, the `z`-offset of `f_0 ⋯ f_k` in the Heisenberg tiling.
pub(crate) fn heis_cross(x: i128, y: i128) -> i128 {
    let mut acc = 0i128;
    let mut j = 0;
    while (x >> j) > 0 {
        if (x >> j) & 1 == 1 {
            acc += (1i128 << j) * (y & ((1i128 << j) - 1));
        }
        j += 1;
    }
    acc
}

fn decode_lamplighter(m: u32, l: &LampElement, k: usize) -> Option<Vec<u128>> {
    let width = 1i64 << (k + 1);
    if l.cursor() < 0 || l.cursor() >= width {
        return None;
    }
    if l.lamps().iter().any(|&(p, _)| p < 0 || p >= width) {
        return None;
    }
    let mm = m as u128;
    let mut lamps: Vec<(i64, u32)> = l.lamps().to_vec();
    let mut cursor = l.cursor();
    let mut out = vec![0u128; k + 1];
    for level in (1..=k).rev() {
        let w = 1i64 << level;
        let digits = |lo: i64, lamps: &[(i64, u32)]| -> u128 {
            lamps
                .iter()
                .filter(|&&(p, _)| p >= lo && p < lo + w)
                .fold(0u128, |acc, &(p, v)| acc + v as u128 * mm.pow((p - lo) as u32))
        };
        if cursor < w {
            out[level] = digits(w, &lamps);
            lamps.retain(|&(p, _)| p < w);
        } else {
            out[level] = mm.pow(w as u32) + digits(0, &lamps);
            lamps = lamps
                .into_iter()
                .filter(|&(p, _)| p >= w)
                .map(|(p, v)| (p - w, v))
                .collect();
            cursor -= w;
        }
    }
    let f = |p: i64| lamps.iter().find(|q| q.0 == p).map_or(0, |q| q.1 as u128);
    out[0] = f(0) + mm * f(1) + mm * mm * cursor as u128;
    Some(out)
}
