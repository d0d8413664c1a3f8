/// Element `(a / k^s, n)` of `BS(1,k) = Z[1/k] ⋊ Z` in reduced form:
/// `s ≥ 0`, and `k ∤ a` whenever `s > 0`; zero is stored as `a = 0, s = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BsElement {
    a: i128,
    s: u32,
    n: i64,
}

fn pow(k: u32, e: u32) -> i128 {
    (k as i128)
        .checked_pow(e)
        .expect("BS(1,k) arithmetic left the 128-bit range")
}

fn checked(v: Option<i128>) -> i128 {
    v.expect("BS(1,k) arithmetic left the 128-bit range")
}

impl BsElement {
    pub fn identity() -> Self {
        BsElement { a: 0, s: 0, n: 0 }
    }

    pub fn new(k: u32, a: i128, s: u32, n: i64) -> Self {
        let (mut a, mut s) = (a, s);
        let kk = k as i128;
        if a == 0 {
            s = 0;
        }
        while s > 0 && a % kk == 0 {
            a /= kk;
            s -= 1;
        }
        BsElement { a, s, n }
    }

    /// Builds `(a · k^e, n)` for a possibly negative exponent `e`.
    pub fn from_scaled(k: u32, a: i128, e: i64, n: i64) -> Self {
        if e >= 0 {
            BsElement::new(k, checked(a.checked_mul(pow(k, e as u32))), 0, n)
        } else {
            BsElement::new(k, a, (-e) as u32, n)
        }
    }

    pub fn numerator(&self) -> i128 {
        self.a
    }

    pub fn scale(&self) -> u32 {
        self.s
    }

    pub fn shift(&self) -> i64 {
        self.n
    }

    /// `(x, n)(y, m) = (x + y / k^n, n + m)`.
    pub fn mul(&self, other: &Self, k: u32) -> Self {
        let e2 = other.s as i64 + self.n;
        let common = (self.s as i64).max(e2).max(0);
        let t1 = checked(self.a.checked_mul(pow(k, (common - self.s as i64) as u32)));
        let t2 = checked(other.a.checked_mul(pow(k, (common - e2) as u32)));
        BsElement::new(k, checked(t1.checked_add(t2)), common as u32, self.n + other.n)
    }

    pub fn inverse(&self, k: u32) -> Self {
        BsElement::from_scaled(k, -self.a, self.n - self.s as i64, -self.n)
    }
}
