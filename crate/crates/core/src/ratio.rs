//! Exact non-negative rationals for certified ratios such as `max ρ/d`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u128,
    pub den: u128,
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn big(x: u128) -> BigUint {
    BigUint::from(x)
}

/// `a * b` compared with `c * d`, falling back to big integers on overflow.
fn cmp_products(a: u128, b: u128, c: u128, d: u128) -> Ordering {
    match (a.checked_mul(b), c.checked_mul(d)) {
        (Some(x), Some(y)) => x.cmp(&y),
        _ => (big(a) * big(b)).cmp(&(big(c) * big(d))),
    }
}

impl Ratio {
    pub const ONE: Ratio = Ratio { num: 1, den: 1 };
    pub const ZERO: Ratio = Ratio { num: 0, den: 1 };

    pub fn new(num: u128, den: u128) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd(num, den).max(1);
        Self {
            num: num / g,
            den: den / g,
        }
    }

    pub fn integer(x: u128) -> Self {
        Self { num: x, den: 1 }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Whether `x <= (c·self + b)·y`, exactly.
    pub fn affine_bound_holds(self, c: u128, b: u128, x: u128, y: u128) -> bool {
        // x·den <= (c·num + b·den)·y
        let lhs = big(x) * big(self.den);
        let rhs = (big(c) * big(self.num) + big(b) * big(self.den)) * big(y);
        lhs <= rhs
    }

    /// `⌈self · x⌉`, saturating at `u128::MAX`.
    pub fn ceil_mul(self, x: u128) -> u128 {
        let p = big(self.num) * big(x);
        let q = big(self.den);
        let r: BigUint = (p + &q - 1u32) / q;
        u128::try_from(r).unwrap_or(u128::MAX)
    }

    pub fn max(self, other: Ratio) -> Ratio {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl PartialEq for Ratio {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ratio {}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_products(self.num, other.den, other.num, self.den)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}
