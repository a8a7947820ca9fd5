//! Exact fraction arithmetic for the density calculus.
//!
//! Every density comparison in this crate (notably anything tested against
//! -epsilon) must be exact, so all of them go through `Rat`. i128 limbs leave
//! enormous headroom: numerators and denominators that show up here are
//! bounded by small polynomials in r, ell and the host size (<= 64 vertices).

use serde::{Deserialize, Serialize};

pub type Rat = num_rational::Ratio<i128>;

/// `n/d` in lowest terms with a positive denominator.
pub fn rat(n: i128, d: i128) -> Rat {
    Rat::new(n, d)
}

pub fn rat_int(n: i128) -> Rat {
    Rat::from_integer(n)
}

/// Binomial coefficient, exact. Only needed for tiny arguments.
pub fn binom(n: u64, k: u64) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc
}

/// Smallest integer c with 2^c >= n (n >= 1).
pub fn ceil_log2(n: u64) -> u32 {
    assert!(n >= 1, "ceil_log2 needs n >= 1");
    if n == 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// Exact comparison `k >= log2(n)` for an integer k >= 0 and n >= 1.
pub fn int_at_least_log2(k: u64, n: u64) -> bool {
    if k >= 64 {
        return true;
    }
    (1u128 << k) >= n as u128
}

/// JSON form of a rational: `{"num": ..., "den": ...}` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatJson {
    pub num: i64,
    pub den: i64,
}

impl From<Rat> for RatJson {
    fn from(r: Rat) -> Self {
        let num = i64::try_from(*r.numer()).expect("rational numerator exceeds i64");
        let den = i64::try_from(*r.denom()).expect("rational denominator exceeds i64");
        RatJson { num, den }
    }
}

impl From<RatJson> for Rat {
    fn from(r: RatJson) -> Self {
        rat(r.num as i128, r.den as i128)
    }
}

pub fn rat_to_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
