//! Exact integer, rational and prime-field arithmetic.
//!
//! Arbitrary precision integers and rationals come from `num-bigint` and
//! `num-rational`; this module adds the number theory the verification
//! pipeline needs: p-adic valuations, digit sums, binomial coefficients,
//! primality and factorization.

mod field;
mod primes;

pub use field::{Characteristic, Field, PrimeField, Rationals};
pub use primes::{factor, is_prime, primality, FactorEffort, Factorization, Primality};

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Integer = BigInt;
pub type Rational = num_rational::BigRational;

/// A p-adic valuation: a nonnegative integer or `+∞` (only for zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(u64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "+inf"),
        }
    }
}

fn require_prime(p: &Integer) -> Result<()> {
    if p.sign() != Sign::Plus || !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not a prime")));
    }
    Ok(())
}

/// `v_p(n)`, the exponent of `p` in `n`; `+∞` for `n = 0`.
pub fn vp_int(n: &Integer, p: &Integer) -> Result<Valuation> {
    require_prime(p)?;
    if n.is_zero() {
        return Ok(Valuation::Infinite);
    }
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return Ok(Valuation::Finite(v));
        }
        m = q;
        v += 1;
    }
}

/// Sum of the base-`p` digits of `n`.
pub fn digit_sum(n: &Integer, p: &Integer) -> Result<Integer> {
    require_prime(p)?;
    if n.is_negative() {
        return Err(Error::invalid(format!("digit sum of negative {n}")));
    }
    let mut m = n.clone();
    let mut s = Integer::zero();
    while !m.is_zero() {
        let (q, r) = m.div_rem(p);
        s += r;
        m = q;
    }
    Ok(s)
}

/// `v_p(C(n, j))` through Legendre's digit-sum formula.
pub fn vp_binomial(n: &Integer, j: &Integer, p: &Integer) -> Result<u64> {
    require_prime(p)?;
    if j.is_negative() || j > n {
        return Err(Error::invalid(format!(
            "binomial index {j} outside 0..={n}"
        )));
    }
    let carries = digit_sum(j, p)? + digit_sum(&(n - j), p)? - digit_sum(n, p)?;
    let (v, r) = carries.div_rem(&(p - 1u32));
    debug_assert!(r.is_zero() && !v.is_negative());
    Ok(u64::try_from(&v).expect("valuation of a binomial fits in u64"))
}

/// Exact binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> Integer {
    if k > n {
        return Integer::zero();
    }
    let k = k.min(n - k);
    let mut acc = Integer::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n, k)` as a `u128`, or `None` on overflow.
pub fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        // acc * (n - i) is divisible by (i + 1) since acc = C(n, i).
        let g = num_integer::gcd(acc, i + 1);
        let num = (n as u128 - i) / ((i + 1) / g);
        acc = (acc / g).checked_mul(num)?;
    }
    Some(acc)
}
