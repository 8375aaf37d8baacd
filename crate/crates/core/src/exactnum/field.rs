use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, ToPrimitive, Zero};

use super::{is_prime, Integer, Rational};
use crate::error::{Error, Result};

/// Characteristic of a coefficient field: `0` for the rationals or a prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Characteristic {
    Zero,
    Prime(u64),
}

impl Characteristic {
    pub fn prime(p: u64) -> Result<Self> {
        PrimeField::new(p).map(|f| Characteristic::Prime(f.modulus()))
    }

    pub fn as_u64(self) -> u64 {
        match self {
            Characteristic::Zero => 0,
            Characteristic::Prime(p) => p,
        }
    }
}

impl fmt::Display for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u64())
    }
}

impl FromStr for Characteristic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n: u64 = s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("characteristic `{s}` is not an integer")))?;
        if n == 0 {
            Ok(Characteristic::Zero)
        } else {
            Characteristic::prime(n)
        }
    }
}

/// A coefficient field with exact arithmetic.
///
/// Elements are plain values; the field object carries whatever context the
/// arithmetic needs (the modulus for prime fields).
pub trait Field: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    type Elem: Clone
        + PartialEq
        + Eq
        + Hash
        + Ord
        + fmt::Debug
        + fmt::Display
        + Send
        + Sync
        + 'static;

    fn characteristic(&self) -> Characteristic;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn from_integer(&self, n: &Integer) -> Self::Elem;
    /// Image of a rational number, `None` when its denominator vanishes.
    fn from_rational(&self, q: &Rational) -> Option<Self::Elem>;
    /// Size measure used for coefficient-growth budgets.
    fn bit_size(&self, a: &Self::Elem) -> u64;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn from_i64(&self, n: i64) -> Self::Elem {
        self.from_integer(&BigInt::from(n))
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn name(&self) -> String {
        match self.characteristic() {
            Characteristic::Zero => "QQ".to_string(),
            Characteristic::Prime(p) => format!("GF({p})"),
        }
    }
}

/// The rational numbers, with elements kept in lowest terms.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = Rational;

    fn characteristic(&self) -> Characteristic {
        Characteristic::Zero
    }
    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        a - b
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn neg(&self, a: &Rational) -> Rational {
        -a
    }
    fn inv(&self, a: &Rational) -> Option<Rational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn from_integer(&self, n: &Integer) -> Rational {
        Rational::from_integer(n.clone())
    }
    fn from_rational(&self, q: &Rational) -> Option<Rational> {
        Some(q.clone())
    }
    fn bit_size(&self, a: &Rational) -> u64 {
        a.numer().bits().max(a.denom().bits())
    }
    fn is_one(&self, a: &Rational) -> bool {
        a.is_one()
    }
}

/// The prime field `F_p` for a word-sized prime `p < 2^63`.
///
/// Elements are canonical representatives in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub const MAX_MODULUS: u64 = 1 << 63;

    pub fn new(p: u64) -> Result<Self> {
        if p >= Self::MAX_MODULUS {
            return Err(Error::unsupported(format!(
                "prime field modulus {p} does not fit the word-sized field arithmetic"
            )));
        }
        if !is_prime(&Integer::from(p)) {
            return Err(Error::invalid(format!("{p} is not a prime")));
        }
        Ok(PrimeField { p })
    }

    pub fn from_integer_modulus(p: &Integer) -> Result<Self> {
        match p.to_u64() {
            Some(p) => Self::new(p),
            None => Err(Error::unsupported(format!(
                "prime field modulus {p} does not fit the word-sized field arithmetic"
            ))),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn reduce_u128(&self, x: u128) -> u64 {
        (x % self.p as u128) as u64
    }

    fn reduce_big(&self, n: &Integer) -> u64 {
        let r = n.mod_floor(&Integer::from(self.p));
        r.to_u64().expect("residue fits in u64")
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn characteristic(&self) -> Characteristic {
        Characteristic::Prime(self.p)
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    #[inline]
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        if self.p < 1 << 32 {
            return a * b % self.p;
        }
        self.reduce_u128(*a as u128 * *b as u128)
    }
    #[inline]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        // extended Euclid on signed 128-bit values
        let (mut r0, mut r1) = (self.p as i128, *a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Some(t0.rem_euclid(self.p as i128) as u64)
    }
    fn from_integer(&self, n: &Integer) -> u64 {
        match n.to_i64() {
            Some(v) => v.rem_euclid(self.p as i64) as u64,
            None => self.reduce_big(n),
        }
    }
    fn from_i64(&self, n: i64) -> u64 {
        (n as i128).rem_euclid(self.p as i128) as u64
    }
    fn from_rational(&self, q: &Rational) -> Option<u64> {
        let den = self.from_integer(q.denom());
        let inv = self.inv(&den)?;
        Some(self.mul(&self.from_integer(q.numer()), &inv))
    }
    fn bit_size(&self, _a: &u64) -> u64 {
        64 - self.p.leading_zeros() as u64
    }
    fn is_one(&self, a: &u64) -> bool {
        *a == 1
    }
}
