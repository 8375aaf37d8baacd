//! Primality testing and integer factorization.
//!
//! Miller-Rabin is deterministic below 2^64 (fixed base set) and uses 64
//! pseudo-random rounds above, seeded from the input so that results are
//! reproducible. Factorization is trial division followed by Pollard-Brent
//! rho under an iteration budget; anything left over is reported as a
//! residue instead of being dropped.

use std::sync::OnceLock;

use num_bigint::{BigUint, RandBigInt, Sign};
use num_integer::Integer as _;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Integer;

const TRIAL_LIMIT: u32 = 1_000_000;
const MR_BASES_64: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
const MR_ROUNDS_BIG: usize = 64;

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_LIMIT as usize;
        let mut composite = vec![false; n + 1];
        let mut primes = Vec::new();
        for i in 2..=n {
            if !composite[i] {
                primes.push(i as u32);
                let mut j = i * i;
                while j <= n {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        primes
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Primality {
    Composite,
    /// Proven prime (deterministic test).
    Prime,
    /// Passed 64 random Miller-Rabin rounds; error probability below 2^-128.
    ProbablePrime,
}

#[inline]
fn mulmod(a: u64, b: u64, n: u64) -> u64 {
    (a as u128 * b as u128 % n as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, n: u64) -> u64 {
    let mut acc = 1 % n;
    a %= n;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, n);
        }
        a = mulmod(a, a, n);
        e >>= 1;
    }
    acc
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES_64 {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'base: for &a in &MR_BASES_64 {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

fn seeded_rng(n: &BigUint) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    for (i, b) in n.to_bytes_le().iter().enumerate() {
        seed[i % 32] ^= b.rotate_left((i / 32) as u32);
    }
    ChaCha8Rng::from_seed(seed)
}

fn is_probable_prime_big(n: &BigUint) -> bool {
    for &p in small_primes().iter().take(200) {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    let two = BigUint::from(2u32);
    let mut rng = seeded_rng(n);
    'round: for _ in 0..MR_ROUNDS_BIG {
        let a = rng.gen_biguint_range(&two, &n1);
        let mut x = a.modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n1 {
                continue 'round;
            }
        }
        return false;
    }
    true
}

/// Classifies `n` as composite, proven prime (`n < 2^64`) or probable prime.
pub fn primality(n: &Integer) -> Primality {
    if n.sign() != Sign::Plus {
        return Primality::Composite;
    }
    if let Some(v) = n.to_u64() {
        return if is_prime_u64(v) {
            Primality::Prime
        } else {
            Primality::Composite
        };
    }
    let m = n.magnitude();
    if is_probable_prime_big(m) {
        Primality::ProbablePrime
    } else {
        Primality::Composite
    }
}

pub fn is_prime(n: &Integer) -> bool {
    primality(n) != Primality::Composite
}

/// Work limits for [`factor`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorEffort {
    /// Total Pollard-Brent iterations allowed per composite cofactor.
    pub rho_iterations: u64,
}

impl Default for FactorEffort {
    fn default() -> Self {
        FactorEffort {
            rho_iterations: 20_000_000,
        }
    }
}

/// Result of [`factor`]: `n = residue * prod(p^e)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    /// Prime factors in increasing order.
    pub factors: Vec<(Integer, u32)>,
    /// Product of cofactors that could not be split within the effort bound.
    pub residue: Option<Integer>,
    /// Some factor above 2^64 is only a probable prime.
    pub probabilistic: bool,
}

impl Factorization {
    pub fn is_complete(&self) -> bool {
        self.residue.is_none()
    }

    pub fn primes(&self) -> impl Iterator<Item = &Integer> {
        self.factors.iter().map(|(p, _)| p)
    }

    pub fn product(&self) -> Integer {
        let mut acc = self.residue.clone().unwrap_or_else(Integer::one);
        for (p, e) in &self.factors {
            acc *= num_traits::pow(p.clone(), *e as usize);
        }
        acc
    }
}

fn brent_u64(n: u64, c: u64, budget: &mut u64) -> Option<u64> {
    const BATCH: u64 = 128;
    let f = |y: u64| (mulmod(y, y, n) + c) % n;
    let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
    let mut x;
    let mut ys = y;
    let mut g = 1u64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            let m = BATCH.min(r - k);
            for _ in 0..m {
                y = f(y);
                q = mulmod(q, x.abs_diff(y), n);
            }
            g = num_integer::gcd(q, n);
            k += m;
            if *budget < m {
                return None;
            }
            *budget -= m;
        }
        r *= 2;
        if g == 1 {
            continue;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = num_integer::gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
    }
    (g != n).then_some(g)
}

fn brent_big(n: &BigUint, c: u64, budget: &mut u64) -> Option<BigUint> {
    const BATCH: u64 = 128;
    let c = BigUint::from(c);
    let f = |y: &BigUint| (y * y + &c) % n;
    let one = BigUint::one();
    let mut y = BigUint::from(2u32);
    let mut r = 1u64;
    let mut q = BigUint::one();
    let mut x = y.clone();
    let mut ys = y.clone();
    let mut g = one.clone();
    let absdiff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    while g == one {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g == one {
            ys = y.clone();
            let m = BATCH.min(r - k);
            for _ in 0..m {
                y = f(&y);
                q = (q * absdiff(&x, &y)) % n;
            }
            g = q.gcd(n);
            k += m;
            if *budget < m {
                return None;
            }
            *budget -= m;
        }
        r *= 2;
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = absdiff(&x, &ys).gcd(n);
            if g > one {
                break;
            }
        }
    }
    (&g != n).then_some(g)
}

/// Finds a nontrivial divisor of the composite `n` or gives up.
fn split(n: &BigUint, effort: FactorEffort) -> Option<BigUint> {
    // perfect powers defeat rho
    let bits = n.bits();
    for k in 2..=bits.max(2) as u32 {
        let root = n.nth_root(k);
        if root <= BigUint::one() {
            break;
        }
        if num_traits::pow(root.clone(), k as usize) == *n {
            return Some(root);
        }
    }
    let mut budget = effort.rho_iterations;
    for c in 1..u64::MAX {
        if budget == 0 {
            return None;
        }
        let found = match n.to_u64() {
            Some(v) => brent_u64(v, c, &mut budget).map(BigUint::from),
            None => brent_big(n, c, &mut budget),
        };
        if let Some(d) = found {
            return Some(d);
        }
    }
    None
}

/// Factors `|n|` for `|n| > 1` by trial division up to 10^6 and then
/// Pollard-Brent rho. Cofactors that resist within `effort` are returned
/// as a flagged residue.
pub fn factor(n: &Integer, effort: FactorEffort) -> Factorization {
    let mut out = Factorization::default();
    let mut m = n.magnitude().clone();
    if m <= BigUint::one() {
        return out;
    }
    let mut found: Vec<(BigUint, u32)> = Vec::new();
    for &p in small_primes() {
        let p = p as u64;
        if BigUint::from(p * p) > m {
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = m.div_rem(&BigUint::from(p));
            if !r.is_zero() {
                break;
            }
            m = q;
            e += 1;
        }
        if e > 0 {
            found.push((BigUint::from(p), e));
        }
    }
    let mut residue = BigUint::one();
    let mut stack = Vec::new();
    if m > BigUint::one() {
        stack.push(m);
    }
    while let Some(c) = stack.pop() {
        match primality(&Integer::from(c.clone())) {
            Primality::Prime => found.push((c, 1)),
            Primality::ProbablePrime => {
                out.probabilistic = true;
                found.push((c, 1));
            }
            Primality::Composite => match split(&c, effort) {
                Some(d) => {
                    let other = &c / &d;
                    stack.push(d);
                    stack.push(other);
                }
                None => residue *= c,
            },
        }
    }
    found.sort();
    for (p, e) in found {
        match out.factors.last_mut() {
            Some((q, f)) if *q.magnitude() == p => *f += e,
            _ => out.factors.push((Integer::from(p), e)),
        }
    }
    if residue > BigUint::one() {
        out.residue = Some(Integer::from(residue));
    }
    out
}
