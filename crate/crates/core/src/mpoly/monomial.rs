use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Exponent vector of a monomial, one entry per ring variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(arity: usize) -> Self {
        Monomial(vec![0; arity])
    }

    pub fn var(arity: usize, index: usize, exp: u32) -> Self {
        let mut e = vec![0; arity];
        e[index] = exp;
        Monomial(e)
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self, index: usize) -> u32 {
        self.0[index]
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        self.divides(other)
            .then(|| Monomial(other.0.iter().zip(&self.0).map(|(b, a)| b - a).collect()))
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    pub(crate) fn exps_mut(&mut self) -> &mut Vec<u32> {
        &mut self.0
    }
}

/// A monomial order.
///
/// `BlockElimination { split }` compares the first `split` variables by
/// grevlex and breaks ties with grevlex on the remaining variables, so any
/// monomial involving the first block is larger than every monomial free
/// of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum MonomialOrder {
    #[default]
    Grevlex,
    BlockElimination {
        split: usize,
    },
}

#[inline]
fn grevlex<E: Copy + Into<u64>>(a: &[E], b: &[E]) -> Ordering {
    let da: u64 = a.iter().map(|&e| e.into()).sum();
    let db: u64 = b.iter().map(|&e| e.into()).sum();
    if da != db {
        return da.cmp(&db);
    }
    for i in (0..a.len()).rev() {
        let (x, y) = (a[i].into(), b[i].into());
        if x != y {
            return y.cmp(&x);
        }
    }
    Ordering::Equal
}

impl MonomialOrder {
    /// Compares two exponent vectors of equal length.
    #[inline]
    pub fn cmp_exponents<E: Copy + Into<u64>>(&self, a: &[E], b: &[E]) -> Ordering {
        debug_assert_eq!(a.len(), b.len());
        match *self {
            MonomialOrder::Grevlex => grevlex(a, b),
            MonomialOrder::BlockElimination { split } => {
                let s = split.min(a.len());
                grevlex(&a[..s], &b[..s]).then_with(|| grevlex(&a[s..], &b[s..]))
            }
        }
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        self.cmp_exponents(a.exponents(), b.exponents())
    }
}

impl fmt::Display for MonomialOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonomialOrder::Grevlex => write!(f, "grevlex"),
            MonomialOrder::BlockElimination { split } => {
                write!(f, "block-elimination(first {split} vars, grevlex/grevlex)")
            }
        }
    }
}
