//! Sparse multivariate polynomials over an exact coefficient field.
//!
//! A [`Poly`] is a map from exponent vectors to nonzero coefficients; the
//! zero polynomial is the empty map. Polynomials carry a shared reference to
//! their [`Ring`], and binary operations require both operands to live in
//! the same ring.

mod monomial;
mod resultant;
mod text;

pub use monomial::{Monomial, MonomialOrder};
pub use resultant::{resultant, sylvester_matrix};

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exactnum::{binomial, binomial_u128, Field};

/// A polynomial ring `k[v_1, ..., v_n]` with a fixed variable order.
#[derive(Debug, Clone, PartialEq)]
pub struct Ring<F: Field> {
    field: F,
    vars: Vec<String>,
}

impl<F: Field> Ring<F> {
    pub fn new<S: Into<String>>(field: F, vars: impl IntoIterator<Item = S>) -> Result<Arc<Self>> {
        let vars: Vec<String> = vars.into_iter().map(Into::into).collect();
        for (i, v) in vars.iter().enumerate() {
            if v.is_empty() || !v.chars().next().unwrap().is_ascii_alphabetic() {
                return Err(Error::invalid(format!("bad variable name `{v}`")));
            }
            if !v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(Error::invalid(format!("bad variable name `{v}`")));
            }
            if vars[..i].contains(v) {
                return Err(Error::invalid(format!("duplicate variable `{v}`")));
            }
        }
        Ok(Arc::new(Ring { field, vars }))
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn require_var(&self, name: &str) -> Result<usize> {
        self.var_index(name)
            .ok_or_else(|| Error::invalid(format!("unknown variable `{name}`")))
    }

    /// The ring obtained by deleting the named variables.
    pub fn without(&self, names: &[&str]) -> Result<Arc<Self>> {
        for n in names {
            self.require_var(n)?;
        }
        let vars = self
            .vars
            .iter()
            .filter(|v| !names.contains(&v.as_str()))
            .cloned();
        Ring::new(self.field.clone(), vars)
    }
}

/// A polynomial in a [`Ring`].
#[derive(Clone)]
pub struct Poly<F: Field> {
    ring: Arc<Ring<F>>,
    terms: BTreeMap<Monomial, F::Elem>,
}

impl<F: Field> PartialEq for Poly<F> {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring)
            && self.terms == other.terms
    }
}

impl<F: Field> Eq for Poly<F> {}

impl<F: Field> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({})", self.ring.field.name(), self)
    }
}

impl<F: Field> Poly<F> {
    pub fn zero(ring: &Arc<Ring<F>>) -> Self {
        Poly {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Arc<Ring<F>>, c: F::Elem) -> Self {
        let mut p = Poly::zero(ring);
        p.add_term(Monomial::one(ring.arity()), c);
        p
    }

    pub fn from_i64(ring: &Arc<Ring<F>>, c: i64) -> Self {
        Poly::constant(ring, ring.field.from_i64(c))
    }

    pub fn one(ring: &Arc<Ring<F>>) -> Self {
        Poly::constant(ring, ring.field.one())
    }

    pub fn var(ring: &Arc<Ring<F>>, index: usize) -> Self {
        let mut p = Poly::zero(ring);
        p.add_term(Monomial::var(ring.arity(), index, 1), ring.field.one());
        p
    }

    pub fn var_named(ring: &Arc<Ring<F>>, name: &str) -> Result<Self> {
        Ok(Poly::var(ring, ring.require_var(name)?))
    }

    /// Builds a polynomial from terms, summing duplicates and dropping zeros.
    pub fn from_terms(
        ring: &Arc<Ring<F>>,
        terms: impl IntoIterator<Item = (Monomial, F::Elem)>,
    ) -> Self {
        let mut p = Poly::zero(ring);
        for (m, c) in terms {
            assert_eq!(
                m.arity(),
                ring.arity(),
                "monomial arity does not match ring"
            );
            p.add_term(m, c);
        }
        p
    }

    pub fn ring(&self) -> &Arc<Ring<F>> {
        &self.ring
    }

    pub fn field(&self) -> &F {
        &self.ring.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &F::Elem)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> F::Elem {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| self.field().zero())
    }

    /// The constant value if the polynomial has no variable terms.
    pub fn as_constant(&self) -> Option<F::Elem> {
        match self.terms.len() {
            0 => Some(self.field().zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.exponent(var)).max()
    }

    /// Variables that actually occur in some term.
    pub fn support(&self) -> Vec<usize> {
        (0..self.ring.arity())
            .filter(|&v| self.terms.keys().any(|m| m.exponent(v) > 0))
            .collect()
    }

    pub fn add_term(&mut self, m: Monomial, c: F::Elem) {
        let f = self.ring.field.clone();
        if f.is_zero(&c) {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = f.add(o.get(), &c);
                if f.is_zero(&s) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_ring(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.ring, &other.ring) || *self.ring == *other.ring {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "ring mismatch: {:?} over {} vs {:?} over {}",
                self.ring.vars,
                self.ring.field.name(),
                other.ring.vars,
                other.ring.field.name()
            )))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let mut out = self.clone();
        let f = self.field();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), f.neg(c));
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let f = self.field();
        let mut acc: HashMap<Monomial, F::Elem> = HashMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let prod = f.mul(ca, cb);
                acc.entry(ma.mul(mb))
                    .and_modify(|c| *c = f.add(c, &prod))
                    .or_insert(prod);
            }
        }
        Ok(Poly::from_terms(&self.ring, acc))
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let f = self.field();
        if f.is_zero(c) {
            return Poly::zero(&self.ring);
        }
        Poly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), f.mul(a, c)))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &F::Elem) -> Self {
        let f = self.field();
        if f.is_zero(c) {
            return Poly::zero(&self.ring);
        }
        Poly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(n, a)| (n.mul(m), f.mul(a, c)))
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Poly::one(&self.ring);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Leading term under `order`.
    pub fn leading_term(&self, order: MonomialOrder) -> Option<(&Monomial, &F::Elem)> {
        self.terms.iter().max_by(|a, b| order.cmp(a.0, b.0))
    }

    /// Terms sorted by decreasing `order`.
    pub fn sorted_terms(&self, order: MonomialOrder) -> Vec<(&Monomial, &F::Elem)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| order.cmp(b.0, a.0));
        v
    }

    /// Scales to make the leading coefficient 1.
    pub fn monic(&self, order: MonomialOrder) -> Self {
        match self.leading_term(order) {
            None => self.clone(),
            Some((_, c)) => {
                let inv = self.field().inv(c).expect("nonzero leading coefficient");
                self.scale(&inv)
            }
        }
    }

    /// `j`-th Hasse derivative with respect to variable `var`: each
    /// `var^n` becomes `C(n, j) var^(n - j)`, with the binomial computed
    /// over the integers and then mapped into the field.
    pub fn hasse_derivative(&self, var: usize, j: u32) -> Self {
        assert!(var < self.ring.arity(), "variable index out of range");
        if j == 0 {
            return self.clone();
        }
        let f = self.field();
        let mut out = Poly::zero(&self.ring);
        for (m, c) in &self.terms {
            let n = m.exponent(var);
            if n < j {
                continue;
            }
            let b = match binomial_u128(n as u64, j as u64) {
                Some(b) if b <= i64::MAX as u128 => f.from_i64(b as i64),
                _ => f.from_integer(&binomial(n as u64, j as u64)),
            };
            let mut m2 = m.clone();
            m2.exps_mut()[var] = n - j;
            out.add_term(m2, f.mul(c, &b));
        }
        out
    }

    /// `hasse_derivative` with a signed order, rejecting negative `j`.
    pub fn try_hasse_derivative(&self, var: &str, j: i64) -> Result<Self> {
        let v = self.ring.require_var(var)?;
        if j < 0 {
            return Err(Error::invalid(format!("negative derivative order {j}")));
        }
        let j = u32::try_from(j).map_err(|_| Error::invalid("derivative order too large"))?;
        Ok(self.hasse_derivative(v, j))
    }

    /// Simultaneous substitution of the named variables by polynomials of
    /// `target`, which must be this ring with exactly those variables removed.
    pub fn specialize(
        &self,
        target: &Arc<Ring<F>>,
        assignments: &[(&str, Poly<F>)],
    ) -> Result<Self> {
        let mut slot: Vec<Option<usize>> = vec![None; self.ring.arity()];
        for (k, (name, value)) in assignments.iter().enumerate() {
            let v = self.ring.require_var(name)?;
            if slot[v].is_some() {
                return Err(Error::invalid(format!("variable `{name}` assigned twice")));
            }
            if !(Arc::ptr_eq(value.ring(), target) || **value.ring() == **target) {
                return Err(Error::invalid(format!(
                    "value for `{name}` is not in the target ring"
                )));
            }
            slot[v] = Some(k);
        }
        // remaining variables must map one-to-one, in order, onto the target ring
        let keep: Vec<usize> = (0..self.ring.arity())
            .filter(|&v| slot[v].is_none())
            .collect();
        if keep.len() != target.arity()
            || keep
                .iter()
                .zip(target.vars())
                .any(|(&v, t)| self.ring.vars[v] != *t)
            || *self.field() != *target.field()
        {
            return Err(Error::invalid(format!(
                "target ring {:?} is not the source ring without the assigned variables",
                target.vars()
            )));
        }
        let mut powers: HashMap<(usize, u32), Poly<F>> = HashMap::new();
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut kept = Vec::with_capacity(keep.len());
            for &v in &keep {
                kept.push(m.exponent(v));
            }
            let mut term = Poly::from_terms(target, [(Monomial::from_exponents(kept), c.clone())]);
            for (v, s) in slot.iter().enumerate() {
                let (Some(k), e) = (s, m.exponent(v)) else {
                    continue;
                };
                if e == 0 {
                    continue;
                }
                let pw = powers
                    .entry((*k, e))
                    .or_insert_with(|| assignments[*k].1.pow(e));
                term = &term * pw;
            }
            for (tm, tc) in term.terms {
                out.add_term(tm, tc);
            }
        }
        Ok(out)
    }

    /// Evaluates at a point given as one field element per variable.
    pub fn evaluate(&self, point: &[F::Elem]) -> Result<F::Elem> {
        if point.len() != self.ring.arity() {
            return Err(Error::invalid(format!(
                "point has {} coordinates, ring has {} variables",
                point.len(),
                self.ring.arity()
            )));
        }
        let f = self.field();
        let mut acc = f.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.exponents()) {
                if e > 0 {
                    t = f.mul(&t, &f.pow(x, e as u64));
                }
            }
            acc = f.add(&acc, &t);
        }
        Ok(acc)
    }

    /// Coefficients with respect to `var`: entry `k` is the coefficient of
    /// `var^k`, as a polynomial of the same ring not involving `var`.
    pub fn coefficients_in(&self, var: usize) -> Vec<Poly<F>> {
        let deg = self.degree_in(var).unwrap_or(0) as usize;
        let mut out = vec![Poly::zero(&self.ring); if self.is_zero() { 0 } else { deg + 1 }];
        for (m, c) in &self.terms {
            let k = m.exponent(var) as usize;
            let mut m2 = m.clone();
            m2.exps_mut()[var] = 0;
            out[k].add_term(m2, c.clone());
        }
        out
    }

    /// Exact division; `None` if `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Poly<F>) -> Result<Option<Poly<F>>> {
        self.check_ring(divisor)?;
        let order = MonomialOrder::Grevlex;
        let Some((lm, lc)) = divisor.leading_term(order) else {
            return Err(Error::invalid("division by the zero polynomial"));
        };
        let f = self.field().clone();
        let lc_inv = f.inv(lc).expect("nonzero leading coefficient");
        let mut rem = self.clone();
        let mut quot = Poly::zero(&self.ring);
        while let Some((m, c)) = rem.leading_term(order) {
            let Some(q) = lm.quotient_of(m) else {
                return Ok(None);
            };
            let qc = f.mul(c, &lc_inv);
            rem = &rem - &divisor.mul_monomial(&q, &qc);
            quot.add_term(q, qc);
        }
        Ok(Some(quot))
    }

    /// Image under a coefficient map into another ring with the same
    /// variables (e.g. reduction of a rational polynomial modulo `p`).
    pub fn map_coefficients<G: Field>(
        &self,
        target: &Arc<Ring<G>>,
        map: impl Fn(&F::Elem) -> Option<G::Elem>,
    ) -> Result<Poly<G>> {
        if target.vars() != self.ring.vars() {
            return Err(Error::invalid(
                "coefficient map between rings with different variables",
            ));
        }
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let image = map(c).ok_or_else(|| {
                Error::invalid(format!(
                    "coefficient {c} has no image in {}",
                    target.field().name()
                ))
            })?;
            out.add_term(m.clone(), image);
        }
        Ok(out)
    }

    /// Substitutes `0` for variable `var`, staying in the same ring.
    pub fn set_var_zero(&self, var: usize) -> Poly<F> {
        Poly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exponent(var) == 0)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Removes one factor of variable `var` from every term; fails if some
    /// term is not divisible by it.
    pub fn divide_by_var(&self, var: usize) -> Option<Poly<F>> {
        let mut out = Poly::zero(&self.ring);
        for (m, c) in &self.terms {
            if m.exponent(var) == 0 {
                return None;
            }
            let mut m2 = m.clone();
            m2.exps_mut()[var] -= 1;
            out.terms.insert(m2, c.clone());
        }
        Some(out)
    }
}

impl<F: Field> Add for &Poly<F> {
    type Output = Poly<F>;
    fn add(self, rhs: &Poly<F>) -> Poly<F> {
        self.try_add(rhs).expect("polynomial addition across rings")
    }
}

impl<F: Field> Sub for &Poly<F> {
    type Output = Poly<F>;
    fn sub(self, rhs: &Poly<F>) -> Poly<F> {
        self.try_sub(rhs)
            .expect("polynomial subtraction across rings")
    }
}

impl<F: Field> Mul for &Poly<F> {
    type Output = Poly<F>;
    fn mul(self, rhs: &Poly<F>) -> Poly<F> {
        self.try_mul(rhs)
            .expect("polynomial multiplication across rings")
    }
}

impl<F: Field> Neg for &Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        self.scale(&self.field().neg(&self.field().one()))
    }
}
