//! Concrete univariate polynomials: root profiles against Hasse derivatives,
//! the CA property, `scen(f)`, `type(f)` and scenario matching.
//!
//! Over a prime field roots are found by evaluating at every residue, so the
//! modulus is capped at [`MAX_EXHAUSTIVE_PRIME`]. Over the rationals only
//! rational roots are extracted; a polynomial that does not split into
//! linear factors is reported as unsupported.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{
    binomial, factor, FactorEffort, Field, Integer, PrimeField, Rational, Rationals,
};
use crate::mpoly::Poly;
use crate::scenario::Scenario;

pub const MAX_EXHAUSTIVE_PRIME: u64 = 1_000_000;

/// Dense univariate polynomial, coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq)]
pub struct UniPoly<F: Field> {
    field: F,
    coeffs: Vec<F::Elem>,
}

impl<F: Field> UniPoly<F> {
    pub fn new(field: F, mut coeffs: Vec<F::Elem>) -> Self {
        while coeffs.last().is_some_and(|c| field.is_zero(c)) {
            coeffs.pop();
        }
        UniPoly { field, coeffs }
    }

    /// `prod (x - a)^m` over the given roots.
    pub fn from_roots(field: F, roots: &[(F::Elem, u32)]) -> Self {
        let mut coeffs = vec![field.one()];
        for (a, m) in roots {
            for _ in 0..*m {
                let mut next = vec![field.zero(); coeffs.len() + 1];
                for (k, c) in coeffs.iter().enumerate() {
                    next[k + 1] = field.add(&next[k + 1], c);
                    next[k] = field.sub(&next[k], &field.mul(a, c));
                }
                coeffs = next;
            }
        }
        UniPoly::new(field, coeffs)
    }

    /// Reads a polynomial in a one-variable ring.
    pub fn from_poly(f: &Poly<F>) -> Result<Self> {
        if f.ring().arity() != 1 {
            return Err(Error::invalid(
                "expected a polynomial in exactly one variable",
            ));
        }
        let deg = f.degree_in(0).unwrap_or(0) as usize;
        let mut coeffs = vec![f.field().zero(); deg + 1];
        for (m, c) in f.terms() {
            coeffs[m.exponents()[0] as usize] = c.clone();
        }
        Ok(UniPoly::new(f.field().clone(), coeffs))
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, a: &F::Elem) -> F::Elem {
        let f = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(f.zero(), |acc, c| f.add(&f.mul(&acc, a), c))
    }

    /// The `j`-th Hasse derivative: `x^n -> C(n, j) x^(n-j)`.
    pub fn hasse(&self, j: usize) -> Self {
        let f = &self.field;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(j)
            .map(|(n, c)| f.mul(c, &f.from_integer(&binomial(n as u64, j as u64))))
            .collect();
        UniPoly::new(f.clone(), coeffs)
    }

    /// Multiplicity of `a` as a root: the first Hasse derivative not vanishing at `a`.
    pub fn multiplicity(&self, a: &F::Elem) -> u32 {
        if self.is_zero() {
            return u32::MAX;
        }
        let mut m = 0;
        while self.field.is_zero(&self.hasse(m).eval(a)) {
            m += 1;
        }
        m as u32
    }
}

impl<F: Field> fmt::Display for UniPoly<F> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(out, "0");
        }
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate().rev() {
            if self.field.is_zero(c) {
                continue;
            }
            if !first {
                write!(out, " + ")?;
            }
            first = false;
            match (n, self.field.is_one(c)) {
                (0, _) => write!(out, "{c}")?,
                (1, true) => write!(out, "x")?,
                (1, false) => write!(out, "{c}*x")?,
                (_, true) => write!(out, "x^{n}")?,
                (_, false) => write!(out, "{c}*x^{n}")?,
            }
        }
        Ok(())
    }
}

/// Fields in which the roots of a split polynomial can be listed exactly.
pub trait RootField: Field {
    /// Distinct roots in the field, ascending, with multiplicities.
    fn roots(f: &UniPoly<Self>) -> Result<Vec<(Self::Elem, u32)>>;

    /// Parses one field element as written on a command line.
    fn parse_elem(&self, s: &str) -> Result<Self::Elem>;
}

impl RootField for PrimeField {
    fn roots(f: &UniPoly<Self>) -> Result<Vec<(u64, u32)>> {
        let p = f.field().modulus();
        if p > MAX_EXHAUSTIVE_PRIME {
            return Err(Error::unsupported(format!(
                "root search over F_{p} exceeds the exhaustive bound {MAX_EXHAUSTIVE_PRIME}"
            )));
        }
        if f.is_zero() {
            return Err(Error::invalid("the zero polynomial has no root profile"));
        }
        Ok((0..p)
            .filter(|a| f.field().is_zero(&f.eval(a)))
            .map(|a| (a, f.multiplicity(&a)))
            .collect())
    }

    fn parse_elem(&self, s: &str) -> Result<u64> {
        let n: Integer = s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("`{s}` is not an integer")))?;
        Ok(self.from_integer(&n))
    }
}

impl RootField for Rationals {
    fn roots(f: &UniPoly<Self>) -> Result<Vec<(Rational, u32)>> {
        if f.is_zero() {
            return Err(Error::invalid("the zero polynomial has no root profile"));
        }
        // integer multiple of f with the power of x removed
        let den = f.coeffs().iter().fold(Integer::one(), |acc, c| {
            num_integer::lcm(acc, c.denom().clone())
        });
        let low = f.coeffs().iter().position(|c| !c.is_zero()).unwrap_or(0);
        let ints: Vec<Integer> = f.coeffs()[low..]
            .iter()
            .map(|c| (c * &den).to_integer())
            .collect();
        let mut found: BTreeSet<Rational> = BTreeSet::new();
        if low > 0 {
            found.insert(Rational::zero());
        }
        let tops = divisors(ints.last().expect("nonzero polynomial"))?;
        let bottoms = divisors(&ints[0])?;
        for a in &bottoms {
            for b in &tops {
                for cand in [
                    Rational::new(a.clone(), b.clone()),
                    -Rational::new(a.clone(), b.clone()),
                ] {
                    if f.eval(&cand).is_zero() {
                        found.insert(cand);
                    }
                }
            }
        }
        Ok(found
            .into_iter()
            .map(|a| {
                let m = f.multiplicity(&a);
                (a, m)
            })
            .collect())
    }

    fn parse_elem(&self, s: &str) -> Result<Rational> {
        s.trim()
            .parse()
            .map_err(|_| Error::Parse(format!("`{s}` is not a rational number")))
    }
}

fn divisors(n: &Integer) -> Result<Vec<Integer>> {
    let f = factor(&n.abs(), FactorEffort::default());
    if !f.is_complete() {
        return Err(Error::unsupported(format!(
            "could not factor {n} to list rational root candidates"
        )));
    }
    let mut out = vec![Integer::one()];
    for (p, e) in &f.factors {
        let mut next = Vec::with_capacity(out.len() * (*e as usize + 1));
        for d in &out {
            let mut q = d.clone();
            for _ in 0..=*e {
                next.push(q.clone());
                q *= p;
            }
        }
        out = next;
    }
    Ok(out)
}

/// Parses `root:mult,root:mult,...`; a bare root has multiplicity one.
pub fn parse_root_list<F: RootField>(field: &F, s: &str) -> Result<Vec<(F::Elem, u32)>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let (r, m) = t.split_once(':').unwrap_or((t, "1"));
            let m: u32 = m
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad multiplicity in `{t}`")))?;
            Ok((field.parse_elem(r)?, m))
        })
        .collect()
}

/// Parses a comma separated coefficient list, leading coefficient first.
pub fn parse_coefficients<F: RootField>(field: &F, s: &str) -> Result<UniPoly<F>> {
    let mut coeffs = s
        .split(',')
        .map(|t| field.parse_elem(t))
        .collect::<Result<Vec<_>>>()?;
    coeffs.reverse();
    Ok(UniPoly::new(field.clone(), coeffs))
}

/// Roots of `f` and, for each `j = 1..d-1`, the roots shared with the `j`-th
/// Hasse derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct RootProfile<F: Field> {
    pub degree: usize,
    pub roots: Vec<(F::Elem, u32)>,
    /// `common[j - 1]` is `R_j`, as indices into `roots`.
    pub common: Vec<Vec<usize>>,
}

impl<F: Field> RootProfile<F> {
    pub fn root_set(&self, j: usize) -> Vec<&F::Elem> {
        self.common[j - 1]
            .iter()
            .map(|&k| &self.roots[k].0)
            .collect()
    }

    fn covers(&self, j: usize, k: usize) -> bool {
        self.common[j - 1].binary_search(&k).is_ok()
    }
}

pub fn root_profile<F: RootField>(f: &UniPoly<F>) -> Result<RootProfile<F>> {
    let d = match f.degree() {
        Some(d) if d >= 1 => d,
        _ => {
            return Err(Error::invalid(
                "root profiles need a polynomial of positive degree",
            ))
        }
    };
    let roots = F::roots(f)?;
    let total: u64 = roots.iter().map(|(_, m)| *m as u64).sum();
    if total != d as u64 {
        return Err(Error::unsupported(format!(
            "polynomial of degree {d} does not split over {}",
            f.field().name()
        )));
    }
    let common = (1..d)
        .map(|j| {
            let h = f.hasse(j);
            (0..roots.len())
                .filter(|&k| f.field().is_zero(&h.eval(&roots[k].0)))
                .collect()
        })
        .collect();
    Ok(RootProfile {
        degree: d,
        roots,
        common,
    })
}

/// Not a power of a linear polynomial, and a common root with every Hasse derivative.
pub fn is_ca<F: Field>(profile: &RootProfile<F>) -> bool {
    profile.roots.len() > 1 && profile.common.iter().all(|r| !r.is_empty())
}

fn require_ca<F: Field>(profile: &RootProfile<F>) -> Result<()> {
    if !is_ca(profile) {
        return Err(Error::invalid("polynomial is not a CA-polynomial"));
    }
    if profile.degree < 3 {
        return Err(Error::invalid("scenarios need degree at least 3"));
    }
    Ok(())
}

/// The lexicographically least scenario realized by the polynomial, with
/// the roots chosen for labels `0, 1, ...`.
pub fn scen_of<F: Field>(profile: &RootProfile<F>) -> Result<(Scenario, Vec<F::Elem>)> {
    require_ca(profile)?;
    let mut best: Option<(Vec<u8>, Vec<usize>)> = None;
    let mut seq = Vec::with_capacity(profile.degree - 1);
    let mut labels = Vec::new();
    least_sequence(profile, 1, &mut seq, &mut labels, &mut best);
    let (seq, labels) = best.expect("a CA profile always admits a labelling");
    let roots = labels.iter().map(|&k| profile.roots[k].0.clone()).collect();
    Ok((Scenario::new(seq)?, roots))
}

// An already used label in R_j always beats a fresh one, so the only
// branching is over which root a fresh label names.
fn least_sequence<F: Field>(
    profile: &RootProfile<F>,
    j: usize,
    seq: &mut Vec<u8>,
    labels: &mut Vec<usize>,
    best: &mut Option<(Vec<u8>, Vec<usize>)>,
) {
    if let Some((b, _)) = best {
        if b[..seq.len()] < seq[..] {
            return;
        }
    }
    if j == profile.degree {
        if best.as_ref().is_none_or(|(b, _)| seq[..] < b[..]) {
            *best = Some((seq.clone(), labels.clone()));
        }
        return;
    }
    if let Some(l) = labels.iter().position(|&k| profile.covers(j, k)) {
        seq.push(l as u8);
        least_sequence(profile, j + 1, seq, labels, best);
        seq.pop();
        return;
    }
    for &k in &profile.common[j - 1] {
        seq.push(labels.len() as u8);
        labels.push(k);
        least_sequence(profile, j + 1, seq, labels, best);
        labels.pop();
        seq.pop();
    }
}

/// Minimal number of roots meeting every `R_j`, minus one.
pub fn type_of_poly<F: Field>(profile: &RootProfile<F>) -> Result<usize> {
    require_ca(profile)?;
    let n = profile.roots.len();
    if n > 24 {
        return Err(Error::unsupported(
            "too many distinct roots for exact set cover",
        ));
    }
    let masks: Vec<u32> = profile
        .common
        .iter()
        .map(|r| r.iter().fold(0u32, |m, &k| m | 1 << k))
        .collect();
    (1u32..1 << n)
        .filter(|s| masks.iter().all(|m| m & s != 0))
        .map(|s| s.count_ones() as usize - 1)
        .min()
        .ok_or_else(|| Error::invalid("no covering root set"))
}

/// Pairwise distinct roots `a_0..a_t` with `a_{s_j}` in `R_j` for every `j`.
pub fn matching_roots<F: Field>(
    profile: &RootProfile<F>,
    s: &Scenario,
) -> Result<Option<Vec<F::Elem>>> {
    if s.degree() != profile.degree {
        return Err(Error::invalid(format!(
            "scenario has degree {} but the polynomial has degree {}",
            s.degree(),
            profile.degree
        )));
    }
    require_ca(profile)?;
    let t = s.type_of();
    let candidates: Vec<Vec<usize>> = (0..=t as u8)
        .map(|l| {
            (0..profile.roots.len())
                .filter(|&k| (1..profile.degree).all(|j| s.at(j) != l || profile.covers(j, k)))
                .collect()
        })
        .collect();
    let mut chosen = Vec::with_capacity(t + 1);
    if distinct_choice(&candidates, &mut chosen) {
        Ok(Some(
            chosen.iter().map(|&k| profile.roots[k].0.clone()).collect(),
        ))
    } else {
        Ok(None)
    }
}

pub fn matches<F: Field>(profile: &RootProfile<F>, s: &Scenario) -> Result<bool> {
    matching_roots(profile, s).map(|m| m.is_some())
}

fn distinct_choice(candidates: &[Vec<usize>], chosen: &mut Vec<usize>) -> bool {
    let Some(options) = candidates.get(chosen.len()) else {
        return true;
    };
    for &k in options {
        if !chosen.contains(&k) {
            chosen.push(k);
            if distinct_choice(candidates, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Everything the command line reports about one polynomial.
#[derive(Debug, Clone)]
pub struct PolyReport<F: Field> {
    pub profile: RootProfile<F>,
    pub is_ca: bool,
    pub type_of: Option<usize>,
    pub scenario: Option<(Scenario, Vec<F::Elem>)>,
}

pub fn analyze<F: RootField>(f: &UniPoly<F>) -> Result<PolyReport<F>> {
    let profile = root_profile(f)?;
    let ca = is_ca(&profile) && profile.degree >= 3;
    let (type_of, scenario) = if ca {
        (Some(type_of_poly(&profile)?), Some(scen_of(&profile)?))
    } else {
        (None, None)
    };
    Ok(PolyReport {
        is_ca: is_ca(&profile),
        profile,
        type_of,
        scenario,
    })
}
