//! Scenario ideals.
//!
//! For a scenario `s` of type `t` and degree `d`, write `m = d - 2 - t` and
//! take the family
//!
//! ```text
//! F = x^2 (x - P_1) ... (x - P_t) (x^m + A_1 x^(m-1) + ... + A_m)
//! ```
//!
//! with `P_t = 1`. The scenario ideal lives in `k[A_1..A_m, P_1..P_(t-1)]`
//! and is generated by the Hasse derivatives `F_H^(j)` evaluated at the
//! root labelled `s_j` (`P_0 = 0`), for `j = 2..d-1`. Its variety is empty
//! exactly when no polynomial of the family shares the prescribed roots
//! with its derivatives.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::exactnum::Field;
use crate::mpoly::{resultant, MonomialOrder, Poly, Ring};
use crate::scenario::Scenario;

/// Largest degree accepted by [`resultant_ideal`].
pub const RESULTANT_MAX_DEGREE: usize = 8;

/// Why a type-0 scenario needs no ideal.
pub const TYPE_ZERO_REASON: &str =
    "type 0: the only candidate is x^d, a power of a linear polynomial";

/// Variable names `Am..A1, P1..P(t-1), x`. Listing the `A` block from
/// `Am` down makes the lone `A_(d-j)` lead generator `j` under grevlex.
fn family_vars(d: usize, t: usize) -> Vec<String> {
    let m = d - 2 - t;
    let mut v: Vec<String> = (1..=m).rev().map(|i| format!("A{i}")).collect();
    v.extend((1..t).map(|i| format!("P{i}")));
    v.push("x".into());
    v
}

/// The family polynomial and its Hasse derivatives for one `(d, t)`.
#[derive(Debug)]
pub struct Family<F: Field> {
    d: usize,
    t: usize,
    ring_x: Arc<Ring<F>>,
    ring: Arc<Ring<F>>,
    // derivs[j] = F_H^(j), j = 0..d-1
    derivs: Vec<Poly<F>>,
}

impl<F: Field> Family<F> {
    pub fn new(field: F, d: usize, t: usize) -> Result<Self> {
        if d < 3 {
            return Err(Error::invalid(format!("degree {d} below 3")));
        }
        if t == 0 || t > d - 2 {
            return Err(Error::invalid(format!("type {t} outside 1..={}", d - 2)));
        }
        let ring_x = Ring::new(field, family_vars(d, t))?;
        let ring = ring_x.without(&["x"])?;
        let m = d - 2 - t;
        let xi = ring_x.arity() - 1;
        let x = Poly::var(&ring_x, xi);
        let mut f = x.pow(2);
        for i in 1..=t {
            let root = if i == t {
                Poly::one(&ring_x)
            } else {
                Poly::var(&ring_x, m + i - 1)
            };
            f = &f * &(&x - &root);
        }
        let mut tail = x.pow(m as u32);
        for i in 1..=m {
            tail = &tail + &(&Poly::var(&ring_x, m - i) * &x.pow((m - i) as u32));
        }
        f = &f * &tail;
        let derivs = (0..d as u32).map(|j| f.hasse_derivative(xi, j)).collect();
        Ok(Family {
            d,
            t,
            ring_x,
            ring,
            derivs,
        })
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn type_of(&self) -> usize {
        self.t
    }

    /// Number of `A` variables.
    pub fn a_count(&self) -> usize {
        self.d - 2 - self.t
    }

    /// `R[x]`.
    pub fn ring_x(&self) -> &Arc<Ring<F>> {
        &self.ring_x
    }

    /// `R`, the ring of the scenario ideals.
    pub fn ring(&self) -> &Arc<Ring<F>> {
        &self.ring
    }

    pub fn polynomial(&self) -> &Poly<F> {
        &self.derivs[0]
    }

    pub fn hasse(&self, j: usize) -> &Poly<F> {
        &self.derivs[j]
    }

    /// Index in `R` of `A_i` (1-based `i`).
    pub fn a_var(&self, i: usize) -> usize {
        self.a_count() - i
    }

    /// Index in `R` of `P_i` for `1 <= i < t`.
    pub fn p_var(&self, i: usize) -> usize {
        self.a_count() + i - 1
    }

    /// `P_label` as an element of `R`: `0` for label 0, `1` for label `t`.
    pub fn root(&self, label: usize) -> Poly<F> {
        if label == 0 {
            Poly::zero(&self.ring)
        } else if label == self.t {
            Poly::one(&self.ring)
        } else {
            Poly::var(&self.ring, self.p_var(label))
        }
    }

    /// `F_H^(j)` evaluated at `x = P_label`.
    pub fn generator(&self, j: usize, label: usize) -> Result<Poly<F>> {
        self.derivs[j].specialize(&self.ring, &[("x", self.root(label))])
    }

    /// The family member at a point `(a_1..a_m, p_1..p_(t-1))`, as a
    /// coefficient list (constant term first) of a degree-`d` polynomial.
    pub fn instantiate(&self, point: &[F::Elem]) -> Result<Vec<F::Elem>> {
        if point.len() != self.ring.arity() {
            return Err(Error::invalid(
                "point dimension does not match the ideal ring",
            ));
        }
        let field = self.ring.field();
        let xi = self.ring_x.arity() - 1;
        let mut coeffs = vec![field.zero(); self.d + 1];
        for (k, c) in self.polynomial().coefficients_in(xi).iter().enumerate() {
            let mut full = point.to_vec();
            full.push(field.zero());
            coeffs[k] = c.evaluate(&full)?;
        }
        Ok(coeffs)
    }
}

/// Per-`(d, t)` cache of families, shared between scenario tasks.
#[derive(Debug)]
pub struct FamilyCache<F: Field> {
    field: F,
    map: Mutex<HashMap<(usize, usize), Arc<Family<F>>>>,
}

impl<F: Field> FamilyCache<F> {
    pub fn new(field: F) -> Self {
        FamilyCache {
            field,
            map: Mutex::new(HashMap::new()),
        }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn get(&self, d: usize, t: usize) -> Result<Arc<Family<F>>> {
        if let Some(f) = self.map.lock().unwrap().get(&(d, t)) {
            return Ok(f.clone());
        }
        let fam = Arc::new(Family::new(self.field.clone(), d, t)?);
        Ok(self
            .map
            .lock()
            .unwrap()
            .entry((d, t))
            .or_insert(fam)
            .clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdealOptions {
    /// Replace leading generators by `A` variables and strip the `P_1`
    /// factor at the first nonzero entry.
    pub speedups: bool,
}

impl Default for IdealOptions {
    fn default() -> Self {
        IdealOptions { speedups: true }
    }
}

/// The generators of one scenario ideal.
#[derive(Debug, Clone)]
pub struct ScenarioIdeal<F: Field> {
    pub scenario: Scenario,
    pub ring: Arc<Ring<F>>,
    /// One generator per `j = 2..d-1`, in that order.
    pub generators: Vec<Poly<F>>,
    /// Size of the leading `A` block, eliminated first.
    pub a_count: usize,
    pub notes: Vec<String>,
}

impl<F: Field> ScenarioIdeal<F> {
    /// Block order eliminating the `A` variables, grevlex inside blocks.
    pub fn order(&self) -> MonomialOrder {
        MonomialOrder::BlockElimination {
            split: self.a_count,
        }
    }

    /// Audit form: ring line followed by one generator per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# scenario {} over {} in [{}]",
            self.scenario,
            self.ring.field().name(),
            self.ring.vars().join(",")
        );
        for (k, g) in self.generators.iter().enumerate() {
            let _ = writeln!(out, "j={}: {}", k + 2, g);
        }
        out
    }
}

/// Builds the scenario ideal of `s` from its family.
pub fn scenario_ideal<F: Field>(
    family: &Family<F>,
    s: &Scenario,
    options: IdealOptions,
) -> Result<ScenarioIdeal<F>> {
    let d = s.degree();
    let t = s.type_of();
    if t == 0 {
        return Err(Error::invalid(TYPE_ZERO_REASON));
    }
    if family.degree() != d || family.type_of() != t {
        return Err(Error::invalid(format!(
            "family (d={}, t={}) does not fit scenario {s}",
            family.degree(),
            family.type_of()
        )));
    }
    let m = family.a_count();
    let mut gens = Vec::with_capacity(d - 2);
    let mut notes = Vec::new();
    let mut zeroed: Vec<usize> = Vec::new();
    let mut leading = options.speedups;
    for j in 2..d {
        let label = s.at(j) as usize;
        if leading && label == 0 {
            // F_H^(j)(0) is +-P_1...P_(t-1) A_(m+2-j) once the earlier A's vanish
            let a = family.a_var(m + 2 - j);
            gens.push(Poly::var(family.ring(), a));
            zeroed.push(a);
            continue;
        }
        let mut g = family.generator(j, label)?;
        for &a in &zeroed {
            g = g.set_var_zero(a);
        }
        if leading {
            leading = false;
            if j > 2 {
                notes.push(format!("A{}..A{} set to 0", m + 3 - j, m));
            }
            if t >= 2 {
                let p1 = family.p_var(1);
                g = g.divide_by_var(p1).ok_or_else(|| {
                    Error::invalid(format!("generator j={j} of {s} is not divisible by P1"))
                })?;
                notes.push(format!("factor P1 removed from j={j}"));
            }
        }
        gens.push(g);
    }
    for g in &gens {
        for i in 1..=m {
            assert!(
                g.degree_in(family.a_var(i)).unwrap_or(0) <= 1,
                "generator not linear in A{i}"
            );
        }
    }
    Ok(ScenarioIdeal {
        scenario: s.clone(),
        ring: family.ring().clone(),
        generators: gens,
        a_count: m,
        notes,
    })
}

/// The resultants `Res_x(F, F_H^(j))`, `j = 2..d-1`, for one `(d, t)`.
pub fn resultant_ideal<F: Field>(family: &Family<F>) -> Result<Vec<Poly<F>>> {
    let d = family.degree();
    if d > RESULTANT_MAX_DEGREE {
        return Err(Error::unsupported(format!(
            "resultant ideals are limited to d <= {RESULTANT_MAX_DEGREE}; the resultants grow too fast beyond that"
        )));
    }
    let xi = family.ring_x().arity() - 1;
    let ring = family.ring();
    let mut out = Vec::with_capacity(d - 2);
    for j in 2..d {
        let r = resultant(family.polynomial(), family.hasse(j), xi)?;
        out.push(r.specialize(ring, &[("x", Poly::zero(ring))])?);
    }
    Ok(out)
}
