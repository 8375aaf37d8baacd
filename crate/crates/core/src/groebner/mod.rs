//! Groebner bases by Buchberger's algorithm.
//!
//! The engine works on a packed copy of the input (at most 16 variables),
//! selects pairs by the normal strategy (smallest lcm degree, then the
//! monomial order) and prunes them with the Gebauer-Moeller criteria.
//! Polynomials are kept monic; over the rationals this means exact
//! rational coefficients rather than primitive integer representatives.
//!
//! Computations may be bounded by a [`Budget`]; an exhausted budget yields
//! an indeterminate outcome, never a guessed answer.

mod certificate;
mod engine;

pub use certificate::{unit_certificate, Certificate, CertificateOutcome};

use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::Field;
use crate::mpoly::{MonomialOrder, Poly};
use engine::{Ctx, Engine, EngineOutcome};

/// Resource limits for one basis computation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Budget {
    pub max_pairs: Option<u64>,
    pub max_coeff_bits: Option<u64>,
    pub deadline: Option<Instant>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn with_timeout(mut self, t: Duration) -> Self {
        self.deadline = Some(Instant::now() + t);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BudgetExceeded {
    Pairs,
    CoefficientBits,
    Time,
}

impl fmt::Display for BudgetExceeded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BudgetExceeded::Pairs => write!(f, "pair budget exceeded"),
            BudgetExceeded::CoefficientBits => write!(f, "coefficient size budget exceeded"),
            BudgetExceeded::Time => write!(f, "time budget exceeded"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub pairs_processed: u64,
    pub pairs_pruned: u64,
    pub reductions: u64,
    pub zero_reductions: u64,
    pub max_coeff_bits: u64,
    pub basis_size: usize,
}

/// A reduced Groebner basis: monic, no leading monomial divides another,
/// tails fully reduced, sorted by increasing leading monomial.
#[derive(Debug, Clone)]
pub struct GroebnerResult<F: Field> {
    pub basis: Vec<Poly<F>>,
    pub order: MonomialOrder,
    pub stats: Stats,
}

impl<F: Field> GroebnerResult<F> {
    pub fn is_unit(&self) -> bool {
        self.basis.len() == 1 && self.basis[0].is_constant() && !self.basis[0].is_zero()
    }
}

/// Completed computation or the budget that stopped it.
#[derive(Debug, Clone)]
pub enum Outcome<T> {
    Done(T),
    Indeterminate {
        reason: BudgetExceeded,
        stats: Stats,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnitVerdict {
    Unit,
    NotUnit,
    Indeterminate(BudgetExceeded),
}

fn common_ring<F: Field>(gens: &[Poly<F>]) -> Result<()> {
    if let Some(first) = gens.first() {
        for g in &gens[1..] {
            if g.ring() != first.ring() && **g.ring() != **first.ring() {
                return Err(Error::invalid("generators live in different rings"));
            }
        }
    }
    Ok(())
}

pub(crate) struct RawRun<F: Field> {
    pub ctx: Ctx,
    pub outcome: EngineOutcome<F::Elem>,
    pub stats: Stats,
}

pub(crate) fn run_engine<F: Field>(
    gens: &[Poly<F>],
    order: MonomialOrder,
    budget: &Budget,
    track: bool,
) -> Result<RawRun<F>> {
    common_ring(gens)?;
    let n = gens.first().map_or(0, |g| g.ring().arity());
    let ctx = Ctx::new(n, order)?;
    let imported = gens
        .iter()
        .map(|g| ctx.import(g))
        .collect::<Result<Vec<_>>>()?;
    let field = match gens.first() {
        Some(g) => g.field().clone(),
        None => {
            return Ok(RawRun {
                ctx,
                outcome: EngineOutcome::Done {
                    basis: Vec::new(),
                    unit_cofactors: None,
                },
                stats: Stats::default(),
            })
        }
    };
    let engine = Engine::new(&field, ctx, gens.len(), track, budget);
    let (outcome, mut stats) = engine.run(imported);
    if let EngineOutcome::Done { basis, .. } = &outcome {
        stats.basis_size = basis.len();
    }
    Ok(RawRun {
        ctx,
        outcome,
        stats,
    })
}

/// Reduced Groebner basis with the given budget.
pub fn groebner_basis_with_budget<F: Field>(
    gens: &[Poly<F>],
    order: MonomialOrder,
    budget: &Budget,
) -> Result<Outcome<GroebnerResult<F>>> {
    let run = run_engine(gens, order, budget, false)?;
    Ok(match run.outcome {
        EngineOutcome::Exceeded(reason) => Outcome::Indeterminate {
            reason,
            stats: run.stats,
        },
        EngineOutcome::Done { basis, .. } => {
            let ring = gens[0].ring();
            Outcome::Done(GroebnerResult {
                basis: basis.iter().map(|p| run.ctx.export(ring, p)).collect(),
                order,
                stats: run.stats,
            })
        }
    })
}

/// Reduced Groebner basis without resource limits.
pub fn groebner_basis<F: Field>(
    gens: &[Poly<F>],
    order: MonomialOrder,
) -> Result<GroebnerResult<F>> {
    match groebner_basis_with_budget(gens, order, &Budget::unlimited())? {
        Outcome::Done(r) => Ok(r),
        Outcome::Indeterminate { .. } => unreachable!("unlimited budget"),
    }
}

/// Whether the generators span the whole ring; stops as soon as a nonzero
/// constant appears. An empty (or all-zero) list is the zero ideal.
pub fn is_unit_ideal<F: Field>(
    gens: &[Poly<F>],
    order: MonomialOrder,
    budget: &Budget,
) -> Result<(UnitVerdict, Stats)> {
    let run = run_engine(gens, order, budget, false)?;
    let verdict = match &run.outcome {
        EngineOutcome::Exceeded(r) => UnitVerdict::Indeterminate(*r),
        EngineOutcome::Done { basis, .. } => {
            if basis.len() == 1 && basis[0].len() == 1 && basis[0][0].0 == run.ctx.one() {
                UnitVerdict::Unit
            } else {
                UnitVerdict::NotUnit
            }
        }
    };
    Ok((verdict, run.stats))
}

/// Remainder of `p` under full reduction by `basis` (any generating set;
/// the result is canonical only when `basis` is a Groebner basis).
pub fn normal_form<F: Field>(
    p: &Poly<F>,
    basis: &[Poly<F>],
    order: MonomialOrder,
) -> Result<Poly<F>> {
    let mut all = basis.to_vec();
    all.push(p.clone());
    common_ring(&all)?;
    let ctx = Ctx::new(p.ring().arity(), order)?;
    let b = basis
        .iter()
        .map(|g| ctx.import(g))
        .collect::<Result<Vec<_>>>()?;
    let budget = Budget::unlimited();
    let r = Engine::normal_form(p.field(), ctx, b, ctx.import(p)?, &budget);
    Ok(ctx.export(p.ring(), &r))
}

/// `lcm/lt(f) * f - lcm/lt(g) * g` (leading terms scaled to cancel).
pub fn s_polynomial<F: Field>(f: &Poly<F>, g: &Poly<F>, order: MonomialOrder) -> Result<Poly<F>> {
    let (Some((mf, cf)), Some((mg, cg))) = (f.leading_term(order), g.leading_term(order)) else {
        return Err(Error::invalid("S-polynomial of the zero polynomial"));
    };
    let l = mf.lcm(mg);
    let field = f.field();
    let a = f.mul_monomial(&mf.quotient_of(&l).unwrap(), &field.inv(cf).unwrap());
    let b = g.mul_monomial(&mg.quotient_of(&l).unwrap(), &field.inv(cg).unwrap());
    a.try_sub(&b)
}

/// Buchberger's criterion: every S-polynomial reduces to zero.
pub fn is_groebner_basis<F: Field>(basis: &[Poly<F>], order: MonomialOrder) -> Result<bool> {
    let nz: Vec<Poly<F>> = basis.iter().filter(|b| !b.is_zero()).cloned().collect();
    for i in 0..nz.len() {
        for j in i + 1..nz.len() {
            if !normal_form(&s_polynomial(&nz[i], &nz[j], order)?, &nz, order)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{PrimeField, Rationals};
    use crate::mpoly::Ring;
    use proptest::prelude::*;

    #[test]
    fn small_unit_examples() {
        let r = Ring::new(Rationals, ["A"]).unwrap();
        let gens = vec![
            Poly::parse(&r, "2*A + 3").unwrap(),
            Poly::parse(&r, "A + 3").unwrap(),
        ];
        let gb = groebner_basis(&gens, MonomialOrder::Grevlex).unwrap();
        assert!(gb.is_unit());
        assert_eq!(gb.basis[0].to_string(), "1");
        let (v, _) = is_unit_ideal(&gens, MonomialOrder::Grevlex, &Budget::unlimited()).unwrap();
        assert_eq!(v, UnitVerdict::Unit);

        let r3 = Ring::new(PrimeField::new(3).unwrap(), ["A"]).unwrap();
        let gens3 = vec![
            Poly::parse(&r3, "2*A").unwrap(),
            Poly::parse(&r3, "A").unwrap(),
        ];
        let gb3 = groebner_basis(&gens3, MonomialOrder::Grevlex).unwrap();
        assert_eq!(
            gb3.basis.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            ["A"]
        );
        let (v3, _) = is_unit_ideal(&gens3, MonomialOrder::Grevlex, &Budget::unlimited()).unwrap();
        assert_eq!(v3, UnitVerdict::NotUnit);

        let one = vec![Poly::one(&r)];
        assert!(groebner_basis(&one, MonomialOrder::Grevlex)
            .unwrap()
            .is_unit());
        let (v0, _) =
            is_unit_ideal::<Rationals>(&[], MonomialOrder::Grevlex, &Budget::unlimited()).unwrap();
        assert_eq!(v0, UnitVerdict::NotUnit);
    }

    #[test]
    fn textbook_basis() {
        // x^2 - y, x^3 - x over QQ, lex-like elimination of x
        let r = Ring::new(Rationals, ["x", "y"]).unwrap();
        let p = |s: &str| Poly::parse(&r, s).unwrap();
        let order = MonomialOrder::BlockElimination { split: 1 };
        let gb = groebner_basis(&[p("x^2 - y"), p("x^3 - x")], order).unwrap();
        let shown: Vec<String> = gb.basis.iter().map(|g| g.to_string()).collect();
        assert_eq!(shown, ["y^2 - y", "x*y - x", "x^2 - y"]);
        assert!(is_groebner_basis(&gb.basis, order).unwrap());
        assert!(!is_groebner_basis(&[p("x^2 - y"), p("x^3 - x")], order).unwrap());
    }

    #[test]
    fn budgets_give_indeterminate() {
        let r = Ring::new(Rationals, ["a", "b", "c", "d"]).unwrap();
        let p = |s: &str| Poly::parse(&r, s).unwrap();
        let gens = [
            p("a + b + c + d"),
            p("a*b + b*c + c*d + d*a"),
            p("a*b*c + b*c*d + c*d*a + d*a*b"),
            p("a*b*c*d - 1"),
        ];
        let full = groebner_basis(&gens, MonomialOrder::Grevlex).unwrap();
        assert!(full.stats.pairs_processed > 2 && !full.is_unit());
        let budget = Budget {
            max_pairs: Some(2),
            ..Budget::unlimited()
        };
        match groebner_basis_with_budget(&gens, MonomialOrder::Grevlex, &budget).unwrap() {
            Outcome::Indeterminate { reason, .. } => assert_eq!(reason, BudgetExceeded::Pairs),
            Outcome::Done(_) => panic!("budget ignored"),
        }
        let (v, _) = is_unit_ideal(&gens, MonomialOrder::Grevlex, &budget).unwrap();
        assert_eq!(v, UnitVerdict::Indeterminate(BudgetExceeded::Pairs));
    }

    #[test]
    fn normal_form_and_spoly() {
        let r = Ring::new(Rationals, ["x", "y"]).unwrap();
        let p = |s: &str| Poly::parse(&r, s).unwrap();
        let nf = normal_form(
            &p("x^2*y + x*y^2 + y^2"),
            &[p("x*y - 1"), p("y^2 - 1")],
            MonomialOrder::Grevlex,
        )
        .unwrap();
        assert_eq!(nf, p("x + y + 1"));
        let s = s_polynomial(&p("x^2 - y"), &p("x*y - 1"), MonomialOrder::Grevlex).unwrap();
        assert_eq!(s, p("x - y^2"));
    }

    fn small_gens() -> impl Strategy<Value = Vec<Vec<(u32, u32, u32, i64)>>> {
        proptest::collection::vec(
            proptest::collection::vec((0u32..3, 0u32..3, 0u32..2, -3i64..4), 1..4),
            1..4,
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn output_is_reduced_groebner_basis(raw in small_gens()) {
            let field = PrimeField::new(7).unwrap();
            let r = Ring::new(field, ["x", "y", "z"]).unwrap();
            let gens: Vec<Poly<PrimeField>> = raw.iter().map(|ts| {
                Poly::from_terms(&r, ts.iter().map(|&(a, b, c, k)| {
                    (crate::mpoly::Monomial::from_exponents(vec![a, b, c]), field.from_i64(k))
                }))
            }).collect();
            for order in [MonomialOrder::Grevlex, MonomialOrder::BlockElimination { split: 1 }] {
                let gb = groebner_basis(&gens, order).unwrap();
                prop_assert!(is_groebner_basis(&gb.basis, order).unwrap());
                for g in &gens {
                    prop_assert!(normal_form(g, &gb.basis, order).unwrap().is_zero());
                }
                for (k, b) in gb.basis.iter().enumerate() {
                    let (lm, lc) = b.leading_term(order).unwrap();
                    prop_assert!(field.is_one(lc));
                    for (l, other) in gb.basis.iter().enumerate() {
                        if k != l {
                            let (om, _) = other.leading_term(order).unwrap();
                            prop_assert!(!om.divides(lm));
                            for (m, _) in b.terms() {
                                prop_assert!(!om.divides(m));
                            }
                        }
                    }
                }
                // deterministic
                let again = groebner_basis(&gens, order).unwrap();
                prop_assert_eq!(again.basis, gb.basis);
            }
        }
    }
}
