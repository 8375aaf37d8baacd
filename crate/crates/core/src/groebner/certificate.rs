use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::engine::EngineOutcome;
use super::{run_engine, Budget, BudgetExceeded, Stats};
use crate::error::Result;
use crate::exactnum::{factor, FactorEffort, Integer, Rationals};
use crate::mpoly::{MonomialOrder, Poly};

/// Cofactors `g_i` with `sum g_i * f_i = 1`, plus the primes dividing
/// their coefficient denominators.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub cofactors: Vec<Poly<Rationals>>,
    pub denominator_primes: BTreeSet<Integer>,
    /// Denominator parts that could not be factored within the effort bound.
    pub unfactored: Vec<Integer>,
    /// Some prime above 2^64 was accepted on a probabilistic test.
    pub probabilistic: bool,
}

impl Certificate {
    /// `true` when every denominator was fully factored.
    pub fn is_complete(&self) -> bool {
        self.unfactored.is_empty()
    }

    /// Recomputes `sum g_i * f_i` exactly and compares with `1`.
    pub fn verify(&self, gens: &[Poly<Rationals>]) -> bool {
        if gens.len() != self.cofactors.len() || gens.is_empty() {
            return false;
        }
        let mut acc = Poly::zero(gens[0].ring());
        for (g, f) in self.cofactors.iter().zip(gens) {
            match g.try_mul(f).and_then(|t| acc.try_add(&t)) {
                Ok(s) => acc = s,
                Err(_) => return false,
            }
        }
        acc == Poly::one(gens[0].ring())
    }

    /// Cofactors in the polynomial text form, one per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, g) in self.cofactors.iter().enumerate() {
            let _ = writeln!(out, "g{}: {}", k + 1, g);
        }
        let primes: Vec<String> = self
            .denominator_primes
            .iter()
            .map(|p| p.to_string())
            .collect();
        let _ = writeln!(out, "denominator primes: {}", primes.join(","));
        out
    }
}

#[derive(Debug, Clone)]
pub enum CertificateOutcome {
    Certificate(Certificate, Stats),
    NotUnit(Stats),
    Indeterminate(BudgetExceeded, Stats),
}

/// Runs the basis computation with cofactor tracking and, for a unit
/// ideal, returns a verified certificate.
pub fn unit_certificate(
    gens: &[Poly<Rationals>],
    order: MonomialOrder,
    budget: &Budget,
    effort: FactorEffort,
) -> Result<CertificateOutcome> {
    let run = run_engine(gens, order, budget, true)?;
    let (basis, cofs) = match run.outcome {
        EngineOutcome::Exceeded(r) => return Ok(CertificateOutcome::Indeterminate(r, run.stats)),
        EngineOutcome::Done {
            basis,
            unit_cofactors,
        } => (basis, unit_cofactors),
    };
    let one = run.ctx.one();
    let is_unit = basis.len() == 1 && basis[0].len() == 1 && basis[0][0].0 == one;
    let Some(cofs) = cofs.filter(|_| is_unit) else {
        return Ok(CertificateOutcome::NotUnit(run.stats));
    };
    // the basis element is the constant 1, so the cofactors need no rescaling
    let ring = gens[0].ring();
    let cofactors: Vec<Poly<Rationals>> = cofs.iter().map(|c| run.ctx.export(ring, c)).collect();

    let mut denominators: BTreeMap<Integer, ()> = BTreeMap::new();
    for g in &cofactors {
        for (_, c) in g.terms() {
            if *c.denom() != Integer::from(1) {
                denominators.insert(c.denom().clone(), ());
            }
        }
    }
    let mut primes = BTreeSet::new();
    let mut unfactored = Vec::new();
    let mut probabilistic = false;
    for d in denominators.keys() {
        let f = factor(d, effort);
        primes.extend(f.primes().cloned());
        probabilistic |= f.probabilistic;
        if let Some(r) = f.residue {
            unfactored.push(r);
        }
    }
    let cert = Certificate {
        cofactors,
        denominator_primes: primes,
        unfactored,
        probabilistic,
    };
    assert!(cert.verify(gens), "certificate identity failed to verify");
    Ok(CertificateOutcome::Certificate(cert, run.stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpoly::Ring;

    #[test]
    fn linear_certificate() {
        let r = Ring::new(Rationals, ["A"]).unwrap();
        let gens = vec![
            Poly::parse(&r, "2*A + 3").unwrap(),
            Poly::parse(&r, "A + 3").unwrap(),
        ];
        let out = unit_certificate(
            &gens,
            MonomialOrder::Grevlex,
            &Budget::unlimited(),
            FactorEffort::default(),
        )
        .unwrap();
        let CertificateOutcome::Certificate(c, _) = out else {
            panic!("expected a certificate")
        };
        let shown: Vec<String> = c.cofactors.iter().map(|g| g.to_string()).collect();
        assert_eq!(shown, ["-1/3", "2/3"]);
        assert_eq!(
            c.denominator_primes
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>(),
            ["3"]
        );
        assert!(c.is_complete() && c.verify(&gens));
    }

    #[test]
    fn trivial_and_non_unit() {
        let r = Ring::new(Rationals, ["A"]).unwrap();
        let out = unit_certificate(
            &[Poly::one(&r)],
            MonomialOrder::Grevlex,
            &Budget::unlimited(),
            FactorEffort::default(),
        )
        .unwrap();
        let CertificateOutcome::Certificate(c, _) = out else {
            panic!("expected a certificate")
        };
        assert_eq!(c.cofactors[0].to_string(), "1");
        assert!(c.denominator_primes.is_empty());

        let gens = vec![
            Poly::parse(&r, "A^2").unwrap(),
            Poly::parse(&r, "A^3 + A^2").unwrap(),
        ];
        let out = unit_certificate(
            &gens,
            MonomialOrder::Grevlex,
            &Budget::unlimited(),
            FactorEffort::default(),
        )
        .unwrap();
        assert!(matches!(out, CertificateOutcome::NotUnit(_)));
    }

    #[test]
    fn zero_generators_get_zero_cofactors() {
        let r = Ring::new(Rationals, ["A", "B"]).unwrap();
        let gens = vec![
            Poly::zero(&r),
            Poly::parse(&r, "A*B - 1").unwrap(),
            Poly::parse(&r, "A").unwrap(),
        ];
        let out = unit_certificate(
            &gens,
            MonomialOrder::Grevlex,
            &Budget::unlimited(),
            FactorEffort::default(),
        )
        .unwrap();
        let CertificateOutcome::Certificate(c, _) = out else {
            panic!("expected a certificate")
        };
        assert!(c.cofactors[0].is_zero());
        assert!(c.verify(&gens));
    }
}
