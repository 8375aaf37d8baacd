//! Bad primes of a degree: candidates from the denominators of unit
//! certificates over Q, then one campaign over F_p per candidate.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::time::Instant;

use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactnum::{is_prime, Characteristic, FactorEffort, Integer, Rationals};
use crate::groebner::{unit_certificate, CertificateOutcome};
use crate::ideals::{scenario_ideal, FamilyCache, IdealOptions};
use crate::pipeline::{run_campaign, BudgetSpec, CampaignConfig, Verdict, Witness};
use crate::scenario::{enumerate, Scenario};

#[derive(Debug, Clone, Copy)]
pub struct BadPrimeOptions {
    pub budget: BudgetSpec,
    pub jobs: usize,
    pub effort: FactorEffort,
}

impl Default for BadPrimeOptions {
    fn default() -> Self {
        BadPrimeOptions {
            budget: BudgetSpec::default(),
            jobs: 1,
            effort: FactorEffort::default(),
        }
    }
}

/// Where a candidate prime came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    /// First scenario (in enumeration order) whose certificate has it.
    pub first: Scenario,
    /// Number of certificates with the prime in a denominator.
    pub certificates: usize,
}

#[derive(Debug, Clone)]
pub struct CandidateSet {
    pub degree: usize,
    pub primes: BTreeMap<Integer, Provenance>,
    /// Denominator parts left unfactored, with their scenario.
    pub unfactored: Vec<(Scenario, Integer)>,
    /// Scenarios whose certificate computation ran out of budget.
    pub indeterminate: Vec<Scenario>,
    /// Some prime above 2^64 is only a probable prime.
    pub probabilistic: bool,
    pub elapsed_ms: u64,
}

impl CandidateSet {
    /// Every certificate was computed and fully factored.
    pub fn is_complete(&self) -> bool {
        self.unfactored.is_empty() && self.indeterminate.is_empty()
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))
}

/// Union of the denominator primes of the unit certificates of all scenario
/// ideals of degree `d` over Q.
pub fn candidate_primes(d: usize, options: &BadPrimeOptions) -> Result<CandidateSet> {
    let started = Instant::now();
    let scenarios: Vec<Scenario> = enumerate(d)?.filter(|s| s.type_of() > 0).collect();
    let cache = FamilyCache::new(Rationals);
    let outcomes: Vec<Result<CertificateOutcome>> = pool(options.jobs)?.install(|| {
        scenarios
            .par_iter()
            .map(|s| {
                let family = cache.get(d, s.type_of())?;
                let ideal = scenario_ideal(&family, s, IdealOptions::default())?;
                unit_certificate(
                    &ideal.generators,
                    ideal.order(),
                    &options.budget.start(),
                    options.effort,
                )
            })
            .collect()
    });
    let mut set = CandidateSet {
        degree: d,
        primes: BTreeMap::new(),
        unfactored: Vec::new(),
        indeterminate: Vec::new(),
        probabilistic: false,
        elapsed_ms: 0,
    };
    for (s, out) in scenarios.iter().zip(outcomes) {
        match out? {
            CertificateOutcome::Certificate(cert, _) => {
                for p in &cert.denominator_primes {
                    set.primes
                        .entry(p.clone())
                        .and_modify(|e| e.certificates += 1)
                        .or_insert_with(|| Provenance {
                            first: s.clone(),
                            certificates: 1,
                        });
                }
                set.unfactored
                    .extend(cert.unfactored.into_iter().map(|r| (s.clone(), r)));
                set.probabilistic |= cert.probabilistic;
            }
            CertificateOutcome::NotUnit(_) => return Err(Error::CharZeroCandidate(s.to_string())),
            CertificateOutcome::Indeterminate(..) => set.indeterminate.push(s.clone()),
        }
    }
    set.elapsed_ms = started.elapsed().as_millis() as u64;
    Ok(set)
}

#[derive(Debug, Clone, PartialEq)]
pub enum PrimeStatus {
    /// Some scenario ideal is not the unit ideal over F_p.
    Bad {
        scenario: Scenario,
        witness: Option<Witness>,
    },
    NotBad,
    Unresolved {
        reason: String,
    },
}

impl fmt::Display for PrimeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeStatus::Bad { scenario, .. } => write!(f, "bad {scenario}"),
            PrimeStatus::NotBad => write!(f, "not-bad"),
            PrimeStatus::Unresolved { reason } => write!(f, "unresolved {reason}"),
        }
    }
}

/// Decides one prime by a full campaign over F_p.
pub fn classify_prime(d: usize, p: &Integer, options: &BadPrimeOptions) -> Result<PrimeStatus> {
    let Some(p64) = p.to_u64().filter(|&v| v < 1 << 63) else {
        return Ok(PrimeStatus::Unresolved {
            reason: "prime exceeds the supported field size".into(),
        });
    };
    let mut cfg = CampaignConfig::new(d, Characteristic::prime(p64)?);
    cfg.budget = options.budget;
    let report = run_campaign(&cfg)?;
    Ok(match report.verdict {
        Verdict::NoCa => PrimeStatus::NotBad,
        Verdict::CaExists { scenario, witness } => PrimeStatus::Bad { scenario, witness },
        other => PrimeStatus::Unresolved {
            reason: other.to_string(),
        },
    })
}

#[derive(Debug, Clone)]
pub struct BadPrimeReport {
    pub degree: usize,
    pub candidates: CandidateSet,
    pub statuses: BTreeMap<Integer, PrimeStatus>,
    pub confirm_ms: u64,
}

impl BadPrimeReport {
    pub fn confirmed(&self) -> Vec<Integer> {
        self.statuses
            .iter()
            .filter(|(_, s)| matches!(s, PrimeStatus::Bad { .. }))
            .map(|(p, _)| p.clone())
            .collect()
    }

    pub fn unresolved(&self) -> Vec<Integer> {
        self.statuses
            .iter()
            .filter(|(_, s)| matches!(s, PrimeStatus::Unresolved { .. }))
            .map(|(p, _)| p.clone())
            .collect()
    }

    /// The confirmed set is exactly the set of bad primes.
    pub fn is_complete(&self) -> bool {
        self.candidates.is_complete() && self.unresolved().is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let c = &self.candidates;
        let _ = writeln!(out, "degree {}", self.degree);
        let _ = writeln!(
            out,
            "candidates: {} primes from certificates ({} ms)",
            c.primes.len(),
            c.elapsed_ms
        );
        let confirmed: Vec<String> = self.confirmed().iter().map(|p| p.to_string()).collect();
        let _ = writeln!(
            out,
            "bad primes ({}): {}",
            confirmed.len(),
            confirmed.join(",")
        );
        for (p, status) in &self.statuses {
            let prov = &c.primes[p];
            let _ = writeln!(
                out,
                "  {p}: {status} (from {}, {} certificates)",
                prov.first, prov.certificates
            );
        }
        for (s, r) in &c.unfactored {
            let _ = writeln!(out, "unfactored residue {r} in certificate of {s}");
        }
        for s in &c.indeterminate {
            let _ = writeln!(out, "no certificate within budget for {s}");
        }
        if self.is_complete() {
            let _ = writeln!(
                out,
                "complete: every prime outside the candidate set is not bad"
            );
        } else {
            let _ = writeln!(out, "incomplete: bad primes may be missing from this list");
        }
        if c.probabilistic {
            let _ = writeln!(out, "note: some candidate above 2^64 is a probable prime");
        }
        let _ = writeln!(out, "confirmation: {} ms", self.confirm_ms);
        out
    }

    /// One line per candidate prime: `prime status [scenario]`.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for (p, status) in &self.statuses {
            let _ = writeln!(out, "{p} {status}");
        }
        out
    }
}

/// Candidates, then a campaign over F_p for each of them.
pub fn bad_primes(d: usize, options: &BadPrimeOptions) -> Result<BadPrimeReport> {
    let candidates = candidate_primes(d, options)?;
    let started = Instant::now();
    let primes: Vec<Integer> = candidates.primes.keys().cloned().collect();
    let single = BadPrimeOptions {
        jobs: 1,
        ..*options
    };
    let results: Vec<Result<PrimeStatus>> = pool(options.jobs)?.install(|| {
        primes
            .par_iter()
            .map(|p| classify_prime(d, p, &single))
            .collect()
    });
    let mut statuses = BTreeMap::new();
    for (p, r) in primes.into_iter().zip(results) {
        statuses.insert(p, r?);
    }
    Ok(BadPrimeReport {
        degree: d,
        candidates,
        statuses,
        confirm_ms: started.elapsed().as_millis() as u64,
    })
}

#[derive(Debug, Clone)]
pub struct NonBadSearch {
    pub degree: usize,
    /// The answer, if the search got that far.
    pub prime: Option<u64>,
    /// Every prime tested, in order, with its outcome.
    pub tested: Vec<(u64, PrimeStatus)>,
}

/// Tests primes not dividing `d` in increasing order until one is not bad.
/// Stops at the first unresolved prime or past `limit`.
pub fn smallest_nonbad_prime(
    d: usize,
    limit: u64,
    options: &BadPrimeOptions,
) -> Result<NonBadSearch> {
    if d < 4 {
        return Err(Error::invalid(
            "the smallest non-bad prime search needs d >= 4",
        ));
    }
    let mut search = NonBadSearch {
        degree: d,
        prime: None,
        tested: Vec::new(),
    };
    for p in 2..=limit {
        if d as u64 % p == 0 || !is_prime(&Integer::from(p)) {
            continue;
        }
        let status = classify_prime(d, &Integer::from(p), options)?;
        let done = !matches!(status, PrimeStatus::Bad { .. });
        if status == PrimeStatus::NotBad {
            search.prime = Some(p);
        }
        search.tested.push((p, status));
        if done {
            break;
        }
    }
    Ok(search)
}
