//! Campaigns: decide every scenario ideal of a degree over one field, in
//! increasing type order, with an append-only checkpoint journal.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{Characteristic, Field, PrimeField, Rationals};
use crate::filters::{restricted_list, FilterConfig, FilterToggles};
use crate::groebner::{is_unit_ideal, Budget, UnitVerdict};
use crate::ideals::{scenario_ideal, FamilyCache, IdealOptions};
use crate::polycheck::{matching_roots, root_profile, scen_of, UniPoly};
use crate::scenario::{close_under_descendants, enumerate, sort_by_type, Scenario};

/// The prime used for degree-12 campaigns unless another is given.
pub const DEFAULT_CAMPAIGN_PRIME: u64 = 10_000_019;

/// Largest number of points tried when looking for a witness over a prime field.
pub const WITNESS_SEARCH_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pending,
    Trivial,
    Nontrivial,
    Indeterminate,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pending => "pending",
            Status::Trivial => "trivial",
            Status::Nontrivial => "nontrivial",
            Status::Indeterminate => "indeterminate",
        })
    }
}

/// Per-scenario limits; the wall-clock limit starts when the scenario does.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BudgetSpec {
    pub max_pairs: Option<u64>,
    pub max_coeff_bits: Option<u64>,
    pub seconds: Option<f64>,
}

impl BudgetSpec {
    /// Concrete budget for a computation starting now.
    pub fn start(&self) -> Budget {
        let mut b = Budget {
            max_pairs: self.max_pairs,
            max_coeff_bits: self.max_coeff_bits,
            deadline: None,
        };
        if let Some(s) = self.seconds {
            b = b.with_timeout(Duration::from_secs_f64(s.max(0.0)));
        }
        b
    }
}

/// Where the scenarios of a campaign come from.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioSource {
    Full,
    Filtered { toggles: FilterToggles, close: bool },
    List(Vec<Scenario>),
}

impl ScenarioSource {
    /// The scenario list, sorted by type; refuses lists that are not closed
    /// under descendants.
    pub fn resolve(&self, d: usize) -> Result<(Vec<Scenario>, String)> {
        let (mut list, label) = match self {
            ScenarioSource::Full => (enumerate(d)?.collect::<Vec<_>>(), "full".to_string()),
            ScenarioSource::Filtered { toggles, close } => {
                let cfg = FilterConfig {
                    degree: d,
                    toggles: *toggles,
                };
                let closed = if *close { " closed" } else { "" };
                (restricted_list(&cfg, *close)?, format!("{toggles}{closed}"))
            }
            ScenarioSource::List(list) => (list.clone(), "list".to_string()),
        };
        if let Some(s) = list.iter().find(|s| s.degree() != d) {
            return Err(Error::invalid(format!(
                "scenario {s} does not have degree {d}"
            )));
        }
        sort_by_type(&mut list);
        list.dedup();
        if !matches!(self, ScenarioSource::Full) {
            let closed = close_under_descendants(&list)?;
            if closed.len() != list.len() {
                let missing = closed
                    .iter()
                    .find(|s| list.binary_search_by(|c| cmp_typed(c, s)).is_err());
                return Err(Error::invalid(format!(
                    "scenario list is not closed under descendants (missing {}); filtered lists need closing",
                    missing.map(|s| s.to_string()).unwrap_or_default()
                )));
            }
        }
        Ok((list, label))
    }
}

fn cmp_typed(a: &Scenario, b: &Scenario) -> std::cmp::Ordering {
    a.type_of().cmp(&b.type_of()).then_with(|| a.cmp(b))
}

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub degree: usize,
    pub characteristic: Characteristic,
    pub source: ScenarioSource,
    pub budget: BudgetSpec,
    /// Worker threads; `0` lets the pool pick.
    pub jobs: usize,
    pub speedups: bool,
    pub checkpoint: Option<PathBuf>,
    /// Also run the types after the first one with a nontrivial scenario.
    pub exhaustive: bool,
    /// Stop after this many newly decided scenarios, leaving the rest pending.
    pub stop_after: Option<usize>,
    /// Highest type to run; higher scenarios stay pending.
    pub max_type: Option<usize>,
}

impl CampaignConfig {
    pub fn new(degree: usize, characteristic: Characteristic) -> Self {
        CampaignConfig {
            degree,
            characteristic,
            source: ScenarioSource::Full,
            budget: BudgetSpec::default(),
            jobs: 1,
            speedups: true,
            checkpoint: None,
            exhaustive: false,
            stop_after: None,
            max_type: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioState {
    pub scenario: Scenario,
    pub status: Status,
    pub ms: u64,
}

/// One row of the per-type summary.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TypeSummary {
    pub type_of: usize,
    pub scenarios: usize,
    pub trivial: usize,
    pub nontrivial: usize,
    pub indeterminate: usize,
    pub pending: usize,
    pub wall_ms: u64,
    /// Peak resident set size of the process after the type finished.
    pub peak_rss_kb: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignState {
    pub degree: usize,
    pub characteristic: Characteristic,
    pub source: String,
    pub entries: Vec<ScenarioState>,
    pub types: Vec<TypeSummary>,
}

impl CampaignState {
    pub fn status_of(&self, s: &Scenario) -> Option<Status> {
        self.entries
            .iter()
            .find(|e| &e.scenario == s)
            .map(|e| e.status)
    }

    pub fn count(&self, status: Status) -> usize {
        self.entries.iter().filter(|e| e.status == status).count()
    }

    /// Type, count and timing table with the peak memory column.
    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>4}  {:>9}  {:>8}  {:>10}  {:>13}  {:>8}  {:>10}  {:>10}",
            "type",
            "scenarios",
            "trivial",
            "nontrivial",
            "indeterminate",
            "pending",
            "time",
            "peak mem"
        );
        for t in &self.types {
            let mem = t.peak_rss_kb.map(format_kb).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "{:>4}  {:>9}  {:>8}  {:>10}  {:>13}  {:>8}  {:>10}  {:>10}",
                t.type_of,
                t.scenarios,
                t.trivial,
                t.nontrivial,
                t.indeterminate,
                t.pending,
                format_ms(t.wall_ms),
                mem
            );
        }
        out
    }
}

fn format_ms(ms: u64) -> String {
    if ms < 1000 {
        format!("{ms} ms")
    } else if ms < 120_000 {
        format!("{:.1} s", ms as f64 / 1000.0)
    } else {
        format!("{:.1} min", ms as f64 / 60_000.0)
    }
}

fn format_kb(kb: u64) -> String {
    if kb < 10 * 1024 {
        format!("{kb} kB")
    } else {
        format!("{} MB", kb / 1024)
    }
}

/// A concrete polynomial over the campaign's prime field matching a
/// nontrivial scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub scenario: Scenario,
    /// Values of the ring variables, by name.
    pub point: Vec<(String, u64)>,
    /// Coefficients of the polynomial, constant term first.
    pub coefficients: Vec<u64>,
    /// Roots taking labels `0..=t` of the scenario.
    pub labels: Vec<u64>,
    /// The polynomial's own scenario.
    pub own_scenario: Scenario,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// Every scenario ideal is the unit ideal.
    NoCa,
    /// The first nontrivial scenario in campaign order.
    CaExists {
        scenario: Scenario,
        witness: Option<Witness>,
    },
    Indeterminate {
        scenarios: Vec<Scenario>,
    },
    /// Stopped early; `pending` scenarios were not run.
    Incomplete {
        pending: usize,
    },
}

impl Verdict {
    /// Process exit code for this verdict.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::NoCa => 0,
            Verdict::CaExists { .. } => 1,
            Verdict::Indeterminate { .. } | Verdict::Incomplete { .. } => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::NoCa => write!(f, "no CA"),
            Verdict::CaExists { scenario, .. } => write!(f, "CA exists (scenario {scenario})"),
            Verdict::Indeterminate { scenarios } => write!(
                f,
                "indeterminate ({} scenarios over budget)",
                scenarios.len()
            ),
            Verdict::Incomplete { pending } => {
                write!(f, "incomplete ({pending} scenarios pending)")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct CampaignReport {
    pub state: CampaignState,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct JournalHeader {
    journal: String,
    degree: usize,
    characteristic: u64,
    source: String,
    scenarios: usize,
    speedups: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct JournalRecord {
    scenario: String,
    status: Status,
    ms: u64,
}

const JOURNAL_TAG: &str = "casas-campaign";

/// Replays a journal into `(scenario, status, ms)` records after checking
/// that its header fits the campaign.
fn replay_journal(path: &Path, expected: &JournalHeader) -> Result<Vec<ScenarioState>> {
    let file = File::open(path)?;
    let mut out = Vec::new();
    let err = |line: usize, msg: String| Error::Journal {
        path: path.display().to_string(),
        line,
        msg,
    };
    for (k, line) in BufReader::new(file).lines().enumerate() {
        let n = k + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if n == 1 {
            let header: JournalHeader =
                serde_json::from_str(&line).map_err(|e| err(n, format!("bad header: {e}")))?;
            if &header != expected {
                return Err(err(
                    n,
                    format!("header {line} does not match this campaign"),
                ));
            }
            continue;
        }
        let rec: JournalRecord = serde_json::from_str(&line).map_err(|e| err(n, e.to_string()))?;
        let scenario: Scenario = rec
            .scenario
            .parse()
            .map_err(|e: Error| err(n, e.to_string()))?;
        if rec.status == Status::Pending {
            return Err(err(n, "pending is not a recorded outcome".into()));
        }
        out.push(ScenarioState {
            scenario,
            status: rec.status,
            ms: rec.ms,
        });
    }
    Ok(out)
}

fn peak_rss_kb() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

fn cost_estimate(s: &Scenario, d: usize) -> usize {
    let leading = (2..d).take_while(|&j| s.at(j) == 0).count();
    d - 3 - leading.min(d - 3)
}

/// Runs a campaign and returns its final state and verdict.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignReport> {
    match config.characteristic {
        Characteristic::Zero => run_in_field(Rationals, config),
        Characteristic::Prime(p) => {
            let field = PrimeField::new(p)?;
            let mut report = run_in_field(field.clone(), config)?;
            if let Verdict::CaExists { scenario, witness } = &mut report.verdict {
                *witness = find_witness(&field, scenario, config.speedups)?;
            }
            Ok(report)
        }
    }
}

fn run_in_field<F: Field>(field: F, config: &CampaignConfig) -> Result<CampaignReport> {
    let d = config.degree;
    let (list, source) = config.source.resolve(d)?;
    let index: HashMap<Scenario, usize> = list
        .iter()
        .cloned()
        .enumerate()
        .map(|(k, s)| (s, k))
        .collect();
    let mut entries: Vec<ScenarioState> = list
        .iter()
        .map(|s| ScenarioState {
            scenario: s.clone(),
            status: Status::Pending,
            ms: 0,
        })
        .collect();

    let header = JournalHeader {
        journal: JOURNAL_TAG.into(),
        degree: d,
        characteristic: config.characteristic.as_u64(),
        source: source.clone(),
        scenarios: list.len(),
        speedups: config.speedups,
    };
    let mut journal = None;
    if let Some(path) = &config.checkpoint {
        let fresh = std::fs::metadata(path)
            .map(|m| m.len() == 0)
            .unwrap_or(true);
        if !fresh {
            for rec in replay_journal(path, &header)? {
                let Some(&k) = index.get(&rec.scenario) else {
                    return Err(Error::Journal {
                        path: path.display().to_string(),
                        line: 0,
                        msg: format!("scenario {} is not part of this campaign", rec.scenario),
                    });
                };
                entries[k] = rec;
            }
        }
        let mut file = OpenOptions::new().create(true).append(true).open(path)?;
        if fresh {
            writeln!(
                file,
                "{}",
                serde_json::to_string(&header).expect("header serializes")
            )?;
            file.flush()?;
        }
        journal = Some(Mutex::new(file));
    }

    let max_t = list.iter().map(|s| s.type_of()).max().unwrap_or(0);
    let pending_by_type: Vec<AtomicUsize> = (0..=max_t)
        .map(|t| {
            AtomicUsize::new(
                entries
                    .iter()
                    .filter(|e| e.scenario.type_of() == t && e.status == Status::Pending)
                    .count(),
            )
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    let cache = FamilyCache::new(field);
    let options = IdealOptions {
        speedups: config.speedups,
    };
    let decided = AtomicUsize::new(0);
    let stopped = AtomicBool::new(false);
    let mut types = Vec::new();

    for t in 0..=max_t {
        let in_type: Vec<usize> = (0..entries.len())
            .filter(|&k| entries[k].scenario.type_of() == t)
            .collect();
        let mut summary = TypeSummary {
            type_of: t,
            scenarios: in_type.len(),
            ..TypeSummary::default()
        };
        let blocked = stopped.load(Ordering::SeqCst)
            || config.max_type.is_some_and(|m| t > m)
            || (!config.exhaustive && entries.iter().any(|e| e.status == Status::Nontrivial));
        let mut tasks: Vec<usize> = in_type
            .iter()
            .copied()
            .filter(|&k| entries[k].status == Status::Pending)
            .collect();
        if !blocked && !tasks.is_empty() {
            tasks.sort_by_key(|&k| (cost_estimate(&entries[k].scenario, d), k));
            let started = Instant::now();
            let results: Vec<Result<Option<(usize, Status, u64)>>> = pool.install(|| {
                tasks
                    .par_iter()
                    .map(|&k| {
                        let s = &entries[k].scenario;
                        assert!(
                            pending_by_type[..t]
                                .iter()
                                .all(|c| c.load(Ordering::SeqCst) == 0),
                            "type {t} scenario {s} started before lower types finished"
                        );
                        if let Some(limit) = config.stop_after {
                            if decided.fetch_add(1, Ordering::SeqCst) >= limit {
                                stopped.store(true, Ordering::SeqCst);
                                return Ok(None);
                            }
                        }
                        let clock = Instant::now();
                        let status = decide(&cache, s, options, &config.budget)?;
                        let ms = clock.elapsed().as_millis() as u64;
                        if let Some(j) = &journal {
                            let rec = JournalRecord {
                                scenario: s.to_string(),
                                status,
                                ms,
                            };
                            let mut file = j.lock().unwrap();
                            writeln!(
                                file,
                                "{}",
                                serde_json::to_string(&rec).expect("record serializes")
                            )?;
                            file.flush()?;
                        }
                        pending_by_type[t].fetch_sub(1, Ordering::SeqCst);
                        Ok(Some((k, status, ms)))
                    })
                    .collect()
            });
            summary.wall_ms = started.elapsed().as_millis() as u64;
            for r in results {
                if let Some((k, status, ms)) = r? {
                    entries[k].status = status;
                    entries[k].ms = ms;
                }
            }
        } else {
            summary.wall_ms = in_type.iter().map(|&k| entries[k].ms).sum();
        }
        for &k in &in_type {
            match entries[k].status {
                Status::Pending => summary.pending += 1,
                Status::Trivial => summary.trivial += 1,
                Status::Nontrivial => summary.nontrivial += 1,
                Status::Indeterminate => summary.indeterminate += 1,
            }
        }
        summary.peak_rss_kb = peak_rss_kb();
        types.push(summary);
    }

    let pending = entries
        .iter()
        .filter(|e| e.status == Status::Pending)
        .count();
    let verdict = if stopped.load(Ordering::SeqCst) {
        Verdict::Incomplete { pending }
    } else if let Some(e) = entries.iter().find(|e| e.status == Status::Nontrivial) {
        Verdict::CaExists {
            scenario: e.scenario.clone(),
            witness: None,
        }
    } else if pending > 0 {
        Verdict::Incomplete { pending }
    } else if entries.iter().any(|e| e.status == Status::Indeterminate) {
        Verdict::Indeterminate {
            scenarios: entries
                .iter()
                .filter(|e| e.status == Status::Indeterminate)
                .map(|e| e.scenario.clone())
                .collect(),
        }
    } else {
        Verdict::NoCa
    };
    Ok(CampaignReport {
        state: CampaignState {
            degree: d,
            characteristic: config.characteristic,
            source,
            entries,
            types,
        },
        verdict,
    })
}

fn decide<F: Field>(
    cache: &FamilyCache<F>,
    s: &Scenario,
    options: IdealOptions,
    budget: &BudgetSpec,
) -> Result<Status> {
    let t = s.type_of();
    if t == 0 {
        // only x^d, a power of a linear polynomial
        return Ok(Status::Trivial);
    }
    let family = cache.get(s.degree(), t)?;
    let ideal = scenario_ideal(&family, s, options)?;
    let (verdict, _) = is_unit_ideal(&ideal.generators, ideal.order(), &budget.start())?;
    Ok(match verdict {
        UnitVerdict::Unit => Status::Trivial,
        UnitVerdict::NotUnit => Status::Nontrivial,
        UnitVerdict::Indeterminate(_) => Status::Indeterminate,
    })
}

/// Searches the points of a nontrivial scenario ideal over a small prime
/// field for a polynomial that `polycheck` confirms matches the scenario.
pub fn find_witness(field: &PrimeField, s: &Scenario, speedups: bool) -> Result<Option<Witness>> {
    let t = s.type_of();
    if t == 0 {
        return Ok(None);
    }
    let family = crate::ideals::Family::new(field.clone(), s.degree(), t)?;
    let ideal = scenario_ideal(&family, s, IdealOptions { speedups })?;
    let p = field.modulus();
    let n = ideal.ring.arity() as u32;
    let Some(total) = p.checked_pow(n).filter(|&c| c <= WITNESS_SEARCH_LIMIT) else {
        return Ok(None);
    };
    let mut point = vec![0u64; n as usize];
    for mut code in 0..total {
        for v in point.iter_mut() {
            *v = code % p;
            code /= p;
        }
        if !ideal
            .generators
            .iter()
            .all(|g| g.evaluate(&point).map(|v| v == 0).unwrap_or(false))
        {
            continue;
        }
        let f = UniPoly::new(field.clone(), family.instantiate(&point)?);
        let Ok(profile) = root_profile(&f) else {
            continue;
        };
        let Ok(Some(labels)) = matching_roots(&profile, s) else {
            continue;
        };
        let (own, _) = scen_of(&profile)?;
        return Ok(Some(Witness {
            scenario: s.clone(),
            point: ideal
                .ring
                .vars()
                .iter()
                .cloned()
                .zip(point.iter().copied())
                .collect(),
            coefficients: f.coeffs().to_vec(),
            labels,
            own_scenario: own,
        }));
    }
    Ok(None)
}

/// Convenience wrapper: one degree, one characteristic, one scenario source.
pub fn verify_degree(
    d: usize,
    characteristic: Characteristic,
    source: ScenarioSource,
    budget: BudgetSpec,
) -> Result<CampaignReport> {
    let mut cfg = CampaignConfig::new(d, characteristic);
    cfg.source = source;
    cfg.budget = budget;
    run_campaign(&cfg)
}

/// The degree-12 slice: closed delta and divisibility filtered list, types
/// `1..=max_type`, one prime throughout.
pub fn degree12_campaign(
    p: u64,
    max_type: usize,
    jobs: usize,
    checkpoint: Option<PathBuf>,
) -> Result<CampaignReport> {
    let mut cfg = CampaignConfig::new(12, Characteristic::prime(p)?);
    cfg.source = ScenarioSource::Filtered {
        toggles: FilterToggles::standard(),
        close: true,
    };
    cfg.max_type = Some(max_type);
    cfg.jobs = jobs;
    cfg.checkpoint = checkpoint;
    run_campaign(&cfg)
}
