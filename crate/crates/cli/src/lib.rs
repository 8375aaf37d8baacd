//! Command-line front end. Every subcommand parses its flags, calls one
//! library entry point and prints the result.
//!
//! Exit codes: 0 no CA-polynomial found (or a pure computation succeeded),
//! 1 a CA witness was found, 2 indeterminate or incomplete, 64 usage error.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use casas::badprimes::{bad_primes, smallest_nonbad_prime, BadPrimeOptions, PrimeStatus};
use casas::exactnum::{Characteristic, PrimeField, Rationals};
use casas::filters::{delta_det, delta_det_integer, restricted_list, FilterConfig, FilterToggles};
use casas::pipeline::{run_campaign, BudgetSpec, CampaignConfig, ScenarioSource, Verdict};
use casas::polycheck::{analyze, matches, parse_coefficients, parse_root_list, RootField, UniPoly};
use casas::scenario::{
    counts_by_type, enumerate, format_scenario_file, parse_scenario_file, Scenario,
};
use casas::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CA: i32 = 1;
pub const EXIT_INDETERMINATE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

const VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    "\norder: A block eliminated first, grevlex inside each block",
    "\nstrategy: Buchberger, normal selection, Gebauer-Moller pair pruning",
    "\ninputs: inserted smallest leading monomial first",
    "\nbudgets: unlimited unless --budget-pairs / --budget-seconds",
    "\nspeedups: P_t = 1, leading A variables, P_1 factor removal",
    "\ndegree-12 default prime: 10000019"
);

#[derive(Debug, Parser)]
#[command(name = "casas", version = VERSION, about = "Scenario-based verification of the Casas-Alvero conjecture")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Jsonl,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List or count the scenarios of a degree.
    Scenarios {
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        count_by_type: bool,
    },
    /// Apply scenario filters and report per-type counts.
    Filter {
        #[arg(long)]
        degree: usize,
        #[command(flatten)]
        filters: FilterArgs,
        /// Write the resulting list to this file.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Decide every scenario ideal of a degree in one characteristic.
    Verify(VerifyArgs),
    /// Candidate primes from certificates over Q, each confirmed over F_p.
    BadPrimes {
        #[arg(long)]
        degree: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// The smallest prime not dividing the degree that is not bad.
    SmallestNonbad {
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 1000)]
        limit: u64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Root profile, CA property, type and scenario of one polynomial.
    CheckPoly {
        #[arg(long = "char", default_value = "0")]
        characteristic: Characteristic,
        /// Roots with multiplicities, e.g. `0:1,1:4,8:1,18:1`.
        #[arg(long, conflicts_with = "coeffs", required_unless_present = "coeffs")]
        roots: Option<String>,
        /// Coefficients, leading coefficient first.
        #[arg(long)]
        coeffs: Option<String>,
        /// Also test matching against this scenario.
        #[arg(long)]
        scenario: Option<Scenario>,
    },
    /// Delta determinants for degrees one above a prime.
    Delta {
        #[arg(long)]
        degree: usize,
        /// List the index pairs whose determinant vanishes.
        #[arg(long)]
        pairs: bool,
        /// Determinant for these indices, e.g. `3,8`.
        #[arg(long, value_delimiter = ',')]
        indices: Vec<usize>,
    },
}

#[derive(Debug, Args)]
struct FilterArgs {
    /// Comma separated subset of delta,divisibility,hightype.
    #[arg(long, default_value = "none")]
    filters: FilterToggles,
    /// Close the list under descendants.
    #[arg(long)]
    close: bool,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    budget_pairs: Option<u64>,
    #[arg(long)]
    budget_seconds: Option<f64>,
}

impl RunArgs {
    fn budget(&self) -> BudgetSpec {
        BudgetSpec {
            max_pairs: self.budget_pairs,
            max_coeff_bits: None,
            seconds: self.budget_seconds,
        }
    }
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    degree: usize,
    #[arg(long = "char")]
    characteristic: Characteristic,
    #[command(flatten)]
    filters: FilterArgs,
    /// Scenario list to verify instead of the enumeration; must be closed.
    #[arg(long, conflicts_with = "filters")]
    scenario_file: Option<PathBuf>,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long)]
    max_type: Option<usize>,
    /// Keep going after a type with a nontrivial scenario.
    #[arg(long)]
    exhaustive: bool,
    /// Build the plain ideals without the substitution shortcuts.
    #[arg(long)]
    no_speedups: bool,
    #[command(flatten)]
    run: RunArgs,
}

/// Runs one command line (including the program name) and returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(out, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    EXIT_OK
                }
                _ => EXIT_USAGE,
            };
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) | Error::Parse(_) => EXIT_USAGE,
        Error::CharZeroCandidate(_) => EXIT_CA,
        _ => EXIT_INDETERMINATE,
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32, Error> {
    let jsonl = cli.format == Format::Jsonl;
    match &cli.command {
        Command::Scenarios {
            degree,
            count_by_type,
        } => {
            let all: Vec<Scenario> = enumerate(*degree)?.collect();
            if *count_by_type {
                print_counts(out, &all, *degree, jsonl)?;
            } else if jsonl {
                for s in &all {
                    writeln!(
                        out,
                        "{}",
                        json!({"scenario": s.to_string(), "type": s.type_of()})
                    )
                    .map_err(io)?;
                }
            } else {
                write!(out, "{}", format_scenario_file(&all)).map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::Filter {
            degree,
            filters,
            output,
        } => {
            let cfg = FilterConfig {
                degree: *degree,
                toggles: filters.filters,
            };
            let list = restricted_list(&cfg, filters.close)?;
            print_counts(out, &list, *degree, jsonl)?;
            if let Some(path) = output {
                std::fs::write(path, format_scenario_file(&list))?;
            }
            Ok(EXIT_OK)
        }
        Command::Verify(args) => verify(args, out, jsonl),
        Command::BadPrimes { degree, run } => {
            let options = BadPrimeOptions {
                budget: run.budget(),
                jobs: run.jobs,
                ..BadPrimeOptions::default()
            };
            let report = bad_primes(*degree, &options)?;
            if jsonl {
                for (p, status) in &report.statuses {
                    let (name, scenario) = match status {
                        PrimeStatus::Bad { scenario, .. } => ("bad", Some(scenario.to_string())),
                        PrimeStatus::NotBad => ("not-bad", None),
                        PrimeStatus::Unresolved { .. } => ("unresolved", None),
                    };
                    writeln!(
                        out,
                        "{}",
                        json!({"prime": p.to_string(), "status": name, "scenario": scenario})
                    )
                    .map_err(io)?;
                }
                writeln!(
                    out,
                    "{}",
                    json!({"degree": degree, "complete": report.is_complete()})
                )
                .map_err(io)?;
            } else {
                write!(out, "{}", report.to_text()).map_err(io)?;
            }
            Ok(if report.is_complete() {
                EXIT_OK
            } else {
                EXIT_INDETERMINATE
            })
        }
        Command::SmallestNonbad { degree, limit, run } => {
            let options = BadPrimeOptions {
                budget: run.budget(),
                jobs: run.jobs,
                ..BadPrimeOptions::default()
            };
            let search = smallest_nonbad_prime(*degree, *limit, &options)?;
            for (p, status) in &search.tested {
                if jsonl {
                    writeln!(out, "{}", json!({"prime": p, "status": status.to_string()}))
                        .map_err(io)?;
                } else {
                    writeln!(out, "{p}: {status}").map_err(io)?;
                }
            }
            match search.prime {
                Some(p) => {
                    writeln!(out, "smallest non-bad prime for degree {degree}: {p}").map_err(io)?;
                    Ok(EXIT_OK)
                }
                None => {
                    writeln!(out, "no non-bad prime found up to {limit}").map_err(io)?;
                    Ok(EXIT_INDETERMINATE)
                }
            }
        }
        Command::CheckPoly {
            characteristic,
            roots,
            coeffs,
            scenario,
        } => match characteristic {
            Characteristic::Zero => check_poly(Rationals, roots, coeffs, scenario, out, jsonl),
            Characteristic::Prime(p) => {
                check_poly(PrimeField::new(*p)?, roots, coeffs, scenario, out, jsonl)
            }
        },
        Command::Delta {
            degree,
            pairs,
            indices,
        } => {
            let p = degree
                .checked_sub(1)
                .filter(|&p| p >= 2 && casas::exactnum::is_prime(&(p as u64).into()))
                .ok_or_else(|| {
                    Error::InvalidArgument(format!("degree {degree} is not one more than a prime"))
                })? as u64;
            if !indices.is_empty() {
                let det = delta_det_integer(indices)?;
                let m = delta_det(indices, p)?;
                writeln!(out, "det = {det}, mod {p} = {m}").map_err(io)?;
            }
            if *pairs {
                for a in 2..*degree - 1 {
                    for b in a + 1..*degree - 1 {
                        if delta_det(&[a, b], p)? == 0 {
                            if jsonl {
                                writeln!(out, "{}", json!({"pair": [a, b]})).map_err(io)?;
                            } else {
                                writeln!(out, "({a},{b})").map_err(io)?;
                            }
                        }
                    }
                }
            }
            Ok(EXIT_OK)
        }
    }
}

fn print_counts(
    out: &mut dyn Write,
    list: &[Scenario],
    d: usize,
    jsonl: bool,
) -> Result<(), Error> {
    let counts = counts_by_type(list, d);
    if jsonl {
        for (t, c) in counts.iter().enumerate() {
            writeln!(out, "{}", json!({"type": t, "count": c})).map_err(io)?;
        }
        writeln!(out, "{}", json!({"total": list.len()})).map_err(io)?;
    } else {
        for (t, c) in counts.iter().enumerate() {
            writeln!(out, "type {t}: {c}").map_err(io)?;
        }
        let joined: Vec<String> = counts.iter().map(|c| c.to_string()).collect();
        writeln!(out, "counts: {}", joined.join(",")).map_err(io)?;
        writeln!(out, "total: {}", list.len()).map_err(io)?;
    }
    Ok(())
}

fn verify(args: &VerifyArgs, out: &mut dyn Write, jsonl: bool) -> Result<i32, Error> {
    let mut cfg = CampaignConfig::new(args.degree, args.characteristic);
    cfg.source = if let Some(path) = &args.scenario_file {
        ScenarioSource::List(parse_scenario_file(&std::fs::read_to_string(path)?)?)
    } else if args.filters.filters.any() {
        ScenarioSource::Filtered {
            toggles: args.filters.filters,
            close: args.filters.close,
        }
    } else {
        ScenarioSource::Full
    };
    cfg.budget = args.run.budget();
    cfg.jobs = args.run.jobs;
    cfg.checkpoint = args.checkpoint.clone();
    cfg.max_type = args.max_type;
    cfg.exhaustive = args.exhaustive;
    cfg.speedups = !args.no_speedups;
    let report = run_campaign(&cfg)?;
    let state = &report.state;
    if jsonl {
        for t in &state.types {
            writeln!(
                out,
                "{}",
                json!({"type": t.type_of, "scenarios": t.scenarios, "trivial": t.trivial,
                       "nontrivial": t.nontrivial, "indeterminate": t.indeterminate,
                       "pending": t.pending, "ms": t.wall_ms, "peak_rss_kb": t.peak_rss_kb})
            )
            .map_err(io)?;
        }
    } else {
        writeln!(
            out,
            "degree {} over characteristic {} ({} scenarios, source {})",
            state.degree,
            state.characteristic,
            state.entries.len(),
            state.source
        )
        .map_err(io)?;
        write!(out, "{}", state.summary_table()).map_err(io)?;
    }
    let witness = match &report.verdict {
        Verdict::CaExists {
            witness: Some(w), ..
        } => Some(w),
        _ => None,
    };
    if jsonl {
        let mut v =
            json!({"verdict": report.verdict.to_string(), "exit": report.verdict.exit_code()});
        if let Verdict::CaExists { scenario, .. } = &report.verdict {
            v["scenario"] = json!(scenario.to_string());
        }
        if let Some(w) = witness {
            v["witness"] = json!({"point": w.point, "coefficients": w.coefficients, "own_scenario": w.own_scenario.to_string()});
        }
        writeln!(out, "{v}").map_err(io)?;
    } else {
        writeln!(out, "verdict: {}", report.verdict).map_err(io)?;
        if let Some(w) = witness {
            let point: Vec<String> = w.point.iter().map(|(v, x)| format!("{v}={x}")).collect();
            let f = UniPoly::new(
                PrimeField::new(state.characteristic.as_u64())?,
                w.coefficients.clone(),
            );
            writeln!(out, "witness point: {}", point.join(", ")).map_err(io)?;
            writeln!(
                out,
                "witness polynomial: {f} (own scenario {})",
                w.own_scenario
            )
            .map_err(io)?;
        } else if matches!(report.verdict, Verdict::CaExists { .. }) {
            writeln!(
                out,
                "no witness point over the prime field within the search bound"
            )
            .map_err(io)?;
        }
        if matches!(report.verdict, Verdict::CaExists { .. }) && args.degree == 12 {
            writeln!(
                out,
                "a nontrivial ideal mod p does not disprove anything; retry with a different prime"
            )
            .map_err(io)?;
        }
    }
    Ok(report.verdict.exit_code())
}

fn check_poly<F: RootField>(
    field: F,
    roots: &Option<String>,
    coeffs: &Option<String>,
    scenario: &Option<Scenario>,
    out: &mut dyn Write,
    jsonl: bool,
) -> Result<i32, Error> {
    let f = match (roots, coeffs) {
        (Some(r), _) => UniPoly::from_roots(field.clone(), &parse_root_list(&field, r)?),
        (None, Some(c)) => parse_coefficients(&field, c)?,
        (None, None) => return Err(Error::InvalidArgument("give --roots or --coeffs".into())),
    };
    let report = analyze(&f)?;
    let prof = &report.profile;
    let sets: Vec<Vec<String>> = (1..prof.degree)
        .map(|j| prof.root_set(j).iter().map(|a| a.to_string()).collect())
        .collect();
    let matched = match scenario {
        Some(s) => Some(matches(prof, s)?),
        None => None,
    };
    if jsonl {
        let roots: Vec<_> = prof
            .roots
            .iter()
            .map(|(a, m)| json!([a.to_string(), m]))
            .collect();
        let mut v = json!({
            "polynomial": f.to_string(), "roots": roots, "common": sets, "ca": report.is_ca,
            "type": report.type_of,
            "scenario": report.scenario.as_ref().map(|(s, _)| s.to_string()),
        });
        if let (Some(s), Some(m)) = (scenario, matched) {
            v["matches"] = json!({"scenario": s.to_string(), "result": m});
        }
        writeln!(out, "{v}").map_err(io)?;
    } else {
        writeln!(out, "f = {f}").map_err(io)?;
        let roots: Vec<String> = prof.roots.iter().map(|(a, m)| format!("{a}:{m}")).collect();
        writeln!(out, "roots: {}", roots.join(",")).map_err(io)?;
        for (j, set) in sets.iter().enumerate() {
            writeln!(out, "R_{} = {{{}}}", j + 1, set.join(",")).map_err(io)?;
        }
        writeln!(out, "CA: {}", if report.is_ca { "yes" } else { "no" }).map_err(io)?;
        if let Some(t) = report.type_of {
            writeln!(out, "type: {t}").map_err(io)?;
        }
        if let Some((s, labels)) = &report.scenario {
            let labels: Vec<String> = labels.iter().map(|a| a.to_string()).collect();
            writeln!(out, "scen: {s} (labels {})", labels.join(",")).map_err(io)?;
        }
        if let (Some(s), Some(m)) = (scenario, matched) {
            writeln!(out, "matches {s}: {}", if m { "yes" } else { "no" }).map_err(io)?;
        }
    }
    Ok(EXIT_OK)
}
