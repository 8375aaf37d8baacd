//! Scenarios: restricted growth strings recording which root of `f` each
//! Hasse derivative shares.
//!
//! A scenario for degree `d` is a sequence `s_1, ..., s_{d-1}` with
//! `s_1 = 0` and every entry at most one more than the maximum before it.
//! Entries are stored as bytes, so degrees up to 256 are supported.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const MAX_DEGREE: usize = 256;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scenario(Vec<u8>);

impl Scenario {
    /// Validates and wraps `entries` (`s_1..s_{d-1}`).
    pub fn new(entries: Vec<u8>) -> Result<Self> {
        let d = entries.len() + 1;
        if d < 3 || d > MAX_DEGREE {
            return Err(Error::invalid(format!(
                "scenario length {} outside 2..={}",
                d - 1,
                MAX_DEGREE - 1
            )));
        }
        if entries[0] != 0 {
            return Err(Error::invalid("scenario must start with 0"));
        }
        let mut max = 0u8;
        for (i, &e) in entries.iter().enumerate().skip(1) {
            if e > max + 1 {
                return Err(Error::invalid(format!(
                    "entry {e} at position {} exceeds previous maximum {max} plus one",
                    i + 1
                )));
            }
            max = max.max(e);
        }
        Ok(Scenario(entries))
    }

    pub fn from_slice(entries: &[u8]) -> Result<Self> {
        Scenario::new(entries.to_vec())
    }

    pub fn degree(&self) -> usize {
        self.0.len() + 1
    }

    pub fn entries(&self) -> &[u8] {
        &self.0
    }

    /// `s_j`, 1-based.
    pub fn at(&self, j: usize) -> u8 {
        self.0[j - 1]
    }

    pub fn type_of(&self) -> usize {
        *self.0.iter().max().unwrap() as usize
    }

    /// `{ j : 2 <= j <= d-2, s_{d-j} = s_{d-1} }`, ascending.
    pub fn ind_set(&self) -> Vec<usize> {
        let d = self.degree();
        let last = self.at(d - 1);
        (2..=d - 2).filter(|&j| self.at(d - j) == last).collect()
    }

    /// The descendant obtained by merging label `j` into label `0`.
    pub fn descendant(&self, j: u8) -> Option<Scenario> {
        if j == 0 || j as usize > self.type_of() {
            return None;
        }
        let e = self
            .0
            .iter()
            .map(|&x| match x.cmp(&j) {
                std::cmp::Ordering::Less => x,
                std::cmp::Ordering::Equal => 0,
                std::cmp::Ordering::Greater => x - 1,
            })
            .collect();
        Some(Scenario(e))
    }

    /// One descendant per label `1..=type`.
    pub fn descendants(&self) -> Vec<Scenario> {
        (1..=self.type_of() as u8)
            .filter_map(|j| self.descendant(j))
            .collect()
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let entries = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u8>()
                    .map_err(|_| Error::Parse(format!("bad scenario entry `{}`", t.trim())))
            })
            .collect::<Result<Vec<u8>>>()?;
        Scenario::new(entries)
    }
}

/// Lexicographic stream of all scenarios for degree `d`.
#[derive(Debug, Clone)]
pub struct Scenarios {
    cur: Vec<u8>,
    // prefix_max[i] = max(cur[0..i])
    prefix_max: Vec<u8>,
    done: bool,
}

pub fn enumerate(d: usize) -> Result<Scenarios> {
    if !(3..=MAX_DEGREE).contains(&d) {
        return Err(Error::invalid(format!(
            "degree {d} outside 3..={MAX_DEGREE}"
        )));
    }
    Ok(Scenarios {
        cur: vec![0; d - 1],
        prefix_max: vec![0; d - 1],
        done: false,
    })
}

impl Iterator for Scenarios {
    type Item = Scenario;

    fn next(&mut self) -> Option<Scenario> {
        if self.done {
            return None;
        }
        let out = Scenario(self.cur.clone());
        let n = self.cur.len();
        match (1..n).rev().find(|&i| self.cur[i] <= self.prefix_max[i]) {
            None => self.done = true,
            Some(i) => {
                self.cur[i] += 1;
                let m = self.prefix_max[i].max(self.cur[i]);
                for k in i + 1..n {
                    self.cur[k] = 0;
                    self.prefix_max[k] = m;
                }
            }
        }
        Some(out)
    }
}

/// Number of scenarios of each type `0..=d-2`.
pub fn counts_by_type<'a>(
    scenarios: impl IntoIterator<Item = &'a Scenario>,
    d: usize,
) -> Vec<usize> {
    let mut counts = vec![0; d.saturating_sub(1)];
    for s in scenarios {
        counts[s.type_of()] += 1;
    }
    counts
}

/// Sorts by type, then lexicographically.
pub fn sort_by_type(list: &mut [Scenario]) {
    list.sort_by(|a, b| a.type_of().cmp(&b.type_of()).then_with(|| a.cmp(b)));
}

/// Smallest superset of `list` closed under descendants, sorted by type
/// then lexicographically.
pub fn close_under_descendants(list: &[Scenario]) -> Result<Vec<Scenario>> {
    let Some(first) = list.first() else {
        return Ok(Vec::new());
    };
    let d = first.degree();
    if let Some(bad) = list.iter().find(|s| s.degree() != d) {
        return Err(Error::invalid(format!(
            "mixed degrees in closure: {} and {}",
            d,
            bad.degree()
        )));
    }
    let mut seen: HashSet<Scenario> = list.iter().cloned().collect();
    // walk types from the top down so every scenario is expanded once
    let mut by_type: Vec<BTreeSet<Scenario>> = vec![BTreeSet::new(); d - 1];
    for s in list {
        by_type[s.type_of()].insert(s.clone());
    }
    for t in (1..d - 1).rev() {
        let layer: Vec<Scenario> = by_type[t].iter().cloned().collect();
        for s in layer {
            for c in s.descendants() {
                if seen.insert(c.clone()) {
                    by_type[t - 1].insert(c);
                }
            }
        }
    }
    Ok(by_type.into_iter().flatten().collect())
}

/// Parses the scenario file format: one comma-separated scenario per
/// line, `#` comments and blank lines ignored.
pub fn parse_scenario_file(text: &str) -> Result<Vec<Scenario>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let s: Scenario = line
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))?;
        out.push(s);
    }
    Ok(out)
}

pub fn format_scenario_file<'a>(scenarios: impl IntoIterator<Item = &'a Scenario>) -> String {
    let mut out = String::new();
    for s in scenarios {
        out.push_str(&s.to_string());
        out.push('\n');
    }
    out
}
