//! Scenario-level exclusion rules.
//!
//! * the determinant condition for `d = p + 1`,
//! * the `p`-power divisibility rules,
//! * the high-type rule (off by default: it constrains `scen(f)` exactly,
//!   not every scenario `f` matches, so it is unsafe for matching-based
//!   campaigns).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{binomial, is_prime, Integer};
use crate::scenario::{close_under_descendants, enumerate, Scenario};

fn check_index_list(js: &[usize]) -> Result<()> {
    if js.is_empty() {
        return Err(Error::invalid("empty index list"));
    }
    if js[0] < 2 || js.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(format!(
            "index list {js:?} must be strictly increasing and start at 2 or more"
        )));
    }
    Ok(())
}

/// The `(m+1) x (m+1)` integer matrix attached to indices `j_1 < ... < j_m`.
pub fn delta_matrix(js: &[usize]) -> Result<Vec<Vec<Integer>>> {
    check_index_list(js)?;
    let m = js.len();
    let mut rows = Vec::with_capacity(m + 1);
    for (i, &ji) in js.iter().enumerate() {
        let mut row = vec![Integer::zero(); m + 1];
        row[0] = -Integer::one();
        for (k, &jk) in js[..i].iter().enumerate() {
            row[k + 1] = binomial((ji - 2) as u64, (jk - 2) as u64) * ji;
        }
        row[i + 1] = Integer::from(ji);
        rows.push(row);
    }
    let mut last = vec![-Integer::one()];
    last.extend(js.iter().map(|&j| {
        if j % 2 == 0 {
            Integer::one()
        } else {
            -Integer::one()
        }
    }));
    rows.push(last);
    Ok(rows)
}

/// Exact determinant by fraction-free elimination.
pub fn integer_det(mut a: Vec<Vec<Integer>>) -> Integer {
    let n = a.len();
    let mut prev = Integer::one();
    let mut sign = false;
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = !sign;
                }
                None => return Integer::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        return Integer::one();
    }
    if sign {
        -a[n - 1][n - 1].clone()
    } else {
        a[n - 1][n - 1].clone()
    }
}

/// Determinant of the delta matrix over the integers.
pub fn delta_det_integer(js: &[usize]) -> Result<Integer> {
    Ok(integer_det(delta_matrix(js)?))
}

/// Determinant of the delta matrix reduced mod `p`, for degree `p + 1`.
pub fn delta_det(js: &[usize], p: u64) -> Result<u64> {
    if !is_prime(&BigInt::from(p)) {
        return Err(Error::invalid(format!("{p} is not a prime")));
    }
    check_index_list(js)?;
    let d = p as usize + 1;
    if *js.last().unwrap() > d - 2 {
        return Err(Error::invalid(format!(
            "index list {js:?} leaves 2..={}",
            d - 2
        )));
    }
    let det = delta_det_integer(js)?;
    Ok(det.mod_floor(&BigInt::from(p)).to_u64().unwrap())
}

/// Keep/exclude decision of the determinant rule for a scenario of degree
/// `p + 1`.
pub fn delta_keep(s: &Scenario) -> Result<bool> {
    let d = s.degree();
    let p = (d - 1) as u64;
    if !is_prime(&BigInt::from(p)) {
        return Err(Error::invalid(format!(
            "determinant rule needs d - 1 prime, got d = {d}"
        )));
    }
    if s.at(d - 1) == 0 {
        return Ok(false);
    }
    let js = s.ind_set();
    if js.len() < 2 {
        return Ok(false);
    }
    Ok(delta_det(&js, p)? == 0)
}

/// "Exclude when `s_i` is constant over `indices`" (1-based positions).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisibilityRule {
    pub indices: Vec<usize>,
    pub prime: u64,
    pub k: u32,
    pub n: usize,
}

impl DivisibilityRule {
    pub fn excludes(&self, s: &Scenario) -> bool {
        let first = s.at(self.indices[0]);
        self.indices.iter().all(|&i| s.at(i) == first)
    }
}

impl fmt::Display for DivisibilityRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.indices.iter().map(|i| format!("s{i}")).collect();
        write!(
            f,
            "exclude if {} (p={}, k={}, n={})",
            names.join("="),
            self.prime,
            self.k,
            self.n
        )
    }
}

fn is_power_plus_one(n: usize, p: usize) -> bool {
    let mut q = 1usize;
    loop {
        if q + 1 == n {
            return true;
        }
        if q + 1 > n {
            return false;
        }
        q *= p;
    }
}

/// The divisibility rules for degree `d`, duplicates removed, in order of
/// generation (by prime, then exponent).
pub fn divisibility_rules(d: usize) -> Result<Vec<DivisibilityRule>> {
    if d < 3 {
        return Err(Error::invalid(format!("degree {d} below 3")));
    }
    let mut rules: Vec<DivisibilityRule> = Vec::new();
    let mut push = |r: DivisibilityRule| {
        if !rules.iter().any(|q| q.indices == r.indices) {
            rules.push(r);
        }
    };
    for p in 2..=d {
        if !is_prime(&BigInt::from(p)) {
            continue;
        }
        // d = n p^k with k >= 1, n >= 2
        let mut pk = p;
        let mut k = 1u32;
        while d % pk == 0 {
            let n = d / pk;
            if n >= 2 {
                push(DivisibilityRule {
                    indices: (1..n).map(|i| i * pk).collect(),
                    prime: p as u64,
                    k,
                    n,
                });
                if is_power_plus_one(n, p) {
                    push(DivisibilityRule {
                        indices: vec![pk, d - pk],
                        prime: p as u64,
                        k,
                        n,
                    });
                }
            }
            pk *= p;
            k += 1;
        }
        // k = 0 with d = p^r + 1
        if is_power_plus_one(d, p) && d >= 3 {
            push(DivisibilityRule {
                indices: vec![1, d - 1],
                prime: p as u64,
                k: 0,
                n: d,
            });
        }
    }
    Ok(rules)
}

/// `true` when the high-type rule excludes `s`.
pub fn hightype_excludes(s: &Scenario) -> bool {
    let d = s.degree();
    let t = s.type_of();
    if t == 0 || t == 1 || t == d - 2 {
        return true;
    }
    let lead = d - 2 - t;
    if s.entries()[..lead].iter().any(|&e| e != 0) {
        return false;
    }
    let tail = &s.entries()[lead..];
    tail.contains(&0) || tail.windows(2).any(|w| w[0] == w[1])
}

/// Which rules are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FilterToggles {
    pub delta: bool,
    pub divisibility: bool,
    pub hightype: bool,
}

impl FilterToggles {
    pub fn none() -> Self {
        FilterToggles::default()
    }

    /// Determinant and divisibility rules; high-type stays off.
    pub fn standard() -> Self {
        FilterToggles {
            delta: true,
            divisibility: true,
            hightype: false,
        }
    }

    pub fn any(&self) -> bool {
        self.delta || self.divisibility || self.hightype
    }
}

impl FromStr for FilterToggles {
    type Err = Error;

    /// Comma-separated subset of `delta,divisibility,hightype`; `none` or an
    /// empty string disables everything.
    fn from_str(s: &str) -> Result<Self> {
        let mut t = FilterToggles::none();
        for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            match name {
                "delta" => t.delta = true,
                "divisibility" => t.divisibility = true,
                "hightype" => t.hightype = true,
                "none" => {}
                other => return Err(Error::Parse(format!("unknown filter `{other}`"))),
            }
        }
        Ok(t)
    }
}

impl fmt::Display for FilterToggles {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names = Vec::new();
        if self.delta {
            names.push("delta");
        }
        if self.divisibility {
            names.push("divisibility");
        }
        if self.hightype {
            names.push("hightype");
        }
        if names.is_empty() {
            write!(f, "none")
        } else {
            write!(f, "{}", names.join(","))
        }
    }
}

/// Filter configuration for one degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub degree: usize,
    pub toggles: FilterToggles,
}

/// Why a scenario was dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Exclusion {
    Delta,
    Divisibility(DivisibilityRule),
    HighType,
}

/// A configuration compiled for repeated application.
#[derive(Debug, Clone)]
pub struct ScenarioFilter {
    config: FilterConfig,
    rules: Vec<DivisibilityRule>,
}

impl ScenarioFilter {
    pub fn new(config: FilterConfig) -> Result<Self> {
        let d = config.degree;
        if d < 3 {
            return Err(Error::invalid(format!("degree {d} below 3")));
        }
        if config.toggles.delta && !is_prime(&BigInt::from(d - 1)) {
            return Err(Error::invalid(format!(
                "determinant rule needs d - 1 prime, got d = {d}"
            )));
        }
        let rules = if config.toggles.divisibility {
            divisibility_rules(d)?
        } else {
            Vec::new()
        };
        Ok(ScenarioFilter { config, rules })
    }

    pub fn config(&self) -> &FilterConfig {
        &self.config
    }

    pub fn rules(&self) -> &[DivisibilityRule] {
        &self.rules
    }

    /// `None` when `s` survives every enabled rule.
    pub fn exclusion(&self, s: &Scenario) -> Result<Option<Exclusion>> {
        if s.degree() != self.config.degree {
            return Err(Error::invalid(format!(
                "scenario {s} has degree {}, filter expects {}",
                s.degree(),
                self.config.degree
            )));
        }
        if self.config.toggles.delta && !delta_keep(s)? {
            return Ok(Some(Exclusion::Delta));
        }
        if let Some(r) = self.rules.iter().find(|r| r.excludes(s)) {
            return Ok(Some(Exclusion::Divisibility(r.clone())));
        }
        if self.config.toggles.hightype && hightype_excludes(s) {
            return Ok(Some(Exclusion::HighType));
        }
        Ok(None)
    }

    pub fn keeps(&self, s: &Scenario) -> Result<bool> {
        Ok(self.exclusion(s)?.is_none())
    }
}

/// All scenarios of degree `d` passing the enabled rules, optionally closed
/// under descendants. Closed lists come sorted by type, the rest in
/// lexicographic order.
pub fn restricted_list(config: &FilterConfig, close: bool) -> Result<Vec<Scenario>> {
    let filter = ScenarioFilter::new(config.clone())?;
    let mut kept = Vec::new();
    for s in enumerate(config.degree)? {
        if filter.keeps(&s)? {
            kept.push(s);
        }
    }
    if close {
        close_under_descendants(&kept)
    } else {
        Ok(kept)
    }
}
