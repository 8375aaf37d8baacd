//! Buchberger's algorithm on packed monomials.

use std::cmp::Ordering;
use std::time::Instant;

use super::{Budget, BudgetExceeded, Stats};
use crate::error::{Error, Result};
use crate::exactnum::Field;
use crate::mpoly::{Monomial, MonomialOrder, Poly, Ring};

pub(crate) const MAX_VARS: usize = 16;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub(crate) struct Mono {
    e: [u16; MAX_VARS],
    // degrees of the eliminated block and of the rest
    w: [u32; 2],
    mask: u16,
}

impl Mono {
    #[inline]
    fn divides(&self, other: &Mono) -> bool {
        self.mask & !other.mask == 0 && self.e.iter().zip(&other.e).all(|(a, b)| a <= b)
    }

    #[inline]
    fn is_one(&self) -> bool {
        self.mask == 0
    }

    #[inline]
    fn mul(&self, other: &Mono) -> Mono {
        let mut e = [0u16; MAX_VARS];
        for i in 0..MAX_VARS {
            e[i] = self.e[i] + other.e[i];
        }
        Mono {
            e,
            w: [self.w[0] + other.w[0], self.w[1] + other.w[1]],
            mask: self.mask | other.mask,
        }
    }

    fn degree(&self) -> u32 {
        self.w[0] + self.w[1]
    }

    fn coprime(&self, other: &Mono) -> bool {
        self.mask & other.mask == 0
    }
}

pub(crate) type Term<C> = (Mono, C);
pub(crate) type IPoly<C> = Vec<Term<C>>;

/// Monomial arithmetic for one ring arity and order.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Ctx {
    n: usize,
    split: usize,
}

impl Ctx {
    pub(crate) fn new(n: usize, order: MonomialOrder) -> Result<Self> {
        if n > MAX_VARS {
            return Err(Error::unsupported(format!(
                "Groebner engine handles at most {MAX_VARS} variables, got {n}"
            )));
        }
        let split = match order {
            MonomialOrder::Grevlex => 0,
            MonomialOrder::BlockElimination { split } => split.min(n),
        };
        Ok(Ctx { n, split })
    }

    pub(crate) fn one(&self) -> Mono {
        self.build([0; MAX_VARS])
    }

    fn build(&self, e: [u16; MAX_VARS]) -> Mono {
        let mut w = [0u32; 2];
        let mut mask = 0u16;
        for (i, &x) in e.iter().enumerate().take(self.n) {
            w[(i >= self.split) as usize] += x as u32;
            if x > 0 {
                mask |= 1 << i;
            }
        }
        Mono { e, w, mask }
    }

    fn from_exponents(&self, exps: &[u32]) -> Result<Mono> {
        let mut e = [0u16; MAX_VARS];
        for (slot, &x) in e.iter_mut().zip(exps) {
            *slot = u16::try_from(x)
                .map_err(|_| Error::unsupported(format!("exponent {x} too large")))?;
        }
        Ok(self.build(e))
    }

    fn to_monomial(&self, m: &Mono) -> Monomial {
        Monomial::from_exponents(m.e[..self.n].iter().map(|&x| x as u32).collect())
    }

    fn quotient(&self, num: &Mono, den: &Mono) -> Mono {
        let mut e = [0u16; MAX_VARS];
        for i in 0..self.n {
            e[i] = num.e[i] - den.e[i];
        }
        Mono {
            e,
            w: [num.w[0] - den.w[0], num.w[1] - den.w[1]],
            mask: self.mask_of(&e),
        }
    }

    fn mask_of(&self, e: &[u16; MAX_VARS]) -> u16 {
        let mut mask = 0;
        for (i, &x) in e.iter().enumerate().take(self.n) {
            if x > 0 {
                mask |= 1 << i;
            }
        }
        mask
    }

    fn lcm(&self, a: &Mono, b: &Mono) -> Mono {
        let mut e = [0u16; MAX_VARS];
        for i in 0..self.n {
            e[i] = a.e[i].max(b.e[i]);
        }
        self.build(e)
    }

    #[inline]
    pub(crate) fn cmp(&self, a: &Mono, b: &Mono) -> Ordering {
        if a.w[0] != b.w[0] {
            return a.w[0].cmp(&b.w[0]);
        }
        for i in (0..self.split).rev() {
            if a.e[i] != b.e[i] {
                return b.e[i].cmp(&a.e[i]);
            }
        }
        if a.w[1] != b.w[1] {
            return a.w[1].cmp(&b.w[1]);
        }
        for i in (self.split..self.n).rev() {
            if a.e[i] != b.e[i] {
                return b.e[i].cmp(&a.e[i]);
            }
        }
        Ordering::Equal
    }

    pub(crate) fn import<F: Field>(&self, p: &Poly<F>) -> Result<IPoly<F::Elem>> {
        let mut v = Vec::with_capacity(p.num_terms());
        for (m, c) in p.terms() {
            v.push((self.from_exponents(m.exponents())?, c.clone()));
        }
        v.sort_by(|a, b| self.cmp(&b.0, &a.0));
        Ok(v)
    }

    pub(crate) fn export<F: Field>(
        &self,
        ring: &std::sync::Arc<Ring<F>>,
        p: &IPoly<F::Elem>,
    ) -> Poly<F> {
        Poly::from_terms(
            ring,
            p.iter().map(|(m, c)| (self.to_monomial(m), c.clone())),
        )
    }

    /// `a - c * q * b`, with `a` and `b` sorted decreasingly.
    pub(crate) fn sub_mul<F: Field>(
        &self,
        field: &F,
        a: &[Term<F::Elem>],
        b: &[Term<F::Elem>],
        q: &Mono,
        c: &F::Elem,
    ) -> IPoly<F::Elem> {
        let mut out = Vec::with_capacity(a.len() + b.len());
        let mut i = 0;
        let mut bi = b
            .iter()
            .map(|(m, x)| (q.mul(m), field.mul(x, c)))
            .peekable();
        while i < a.len() {
            let Some((bm, _)) = bi.peek() else { break };
            match self.cmp(&a[i].0, bm) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let (m, x) = bi.next().unwrap();
                    out.push((m, field.neg(&x)));
                }
                Ordering::Equal => {
                    let (m, x) = bi.next().unwrap();
                    let s = field.sub(&a[i].1, &x);
                    if !field.is_zero(&s) {
                        out.push((m, s));
                    }
                    i += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        for (m, x) in bi {
            out.push((m, field.neg(&x)));
        }
        out
    }

    /// `q * b` scaled by `c`.
    fn mul_term<F: Field>(
        &self,
        field: &F,
        b: &[Term<F::Elem>],
        q: &Mono,
        c: &F::Elem,
    ) -> IPoly<F::Elem> {
        b.iter().map(|(m, x)| (q.mul(m), field.mul(x, c))).collect()
    }
}

fn scale<F: Field>(field: &F, p: &mut IPoly<F::Elem>, c: &F::Elem) {
    for t in p.iter_mut() {
        t.1 = field.mul(&t.1, c);
    }
}

struct Element<C> {
    poly: IPoly<C>,
    cof: Option<Vec<IPoly<C>>>,
    active: bool,
}

#[derive(Clone, Copy, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Mono,
}

pub(crate) enum EngineOutcome<C> {
    /// Reduced basis (sorted by increasing leading monomial) and, for a
    /// unit ideal in tracking mode, the cofactors expressing `1`.
    Done {
        basis: Vec<IPoly<C>>,
        unit_cofactors: Option<Vec<IPoly<C>>>,
    },
    Exceeded(BudgetExceeded),
}

pub(crate) struct Engine<'a, F: Field> {
    field: &'a F,
    ctx: Ctx,
    elems: Vec<Element<F::Elem>>,
    pairs: Vec<Pair>,
    ngens: usize,
    track: bool,
    budget: &'a Budget,
    pub(crate) stats: Stats,
    steps_since_check: u32,
}

impl<'a, F: Field> Engine<'a, F> {
    pub(crate) fn new(
        field: &'a F,
        ctx: Ctx,
        ngens: usize,
        track: bool,
        budget: &'a Budget,
    ) -> Self {
        Engine {
            field,
            ctx,
            elems: Vec::new(),
            pairs: Vec::new(),
            ngens,
            track,
            budget,
            stats: Stats::default(),
            steps_since_check: 0,
        }
    }

    fn unit_cof(&self, k: usize, c: &F::Elem) -> Vec<IPoly<F::Elem>> {
        let mut v = vec![Vec::new(); self.ngens];
        v[k] = vec![(self.ctx.build([0; MAX_VARS]), c.clone())];
        v
    }

    fn deadline_hit(&mut self) -> bool {
        self.steps_since_check += 1;
        if self.steps_since_check < 256 {
            return false;
        }
        self.steps_since_check = 0;
        matches!(self.budget.deadline, Some(d) if Instant::now() >= d)
    }

    /// Full reduction of `h` by the active elements.
    fn reduce(
        &mut self,
        mut rest: IPoly<F::Elem>,
        mut cof: Option<Vec<IPoly<F::Elem>>>,
    ) -> std::result::Result<(IPoly<F::Elem>, Option<Vec<IPoly<F::Elem>>>), BudgetExceeded> {
        let field = self.field;
        let mut done: IPoly<F::Elem> = Vec::new();
        let mut pos = 0;
        while pos < rest.len() {
            let (m, c) = rest[pos].clone();
            let mut best: Option<usize> = None;
            for (k, e) in self.elems.iter().enumerate() {
                if e.active
                    && e.poly[0].0.divides(&m)
                    && best.is_none_or(|b| self.elems[b].poly.len() > e.poly.len())
                {
                    best = Some(k);
                }
            }
            let Some(k) = best else {
                done.push(rest[pos].clone());
                pos += 1;
                continue;
            };
            if self.deadline_hit() {
                return Err(BudgetExceeded::Time);
            }
            self.stats.reductions += 1;
            let g = &self.elems[k];
            let q = self.ctx.quotient(&m, &g.poly[0].0);
            rest = self
                .ctx
                .sub_mul(field, &rest[pos + 1..], &g.poly[1..], &q, &c);
            pos = 0;
            if let (Some(hc), Some(gc)) = (cof.as_mut(), g.cof.as_ref()) {
                for (x, y) in hc.iter_mut().zip(gc) {
                    if !y.is_empty() {
                        *x = self.ctx.sub_mul(field, x, y, &q, &c);
                    }
                }
            }
        }
        Ok((done, cof))
    }

    fn make_monic(&self, p: &mut IPoly<F::Elem>, cof: &mut Option<Vec<IPoly<F::Elem>>>) {
        let lc = p[0].1.clone();
        if self.field.is_one(&lc) {
            return;
        }
        let inv = self.field.inv(&lc).expect("nonzero leading coefficient");
        scale(self.field, p, &inv);
        if let Some(cs) = cof.as_mut() {
            for x in cs.iter_mut() {
                scale(self.field, x, &inv);
            }
        }
    }

    fn check_bits(&mut self, p: &IPoly<F::Elem>) -> std::result::Result<(), BudgetExceeded> {
        let bits = p
            .iter()
            .map(|t| self.field.bit_size(&t.1))
            .max()
            .unwrap_or(0);
        self.stats.max_coeff_bits = self.stats.max_coeff_bits.max(bits);
        match self.budget.max_coeff_bits {
            Some(limit) if bits > limit => Err(BudgetExceeded::CoefficientBits),
            _ => Ok(()),
        }
    }

    /// Gebauer-Moeller update with the new element at index `h`.
    fn update(&mut self, h: usize) {
        let lm_h = self.elems[h].poly[0].0;
        let active: Vec<usize> = (0..h).filter(|&k| self.elems[k].active).collect();
        let cands: Vec<Pair> = active
            .iter()
            .map(|&k| Pair {
                i: k,
                j: h,
                lcm: self.ctx.lcm(&self.elems[k].poly[0].0, &lm_h),
            })
            .collect();
        let mut keep = vec![false; cands.len()];
        for a in 0..cands.len() {
            let lm_a = self.elems[cands[a].i].poly[0].0;
            if lm_a.coprime(&lm_h) {
                keep[a] = true;
                continue;
            }
            // chain criterion against the unprocessed and the kept new pairs
            let dominated = (0..cands.len())
                .any(|b| (b > a || b < a && keep[b]) && cands[b].lcm.divides(&cands[a].lcm));
            keep[a] = !dominated;
        }
        let new_pairs: Vec<Pair> = cands
            .into_iter()
            .zip(keep)
            .filter(|(p, k)| *k && !self.elems[p.i].poly[0].0.coprime(&lm_h))
            .map(|(p, _)| p)
            .collect();
        let before = self.pairs.len();
        let ctx = self.ctx;
        let elems = &self.elems;
        self.pairs.retain(|p| {
            !lm_h.divides(&p.lcm)
                || ctx.lcm(&elems[p.i].poly[0].0, &lm_h) == p.lcm
                || ctx.lcm(&elems[p.j].poly[0].0, &lm_h) == p.lcm
        });
        self.stats.pairs_pruned += (before - self.pairs.len()) as u64;
        self.pairs.extend(new_pairs);
        for k in active {
            if lm_h.divides(&self.elems[k].poly[0].0) {
                self.elems[k].active = false;
            }
        }
    }

    /// Inserts a reduced, monic, nonzero polynomial. Returns `true` when it
    /// is a constant.
    fn insert(&mut self, poly: IPoly<F::Elem>, cof: Option<Vec<IPoly<F::Elem>>>) -> bool {
        let unit = poly[0].0.is_one();
        self.elems.push(Element {
            poly,
            cof,
            active: true,
        });
        let h = self.elems.len() - 1;
        if unit {
            return true;
        }
        self.update(h);
        false
    }

    fn select_pair(&mut self) -> Option<Pair> {
        let ctx = self.ctx;
        let best = (0..self.pairs.len()).min_by(|&a, &b| {
            let (p, q) = (&self.pairs[a], &self.pairs[b]);
            p.lcm
                .degree()
                .cmp(&q.lcm.degree())
                .then_with(|| ctx.cmp(&p.lcm, &q.lcm))
                .then_with(|| (p.j, p.i).cmp(&(q.j, q.i)))
        })?;
        Some(self.pairs.swap_remove(best))
    }

    fn spoly(&self, p: &Pair) -> (IPoly<F::Elem>, Option<Vec<IPoly<F::Elem>>>) {
        let (a, b) = (&self.elems[p.i], &self.elems[p.j]);
        let qa = self.ctx.quotient(&p.lcm, &a.poly[0].0);
        let qb = self.ctx.quotient(&p.lcm, &b.poly[0].0);
        let one = self.field.one();
        let s = self.ctx.sub_mul(
            self.field,
            &self.ctx.mul_term(self.field, &a.poly[1..], &qa, &one),
            &b.poly[1..],
            &qb,
            &one,
        );
        let cof = match (&a.cof, &b.cof) {
            (Some(ca), Some(cb)) => Some(
                ca.iter()
                    .zip(cb)
                    .map(|(x, y)| {
                        self.ctx.sub_mul(
                            self.field,
                            &self.ctx.mul_term(self.field, x, &qa, &one),
                            y,
                            &qb,
                            &one,
                        )
                    })
                    .collect(),
            ),
            _ => None,
        };
        (s, cof)
    }

    fn finish_unit(&self) -> EngineOutcome<F::Elem> {
        let last = self.elems.last().unwrap();
        EngineOutcome::Done {
            basis: vec![last.poly.clone()],
            unit_cofactors: last.cof.clone(),
        }
    }

    pub(crate) fn run(mut self, gens: Vec<IPoly<F::Elem>>) -> (EngineOutcome<F::Elem>, Stats) {
        let out = self.run_inner(gens);
        (out, self.stats)
    }

    fn run_inner(&mut self, gens: Vec<IPoly<F::Elem>>) -> EngineOutcome<F::Elem> {
        let one = self.field.one();
        // insert inputs smallest leading monomial first, re-reducing the
        // rest after each insertion so triangular inputs are solved directly
        let mut pending: Vec<(usize, IPoly<F::Elem>, Option<Vec<IPoly<F::Elem>>>)> = gens
            .into_iter()
            .enumerate()
            .filter(|(_, g)| !g.is_empty())
            .map(|(k, g)| {
                let cof = self.track.then(|| self.unit_cof(k, &one));
                (k, g, cof)
            })
            .collect();
        while !pending.is_empty() {
            let mut next = Vec::with_capacity(pending.len());
            for (k, g, cof) in pending {
                match self.reduce(g, cof) {
                    Ok((h, _)) if h.is_empty() => {}
                    Ok((h, c)) => next.push((k, h, c)),
                    Err(e) => return EngineOutcome::Exceeded(e),
                }
            }
            let ctx = self.ctx;
            let Some(best) = (0..next.len()).min_by(|&a, &b| {
                ctx.cmp(&next[a].1[0].0, &next[b].1[0].0)
                    .then_with(|| next[a].1.len().cmp(&next[b].1.len()))
                    .then_with(|| next[a].0.cmp(&next[b].0))
            }) else {
                break;
            };
            let (_, mut h, mut cof) = next.swap_remove(best);
            self.make_monic(&mut h, &mut cof);
            if let Err(e) = self.check_bits(&h) {
                return EngineOutcome::Exceeded(e);
            }
            if self.insert(h, cof) {
                return self.finish_unit();
            }
            pending = next;
        }
        while let Some(pair) = self.select_pair() {
            self.stats.pairs_processed += 1;
            if matches!(self.budget.max_pairs, Some(m) if self.stats.pairs_processed > m) {
                return EngineOutcome::Exceeded(BudgetExceeded::Pairs);
            }
            if matches!(self.budget.deadline, Some(d) if Instant::now() >= d) {
                return EngineOutcome::Exceeded(BudgetExceeded::Time);
            }
            let (s, cof) = self.spoly(&pair);
            let (mut h, mut cof) = match self.reduce(s, cof) {
                Ok(x) => x,
                Err(e) => return EngineOutcome::Exceeded(e),
            };
            if h.is_empty() {
                self.stats.zero_reductions += 1;
                continue;
            }
            self.make_monic(&mut h, &mut cof);
            if let Err(e) = self.check_bits(&h) {
                return EngineOutcome::Exceeded(e);
            }
            if self.insert(h, cof) {
                return self.finish_unit();
            }
        }
        let basis = self.interreduce();
        EngineOutcome::Done {
            basis,
            unit_cofactors: None,
        }
    }

    fn interreduce(&mut self) -> Vec<IPoly<F::Elem>> {
        let mut idx: Vec<usize> = (0..self.elems.len())
            .filter(|&k| self.elems[k].active)
            .collect();
        let ctx = self.ctx;
        idx.sort_by(|&a, &b| ctx.cmp(&self.elems[a].poly[0].0, &self.elems[b].poly[0].0));
        let mut out = Vec::with_capacity(idx.len());
        for &k in &idx {
            self.elems[k].active = false;
            let head = self.elems[k].poly[0].clone();
            let tail = self.elems[k].poly[1..].to_vec();
            // tails never hit the deadline check in a meaningful way here
            let (red, _) = match self.reduce(tail, None) {
                Ok(x) => x,
                Err(_) => (self.elems[k].poly[1..].to_vec(), None),
            };
            let mut p = vec![head];
            p.extend(red);
            self.elems[k].active = true;
            out.push(p);
        }
        for (&k, p) in idx.iter().zip(&out) {
            self.elems[k].poly = p.clone();
        }
        out
    }

    /// Reduces `p` by the given basis without touching engine state.
    pub(crate) fn normal_form(
        field: &'a F,
        ctx: Ctx,
        basis: Vec<IPoly<F::Elem>>,
        p: IPoly<F::Elem>,
        budget: &'a Budget,
    ) -> IPoly<F::Elem> {
        let mut eng = Engine::new(field, ctx, 0, false, budget);
        for mut b in basis {
            if b.is_empty() {
                continue;
            }
            let mut none = None;
            eng.make_monic(&mut b, &mut none);
            eng.elems.push(Element {
                poly: b,
                cof: None,
                active: true,
            });
        }
        eng.reduce(p, None).map(|x| x.0).unwrap_or_default()
    }
}
