//! Left Gröbner bases over Weyl algebras with central variables, for ideals
//! and for submodules of free modules.
//!
//! Internally polynomials are kept fraction-free: integer coefficients, terms
//! sorted by decreasing order. Reductions multiply the reducee by a scalar,
//! which is tracked whenever the exact rational normal form is needed.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicBool, Ordering as AtomicOrdering};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::int::Int;
use crate::poly::{CommPoly, CompiledOrder, Monomial, MonomialOrder};
use crate::univariate::Univariate;
use crate::weyl::{monomial_product, AlgebraSignature, WeylElement};

/// Guards against runaway computations. Exceeding any of them yields
/// [`Error::ResourceLimit`], never a partial answer.
#[derive(Clone, Debug)]
pub struct Limits {
    pub max_pairs: usize,
    pub max_basis: usize,
    pub max_terms: usize,
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_pairs: 5_000_000,
            max_basis: 100_000,
            max_terms: 20_000_000,
            cancel: None,
        }
    }
}

impl Limits {
    fn check_cancel(&self) -> Result<()> {
        match &self.cancel {
            Some(flag) if flag.load(AtomicOrdering::Relaxed) => Err(Error::Cancelled),
            _ => Ok(()),
        }
    }

    fn check_terms(&self, n: usize) -> Result<()> {
        if n > self.max_terms {
            return Err(Error::ResourceLimit(format!("polynomial with {n} terms")));
        }
        Ok(())
    }
}

/// S-pair selection.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    /// Smallest lcm first.
    #[default]
    Normal,
    /// Smallest sugar degree first, lcm breaks ties.
    Sugar,
}

#[derive(Clone, Debug, Default)]
pub struct GbOptions {
    pub strategy: Strategy,
    pub limits: Limits,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GbStats {
    pub pairs: usize,
    pub zero_reductions: usize,
    pub basis_size: usize,
}

#[derive(Clone, Debug)]
pub(crate) struct Term {
    pub(crate) mono: Monomial,
    pub(crate) comp: u32,
    pub(crate) coeff: Int,
}

#[derive(Clone, Debug)]
pub(crate) struct Ring {
    sig: Arc<AlgebraSignature>,
    npairs: usize,
    order: CompiledOrder,
    source_order: MonomialOrder,
    /// Variables that a left factor can fail to commute with (`x_i`, `T_j`).
    xbits: u32,
    nshift: usize,
    tbits: u32,
}

#[derive(Clone, Debug)]
pub(crate) struct Entry {
    terms: Vec<Term>,
    lm: Monomial,
    comp: u32,
    mask: u32,
    xsupp: u32,
    sugar: u32,
}

impl Entry {
    fn lc(&self) -> &Int {
        &self.terms[0].coeff
    }
}

fn content(terms: &[Term]) -> Int {
    let mut g = Int::ZERO;
    for t in terms {
        g = g.gcd(&t.coeff);
        if g.is_one() {
            break;
        }
    }
    g
}

fn bigrat(i: &Int) -> BigRational {
    BigRational::from_integer(i.to_big())
}

/// Divide by the content and make the leading coefficient positive; returns
/// the signed factor that was divided out.
fn make_primitive(terms: &mut [Term]) -> Int {
    if terms.is_empty() {
        return Int::ONE;
    }
    let mut c = content(terms);
    if terms[0].coeff.is_negative() {
        c = -&c;
    }
    if !c.is_one() {
        for t in terms.iter_mut() {
            t.coeff = t.coeff.div_exact(&c);
        }
    }
    c
}

impl Ring {
    pub(crate) fn new(sig: &Arc<AlgebraSignature>, order: &MonomialOrder) -> Result<Ring> {
        let npairs = sig.n_pairs();
        let nshift = sig.n_shifts();
        let tbits = ((1u32 << nshift) - 1) << sig.shift_t(0).min(31);
        Ok(Ring {
            sig: sig.clone(),
            npairs,
            order: order.compile(sig.nvars())?,
            source_order: order.clone(),
            xbits: ((1u32 << npairs) - 1) | tbits,
            nshift,
            tbits,
        })
    }

    #[inline]
    fn cmp(&self, a: &Term, b: &Term) -> Ordering {
        self.order.cmp_terms(a.comp, &a.mono, b.comp, &b.mono)
    }

    fn normalize(&self, terms: &mut Vec<Term>) {
        terms.sort_by(|a, b| self.cmp(b, a));
        let mut out: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms.drain(..) {
            match out.last_mut() {
                Some(last) if last.comp == t.comp && last.mono == t.mono => {
                    last.coeff = last.coeff.add_ref(&t.coeff);
                }
                _ => {
                    if let Some(last) = out.last() {
                        if last.coeff.is_zero() {
                            out.pop();
                        }
                    }
                    out.push(t);
                }
            }
        }
        if out.last().is_some_and(|t| t.coeff.is_zero()) {
            out.pop();
        }
        *terms = out;
    }

    fn xsupp(&self, terms: &[Term]) -> u32 {
        terms.iter().fold(0, |acc, t| acc | (t.mono.support_mask() & self.xbits))
    }

    fn entry(&self, terms: Vec<Term>, sugar: u32) -> Entry {
        let lm = terms[0].mono;
        Entry {
            lm,
            comp: terms[0].comp,
            mask: lm.support_mask(),
            xsupp: self.xsupp(&terms),
            sugar,
            terms,
        }
    }

    /// `m · g` with `m` multiplied on the left.
    fn mul_left(&self, m: &Monomial, g: &Entry) -> Result<Vec<Term>> {
        let mask = m.support_mask();
        let dbits = ((mask >> self.npairs) & self.xbits & !self.tbits) | ((mask >> self.nshift) & self.tbits);
        if dbits & g.xsupp == 0 {
            return g
                .terms
                .iter()
                .map(|t| {
                    Ok(Term {
                        mono: m.try_mul(&t.mono)?,
                        comp: t.comp,
                        coeff: t.coeff.clone(),
                    })
                })
                .collect();
        }
        let mut out = Vec::with_capacity(g.terms.len() * 2);
        let mut buf = Vec::new();
        for t in &g.terms {
            buf.clear();
            monomial_product(&self.sig, m, &t.mono, &mut buf)?;
            for (mono, k) in buf.drain(..) {
                out.push(Term {
                    mono,
                    comp: t.comp,
                    coeff: if k.is_one() { t.coeff.clone() } else { t.coeff.mul_ref(&k) },
                });
            }
        }
        self.normalize(&mut out);
        Ok(out)
    }

    /// `a·p − b·q`, where `p[..skip]` is known to dominate every term of `q`.
    fn combine(&self, skip: usize, a: &Int, p: &[Term], b: &Int, q: &[Term]) -> Vec<Term> {
        let mut out = Vec::with_capacity(p.len() + q.len());
        let scale = |t: &Term, c: &Int| Term {
            mono: t.mono,
            comp: t.comp,
            coeff: if c.is_one() { t.coeff.clone() } else { t.coeff.mul_ref(c) },
        };
        for t in &p[..skip] {
            out.push(scale(t, a));
        }
        let nb = -b;
        let (mut i, mut j) = (skip, 0);
        while i < p.len() && j < q.len() {
            match self.cmp(&p[i], &q[j]) {
                Ordering::Greater => {
                    out.push(scale(&p[i], a));
                    i += 1;
                }
                Ordering::Less => {
                    out.push(scale(&q[j], &nb));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = Int::mul_sub_mul(a, &p[i].coeff, b, &q[j].coeff);
                    if !c.is_zero() {
                        out.push(Term {
                            mono: p[i].mono,
                            comp: p[i].comp,
                            coeff: c,
                        });
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(p[i..].iter().map(|t| scale(t, a)));
        out.extend(q[j..].iter().map(|t| scale(t, &nb)));
        out
    }

    fn find_divisor(&self, basis: &[Entry], active: &[usize], t: &Term) -> Option<usize> {
        let mask = t.mono.support_mask();
        let mut best: Option<usize> = None;
        for &k in active {
            let g = &basis[k];
            if g.comp != t.comp || g.mask & !mask != 0 || !g.lm.divides(&t.mono) {
                continue;
            }
            if best.map_or(true, |b| basis[b].terms.len() > g.terms.len()) {
                best = Some(k);
            }
        }
        best
    }

    /// Left reduction of `terms` by the active entries. Terms before `start`
    /// and terms in components `>= stop_comp` are never reduced. Returns the
    /// scalar `c` with `c·input − output` in the span of the reducers.
    #[allow(clippy::too_many_arguments)]
    fn reduce(
        &self,
        basis: &[Entry],
        active: &[usize],
        mut terms: Vec<Term>,
        start: usize,
        full: bool,
        stop_comp: u32,
        sugar: &mut u32,
        limits: &Limits,
    ) -> Result<(Vec<Term>, BigRational)> {
        let mut scale = BigRational::one();
        let mut i = start;
        let mut steps = 0usize;
        while i < terms.len() {
            if terms[i].comp >= stop_comp {
                break;
            }
            let Some(k) = self.find_divisor(basis, active, &terms[i]) else {
                if !full {
                    break;
                }
                i += 1;
                continue;
            };
            let g = &basis[k];
            let m = g.lm.quotient_of(&terms[i].mono).expect("divisor");
            let mg = self.mul_left(&m, g)?;
            *sugar = (*sugar).max(g.sugar + m.degree());
            let d = terms[i].coeff.gcd(g.lc());
            let a = g.lc().div_exact(&d);
            let b = terms[i].coeff.div_exact(&d);
            terms = self.combine(i, &a, &terms, &b, &mg);
            if !a.is_one() {
                scale *= bigrat(&a);
            }
            steps += 1;
            if steps % 16 == 0 {
                limits.check_cancel()?;
                limits.check_terms(terms.len())?;
                let c = content(&terms);
                if !c.is_one() && !c.is_zero() {
                    for t in terms.iter_mut() {
                        t.coeff = t.coeff.div_exact(&c);
                    }
                    scale /= bigrat(&c);
                }
            }
        }
        let c = content(&terms);
        if !c.is_one() && !c.is_zero() {
            for t in terms.iter_mut() {
                t.coeff = t.coeff.div_exact(&c);
            }
            scale /= bigrat(&c);
        }
        Ok((terms, scale))
    }

    /// Integer terms of `e` in component `comp`, and the denominator lcm `L`
    /// such that the terms represent `L·e`.
    fn int_terms(&self, e: &WeylElement, comp: u32) -> Result<(Vec<Term>, BigInt)> {
        if e.sig() != &self.sig {
            return Err(Error::SignatureMismatch);
        }
        let l = e.terms().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let mut terms: Vec<Term> = e
            .terms()
            .map(|(m, c)| Term {
                mono: *m,
                comp,
                coeff: Int::from_big(c.numer() * (&l / c.denom())),
            })
            .collect();
        self.normalize(&mut terms);
        Ok((terms, l))
    }

    /// Fraction-free terms of a module vector (components `offset..`).
    fn vector_terms(&self, v: &[WeylElement], offset: u32) -> Result<Vec<Term>> {
        let l = v
            .iter()
            .flat_map(|e| e.terms())
            .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let mut terms = Vec::new();
        for (k, e) in v.iter().enumerate() {
            if e.sig() != &self.sig {
                return Err(Error::SignatureMismatch);
            }
            for (m, c) in e.terms() {
                terms.push(Term {
                    mono: *m,
                    comp: offset + k as u32,
                    coeff: Int::from_big(c.numer() * (&l / c.denom())),
                });
            }
        }
        self.normalize(&mut terms);
        Ok(terms)
    }

    /// Component `comp` of `terms` divided by `scale`.
    fn element(&self, terms: &[Term], comp: u32, scale: &BigRational) -> WeylElement {
        WeylElement::from_terms(
            &self.sig,
            terms
                .iter()
                .filter(|t| t.comp == comp)
                .map(|t| (t.mono, bigrat(&t.coeff) / scale)),
        )
    }

    fn monic_element(&self, terms: &[Term]) -> WeylElement {
        let lc = bigrat(&terms[0].coeff);
        self.element(terms, terms[0].comp, &lc)
    }

    fn total_degree(terms: &[Term]) -> u32 {
        terms.iter().map(|t| t.mono.degree()).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    comp: u32,
    sugar: u32,
}

pub(crate) struct BbOutput {
    basis: Vec<Entry>,
    active: Vec<usize>,
    syzygies: Vec<Vec<Term>>,
    stats: GbStats,
}

struct Buchberger<'a> {
    ring: &'a Ring,
    opts: &'a GbOptions,
    sever: u32,
    basis: Vec<Entry>,
    active: Vec<usize>,
    pairs: Vec<Pair>,
    syzygies: Vec<Vec<Term>>,
    stats: GbStats,
}

impl<'a> Buchberger<'a> {
    fn pair(&self, i: usize, j: usize) -> Pair {
        let (a, b) = (&self.basis[i], &self.basis[j]);
        let lcm = a.lm.lcm(&b.lm);
        let sugar = (a.sugar + lcm.degree() - a.lm.degree()).max(b.sugar + lcm.degree() - b.lm.degree());
        Pair {
            i,
            j,
            lcm,
            comp: a.comp,
            sugar,
        }
    }

    fn insert(&mut self, mut terms: Vec<Term>, sugar: u32) -> Result<()> {
        if terms.is_empty() {
            self.stats.zero_reductions += 1;
            return Ok(());
        }
        if terms[0].comp >= self.sever {
            make_primitive(&mut terms);
            self.syzygies.push(terms);
            return Ok(());
        }
        make_primitive(&mut terms);
        if self.basis.len() >= self.opts.limits.max_basis {
            return Err(Error::ResourceLimit(format!("basis exceeded {} elements", self.opts.limits.max_basis)));
        }
        let h = self.ring.entry(terms, sugar);
        let hidx = self.basis.len();
        let (hlm, hcomp) = (h.lm, h.comp);
        self.basis.push(h);

        let cands: Vec<Pair> = self
            .active
            .iter()
            .filter(|&&i| self.basis[i].comp == hcomp)
            .map(|&i| self.pair(i, hidx))
            .collect();
        let mut kept: Vec<Pair> = Vec::new();
        for (k, p) in cands.iter().enumerate() {
            let dominated = cands[k + 1..].iter().any(|q| q.lcm.divides(&p.lcm))
                || kept.iter().any(|q| q.lcm.divides(&p.lcm));
            if !dominated {
                kept.push(p.clone());
            }
        }
        let basis = &self.basis;
        self.pairs.retain(|p| {
            if p.comp != hcomp || !hlm.divides(&p.lcm) {
                return true;
            }
            let li = basis[p.i].lm.lcm(&hlm);
            let lj = basis[p.j].lm.lcm(&hlm);
            li == p.lcm || lj == p.lcm
        });
        self.pairs.extend(kept);
        self.active
            .retain(|&i| !(basis[i].comp == hcomp && hlm.divides(&basis[i].lm)));
        self.active.push(hidx);
        Ok(())
    }

    fn select(&mut self) -> Option<Pair> {
        if self.pairs.is_empty() {
            return None;
        }
        let ring = self.ring;
        let strategy = self.opts.strategy;
        let mut best = 0;
        for k in 1..self.pairs.len() {
            let (p, q) = (&self.pairs[k], &self.pairs[best]);
            let by_lcm = ring.order.cmp_terms(p.comp, &p.lcm, q.comp, &q.lcm);
            let o = match strategy {
                Strategy::Normal => by_lcm,
                Strategy::Sugar => p.sugar.cmp(&q.sugar).then(by_lcm),
            }
            .then((p.j, p.i).cmp(&(q.j, q.i)));
            if o == Ordering::Less {
                best = k;
            }
        }
        Some(self.pairs.swap_remove(best))
    }

    fn spoly(&self, p: &Pair) -> Result<Vec<Term>> {
        let (gi, gj) = (&self.basis[p.i], &self.basis[p.j]);
        let mi = gi.lm.quotient_of(&p.lcm).expect("lcm");
        let mj = gj.lm.quotient_of(&p.lcm).expect("lcm");
        let a = self.ring.mul_left(&mi, gi)?;
        let b = self.ring.mul_left(&mj, gj)?;
        let d = gi.lc().gcd(gj.lc());
        let ca = gj.lc().div_exact(&d);
        let cb = gi.lc().div_exact(&d);
        Ok(self.ring.combine(0, &ca, &a, &cb, &b))
    }

    fn reduce(&self, terms: Vec<Term>, sugar: &mut u32) -> Result<Vec<Term>> {
        Ok(self
            .ring
            .reduce(&self.basis, &self.active, terms, 0, true, self.sever, sugar, &self.opts.limits)?
            .0)
    }

    fn run(mut self, mut gens: Vec<Vec<Term>>) -> Result<BbOutput> {
        gens.retain(|g| !g.is_empty());
        gens.sort_by(|a, b| self.ring.cmp(&a[0], &b[0]));
        for g in gens {
            let mut sugar = Ring::total_degree(&g);
            let r = self.reduce(g, &mut sugar)?;
            self.insert(r, sugar)?;
        }
        while let Some(p) = self.select() {
            self.opts.limits.check_cancel()?;
            self.stats.pairs += 1;
            if self.stats.pairs > self.opts.limits.max_pairs {
                return Err(Error::ResourceLimit(format!(
                    "more than {} S-pairs",
                    self.opts.limits.max_pairs
                )));
            }
            let s = self.spoly(&p)?;
            let mut sugar = p.sugar;
            let r = self.reduce(s, &mut sugar)?;
            self.insert(r, sugar)?;
        }
        self.stats.basis_size = self.active.len();
        Ok(BbOutput {
            basis: self.basis,
            active: self.active,
            syzygies: self.syzygies,
            stats: self.stats,
        })
    }
}

pub(crate) fn buchberger(ring: &Ring, gens: Vec<Vec<Term>>, sever: u32, opts: &GbOptions) -> Result<BbOutput> {
    Buchberger {
        ring,
        opts,
        sever,
        basis: Vec::new(),
        active: Vec::new(),
        pairs: Vec::new(),
        syzygies: Vec::new(),
        stats: GbStats::default(),
    }
    .run(gens)
}

/// Interreduce the active part of a Buchberger run.
fn reduced_entries(ring: &Ring, out: &BbOutput, limits: &Limits) -> Result<Vec<Entry>> {
    let mut entries: Vec<Entry> = out.active.iter().map(|&i| out.basis[i].clone()).collect();
    entries.sort_by(|a, b| ring.cmp(&a.terms[0], &b.terms[0]));
    let idx: Vec<usize> = (0..entries.len()).collect();
    for k in 0..entries.len() {
        let terms = std::mem::take(&mut entries[k].terms);
        let mut sugar = 0;
        let others: Vec<usize> = idx.iter().copied().filter(|&j| j != k).collect();
        let (mut t, _) = ring.reduce(&entries, &others, terms, 1, true, u32::MAX, &mut sugar, limits)?;
        make_primitive(&mut t);
        let sugar = entries[k].sugar;
        entries[k] = ring.entry(t, sugar);
    }
    Ok(entries)
}

/// A reduced left Gröbner basis of an ideal.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    ring: Ring,
    entries: Vec<Entry>,
    elements: Vec<WeylElement>,
    stats: GbStats,
}

impl GroebnerBasis {
    /// Reduced Gröbner basis of the left ideal generated by `gens`. An empty
    /// or all-zero generating set gives the zero ideal.
    pub fn new(
        sig: &Arc<AlgebraSignature>,
        gens: &[WeylElement],
        order: &MonomialOrder,
        opts: &GbOptions,
    ) -> Result<GroebnerBasis> {
        let ring = Ring::new(sig, order)?;
        let polys = gens
            .iter()
            .map(|g| ring.int_terms(g, 0).map(|t| t.0))
            .collect::<Result<Vec<_>>>()?;
        let out = buchberger(&ring, polys, u32::MAX, opts)?;
        Self::from_output(ring, &out, opts)
    }

    fn from_output(ring: Ring, out: &BbOutput, opts: &GbOptions) -> Result<GroebnerBasis> {
        let entries = reduced_entries(&ring, out, &opts.limits)?;
        let elements = entries.iter().map(|e| ring.monic_element(&e.terms)).collect();
        Ok(GroebnerBasis {
            ring,
            entries,
            elements,
            stats: out.stats,
        })
    }

    pub fn sig(&self) -> &Arc<AlgebraSignature> {
        &self.ring.sig
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.ring.source_order
    }

    pub fn compiled_order(&self) -> &CompiledOrder {
        &self.ring.order
    }

    /// Monic elements, sorted by increasing leading monomial.
    pub fn elements(&self) -> &[WeylElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        true
    }

    pub fn stats(&self) -> GbStats {
        self.stats
    }

    /// True when the ideal is the whole ring.
    pub fn is_unit(&self) -> bool {
        self.elements.len() == 1 && self.entries[0].lm.is_one()
    }

    pub fn normal_form(&self, p: &WeylElement) -> Result<WeylElement> {
        let (terms, l) = self.ring.int_terms(p, 0)?;
        let active: Vec<usize> = (0..self.entries.len()).collect();
        let mut sugar = 0;
        let (r, scale) = self.ring.reduce(
            &self.entries,
            &active,
            terms,
            0,
            true,
            u32::MAX,
            &mut sugar,
            &Limits::default(),
        )?;
        Ok(self.ring.element(&r, 0, &(scale * BigRational::from_integer(l))))
    }

    pub fn contains(&self, p: &WeylElement) -> Result<bool> {
        Ok(self.normal_form(p)?.is_zero())
    }

    /// Same ideal (both bases are reduced for the same order).
    pub fn same_ideal(&self, other: &GroebnerBasis) -> bool {
        self.ring.source_order == other.ring.source_order && self.elements == other.elements
    }

    /// Elements that only involve the given variables.
    pub fn elements_in(&self, vars: &[usize]) -> Vec<WeylElement> {
        self.elements.iter().filter(|e| e.uses_only(vars)).cloned().collect()
    }
}

/// Left normal form with respect to an arbitrary list of reducers.
pub fn left_normal_form(p: &WeylElement, reducers: &[WeylElement], order: &MonomialOrder) -> Result<WeylElement> {
    let ring = Ring::new(p.sig(), order)?;
    let mut entries = Vec::new();
    for g in reducers {
        let (mut t, _) = ring.int_terms(g, 0)?;
        if t.is_empty() {
            continue;
        }
        make_primitive(&mut t);
        entries.push(ring.entry(t, 0));
    }
    let (terms, l) = ring.int_terms(p, 0)?;
    let active: Vec<usize> = (0..entries.len()).collect();
    let mut sugar = 0;
    let (r, scale) = ring.reduce(&entries, &active, terms, 0, true, u32::MAX, &mut sugar, &Limits::default())?;
    Ok(ring.element(&r, 0, &(scale * BigRational::from_integer(l))))
}

pub fn ideal_equal(
    sig: &Arc<AlgebraSignature>,
    a: &[WeylElement],
    b: &[WeylElement],
    order: &MonomialOrder,
    opts: &GbOptions,
) -> Result<bool> {
    let ga = GroebnerBasis::new(sig, a, order, opts)?;
    let gb = GroebnerBasis::new(sig, b, order, opts)?;
    Ok(ga.same_ideal(&gb))
}

/// Block order: `first` by degrevlex, then every remaining variable by degrevlex.
pub fn elimination_order(sig: &AlgebraSignature, first: &[usize]) -> MonomialOrder {
    let rest: Vec<usize> = (0..sig.nvars()).filter(|i| !first.contains(i)).collect();
    let mut blocks = Vec::new();
    if !first.is_empty() {
        blocks.push((first.to_vec(), MonomialOrder::DegRevLex));
    }
    if !rest.is_empty() {
        blocks.push((rest, MonomialOrder::DegRevLex));
    }
    MonomialOrder::block(blocks)
}

/// The order used for central saturation: degrevlex on all `x, ∂` first,
/// the central variables break ties.
pub fn ds_order(sig: &AlgebraSignature) -> MonomialOrder {
    elimination_order(sig, &sig.xd_vars())
}

/// Generators (a reduced basis) of `⟨gens⟩` intersected with the subalgebra
/// not involving `vars`.
pub fn eliminate(
    sig: &Arc<AlgebraSignature>,
    gens: &[WeylElement],
    vars: &[usize],
    opts: &GbOptions,
) -> Result<Vec<WeylElement>> {
    if vars.is_empty() {
        return Ok(GroebnerBasis::new(sig, gens, &MonomialOrder::DegRevLex, opts)?
            .elements()
            .to_vec());
    }
    let order = elimination_order(sig, vars);
    let gb = GroebnerBasis::new(sig, gens, &order, opts)?;
    let keep: Vec<usize> = (0..sig.nvars()).filter(|i| !vars.contains(i)).collect();
    Ok(gb.elements_in(&keep))
}

/// Element of a free module over the algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleVector {
    pub comps: Vec<WeylElement>,
}

impl ModuleVector {
    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    /// `Σ comps[i]·gens[i]`.
    pub fn dot(&self, gens: &[WeylElement]) -> Result<WeylElement> {
        if gens.len() != self.comps.len() || gens.is_empty() {
            return Err(Error::InvalidInput("vector length does not match the generator count".into()));
        }
        let mut acc = WeylElement::zero(gens[0].sig());
        for (a, g) in self.comps.iter().zip(gens) {
            acc = &acc + &a.try_mul(g)?;
        }
        Ok(acc)
    }
}

fn to_vector(ring: &Ring, terms: &[Term], offset: u32, rank: usize) -> ModuleVector {
    let one = BigRational::one();
    ModuleVector {
        comps: (0..rank).map(|k| ring.element(terms, offset + k as u32, &one)).collect(),
    }
}

fn pot(order: &MonomialOrder) -> MonomialOrder {
    MonomialOrder::PositionOverTerm(Box::new(order.clone()))
}

/// Generators of the left syzygy module of `gens`.
pub fn syzygy(
    sig: &Arc<AlgebraSignature>,
    gens: &[WeylElement],
    order: &MonomialOrder,
    opts: &GbOptions,
) -> Result<Vec<ModuleVector>> {
    if gens.iter().any(|g| g.is_zero()) {
        return Err(Error::ZeroInput("syzygy"));
    }
    let ring = Ring::new(sig, &pot(order))?;
    let r = gens.len();
    let mut polys = Vec::with_capacity(r);
    for (k, g) in gens.iter().enumerate() {
        let mut v = vec![WeylElement::zero(sig); r + 1];
        v[0] = g.clone();
        v[k + 1] = WeylElement::one(sig);
        polys.push(ring.vector_terms(&v, 0)?);
    }
    let out = buchberger(&ring, polys, 1, opts)?;
    Ok(out.syzygies.iter().map(|t| to_vector(&ring, t, 1, r)).collect())
}

/// Reduced Gröbner basis of a submodule of `D^rank` under position-over-term.
pub fn module_gb(
    sig: &Arc<AlgebraSignature>,
    vectors: &[ModuleVector],
    order: &MonomialOrder,
    opts: &GbOptions,
) -> Result<Vec<ModuleVector>> {
    let rank = vectors.first().map_or(0, |v| v.comps.len());
    if vectors.iter().any(|v| v.comps.len() != rank) {
        return Err(Error::InvalidInput("vectors of different lengths".into()));
    }
    let ring = Ring::new(sig, &pot(order))?;
    let polys = vectors
        .iter()
        .map(|v| ring.vector_terms(&v.comps, 0))
        .collect::<Result<Vec<_>>>()?;
    let out = buchberger(&ring, polys, u32::MAX, opts)?;
    let entries = reduced_entries(&ring, &out, &opts.limits)?;
    Ok(entries
        .iter()
        .map(|e| {
            let lc = bigrat(e.lc());
            ModuleVector {
                comps: (0..rank).map(|k| ring.element(&e.terms, k as u32, &lc)).collect(),
            }
        })
        .collect())
}

/// Reduced basis (under `order`) of `{A : A·h ∈ ⟨gens⟩}`.
pub fn transporter(
    sig: &Arc<AlgebraSignature>,
    gens: &[WeylElement],
    h: &WeylElement,
    order: &MonomialOrder,
    opts: &GbOptions,
) -> Result<GroebnerBasis> {
    if h.is_zero() {
        return Err(Error::ZeroInput("transporter"));
    }
    let ring = Ring::new(sig, &pot(order))?;
    let mut polys = vec![ring.vector_terms(&[h.clone(), WeylElement::one(sig)], 0)?];
    for g in gens {
        if !g.is_zero() {
            polys.push(ring.int_terms(g, 0)?.0);
        }
    }
    let out = buchberger(&ring, polys, 1, opts)?;
    let one = BigRational::one();
    let quotient: Vec<WeylElement> = out
        .syzygies
        .iter()
        .map(|t| {
            let shifted: Vec<Term> = t
                .iter()
                .map(|x| Term {
                    mono: x.mono,
                    comp: 0,
                    coeff: x.coeff.clone(),
                })
                .collect();
            ring.element(&shifted, 0, &one)
        })
        .collect();
    GroebnerBasis::new(sig, &quotient, order, opts)
}

/// A Gröbner basis of `⟨plain⟩ + ⟨tracked⟩` that remembers how each element
/// is built from the `tracked` generators.
pub struct TrackedBasis {
    ring: Ring,
    entries: Vec<Entry>,
    ntracked: usize,
}

impl TrackedBasis {
    pub fn new(
        sig: &Arc<AlgebraSignature>,
        plain: &[WeylElement],
        tracked: &[WeylElement],
        order: &MonomialOrder,
        opts: &GbOptions,
    ) -> Result<TrackedBasis> {
        let ring = Ring::new(sig, &pot(order))?;
        let n = tracked.len();
        let mut polys = Vec::new();
        for g in plain {
            if !g.is_zero() {
                polys.push(ring.int_terms(g, 0)?.0);
            }
        }
        for (k, g) in tracked.iter().enumerate() {
            let mut v = vec![WeylElement::zero(sig); n + 1];
            v[0] = g.clone();
            v[k + 1] = WeylElement::one(sig);
            polys.push(ring.vector_terms(&v, 0)?);
        }
        let out = buchberger(&ring, polys, 1, opts)?;
        let entries = out.active.iter().map(|&i| out.basis[i].clone()).collect();
        Ok(TrackedBasis {
            ring,
            entries,
            ntracked: n,
        })
    }

    /// Writes `p = r + Σ_k c_k·tracked_k + (element of ⟨plain⟩)` with `r`
    /// the normal form; returns `(r, c)`.
    pub fn divide(&self, p: &WeylElement) -> Result<(WeylElement, Vec<WeylElement>)> {
        let (terms, l) = self.ring.int_terms(p, 0)?;
        let active: Vec<usize> = (0..self.entries.len()).collect();
        let mut sugar = 0;
        let (r, scale) = self
            .ring
            .reduce(&self.entries, &active, terms, 0, true, 1, &mut sugar, &Limits::default())?;
        let denom = scale * BigRational::from_integer(l);
        let rem = self.ring.element(&r, 0, &denom);
        let cof = (0..self.ntracked)
            .map(|k| -&self.ring.element(&r, k as u32 + 1, &denom))
            .collect();
        Ok((rem, cof))
    }
}

/// `LC` of `g` viewed over the field of fractions of the parameters: the
/// parameter coefficient of the largest `(x,∂)`-monomial.
pub fn leading_coeff_in_params(g: &WeylElement, order: &MonomialOrder) -> Result<CommPoly> {
    if g.is_zero() {
        return Err(Error::ZeroInput("leading_coeff_in_params"));
    }
    let sig = g.sig();
    let compiled = order.compile(sig.nvars())?;
    let xd = sig.xd_vars();
    let strip = |m: &Monomial| {
        let mut r = Monomial::ONE;
        for &i in &xd {
            r.set_exp(i, m.exp(i));
        }
        r
    };
    let top = g
        .terms()
        .map(|(m, _)| strip(m))
        .max_by(|a, b| compiled.cmp(a, b))
        .expect("nonzero");
    let np = sig.n_params();
    let mut out = CommPoly::zero(np);
    for (m, c) in g.terms() {
        if strip(m) == top {
            let mut pm = Monomial::ONE;
            for j in 0..np {
                pm.set_exp(j, m.exp(sig.param(j)));
            }
            out.add_term(pm, c.clone());
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SaturationMethod {
    /// Colon by one factor of `q` at a time until stable.
    #[default]
    PerFactor,
    /// Eliminate a central tag `w` from `I + ⟨1 − q·w⟩`.
    Rabinowitsch,
}

#[derive(Clone, Debug)]
pub struct SaturationStep {
    pub factor: Univariate,
    /// How many colon steps by this factor enlarged the ideal.
    pub applications: u32,
}

#[derive(Clone, Debug)]
pub struct Saturation {
    /// Reduced basis of the saturation under [`ds_order`].
    pub basis: GroebnerBasis,
    /// Reduced basis of the input under [`ds_order`].
    pub input: GroebnerBasis,
    pub q: Univariate,
    pub steps: Vec<SaturationStep>,
    /// A polynomial `w(s)` with `w·P ∈ I` for every generator `P`.
    pub witness: Option<Univariate>,
}

impl Saturation {
    pub fn changed(&self) -> bool {
        !self.basis.same_ideal(&self.input)
    }
}

const MAX_COLON_STEPS: u32 = 64;

pub(crate) fn univariate_param(sig: &Arc<AlgebraSignature>, u: &Univariate) -> Result<WeylElement> {
    let p = CommPoly::from_univariate(u, sig.n_params(), 0);
    WeylElement::from_param_poly(sig, &p)
}

/// Integer-primitive factors of `q`: one per distinct rational root, then
/// the root-free rest; ordered by degree.
pub fn saturation_factors(q: &Univariate) -> Vec<Univariate> {
    let f = q.factor_linear();
    let mut out: Vec<Univariate> = Vec::new();
    let mut seen = Vec::new();
    for (r, _) in &f.roots {
        if seen.contains(r) {
            continue;
        }
        seen.push(r.clone());
        let num = BigRational::from_integer(r.numer().clone());
        let den = BigRational::from_integer(r.denom().clone());
        out.push(Univariate::new(vec![-num, den]));
    }
    if f.rest.degree().unwrap_or(0) > 0 {
        let ints = f.rest.primitive_integer();
        out.push(Univariate::new(ints.into_iter().map(BigRational::from_integer).collect()));
    }
    out.sort_by_key(|u| u.degree());
    out
}

/// `Sat(I) = {P : q(s)·P ∈ I for some nonzero q(s)}` for a one-parameter algebra.
pub fn central_saturation(
    sig: &Arc<AlgebraSignature>,
    gens: &[WeylElement],
    method: SaturationMethod,
    opts: &GbOptions,
) -> Result<Saturation> {
    if sig.n_params() != 1 || sig.n_aux() != 0 {
        return Err(Error::InvalidInput(
            "central saturation needs exactly one parameter and no auxiliary variables".into(),
        ));
    }
    let order = ds_order(sig);
    let input = GroebnerBasis::new(sig, gens, &order, opts)?;
    let mut q = Univariate::one();
    for g in input.elements() {
        let lc = leading_coeff_in_params(g, &order)?;
        q = q.lcm(&lc.to_univariate(0)?);
    }
    let q = q.monic();
    match method {
        SaturationMethod::PerFactor => {
            let mut current = input.clone();
            let mut steps = Vec::new();
            let mut witness = Univariate::one();
            for factor in saturation_factors(&q) {
                let h = univariate_param(sig, &factor)?;
                let mut applications = 0;
                loop {
                    let next = transporter(sig, current.elements(), &h, &order, opts)?;
                    if next.same_ideal(&current) {
                        break;
                    }
                    applications += 1;
                    witness = witness.mul(&factor);
                    current = next;
                    if applications > MAX_COLON_STEPS {
                        return Err(Error::ResourceLimit(format!(
                            "saturation did not stabilize after {MAX_COLON_STEPS} colon steps"
                        )));
                    }
                }
                steps.push(SaturationStep { factor, applications });
            }
            Ok(Saturation {
                basis: current,
                input,
                q,
                steps,
                witness: Some(witness),
            })
        }
        SaturationMethod::Rabinowitsch => {
            if q.degree() == Some(0) {
                return Ok(Saturation {
                    basis: input.clone(),
                    input,
                    q,
                    steps: Vec::new(),
                    witness: Some(Univariate::one()),
                });
            }
            let names = sig.names();
            let tag = (0..)
                .map(|k| format!("w{k}"))
                .find(|n| !names.contains(n))
                .expect("fresh name");
            let ext = Arc::new(sig.with_central(&[sig.params()[0].as_str(), tag.as_str()], &[])?);
            let w = ext.param(1);
            let lift = |e: &WeylElement| WeylElement::from_terms(&ext, e.terms().map(|(m, c)| (*m, c.clone())));
            let mut ext_gens: Vec<WeylElement> = input.elements().iter().map(lift).collect();
            let qe = lift(&univariate_param(sig, &q)?);
            let rab = &WeylElement::one(&ext) - &(&qe * &WeylElement::var(&ext, w));
            ext_gens.push(rab);
            let kept = eliminate(&ext, &ext_gens, &[w], opts)?;
            let back: Vec<WeylElement> = kept
                .iter()
                .map(|e| WeylElement::from_terms(sig, e.terms().map(|(m, c)| (*m, c.clone()))))
                .collect();
            let basis = GroebnerBasis::new(sig, &back, &order, opts)?;
            Ok(Saturation {
                basis,
                input,
                q,
                steps: Vec::new(),
                witness: None,
            })
        }
    }
}

/// Checks that every S-pair of `gb` reduces to zero; for tests and audits.
pub fn is_groebner(gb: &GroebnerBasis) -> Result<bool> {
    let ring = &gb.ring;
    let active: Vec<usize> = (0..gb.entries.len()).collect();
    for i in 0..gb.entries.len() {
        for j in i + 1..gb.entries.len() {
            let (a, b) = (&gb.entries[i], &gb.entries[j]);
            if a.comp != b.comp {
                continue;
            }
            let lcm = a.lm.lcm(&b.lm);
            let ta = ring.mul_left(&a.lm.quotient_of(&lcm).unwrap(), a)?;
            let tb = ring.mul_left(&b.lm.quotient_of(&lcm).unwrap(), b)?;
            let s = ring.combine(0, b.lc(), &ta, a.lc(), &tb);
            let mut sugar = 0;
            let (r, _) = ring.reduce(&gb.entries, &active, s, 0, true, u32::MAX, &mut sugar, &Limits::default())?;
            if !r.is_empty() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_weyl;

    fn sig(xs: &[&str], ps: &[&str]) -> Arc<AlgebraSignature> {
        Arc::new(AlgebraSignature::weyl(xs, ps).unwrap())
    }

    fn ws(sig: &Arc<AlgebraSignature>, v: &[&str]) -> Vec<WeylElement> {
        v.iter().map(|s| parse_weyl(s, sig).unwrap()).collect()
    }

    fn opts() -> GbOptions {
        GbOptions::default()
    }

    #[test]
    fn normal_form_examples() {
        let s = sig(&["x"], &["s"]);
        let dx_x = parse_weyl("Dx*x", &s).unwrap();
        let nf = left_normal_form(&dx_x, &ws(&s, &["x*Dx - s"]), &MonomialOrder::DegRevLex).unwrap();
        assert_eq!(nf, parse_weyl("s + 1", &s).unwrap());
        let g = parse_weyl("x^2 + Dx", &s).unwrap();
        assert!(left_normal_form(&g, &[g.clone()], &MonomialOrder::DegRevLex).unwrap().is_zero());
        let x2 = parse_weyl("x^2", &s).unwrap();
        assert!(left_normal_form(&x2, &ws(&s, &["x"]), &MonomialOrder::DegRevLex).unwrap().is_zero());
    }

    #[test]
    fn weyl_unit_ideal() {
        let s = sig(&["x"], &[]);
        let gb = GroebnerBasis::new(&s, &ws(&s, &["x", "Dx"]), &MonomialOrder::DegRevLex, &opts()).unwrap();
        assert!(gb.is_unit());
        assert_eq!(gb.elements(), &ws(&s, &["1"])[..]);
    }

    #[test]
    fn single_generator_is_made_monic() {
        let s = sig(&["x", "y"], &["s"]);
        let gb = GroebnerBasis::new(&s, &ws(&s, &["3*x*Dx + 6*s"]), &MonomialOrder::DegRevLex, &opts()).unwrap();
        assert_eq!(gb.elements(), &ws(&s, &["x*Dx + 2*s"])[..]);
    }

    #[test]
    fn pq_basis_contains_generators() {
        let s = sig(&["x", "y"], &["s1", "s2"]);
        let g = ws(&s, &["x*Dx + y*Dy - 2*s1 - 2*s2", "x*y^2*Dx - x^2*y*Dy + x^2*s2 - y^2*s2"]);
        let gb = GroebnerBasis::new(&s, &g, &ds_order(&s), &opts()).unwrap();
        for p in &g {
            assert!(gb.contains(p).unwrap());
        }
        assert!(is_groebner(&gb).unwrap());
    }

    #[test]
    fn ideal_equality() {
        let s = sig(&["x"], &[]);
        assert!(ideal_equal(&s, &ws(&s, &["x", "x^2"]), &ws(&s, &["x"]), &MonomialOrder::DegRevLex, &opts()).unwrap());
        assert!(!ideal_equal(&s, &ws(&s, &["x^2"]), &ws(&s, &["x"]), &MonomialOrder::DegRevLex, &opts()).unwrap());
    }

    #[test]
    fn elimination_examples() {
        let s = sig(&["x"], &["s"]);
        let e = eliminate(&s, &ws(&s, &["x*Dx - s", "x"]), &s.xd_vars(), &opts()).unwrap();
        assert_eq!(e, ws(&s, &["s + 1"]));
        let same = eliminate(&s, &ws(&s, &["x*Dx - s"]), &[], &opts()).unwrap();
        assert_eq!(same, ws(&s, &["x*Dx - s"]));
    }

    #[test]
    fn syzygy_examples() {
        let s = sig(&["x"], &["s", "t"]);
        let q = ws(&s, &["s^2 + 1", "s*t - 3"]);
        let syz = syzygy(&s, &q, &MonomialOrder::DegRevLex, &opts()).unwrap();
        for v in &syz {
            assert!(v.dot(&q).unwrap().is_zero());
        }
        let koszul = ModuleVector {
            comps: vec![q[1].clone(), -&q[0]],
        };
        let m1 = module_gb(&s, &syz, &MonomialOrder::DegRevLex, &opts()).unwrap();
        let mut both = syz.clone();
        both.push(koszul);
        let m2 = module_gb(&s, &both, &MonomialOrder::DegRevLex, &opts()).unwrap();
        assert_eq!(m1, m2);
        assert!(syzygy(&s, &ws(&s, &["x*Dx + s"]), &MonomialOrder::DegRevLex, &opts()).unwrap().is_empty());
    }

    #[test]
    fn transporter_examples() {
        let s = sig(&["x"], &["s"]);
        let i = ws(&s, &["x*Dx - s", "x^2"]);
        let one = parse_weyl("1", &s).unwrap();
        let t = transporter(&s, &i, &one, &ds_order(&s), &opts()).unwrap();
        assert!(t.same_ideal(&GroebnerBasis::new(&s, &i, &ds_order(&s), &opts()).unwrap()));
        let x = parse_weyl("x", &s).unwrap();
        let t = transporter(&s, &ws(&s, &["x^2"]), &x, &ds_order(&s), &opts()).unwrap();
        assert_eq!(t.elements(), &ws(&s, &["x"])[..]);
    }

    #[test]
    fn leading_coefficients() {
        let s = sig(&["x"], &["s"]);
        let o = MonomialOrder::DegRevLex;
        let p = |t: &str| crate::parse::parse_comm(t, &["s"]).unwrap();
        assert_eq!(leading_coeff_in_params(&parse_weyl("s^2*x*Dx + x*Dx + s", &s).unwrap(), &o).unwrap(), p("s^2+1"));
        assert_eq!(leading_coeff_in_params(&parse_weyl("s*x^2 + x^2 + x", &s).unwrap(), &o).unwrap(), p("s+1"));
        assert_eq!(leading_coeff_in_params(&parse_weyl("x*Dx + 4", &s).unwrap(), &o).unwrap(), p("1"));
    }

    #[test]
    fn saturation_of_torsion_ideal() {
        // (s+1)·Dx ∈ I forces Dx into the saturation
        let s = sig(&["x"], &["s"]);
        let i = ws(&s, &["s*Dx + Dx", "Dx^2"]);
        for method in [SaturationMethod::PerFactor, SaturationMethod::Rabinowitsch] {
            let sat = central_saturation(&s, &i, method, &opts()).unwrap();
            assert_eq!(sat.basis.elements(), &ws(&s, &["Dx"])[..]);
            assert!(sat.changed());
        }
    }

    #[test]
    fn tracked_division_reconstructs() {
        let s = sig(&["x"], &["s"]);
        let plain = ws(&s, &["x*Dx - s"]);
        let tracked = ws(&s, &["x"]);
        let tb = TrackedBasis::new(&s, &plain, &tracked, &ds_order(&s), &opts()).unwrap();
        let p = parse_weyl("s + 1", &s).unwrap();
        let (r, c) = tb.divide(&p).unwrap();
        assert!(r.is_zero());
        let residue = &p - &(&c[0] * &tracked[0]);
        let gb = GroebnerBasis::new(&s, &plain, &ds_order(&s), &opts()).unwrap();
        assert!(gb.contains(&residue).unwrap());
    }
}
