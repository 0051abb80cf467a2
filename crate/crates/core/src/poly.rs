//! Commutative polynomials over ℚ, dense monomials and term orders.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::univariate::Univariate;

/// Upper bound on the number of variables of any ring built by this crate.
pub const MAX_VARS: usize = 16;

/// Dense exponent vector. Slots past the owning ring's variable count stay zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial {
    e: [u16; MAX_VARS],
}

impl Monomial {
    pub const ONE: Monomial = Monomial { e: [0; MAX_VARS] };

    pub fn from_exponents(exps: &[u32]) -> Result<Monomial> {
        if exps.len() > MAX_VARS {
            return Err(Error::TooManyVariables(exps.len()));
        }
        let mut m = Monomial::ONE;
        for (i, &x) in exps.iter().enumerate() {
            m.e[i] = u16::try_from(x).map_err(|_| Error::ExponentOverflow)?;
        }
        Ok(m)
    }

    pub fn var(i: usize, exp: u16) -> Monomial {
        let mut m = Monomial::ONE;
        m.e[i] = exp;
        m
    }

    #[inline]
    pub fn exp(&self, i: usize) -> u16 {
        self.e[i]
    }

    #[inline]
    pub fn set_exp(&mut self, i: usize, v: u16) {
        self.e[i] = v;
    }

    pub fn exponents(&self, nvars: usize) -> &[u16] {
        &self.e[..nvars]
    }

    pub fn is_one(&self) -> bool {
        self.e.iter().all(|&x| x == 0)
    }

    /// Index one past the last nonzero exponent.
    pub fn support_len(&self) -> usize {
        self.e.iter().rposition(|&x| x != 0).map_or(0, |i| i + 1)
    }

    pub fn degree(&self) -> u32 {
        self.e.iter().map(|&x| x as u32).sum()
    }

    pub fn degree_in(&self, vars: &[usize]) -> u32 {
        vars.iter().map(|&i| self.e[i] as u32).sum()
    }

    #[inline]
    pub fn checked_mul(&self, other: &Monomial) -> Option<Monomial> {
        let mut r = Monomial::ONE;
        for i in 0..MAX_VARS {
            r.e[i] = self.e[i].checked_add(other.e[i])?;
        }
        Some(r)
    }

    pub fn try_mul(&self, other: &Monomial) -> Result<Monomial> {
        self.checked_mul(other).ok_or(Error::ExponentOverflow)
    }

    #[inline]
    pub fn divides(&self, other: &Monomial) -> bool {
        self.e.iter().zip(other.e.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, if `self` divides `other`.
    #[inline]
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        let mut r = Monomial::ONE;
        for i in 0..MAX_VARS {
            r.e[i] = other.e[i].checked_sub(self.e[i])?;
        }
        Some(r)
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut r = Monomial::ONE;
        for i in 0..MAX_VARS {
            r.e[i] = self.e[i].max(other.e[i]);
        }
        r
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.e.iter().zip(other.e.iter()).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Bit `i` set iff variable `i` occurs; a cheap divisibility pre-filter.
    #[inline]
    pub fn support_mask(&self) -> u32 {
        let mut m = 0u32;
        for i in 0..MAX_VARS {
            if self.e[i] != 0 {
                m |= 1 << i;
            }
        }
        m
    }
}

impl std::fmt::Debug for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", &self.e[..self.support_len()])
    }
}

/// Declarative description of a term order.
///
/// Plain orders range over every variable, indexed from 0 (the largest under
/// lex). `Block` applies sub-orders to variable blocks in sequence; the
/// indices inside a sub-order refer to positions within its block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonomialOrder {
    Lex,
    DegRevLex,
    /// Weighted degree first, then the tie-breaking order.
    Weighted {
        weights: Vec<u32>,
        tie: Box<MonomialOrder>,
    },
    Block(Vec<OrderBlock>),
    /// Module order: component index first (lower index is larger).
    PositionOverTerm(Box<MonomialOrder>),
    /// Module order: monomial first, component breaks ties.
    TermOverPosition(Box<MonomialOrder>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderBlock {
    pub vars: Vec<usize>,
    pub order: MonomialOrder,
}

impl MonomialOrder {
    pub fn block(blocks: Vec<(Vec<usize>, MonomialOrder)>) -> MonomialOrder {
        MonomialOrder::Block(
            blocks
                .into_iter()
                .map(|(vars, order)| OrderBlock { vars, order })
                .collect(),
        )
    }

    pub fn compile(&self, nvars: usize) -> Result<CompiledOrder> {
        if nvars > MAX_VARS {
            return Err(Error::TooManyVariables(nvars));
        }
        let all: Vec<usize> = (0..nvars).collect();
        let mut steps = Vec::new();
        self.compile_into(&all, &mut steps, true)?;
        let mut covered = vec![false; nvars];
        for s in &steps {
            if let Step::Lex(v) | Step::RevLex(v) = s {
                for &i in v {
                    covered[i as usize] = true;
                }
            }
        }
        if let Some(i) = covered.iter().position(|c| !c) {
            return Err(Error::InvalidOrder(format!(
                "variable {i} is not covered by any tie-breaking block"
            )));
        }
        Ok(CompiledOrder { nvars, steps })
    }

    fn compile_into(&self, vars: &[usize], steps: &mut Vec<Step>, top: bool) -> Result<()> {
        let v8 = || vars.iter().map(|&i| i as u8).collect::<Vec<u8>>();
        match self {
            MonomialOrder::Lex => steps.push(Step::Lex(v8())),
            MonomialOrder::DegRevLex => {
                steps.push(Step::Degree(v8()));
                steps.push(Step::RevLex(v8()));
            }
            MonomialOrder::Weighted { weights, tie } => {
                if weights.len() != vars.len() {
                    return Err(Error::InvalidOrder(format!(
                        "weight vector has length {} but the block has {} variables",
                        weights.len(),
                        vars.len()
                    )));
                }
                steps.push(Step::Weight(
                    vars.iter()
                        .zip(weights)
                        .filter(|(_, &w)| w != 0)
                        .map(|(&i, &w)| (i as u8, w))
                        .collect(),
                ));
                tie.compile_into(vars, steps, false)?;
            }
            MonomialOrder::Block(blocks) => {
                let mut seen = vec![false; vars.len()];
                for b in blocks {
                    let mut mapped = Vec::with_capacity(b.vars.len());
                    for &j in &b.vars {
                        if j >= vars.len() || seen[j] {
                            return Err(Error::InvalidOrder(format!(
                                "block variable {j} out of range or repeated"
                            )));
                        }
                        seen[j] = true;
                        mapped.push(vars[j]);
                    }
                    b.order.compile_into(&mapped, steps, false)?;
                }
            }
            MonomialOrder::PositionOverTerm(inner) | MonomialOrder::TermOverPosition(inner) => {
                if !top {
                    return Err(Error::InvalidOrder(
                        "module orders may only appear at the top level".into(),
                    ));
                }
                let pot = matches!(self, MonomialOrder::PositionOverTerm(_));
                if pot {
                    steps.push(Step::Position);
                }
                inner.compile_into(vars, steps, false)?;
                if !pot {
                    steps.push(Step::Position);
                }
            }
        }
        Ok(())
    }

    /// Compare two monomials of an `nvars`-variable ring.
    pub fn compare(&self, nvars: usize, a: &Monomial, b: &Monomial) -> Result<Ordering> {
        if a.support_len() > nvars || b.support_len() > nvars {
            return Err(Error::SignatureMismatch);
        }
        Ok(self.compile(nvars)?.cmp(a, b))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Step {
    Position,
    Degree(Vec<u8>),
    Weight(Vec<(u8, u32)>),
    Lex(Vec<u8>),
    RevLex(Vec<u8>),
}

/// An order flattened into a sequence of comparison steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledOrder {
    nvars: usize,
    steps: Vec<Step>,
}

impl CompiledOrder {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    #[inline]
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        self.cmp_terms(0, a, 0, b)
    }

    /// Compare module terms `(component, monomial)`.
    #[inline]
    pub fn cmp_terms(&self, ca: u32, a: &Monomial, cb: u32, b: &Monomial) -> Ordering {
        for s in &self.steps {
            let o = match s {
                Step::Position => cb.cmp(&ca),
                Step::Degree(v) => {
                    let (mut da, mut db) = (0u32, 0u32);
                    for &i in v {
                        da += a.e[i as usize] as u32;
                        db += b.e[i as usize] as u32;
                    }
                    da.cmp(&db)
                }
                Step::Weight(v) => {
                    let (mut da, mut db) = (0u64, 0u64);
                    for &(i, w) in v {
                        da += a.e[i as usize] as u64 * w as u64;
                        db += b.e[i as usize] as u64 * w as u64;
                    }
                    da.cmp(&db)
                }
                Step::Lex(v) => {
                    let mut o = Ordering::Equal;
                    for &i in v {
                        let (x, y) = (a.e[i as usize], b.e[i as usize]);
                        if x != y {
                            o = x.cmp(&y);
                            break;
                        }
                    }
                    o
                }
                Step::RevLex(v) => {
                    let mut o = Ordering::Equal;
                    for &i in v.iter().rev() {
                        let (x, y) = (a.e[i as usize], b.e[i as usize]);
                        if x != y {
                            o = y.cmp(&x);
                            break;
                        }
                    }
                    o
                }
            };
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    }
}

pub fn compare(order: &CompiledOrder, a: &Monomial, b: &Monomial) -> Result<Ordering> {
    if a.support_len() > order.nvars || b.support_len() > order.nvars {
        return Err(Error::SignatureMismatch);
    }
    Ok(order.cmp(a, b))
}

/// Commutative polynomial with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CommPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl CommPoly {
    pub fn zero(nvars: usize) -> CommPoly {
        assert!(nvars <= MAX_VARS, "too many variables");
        CommPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> CommPoly {
        let mut p = CommPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::ONE, c);
        }
        p
    }

    pub fn one(nvars: usize) -> CommPoly {
        CommPoly::constant(nvars, BigRational::one())
    }

    pub fn var(nvars: usize, i: usize) -> CommPoly {
        assert!(i < nvars);
        CommPoly::monomial(nvars, Monomial::var(i, 1), BigRational::one())
    }

    pub fn monomial(nvars: usize, m: Monomial, c: BigRational) -> CommPoly {
        debug_assert!(m.support_len() <= nvars);
        let mut p = CommPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> CommPoly {
        let mut p = CommPoly::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn constant_term(&self) -> BigRational {
        self.terms.get(&Monomial::ONE).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        debug_assert!(m.support_len() <= self.nvars);
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn degree_in(&self, i: usize) -> Option<u16> {
        self.terms.keys().map(|m| m.exp(i)).max()
    }

    pub fn scale(&self, c: &BigRational) -> CommPoly {
        if c.is_zero() {
            return CommPoly::zero(self.nvars);
        }
        CommPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Result<CommPoly> {
        let mut terms = BTreeMap::new();
        for (t, c) in &self.terms {
            terms.insert(t.try_mul(m)?, c.clone());
        }
        Ok(CommPoly { nvars: self.nvars, terms })
    }

    pub fn try_mul(&self, other: &CommPoly) -> Result<CommPoly> {
        if self.nvars != other.nvars {
            return Err(Error::SignatureMismatch);
        }
        let mut out = CommPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.try_mul(mb)?, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> CommPoly {
        let mut acc = CommPoly::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn derivative(&self, i: usize) -> CommPoly {
        let mut out = CommPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exp(i);
            if e > 0 {
                let mut m2 = *m;
                m2.set_exp(i, e - 1);
                out.add_term(m2, c * int(e as i64));
            }
        }
        out
    }

    /// Substitute every variable by a polynomial over `target_nvars` variables.
    pub fn compose(&self, images: &[CommPoly], target_nvars: usize) -> Result<CommPoly> {
        if images.len() != self.nvars || images.iter().any(|p| p.nvars != target_nvars) {
            return Err(Error::SignatureMismatch);
        }
        let mut powers: Vec<Vec<CommPoly>> = vec![vec![CommPoly::one(target_nvars)]; self.nvars];
        let mut out = CommPoly::zero(target_nvars);
        for (m, c) in &self.terms {
            let mut t = CommPoly::constant(target_nvars, c.clone());
            for (i, img) in images.iter().enumerate() {
                let e = m.exp(i) as usize;
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e {
                    let next = &powers[i][powers[i].len() - 1] * img;
                    powers[i].push(next);
                }
                t = &t * &powers[i][e];
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Rename variables: old index `i` becomes `map[i]` in a ring of `target_nvars`.
    pub fn remap(&self, map: &[usize], target_nvars: usize) -> Result<CommPoly> {
        if target_nvars > MAX_VARS {
            return Err(Error::TooManyVariables(target_nvars));
        }
        let mut out = CommPoly::zero(target_nvars);
        for (m, c) in &self.terms {
            let mut m2 = Monomial::ONE;
            for i in 0..self.nvars {
                let e = m.exp(i);
                if e == 0 {
                    continue;
                }
                let j = *map.get(i).ok_or(Error::SignatureMismatch)?;
                if j >= target_nvars {
                    return Err(Error::SignatureMismatch);
                }
                m2.set_exp(j, m2.exp(j).checked_add(e).ok_or(Error::ExponentOverflow)?);
            }
            out.add_term(m2, c.clone());
        }
        Ok(out)
    }

    pub fn uses_only(&self, vars: &[usize]) -> bool {
        self.terms
            .keys()
            .all(|m| (0..self.nvars).all(|i| m.exp(i) == 0 || vars.contains(&i)))
    }

    pub fn leading_term(&self, order: &CompiledOrder) -> Option<(Monomial, BigRational)> {
        self.terms
            .iter()
            .max_by(|a, b| order.cmp(a.0, b.0))
            .map(|(m, c)| (*m, c.clone()))
    }

    /// Divide by the leading coefficient under `order`.
    pub fn monic(&self, order: &CompiledOrder) -> CommPoly {
        match self.leading_term(order) {
            None => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    /// Scale to a primitive polynomial with integer coefficients and positive leading coefficient.
    pub fn primitive_integer(&self, order: &CompiledOrder) -> CommPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut den = BigInt::one();
        for c in self.terms.values() {
            den = den.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(&(c.numer() * (&den / c.denom())));
        }
        let mut factor = BigRational::new(den, g);
        if self.leading_term(order).unwrap().1.is_negative() {
            factor = -factor;
        }
        self.scale(&factor)
    }

    pub fn eval_var(&self, i: usize, v: &BigRational) -> CommPoly {
        let mut out = CommPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut m2 = *m;
            let e = m.exp(i);
            m2.set_exp(i, 0);
            out.add_term(m2, c * num_traits::pow(v.clone(), e as usize));
        }
        out
    }

    /// View as a univariate polynomial in variable `i`; fails if other variables occur.
    pub fn to_univariate(&self, i: usize) -> Result<Univariate> {
        let mut coeffs = Vec::new();
        for (m, c) in &self.terms {
            let e = m.exp(i) as usize;
            if m.degree() as usize != e {
                return Err(Error::InvalidInput("polynomial is not univariate".into()));
            }
            if coeffs.len() <= e {
                coeffs.resize(e + 1, BigRational::zero());
            }
            coeffs[e] = c.clone();
        }
        Ok(Univariate::new(coeffs))
    }

    pub fn from_univariate(u: &Univariate, nvars: usize, i: usize) -> CommPoly {
        CommPoly::from_terms(
            nvars,
            u.coeffs()
                .iter()
                .enumerate()
                .map(|(e, c)| (Monomial::var(i, e as u16), c.clone())),
        )
    }

    /// Coefficients with respect to variable `i`, as polynomials in the remaining variables.
    pub fn coefficients_in(&self, i: usize) -> Vec<CommPoly> {
        let mut out: Vec<CommPoly> = Vec::new();
        for (m, c) in &self.terms {
            let e = m.exp(i) as usize;
            while out.len() <= e {
                out.push(CommPoly::zero(self.nvars));
            }
            let mut m2 = *m;
            m2.set_exp(i, 0);
            out[e].add_term(m2, c.clone());
        }
        out
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        let order = MonomialOrder::DegRevLex.compile(self.nvars).expect("valid order");
        let mut terms: Vec<(&Monomial, &BigRational)> = self.terms.iter().collect();
        terms.sort_by(|a, b| order.cmp(b.0, a.0));
        format_terms(terms.into_iter().map(|(m, c)| (c.clone(), monomial_string(m, names))))
    }
}

pub(crate) fn monomial_string(m: &Monomial, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, name) in names.iter().enumerate() {
        match m.exp(i) {
            0 => {}
            1 => parts.push(name.clone()),
            e => parts.push(format!("{name}^{e}")),
        }
    }
    parts.join("*")
}

/// Render `(coefficient, monomial-string)` pairs in the input grammar.
pub(crate) fn format_terms(terms: impl Iterator<Item = (BigRational, String)>) -> String {
    let mut s = String::new();
    for (c, m) in terms {
        let neg = c.is_negative();
        let a = c.abs();
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if m.is_empty() {
            let _ = write!(s, "{a}");
        } else if a.is_one() {
            s.push_str(&m);
        } else {
            let _ = write!(s, "{a}*{m}");
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

impl std::fmt::Debug for CommPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("v{i}")).collect();
        write!(f, "{}", self.to_string_with(&names))
    }
}

impl Add for &CommPoly {
    type Output = CommPoly;
    fn add(self, rhs: &CommPoly) -> CommPoly {
        assert_eq!(self.nvars, rhs.nvars, "signature mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &CommPoly {
    type Output = CommPoly;
    fn sub(self, rhs: &CommPoly) -> CommPoly {
        assert_eq!(self.nvars, rhs.nvars, "signature mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Mul for &CommPoly {
    type Output = CommPoly;
    fn mul(self, rhs: &CommPoly) -> CommPoly {
        self.try_mul(rhs).expect("polynomial product overflowed or mixed signatures")
    }
}

impl Neg for &CommPoly {
    type Output = CommPoly;
    fn neg(self) -> CommPoly {
        self.scale(&-BigRational::one())
    }
}

/// Integers ℓ such that `s1 + s2 + ℓ` divides `b(s1, s2)` (variables 0 and 1).
///
/// Substituting `s1 = u`, `s2 = w - u` turns a line `s1 + s2 + ℓ` into `w + ℓ`;
/// it divides `b` iff `w + ℓ` divides every `u`-coefficient, i.e. their gcd.
pub fn integer_shift_lines(b: &CommPoly) -> Result<Vec<i64>> {
    if b.is_zero() {
        return Err(Error::ZeroInput("integer_shift_lines"));
    }
    if b.nvars() != 2 {
        return Err(Error::SignatureMismatch);
    }
    // variables of the substituted ring: 0 = u, 1 = w
    let u = CommPoly::var(2, 0);
    let w = CommPoly::var(2, 1);
    let sub = b.compose(&[u.clone(), &w - &u], 2)?;
    let mut g = Univariate::zero();
    for c in sub.coefficients_in(0) {
        if c.is_zero() {
            continue;
        }
        g = g.gcd(&c.to_univariate(1)?);
    }
    let mut out: Vec<i64> = g
        .rational_roots()
        .into_iter()
        .filter(|(r, _)| r.is_integer())
        .filter_map(|(r, _)| num_traits::ToPrimitive::to_i64(&-r.to_integer()))
        .collect();
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s2() -> (CommPoly, CommPoly) {
        (CommPoly::var(2, 0), CommPoly::var(2, 1))
    }

    fn lin(a: i64, b: i64, c: i64) -> CommPoly {
        let (s1, s2) = s2();
        &(&s1.scale(&int(a)) + &s2.scale(&int(b))) + &CommPoly::constant(2, int(c))
    }

    fn product(fs: &[CommPoly]) -> CommPoly {
        fs.iter().fold(CommPoly::one(2), |acc, f| &acc * f)
    }

    /// Brute-force oracle: ℓ is in L_b iff b(t, -t-ℓ) vanishes identically in t.
    pub(crate) fn shift_lines_oracle(b: &CommPoly, bound: i64) -> Vec<i64> {
        let t = CommPoly::var(1, 0);
        (-bound..=bound)
            .filter(|&l| {
                let img = [t.clone(), &(-&t) - &CommPoly::constant(1, int(l))];
                b.compose(&img, 1).unwrap().is_zero()
            })
            .collect()
    }

    #[test]
    fn degrevlex_compares_by_degree_then_reverse_lex() {
        let o = MonomialOrder::DegRevLex.compile(2).unwrap();
        let x2y = Monomial::from_exponents(&[2, 1]).unwrap();
        let xy2 = Monomial::from_exponents(&[1, 2]).unwrap();
        assert_eq!(o.cmp(&x2y, &xy2), Ordering::Greater);
    }

    #[test]
    fn ds_block_order_examples() {
        // variables: x, Dx, s
        let o = MonomialOrder::block(vec![
            (vec![0, 1], MonomialOrder::DegRevLex),
            (vec![2], MonomialOrder::DegRevLex),
        ])
        .compile(3)
        .unwrap();
        let s_xd = Monomial::from_exponents(&[1, 1, 1]).unwrap();
        let s2_xd = Monomial::from_exponents(&[1, 1, 2]).unwrap();
        assert_eq!(o.cmp(&s_xd, &s2_xd), Ordering::Less);
        let s3 = Monomial::from_exponents(&[0, 0, 3]).unwrap();
        let x = Monomial::from_exponents(&[1, 0, 0]).unwrap();
        assert_eq!(o.cmp(&s3, &x), Ordering::Less);
    }

    #[test]
    fn compare_rejects_foreign_monomials() {
        let a = Monomial::from_exponents(&[0, 0, 1]).unwrap();
        assert_eq!(
            MonomialOrder::Lex.compare(2, &a, &Monomial::ONE),
            Err(Error::SignatureMismatch)
        );
    }

    #[test]
    fn incomplete_block_order_is_rejected() {
        let o = MonomialOrder::block(vec![(vec![0], MonomialOrder::Lex)]);
        assert!(matches!(o.compile(2), Err(Error::InvalidOrder(_))));
    }

    #[test]
    fn shift_lines_of_pair_bs_ideal() {
        let b = product(&[
            lin(1, 0, 1),
            lin(0, 1, 1),
            lin(1, 1, 1),
            lin(1, 1, 2),
            lin(1, 1, 3),
            lin(2, 2, 3),
            lin(2, 2, 5),
        ]);
        assert_eq!(integer_shift_lines(&b).unwrap(), vec![1, 2, 3]);
    }

    #[test]
    fn shift_lines_of_single_variable_factors_is_empty() {
        let b = product(&[lin(1, 0, 1), lin(0, 1, 1)]);
        assert!(integer_shift_lines(&b).unwrap().is_empty());
    }

    #[test]
    fn shift_lines_matches_scan() {
        let b = product(&[lin(1, 1, 2), lin(2, 2, 5), lin(1, -1, 0)]);
        let oracle = shift_lines_oracle(&b, 40);
        assert_eq!(oracle, vec![2]);
        assert_eq!(integer_shift_lines(&b).unwrap(), oracle);
    }

    #[test]
    fn shift_lines_rejects_zero() {
        assert!(integer_shift_lines(&CommPoly::zero(2)).is_err());
    }

    #[test]
    fn overflow_is_reported() {
        let m = Monomial::var(0, u16::MAX);
        assert_eq!(m.try_mul(&Monomial::var(0, 1)), Err(Error::ExponentOverflow));
    }

    #[test]
    fn compose_and_derivative() {
        let (x, y) = s2();
        let f = &(&x * &x) + &(&y * &y);
        assert_eq!(f.derivative(0), x.scale(&int(2)));
        let img = [y.clone(), x.clone()];
        assert_eq!(f.compose(&img, 2).unwrap(), f);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_mono(n: usize) -> impl Strategy<Value = Monomial> {
            proptest::collection::vec(0u32..6, n).prop_map(|v| Monomial::from_exponents(&v).unwrap())
        }

        fn arb_order() -> impl Strategy<Value = MonomialOrder> {
            prop_oneof![
                Just(MonomialOrder::Lex),
                Just(MonomialOrder::DegRevLex),
                Just(MonomialOrder::Weighted {
                    weights: vec![3, 1, 2, 1],
                    tie: Box::new(MonomialOrder::Lex)
                }),
                Just(MonomialOrder::block(vec![
                    (vec![0, 1], MonomialOrder::DegRevLex),
                    (vec![2, 3], MonomialOrder::DegRevLex)
                ])),
                Just(MonomialOrder::block(vec![
                    (vec![3], MonomialOrder::Lex),
                    (vec![0, 1, 2], MonomialOrder::DegRevLex)
                ])),
            ]
        }

        fn arb_poly() -> impl Strategy<Value = CommPoly> {
            proptest::collection::vec((arb_mono(2), -5i64..6), 0..5)
                .prop_map(|ts| CommPoly::from_terms(2, ts.into_iter().map(|(m, c)| (m, int(c)))))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(10_000))]
            #[test]
            fn order_axioms(o in arb_order(), a in arb_mono(4), b in arb_mono(4), c in arb_mono(4)) {
                let o = o.compile(4).unwrap();
                // totality: equal only when identical
                prop_assert_eq!(o.cmp(&a, &b) == Ordering::Equal, a == b);
                prop_assert_eq!(o.cmp(&a, &b), o.cmp(&b, &a).reverse());
                prop_assert_ne!(o.cmp(&Monomial::ONE, &a), Ordering::Greater);
                let ac = a.checked_mul(&c).unwrap();
                let bc = b.checked_mul(&c).unwrap();
                prop_assert_eq!(o.cmp(&a, &b), o.cmp(&ac, &bc));
            }
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(400))]
            #[test]
            fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
                prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
                prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
                prop_assert_eq!(&a * &b, &b * &a);
                prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            }

            #[test]
            fn shift_lines_agree_with_scan(
                forms in proptest::collection::vec((-2i64..3, -2i64..3, -6i64..7), 1..7)
            ) {
                let factors: Vec<CommPoly> = forms
                    .iter()
                    .filter(|(a, b, _)| *a != 0 || *b != 0)
                    .map(|&(a, b, c)| lin(a, b, c))
                    .collect();
                prop_assume!(!factors.is_empty());
                let b = product(&factors);
                prop_assert_eq!(integer_shift_lines(&b).unwrap(), shift_lines_oracle(&b, 60));
            }
        }
    }
}
