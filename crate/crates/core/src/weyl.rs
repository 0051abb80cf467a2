//! Weyl algebras extended by central variables, and the twisted module
//! `ℚ[x, s, 1/(fg)]·f^{s1} g^{s2}` they act on.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::int::Int;
use crate::poly::{format_terms, int, monomial_string, CommPoly, CompiledOrder, Monomial, MAX_VARS};

/// Variable layout: `x_1..x_n, ∂_1..∂_n, params.., aux.., T_1..T_k, S_1..S_k`.
///
/// The relations are `∂_i x_i = x_i ∂_i + 1` and, for the optional shift
/// pairs, `S_j T_j = T_j (S_j + 1)`. Parameters and auxiliary variables are
/// central. Shift pairs are only used inside annihilator computations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraSignature {
    pairs: Vec<(String, String)>,
    params: Vec<String>,
    aux: Vec<String>,
    shifts: Vec<(String, String)>,
}

impl AlgebraSignature {
    pub fn new(pairs: Vec<(String, String)>, params: Vec<String>, aux: Vec<String>) -> Result<Self> {
        Self::with_shifts(pairs, params, aux, Vec::new())
    }

    pub fn with_shifts(
        pairs: Vec<(String, String)>,
        params: Vec<String>,
        aux: Vec<String>,
        shifts: Vec<(String, String)>,
    ) -> Result<Self> {
        let sig = AlgebraSignature { pairs, params, aux, shifts };
        let names = sig.names();
        if names.len() > MAX_VARS {
            return Err(Error::TooManyVariables(names.len()));
        }
        for (i, a) in names.iter().enumerate() {
            if a.is_empty() || names[..i].contains(a) {
                return Err(Error::InvalidInput(format!("duplicate or empty variable name {a:?}")));
            }
        }
        Ok(sig)
    }

    /// Weyl pairs `(x, Dx)` for each position name, plus central parameters.
    pub fn weyl(xs: &[&str], params: &[&str]) -> Result<Self> {
        Self::with_aux(xs, params, &[])
    }

    pub fn with_aux(xs: &[&str], params: &[&str], aux: &[&str]) -> Result<Self> {
        AlgebraSignature::new(
            xs.iter().map(|x| (x.to_string(), format!("D{x}"))).collect(),
            params.iter().map(|s| s.to_string()).collect(),
            aux.iter().map(|s| s.to_string()).collect(),
        )
    }

    pub fn n_pairs(&self) -> usize {
        self.pairs.len()
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    pub fn n_aux(&self) -> usize {
        self.aux.len()
    }

    pub fn n_shifts(&self) -> usize {
        self.shifts.len()
    }

    pub fn nvars(&self) -> usize {
        2 * self.pairs.len() + self.params.len() + self.aux.len() + 2 * self.shifts.len()
    }

    pub fn x(&self, i: usize) -> usize {
        i
    }

    pub fn d(&self, i: usize) -> usize {
        self.pairs.len() + i
    }

    pub fn param(&self, j: usize) -> usize {
        2 * self.pairs.len() + j
    }

    pub fn aux(&self, k: usize) -> usize {
        2 * self.pairs.len() + self.params.len() + k
    }

    pub fn shift_t(&self, j: usize) -> usize {
        2 * self.pairs.len() + self.params.len() + self.aux.len() + j
    }

    pub fn shift_s(&self, j: usize) -> usize {
        self.shift_t(j) + self.shifts.len()
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn aux_names(&self) -> &[String] {
        &self.aux
    }

    pub fn names(&self) -> Vec<String> {
        let mut v: Vec<String> = self.pairs.iter().map(|p| p.0.clone()).collect();
        v.extend(self.pairs.iter().map(|p| p.1.clone()));
        v.extend(self.params.iter().cloned());
        v.extend(self.aux.iter().cloned());
        v.extend(self.shifts.iter().map(|p| p.0.clone()));
        v.extend(self.shifts.iter().map(|p| p.1.clone()));
        v
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names().iter().position(|n| n == name)
    }

    /// Indices of all `x_i` and `∂_i`.
    pub fn xd_vars(&self) -> Vec<usize> {
        (0..2 * self.pairs.len()).collect()
    }

    pub fn param_vars(&self) -> Vec<usize> {
        (0..self.params.len()).map(|j| self.param(j)).collect()
    }

    pub fn aux_vars(&self) -> Vec<usize> {
        (0..self.aux.len()).map(|k| self.aux(k)).collect()
    }

    /// Same Weyl pairs, different central variables.
    pub fn with_central(&self, params: &[&str], aux: &[&str]) -> Result<Self> {
        AlgebraSignature::new(
            self.pairs.clone(),
            params.iter().map(|s| s.to_string()).collect(),
            aux.iter().map(|s| s.to_string()).collect(),
        )
    }

    /// Map from the commutative layout `x_1..x_n, params..` to signature indices.
    pub fn comm_layout(&self) -> Vec<usize> {
        let n = self.pairs.len();
        (0..n).chain((0..self.params.len()).map(|j| self.param(j))).collect()
    }

    pub fn x_names(&self) -> Vec<String> {
        self.pairs.iter().map(|p| p.0.clone()).collect()
    }
}

/// Binomial-type coefficient of `∂^β x^α`: `C(β,k) C(α,k) k!` for k = 0..=min.
fn leibniz_coeffs(beta: u16, alpha: u16) -> Vec<Int> {
    let kmax = beta.min(alpha);
    let mut out = Vec::with_capacity(kmax as usize + 1);
    let mut c = Int::ONE;
    out.push(c.clone());
    for k in 0..kmax {
        c = c
            .mul_ref(&Int::from(((beta - k) as i64) * ((alpha - k) as i64)))
            .div_exact(&Int::from(k as i64 + 1));
        out.push(c.clone());
    }
    out
}

/// Normally ordered expansion of the monomial product `a · b`.
pub(crate) fn monomial_product(
    sig: &AlgebraSignature,
    a: &Monomial,
    b: &Monomial,
    out: &mut Vec<(Monomial, Int)>,
) -> Result<()> {
    let npairs = sig.n_pairs();
    let base = a.try_mul(b)?;
    // (index lowered, second index lowered or usize::MAX, coefficients)
    let mut active: Vec<(usize, usize, Vec<Int>)> = Vec::new();
    for i in 0..npairs {
        let beta = a.exp(npairs + i);
        let alpha = b.exp(i);
        if beta > 0 && alpha > 0 {
            active.push((i, npairs + i, leibniz_coeffs(beta, alpha)));
        }
    }
    for j in 0..sig.n_shifts() {
        let (t, s) = (sig.shift_t(j), sig.shift_s(j));
        let beta = a.exp(s);
        let alpha = b.exp(t);
        if beta > 0 && alpha > 0 {
            active.push((s, usize::MAX, shift_coeffs(beta, alpha)));
        }
    }
    if active.is_empty() {
        out.push((base, Int::ONE));
        return Ok(());
    }
    let mut ks = vec![0usize; active.len()];
    loop {
        let mut m = base;
        let mut c = Int::ONE;
        for (slot, (i, i2, coeffs)) in active.iter().enumerate() {
            let k = ks[slot];
            if k > 0 {
                m.set_exp(*i, m.exp(*i) - k as u16);
                if *i2 != usize::MAX {
                    m.set_exp(*i2, m.exp(*i2) - k as u16);
                }
                c = c.mul_ref(&coeffs[k]);
            }
        }
        out.push((m, c));
        let mut slot = 0;
        loop {
            if slot == active.len() {
                return Ok(());
            }
            ks[slot] += 1;
            if ks[slot] < active[slot].2.len() {
                break;
            }
            ks[slot] = 0;
            slot += 1;
        }
    }
}

/// Coefficients of `S^β T^α = T^α (S + α)^β`: `C(β,k) α^k` on `S^{β-k}`.
fn shift_coeffs(beta: u16, alpha: u16) -> Vec<Int> {
    let mut out = Vec::with_capacity(beta as usize + 1);
    let mut c = Int::ONE;
    out.push(c.clone());
    for k in 0..beta {
        c = c
            .mul_ref(&Int::from(((beta - k) as i64) * alpha as i64))
            .div_exact(&Int::from(k as i64 + 1));
        out.push(c.clone());
    }
    out
}

/// Element of a Weyl algebra with central variables, in normal order
/// `x^α ∂^β c^γ`.
#[derive(Clone, PartialEq, Eq)]
pub struct WeylElement {
    sig: Arc<AlgebraSignature>,
    terms: BTreeMap<Monomial, BigRational>,
}

impl WeylElement {
    pub fn zero(sig: &Arc<AlgebraSignature>) -> Self {
        WeylElement {
            sig: sig.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(sig: &Arc<AlgebraSignature>, c: BigRational) -> Self {
        Self::monomial(sig, Monomial::ONE, c)
    }

    pub fn one(sig: &Arc<AlgebraSignature>) -> Self {
        Self::constant(sig, BigRational::one())
    }

    pub fn var(sig: &Arc<AlgebraSignature>, i: usize) -> Self {
        assert!(i < sig.nvars());
        Self::monomial(sig, Monomial::var(i, 1), BigRational::one())
    }

    pub fn monomial(sig: &Arc<AlgebraSignature>, m: Monomial, c: BigRational) -> Self {
        let mut e = Self::zero(sig);
        e.add_term(m, c);
        e
    }

    pub fn from_terms(sig: &Arc<AlgebraSignature>, terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut e = Self::zero(sig);
        for (m, c) in terms {
            e.add_term(m, c);
        }
        e
    }

    /// Embed a commutative polynomial in the layout `x_1..x_n, params..`.
    pub fn from_comm(sig: &Arc<AlgebraSignature>, p: &CommPoly) -> Result<Self> {
        let layout = sig.comm_layout();
        if p.nvars() != layout.len() {
            return Err(Error::SignatureMismatch);
        }
        let q = p.remap(&layout, sig.nvars())?;
        Ok(Self::from_terms(sig, q.terms().map(|(m, c)| (*m, c.clone()))))
    }

    /// Embed a polynomial in the position variables only.
    pub fn from_x_poly(sig: &Arc<AlgebraSignature>, f: &CommPoly) -> Result<Self> {
        let n = sig.n_pairs();
        if f.nvars() != n {
            return Err(Error::SignatureMismatch);
        }
        let map: Vec<usize> = (0..n).collect();
        let q = f.remap(&map, sig.nvars())?;
        Ok(Self::from_terms(sig, q.terms().map(|(m, c)| (*m, c.clone()))))
    }

    /// The element as a polynomial in `x_1..x_n, params..` when it has no ∂ or aux.
    pub fn to_comm(&self) -> Option<CommPoly> {
        let layout = self.sig.comm_layout();
        let mut inv = vec![usize::MAX; self.sig.nvars()];
        for (k, &i) in layout.iter().enumerate() {
            inv[i] = k;
        }
        let mut out = CommPoly::zero(layout.len());
        for (m, c) in &self.terms {
            let mut m2 = Monomial::ONE;
            for i in 0..self.sig.nvars() {
                let e = m.exp(i);
                if e > 0 {
                    if inv[i] == usize::MAX {
                        return None;
                    }
                    m2.set_exp(inv[i], e);
                }
            }
            out.add_term(m2, c.clone());
        }
        Some(out)
    }

    /// The element as a polynomial in the parameters only, if it is one.
    pub fn to_param_poly(&self) -> Option<CommPoly> {
        let base = 2 * self.sig.n_pairs();
        let np = self.sig.n_params();
        let mut out = CommPoly::zero(np);
        for (m, c) in &self.terms {
            let mut m2 = Monomial::ONE;
            for i in 0..self.sig.nvars() {
                let e = m.exp(i);
                if e == 0 {
                    continue;
                }
                if i < base || i >= base + np {
                    return None;
                }
                m2.set_exp(i - base, e);
            }
            out.add_term(m2, c.clone());
        }
        Some(out)
    }

    pub fn from_param_poly(sig: &Arc<AlgebraSignature>, p: &CommPoly) -> Result<Self> {
        if p.nvars() != sig.n_params() {
            return Err(Error::SignatureMismatch);
        }
        let map: Vec<usize> = (0..sig.n_params()).map(|j| sig.param(j)).collect();
        let q = p.remap(&map, sig.nvars())?;
        Ok(Self::from_terms(sig, q.terms().map(|(m, c)| (*m, c.clone()))))
    }

    pub fn sig(&self) -> &Arc<AlgebraSignature> {
        &self.sig
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
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

    pub fn uses_only(&self, vars: &[usize]) -> bool {
        self.terms
            .keys()
            .all(|m| (0..self.sig.nvars()).all(|i| m.exp(i) == 0 || vars.contains(&i)))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.sig);
        }
        WeylElement {
            sig: self.sig.clone(),
            terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect(),
        }
    }

    pub fn try_mul(&self, other: &WeylElement) -> Result<WeylElement> {
        if self.sig != other.sig {
            return Err(Error::SignatureMismatch);
        }
        let mut out = WeylElement::zero(&self.sig);
        let mut buf = Vec::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                buf.clear();
                monomial_product(&self.sig, ma, mb, &mut buf)?;
                let c = ca * cb;
                for (m, k) in buf.drain(..) {
                    out.add_term(m, &c * BigRational::from_integer(k.to_big()));
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<WeylElement> {
        let mut acc = WeylElement::one(&self.sig);
        for _ in 0..k {
            acc = acc.try_mul(self)?;
        }
        Ok(acc)
    }

    pub fn leading_term(&self, order: &CompiledOrder) -> Option<(Monomial, BigRational)> {
        self.terms
            .iter()
            .max_by(|a, b| order.cmp(a.0, b.0))
            .map(|(m, c)| (*m, c.clone()))
    }

    pub fn monic(&self, order: &CompiledOrder) -> WeylElement {
        match self.leading_term(order) {
            None => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    /// Apply the central homomorphism sending parameter `j` to `images[j]`,
    /// a polynomial in the parameters of `target`. Positions, derivations and
    /// auxiliary variables are carried over unchanged.
    pub fn substitute_params(&self, target: &Arc<AlgebraSignature>, images: &[CommPoly]) -> Result<WeylElement> {
        let src = &self.sig;
        if src.pairs() != target.pairs() || src.aux_names() != target.aux_names() {
            return Err(Error::SignatureMismatch);
        }
        if images.len() != src.n_params() || images.iter().any(|p| p.nvars() != target.n_params()) {
            return Err(Error::InvalidInput(
                "substitution must send every parameter to a polynomial in the target parameters".into(),
            ));
        }
        let n2 = 2 * src.n_pairs();
        let mut cache: HashMap<Vec<u16>, WeylElement> = HashMap::new();
        let mut out = WeylElement::zero(target);
        for (m, c) in &self.terms {
            let pexp: Vec<u16> = (0..src.n_params()).map(|j| m.exp(src.param(j))).collect();
            if !cache.contains_key(&pexp) {
                let mut img = CommPoly::one(target.n_params());
                for (j, &e) in pexp.iter().enumerate() {
                    if e > 0 {
                        img = &img * &images[j].pow(e as u32);
                    }
                }
                cache.insert(pexp.clone(), WeylElement::from_param_poly(target, &img)?);
            }
            let img = &cache[&pexp];
            let mut rest = Monomial::ONE;
            for i in 0..n2 {
                rest.set_exp(i, m.exp(i));
            }
            for k in 0..src.n_aux() {
                rest.set_exp(target.aux(k), m.exp(src.aux(k)));
            }
            for (pm, pc) in img.terms() {
                out.add_term(rest.try_mul(pm)?, c * pc);
            }
        }
        Ok(out)
    }

    /// `s_j ↦ s_j - shift_j`.
    pub fn shift_params(&self, shifts: &[i64]) -> Result<WeylElement> {
        let np = self.sig.n_params();
        if shifts.len() != np {
            return Err(Error::SignatureMismatch);
        }
        let images: Vec<CommPoly> = (0..np)
            .map(|j| &CommPoly::var(np, j) - &CommPoly::constant(np, int(shifts[j])))
            .collect();
        self.substitute_params(&self.sig.clone(), &images)
    }

    /// Standard action on polynomials in the layout `x_1..x_n, params..`.
    pub fn act_on_poly(&self, h: &CommPoly) -> Result<CommPoly> {
        let sig = &self.sig;
        if sig.n_aux() > 0 {
            return Err(Error::InvalidInput("act_on_poly: auxiliary variables have no action".into()));
        }
        let n = sig.n_pairs();
        if h.nvars() != n + sig.n_params() {
            return Err(Error::SignatureMismatch);
        }
        let mut derivs: HashMap<Vec<u16>, CommPoly> = HashMap::new();
        let mut out = CommPoly::zero(h.nvars());
        for (m, c) in &self.terms {
            let beta: Vec<u16> = (0..n).map(|i| m.exp(sig.d(i))).collect();
            let d = derivs
                .entry(beta.clone())
                .or_insert_with(|| {
                    let mut p = h.clone();
                    for (i, &b) in beta.iter().enumerate() {
                        for _ in 0..b {
                            p = p.derivative(i);
                        }
                    }
                    p
                })
                .clone();
            let mut mult = Monomial::ONE;
            for i in 0..n {
                mult.set_exp(i, m.exp(sig.x(i)));
            }
            for j in 0..sig.n_params() {
                mult.set_exp(n + j, m.exp(sig.param(j)));
            }
            out = &out + &d.mul_monomial(&mult)?.scale(c);
        }
        Ok(out)
    }

    pub fn to_string_pretty(&self) -> String {
        let names = self.sig.names();
        let order = crate::poly::MonomialOrder::DegRevLex
            .compile(self.sig.nvars())
            .expect("valid order");
        let mut terms: Vec<(&Monomial, &BigRational)> = self.terms.iter().collect();
        terms.sort_by(|a, b| order.cmp(b.0, a.0));
        format_terms(terms.into_iter().map(|(m, c)| (c.clone(), monomial_string(m, &names))))
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_pretty())
    }
}

impl fmt::Debug for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_pretty())
    }
}

impl Add for &WeylElement {
    type Output = WeylElement;
    fn add(self, rhs: &WeylElement) -> WeylElement {
        assert!(self.sig == rhs.sig, "signature mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &WeylElement {
    type Output = WeylElement;
    fn sub(self, rhs: &WeylElement) -> WeylElement {
        assert!(self.sig == rhs.sig, "signature mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Neg for &WeylElement {
    type Output = WeylElement;
    fn neg(self) -> WeylElement {
        self.scale(&-BigRational::one())
    }
}

impl std::ops::Mul for &WeylElement {
    type Output = WeylElement;
    fn mul(self, rhs: &WeylElement) -> WeylElement {
        self.try_mul(rhs).expect("Weyl product overflowed or mixed signatures")
    }
}

/// Which power the numerator is twisted by.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwistForm {
    /// `f^s` (one parameter, no g).
    Power,
    /// `f^{s1} g^{s2}` (two parameters).
    Pair,
    /// `(f/g)^s` (one parameter).
    Ratio,
}

/// `h / (f^a g^b) · twist`, with `h` in the layout `x_1..x_n, params..`.
#[derive(Clone, Debug)]
pub struct TwistedElement {
    form: TwistForm,
    h: CommPoly,
    f: CommPoly,
    g: CommPoly,
    a: u32,
    b: u32,
}

impl TwistedElement {
    fn check(f: &CommPoly, g: Option<&CommPoly>) -> Result<()> {
        for p in std::iter::once(f).chain(g) {
            if p.is_constant() {
                return Err(Error::InvalidInput("twisting polynomials must be non-constant".into()));
            }
        }
        Ok(())
    }

    /// The canonical generator `f^s`.
    pub fn power(f: &CommPoly) -> Result<Self> {
        Self::check(f, None)?;
        let n = f.nvars();
        Ok(TwistedElement {
            form: TwistForm::Power,
            h: CommPoly::one(n + 1),
            f: f.clone(),
            g: CommPoly::one(n),
            a: 0,
            b: 0,
        })
    }

    /// The canonical generator `f^{s1} g^{s2}`.
    pub fn pair(f: &CommPoly, g: &CommPoly) -> Result<Self> {
        Self::check(f, Some(g))?;
        if f.nvars() != g.nvars() {
            return Err(Error::SignatureMismatch);
        }
        Ok(TwistedElement {
            form: TwistForm::Pair,
            h: CommPoly::one(f.nvars() + 2),
            f: f.clone(),
            g: g.clone(),
            a: 0,
            b: 0,
        })
    }

    /// `(1/g^m) (f/g)^s`.
    pub fn ratio(f: &CommPoly, g: &CommPoly, m: u32) -> Result<Self> {
        Self::check(f, Some(g))?;
        if f.nvars() != g.nvars() {
            return Err(Error::SignatureMismatch);
        }
        Ok(TwistedElement {
            form: TwistForm::Ratio,
            h: CommPoly::one(f.nvars() + 1),
            f: f.clone(),
            g: g.clone(),
            a: 0,
            b: m,
        })
    }

    pub fn form(&self) -> TwistForm {
        self.form
    }

    pub fn numerator(&self) -> &CommPoly {
        &self.h
    }

    pub fn denominator_powers(&self) -> (u32, u32) {
        (self.a, self.b)
    }

    pub fn is_zero(&self) -> bool {
        self.h.is_zero()
    }

    fn n(&self) -> usize {
        self.f.nvars()
    }

    fn n_params(&self) -> usize {
        match self.form {
            TwistForm::Pair => 2,
            _ => 1,
        }
    }

    fn lift_x(&self, p: &CommPoly) -> CommPoly {
        let map: Vec<usize> = (0..self.n()).collect();
        p.remap(&map, self.h.nvars()).expect("layout fits")
    }

    /// Exponent forms of f and g as polynomials in the numerator layout.
    fn exponents(&self) -> (CommPoly, CommPoly) {
        let n = self.n();
        let nv = self.h.nvars();
        match self.form {
            TwistForm::Power => (CommPoly::var(nv, n), CommPoly::zero(nv)),
            TwistForm::Pair => (CommPoly::var(nv, n), CommPoly::var(nv, n + 1)),
            TwistForm::Ratio => (CommPoly::var(nv, n), -&CommPoly::var(nv, n)),
        }
    }

    fn with(&self, h: CommPoly, a: u32, b: u32) -> Self {
        TwistedElement {
            form: self.form,
            h,
            f: self.f.clone(),
            g: self.g.clone(),
            a,
            b,
        }
    }

    fn rebase(&self, a: u32, b: u32) -> CommPoly {
        let mut h = self.h.clone();
        if a > self.a {
            h = &h * &self.lift_x(&self.f.pow(a - self.a));
        }
        if b > self.b {
            h = &h * &self.lift_x(&self.g.pow(b - self.b));
        }
        h
    }

    pub fn add(&self, o: &TwistedElement) -> TwistedElement {
        let (a, b) = (self.a.max(o.a), self.b.max(o.b));
        self.with(&self.rebase(a, b) + &o.rebase(a, b), a, b)
    }

    /// Equality of module elements by cross-multiplication.
    pub fn value_eq(&self, o: &TwistedElement) -> bool {
        let (a, b) = (self.a.max(o.a), self.b.max(o.b));
        self.rebase(a, b) == o.rebase(a, b)
    }

    fn mul_comm(&self, p: &CommPoly) -> TwistedElement {
        self.with(&self.h * p, self.a, self.b)
    }

    /// `∂_i` applied to this element.
    pub fn derive(&self, i: usize) -> TwistedElement {
        let fi = self.lift_x(&self.f.derivative(i));
        let gi = self.lift_x(&self.g.derivative(i));
        let f = self.lift_x(&self.f);
        let g = self.lift_x(&self.g);
        let (ef, eg) = self.exponents();
        let nv = self.h.nvars();
        let af = &ef - &CommPoly::constant(nv, int(self.a as i64));
        let bg = &eg - &CommPoly::constant(nv, int(self.b as i64));
        let dh = self.h.derivative(i);
        let has_g = self.form != TwistForm::Power;
        match (fi.is_zero(), gi.is_zero() || !has_g) {
            (true, true) => self.with(dh, self.a, self.b),
            (false, true) => {
                // [f ∂h + (ef - a) f_i h] / f^{a+1}
                let num = &(&f * &dh) + &(&(&af * &fi) * &self.h);
                self.with(num, self.a + 1, self.b)
            }
            (true, false) => {
                let num = &(&g * &dh) + &(&(&bg * &gi) * &self.h);
                self.with(num, self.a, self.b + 1)
            }
            (false, false) => {
                let num = &(&(&(&f * &g) * &dh) + &(&(&(&af * &g) * &fi) * &self.h))
                    + &(&(&(&bg * &f) * &gi) * &self.h);
                self.with(num, self.a + 1, self.b + 1)
            }
        }
    }
}

impl WeylElement {
    /// Symbolic action on a twisted module element.
    pub fn act_on_twisted(&self, e: &TwistedElement) -> Result<TwistedElement> {
        let sig = &self.sig;
        let n = sig.n_pairs();
        if n != e.n() || sig.n_params() != e.n_params() || sig.n_aux() > 0 {
            return Err(Error::SignatureMismatch);
        }
        let mut derivs: HashMap<Vec<u16>, TwistedElement> = HashMap::new();
        derivs.insert(vec![0; n], e.clone());
        let mut acc = e.with(CommPoly::zero(e.h.nvars()), e.a, e.b);
        for (m, c) in &self.terms {
            let beta: Vec<u16> = (0..n).map(|i| m.exp(sig.d(i))).collect();
            let d = derive_memo(&mut derivs, &beta);
            let mut mult = Monomial::ONE;
            for i in 0..n {
                mult.set_exp(i, m.exp(sig.x(i)));
            }
            for j in 0..sig.n_params() {
                mult.set_exp(n + j, m.exp(sig.param(j)));
            }
            let p = CommPoly::monomial(e.h.nvars(), mult, c.clone());
            acc = acc.add(&d.mul_comm(&p));
        }
        Ok(acc)
    }
}

fn derive_memo(memo: &mut HashMap<Vec<u16>, TwistedElement>, beta: &[u16]) -> TwistedElement {
    if let Some(e) = memo.get(beta) {
        return e.clone();
    }
    let i = beta.iter().rposition(|&b| b > 0).expect("nonzero multi-index");
    let mut prev = beta.to_vec();
    prev[i] -= 1;
    let e = derive_memo(memo, &prev).derive(i);
    memo.insert(beta.to_vec(), e.clone());
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_comm, parse_weyl};

    fn d1() -> Arc<AlgebraSignature> {
        Arc::new(AlgebraSignature::weyl(&["x"], &[]).unwrap())
    }

    fn d2s2() -> Arc<AlgebraSignature> {
        Arc::new(AlgebraSignature::weyl(&["x", "y"], &["s1", "s2"]).unwrap())
    }

    fn d2s() -> Arc<AlgebraSignature> {
        Arc::new(AlgebraSignature::weyl(&["x", "y"], &["s"]).unwrap())
    }

    fn w(sig: &Arc<AlgebraSignature>, s: &str) -> WeylElement {
        parse_weyl(s, sig).unwrap()
    }

    fn xy(s: &str) -> CommPoly {
        parse_comm(s, &["x", "y"]).unwrap()
    }

    #[test]
    fn weyl_relation() {
        let sig = d1();
        assert_eq!(&w(&sig, "Dx") * &w(&sig, "x"), w(&sig, "x*Dx + 1"));
        assert_eq!(&w(&sig, "Dx") * &w(&sig, "x^2"), w(&sig, "x^2*Dx + 2*x"));
    }

    #[test]
    fn second_order_product_matches_action_oracle() {
        let sig = d1();
        let lhs = &w(&sig, "Dx^2") * &w(&sig, "x^2");
        let expected = w(&sig, "x^2*Dx^2 + 4*x*Dx + 2");
        // oracle: apply Dx^2 ∘ x^2 to test polynomials directly
        for k in 0..4u32 {
            let h = parse_comm(&format!("x^{k}"), &["x"]).unwrap();
            let via_composition = w(&sig, "Dx^2").act_on_poly(&w(&sig, "x^2").act_on_poly(&h).unwrap()).unwrap();
            assert_eq!(expected.act_on_poly(&h).unwrap(), via_composition);
        }
        assert_eq!(lhs, expected);
    }

    #[test]
    fn act_on_poly_examples() {
        let sig = Arc::new(AlgebraSignature::weyl(&["x", "y"], &[]).unwrap());
        assert_eq!(w(&sig, "Dx").act_on_poly(&xy("x^3")).unwrap(), xy("3*x^2"));
        assert_eq!(w(&sig, "x*Dx").act_on_poly(&xy("x^3")).unwrap(), xy("3*x^3"));
        assert_eq!(w(&sig, "x*Dx + y*Dy").act_on_poly(&xy("x^2*y")).unwrap(), xy("3*x^2*y"));
    }

    #[test]
    fn substitution_of_pq_operators() {
        let sig2 = d2s2();
        let sig1 = d2s();
        let p = w(&sig2, "x*Dx + y*Dy - 2*s1 - 2*s2");
        let q = w(&sig2, "x*y^2*Dx - x^2*y*Dy + x^2*s2 - y^2*s2");
        for mm in 0..4i64 {
            let img = [
                parse_comm("s", &["s"]).unwrap(),
                parse_comm(&format!("-s - {mm}"), &["s"]).unwrap(),
            ];
            let ps = p.substitute_params(&sig1, &img).unwrap();
            assert_eq!(ps, w(&sig1, &format!("x*Dx + y*Dy + {}", 2 * mm)));
        }
        let img = [parse_comm("s", &["s"]).unwrap(), parse_comm("-s-1", &["s"]).unwrap()];
        assert_eq!(
            q.substitute_params(&sig1, &img).unwrap(),
            w(&sig1, "x*y^2*Dx - x^2*y*Dy - x^2*s - x^2 + y^2*s + y^2")
        );
        let id = [parse_comm("s1", &["s1", "s2"]).unwrap(), parse_comm("s2", &["s1", "s2"]).unwrap()];
        assert_eq!(q.substitute_params(&sig2, &id).unwrap(), q);
    }

    #[test]
    fn pq_annihilate_pair() {
        let sig = d2s2();
        let e = TwistedElement::pair(&xy("x^2+y^2"), &xy("x*y")).unwrap();
        for op in ["x*Dx + y*Dy - 2*s1 - 2*s2", "x*y^2*Dx - x^2*y*Dy + x^2*s2 - y^2*s2"] {
            assert!(w(&sig, op).act_on_twisted(&e).unwrap().is_zero());
        }
        // Euler identity: f is homogeneous of degree 2, g of degree 2
        assert!(!w(&sig, "x*Dx + y*Dy - 2*s1").act_on_twisted(&e).unwrap().is_zero());
    }

    #[test]
    fn derivative_of_power() {
        let sig = Arc::new(AlgebraSignature::weyl(&["x", "y"], &["s"]).unwrap());
        let f = xy("x^2+y^2");
        let e = TwistedElement::power(&f).unwrap();
        let r = w(&sig, "Dx").act_on_twisted(&e).unwrap();
        assert_eq!(r.denominator_powers(), (1, 0));
        assert_eq!(r.numerator(), &parse_comm("2*x*s", &["x", "y", "s"]).unwrap());
        assert!(w(&sig, "x*Dx + y*Dy - 2*s").act_on_twisted(&e).unwrap().is_zero());
    }

    #[test]
    fn twisted_rejects_constants() {
        assert!(TwistedElement::pair(&xy("1"), &xy("x")).is_err());
        assert!(TwistedElement::power(&xy("3")).is_err());
    }

    fn shift_sig() -> Arc<AlgebraSignature> {
        let pairs = vec![("x".to_string(), "Dx".to_string())];
        let shifts = vec![("T".to_string(), "S".to_string())];
        Arc::new(AlgebraSignature::with_shifts(pairs, vec![], vec![], shifts).unwrap())
    }

    #[test]
    fn shift_relation() {
        let sig = shift_sig();
        assert_eq!(&w(&sig, "S") * &w(&sig, "T"), w(&sig, "T*S + T"));
        assert_eq!(&w(&sig, "S^2") * &w(&sig, "T^3"), w(&sig, "T^3*S^2 + 6*T^3*S + 9*T^3"));
        assert_eq!(&w(&sig, "T") * &w(&sig, "S"), w(&sig, "T*S"));
        // shifts commute with the Weyl pair
        assert_eq!(&w(&sig, "Dx*S") * &w(&sig, "x*T"), w(&sig, "x*Dx*T*S + x*T*Dx + T*S + T"));
    }

    #[test]
    fn mixing_signatures_fails() {
        let a = w(&d2s(), "x");
        let b = w(&d2s2(), "x");
        assert_eq!(a.try_mul(&b), Err(Error::SignatureMismatch));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_elem(sig: Arc<AlgebraSignature>, maxdeg: u32) -> impl Strategy<Value = WeylElement> {
            let nv = sig.nvars();
            proptest::collection::vec(
                (proptest::collection::vec(0u32..=maxdeg, nv), -3i64..4),
                1..4,
            )
            .prop_map(move |ts| {
                WeylElement::from_terms(
                    &sig,
                    ts.into_iter().map(|(e, c)| (Monomial::from_exponents(&e).unwrap(), int(c))),
                )
            })
        }

        fn arb_h() -> impl Strategy<Value = CommPoly> {
            proptest::collection::vec((proptest::collection::vec(0u32..4, 3), -3i64..4), 1..4).prop_map(|ts| {
                CommPoly::from_terms(3, ts.into_iter().map(|(e, c)| (Monomial::from_exponents(&e).unwrap(), int(c))))
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]
            #[test]
            fn associativity(p in arb_elem(d2s(), 2), q in arb_elem(d2s(), 2), r in arb_elem(d2s(), 2)) {
                prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
            }

            #[test]
            fn shift_associativity(p in arb_elem(shift_sig(), 2), q in arb_elem(shift_sig(), 2), r in arb_elem(shift_sig(), 2)) {
                prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
            }

            #[test]
            fn action_compatibility(p in arb_elem(d2s(), 2), q in arb_elem(d2s(), 2), h in arb_h()) {
                let lhs = (&p * &q).act_on_poly(&h).unwrap();
                let rhs = p.act_on_poly(&q.act_on_poly(&h).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn substitution_is_homomorphism(p in arb_elem(d2s2(), 2), q in arb_elem(d2s2(), 2), m in 0i64..4) {
                let img = [parse_comm("s", &["s"]).unwrap(), parse_comm(&format!("-s-{m}"), &["s"]).unwrap()];
                let sig1 = d2s();
                let lhs = (&p * &q).substitute_params(&sig1, &img).unwrap();
                let rhs = &p.substitute_params(&sig1, &img).unwrap() * &q.substitute_params(&sig1, &img).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(200))]
            #[test]
            fn twisted_action_compatibility(p in arb_elem(d2s(), 1), q in arb_elem(d2s(), 1)) {
                let e = TwistedElement::ratio(&xy("x^2+y^3"), &xy("x*y"), 1).unwrap();
                let lhs = (&p * &q).act_on_twisted(&e).unwrap();
                let rhs = p.act_on_twisted(&q.act_on_twisted(&e).unwrap()).unwrap();
                prop_assert!(lhs.value_eq(&rhs));
            }
        }
    }
}
