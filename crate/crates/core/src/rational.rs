//! Annihilators of `(1/g^m)(f/g)^s` and Bernstein-Sato polynomials of
//! rational functions `f/g`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::annihilator::{ann_pair, bs_ideal_from_annihilator, bs_ideal_from_fixture, BSIdealData};
use crate::error::{Error, Result};
use crate::groebner::{
    central_saturation, ds_order, left_normal_form, transporter, GbOptions, GroebnerBasis, Saturation, SaturationMethod,
    TrackedBasis,
};
use crate::poly::{CommPoly, Monomial, MonomialOrder};
use crate::univariate::Univariate;
use crate::weyl::{AlgebraSignature, TwistedElement, WeylElement};

/// How the descent of the non-saturated case is carried out.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum StepMode {
    /// One colon by `f^γ` against `J(s − γ)`.
    #[default]
    Direct,
    /// `γ` colons by `f`, lowering the index by one each time.
    Iterated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnnCase {
    /// `γ ≤ 0`: the saturation of `I(s, −s−m)`.
    Saturated,
    /// `γ > 0`: obtained from `I_ε(s)` by colon ideals.
    Descended { epsilon: i64, gamma: i64 },
}

/// `I_m(s) = Ann_{D[s]} (1/g^m)(f/g)^s`.
#[derive(Clone, Debug)]
pub struct RationalAnnihilator {
    pub m: u32,
    /// Reduced basis under [`ds_order`].
    pub basis: GroebnerBasis,
    pub case: AnnCase,
    /// Saturation of `I(s, −s−m)` (saturated case) or `I(s, −s−ε)`.
    pub saturation: Saturation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BsMethod {
    Linear,
    Elimination,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BsValue {
    /// Monic.
    Poly(Univariate),
    /// The ideal of admissible `b` is zero.
    Zero,
    /// The linear search hit its degree cap.
    Inconclusive { max_degree: u32 },
}

#[derive(Clone, Debug, Default)]
pub struct BsStats {
    pub elapsed: Duration,
    pub basis_size: usize,
    /// Normal forms computed by the linear search.
    pub steps: usize,
}

/// `b^{(N)}_{f/g,m}(s)` together with how it was obtained.
#[derive(Clone, Debug)]
pub struct RationalBSResult {
    pub value: BsValue,
    pub n: u32,
    pub m: u32,
    pub method: BsMethod,
    /// `P_1..P_N` with `b·g^N − Σ P_k f^k g^{N−k} ∈ I_{m+N}(s)`.
    pub certificate: Option<Vec<WeylElement>>,
    pub stats: BsStats,
}

/// Outcome of [`RationalFunction::verify_certificate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verification {
    /// The normal form modulo `I_{m+N}(s)` vanishes.
    pub normal_form: bool,
    /// The operator kills `(1/g^{m+N})(f/g)^s` in the twisted module.
    pub action: bool,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.normal_form && self.action
    }
}

/// A rational function `f/g` with its pair annihilator `I(s1,s2)` and,
/// once known, its Bernstein-Sato ideal.
pub struct RationalFunction {
    sig: Arc<AlgebraSignature>,
    pair_sig: Arc<AlgebraSignature>,
    f: CommPoly,
    g: CommPoly,
    ann: GroebnerBasis,
    bs: Option<BSIdealData>,
    opts: GbOptions,
    cache: Mutex<HashMap<(u32, StepMode), Arc<RationalAnnihilator>>>,
}

impl RationalFunction {
    /// Computes `I(s1,s2)`. The algebra has Weyl pairs named by `xs`, the
    /// parameter `s` and, for the pair, `s1, s2`.
    pub fn new(xs: &[&str], f: &CommPoly, g: &CommPoly, opts: &GbOptions) -> Result<RationalFunction> {
        let pair_sig = Arc::new(AlgebraSignature::weyl(xs, &["s1", "s2"])?);
        let ann = ann_pair(&pair_sig, f, g, opts)?;
        Self::with_annihilator(xs, f, g, ann, opts)
    }

    /// Uses a precomputed `I(s1,s2)` (a basis over the signature with
    /// parameters `s1, s2`).
    pub fn with_annihilator(
        xs: &[&str],
        f: &CommPoly,
        g: &CommPoly,
        ann: GroebnerBasis,
        opts: &GbOptions,
    ) -> Result<RationalFunction> {
        let sig = Arc::new(AlgebraSignature::weyl(xs, &["s"])?);
        let pair_sig = Arc::new(AlgebraSignature::weyl(xs, &["s1", "s2"])?);
        if ann.sig() != &pair_sig || f.nvars() != xs.len() || g.nvars() != xs.len() {
            return Err(Error::SignatureMismatch);
        }
        if f.is_constant() || g.is_constant() {
            return Err(Error::InvalidInput("f and g must be non-constant".into()));
        }
        Ok(RationalFunction {
            sig,
            pair_sig,
            f: f.clone(),
            g: g.clone(),
            ann,
            bs: None,
            opts: opts.clone(),
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// The one-parameter algebra `D[s]`.
    pub fn sig(&self) -> &Arc<AlgebraSignature> {
        &self.sig
    }

    pub fn pair_sig(&self) -> &Arc<AlgebraSignature> {
        &self.pair_sig
    }

    pub fn f(&self) -> &CommPoly {
        &self.f
    }

    pub fn g(&self) -> &CommPoly {
        &self.g
    }

    /// `I(s1,s2)`.
    pub fn pair_annihilator(&self) -> &GroebnerBasis {
        &self.ann
    }

    pub fn bs_ideal(&self) -> Option<&BSIdealData> {
        self.bs.as_ref()
    }

    pub fn compute_bs_ideal(&mut self) -> Result<&BSIdealData> {
        if self.bs.is_none() {
            let b = bs_ideal_from_annihilator(&self.pair_sig, &self.ann, &self.f, &self.g, &self.opts)?;
            self.set_bs_ideal(b);
        }
        Ok(self.bs.as_ref().expect("just set"))
    }

    /// Supplies `B_{f,g}` generators, checked by membership in `I(s1,s2) + ⟨fg⟩`.
    pub fn supply_bs_ideal(&mut self, gens: Vec<CommPoly>) -> Result<&BSIdealData> {
        let b = bs_ideal_from_fixture(&self.pair_sig, &self.ann, &self.f, &self.g, gens, &self.opts)?;
        self.set_bs_ideal(b);
        Ok(self.bs.as_ref().expect("just set"))
    }

    fn set_bs_ideal(&mut self, b: BSIdealData) {
        self.bs = Some(b);
        self.cache.lock().expect("cache lock").clear();
    }

    fn x_elem(&self, p: &CommPoly) -> Result<WeylElement> {
        WeylElement::from_x_poly(&self.sig, p)
    }

    /// Generators of `I(s, −s−m)`.
    pub fn specialize(&self, m: i64) -> Result<Vec<WeylElement>> {
        let s = CommPoly::var(1, 0);
        let minus = &(-&s) - &CommPoly::constant(1, BigRational::from_integer(m.into()));
        let images = [s, minus];
        self.ann
            .elements()
            .iter()
            .map(|e| e.substitute_params(&self.sig, &images))
            .filter(|r| !matches!(r, Ok(e) if e.is_zero()))
            .collect()
    }

    /// `Sat_{ℚ[s]} I(s, −s−m)`.
    pub fn saturate_specialization(&self, m: i64, method: SaturationMethod) -> Result<Saturation> {
        central_saturation(&self.sig, &self.specialize(m)?, method, &self.opts)
    }

    /// `I_m(s)`; requires the Bernstein-Sato ideal.
    pub fn ann_rational(&self, m: u32, mode: StepMode) -> Result<Arc<RationalAnnihilator>> {
        let bs = self.bs.as_ref().ok_or(Error::MissingBsIdeal)?;
        let epsilon = bs.epsilon;
        let gamma = epsilon - m as i64;
        let key = (m, if gamma > 0 { mode } else { StepMode::Direct });
        if let Some(hit) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let order = ds_order(&self.sig);
        let out = if gamma <= 0 {
            let sat = self.saturate_specialization(m as i64, SaturationMethod::PerFactor)?;
            RationalAnnihilator {
                m,
                basis: sat.basis.clone(),
                case: AnnCase::Saturated,
                saturation: sat,
            }
        } else {
            let top = self.ann_rational(epsilon as u32, StepMode::Direct)?;
            let basis = match mode {
                StepMode::Direct => {
                    let shifted = shift_all(top.basis.elements(), gamma)?;
                    let h = self.x_elem(&self.f.pow(gamma as u32))?;
                    transporter(&self.sig, &shifted, &h, &order, &self.opts)?
                }
                StepMode::Iterated => {
                    let h = self.x_elem(&self.f)?;
                    let mut current = top.basis.clone();
                    for _ in 0..gamma {
                        let shifted = shift_all(current.elements(), 1)?;
                        current = transporter(&self.sig, &shifted, &h, &order, &self.opts)?;
                    }
                    current
                }
            };
            RationalAnnihilator {
                m,
                basis,
                case: AnnCase::Descended { epsilon, gamma },
                saturation: top.saturation.clone(),
            }
        };
        let out = Arc::new(out);
        self.cache.lock().expect("cache lock").insert(key, out.clone());
        Ok(out)
    }

    /// `I_{m+N}(s)` plus the generators `f^k g^{N−k}` (k = 1..N).
    fn functional_ideal(&self, m: u32, n: u32) -> Result<(Vec<WeylElement>, Vec<WeylElement>)> {
        if n == 0 {
            return Err(Error::InvalidInput("N must be at least 1".into()));
        }
        let ann = self.ann_rational(m + n, StepMode::Direct)?;
        let mut extra = Vec::with_capacity(n as usize);
        for k in 1..=n {
            extra.push(self.x_elem(&self.f.pow(k).try_mul(&self.g.pow(n - k))?)?);
        }
        Ok((ann.basis.elements().to_vec(), extra))
    }

    /// `b^{(N)}_{f/g,m}` as the first linear relation among the normal forms of
    /// `s^k g^N`. Cannot detect the zero ideal; returns `Inconclusive` past
    /// `max_degree`.
    pub fn bs_rational_linear(
        &self,
        m: u32,
        n: u32,
        max_degree: u32,
        order: Option<&MonomialOrder>,
    ) -> Result<RationalBSResult> {
        let start = Instant::now();
        let (ann, extra) = self.functional_ideal(m, n)?;
        let mut gens = ann;
        gens.extend(extra);
        let default_order = linear_order(&self.sig);
        let gb = GroebnerBasis::new(&self.sig, &gens, order.unwrap_or(&default_order), &self.opts)?;
        let s = WeylElement::var(&self.sig, self.sig.param(0));
        let mut p = gb.normal_form(&self.x_elem(&self.g.pow(n))?)?;
        let mut echelon = Echelon::default();
        let mut value = BsValue::Inconclusive { max_degree };
        let mut steps = 1;
        for k in 0..=max_degree as usize {
            if k > 0 {
                p = gb.normal_form(&s.try_mul(&p)?)?;
                steps += 1;
            }
            if let Some(rel) = echelon.insert(&p, k) {
                value = BsValue::Poly(Univariate::new(rel).monic());
                break;
            }
        }
        Ok(RationalBSResult {
            value,
            n,
            m,
            method: BsMethod::Linear,
            certificate: None,
            stats: BsStats {
                elapsed: start.elapsed(),
                basis_size: gb.len(),
                steps,
            },
        })
    }

    /// `b^{(N)}_{f/g,m}` from `(J : g^N) ∩ ℚ[s]`; detects the zero ideal.
    pub fn bs_rational_elim(&self, m: u32, n: u32) -> Result<RationalBSResult> {
        let start = Instant::now();
        let (ann, extra) = self.functional_ideal(m, n)?;
        let mut gens = ann;
        gens.extend(extra);
        let np = self.sig.n_pairs();
        let order = MonomialOrder::block(vec![
            ((np..2 * np).collect(), MonomialOrder::DegRevLex),
            ((0..np).collect(), MonomialOrder::DegRevLex),
            (self.sig.param_vars(), MonomialOrder::DegRevLex),
        ]);
        let colon = transporter(&self.sig, &gens, &self.x_elem(&self.g.pow(n))?, &order, &self.opts)?;
        let polys = colon.elements_in(&self.sig.param_vars());
        let value = match polys.as_slice() {
            [] => BsValue::Zero,
            [b] => BsValue::Poly(b.to_param_poly().expect("parameter element").to_univariate(0)?.monic()),
            _ => {
                return Err(Error::Invariant(
                    "a reduced basis of an ideal of ℚ[s] has one element".into(),
                ))
            }
        };
        Ok(RationalBSResult {
            value,
            n,
            m,
            method: BsMethod::Elimination,
            certificate: None,
            stats: BsStats {
                elapsed: start.elapsed(),
                basis_size: colon.len(),
                steps: 0,
            },
        })
    }

    /// Operators `P_1..P_N` with `b·g^N − Σ P_k f^k g^{N−k} ∈ I_{m+N}(s)`,
    /// each `P_k` reduced modulo `I_m(s+k)`.
    pub fn certificate(&self, m: u32, n: u32, b: &Univariate) -> Result<Vec<WeylElement>> {
        let (ann, extra) = self.functional_ideal(m, n)?;
        let tracked = TrackedBasis::new(&self.sig, &ann, &extra, &ds_order(&self.sig), &self.opts)?;
        let target = self.param_elem(b)?.try_mul(&self.x_elem(&self.g.pow(n))?)?;
        let (rem, cof) = tracked.divide(&target)?;
        if !rem.is_zero() {
            return Err(Error::NotInIdeal(format!(
                "{} is not in the ideal of b^(N) for N = {n}, m = {m}",
                b.to_string_in("s")
            )));
        }
        let base = self.ann_rational(m, StepMode::Direct)?;
        let order = ds_order(&self.sig);
        cof.iter()
            .enumerate()
            .map(|(i, p)| {
                // s ↦ s + k keeps ds leading monomials, so the shifted basis
                // is again a Gröbner basis.
                let reducers = shift_all(base.basis.elements(), -(i as i64 + 1))?;
                left_normal_form(p, &reducers, &order)
            })
            .collect()
    }

    /// The operator `b·g^N − Σ P_k f^k g^{N−k}`.
    pub fn certificate_operator(&self, n: u32, b: &Univariate, ops: &[WeylElement]) -> Result<WeylElement> {
        if ops.len() != n as usize {
            return Err(Error::InvalidInput(format!(
                "a certificate for N = {n} has {n} operators, got {}",
                ops.len()
            )));
        }
        let mut q = self.param_elem(b)?.try_mul(&self.x_elem(&self.g.pow(n))?)?;
        for (k, p) in ops.iter().enumerate() {
            if p.sig() != &self.sig {
                return Err(Error::SignatureMismatch);
            }
            let k = k as u32 + 1;
            let h = self.x_elem(&self.f.pow(k).try_mul(&self.g.pow(n - k))?)?;
            q = &q - &p.try_mul(&h)?;
        }
        Ok(q)
    }

    /// Checks a certificate by normal form modulo `I_{m+N}(s)` and by acting on
    /// `(1/g^{m+N})(f/g)^s`.
    pub fn verify_certificate(&self, m: u32, n: u32, b: &Univariate, ops: &[WeylElement]) -> Result<Verification> {
        let q = self.certificate_operator(n, b, ops)?;
        let ann = self.ann_rational(m + n, StepMode::Direct)?;
        let normal_form = ann.basis.normal_form(&q)?.is_zero();
        let target = TwistedElement::ratio(&self.f, &self.g, m + n)?;
        let action = q.act_on_twisted(&target)?.is_zero();
        Ok(Verification { normal_form, action })
    }

    fn param_elem(&self, b: &Univariate) -> Result<WeylElement> {
        WeylElement::from_param_poly(&self.sig, &CommPoly::from_univariate(b, 1, 0))
    }
}

/// Default order for the linear search: degrevlex in `s`, then degrevlex in
/// `x, ∂`.
pub fn linear_order(sig: &AlgebraSignature) -> MonomialOrder {
    MonomialOrder::block(vec![
        (sig.param_vars(), MonomialOrder::DegRevLex),
        (sig.xd_vars(), MonomialOrder::DegRevLex),
    ])
}

fn shift_all(gens: &[WeylElement], by: i64) -> Result<Vec<WeylElement>> {
    gens.iter().map(|e| e.shift_params(&[by])).collect()
}

/// Incremental row echelon form over the monomial support, remembering each
/// row as a combination of the inserted vectors.
#[derive(Default)]
struct Echelon {
    rows: Vec<(Monomial, BTreeMap<Monomial, BigRational>, Vec<BigRational>)>,
}

impl Echelon {
    /// Inserts `p` as vector number `k`; on dependence returns the relation
    /// coefficients `c_0..c_k` with `c_k = 1`.
    fn insert(&mut self, p: &WeylElement, k: usize) -> Option<Vec<BigRational>> {
        let mut v: BTreeMap<Monomial, BigRational> = p.terms().map(|(m, c)| (*m, c.clone())).collect();
        let mut comb = vec![BigRational::zero(); k + 1];
        comb[k] = BigRational::one();
        for (pivot, row, rc) in &self.rows {
            let Some(c) = v.get(pivot).cloned() else { continue };
            let c = c / &row[pivot];
            for (m, a) in row {
                let e = v.entry(*m).or_insert_with(BigRational::zero);
                *e -= &c * a;
                if e.is_zero() {
                    v.remove(m);
                }
            }
            for (i, a) in rc.iter().enumerate() {
                comb[i] -= &c * a;
            }
        }
        match v.keys().next().copied() {
            None => Some(comb),
            Some(pivot) => {
                self.rows.push((pivot, v, comb));
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_comm, parse_weyl};
    use crate::poly::int;

    fn xy(s: &str) -> CommPoly {
        parse_comm(s, &["x", "y"]).unwrap()
    }

    fn coordinates() -> RationalFunction {
        let mut r = RationalFunction::new(&["x", "y"], &xy("x"), &xy("y"), &GbOptions::default()).unwrap();
        r.compute_bs_ideal().unwrap();
        r
    }

    fn lin(r: i64) -> Univariate {
        Univariate::new(vec![int(r), int(1)])
    }

    #[test]
    fn ann_rational_needs_bs_ideal() {
        let r = RationalFunction::new(&["x", "y"], &xy("x"), &xy("y"), &GbOptions::default()).unwrap();
        assert!(matches!(r.ann_rational(0, StepMode::Direct), Err(Error::MissingBsIdeal)));
    }

    #[test]
    fn quotient_of_coordinates() {
        let r = coordinates();
        let sig = r.sig().clone();
        let i0 = r.ann_rational(0, StepMode::Direct).unwrap();
        assert_eq!(i0.case, AnnCase::Saturated);
        let expected = [parse_weyl("x*Dx - s", &sig).unwrap(), parse_weyl("y*Dy + s", &sig).unwrap()];
        assert!(i0.basis.same_ideal(&GroebnerBasis::new(&sig, &expected, &ds_order(&sig), &GbOptions::default()).unwrap()));

        let lin_res = r.bs_rational_linear(0, 1, 8, None).unwrap();
        assert_eq!(lin_res.value, BsValue::Poly(lin(1)));
        let elim = r.bs_rational_elim(0, 1).unwrap();
        assert_eq!(elim.value, BsValue::Poly(lin(1)));
    }

    #[test]
    fn hand_certificate_for_coordinates() {
        // y∂x · x^{s+1} y^{−s−1} = (s+1) x^s y^{−s}
        let r = coordinates();
        let p1 = parse_weyl("y*Dx", r.sig()).unwrap();
        let v = r.verify_certificate(0, 1, &lin(1), &[p1.clone()]).unwrap();
        assert!(v.passed());
        let bad = &p1 + &WeylElement::one(r.sig());
        let v = r.verify_certificate(0, 1, &lin(1), &[bad]).unwrap();
        assert!(!v.normal_form && !v.action);
        assert!(r.verify_certificate(0, 1, &lin(1), &[]).is_err());
    }

    #[test]
    fn computed_certificate_verifies() {
        let r = coordinates();
        let ops = r.certificate(0, 1, &lin(1)).unwrap();
        assert_eq!(ops.len(), 1);
        assert!(r.verify_certificate(0, 1, &lin(1), &ops).unwrap().passed());
        assert!(matches!(r.certificate(0, 1, &Univariate::one()), Err(Error::NotInIdeal(_))));
    }

    #[test]
    fn echelon_finds_first_relation() {
        let sig = Arc::new(AlgebraSignature::weyl(&["x"], &["s"]).unwrap());
        let e = |t: &str| parse_weyl(t, &sig).unwrap();
        let mut ech = Echelon::default();
        assert!(ech.insert(&e("x + Dx"), 0).is_none());
        assert!(ech.insert(&e("x - Dx"), 1).is_none());
        let rel = ech.insert(&e("x"), 2).unwrap();
        assert_eq!(rel, vec![crate::poly::rat(-1, 2), crate::poly::rat(-1, 2), int(1)]);
        let mut fresh = Echelon::default();
        assert_eq!(fresh.insert(&WeylElement::zero(&sig), 0), Some(vec![int(1)]));
    }

    #[test]
    fn shift_all_moves_the_parameter() {
        let sig = Arc::new(AlgebraSignature::weyl(&["x"], &["s"]).unwrap());
        let p = parse_weyl("x*Dx - s", &sig).unwrap();
        let shifted = shift_all(&[p], 2).unwrap();
        assert_eq!(shifted[0], parse_weyl("x*Dx - s + 2", &sig).unwrap());
    }
}
