//! Annihilators of `f^s` and `f^{s1} g^{s2}`, global b-functions, and
//! Bernstein-Sato ideals of pairs.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::groebner::{ds_order, eliminate, GbOptions, GroebnerBasis, Strategy};
use crate::poly::{int, integer_shift_lines, CommPoly, Monomial, MonomialOrder};
use crate::univariate::Univariate;
use crate::weyl::{AlgebraSignature, WeylElement};

/// How [`annihilator_of_powers`] builds the annihilator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AnnMethod {
    /// Work in `D⟨∂t_j, s_j⟩` with `s_j ∂t_j = ∂t_j (s_j + 1)` and eliminate
    /// the `∂t_j` from `⟨s_j + f_j ∂t_j, ∂_i + Σ_j ∂_i(f_j) ∂t_j⟩`.
    #[default]
    Shift,
    /// Eliminate `u_j, v_j` from the homogenized ideal in `D⟨t, ∂t⟩[u, v]`,
    /// then rewrite `t^a ∂t^a` as a polynomial in `s`.
    Homogenized,
}

fn check_inputs(sig: &AlgebraSignature, fs: &[CommPoly]) -> Result<()> {
    let n = sig.n_pairs();
    let p = fs.len();
    if p == 0 || sig.n_params() != p || sig.n_aux() != 0 || sig.n_shifts() != 0 {
        return Err(Error::InvalidInput(
            "the signature needs exactly one parameter per polynomial and no auxiliary variables".into(),
        ));
    }
    for f in fs {
        if f.nvars() != n {
            return Err(Error::SignatureMismatch);
        }
        if f.is_constant() {
            return Err(Error::InvalidInput("polynomials must be non-constant".into()));
        }
    }
    Ok(())
}

fn fresh_names(sig: &AlgebraSignature) -> impl Fn(String) -> String {
    let taken = sig.names();
    move |base: String| {
        let mut name = base;
        while taken.contains(&name) {
            name.insert(0, '_');
        }
        name
    }
}

/// `Ann_{D[s_1..s_p]} f_1^{s_1} ⋯ f_p^{s_p}`. `sig` must have one parameter
/// per polynomial and no auxiliary variables; the result is reduced under
/// [`ds_order`].
pub fn annihilator_of_powers(
    sig: &Arc<AlgebraSignature>,
    fs: &[CommPoly],
    opts: &GbOptions,
) -> Result<GroebnerBasis> {
    annihilator_with(sig, fs, AnnMethod::default(), opts)
}

pub fn annihilator_with(
    sig: &Arc<AlgebraSignature>,
    fs: &[CommPoly],
    method: AnnMethod,
    opts: &GbOptions,
) -> Result<GroebnerBasis> {
    check_inputs(sig, fs)?;
    match method {
        AnnMethod::Shift => by_shift(sig, fs, opts),
        AnnMethod::Homogenized => by_homogenization(sig, fs, opts),
    }
}

fn by_shift(sig: &Arc<AlgebraSignature>, fs: &[CommPoly], opts: &GbOptions) -> Result<GroebnerBasis> {
    let n = sig.n_pairs();
    let p = fs.len();
    let fresh = fresh_names(sig);
    let shifts: Vec<(String, String)> = (0..p)
        .map(|j| (fresh(format!("Dt{}", j + 1)), sig.params()[j].clone()))
        .collect();
    let bm = Arc::new(AlgebraSignature::with_shifts(sig.pairs().to_vec(), Vec::new(), Vec::new(), shifts)?);
    let var = |i: usize| WeylElement::var(&bm, i);
    let xmap: Vec<usize> = (0..n).map(|i| bm.x(i)).collect();
    let embed = |f: &CommPoly| -> Result<WeylElement> {
        let q = f.remap(&xmap, bm.nvars())?;
        Ok(WeylElement::from_terms(&bm, q.terms().map(|(m, c)| (*m, c.clone()))))
    };
    let mut gens = Vec::new();
    for (j, f) in fs.iter().enumerate() {
        gens.push(&var(bm.shift_s(j)) + &(&embed(f)? * &var(bm.shift_t(j))));
    }
    for i in 0..n {
        let mut g = var(bm.d(i));
        for (j, f) in fs.iter().enumerate() {
            let fi = f.derivative(i);
            if !fi.is_zero() {
                g = &g + &(&embed(&fi)? * &var(bm.shift_t(j)));
            }
        }
        gens.push(g);
    }
    let ts: Vec<usize> = (0..p).map(|j| bm.shift_t(j)).collect();
    // ∂t block, then the s block, then x and ∂.
    let ss: Vec<usize> = (0..p).map(|j| bm.shift_s(j)).collect();
    let order = MonomialOrder::block(vec![
        (ts.clone(), MonomialOrder::DegRevLex),
        (ss, MonomialOrder::DegRevLex),
        ((0..2 * n).collect(), MonomialOrder::DegRevLex),
    ]);
    // Sugar selection: with the normal strategy some cubic pairs run for
    // minutes instead of about a second.
    let sugar = GbOptions {
        strategy: Strategy::Sugar,
        ..opts.clone()
    };
    let gb = GroebnerBasis::new(&bm, &gens, &order, &sugar)?;
    let keep: Vec<usize> = (0..bm.nvars()).filter(|i| !ts.contains(i)).collect();
    let kept = gb.elements_in(&keep);
    let mut map: Vec<usize> = (0..2 * n).collect();
    map.extend(std::iter::repeat(usize::MAX).take(p));
    map.extend((0..p).map(|j| sig.param(j)));
    let out: Vec<WeylElement> = kept
        .iter()
        .map(|e| {
            WeylElement::from_terms(
                sig,
                e.terms().map(|(m, c)| {
                    let mut r = Monomial::ONE;
                    for (i, &to) in map.iter().enumerate() {
                        if m.exp(i) > 0 {
                            debug_assert!(to != usize::MAX);
                            r.set_exp(to, m.exp(i));
                        }
                    }
                    (r, c.clone())
                }),
            )
        })
        .collect();
    GroebnerBasis::new(sig, &out, &ds_order(sig), opts)
}

fn by_homogenization(sig: &Arc<AlgebraSignature>, fs: &[CommPoly], opts: &GbOptions) -> Result<GroebnerBasis> {
    let n = sig.n_pairs();
    let p = fs.len();
    let fresh = fresh_names(sig);
    let mut pairs: Vec<(String, String)> = sig.pairs().to_vec();
    for j in 1..=p {
        pairs.push((fresh(format!("t{j}")), fresh(format!("Dt{j}"))));
    }
    let mut aux = Vec::new();
    for j in 1..=p {
        aux.push(fresh(format!("u{j}")));
        aux.push(fresh(format!("v{j}")));
    }
    let ot = Arc::new(AlgebraSignature::new(pairs, Vec::new(), aux)?);
    let t = |j: usize| ot.x(n + j);
    let dt = |j: usize| ot.d(n + j);
    let u = |j: usize| ot.aux(2 * j);
    let v = |j: usize| ot.aux(2 * j + 1);
    let var = |i: usize| WeylElement::var(&ot, i);
    let xmap: Vec<usize> = (0..n).map(|i| ot.x(i)).collect();
    let embed = |f: &CommPoly| -> Result<WeylElement> {
        let q = f.remap(&xmap, ot.nvars())?;
        Ok(WeylElement::from_terms(&ot, q.terms().map(|(m, c)| (*m, c.clone()))))
    };

    let mut gens = Vec::new();
    for (j, f) in fs.iter().enumerate() {
        gens.push(&var(t(j)) - &(&var(u(j)) * &embed(f)?));
        gens.push(&(&var(u(j)) * &var(v(j))) - &WeylElement::one(&ot));
    }
    for i in 0..n {
        let mut g = var(ot.d(i));
        for (j, f) in fs.iter().enumerate() {
            let fi = f.derivative(i);
            if fi.is_zero() {
                continue;
            }
            g = &g + &(&(&var(u(j)) * &embed(&fi)?) * &var(dt(j)));
        }
        gens.push(g);
    }
    let kept = eliminate(&ot, &gens, &ot.aux_vars(), opts)?;

    let mut out = Vec::with_capacity(kept.len());
    for e in &kept {
        out.push(to_parameter_form(&ot, sig, e, n, p)?);
    }
    GroebnerBasis::new(sig, &out, &ds_order(sig), opts)
}

/// `t^a ∂t^a` with `t∂t = −s − 1`: `(−1)^a (s+1)(s+2)⋯(s+a)`.
fn falling_in_s(a: u16) -> Univariate {
    let mut u = Univariate::one();
    for k in 1..=a as i64 {
        u = u.mul(&Univariate::new(vec![int(-k), int(-1)]));
    }
    u
}

/// Balance a weight-homogeneous element of the eliminated ideal to weight
/// zero and rewrite `t_j^a ∂t_j^a` in terms of `s_j`.
fn to_parameter_form(
    ot: &Arc<AlgebraSignature>,
    target: &Arc<AlgebraSignature>,
    e: &WeylElement,
    n: usize,
    p: usize,
) -> Result<WeylElement> {
    let weight = |m: &Monomial, j: usize| m.exp(ot.x(n + j)) as i64 - m.exp(ot.d(n + j)) as i64;
    let first = e.terms().next().expect("nonzero").0;
    let weights: Vec<i64> = (0..p).map(|j| weight(first, j)).collect();
    for (m, _) in e.terms() {
        for (j, &w) in weights.iter().enumerate() {
            if weight(m, j) != w {
                return Err(Error::Invariant(format!(
                    "eliminated element is not weight-homogeneous: {e}"
                )));
            }
        }
    }
    let mut balanced = e.clone();
    for (j, &w) in weights.iter().enumerate() {
        if w == 0 {
            continue;
        }
        let (var, k) = if w > 0 { (ot.d(n + j), w) } else { (ot.x(n + j), -w) };
        let mult = WeylElement::monomial(ot, Monomial::var(var, k as u16), BigRational::one());
        balanced = mult.try_mul(&balanced)?;
    }
    let np = target.n_params();
    let mut out = WeylElement::zero(target);
    for (m, c) in balanced.terms() {
        let mut xd = Monomial::ONE;
        for i in 0..n {
            xd.set_exp(target.x(i), m.exp(ot.x(i)));
            xd.set_exp(target.d(i), m.exp(ot.d(i)));
        }
        let mut poly = CommPoly::constant(np, c.clone());
        for j in 0..p {
            let a = m.exp(ot.x(n + j));
            debug_assert_eq!(a, m.exp(ot.d(n + j)));
            if a > 0 {
                poly = &poly * &CommPoly::from_univariate(&falling_in_s(a), np, j);
            }
        }
        let lifted = WeylElement::from_param_poly(target, &poly)?;
        for (pm, pc) in lifted.terms() {
            out.add_term(xd.try_mul(pm)?, pc.clone());
        }
    }
    Ok(out)
}

/// `I(s1,s2) = Ann_{D[s1,s2]} f^{s1} g^{s2}`.
pub fn ann_pair(sig: &Arc<AlgebraSignature>, f: &CommPoly, g: &CommPoly, opts: &GbOptions) -> Result<GroebnerBasis> {
    if sig.n_params() != 2 {
        return Err(Error::InvalidInput("ann_pair needs a signature with two parameters".into()));
    }
    annihilator_of_powers(sig, &[f.clone(), g.clone()], opts)
}

/// `Ann_{D[s]} f^s`.
pub fn ann_one(sig: &Arc<AlgebraSignature>, f: &CommPoly, opts: &GbOptions) -> Result<GroebnerBasis> {
    if sig.n_params() != 1 {
        return Err(Error::InvalidInput("ann_one needs a signature with one parameter".into()));
    }
    annihilator_of_powers(sig, &[f.clone()], opts)
}

/// Elements of `(⟨gens⟩ + ⟨h⟩) ∩ ℚ[params]`, as polynomials in the parameters.
pub fn param_intersection(
    sig: &Arc<AlgebraSignature>,
    gens: &[WeylElement],
    h: &WeylElement,
    opts: &GbOptions,
) -> Result<(GroebnerBasis, Vec<CommPoly>)> {
    let mut all = gens.to_vec();
    all.push(h.clone());
    let n = sig.n_pairs();
    let ord = MonomialOrder::block(vec![
        ((n..2 * n).collect(), MonomialOrder::DegRevLex),
        ((0..n).collect(), MonomialOrder::DegRevLex),
        (sig.param_vars(), MonomialOrder::DegRevLex),
    ]);
    let gb = GroebnerBasis::new(sig, &all, &ord, opts)?;
    let polys = gb
        .elements_in(&sig.param_vars())
        .iter()
        .map(|e| e.to_param_poly().expect("parameter element"))
        .collect();
    Ok((gb, polys))
}

/// Classical Bernstein-Sato polynomial `b_f(s)`, monic.
pub fn global_b(sig: &Arc<AlgebraSignature>, f: &CommPoly, opts: &GbOptions) -> Result<Univariate> {
    let ann = ann_one(sig, f, opts)?;
    let (_, polys) = param_intersection(sig, ann.elements(), &WeylElement::from_x_poly(sig, f)?, opts)?;
    match polys.as_slice() {
        [b] => Ok(b.to_univariate(0)?.monic()),
        _ => Err(Error::Invariant(format!(
            "the b-function ideal should be principal and nonzero, got {} generators",
            polys.len()
        ))),
    }
}

/// One generator of a Bernstein-Sato ideal with its shift-line data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BsGenerator {
    pub b: CommPoly,
    /// `{ℓ ∈ ℤ : s1 + s2 + ℓ divides b}`, ascending.
    pub lines: Vec<i64>,
    /// `max lines`, or 1 if there are none.
    pub e: i64,
}

impl BsGenerator {
    pub fn new(b: CommPoly) -> Result<BsGenerator> {
        let lines = integer_shift_lines(&b)?;
        let e = lines.iter().copied().max().unwrap_or(1);
        Ok(BsGenerator { b, lines, e })
    }

    /// No `i ≥ 1` with `m + 2i` among the shift lines.
    pub fn satisfies_c(&self, m: i64) -> bool {
        !self.lines.iter().any(|&l| l >= m + 2 && (l - m) % 2 == 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BSIdealData {
    pub generators: Vec<BsGenerator>,
    /// `min e − 1` over the generators.
    pub epsilon: i64,
    /// True when the generators came from an external fixture and were checked
    /// by ideal membership.
    pub from_fixture: bool,
}

impl BSIdealData {
    pub fn from_generators(gens: Vec<CommPoly>, from_fixture: bool) -> Result<BSIdealData> {
        if gens.is_empty() {
            return Err(Error::InvalidInput("a Bernstein-Sato ideal needs at least one generator".into()));
        }
        let generators = gens.into_iter().map(BsGenerator::new).collect::<Result<Vec<_>>>()?;
        let epsilon = generators.iter().map(|g| g.e).min().expect("nonempty") - 1;
        Ok(BSIdealData {
            generators,
            epsilon,
            from_fixture,
        })
    }

    pub fn c_condition(&self, m: i64) -> bool {
        c_condition(self, m)
    }
}

/// Whether some generator satisfies the `C_m` condition.
pub fn c_condition(b: &BSIdealData, m: i64) -> bool {
    b.generators.iter().any(|g| g.satisfies_c(m))
}

fn pair_product(sig: &Arc<AlgebraSignature>, f: &CommPoly, g: &CommPoly) -> Result<WeylElement> {
    WeylElement::from_x_poly(sig, &f.try_mul(g)?)
}

/// `B_{f,g} = (I(s1,s2) + ⟨fg⟩) ∩ ℚ[s1,s2]`.
pub fn bs_ideal(sig: &Arc<AlgebraSignature>, f: &CommPoly, g: &CommPoly, opts: &GbOptions) -> Result<BSIdealData> {
    let ann = ann_pair(sig, f, g, opts)?;
    bs_ideal_from_annihilator(sig, &ann, f, g, opts)
}

pub fn bs_ideal_from_annihilator(
    sig: &Arc<AlgebraSignature>,
    ann: &GroebnerBasis,
    f: &CommPoly,
    g: &CommPoly,
    opts: &GbOptions,
) -> Result<BSIdealData> {
    let (_, polys) = param_intersection(sig, ann.elements(), &pair_product(sig, f, g)?, opts)?;
    BSIdealData::from_generators(polys, false)
}

/// Accept externally supplied generators of `B_{f,g}` after checking that each
/// lies in `I(s1,s2) + ⟨fg⟩`.
pub fn bs_ideal_from_fixture(
    sig: &Arc<AlgebraSignature>,
    ann: &GroebnerBasis,
    f: &CommPoly,
    g: &CommPoly,
    gens: Vec<CommPoly>,
    opts: &GbOptions,
) -> Result<BSIdealData> {
    let (gb, _) = param_intersection(sig, ann.elements(), &pair_product(sig, f, g)?, opts)?;
    validate_members(sig, &gb, &gens)?;
    BSIdealData::from_generators(gens, true)
}

/// Checks membership of each parameter polynomial in `gb`.
pub fn validate_members(sig: &Arc<AlgebraSignature>, gb: &GroebnerBasis, gens: &[CommPoly]) -> Result<()> {
    let names: Vec<String> = sig.params().to_vec();
    for b in gens {
        if b.is_zero() {
            return Err(Error::ZeroInput("Bernstein-Sato generator"));
        }
        let e = WeylElement::from_param_poly(sig, b)?;
        if !gb.contains(&e)? {
            return Err(Error::NotInIdeal(b.to_string_with(&names)));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_comm, parse_weyl};
    use crate::weyl::TwistedElement;

    fn sig(xs: &[&str], ps: &[&str]) -> Arc<AlgebraSignature> {
        Arc::new(AlgebraSignature::weyl(xs, ps).unwrap())
    }

    fn xy(s: &str) -> CommPoly {
        parse_comm(s, &["x", "y"]).unwrap()
    }

    fn opts() -> GbOptions {
        GbOptions::default()
    }

    #[test]
    fn ann_pair_of_coordinates() {
        let s = sig(&["x", "y"], &["s1", "s2"]);
        let (f, g) = (xy("x"), xy("y"));
        let ann = ann_pair(&s, &f, &g, &opts()).unwrap();
        let e = TwistedElement::pair(&f, &g).unwrap();
        for p in ann.elements() {
            assert!(p.act_on_twisted(&e).unwrap().is_zero());
        }
        let expected = GroebnerBasis::new(
            &s,
            &[parse_weyl("x*Dx - s1", &s).unwrap(), parse_weyl("y*Dy - s2", &s).unwrap()],
            &ds_order(&s),
            &opts(),
        )
        .unwrap();
        assert!(ann.same_ideal(&expected));
    }

    #[test]
    fn ann_one_of_circle() {
        let s = sig(&["x", "y"], &["s"]);
        let f = xy("x^2+y^2");
        let ann = ann_one(&s, &f, &opts()).unwrap();
        let e = TwistedElement::power(&f).unwrap();
        for p in ann.elements() {
            assert!(p.act_on_twisted(&e).unwrap().is_zero());
        }
        let expected = GroebnerBasis::new(
            &s,
            &[parse_weyl("x*Dx + y*Dy - 2*s", &s).unwrap(), parse_weyl("y*Dx - x*Dy", &s).unwrap()],
            &ds_order(&s),
            &opts(),
        )
        .unwrap();
        assert!(ann.same_ideal(&expected));
    }

    #[test]
    fn shift_and_homogenized_agree() {
        let s2 = sig(&["x", "y"], &["s1", "s2"]);
        let s1 = sig(&["x", "y"], &["s"]);
        for (f, g) in [("x^2+y^2", "x*y"), ("x^2+y^3", "x"), ("x*y", "x+y")] {
            let fs = [xy(f), xy(g)];
            let a = annihilator_with(&s2, &fs, AnnMethod::Shift, &opts()).unwrap();
            let b = annihilator_with(&s2, &fs, AnnMethod::Homogenized, &opts()).unwrap();
            assert!(a.same_ideal(&b), "{f} / {g}");
        }
        for f in ["x^2+y^3", "x^3+x*y"] {
            let fs = [xy(f)];
            let a = annihilator_with(&s1, &fs, AnnMethod::Shift, &opts()).unwrap();
            let b = annihilator_with(&s1, &fs, AnnMethod::Homogenized, &opts()).unwrap();
            assert!(a.same_ideal(&b), "{f}");
        }
    }

    #[test]
    fn ann_pair_of_circle_and_cross() {
        let s = sig(&["x", "y"], &["s1", "s2"]);
        let ann = ann_pair(&s, &xy("x^2+y^2"), &xy("x*y"), &opts()).unwrap();
        let pq = [
            parse_weyl("x*Dx + y*Dy - 2*s1 - 2*s2", &s).unwrap(),
            parse_weyl("x*y^2*Dx - x^2*y*Dy + x^2*s2 - y^2*s2", &s).unwrap(),
        ];
        assert!(ann.same_ideal(&GroebnerBasis::new(&s, &pq, &ds_order(&s), &opts()).unwrap()));
    }

    #[test]
    fn global_b_examples() {
        let s = sig(&["x", "y"], &["s"]);
        let b = |t: &str| global_b(&s, &xy(t), &opts()).unwrap();
        let lin = |r: i64| Univariate::new(vec![int(r), int(1)]);
        assert_eq!(b("x"), lin(1));
        assert_eq!(b("x*y"), lin(1).pow(2));
        assert_eq!(b("x^2+y^2"), lin(1).pow(2));
    }

    #[test]
    fn bs_ideal_of_coordinates() {
        let s = sig(&["x", "y"], &["s1", "s2"]);
        let data = bs_ideal(&s, &xy("x"), &xy("y"), &opts()).unwrap();
        let expected = parse_comm("(s1+1)*(s2+1)", &["s1", "s2"]).unwrap();
        assert_eq!(data.generators.len(), 1);
        assert_eq!(data.generators[0].b, expected);
        assert!(data.generators[0].lines.is_empty());
        assert_eq!(data.epsilon, 0);
        assert!(data.c_condition(0));
    }

    #[test]
    fn c_condition_examples() {
        let b = parse_comm(
            "(s1+s2+1)*(s1+s2+2)*(s1+s2+3)*(2*s1+2*s2+3)",
            &["s1", "s2"],
        )
        .unwrap();
        let data = BSIdealData::from_generators(vec![b], false).unwrap();
        assert_eq!(data.generators[0].lines, vec![1, 2, 3]);
        assert_eq!(data.epsilon, 2);
        assert!(data.c_condition(2));
        assert!(!data.c_condition(0));
        assert!(!data.c_condition(1));
    }

    #[test]
    fn fixture_validation_rejects_non_members() {
        let s = sig(&["x", "y"], &["s1", "s2"]);
        let (f, g) = (xy("x"), xy("y"));
        let ann = ann_pair(&s, &f, &g, &opts()).unwrap();
        let good = parse_comm("(s1+1)*(s2+1)*(s1-s2)", &["s1", "s2"]).unwrap();
        assert!(bs_ideal_from_fixture(&s, &ann, &f, &g, vec![good], &opts()).is_ok());
        let bad = parse_comm("s1+1", &["s1", "s2"]).unwrap();
        assert!(matches!(
            bs_ideal_from_fixture(&s, &ann, &f, &g, vec![bad], &opts()),
            Err(Error::NotInIdeal(_))
        ));
    }
}
