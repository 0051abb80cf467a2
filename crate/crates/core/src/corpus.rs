//! Bundled regression cases with their expected exact values.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::fixture::{CertificateFile, Fixture};
use crate::groebner::{ds_order, transporter, GbOptions, GroebnerBasis, SaturationMethod};
use crate::parse::{parse_comm, parse_weyl};
use crate::rational::{BsMethod, BsValue, RationalFunction, StepMode};
use crate::univariate::Univariate;
use crate::weyl::{AlgebraSignature, WeylElement};

pub const CIRCLE_CROSS_CERTIFICATE: &str = include_str!("../fixtures/circle_cross_m1_n2.cert");
pub const SEXTIC_BS_IDEAL: &str = include_str!("../fixtures/sextic_z2.bs");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expected {
    Poly(&'static str),
    Zero,
    Inconclusive,
}

#[derive(Clone, Copy, Debug)]
pub enum Check {
    /// `I(s1,s2)` equals the ideal of the listed operators.
    PairAnnihilator { generators: &'static [&'static str] },
    /// `B_{f,g}` equals the ideal of the listed generators, with the given
    /// shift lines of the first generator and `ε`.
    BsIdeal { generators: &'static [&'static str], lines: &'static [i64], epsilon: i64 },
    /// Saturation of `J = I(s,−s−m)`: the detected `q`, factors whose colon
    /// leaves `J` unchanged, the factor whose colon gives the saturation, and
    /// an operator in `J : enlarging` but not in `J`.
    Saturation {
        m: i64,
        q: Option<&'static str>,
        superfluous: &'static [&'static str],
        enlarging: &'static str,
        member: Option<&'static str>,
    },
    /// `I(s,−s−m)` is already saturated.
    Saturated { m: i64 },
    /// `I_m(s)`: contains `contains`, whose members in `outside` are not in
    /// `I(s,−s−m)`; optionally equal to `I(s,−s−m)`; both step modes agree.
    RationalAnnihilator {
        m: u32,
        contains: &'static [&'static str],
        outside: &'static [&'static str],
        equals_specialization: bool,
    },
    Bs { m: u32, n: u32, method: BsMethod, expected: Expected },
    /// The certificate file verifies, and so does a freshly computed one.
    Certificate { file: &'static str },
}

#[derive(Clone, Copy, Debug)]
pub struct Case {
    pub id: &'static str,
    pub tags: &'static [&'static str],
    pub stretch: bool,
    pub vars: &'static [&'static str],
    pub f: &'static str,
    pub g: &'static str,
    /// Trusted `B_{f,g}` generators instead of computing them.
    pub bs_fixture: Option<&'static str>,
    pub check: Check,
}

impl Case {
    pub fn matches(&self, filter: &str) -> bool {
        self.id.contains(filter) || self.tags.iter().any(|t| t.contains(filter))
    }

    pub fn expected(&self) -> String {
        match self.check {
            Check::PairAnnihilator { generators } => format!("⟨{}⟩", generators.join(", ")),
            Check::BsIdeal { generators, lines, epsilon } => {
                format!("⟨{}⟩, L = {lines:?}, ε = {epsilon}", generators.join(", "))
            }
            Check::Saturation { m, q, enlarging, .. } => match q {
                Some(q) => format!("Sat I(s,-s-{m}) = J:({enlarging}), q = {q}"),
                None => format!("Sat I(s,-s-{m}) = J:({enlarging}) ⊋ J"),
            },
            Check::Saturated { m } => format!("I(s,-s-{m}) saturated"),
            Check::RationalAnnihilator {
                m,
                contains,
                equals_specialization,
                ..
            } => {
                if equals_specialization {
                    format!("I_{m}(s) = I(s,-s-{m})")
                } else {
                    format!("I_{m}(s) ∋ {}", contains.join(", "))
                }
            }
            Check::Bs { expected, .. } => match expected {
                Expected::Poly(p) => p.to_string(),
                Expected::Zero => "0".into(),
                Expected::Inconclusive => "inconclusive".into(),
            },
            Check::Certificate { .. } => "certificate verifies".into(),
        }
    }
}

const XY: &[&str] = &["x", "y"];
const XYZ: &[&str] = &["x", "y", "z"];
const CIRCLE: &str = "x^2+y^2";
const CROSS: &str = "x*y";
const CUSP: &str = "x^2+y^3";
const SEXTIC: &str = "x^6+y^6+2*z*x^3*y^3";
const SEXTIC_B: &str = "(s+1)^2*(s+1/2)*(s+3/2)*(s+1/3)*(s+2/3)*(s+4/3)*(s+5/6)*(s+7/6)";

const fn case(id: &'static str, tags: &'static [&'static str], f: &'static str, g: &'static str, check: Check) -> Case {
    Case {
        id,
        tags,
        stretch: false,
        vars: XY,
        f,
        g,
        bs_fixture: None,
        check,
    }
}

const fn bs(m: u32, n: u32, method: BsMethod, expected: Expected) -> Check {
    Check::Bs { m, n, method, expected }
}

const fn sextic(id: &'static str, check: Check) -> Case {
    Case {
        id,
        tags: &["sextic", "stretch"],
        stretch: true,
        vars: XYZ,
        f: SEXTIC,
        g: "z^2",
        bs_fixture: Some(SEXTIC_BS_IDEAL),
        check,
    }
}

pub fn cases() -> Vec<Case> {
    use BsMethod::{Elimination, Linear};
    use Expected::{Inconclusive, Poly, Zero};
    let mut out = vec![
        case(
            "circle-cross/ann-pair",
            &["circle-cross", "annihilator"],
            CIRCLE,
            CROSS,
            Check::PairAnnihilator {
                generators: &["x*Dx + y*Dy - 2*s1 - 2*s2", "x*y^2*Dx - x^2*y*Dy + x^2*s2 - y^2*s2"],
            },
        ),
        case(
            "circle-cross/bs-ideal",
            &["circle-cross", "bs-ideal"],
            CIRCLE,
            CROSS,
            Check::BsIdeal {
                generators: &["(s1+1)*(s2+1)*(s1+s2+1)*(s1+s2+2)*(s1+s2+3)*(2*s1+2*s2+3)*(2*s1+2*s2+5)"],
                lines: &[1, 2, 3],
                epsilon: 2,
            },
        ),
        case(
            "circle-cross/ann-m3",
            &["circle-cross", "annihilator"],
            CIRCLE,
            CROSS,
            Check::RationalAnnihilator { m: 3, contains: &[], outside: &[], equals_specialization: true },
        ),
        case(
            "circle-cross/ann-m2",
            &["circle-cross", "annihilator"],
            CIRCLE,
            CROSS,
            Check::RationalAnnihilator { m: 2, contains: &[], outside: &[], equals_specialization: true },
        ),
        case(
            "circle-cross/ann-m1",
            &["circle-cross", "annihilator"],
            CIRCLE,
            CROSS,
            Check::RationalAnnihilator {
                m: 1,
                contains: &["y^2*Dx*Dy - x*y*Dy^2 - y*Dx*s - x*Dy*s + y*Dx - 2*x*Dy"],
                outside: &["y^2*Dx*Dy - x*y*Dy^2 - y*Dx*s - x*Dy*s + y*Dx - 2*x*Dy"],
                equals_specialization: false,
            },
        ),
        case(
            "circle-cross/ann-m0",
            &["circle-cross", "annihilator"],
            CIRCLE,
            CROSS,
            Check::RationalAnnihilator {
                m: 0,
                contains: &["y*Dx^4*Dy - y*Dy^5 - Dx^4*s + 2*Dx^2*Dy^2*s - Dy^4*s - 4*Dx^2*Dy^2 - 4*Dy^4"],
                outside: &["y*Dx^4*Dy - y*Dy^5 - Dx^4*s + 2*Dx^2*Dy^2*s - Dy^4*s - 4*Dx^2*Dy^2 - 4*Dy^4"],
                equals_specialization: false,
            },
        ),
        case("circle-cross/zero-elim", &["circle-cross", "zero"], CIRCLE, CROSS, bs(1, 1, Elimination, Zero)),
        case("circle-cross/zero-linear", &["circle-cross", "zero"], CIRCLE, CROSS, bs(1, 1, Linear, Inconclusive)),
        case("circle-cross/m1-n2-linear", &["circle-cross", "positive"], CIRCLE, CROSS, bs(1, 2, Linear, Poly("s+1"))),
        case("circle-cross/m1-n2-elim", &["circle-cross", "positive"], CIRCLE, CROSS, bs(1, 2, Elimination, Poly("s+1"))),
        case(
            "circle-cross/certificate",
            &["circle-cross", "positive", "certificate"],
            CIRCLE,
            CROSS,
            Check::Certificate { file: CIRCLE_CROSS_CERTIFICATE },
        ),
        case(
            "quartic-cross/saturation-m3",
            &["quartic-cross", "saturation"],
            "x^4+y^5+x*y^4",
            CROSS,
            Check::Saturation {
                m: 3,
                q: Some("(s-1)*(11*s-15)"),
                superfluous: &["11*s-15"],
                enlarging: "s-1",
                member: Some(QUARTIC_MEMBER),
            },
        ),
        case("cusp-x/m4-n1", &["cusp-x", "tres-roots"], CUSP, "x", bs(4, 1, Linear, Poly("(s+1)*(s-7/3)*(s-5/3)"))),
    ];
    let m0: [&str; 6] = [
        "(s+1)*(s+5)*(s+7)",
        "(s+1)*(s+5)",
        "(s+1)*(s+5)",
        "(s+1)*(s+5)",
        "(s+1)*(s+5)",
        "s+1",
    ];
    const LARGE_N_M0: [&str; 6] = [
        "cusp-cross/largeN-m0-n1",
        "cusp-cross/largeN-m0-n2",
        "cusp-cross/largeN-m0-n3",
        "cusp-cross/largeN-m0-n4",
        "cusp-cross/largeN-m0-n5",
        "cusp-cross/largeN-m0-n6",
    ];
    for (i, b) in m0.into_iter().enumerate() {
        out.push(case(LARGE_N_M0[i], &["cusp-cross", "largeN"], CUSP, CROSS, bs(0, i as u32 + 1, Linear, Poly(b))));
    }
    const LARGE_N_M1: [&str; 10] = [
        "cusp-cross/largeN-m1-n1",
        "cusp-cross/largeN-m1-n2",
        "cusp-cross/largeN-m1-n3",
        "cusp-cross/largeN-m1-n4",
        "cusp-cross/largeN-m1-n5",
        "cusp-cross/largeN-m1-n6",
        "cusp-cross/largeN-m1-n7",
        "cusp-cross/largeN-m1-n8",
        "cusp-cross/largeN-m1-n9",
        "cusp-cross/largeN-m1-n10",
    ];
    for (i, id) in LARGE_N_M1.into_iter().enumerate() {
        let b = if i == 0 { "s*(s+1)*(s+2)" } else { "s*(s+1)" };
        out.push(case(id, &["cusp-cross", "largeN"], CUSP, CROSS, bs(1, i as u32 + 1, Linear, Poly(b))));
    }
    out.extend([
        sextic(
            "sextic/saturation-m1",
            Check::Saturation { m: 1, q: None, superfluous: &[], enlarging: "2*s+1", member: None },
        ),
        sextic("sextic/saturated-m2", Check::Saturated { m: 2 }),
        sextic("sextic/saturated-m3", Check::Saturated { m: 3 }),
        sextic("sextic/m0-n1", bs(0, 1, Linear, Poly(SEXTIC_B))),
        sextic("sextic/m0-n2", bs(0, 2, Linear, Poly(SEXTIC_B))),
        sextic("sextic/m0-n3", bs(0, 3, Linear, Poly(SEXTIC_B))),
        sextic("sextic/m0-n4", bs(0, 4, Linear, Poly(SEXTIC_B))),
    ]);
    out
}

/// An operator in `I(s,−s−3) : (s−1)` but not in `I(s,−s−3)` for
/// `f = x^4+y^5+x*y^4`, `g = x*y`.
pub const QUARTIC_MEMBER: &str = "704*x*y^3*Dx^2 - 576*x*y^3*Dx*Dy + 560*y^4*Dx*Dy - 432*y^4*Dy^2 \
    - 6875*x*y^2*Dx^2 + 5325*x*y^2*Dx*Dy - 5500*y^3*Dx*Dy + 12*x^2*y*Dy^2 - 26*x*y^2*Dy^2 \
    + 4040*y^3*Dy^2 + 1728*x*y^2*Dx*s - 2880*x*y^2*Dx - 1536*y^3*Dx*s + 4496*y^3*Dx \
    + 2592*y^3*Dy*s - 5616*y^3*Dy - 11550*x*y*Dx*s + 24675*x*y*Dx + 15125*y^2*Dx*s - 44000*y^2*Dx \
    + 12*x^2*Dy*s + 48*x^2*Dy - 37*x*y*Dy*s - 108*x*y*Dy - 20570*y^2*Dy*s + 50665*y^2*Dy \
    - 3888*y^2*s^2 + 15552*y^2*s - 15120*y^2 - 11*x*s^2 - 37*x*s - 12*x + 26015*y*s^2 \
    - 116050*y*s + 129615*y";

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: &'static str,
    pub passed: bool,
    /// What was observed (or the error).
    pub detail: String,
    /// The computed `b`, for Bernstein-Sato cases.
    pub value: Option<BsValue>,
    pub elapsed: Duration,
}

/// Runs cases, sharing pair annihilators and Bernstein-Sato ideals between
/// cases with the same `f/g`.
pub struct Runner {
    opts: GbOptions,
    functions: HashMap<(&'static str, &'static str), RationalFunction>,
    value: Option<BsValue>,
}

pub fn parse_s(text: &str) -> Result<Univariate> {
    Ok(parse_comm(text, &["s"])?.to_univariate(0)?.monic())
}

impl Runner {
    pub fn new(opts: GbOptions) -> Runner {
        Runner {
            opts,
            functions: HashMap::new(),
            value: None,
        }
    }

    pub fn run(&mut self, case: &Case) -> Outcome {
        let start = Instant::now();
        let (passed, detail) = match self.evaluate(case) {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        Outcome {
            id: case.id,
            passed,
            detail,
            value: self.value.take(),
            elapsed: start.elapsed(),
        }
    }

    fn function(&mut self, case: &Case, need_bs: bool) -> Result<&mut RationalFunction> {
        let key = (case.f, case.g);
        if !self.functions.contains_key(&key) {
            let f = parse_comm(case.f, case.vars)?;
            let g = parse_comm(case.g, case.vars)?;
            let r = RationalFunction::new(case.vars, &f, &g, &self.opts)?;
            self.functions.insert(key, r);
        }
        let r = self.functions.get_mut(&key).expect("inserted");
        if need_bs && r.bs_ideal().is_none() {
            match case.bs_fixture {
                Some(text) => {
                    let gens = Fixture::parse(text).polynomials(&["s1", "s2"])?;
                    r.supply_bs_ideal(gens)?;
                }
                None => {
                    r.compute_bs_ideal()?;
                }
            }
        }
        Ok(r)
    }

    fn evaluate(&mut self, case: &Case) -> Result<(bool, String)> {
        let opts = self.opts.clone();
        match case.check {
            Check::PairAnnihilator { generators } => {
                let r = self.function(case, false)?;
                let sig = r.pair_sig().clone();
                let gens = generators.iter().map(|t| parse_weyl(t, &sig)).collect::<Result<Vec<_>>>()?;
                let expected = GroebnerBasis::new(&sig, &gens, &ds_order(&sig), &opts)?;
                let ann = r.pair_annihilator();
                Ok((ann.same_ideal(&expected), list(ann.elements())))
            }
            Check::BsIdeal { generators, lines, epsilon } => {
                let r = self.function(case, true)?;
                let data = r.bs_ideal().expect("computed");
                let names = ["s1".to_string(), "s2".to_string()];
                let drl = crate::poly::MonomialOrder::DegRevLex.compile(2)?;
                let got: Vec<_> = data.generators.iter().map(|g| g.b.monic(&drl)).collect();
                let want = generators
                    .iter()
                    .map(|t| Ok(parse_comm(t, &["s1", "s2"])?.monic(&drl)))
                    .collect::<Result<Vec<_>>>()?;
                let same = got == want;
                let ok = same && data.generators[0].lines == lines && data.epsilon == epsilon;
                let shown: Vec<String> = got.iter().map(|b| b.to_string_with(&names)).collect();
                Ok((
                    ok,
                    format!("⟨{}⟩, L = {:?}, ε = {}", shown.join(", "), data.generators[0].lines, data.epsilon),
                ))
            }
            Check::Saturation {
                m,
                q,
                superfluous,
                enlarging,
                member,
            } => {
                let r = self.function(case, false)?;
                let sig = r.sig().clone();
                let order = ds_order(&sig);
                let sat = r.saturate_specialization(m, SaturationMethod::PerFactor)?;
                let j = &sat.input;
                let mut ok = true;
                let mut notes = vec![format!("q = {}", sat.q.factor_linear().to_string_in("s"))];
                if let Some(q) = q {
                    ok &= sat.q == parse_s(q)?;
                }
                for t in superfluous {
                    let h = s_elem(&sig, t)?;
                    let same = transporter(&sig, j.elements(), &h, &order, &opts)?.same_ideal(j);
                    notes.push(format!("J:({t}) = J: {same}"));
                    ok &= same;
                }
                let h = s_elem(&sig, enlarging)?;
                let k = transporter(&sig, j.elements(), &h, &order, &opts)?;
                let grows = !k.same_ideal(j);
                let is_sat = k.same_ideal(&sat.basis);
                notes.push(format!("J:({enlarging}) ⊋ J: {grows}, = Sat: {is_sat}"));
                ok &= grows && is_sat;
                if let Some(p) = member {
                    let p = parse_weyl(p, &sig)?;
                    let inside = k.contains(&p)? && !j.contains(&p)?;
                    notes.push(format!("witness in J:({enlarging}) \\ J: {inside}"));
                    ok &= inside;
                }
                Ok((ok, notes.join("; ")))
            }
            Check::Saturated { m } => {
                let r = self.function(case, false)?;
                let sat = r.saturate_specialization(m, SaturationMethod::PerFactor)?;
                Ok((!sat.changed(), format!("q = {}, changed = {}", sat.q.to_string_in("s"), sat.changed())))
            }
            Check::RationalAnnihilator {
                m,
                contains,
                outside,
                equals_specialization,
            } => {
                let r = self.function(case, true)?;
                let sig = r.sig().clone();
                let direct = r.ann_rational(m, StepMode::Direct)?;
                let iterated = r.ann_rational(m, StepMode::Iterated)?;
                let specialized = GroebnerBasis::new(&sig, &r.specialize(m as i64)?, &ds_order(&sig), &opts)?;
                let mut ok = direct.basis.same_ideal(&iterated.basis);
                for t in contains {
                    ok &= direct.basis.contains(&parse_weyl(t, &sig)?)?;
                }
                for t in outside {
                    ok &= !specialized.contains(&parse_weyl(t, &sig)?)?;
                }
                let equal = direct.basis.same_ideal(&specialized);
                ok &= equal == equals_specialization;
                Ok((
                    ok,
                    format!(
                        "{} generators, equal to I(s,-s-{m}): {equal}, case {:?}",
                        direct.basis.len(),
                        direct.case
                    ),
                ))
            }
            Check::Bs { m, n, method, expected } => {
                let r = self.function(case, true)?;
                let res = match method {
                    BsMethod::Linear => r.bs_rational_linear(m, n, 24, None)?,
                    BsMethod::Elimination => r.bs_rational_elim(m, n)?,
                };
                let ok = match (&res.value, expected) {
                    (BsValue::Poly(b), Expected::Poly(e)) => *b == parse_s(e)?,
                    (BsValue::Zero, Expected::Zero) => true,
                    (BsValue::Inconclusive { .. }, Expected::Inconclusive) => true,
                    _ => false,
                };
                let detail = describe(&res.value);
                self.value = Some(res.value);
                Ok((ok, detail))
            }
            Check::Certificate { file } => {
                let cert = CertificateFile::parse(file)?;
                let b = cert.parse_b()?;
                let r = self.function(case, true)?;
                let ops = cert.parse_operators(r)?;
                let given = r.verify_certificate(cert.m, cert.n, &b, &ops)?;
                let own = r.certificate(cert.m, cert.n, &b)?;
                let computed = r.verify_certificate(cert.m, cert.n, &b, &own)?;
                Ok((
                    given.passed() && computed.passed(),
                    format!("bundled: {given:?}; computed: {computed:?}"),
                ))
            }
        }
    }
}

fn s_elem(sig: &std::sync::Arc<AlgebraSignature>, text: &str) -> Result<WeylElement> {
    let e = parse_weyl(text, sig)?;
    if e.to_param_poly().is_none() {
        return Err(Error::InvalidInput(format!("{text} is not a polynomial in s")));
    }
    Ok(e)
}

fn list(gens: &[WeylElement]) -> String {
    let v: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
    format!("⟨{}⟩", v.join(", "))
}

pub fn describe(v: &BsValue) -> String {
    match v {
        BsValue::Poly(b) => b.factor_linear().to_string_in("s"),
        BsValue::Zero => "0".into(),
        BsValue::Inconclusive { max_degree } => format!("inconclusive (degree cap {max_degree})"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique_and_filters_work() {
        let all = cases();
        let mut ids: Vec<_> = all.iter().map(|c| c.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), all.len());
        let large: Vec<_> = all.iter().filter(|c| c.matches("largeN")).collect();
        assert_eq!(large.len(), 16);
        assert!(all.iter().filter(|c| c.stretch).all(|c| c.bs_fixture.is_some()));
    }

    #[test]
    fn bundled_texts_parse() {
        let cert = CertificateFile::parse(CIRCLE_CROSS_CERTIFICATE).unwrap();
        assert_eq!((cert.m, cert.n), (1, 2));
        assert_eq!(Fixture::parse(SEXTIC_BS_IDEAL).polynomials(&["s1", "s2"]).unwrap().len(), 2);
        let sig = std::sync::Arc::new(AlgebraSignature::weyl(&["x", "y"], &["s"]).unwrap());
        assert_eq!(parse_weyl(QUARTIC_MEMBER, &sig).unwrap().num_terms(), 35);
        assert_eq!(parse_s(SEXTIC_B).unwrap().degree(), Some(9));
    }

    #[test]
    fn small_cases_pass() {
        let mut runner = Runner::new(GbOptions::default());
        for c in cases().iter().filter(|c| c.id.starts_with("circle-cross/ann-pair") || c.id.contains("zero-elim")) {
            let out = runner.run(c);
            assert!(out.passed, "{}: {}", out.id, out.detail);
        }
    }
}
