//! Plain-text fixture files.
//!
//! A fixture is a list of expressions, one per line, in the parser grammar.
//! Lines of the form `# key: value` are headers; other `#` lines and blank
//! lines are ignored.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::parse::{parse_comm, parse_weyl};
use crate::poly::CommPoly;
use crate::rational::RationalFunction;
use crate::univariate::Univariate;
use crate::weyl::WeylElement;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Fixture {
    pub headers: BTreeMap<String, String>,
    pub lines: Vec<String>,
}

impl Fixture {
    pub fn parse(text: &str) -> Fixture {
        let mut out = Fixture::default();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.split_once(':') {
                    let k = k.trim();
                    if !k.is_empty() && !k.contains(' ') {
                        out.headers.insert(k.to_string(), v.trim().to_string());
                    }
                }
                continue;
            }
            out.lines.push(line.to_string());
        }
        out
    }

    pub fn header(&self, key: &str) -> Result<&str> {
        self.headers
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::InvalidInput(format!("fixture is missing the header `{key}`")))
    }

    /// The body lines as polynomials in `names`.
    pub fn polynomials(&self, names: &[&str]) -> Result<Vec<CommPoly>> {
        self.lines.iter().map(|l| parse_comm(l, names)).collect()
    }
}

/// A functional-equation certificate `b·g^N − Σ P_k f^k g^{N−k} ∈ I_{m+N}(s)`
/// in textual form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateFile {
    pub vars: Vec<String>,
    pub f: String,
    pub g: String,
    pub m: u32,
    pub n: u32,
    pub b: String,
    /// `P_1..P_N`.
    pub operators: Vec<String>,
}

impl CertificateFile {
    pub fn parse(text: &str) -> Result<CertificateFile> {
        let fx = Fixture::parse(text);
        let int = |key: &str| -> Result<u32> {
            fx.header(key)?
                .parse()
                .map_err(|_| Error::InvalidInput(format!("header `{key}` is not a non-negative integer")))
        };
        let cert = CertificateFile {
            vars: fx.header("vars")?.split(',').map(|v| v.trim().to_string()).collect(),
            f: fx.header("f")?.to_string(),
            g: fx.header("g")?.to_string(),
            m: int("m")?,
            n: int("N")?,
            b: fx.header("b")?.to_string(),
            operators: fx.lines.clone(),
        };
        if cert.operators.len() != cert.n as usize {
            return Err(Error::InvalidInput(format!(
                "certificate for N = {} lists {} operators",
                cert.n,
                cert.operators.len()
            )));
        }
        Ok(cert)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# vars: {}", self.vars.join(","));
        let _ = writeln!(out, "# f: {}", self.f);
        let _ = writeln!(out, "# g: {}", self.g);
        let _ = writeln!(out, "# m: {}", self.m);
        let _ = writeln!(out, "# N: {}", self.n);
        let _ = writeln!(out, "# b: {}", self.b);
        for p in &self.operators {
            let _ = writeln!(out, "{p}");
        }
        out
    }

    pub fn var_refs(&self) -> Vec<&str> {
        self.vars.iter().map(String::as_str).collect()
    }

    pub fn parse_f_g(&self) -> Result<(CommPoly, CommPoly)> {
        let v = self.var_refs();
        Ok((parse_comm(&self.f, &v)?, parse_comm(&self.g, &v)?))
    }

    pub fn parse_b(&self) -> Result<Univariate> {
        parse_comm(&self.b, &["s"])?.to_univariate(0)
    }

    /// The operators in the one-parameter algebra of `r`.
    pub fn parse_operators(&self, r: &RationalFunction) -> Result<Vec<WeylElement>> {
        self.operators.iter().map(|p| parse_weyl(p, r.sig())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn headers_and_body() {
        let fx = Fixture::parse("# note\n# f: x^2\n\n s1+1 \n# g: y\ns2\n");
        assert_eq!(fx.header("f").unwrap(), "x^2");
        assert_eq!(fx.header("g").unwrap(), "y");
        assert_eq!(fx.lines, vec!["s1+1", "s2"]);
        assert!(fx.header("m").is_err());
        assert_eq!(fx.polynomials(&["s1", "s2"]).unwrap().len(), 2);
    }

    #[test]
    fn certificate_round_trip() {
        let c = CertificateFile {
            vars: vec!["x".into(), "y".into()],
            f: "x".into(),
            g: "y".into(),
            m: 0,
            n: 1,
            b: "s + 1".into(),
            operators: vec!["y*Dx".into()],
        };
        assert_eq!(CertificateFile::parse(&c.to_text()).unwrap(), c);
        let short = c.to_text().replace("# N: 1", "# N: 2");
        assert!(CertificateFile::parse(&short).is_err());
    }
}
