//! Text syntax for polynomials and operators.
//!
//! `^` binds tightest, then unary minus, then `*`, then `+`/`-`. Products
//! must be written with `*`. Numeric literals are integers or `a/b`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::poly::CommPoly;
use crate::weyl::{AlgebraSignature, WeylElement};

/// Target ring for the parser.
pub trait ParseTarget {
    type Elem;
    fn constant(&self, c: BigRational) -> Self::Elem;
    fn variable(&self, name: &str) -> Option<Self::Elem>;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn pow(&self, a: &Self::Elem, k: u32) -> Result<Self::Elem>;
}

/// Commutative polynomials over a list of variable names.
pub struct CommRing<'a>(pub &'a [&'a str]);

impl ParseTarget for CommRing<'_> {
    type Elem = CommPoly;
    fn constant(&self, c: BigRational) -> CommPoly {
        CommPoly::constant(self.0.len(), c)
    }
    fn variable(&self, name: &str) -> Option<CommPoly> {
        self.0.iter().position(|n| *n == name).map(|i| CommPoly::var(self.0.len(), i))
    }
    fn add(&self, a: &CommPoly, b: &CommPoly) -> CommPoly {
        a + b
    }
    fn sub(&self, a: &CommPoly, b: &CommPoly) -> CommPoly {
        a - b
    }
    fn mul(&self, a: &CommPoly, b: &CommPoly) -> Result<CommPoly> {
        a.try_mul(b)
    }
    fn pow(&self, a: &CommPoly, k: u32) -> Result<CommPoly> {
        let mut acc = CommPoly::one(a.nvars());
        for _ in 0..k {
            acc = acc.try_mul(a)?;
        }
        Ok(acc)
    }
}

impl ParseTarget for Arc<AlgebraSignature> {
    type Elem = WeylElement;
    fn constant(&self, c: BigRational) -> WeylElement {
        WeylElement::constant(self, c)
    }
    fn variable(&self, name: &str) -> Option<WeylElement> {
        self.index_of(name).map(|i| WeylElement::var(self, i))
    }
    fn add(&self, a: &WeylElement, b: &WeylElement) -> WeylElement {
        a + b
    }
    fn sub(&self, a: &WeylElement, b: &WeylElement) -> WeylElement {
        a - b
    }
    fn mul(&self, a: &WeylElement, b: &WeylElement) -> Result<WeylElement> {
        a.try_mul(b)
    }
    fn pow(&self, a: &WeylElement, k: u32) -> Result<WeylElement> {
        a.pow(k)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((pos, Tok::Num(s.parse().expect("digits"))));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((pos, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((pos, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(Error::Syntax {
                pos,
                msg: format!("unexpected character {c:?}"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a, T: ParseTarget> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    ring: &'a T,
}

impl<T: ParseTarget> Parser<'_, T> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|t| t.0).unwrap_or(self.end)
    }

    fn err<X>(&self, msg: impl Into<String>) -> Result<X> {
        Err(Error::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<T::Elem> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                let t = self.term()?;
                acc = self.ring.add(&acc, &t);
            } else if self.eat('-') {
                let t = self.term()?;
                acc = self.ring.sub(&acc, &t);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<T::Elem> {
        let mut acc = self.unary()?;
        while self.eat('*') {
            let u = self.unary()?;
            acc = self.ring.mul(&acc, &u)?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<T::Elem> {
        if self.eat('-') {
            let u = self.unary()?;
            let z = self.ring.constant(BigRational::from_integer(0.into()));
            return Ok(self.ring.sub(&z, &u));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<T::Elem> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Tok::Num(k)) => {
                    self.at += 1;
                    let k: u32 = match u32::try_from(&k) {
                        Ok(k) if k <= u16::MAX as u32 => k,
                        _ => return Err(Error::ExponentOverflow),
                    };
                    return self.ring.pow(&base, k);
                }
                _ => return self.err("expected a nonnegative integer exponent"),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<T::Elem> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.at += 1;
                let mut d = BigInt::one();
                if self.peek() == Some(&Tok::Sym('/')) {
                    self.at += 1;
                    match self.peek().cloned() {
                        Some(Tok::Num(den)) if den != BigInt::from(0) => {
                            self.at += 1;
                            d = den;
                        }
                        Some(Tok::Num(_)) => return self.err("division by zero"),
                        _ => return self.err("expected an integer denominator"),
                    }
                }
                Ok(self.ring.constant(BigRational::new(n, d)))
            }
            Some(Tok::Ident(name)) => match self.ring.variable(&name) {
                Some(v) => {
                    self.at += 1;
                    Ok(v)
                }
                None => self.err(format!("unknown variable {name:?}")),
            },
            Some(Tok::Sym('(')) => {
                self.at += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parse `src` into the ring described by `ring`.
pub fn parse_in<T: ParseTarget>(src: &str, ring: &T) -> Result<T::Elem> {
    let toks = tokenize(src)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: src.chars().count() + 1,
        ring,
    };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

/// Parse a commutative polynomial over the given variable names.
pub fn parse_comm(src: &str, names: &[&str]) -> Result<CommPoly> {
    parse_in(src, &CommRing(names))
}

/// Parse an operator in the given algebra.
pub fn parse_weyl(src: &str, sig: &Arc<AlgebraSignature>) -> Result<WeylElement> {
    parse_in(src, sig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn precedence() {
        let p = parse_comm("-x^2", &["x"]).unwrap();
        assert_eq!(p, parse_comm("0 - x*x", &["x"]).unwrap());
        let q = parse_comm("2*x + 3/2*y - (x - y)^2", &["x", "y"]).unwrap();
        assert_eq!(q.coeff(&crate::poly::Monomial::var(1, 1)), rat(3, 2));
        assert_eq!(q.num_terms(), 5);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_comm("x + * y", &["x", "y"]) {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_comm("x y", &["x", "y"]), Err(Error::Syntax { .. })));
        assert!(matches!(parse_comm("z", &["x"]), Err(Error::Syntax { pos: 1, .. })));
        assert!(matches!(parse_comm("(x", &["x"]), Err(Error::Syntax { .. })));
        assert!(matches!(parse_comm("x^y", &["x", "y"]), Err(Error::Syntax { .. })));
        assert!(matches!(parse_comm("1/0", &["x"]), Err(Error::Syntax { .. })));
    }

    #[test]
    fn weyl_is_noncommutative() {
        let sig = Arc::new(AlgebraSignature::weyl(&["x"], &["s"]).unwrap());
        let a = parse_weyl("Dx*x", &sig).unwrap();
        let b = parse_weyl("x*Dx + 1", &sig).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "x*Dx + 1");
    }

    #[test]
    fn round_trip() {
        let sig = Arc::new(AlgebraSignature::weyl(&["x", "y"], &["s"]).unwrap());
        for src in ["3/2*x^2*Dx - s + 1", "x*y^2*Dx - x^2*y*Dy - 7*s", "0", "-Dy^3"] {
            let a = parse_weyl(src, &sig).unwrap();
            let b = parse_weyl(&a.to_string(), &sig).unwrap();
            assert_eq!(a, b);
        }
        let names = ["x", "y"];
        let p = parse_comm("x^4 + y^5 + x*y^4 - 1/3", &names).unwrap();
        let owned: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        assert_eq!(parse_comm(&p.to_string_with(&owned), &names).unwrap(), p);
    }
}
