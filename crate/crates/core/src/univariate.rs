//! Dense univariate polynomials over ℚ: gcd, exact division, rational roots.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::format_terms;

/// Coefficients in ascending degree, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Univariate {
    c: Vec<BigRational>,
}

impl Univariate {
    pub fn new(mut c: Vec<BigRational>) -> Univariate {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Univariate { c }
    }

    pub fn zero() -> Univariate {
        Univariate { c: Vec::new() }
    }

    pub fn one() -> Univariate {
        Univariate::new(vec![BigRational::one()])
    }

    /// `s - r`
    pub fn linear(r: &BigRational) -> Univariate {
        Univariate::new(vec![-r.clone(), BigRational::one()])
    }

    pub fn from_roots(roots: &[BigRational]) -> Univariate {
        roots.iter().fold(Univariate::one(), |acc, r| acc.mul(&Univariate::linear(r)))
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.c.last()
    }

    pub fn monic(&self) -> Univariate {
        match self.leading() {
            None => self.clone(),
            Some(l) => {
                let inv = l.recip();
                Univariate::new(self.c.iter().map(|x| x * &inv).collect())
            }
        }
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|l| l.is_one())
    }

    pub fn add(&self, o: &Univariate) -> Univariate {
        let n = self.c.len().max(o.c.len());
        let z = BigRational::zero();
        Univariate::new(
            (0..n)
                .map(|i| self.c.get(i).unwrap_or(&z) + o.c.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn sub(&self, o: &Univariate) -> Univariate {
        let n = self.c.len().max(o.c.len());
        let z = BigRational::zero();
        Univariate::new(
            (0..n)
                .map(|i| self.c.get(i).unwrap_or(&z) - o.c.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn mul(&self, o: &Univariate) -> Univariate {
        if self.is_zero() || o.is_zero() {
            return Univariate::zero();
        }
        let mut out = vec![BigRational::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Univariate::new(out)
    }

    pub fn pow(&self, k: u32) -> Univariate {
        (0..k).fold(Univariate::one(), |acc, _| acc.mul(self))
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.c.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn div_rem(&self, d: &Univariate) -> (Univariate, Univariate) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead_inv = d.c[dd].recip();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Univariate::zero(), self.clone());
        }
        let mut q = vec![BigRational::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let coef = &r[i + dd] * &lead_inv;
            if !coef.is_zero() {
                for j in 0..=dd {
                    r[i + j] -= &coef * &d.c[j];
                }
            }
            q[i] = coef;
        }
        (Univariate::new(q), Univariate::new(r))
    }

    pub fn exact_div(&self, d: &Univariate) -> Result<Univariate> {
        if d.is_zero() {
            return Err(Error::ZeroInput("exact_div"));
        }
        let (q, r) = self.div_rem(d);
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::InexactDivision)
        }
    }

    pub fn divides(&self, other: &Univariate) -> bool {
        !self.is_zero() && other.div_rem(self).1.is_zero()
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, o: &Univariate) -> Univariate {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn lcm(&self, o: &Univariate) -> Univariate {
        if self.is_zero() || o.is_zero() {
            return Univariate::zero();
        }
        self.mul(o).exact_div(&self.gcd(o)).expect("gcd divides product").monic()
    }

    /// Primitive integer coefficients with positive leading coefficient.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let den = self.c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = self.c.iter().map(|x| x.numer() * (&den / x.denom())).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        let sign = if ints.last().unwrap().is_negative() { -BigInt::one() } else { BigInt::one() };
        ints.into_iter().map(|x| x / &g * &sign).collect()
    }

    /// Distinct rational roots with multiplicities, sorted ascending.
    pub fn rational_roots(&self) -> Vec<(BigRational, u32)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let mut rest = self.monic();
        let mut zero_mult = 0;
        while rest.c.first().is_some_and(|x| x.is_zero()) {
            rest = Univariate::new(rest.c[1..].to_vec());
            zero_mult += 1;
        }
        if zero_mult > 0 {
            out.push((BigRational::zero(), zero_mult));
        }
        if rest.degree().unwrap_or(0) > 0 {
            let ints = rest.primitive_integer();
            let a0 = ints[0].abs();
            let an = ints.last().unwrap().abs();
            let ps = divisors(&a0);
            let qs = divisors(&an);
            let mut cands: Vec<BigRational> = Vec::new();
            for p in &ps {
                for q in &qs {
                    if p.gcd(q).is_one() {
                        let r = BigRational::new(p.clone(), q.clone());
                        cands.push(r.clone());
                        cands.push(-r);
                    }
                }
            }
            for r in cands {
                let lin = Univariate::linear(&r);
                let mut k = 0;
                loop {
                    let (q, rem) = rest.div_rem(&lin);
                    if !rem.is_zero() {
                        break;
                    }
                    rest = q;
                    k += 1;
                }
                if k > 0 {
                    out.push((r, k));
                }
                if rest.degree() == Some(0) {
                    break;
                }
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Split off every linear factor over ℚ.
    pub fn factor_linear(&self) -> LinearFactorization {
        let roots = self.rational_roots();
        let mut rest = self.monic();
        for (r, k) in &roots {
            rest = rest.exact_div(&Univariate::linear(r).pow(*k)).expect("root divides");
        }
        LinearFactorization {
            leading: self.leading().cloned().unwrap_or_else(BigRational::zero),
            roots,
            rest,
        }
    }

    pub fn to_string_in(&self, var: &str) -> String {
        let terms = self.c.iter().enumerate().rev().filter(|(_, c)| !c.is_zero()).map(|(e, c)| {
            let m = match e {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{e}"),
            };
            (c.clone(), m)
        });
        format_terms(terms)
    }
}

impl fmt::Debug for Univariate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_in("s"))
    }
}

/// `leading * Π (s - root)^mult * rest`, with `rest` monic and free of rational roots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearFactorization {
    pub leading: BigRational,
    pub roots: Vec<(BigRational, u32)>,
    pub rest: Univariate,
}

impl LinearFactorization {
    pub fn to_string_in(&self, var: &str) -> String {
        let mut parts = Vec::new();
        if !self.leading.is_one() {
            parts.push(format!("{}", self.leading));
        }
        // largest root last, so (s+1)(s+5) reads in the usual order
        for (r, k) in self.roots.iter().rev() {
            let lin = Univariate::linear(r).to_string_in(var);
            let base = if r.is_zero() { var.to_string() } else { format!("({lin})") };
            if *k == 1 {
                parts.push(base);
            } else {
                parts.push(format!("{base}^{k}"));
            }
        }
        if self.rest.degree().unwrap_or(0) > 0 {
            parts.push(format!("({})", self.rest.to_string_in(var)));
        }
        if parts.is_empty() {
            return "1".into();
        }
        parts.join("*")
    }
}

/// Positive divisors by trial division. Cofactors left after the trial bound
/// are treated as prime, which can only lose candidates, never add wrong ones.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    if n.is_zero() {
        return vec![BigInt::one()];
    }
    let mut n = n.abs();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut p = BigInt::from(2u32);
    let limit = BigInt::from(2_000_000u64);
    while &p * &p <= n && p < limit {
        let mut k = 0;
        while (&n % &p).is_zero() {
            n /= &p;
            k += 1;
        }
        if k > 0 {
            factors.push((p.clone(), k));
        }
        p += if p.to_u32() == Some(2) { 1u32 } else { 2u32 };
    }
    if n > BigInt::one() {
        factors.push((n, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (p, k) in factors {
        let cur = divs.clone();
        let mut pk = BigInt::one();
        for _ in 0..k {
            pk *= &p;
            divs.extend(cur.iter().map(|d| d * &pk));
        }
    }
    divs.sort();
    divs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

    fn roots_of(p: &Univariate) -> Vec<BigRational> {
        p.rational_roots().into_iter().map(|(r, _)| r).collect()
    }

    #[test]
    fn roots_of_largen_b() {
        let p = Univariate::from_roots(&[int(-1), int(-5), int(-7)]);
        assert_eq!(roots_of(&p), vec![int(-7), int(-5), int(-1)]);
    }

    #[test]
    fn roots_with_positive_rationals() {
        let p = Univariate::from_roots(&[int(-1), rat(7, 3), rat(5, 3)]);
        assert_eq!(roots_of(&p), vec![int(-1), rat(5, 3), rat(7, 3)]);
        let f = p.factor_linear();
        assert_eq!(f.to_string_in("s"), "(s - 7/3)*(s - 5/3)*(s + 1)");
    }

    #[test]
    fn gcd_and_exact_division() {
        let a = Univariate::new(vec![int(-1), int(0), int(1)]);
        let b = Univariate::new(vec![int(-1), int(1)]);
        assert_eq!(a.gcd(&b), b);
        assert_eq!(a.exact_div(&b).unwrap(), Univariate::new(vec![int(1), int(1)]));
        assert_eq!(b.exact_div(&a), Err(Error::InexactDivision));
    }

    #[test]
    fn multiplicities_and_irreducible_rest() {
        // (s+1)^2 * s * (s^2 + 1)
        let p = Univariate::from_roots(&[int(-1), int(-1), int(0)])
            .mul(&Univariate::new(vec![int(1), int(0), int(1)]));
        let f = p.factor_linear();
        assert_eq!(f.roots, vec![(int(-1), 2), (int(0), 1)]);
        assert_eq!(f.rest, Univariate::new(vec![int(1), int(0), int(1)]));
        assert_eq!(f.to_string_in("s"), "s*(s + 1)^2*(s^2 + 1)");
    }

    #[test]
    fn degree_nine_product() {
        let roots = [
            int(-1),
            int(-1),
            rat(-1, 2),
            rat(-3, 2),
            rat(-1, 3),
            rat(-2, 3),
            rat(-4, 3),
            rat(-5, 6),
            rat(-7, 6),
        ];
        let p = Univariate::from_roots(&roots);
        let f = p.factor_linear();
        assert_eq!(f.roots.iter().map(|r| r.1).sum::<u32>(), 9);
        assert!(f.rest.degree() == Some(0));
    }
}
