//! Integer polynomials and exact sign-change certificates.
//!
//! Endpoints are dyadic rationals `m / 2^k` (every finite `f64` is one), so a
//! polynomial of degree `d` is evaluated exactly as the integer
//! `2^(k d) P(m / 2^k)` by Horner's rule.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DEGREE: usize = 13;

/// Dense polynomial with big-integer coefficients, ascending degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Result<Self> {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("zero polynomial".into()));
        }
        if coeffs.len() - 1 > MAX_DEGREE {
            return Err(Error::InvalidArgument(format!("degree {} exceeds {MAX_DEGREE}", coeffs.len() - 1)));
        }
        Ok(IntPolynomial { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        IntPolynomial::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Sign of `P(x)` computed exactly.
    pub fn sign_at(&self, x: &Dyadic) -> i8 {
        let d = self.degree();
        let mut acc = self.coeffs[d].clone();
        for i in (0..d).rev() {
            acc = acc * &x.num + (&self.coeffs[i] << (x.shift * (d - i) as u64));
        }
        sign(&acc)
    }

    /// Floating-point value, for diagnostics only.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }
}

fn sign(x: &BigInt) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// One base-10 integer per line, ascending degree. Blank lines are ignored.
impl FromStr for IntPolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut coeffs = Vec::new();
        for (i, line) in s.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            let c = t.parse::<BigInt>().map_err(|_| Error::Parse { line: i + 1, msg: format!("not an integer: {t:?}") })?;
            coeffs.push(c);
        }
        IntPolynomial::new(coeffs)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (neg, abs) = (c.is_negative(), c.abs());
            if first {
                write!(f, "{}{abs}", if neg { "-" } else { "" })?;
            } else {
                write!(f, " {} {abs}", if neg { '-' } else { '+' })?;
            }
            match i {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{i}")?,
            }
            first = false;
        }
        Ok(())
    }
}

/// The rational `num / 2^shift`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dyadic {
    pub num: BigInt,
    pub shift: u64,
}

impl Dyadic {
    /// Exact value of a finite double.
    pub fn from_f64(x: f64) -> Result<Dyadic> {
        if !x.is_finite() {
            return Err(Error::InvalidArgument(format!("{x} is not finite")));
        }
        if x == 0.0 {
            return Ok(Dyadic { num: BigInt::zero(), shift: 0 });
        }
        let bits = x.to_bits();
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if exp_bits == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp_bits - 1075) };
        let mut num = BigInt::from(mant);
        if x < 0.0 {
            num = -num;
        }
        let d = if exp >= 0 { Dyadic { num: num << exp as u64, shift: 0 } } else { Dyadic { num, shift: (-exp) as u64 } };
        Ok(d.reduced())
    }

    fn reduced(mut self) -> Dyadic {
        if self.num.is_zero() {
            self.shift = 0;
        }
        while self.shift > 0 && (&self.num & BigInt::from(1)).is_zero() {
            self.num >>= 1;
            self.shift -= 1;
        }
        self
    }

    fn with_shift(&self, shift: u64) -> BigInt {
        &self.num << (shift - self.shift)
    }

    pub fn midpoint(&self, o: &Dyadic) -> Dyadic {
        let k = self.shift.max(o.shift);
        Dyadic { num: self.with_shift(k) + o.with_shift(k), shift: k + 1 }.reduced()
    }

    /// `o - self`, exactly.
    pub fn sub_from(&self, o: &Dyadic) -> Dyadic {
        let k = self.shift.max(o.shift);
        Dyadic { num: o.with_shift(k) - self.with_shift(k), shift: k }.reduced()
    }

    pub fn le(&self, o: &Dyadic) -> bool {
        let k = self.shift.max(o.shift);
        self.with_shift(k) <= o.with_shift(k)
    }

    pub fn to_f64(&self) -> f64 {
        // Exact for the short dyadics produced by bisection of doubles.
        let n = self.num.to_f64().unwrap_or(f64::NAN);
        n * 2f64.powi(-(self.shift as i32))
    }

    pub fn denominator(&self) -> BigInt {
        BigInt::from(1) << self.shift
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.shift == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.denominator())
        }
    }
}

/// Exact bracket `[lo, hi]` on which a polynomial changes sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootCertificate {
    pub polynomial: String,
    /// Endpoints as exact fractions `p/q`.
    pub lo: String,
    pub hi: String,
    pub lo_approx: f64,
    pub hi_approx: f64,
    pub sign_lo: i8,
    pub sign_hi: i8,
    pub width: f64,
    pub tolerance: f64,
}

impl RootCertificate {
    /// Re-evaluates the endpoint signs exactly.
    pub fn recheck(&self, poly: &IntPolynomial) -> bool {
        let parse = |s: &str| -> Option<Dyadic> {
            let (n, d) = s.split_once('/').unwrap_or((s, "1"));
            let num: BigInt = n.parse().ok()?;
            let den: BigInt = d.parse().ok()?;
            let shift = den.bits() - 1;
            (BigInt::from(1) << shift == den).then_some(Dyadic { num, shift })
        };
        let (Some(a), Some(b)) = (parse(&self.lo), parse(&self.hi)) else { return false };
        let (sa, sb) = (poly.sign_at(&a), poly.sign_at(&b));
        sa == self.sign_lo && sb == self.sign_hi && (sa * sb < 0 || (sa == 0 && a == b))
    }
}

/// Certifies a root of `poly` in `[value - tol, value + tol]` and bisects the
/// bracket until its width is at most `tol`.
pub fn verify_minpoly(id: &str, poly: &IntPolynomial, value: f64, tol: f64) -> Result<RootCertificate> {
    if !(tol > 0.0) || !value.is_finite() {
        return Err(Error::InvalidArgument(format!("need finite value and tol > 0, got {value}, {tol}")));
    }
    let (lo_f, hi_f) = (value - tol, value + tol);
    let mut a = Dyadic::from_f64(lo_f)?;
    let mut b = Dyadic::from_f64(hi_f)?;
    let tol_exact = Dyadic::from_f64(tol)?;
    let mut sa = poly.sign_at(&a);
    let mut sb = poly.sign_at(&b);
    let certificate = |a: &Dyadic, b: &Dyadic, sa: i8, sb: i8| RootCertificate {
        polynomial: id.to_string(),
        lo: a.to_string(),
        hi: b.to_string(),
        lo_approx: a.to_f64(),
        hi_approx: b.to_f64(),
        sign_lo: sa,
        sign_hi: sb,
        width: a.sub_from(b).to_f64(),
        tolerance: tol,
    };
    for (x, s) in [(&a, sa), (&b, sb)] {
        if s == 0 {
            return Ok(certificate(x, x, 0, 0));
        }
    }
    if sa == sb {
        return Err(Error::NoSignChange { lo: lo_f, hi: hi_f });
    }
    while !a.sub_from(&b).le(&tol_exact) {
        let m = a.midpoint(&b);
        let sm = poly.sign_at(&m);
        if sm == 0 {
            return Ok(certificate(&m, &m, 0, 0));
        }
        if sm == sa {
            a = m;
            sa = sm;
        } else {
            b = m;
            sb = sm;
        }
    }
    Ok(certificate(&a, &b, sa, sb))
}

const PUBLISHED: [(&str, &str); 10] = [
    ("n8_w", include_str!("../data/poly/n8_w.txt")),
    ("n8_x2", include_str!("../data/poly/n8_x2.txt")),
    ("n8_z2", include_str!("../data/poly/n8_z2.txt")),
    ("n8_q6", include_str!("../data/poly/n8_q6.txt")),
    ("n9_b2", include_str!("../data/poly/n9_b2.txt")),
    ("n9_h2", include_str!("../data/poly/n9_h2.txt")),
    ("n9_q6", include_str!("../data/poly/n9_q6.txt")),
    ("n10_h2", include_str!("../data/poly/n10_h2.txt")),
    ("n10_z2", include_str!("../data/poly/n10_z2.txt")),
    ("n10_q6", include_str!("../data/poly/n10_q6.txt")),
];

pub fn published_ids() -> impl Iterator<Item = &'static str> {
    PUBLISHED.iter().map(|p| p.0)
}

/// One of the shipped minimal polynomials, e.g. `n8_w` or `n10_q6`.
pub fn published(id: &str) -> Result<IntPolynomial> {
    let (_, text) = PUBLISHED
        .iter()
        .find(|p| p.0 == id)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown polynomial {id:?}")))?;
    text.parse()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_conversion_is_exact() {
        for x in [0.5, -3.0, 0.1, 1e-300, 5e-324, 2.0f64.powi(70), -1.0 / 3.0] {
            let d = Dyadic::from_f64(x).unwrap();
            let back = d.num.to_f64().unwrap() * 2f64.powi(-(d.shift as i32));
            if d.shift < 1000 {
                assert_eq!(back, x);
            }
        }
        let d = Dyadic::from_f64(0.75).unwrap();
        assert_eq!((d.num.clone(), d.shift), (BigInt::from(3), 2));
        assert_eq!(d.to_string(), "3/4");
    }

    #[test]
    fn exact_signs() {
        // t^2 - 2 changes sign between the doubles on either side of sqrt 2.
        let p = IntPolynomial::from_i64(&[-2, 0, 1]).unwrap();
        let r = 2f64.sqrt();
        let below = Dyadic::from_f64(f64::from_bits(r.to_bits() - 1)).unwrap();
        let above = Dyadic::from_f64(f64::from_bits(r.to_bits() + 1)).unwrap();
        assert_ne!(p.sign_at(&below), p.sign_at(&above));
        assert_eq!(p.sign_at(&Dyadic::from_f64(1.5).unwrap()), 1);
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn certificate_width_and_recheck() {
        let p = IntPolynomial::from_i64(&[-2, 0, 1]).unwrap();
        let c = verify_minpoly("sqrt2", &p, 1.4142, 1e-3).unwrap();
        assert!(c.width <= 1e-3 && c.sign_lo * c.sign_hi < 0);
        assert!(c.lo_approx <= 2f64.sqrt() && 2f64.sqrt() <= c.hi_approx);
        assert!(c.recheck(&p));
        let tight = verify_minpoly("sqrt2", &p, 2f64.sqrt(), 1e-15).unwrap();
        assert!(tight.width <= 1e-15);
    }

    #[test]
    fn no_sign_change() {
        let c = IntPolynomial::from_i64(&[7]).unwrap();
        assert!(matches!(verify_minpoly("c", &c, 1.0, 1.0), Err(Error::NoSignChange { .. })));
        let p = IntPolynomial::from_i64(&[-2, 0, 1]).unwrap();
        assert!(verify_minpoly("p", &p, 3.0, 1e-3).is_err());
    }

    #[test]
    fn exact_root_at_endpoint() {
        let p = IntPolynomial::from_i64(&[-1, 1]).unwrap();
        let c = verify_minpoly("t-1", &p, 1.5, 0.5).unwrap();
        assert_eq!((c.sign_lo, c.width), (0, 0.0));
    }

    #[test]
    fn published_polynomials_load() {
        let degrees: Vec<usize> = published_ids().map(|id| published(id).unwrap().degree()).collect();
        assert_eq!(degrees, vec![12, 12, 12, 12, 13, 13, 13, 6, 6, 6]);
        let w = published("n8_w").unwrap();
        assert_eq!(w.coefficients()[0], BigInt::from(8));
        assert_eq!(w.coefficients()[12], BigInt::from(21));
        assert!(w.to_string().starts_with("8 - 40t - 32t^2"));
        assert!(published("n8_q6").unwrap().coefficients()[12] == BigInt::from(4980736000i64));
        assert!(published("n9_q6").unwrap().coefficients()[13] == BigInt::from(21761395104153600i64));
        assert!(published("nope").is_err());
        assert!("1\nx\n".parse::<IntPolynomial>().is_err());
    }
}
