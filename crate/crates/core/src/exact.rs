//! Exact arithmetic in real quadratic fields `Q(√d)`.
//!
//! A [`QuadScalar`] is `a + b√d` with rational `a, b` and a squarefree `d ≥ 1`;
//! `d = 1` stands for `Q` and always has `b = 0`. Scalars with `b = 0` mix
//! freely with any field; mixing two different `d` with irrational parts is a
//! caller bug and panics.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::spectral::parse_rational;

/// Splits `n = s²·d` with `d` squarefree, returning `(s, d)`.
pub fn squarefree_split(n: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut d = 1u64;
    let mut rest = n;
    let mut p = 2u64;
    while p * p <= rest {
        let mut e = 0;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            d *= p;
        }
        p += 1;
    }
    (s, d * rest)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadScalar {
    a: BigRational,
    b: BigRational,
    d: u64,
}

impl QuadScalar {
    pub fn new(a: BigRational, b: BigRational, d: u64) -> Self {
        assert!(d >= 1, "field parameter must be positive");
        let (s, core) = squarefree_split(d);
        let b = b * BigRational::from_integer(BigInt::from(s));
        if core == 1 {
            QuadScalar { a: a + b, b: BigRational::zero(), d: 1 }
        } else if b.is_zero() {
            QuadScalar { a, b, d: 1 }
        } else {
            QuadScalar { a, b, d: core }
        }
    }

    pub fn rational(a: BigRational) -> Self {
        QuadScalar { a, b: BigRational::zero(), d: 1 }
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// `√n` for a non-negative rational `n`, when it lies in some `Q(√d)`.
    pub fn sqrt_of_rational(n: &BigRational) -> Option<Self> {
        if n.is_negative() {
            return None;
        }
        // √(p/q) = √(pq)/q
        let pq = (n.numer() * n.denom()).to_u64()?;
        let (s, d) = squarefree_split(pq);
        let coef = BigRational::new(BigInt::from(s), n.denom().clone());
        Some(QuadScalar::new(BigRational::zero(), coef, d))
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.b
    }

    pub fn field(&self) -> u64 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.a)
    }

    fn common_field(&self, other: &Self) -> u64 {
        match (self.d, other.d) {
            (1, d) | (d, 1) => d,
            (x, y) if x == y => x,
            (x, y) => panic!("mixing Q(sqrt({})) and Q(sqrt({}))", x, y),
        }
    }

    /// `a − b√d`.
    pub fn conjugate(&self) -> Self {
        QuadScalar { a: self.a.clone(), b: -self.b.clone(), d: self.d }
    }

    /// Field norm `a² − d b²`.
    pub fn field_norm(&self) -> BigRational {
        let d = BigRational::from_integer(BigInt::from(self.d));
        &self.a * &self.a - d * &self.b * &self.b
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.field_norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conjugate();
        Some(QuadScalar::new(c.a / &n, c.b / n, self.d))
    }

    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|inv| self * &inv)
    }

    pub fn signum(&self) -> i32 {
        let sa = sign(&self.a);
        let sb = sign(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // opposite signs: compare a² with d b²
        let d = BigRational::from_integer(BigInt::from(self.d));
        match (&self.a * &self.a).cmp(&(d * &self.b * &self.b)) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * (self.d as f64).sqrt()
    }
}

fn sign(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl PartialOrd for QuadScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl<'a> Add<&'a QuadScalar> for &'a QuadScalar {
    type Output = QuadScalar;
    fn add(self, rhs: &QuadScalar) -> QuadScalar {
        let d = self.common_field(rhs);
        QuadScalar::new(&self.a + &rhs.a, &self.b + &rhs.b, d)
    }
}

impl<'a> Sub<&'a QuadScalar> for &'a QuadScalar {
    type Output = QuadScalar;
    fn sub(self, rhs: &QuadScalar) -> QuadScalar {
        let d = self.common_field(rhs);
        QuadScalar::new(&self.a - &rhs.a, &self.b - &rhs.b, d)
    }
}

impl<'a> Mul<&'a QuadScalar> for &'a QuadScalar {
    type Output = QuadScalar;
    fn mul(self, rhs: &QuadScalar) -> QuadScalar {
        let d = self.common_field(rhs);
        let dd = BigRational::from_integer(BigInt::from(d));
        QuadScalar::new(
            &self.a * &rhs.a + dd * &self.b * &rhs.b,
            &self.a * &rhs.b + &self.b * &rhs.a,
            d,
        )
    }
}

impl Neg for &QuadScalar {
    type Output = QuadScalar;
    fn neg(self) -> QuadScalar {
        QuadScalar { a: -self.a.clone(), b: -self.b.clone(), d: self.d }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for QuadScalar {
            type Output = QuadScalar;
            fn $m(self, rhs: QuadScalar) -> QuadScalar {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for QuadScalar {
    type Output = QuadScalar;
    fn neg(self) -> QuadScalar {
        -&self
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for QuadScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", fmt_rational(&self.a));
        }
        let surd = if self.b.is_one() {
            format!("sqrt({})", self.d)
        } else if (-&self.b).is_one() {
            format!("-sqrt({})", self.d)
        } else {
            format!("{}*sqrt({})", fmt_rational(&self.b), self.d)
        };
        if self.a.is_zero() {
            write!(f, "{}", surd)
        } else if surd.starts_with('-') {
            write!(f, "{}{}", fmt_rational(&self.a), surd)
        } else {
            write!(f, "{}+{}", fmt_rational(&self.a), surd)
        }
    }
}

/// Splits an expression into signed terms at top-level `+`/`-`.
fn split_terms(s: &str) -> Vec<String> {
    let mut terms = Vec::new();
    let mut cur = String::new();
    let mut depth = 0;
    let mut prev: Option<char> = None;
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        let after_exp = matches!(prev, Some('e') | Some('E'));
        if (ch == '+' || ch == '-') && depth == 0 && !cur.trim().is_empty() && !after_exp {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
        prev = Some(ch);
    }
    if !cur.trim().is_empty() {
        terms.push(cur);
    }
    terms
}

fn parse_term(term: &str) -> Result<QuadScalar> {
    let t: String = term.chars().filter(|c| !c.is_whitespace()).collect();
    let err = || Error::Parse(format!("malformed exact scalar term {:?}", term));
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest.to_string()),
        None => (false, t.strip_prefix('+').unwrap_or(&t).to_string()),
    };
    let value = if let Some(idx) = body.find("sqrt(") {
        let close = body[idx..].find(')').ok_or_else(err)? + idx;
        let radicand = parse_rational(&body[idx + 5..close])?;
        if radicand.is_negative() || !radicand.is_integer() {
            return Err(err());
        }
        let n = radicand.to_integer().to_u64().ok_or_else(err)?;
        let root = if n == 0 { QuadScalar::zero() } else { QuadScalar::new(BigRational::zero(), BigRational::one(), n) };
        let before = body[..idx].trim_end_matches('*');
        let after = &body[close + 1..];
        let mut coef = if before.is_empty() { BigRational::one() } else { parse_rational(before)? };
        if !after.is_empty() {
            let divisor = after.strip_prefix('/').ok_or_else(err)?;
            let divisor = parse_rational(divisor)?;
            if divisor.is_zero() {
                return Err(err());
            }
            coef /= divisor;
        }
        &QuadScalar::rational(coef) * &root
    } else {
        QuadScalar::rational(parse_rational(&body)?)
    };
    Ok(if neg { -value } else { value })
}

impl FromStr for QuadScalar {
    type Err = Error;

    /// Parses `a/b`, `a/b+c/e*sqrt(d)`, `sqrt(d)`, `c*sqrt(d)/e`, and sums thereof.
    fn from_str(s: &str) -> Result<Self> {
        let terms = split_terms(s);
        if terms.is_empty() {
            return Err(Error::Parse("empty exact scalar".into()));
        }
        let mut acc = QuadScalar::zero();
        for t in terms {
            let v = parse_term(&t)?;
            if acc.d != 1 && v.d != 1 && acc.d != v.d {
                return Err(Error::Parse(format!("mixed quadratic fields in {:?}", s)));
            }
            acc = &acc + &v;
        }
        Ok(acc)
    }
}

/// An exact complex number `re + i·im` with components in one `Q(√d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactComplex {
    pub re: QuadScalar,
    pub im: QuadScalar,
}

impl ExactComplex {
    pub fn new(re: QuadScalar, im: QuadScalar) -> Self {
        ExactComplex { re, im }
    }

    pub fn real(re: QuadScalar) -> Self {
        ExactComplex { re, im: QuadScalar::zero() }
    }

    pub fn imag(im: QuadScalar) -> Self {
        ExactComplex { re: QuadScalar::zero(), im }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn scale_int(&self, k: i64) -> Self {
        let k = QuadScalar::from_int(k);
        ExactComplex { re: &self.re * &k, im: &self.im * &k }
    }

    pub fn add(&self, other: &Self) -> Self {
        ExactComplex { re: &self.re + &other.re, im: &self.im + &other.im }
    }

    pub fn neg(&self) -> Self {
        ExactComplex { re: -&self.re, im: -&self.im }
    }

    /// `⟨u, v⟩ = Re(conj(u)·v)`.
    pub fn dot(&self, other: &Self) -> QuadScalar {
        &(&self.re * &other.re) + &(&self.im * &other.im)
    }

    pub fn norm_sqr(&self) -> QuadScalar {
        self.dot(self)
    }

    /// `Im(conj(u)·v)`.
    pub fn cross(&self, other: &Self) -> QuadScalar {
        &(&self.re * &other.im) - &(&self.im * &other.re)
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.re, self.im)
    }
}

impl FromStr for ExactComplex {
    type Err = Error;

    /// `"re,im"` with exact scalar components, or `"i"`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "i" {
            return Ok(ExactComplex::imag(QuadScalar::one()));
        }
        let (re, im) = t
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected \"re,im\" or \"i\", got {:?}", s)))?;
        let re: QuadScalar = re.parse()?;
        let im: QuadScalar = im.parse()?;
        if re.d != 1 && im.d != 1 && re.d != im.d {
            return Err(Error::Parse(format!("mixed quadratic fields in {:?}", s)));
        }
        Ok(ExactComplex { re, im })
    }
}
