//! Exact rationals and univariate rational functions over Q.
//!
//! `RatFunc` models the fraction field of the local ring of the affine line at
//! `t = 0`; the variable `t` plays the role of the uniformizer. Every value is
//! kept in a canonical form (monic denominator, coprime numerator and
//! denominator) so that structural equality is mathematical equality.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("polynomial degree {degree} exceeds the cap of {cap}")]
    DegreeCap { degree: usize, cap: usize },
}

/// Exact rational number in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(numer: i64, denom: i64) -> Rat {
        assert!(denom != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_int(n: i64) -> Rat {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }

    pub fn one() -> Rat {
        Rat(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn recip(&self) -> Result<Rat, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(Rat(self.0.recip()))
    }

    pub fn checked_div(&self, other: &Rat) -> Result<Rat, FieldError> {
        Ok(self * &other.recip()?)
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    /// `self * n` as an exact rational.
    pub fn scale(&self, n: i64) -> Rat {
        Rat(&self.0 * BigInt::from(n))
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    /// Approximate value, for display purposes only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl From<BigRational> for Rat {
    fn from(r: BigRational) -> Self {
        Rat(r)
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::from_int(n)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = |msg: &str| FieldError::Parse {
            pos: 0,
            msg: format!("{msg}: {s:?}"),
        };
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad("bad numerator"))?;
        let d: BigInt = d.parse().map_err(|_| bad("bad denominator"))?;
        if d.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(Rat(BigRational::new(n, d)))
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(n) => Ok(Rat::from_int(n)),
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

macro_rules! rat_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat($tr::$method(&self.0, &rhs.0))
            }
        }
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat($tr::$method(self.0, rhs.0))
            }
        }
    };
}

rat_binop!(Add, add);
rat_binop!(Sub, sub);
rat_binop!(Mul, mul);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl std::iter::Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |a, b| a + b)
    }
}

/// Order of vanishing at `t = 0`; `Infinite` is the valuation of zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "+inf"),
        }
    }
}

/// Dense polynomial over Q, coefficients stored from degree 0 upward with no
/// trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Poly {
        Poly::from_coeffs(vec![c])
    }

    /// `c * t^e`.
    pub fn monomial(c: BigRational, e: usize) -> Poly {
        let mut coeffs = vec![BigRational::zero(); e + 1];
        coeffs[e] = c;
        Poly::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Poly {
        Poly::from_coeffs(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    /// Index of the lowest nonzero coefficient.
    pub fn order_at_zero(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn eval_at_zero(&self) -> BigRational {
        self.coeffs.first().cloned().unwrap_or_else(BigRational::zero)
    }

    fn scale(&self, c: &BigRational) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some(lc) => self.scale(&lc.recip()),
            None => Poly::zero(),
        }
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("polynomial division by zero");
        let lc_inv = divisor.leading().unwrap().recip();
        let mut rem = self.coeffs.clone();
        let Some(sd) = self.degree() else {
            return (Poly::zero(), Poly::zero());
        };
        if sd < dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); sd - dd + 1];
        for i in (0..=sd - dd).rev() {
            let c = &rem[i + dd] * &lc_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= &c * dc;
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            // keep coefficients small between steps
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Drop the factor `t^e`; caller guarantees divisibility.
    fn shift_down(&self, e: usize) -> Poly {
        Poly::from_coeffs(self.coeffs[e.min(self.coeffs.len())..].to_vec())
    }

    fn write_terms(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if neg {
                f.write_str("-")?;
            } else if !first {
                f.write_str("+")?;
            }
            first = false;
            let a = c.abs();
            if e == 0 || !a.is_one() {
                if a.is_integer() {
                    write!(f, "{}", a.numer())?;
                } else {
                    write!(f, "{}/{}", a.numer(), a.denom())?;
                }
            }
            match e {
                0 => {}
                1 => f.write_str("t")?,
                _ => write!(f, "t^{e}")?,
            }
        }
        Ok(())
    }

    fn term_count(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = BigRational::zero();
        Poly::from_coeffs(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_terms(f)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

/// Element of Q(t) in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    /// Build `num / den`, reducing to canonical form.
    pub fn new(num: Poly, den: Poly) -> Result<RatFunc, FieldError> {
        if den.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFunc::zero());
        }
        if den.degree() == Some(0) {
            return Ok(RatFunc::from_coprime(num, den));
        }
        let g = Poly::gcd(&num, &den);
        if g.degree() == Some(0) {
            return Ok(RatFunc::from_coprime(num, den));
        }
        Ok(RatFunc::from_coprime(num.div_rem(&g).0, den.div_rem(&g).0))
    }

    /// Caller guarantees `gcd(num, den) = 1` and `den != 0`.
    fn from_coprime(num: Poly, den: Poly) -> RatFunc {
        if num.is_zero() {
            return RatFunc::zero();
        }
        let lc = den.leading().expect("nonzero denominator").recip();
        if lc.is_one() {
            return RatFunc { num, den };
        }
        RatFunc {
            num: num.scale(&lc),
            den: den.scale(&lc),
        }
    }

    pub fn zero() -> RatFunc {
        RatFunc {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> RatFunc {
        RatFunc {
            num: Poly::one(),
            den: Poly::one(),
        }
    }

    pub fn from_poly(p: Poly) -> RatFunc {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn constant(c: Rat) -> RatFunc {
        RatFunc::from_poly(Poly::constant(c.0))
    }

    pub fn from_int(n: i64) -> RatFunc {
        RatFunc::constant(Rat::from_int(n))
    }

    /// `t^e` for any integer `e`.
    pub fn t_pow(e: i64) -> RatFunc {
        let m = Poly::monomial(BigRational::one(), e.unsigned_abs() as usize);
        if e >= 0 {
            RatFunc::from_poly(m)
        } else {
            RatFunc {
                num: Poly::one(),
                den: m,
            }
        }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self == &RatFunc::one()
    }

    /// Order of vanishing at `t = 0` (negative for poles).
    pub fn val(&self) -> Valuation {
        match self.num.order_at_zero() {
            None => Valuation::Infinite,
            Some(a) => {
                let b = self.den.order_at_zero().expect("nonzero denominator");
                Valuation::Finite(a as i64 - b as i64)
            }
        }
    }

    /// Membership in the local ring at the origin.
    pub fn is_regular_at_origin(&self) -> bool {
        self.val() >= Valuation::Finite(0)
    }

    /// A unit of the local ring: regular with nonzero value at the origin.
    pub fn is_unit_at_origin(&self) -> bool {
        self.val() == Valuation::Finite(0)
    }

    /// Value at `t = 0`; `None` if `t = 0` is a pole.
    pub fn eval_at_zero(&self) -> Option<Rat> {
        if !self.is_regular_at_origin() {
            return None;
        }
        if self.is_zero() {
            return Some(Rat::zero());
        }
        let v = self.val().finite().unwrap() as usize;
        if v > 0 {
            return Some(Rat::zero());
        }
        Some(Rat(self.num.eval_at_zero() / self.den.eval_at_zero()))
    }

    /// Split a nonzero element as `unit * t^v`, returning `(unit, v)`.
    pub fn unit_part(&self) -> Option<(RatFunc, i64)> {
        let v = self.val().finite()?;
        let a = self.num.order_at_zero().unwrap();
        let b = self.den.order_at_zero().unwrap();
        let unit = RatFunc {
            num: self.num.shift_down(a),
            den: self.den.shift_down(b),
        };
        // still coprime and monic after removing the t-powers
        Some((unit, v))
    }

    pub fn inv(&self) -> Result<RatFunc, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, rhs: &RatFunc) -> Result<RatFunc, FieldError> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, e: u32) -> RatFunc {
        (0..e).fold(RatFunc::one(), |acc, _| &acc * self)
    }

    /// Largest numerator or denominator degree.
    pub fn max_degree(&self) -> usize {
        self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0))
    }

    /// Parse, rejecting inputs whose numerator or denominator degree exceeds `cap`.
    pub fn parse_capped(s: &str, cap: usize) -> Result<RatFunc, FieldError> {
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
            cap,
        };
        let f = p.ratfunc()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing input"));
        }
        Ok(f)
    }
}

impl Default for RatFunc {
    fn default() -> Self {
        RatFunc::zero()
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RatFunc::new(&self.num + &rhs.num, self.den.clone()).unwrap();
        }
        // Henrici: only factors of gcd(b, d) can survive in the sum
        let g = Poly::gcd(&self.den, &rhs.den);
        if g.degree() == Some(0) {
            let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
            return RatFunc::from_coprime(num, &self.den * &rhs.den);
        }
        let b = self.den.div_rem(&g).0;
        let d = rhs.den.div_rem(&g).0;
        let num = &(&self.num * &d) + &(&rhs.num * &b);
        let den = &b * &rhs.den;
        let h = Poly::gcd(&num, &g);
        if h.degree() == Some(0) || num.is_zero() {
            return RatFunc::from_coprime(num, den);
        }
        RatFunc::from_coprime(num.div_rem(&h).0, den.div_rem(&h).0)
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        let g1 = Poly::gcd(&self.num, &rhs.den);
        let g2 = Poly::gcd(&rhs.num, &self.den);
        let cut = |p: &Poly, g: &Poly| {
            if g.degree() == Some(0) {
                p.clone()
            } else {
                p.div_rem(g).0
            }
        };
        let num = &cut(&self.num, &g1) * &cut(&rhs.num, &g2);
        let den = &cut(&self.den, &g2) * &cut(&rhs.den, &g1);
        RatFunc::from_coprime(num, den)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

macro_rules! ratfunc_owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for RatFunc {
            type Output = RatFunc;
            fn $method(self, rhs: RatFunc) -> RatFunc {
                $tr::$method(&self, &rhs)
            }
        }
    };
}

ratfunc_owned_binop!(Add, add);
ratfunc_owned_binop!(Sub, sub);
ratfunc_owned_binop!(Mul, mul);

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap_num = self.num.term_count() > 1;
        if self.den.is_one_poly() {
            return self.num.write_terms(f);
        }
        if wrap_num {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        if self.den.term_count() > 1 {
            write!(f, "/({})", self.den)
        } else {
            write!(f, "/{}", self.den)
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({self})")
    }
}

impl Poly {
    fn is_one_poly(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }
}

impl FromStr for RatFunc {
    type Err = FieldError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RatFunc::parse_capped(s, usize::MAX)
    }
}

impl Serialize for RatFunc {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RatFunc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Recursive-descent parser for the rational-function grammar.
///
/// A `/` directly after an integer coefficient and followed by a digit belongs
/// to that coefficient (`1/2t` is `(1/2)·t`); any other `/` separates the
/// numerator from the denominator. Parentheses may group either side.
struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    cap: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> FieldError {
        FieldError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn ratfunc(&mut self) -> Result<RatFunc, FieldError> {
        let num = self.side()?;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let den = self.side()?;
            if den.is_zero() {
                return Err(FieldError::DivisionByZero);
            }
            return RatFunc::new(num, den);
        }
        Ok(RatFunc::from_poly(num))
    }

    fn side(&mut self) -> Result<Poly, FieldError> {
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let p = self.poly()?;
            if self.peek() != Some(b')') {
                return Err(self.err("expected ')'"));
            }
            self.pos += 1;
            Ok(p)
        } else {
            self.poly()
        }
    }

    fn poly(&mut self) -> Result<Poly, FieldError> {
        let mut acc = Poly::zero();
        let mut first = true;
        loop {
            let neg = match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                _ if first => false,
                _ => break,
            };
            first = false;
            let (c, e) = self.term()?;
            if e > self.cap {
                return Err(FieldError::DegreeCap {
                    degree: e,
                    cap: self.cap,
                });
            }
            let c = if neg { -c } else { c };
            acc = &acc + &Poly::monomial(c, e);
        }
        if let Some(d) = acc.degree() {
            if d > self.cap {
                return Err(FieldError::DegreeCap {
                    degree: d,
                    cap: self.cap,
                });
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<(BigRational, usize), FieldError> {
        let coeff = match self.peek() {
            Some(c) if c.is_ascii_digit() => Some(self.coeff()?),
            Some(b't') => None,
            _ => return Err(self.err("expected a term")),
        };
        if coeff.is_some() && self.peek() == Some(b'*') {
            self.pos += 1;
            if self.peek() != Some(b't') {
                return Err(self.err("expected 't' after '*'"));
            }
        }
        if self.peek() == Some(b't') {
            self.pos += 1;
            let mut e = 1;
            if self.peek() == Some(b'^') {
                self.pos += 1;
                self.skip_ws();
                e = self.nat()?;
            }
            Ok((coeff.unwrap_or_else(BigRational::one), e))
        } else {
            Ok((coeff.expect("digit checked above"), 0))
        }
    }

    fn digits(&mut self) -> Result<&str, FieldError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn nat(&mut self) -> Result<usize, FieldError> {
        let d = self.digits()?;
        d.parse::<usize>().map_err(|_| FieldError::DegreeCap {
            degree: usize::MAX,
            cap: self.cap,
        })
    }

    fn coeff(&mut self) -> Result<BigRational, FieldError> {
        let n: BigInt = self.digits()?.parse().unwrap();
        // a slash followed by a digit continues the coefficient
        let save = self.pos;
        if self.src.get(self.pos) == Some(&b'/') && self.src.get(self.pos + 1).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
            let d: BigInt = self.digits()?.parse().unwrap();
            if d.is_zero() {
                self.pos = save;
                return Err(FieldError::DivisionByZero);
            }
            return Ok(BigRational::new(n, d));
        }
        Ok(BigRational::from_integer(n))
    }
}

/// Greatest common divisor of two positive integers.
pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Least common multiple of two positive integers.
pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}
