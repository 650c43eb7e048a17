//! Exact arithmetic in ℚ and in real quadratic fields ℚ(√d).
//!
//! A [`QuadNum`] is `a + b·√d` with rational `a`, `b` and squarefree `d`.
//! Rational values are always stored with `b = 0` and `d = 1`, so derived
//! equality is value equality. Two numbers interoperate when their radicands
//! agree or when one of them is rational; anything else is a
//! [`QfieldError::RadicandMismatch`].
//!
//! The operator impls (`+`, `-`, `*`, `/`) panic on a radicand mismatch or a
//! zero divisor. Use the `checked_*` methods when the operands come from
//! untrusted input.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::numtheory::squarefree_decompose;

pub use crate::numtheory::is_squarefree;

/// Arbitrary-precision fraction, always stored reduced with a positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QfieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("radicand mismatch: sqrt({0}) and sqrt({1}) cannot be mixed")]
    RadicandMismatch(u64, u64),
    #[error("cannot parse quadratic number {0:?}")]
    Parse(String),
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rational_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Element `a + b·√d` of ℚ(√d).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadNum {
    a: Rational,
    b: Rational,
    d: u64,
}

impl QuadNum {
    /// Builds `a + b·√n` for any `n ≥ 0`, pulling square factors of `n` into `b`.
    pub fn new(a: Rational, b: Rational, n: u64) -> Self {
        let (s, m) = squarefree_decompose(n);
        let b = b * Rational::from_integer(BigInt::from(s));
        if m == 1 {
            return Self::rational(a + b);
        }
        Self::canonical(a, b, m)
    }

    fn canonical(a: Rational, b: Rational, d: u64) -> Self {
        if b.is_zero() || d <= 1 {
            let a = if d == 1 { a + b } else { a };
            Self { a, b: Rational::zero(), d: 1 }
        } else {
            Self { a, b, d }
        }
    }

    pub fn rational(a: Rational) -> Self {
        Self { a, b: Rational::zero(), d: 1 }
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(rational_int(n))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::rational(rational(num, den))
    }

    /// `√n`, reduced to `s·√m`.
    pub fn sqrt_of(n: u64) -> Self {
        Self::new(Rational::zero(), Rational::one(), n)
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn radical_part(&self) -> &Rational {
        &self.b
    }

    /// The squarefree radicand; `1` for rational values.
    pub fn radicand(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    pub fn conjugate(&self) -> Self {
        Self { a: self.a.clone(), b: -self.b.clone(), d: self.d }
    }

    /// Field norm `a² − b²d`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * radicand_rational(self.d)
    }

    /// The radicand shared by `self` and `other`, if they can be combined.
    pub fn common_radicand(&self, other: &Self) -> Result<u64, QfieldError> {
        match (self.d, other.d) {
            (1, d) | (d, 1) => Ok(d),
            (d, e) if d == e => Ok(d),
            (d, e) => Err(QfieldError::RadicandMismatch(d, e)),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, QfieldError> {
        let d = self.common_radicand(other)?;
        Ok(Self::canonical(&self.a + &other.a, &self.b + &other.b, d))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, QfieldError> {
        let d = self.common_radicand(other)?;
        Ok(Self::canonical(&self.a - &other.a, &self.b - &other.b, d))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, QfieldError> {
        let d = self.common_radicand(other)?;
        let rd = radicand_rational(d);
        let a = &self.a * &other.a + &self.b * &other.b * rd;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Self::canonical(a, b, d))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, QfieldError> {
        let d = self.common_radicand(other)?;
        if other.is_zero() {
            return Err(QfieldError::DivisionByZero);
        }
        if other.is_rational() {
            return Ok(Self::canonical(&self.a / &other.a, &self.b / &other.a, d));
        }
        // u / w = u·w̄ / N(w); the norm is nonzero because √d is irrational
        let norm = other.norm();
        let num = self.checked_mul(&other.conjugate())?;
        Ok(Self::canonical(num.a / &norm, num.b / norm, d))
    }

    pub fn recip(&self) -> Result<Self, QfieldError> {
        Self::one().checked_div(self)
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// Exact sign of `a + b√d`, decided by comparing `a²` with `b²d` when
    /// the two terms have opposite signs.
    pub fn signum(&self) -> Ordering {
        let zero = Rational::zero();
        let sa = self.a.cmp(&zero);
        let sb = self.b.cmp(&zero);
        match (sa, sb) {
            (s, Ordering::Equal) | (Ordering::Equal, s) => s,
            (s, t) if s == t => s,
            _ => {
                let a2 = &self.a * &self.a;
                let b2d = &self.b * &self.b * radicand_rational(self.d);
                match a2.cmp(&b2d) {
                    Ordering::Greater => sa,
                    Ordering::Less => sb,
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    /// Exact comparison; fails only on incompatible radicands.
    pub fn try_cmp(&self, other: &Self) -> Result<Ordering, QfieldError> {
        Ok(self.checked_sub(other)?.signum())
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self
        } else {
            self.clone()
        }
    }

    /// Correctly rounded `f64` value.
    ///
    /// √d is bracketed by `[r, r+1]·2⁻ᵖ`; the precision doubles until both
    /// ends of the resulting interval round to the same double.
    pub fn to_f64(&self) -> f64 {
        if self.is_rational() {
            return self.a.to_f64().unwrap_or(f64::NAN);
        }
        let mut bits = 64usize;
        loop {
            let root = (BigInt::from(self.d) << (2 * bits)).sqrt();
            let scale = BigInt::one() << bits;
            let low = Rational::new(root.clone(), scale.clone());
            let high = Rational::new(root + 1, scale);
            let (lo, hi) = if self.b.is_positive() {
                (&self.a + &self.b * low, &self.a + &self.b * high)
            } else {
                (&self.a + &self.b * high, &self.a + &self.b * low)
            };
            let (flo, fhi) = (lo.to_f64().unwrap_or(f64::NAN), hi.to_f64().unwrap_or(f64::NAN));
            if flo == fhi || bits >= 8192 {
                return flo;
            }
            bits *= 2;
        }
    }
}

fn radicand_rational(d: u64) -> Rational {
    Rational::from_integer(BigInt::from(d))
}

impl PartialOrd for QuadNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.try_cmp(other).ok()
    }
}

impl From<i64> for QuadNum {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<Rational> for QuadNum {
    fn from(r: Rational) -> Self {
        Self::rational(r)
    }
}

impl From<BigInt> for QuadNum {
    fn from(n: BigInt) -> Self {
        Self::rational(Rational::from_integer(n))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&QuadNum> for &QuadNum {
            type Output = QuadNum;
            fn $method(self, rhs: &QuadNum) -> QuadNum {
                match self.$checked(rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("{e}"),
                }
            }
        }
        impl $trait<QuadNum> for QuadNum {
            type Output = QuadNum;
            fn $method(self, rhs: QuadNum) -> QuadNum {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&QuadNum> for QuadNum {
            type Output = QuadNum;
            fn $method(self, rhs: &QuadNum) -> QuadNum {
                (&self).$method(rhs)
            }
        }
        impl $trait<QuadNum> for &QuadNum {
            type Output = QuadNum;
            fn $method(self, rhs: QuadNum) -> QuadNum {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Neg for &QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        QuadNum { a: -self.a.clone(), b: -self.b.clone(), d: self.d }
    }
}

impl Neg for QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        QuadNum { a: -self.a, b: -self.b, d: self.d }
    }
}

fn fmt_rational(r: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{}/{}", r.numer(), r.denom())
}

/// Canonical text: `p/q` for rationals, `p/q + r/s*sqrt(d)` otherwise.
impl fmt::Display for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_rational(&self.a, f)?;
        if !self.is_rational() {
            f.write_str(" + ")?;
            fmt_rational(&self.b, f)?;
            write!(f, "*sqrt({})", self.d)?;
        }
        Ok(())
    }
}

impl FromStr for QuadNum {
    type Err = QfieldError;

    /// Parses the canonical text. Whitespace is ignored, integers may omit
    /// `/q`, and the radicand need not be squarefree.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || QfieldError::Parse(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let parse_rational = |t: &str| t.parse::<Rational>().map_err(|_| err());
        match compact.find("*sqrt(") {
            None => Ok(Self::rational(parse_rational(&compact)?)),
            Some(star) => {
                let radical = compact[star + "*sqrt(".len()..].strip_suffix(')').ok_or_else(err)?;
                let n: u64 = radical.parse().map_err(|_| err())?;
                let head = &compact[..star];
                // the separating '+' is the first one past a possible leading sign
                let split = head.char_indices().skip(1).find(|&(_, c)| c == '+').map(|(i, _)| i).ok_or_else(err)?;
                let a = parse_rational(&head[..split])?;
                let b = parse_rational(&head[split + 1..])?;
                Ok(Self::new(a, b, n))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: (i64, i64), b: (i64, i64), d: u64) -> QuadNum {
        QuadNum::new(rational(a.0, a.1), rational(b.0, b.1), d)
    }

    #[test]
    fn conjugates_cancel() {
        let u = q((1, 1), (1, 1), 2);
        let v = q((2, 1), (-1, 1), 2);
        let sum = &u + &v;
        assert_eq!(sum, QuadNum::from_int(3));
        assert_eq!(sum.radicand(), 1);
    }

    #[test]
    fn square_of_mersenne_level() {
        let y = q((-2, 1), (1, 1), 2);
        assert_eq!(&y * &y, q((6, 1), (-4, 1), 2));
    }

    #[test]
    fn rationalized_division() {
        let r = QuadNum::one() / QuadNum::sqrt_of(2);
        assert_eq!(r, q((0, 1), (1, 2), 2));
    }

    #[test]
    fn division_by_zero_and_mismatch() {
        assert_eq!(QuadNum::one().checked_div(&QuadNum::zero()), Err(QfieldError::DivisionByZero));
        let e = QuadNum::sqrt_of(2).checked_add(&QuadNum::sqrt_of(3));
        assert_eq!(e, Err(QfieldError::RadicandMismatch(2, 3)));
        // rational values mix with anything
        assert!(QuadNum::from_int(5).checked_mul(&QuadNum::sqrt_of(3)).is_ok());
    }

    #[test]
    fn non_squarefree_radicands_reduce() {
        assert_eq!(QuadNum::sqrt_of(8), q((0, 1), (2, 1), 2));
        assert_eq!(QuadNum::sqrt_of(4), QuadNum::from_int(2));
        assert_eq!(QuadNum::sqrt_of(4).radicand(), 1);
    }

    #[test]
    fn exact_comparisons() {
        let y = q((-2, 1), (1, 1), 2);
        assert_eq!(y.try_cmp(&QuadNum::zero()), Ok(Ordering::Less));
        // (2 − √2)² = 6 − 4√2 < 1  ⇔  25 < 32
        assert_eq!(y.abs().try_cmp(&QuadNum::one()), Ok(Ordering::Less));
        assert_eq!(QuadNum::from_int(3).try_cmp(&QuadNum::from_int(3)), Ok(Ordering::Equal));
        assert!(q((3, 2), (-1, 1), 2) > QuadNum::zero());
        assert!(q((-3, 2), (1, 1), 2) < QuadNum::zero());
        assert_eq!(QuadNum::sqrt_of(2).partial_cmp(&QuadNum::sqrt_of(3)), None);
    }

    #[test]
    fn float_rendering() {
        let omega = q((22, 1), (-12, 1), 2);
        assert!((omega.to_f64() - 5.029_437_251_522_859).abs() < 1e-15);
        assert!((omega.to_f64() - 5.0294).abs() < 1e-4);
        assert_eq!(QuadNum::from_ratio(10, 3).to_f64(), 10.0 / 3.0);
        assert_eq!(QuadNum::zero().to_f64(), 0.0);
        assert_eq!(QuadNum::sqrt_of(2).to_f64(), std::f64::consts::SQRT_2);
    }

    #[test]
    fn float_survives_cancellation() {
        // 99/70 − √2 ≈ 7.2e−5; naive float subtraction loses most digits
        let u = q((99, 70), (-1, 1), 2);
        let expected = 1.0 / (70.0 * (99.0 + 70.0 * std::f64::consts::SQRT_2));
        assert!((u.to_f64() - expected).abs() <= expected * 1e-15);
    }

    #[test]
    fn canonical_text() {
        let y = q((-2, 1), (1, 1), 2);
        assert_eq!(y.to_string(), "-2/1 + 1/1*sqrt(2)");
        assert_eq!(q((22, 1), (-12, 1), 2).to_string(), "22/1 + -12/1*sqrt(2)");
        assert_eq!(QuadNum::from_ratio(10, 3).to_string(), "10/3");
        assert_eq!("-2/1 + 1/1*sqrt(2)".parse::<QuadNum>(), Ok(y));
        assert_eq!("7".parse::<QuadNum>(), Ok(QuadNum::from_int(7)));
        assert_eq!("0/1 + 1/1*sqrt(8)".parse::<QuadNum>(), Ok(q((0, 1), (2, 1), 2)));
        assert!("1/0".parse::<QuadNum>().is_err());
        assert!("sqrt(2)".parse::<QuadNum>().is_err());
        assert!("1 + 2*sqrt(x)".parse::<QuadNum>().is_err());
    }

    #[test]
    fn powers() {
        let y = q((-2, 1), (1, 1), 2);
        assert_eq!(y.pow(0), QuadNum::one());
        assert_eq!(y.pow(3), &(&y * &y) * &y);
    }
}
