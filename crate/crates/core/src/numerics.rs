//! Arbitrary-precision real and complex scaffolding.
//!
//! Everything downstream works over [`BigReal`] (a thin wrapper around an
//! MPFR float) and [`BigComplex`] (a pair of reals; the base field
//! `Q(sqrt(-3))` embeds with `tau = (-1 + i sqrt(3))/2`).  Precision is
//! carried per value in bits; binary operations widen to the larger operand
//! precision, so a computation started from `constants(P)` stays at the
//! working precision everywhere.
//!
//! Summation of long series is done by [`deterministic_sum`], a fixed
//! balanced-tree reduction: the result is a pure function of the input
//! sequence, bit-for-bit, independent of thread count or chunking upstream.

use rug::ops::{CompleteRound, Pow};
use rug::{Float, Integer, Rational};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

const LOG2_10: f64 = 3.321928094887362;

/// Bits of mantissa needed for `digits` decimal digits, plus guard room.
pub fn digits_to_bits(digits: u32) -> u32 {
    (digits as f64 * LOG2_10).ceil() as u32 + 32
}

/// Decimal digits faithfully representable at `bits` of mantissa.
pub fn bits_to_digits(bits: u32) -> u32 {
    (bits as f64 / LOG2_10).ceil() as u32 + 2
}

/// Arbitrary-precision real number.
#[derive(Clone, Debug, PartialEq)]
pub struct BigReal(Float);

impl BigReal {
    /// Wraps a raw float.
    pub fn from_float(f: Float) -> Self {
        BigReal(f)
    }

    /// Zero at the given precision in bits.
    pub fn zero(prec: u32) -> Self {
        BigReal(Float::new(prec))
    }

    /// Converts a small integer.
    pub fn from_i64(v: i64, prec: u32) -> Self {
        BigReal(Float::with_val(prec, v))
    }

    /// Converts a wide integer exactly (then rounds to `prec`).
    pub fn from_i128(v: i128, prec: u32) -> Self {
        BigReal(Float::with_val(prec, Integer::from(v)))
    }

    /// Converts a hardware float.
    pub fn from_f64(v: f64, prec: u32) -> Self {
        BigReal(Float::with_val(prec, v))
    }

    /// Rounds an exact rational to `prec` bits.
    pub fn from_rational(r: &Rational, prec: u32) -> Self {
        BigReal(Float::with_val(prec, r))
    }

    /// `10^k` at the given precision; `k` may be negative.
    pub fn pow10(k: i64, prec: u32) -> Self {
        let ten = Integer::from(10).pow(k.unsigned_abs() as u32);
        let f = Float::with_val(prec, ten);
        if k < 0 {
            BigReal(f.recip())
        } else {
            BigReal(f)
        }
    }

    /// `pi` at the given precision.
    pub fn pi(prec: u32) -> Self {
        use rug::float::Constant;
        BigReal(Float::with_val(prec, Constant::Pi))
    }

    /// Precision of the mantissa in bits.
    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    /// Borrow the underlying float.
    pub fn as_float(&self) -> &Float {
        &self.0
    }

    /// Nearest hardware float.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// Absolute value.
    pub fn abs(&self) -> Self {
        BigReal(self.0.clone().abs())
    }

    /// Square root.
    pub fn sqrt(&self) -> Self {
        BigReal(self.0.clone().sqrt())
    }

    /// Cube root.
    pub fn cbrt(&self) -> Self {
        BigReal(self.0.clone().cbrt())
    }

    /// `k`-th root.
    pub fn root(&self, k: u32) -> Self {
        BigReal(self.0.clone().root(k))
    }

    /// Multiplicative inverse.
    pub fn recip(&self) -> Self {
        BigReal(self.0.clone().recip())
    }

    /// Square.
    pub fn square(&self) -> Self {
        BigReal(self.0.clone().square())
    }

    /// Exponential.
    pub fn exp(&self) -> Self {
        BigReal(self.0.clone().exp())
    }

    /// `sqrt(self^2 + other^2)` without intermediate overflow.
    pub fn hypot(&self, other: &BigReal) -> Self {
        BigReal(self.0.clone().hypot(&other.0))
    }

    /// Nearest integer, ties away from zero, as a wide integer.
    pub fn round_to_i128(&self) -> Option<i128> {
        self.0.clone().round().to_integer().and_then(|z| z.to_i128())
    }

    /// True for an exact zero.
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// True for a finite value (neither infinity nor NaN).
    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    /// Decimal string in scientific form with `digits` mantissa digits.
    pub fn to_decimal(&self, digits: u32) -> String {
        format!("{:.*e}", digits as usize, self.0)
    }

    /// Decimal string carrying the full precision of the value.
    pub fn to_decimal_full(&self) -> String {
        self.to_decimal(bits_to_digits(self.prec()))
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl Serialize for BigReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_decimal_full())
    }
}

fn join(a: &BigReal, b: &BigReal) -> u32 {
    a.prec().max(b.prec())
}

macro_rules! real_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                BigReal(Float::with_val(join(self, rhs), &self.0 $op &rhs.0))
            }
        }
    };
}

real_binop!(Add, add, +);
real_binop!(Sub, sub, -);
real_binop!(Mul, mul, *);
real_binop!(Div, div, /);

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal((-&self.0).complete(self.prec()))
    }
}

/// Arbitrary-precision complex number as an explicit real/imaginary pair.
#[derive(Clone, Debug, PartialEq)]
pub struct BigComplex {
    /// Real part.
    pub re: BigReal,
    /// Imaginary part.
    pub im: BigReal,
}

impl BigComplex {
    /// Builds from parts.
    pub fn new(re: BigReal, im: BigReal) -> Self {
        BigComplex { re, im }
    }

    /// Zero at the given precision.
    pub fn zero(prec: u32) -> Self {
        BigComplex::new(BigReal::zero(prec), BigReal::zero(prec))
    }

    /// Embeds a real value.
    pub fn from_real(re: BigReal) -> Self {
        let prec = re.prec();
        BigComplex::new(re, BigReal::zero(prec))
    }

    /// The imaginary unit.
    pub fn i(prec: u32) -> Self {
        BigComplex::new(BigReal::zero(prec), BigReal::from_i64(1, prec))
    }

    /// Larger of the two component precisions.
    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        BigComplex::new(self.re.clone(), -&self.im)
    }

    /// `re^2 + im^2`.
    pub fn norm2(&self) -> BigReal {
        &self.re.square() + &self.im.square()
    }

    /// Modulus.
    pub fn abs(&self) -> BigReal {
        self.re.hypot(&self.im)
    }

    /// Multiplies by a real scalar.
    pub fn scale(&self, s: &BigReal) -> Self {
        BigComplex::new(&self.re * s, &self.im * s)
    }

    /// Divides by a real scalar.
    pub fn unscale(&self, s: &BigReal) -> Self {
        BigComplex::new(&self.re / s, &self.im / s)
    }

    /// Multiplicative inverse via the conjugate.
    pub fn recip(&self) -> Self {
        let n = self.norm2();
        BigComplex::new(&self.re / &n, &(-&self.im) / &n)
    }

    /// Multiplies by `i`.
    pub fn mul_i(&self) -> Self {
        BigComplex::new(-&self.im, self.re.clone())
    }

    /// True when both parts are exactly zero.
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// True when both parts are finite.
    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// `(re, im)` as decimal strings carrying full precision.
    pub fn to_decimal_full(&self) -> (String, String) {
        (self.re.to_decimal_full(), self.im.to_decimal_full())
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (sign, im_abs) = if self.im.0.is_sign_negative() {
            ('-', self.im.abs())
        } else {
            ('+', self.im.clone())
        };
        if let Some(p) = f.precision() {
            write!(f, "{:.*} {sign} {:.*}i", p, self.re.0, p, im_abs.0)
        } else {
            write!(f, "{} {sign} {}i", self.re.0, im_abs.0)
        }
    }
}

impl Serialize for BigComplex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("BigComplex", 2)?;
        st.serialize_field("re", &self.re)?;
        st.serialize_field("im", &self.im)?;
        st.end()
    }
}

impl Add<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn add(self, rhs: &BigComplex) -> BigComplex {
        BigComplex::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn sub(self, rhs: &BigComplex) -> BigComplex {
        BigComplex::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: &BigComplex) -> BigComplex {
        let re = &(&self.re * &rhs.re) - &(&self.im * &rhs.im);
        let im = &(&self.re * &rhs.im) + &(&self.im * &rhs.re);
        BigComplex::new(re, im)
    }
}

impl Div<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn div(self, rhs: &BigComplex) -> BigComplex {
        let n = rhs.norm2();
        let re = &(&(&self.re * &rhs.re) + &(&self.im * &rhs.im)) / &n;
        let im = &(&(&self.im * &rhs.re) - &(&self.re * &rhs.im)) / &n;
        BigComplex::new(re, im)
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex::new(-&self.re, -&self.im)
    }
}

/// Frequently used constants, all at one precision.
#[derive(Clone, Debug)]
pub struct ConstantSet {
    /// Working precision in bits.
    pub prec: u32,
    /// `pi`.
    pub pi: BigReal,
    /// `sqrt(3)`.
    pub sqrt3: BigReal,
    /// `2^(1/3)`.
    pub cbrt2: BigReal,
    /// `4^(1/3)`.
    pub cbrt4: BigReal,
    /// `tau = (-1 + i sqrt(3))/2`, a primitive cube root of unity.
    pub tau: BigComplex,
    /// `sqrt(-3) = 1 + 2 tau = i sqrt(3)`.
    pub sqrt_m3: BigComplex,
    /// The imaginary unit.
    pub i: BigComplex,
}

/// Builds the constant set for `digits` decimal digits of working precision.
pub fn constants(digits: u32) -> ConstantSet {
    let prec = digits_to_bits(digits);
    let pi = BigReal::pi(prec);
    let sqrt3 = BigReal::from_i64(3, prec).sqrt();
    let cbrt2 = BigReal::from_i64(2, prec).cbrt();
    let cbrt4 = BigReal::from_i64(4, prec).cbrt();
    let half = BigReal::from_rational(&Rational::from((1, 2)), prec);
    let tau = BigComplex::new(-&half, &sqrt3 * &half);
    let sqrt_m3 = BigComplex::new(BigReal::zero(prec), sqrt3.clone());
    let i = BigComplex::i(prec);
    ConstantSet {
        prec,
        pi,
        sqrt3,
        cbrt2,
        cbrt4,
        tau,
        sqrt_m3,
        i,
    }
}

/// Sums complex terms with a fixed balanced-tree reduction order.
///
/// The tree shape depends only on the term count: each node splits its slice
/// at the midpoint.  The result is therefore bit-identical for a given input
/// sequence regardless of how the terms were produced (serially or by any
/// number of workers), and an input of the form `{x, -x}` cancels exactly.
pub fn deterministic_sum(terms: &[BigComplex], prec: u32) -> BigComplex {
    fn go(terms: &[BigComplex]) -> BigComplex {
        match terms.len() {
            0 => unreachable!("empty slice handled by caller"),
            1 => terms[0].clone(),
            n => {
                let (lo, hi) = terms.split_at(n / 2);
                &go(lo) + &go(hi)
            }
        }
    }
    if terms.is_empty() {
        return BigComplex::zero(prec);
    }
    go(terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_relations_hold() {
        let c = constants(60);
        let tol = BigReal::pow10(-55, c.prec);
        let r3 = &c.sqrt3.square() - &BigReal::from_i64(3, c.prec);
        assert!(r3.abs() < tol);
        let r2 = &(&c.cbrt2.square() * &c.cbrt2) - &BigReal::from_i64(2, c.prec);
        assert!(r2.abs() < tol);
        let r4 = &(&c.cbrt4 * &c.cbrt4.square()) - &BigReal::from_i64(4, c.prec);
        assert!(r4.abs() < tol);
        // cbrt4 = cbrt2^2
        let r24 = &c.cbrt4 - &c.cbrt2.square();
        assert!(r24.abs() < tol);
        // tau^2 + tau + 1 = 0
        let one = BigComplex::from_real(BigReal::from_i64(1, c.prec));
        let t2 = &(&c.tau * &c.tau) + &(&c.tau + &one);
        assert!(t2.abs() < tol);
        // (1 + 2 tau)^2 = -3
        let two = BigComplex::from_real(BigReal::from_i64(2, c.prec));
        let s = &one + &(&two * &c.tau);
        let r = &(&s * &s) + &BigComplex::from_real(BigReal::from_i64(3, c.prec));
        assert!(r.abs() < tol);
        assert!((&s - &c.sqrt_m3).abs() < tol);
    }

    #[test]
    fn pi_matches_reference_digits() {
        let c = constants(40);
        // to_decimal counts significant digits: "3." plus 35 more.
        let s = c.pi.to_decimal(36);
        assert!(s.starts_with("3.14159265358979323846264338327950288"));
    }

    #[test]
    fn complex_division_inverts_multiplication() {
        let prec = digits_to_bits(50);
        let a = BigComplex::new(BigReal::from_f64(1.5, prec), BigReal::from_f64(-2.25, prec));
        let b = BigComplex::new(BigReal::from_f64(0.375, prec), BigReal::from_f64(7.125, prec));
        let q = &(&a * &b) / &b;
        let tol = BigReal::pow10(-45, prec);
        assert!((&q - &a).abs() < tol);
        let r = &b.recip() * &b;
        let one = BigComplex::from_real(BigReal::from_i64(1, prec));
        assert!((&r - &one).abs() < tol);
    }

    #[test]
    fn deterministic_sum_cancels_exact_pairs() {
        let prec = digits_to_bits(30);
        let x = BigComplex::new(BigReal::from_f64(0.1234, prec), BigReal::from_f64(-9.75, prec));
        let s = deterministic_sum(&[x.clone(), (-&x).clone()], prec);
        assert!(s.re.is_zero());
        assert!(s.im.is_zero());
        let empty: Vec<BigComplex> = Vec::new();
        assert!(deterministic_sum(&empty, prec).is_zero());
    }

    #[test]
    fn deterministic_sum_is_bit_stable() {
        let prec = digits_to_bits(30);
        let terms: Vec<BigComplex> = (0..101)
            .map(|k| {
                BigComplex::new(
                    BigReal::from_f64((k as f64).sin(), prec),
                    BigReal::from_f64((k as f64).cos(), prec),
                )
            })
            .collect();
        let a = deterministic_sum(&terms, prec);
        let b = deterministic_sum(&terms, prec);
        assert_eq!(a.to_decimal_full(), b.to_decimal_full());
    }

    #[test]
    fn decimal_serialization_round_trips() {
        let prec = digits_to_bits(45);
        let x = BigReal::pi(prec);
        let s = x.to_decimal_full();
        let back = BigReal::from_float(rug::Float::with_val(
            prec,
            rug::Float::parse(&s).expect("parse"),
        ));
        assert!((&x - &back).abs() < BigReal::pow10(-44, prec));
    }
}
