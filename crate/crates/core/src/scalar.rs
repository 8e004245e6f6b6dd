//! Exact Gaussian-rational scalars `a + b·i` with `a, b ∈ ℚ`.
//!
//! Text form follows the grammar
//!
//! ```text
//! RAT    ::= ['-'] INT ['/' POSINT]
//! SCALAR ::= RAT | RAT ('+'|'-') RAT 'i' | RAT 'i' | 'i'
//! ```
//!
//! and [`GaussianRational`]'s `Display` always emits the canonical spelling, so
//! `parse(render(z)) == z` and `render(parse(render(z))) == render(z)`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use nalgebra::Complex;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// An element of `ℚ(i)`. Both parts are kept in lowest terms with positive
/// denominators (guaranteed by `BigRational`).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    re: BigRational,
    im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_int(re: i64) -> Self {
        Self::new(BigRational::from_integer(re.into()), BigRational::zero())
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self::new(
            BigRational::from_integer(re.into()),
            BigRational::from_integer(im.into()),
        )
    }

    /// `re_num/re_den + (im_num/im_den)·i`. Panics on a zero denominator.
    pub fn from_fractions(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        Self::new(
            BigRational::new(re_num.into(), re_den.into()),
            BigRational::new(im_num.into(), im_den.into()),
        )
    }

    pub fn i() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// `|z|²`, exact.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Self::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn to_complex(&self) -> Complex<f64> {
        Complex::new(ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }

    pub fn abs_f64(&self) -> f64 {
        self.to_complex().norm()
    }

    /// Exact square root in `ℚ(i)`, when one exists.
    ///
    /// For `z = p + qi`, a root `u + vi` needs `|z| = √(p² + q²) ∈ ℚ`,
    /// `u² = (p + |z|)/2` and `v² = (|z| − p)/2` with `2uv = q`.
    pub fn sqrt(&self) -> Option<Self> {
        let modulus = rational_sqrt(&self.norm_sqr())?;
        let two = BigRational::from_integer(2.into());
        let u = rational_sqrt(&((&self.re + &modulus) / &two))?;
        if u.is_zero() {
            // z is a non-positive real: z = -v².
            let v = rational_sqrt(&((&modulus - &self.re) / &two))?;
            return Some(Self::new(u, v));
        }
        let v = &self.im / (&two * &u);
        Some(Self::new(u, v))
    }
}

/// A fraction that is only reduced when converted back, so a sum of
/// products costs one gcd instead of one per term.
struct Unreduced {
    n: BigInt,
    d: BigInt,
}

impl Unreduced {
    fn of(r: &BigRational) -> Self {
        Self {
            n: r.numer().clone(),
            d: r.denom().clone(),
        }
    }

    fn zero() -> Self {
        Self {
            n: BigInt::zero(),
            d: BigInt::one(),
        }
    }

    /// `self += sign · a · b`.
    fn add_product(&mut self, a: &BigRational, b: &BigRational, negate: bool) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        let mut n = a.numer() * b.numer();
        if negate {
            n = -n;
        }
        let d = a.denom() * b.denom();
        if self.n.is_zero() {
            *self = Self { n, d };
        } else if self.d == d {
            self.n += n;
        } else {
            self.n = &self.n * &d + n * &self.d;
            self.d *= d;
        }
    }

    fn finish(self) -> BigRational {
        if self.d.is_one() {
            BigRational::from_integer(self.n)
        } else {
            BigRational::new(self.n, self.d)
        }
    }
}

impl GaussianRational {
    /// `Σ aₖ·bₖ`, reduced once at the end.
    pub fn dot(a: &[Self], b: &[Self]) -> Self {
        let mut re = Unreduced::zero();
        let mut im = Unreduced::zero();
        for (x, y) in a.iter().zip(b) {
            re.add_product(&x.re, &y.re, false);
            re.add_product(&x.im, &y.im, true);
            im.add_product(&x.re, &y.im, false);
            im.add_product(&x.im, &y.re, false);
        }
        Self::new(re.finish(), im.finish())
    }

    /// `self -= f·p`, reduced once.
    pub fn sub_mul(&mut self, f: &Self, p: &Self) {
        if f.is_zero() || p.is_zero() {
            return;
        }
        let mut re = Unreduced::of(&self.re);
        re.add_product(&f.re, &p.re, true);
        re.add_product(&f.im, &p.im, false);
        let mut im = Unreduced::of(&self.im);
        im.add_product(&f.re, &p.im, true);
        im.add_product(&f.im, &p.re, true);
        self.re = re.finish();
        self.im = im.finish();
    }
}

// `BigRational` reduces by gcd on every operation; zeros and integers
// (the common case for sampled operators) do not need it.
fn rmul(a: &BigRational, b: &BigRational) -> BigRational {
    let mut acc = Unreduced::zero();
    acc.add_product(a, b, false);
    acc.finish()
}

fn radd(a: &BigRational, b: &BigRational) -> BigRational {
    if b.is_zero() {
        a.clone()
    } else if a.is_zero() {
        b.clone()
    } else if a.is_integer() && b.is_integer() {
        BigRational::from_integer(a.numer() + b.numer())
    } else {
        a + b
    }
}

fn rsub(a: &BigRational, b: &BigRational) -> BigRational {
    if b.is_zero() {
        a.clone()
    } else if a.is_integer() && b.is_integer() {
        BigRational::from_integer(a.numer() - b.numer())
    } else {
        a - b
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Only reachable for values beyond f64 range.
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact rational square root of a non-negative rational, if it is a square.
fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = int_sqrt(r.numer())?;
    let d = int_sqrt(r.denom())?;
    Some(BigRational::new(n, d))
}

fn int_sqrt(n: &BigInt) -> Option<BigInt> {
    let s = n.sqrt();
    (&s * &s == *n).then_some(s)
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::from_int(1)
    }
}

impl From<i64> for GaussianRational {
    fn from(v: i64) -> Self {
        Self::from_int(v)
    }
}

impl From<BigRational> for GaussianRational {
    fn from(re: BigRational) -> Self {
        Self::new(re, BigRational::zero())
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &'a GaussianRational) -> GaussianRational {
        GaussianRational::new(radd(&self.re, &rhs.re), radd(&self.im, &rhs.im))
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &'a GaussianRational) -> GaussianRational {
        GaussianRational::new(rsub(&self.re, &rhs.re), rsub(&self.im, &rhs.im))
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &'a GaussianRational) -> GaussianRational {
        if rhs.is_real() {
            return GaussianRational::new(rmul(&self.re, &rhs.re), rmul(&self.im, &rhs.re));
        }
        if self.is_real() {
            return GaussianRational::new(rmul(&self.re, &rhs.re), rmul(&self.re, &rhs.im));
        }
        GaussianRational::dot(std::slice::from_ref(self), std::slice::from_ref(rhs))
    }
}

impl<'a> Div<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    /// Panics on division by zero, like integer division.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &'a GaussianRational) -> GaussianRational {
        let inv = rhs.inv().expect("division by zero Gaussian rational");
        self * &inv
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re, -self.im)
    }
}

macro_rules! forward_owned_binop {
    ($($trait:ident $method:ident),*) => {$(
        impl $trait<GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: &'a GaussianRational) -> GaussianRational {
                (&self).$method(rhs)
            }
        }
        impl<'a> $trait<GaussianRational> for &'a GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                self.$method(&rhs)
            }
        }
    )*};
}

forward_owned_binop!(Add add, Sub sub, Mul mul, Div div);

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re = radd(&self.re, &rhs.re);
        self.im = radd(&self.im, &rhs.im);
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        self.re = rsub(&self.re, &rhs.re);
        self.im = rsub(&self.im, &rhs.im);
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, rhs: &GaussianRational) {
        *self = &*self * rhs;
    }
}

impl std::iter::Sum for GaussianRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| acc + x)
    }
}

fn fmt_rat(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return fmt_rat(&self.re, f);
        }
        if self.re.is_zero() {
            if self.im.is_one() {
                return f.write_str("i");
            }
            fmt_rat(&self.im, f)?;
            return f.write_str("i");
        }
        fmt_rat(&self.re, f)?;
        f.write_str(if self.im.is_negative() { "-" } else { "+" })?;
        fmt_rat(&self.im.abs(), f)?;
        f.write_str("i")
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn scalar_err(text: &str, reason: &str) -> Error {
    Error::Scalar {
        text: text.to_string(),
        reason: reason.to_string(),
    }
}

fn parse_digits(s: &str, whole: &str) -> Result<BigInt, Error> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(scalar_err(whole, "expected decimal digits"));
    }
    s.parse::<BigInt>()
        .map_err(|_| scalar_err(whole, "expected decimal digits"))
}

/// `RAT ::= ['-'] INT ['/' POSINT]`
fn parse_rat(s: &str, whole: &str) -> Result<BigRational, Error> {
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (parse_digits(n, whole)?, parse_digits(d, whole)?),
        None => (parse_digits(body, whole)?, BigInt::one()),
    };
    if den.is_zero() {
        return Err(scalar_err(whole, "zero denominator"));
    }
    let num = if negative { -num } else { num };
    Ok(BigRational::new(num, den))
}

impl FromStr for GaussianRational {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self, Error> {
        let s = text.trim();
        if s.is_empty() {
            return Err(scalar_err(text, "empty scalar"));
        }
        if s == "i" {
            return Ok(Self::i());
        }
        let Some(body) = s.strip_suffix('i') else {
            return Ok(Self::from(parse_rat(s, text)?));
        };
        // Split `RAT (+|-) RAT` at the last sign that follows a digit.
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| matches!(bytes[k], b'+' | b'-') && bytes[k - 1].is_ascii_digit());
        match split {
            None => Ok(Self::new(BigRational::zero(), parse_rat(body, text)?)),
            Some(k) => {
                let re = parse_rat(&body[..k], text)?;
                let im = parse_rat(&body[k + 1..], text)?;
                let im = if bytes[k] == b'-' { -im } else { im };
                Ok(Self::new(re, im))
            }
        }
    }
}

impl Serialize for GaussianRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gr(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    #[test]
    fn grammar_examples() {
        assert_eq!(gr("3"), GaussianRational::from_int(3));
        assert_eq!(gr("-1/2"), GaussianRational::from_fractions(-1, 2, 0, 1));
        assert_eq!(gr("2/3-5i"), GaussianRational::from_fractions(2, 3, -5, 1));
        assert_eq!(gr("i"), GaussianRational::i());
        assert_eq!(gr("-7/3i"), GaussianRational::from_fractions(0, 1, -7, 3));
        assert_eq!(gr("1/2+3/4i"), GaussianRational::from_fractions(1, 2, 3, 4));
        assert_eq!(gr("4/6"), GaussianRational::from_fractions(2, 3, 0, 1));
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "1/0", "a", "1/-2", "+3", "1+i", "--1", "1/2/3", "3ii", "-i", "1.5"] {
            assert!(bad.parse::<GaussianRational>().is_err(), "{bad:?} parsed");
        }
    }

    #[test]
    fn canonical_rendering() {
        assert_eq!(gr("2/3-5i").to_string(), "2/3-5i");
        assert_eq!(gr("-1i").to_string(), "-1i");
        assert_eq!(gr("0+1i").to_string(), "i");
        assert_eq!(gr("6/4+0i").to_string(), "3/2");
        assert_eq!(gr("-0").to_string(), "0");
    }

    #[test]
    fn field_inverse() {
        let z = gr("2/3-5i");
        assert_eq!(&z * &z.inv().unwrap(), GaussianRational::one());
        assert!(GaussianRational::zero().inv().is_none());
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(gr("-4").sqrt(), Some(gr("2i")));
        assert_eq!(gr("2i").sqrt(), Some(gr("1+1i")));
        assert_eq!(gr("9/4").sqrt(), Some(gr("3/2")));
        assert_eq!(gr("-5+12i").sqrt().map(|w| &w * &w), Some(gr("-5+12i")));
        assert_eq!(gr("2").sqrt(), None);
        assert_eq!(gr("1+1i").sqrt(), None);
    }
}
