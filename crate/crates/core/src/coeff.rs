//! Exact Gaussian rationals, the coefficient field of every series.
//!
//! A [`Coefficient`] is `re + i·im` with both parts arbitrary precision
//! rationals. Real inputs take a fast path in multiplication.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::Error;

/// An element of ℚ(i), stored as two reduced rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coefficient {
    re: BigRational,
    im: BigRational,
}

impl Coefficient {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Coefficient { re, im }
    }

    pub fn zero() -> Self {
        Coefficient { re: BigRational::zero(), im: BigRational::zero() }
    }

    pub fn one() -> Self {
        Coefficient { re: BigRational::one(), im: BigRational::zero() }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Coefficient { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Coefficient { re: BigRational::from_integer(BigInt::from(n)), im: BigRational::zero() }
    }

    pub fn from_frac(p: i64, q: i64) -> Self {
        Coefficient { re: BigRational::new(BigInt::from(p), BigInt::from(q)), im: BigRational::zero() }
    }

    pub fn from_rational(r: BigRational) -> Self {
        Coefficient { re: r, im: BigRational::zero() }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Coefficient { re: self.re.clone(), im: -self.im.clone() }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.im.is_zero() {
            return Some(Coefficient { re: self.re.recip(), im: BigRational::zero() });
        }
        let n = &self.re * &self.re + &self.im * &self.im;
        Some(Coefficient { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Coefficient::zero();
        }
        Coefficient { re: &self.re * r, im: &self.im * r }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }

    /// True when both parts are integers.
    pub fn is_gaussian_integer(&self) -> bool {
        self.re.is_integer() && self.im.is_integer()
    }
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Very large numerators or denominators: shift both down first.
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = (nb.max(db) - 1000).max(0) as usize;
    let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
    n / d
}

/// Parse `"p/q"` or `"p"` into a rational.
pub fn parse_rational(s: &str) -> Result<BigRational, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational '{s}'"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl From<i64> for Coefficient {
    fn from(n: i64) -> Self {
        Coefficient::from_int(n)
    }
}

impl From<BigRational> for Coefficient {
    fn from(r: BigRational) -> Self {
        Coefficient::from_rational(r)
    }
}

impl Add<&Coefficient> for &Coefficient {
    type Output = Coefficient;
    fn add(self, o: &Coefficient) -> Coefficient {
        Coefficient { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Add for Coefficient {
    type Output = Coefficient;
    fn add(self, o: Coefficient) -> Coefficient {
        Coefficient { re: self.re + o.re, im: self.im + o.im }
    }
}

impl AddAssign<&Coefficient> for Coefficient {
    fn add_assign(&mut self, o: &Coefficient) {
        self.re += &o.re;
        if !o.im.is_zero() {
            self.im += &o.im;
        }
    }
}

impl AddAssign for Coefficient {
    fn add_assign(&mut self, o: Coefficient) {
        *self += &o;
    }
}

impl Sub<&Coefficient> for &Coefficient {
    type Output = Coefficient;
    fn sub(self, o: &Coefficient) -> Coefficient {
        Coefficient { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Sub for Coefficient {
    type Output = Coefficient;
    fn sub(self, o: Coefficient) -> Coefficient {
        Coefficient { re: self.re - o.re, im: self.im - o.im }
    }
}

impl SubAssign<&Coefficient> for Coefficient {
    fn sub_assign(&mut self, o: &Coefficient) {
        self.re -= &o.re;
        if !o.im.is_zero() {
            self.im -= &o.im;
        }
    }
}

impl Neg for Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        Coefficient { re: -self.re, im: -self.im }
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        Coefficient { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl Mul<&Coefficient> for &Coefficient {
    type Output = Coefficient;
    fn mul(self, o: &Coefficient) -> Coefficient {
        if self.im.is_zero() && o.im.is_zero() {
            return Coefficient { re: &self.re * &o.re, im: BigRational::zero() };
        }
        if self.im.is_zero() {
            return o.scale(&self.re);
        }
        if o.im.is_zero() {
            return self.scale(&o.re);
        }
        Coefficient {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Mul for Coefficient {
    type Output = Coefficient;
    fn mul(self, o: Coefficient) -> Coefficient {
        &self * &o
    }
}

impl MulAssign<&Coefficient> for Coefficient {
    fn mul_assign(&mut self, o: &Coefficient) {
        *self = &*self * o;
    }
}
