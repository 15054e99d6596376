//! Weight lattice, positive roots, invariant form and Weyl group of
//! affine sl2.
//!
//! A weight is stored by its values on `h₁`, `c` and `d`:
//! `λ = (a, k, m) = (λ(h₁), λ(c), λ(d))`. The doubled ρ-grade
//! `g2(λ) = a + 4m = 2(λ, ρ)` is the integer grading used throughout the
//! crate.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An integral weight `(λ(h₁), λ(c), λ(d))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Weight {
    #[serde(rename = "h1")]
    pub a: i64,
    #[serde(rename = "level")]
    pub k: i64,
    #[serde(rename = "d")]
    pub m: i64,
}

impl Weight {
    pub const ZERO: Weight = Weight { a: 0, k: 0, m: 0 };
    /// ϖ₀
    pub const OMEGA0: Weight = Weight { a: 0, k: 1, m: 0 };
    /// ϖ₁
    pub const OMEGA1: Weight = Weight { a: 1, k: 1, m: 0 };
    /// δ
    pub const DELTA: Weight = Weight { a: 0, k: 0, m: 1 };
    /// α₀ = δ − α₁
    pub const ALPHA0: Weight = Weight { a: -2, k: 0, m: 1 };
    /// α₁
    pub const ALPHA1: Weight = Weight { a: 2, k: 0, m: 0 };
    /// ρ = ϖ₀ + ϖ₁
    pub const RHO: Weight = Weight { a: 1, k: 2, m: 0 };

    pub const fn new(a: i64, k: i64, m: i64) -> Self {
        Weight { a, k, m }
    }

    pub fn level(&self) -> i64 {
        self.k
    }

    /// `λ(h₁)`
    pub fn h1(&self) -> i64 {
        self.a
    }

    /// `λ(h₀) = λ(c) − λ(h₁)`
    pub fn h0(&self) -> i64 {
        self.k - self.a
    }

    /// Doubled ρ-grade `a + 4m`.
    pub fn g2(&self) -> i64 {
        self.a + 4 * self.m
    }

    pub fn is_dominant(&self) -> bool {
        self.a >= 0 && self.k - self.a >= 0
    }

    /// Build `n₀ϖ₀ + n₁ϖ₁ + mδ`.
    pub fn from_fundamental(n0: i64, n1: i64, m: i64) -> Self {
        Weight { a: n1, k: n0 + n1, m }
    }

    /// Coefficients `(n₀, n₁, m)` with respect to `ϖ₀, ϖ₁, δ`.
    pub fn to_fundamental(&self) -> (i64, i64, i64) {
        (self.k - self.a, self.a, self.m)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.k, self.m)
    }
}

impl Add for Weight {
    type Output = Weight;
    fn add(self, o: Weight) -> Weight {
        Weight::new(self.a + o.a, self.k + o.k, self.m + o.m)
    }
}

impl Sub for Weight {
    type Output = Weight;
    fn sub(self, o: Weight) -> Weight {
        Weight::new(self.a - o.a, self.k - o.k, self.m - o.m)
    }
}

impl Neg for Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        Weight::new(-self.a, -self.k, -self.m)
    }
}

impl Mul<Weight> for i64 {
    type Output = Weight;
    fn mul(self, w: Weight) -> Weight {
        Weight::new(self * w.a, self * w.k, self * w.m)
    }
}

/// `2(λ, μ)` as an integer.
pub fn pairing_doubled(l: &Weight, u: &Weight) -> i64 {
    l.a * u.a + 2 * (l.k * u.m + u.k * l.m)
}

/// The invariant form `(λ, μ) = a_λ a_μ / 2 + k_λ m_μ + k_μ m_λ`.
pub fn pairing(l: &Weight, u: &Weight) -> BigRational {
    BigRational::new(BigInt::from(pairing_doubled(l, u)), BigInt::from(2))
}

/// `(λ, λ + 2ρ)`, the scalar by which the Casimir acts on `V(λ)`.
pub fn casimir_eigenvalue(l: &Weight) -> BigRational {
    pairing(l, &(*l + 2 * Weight::RHO))
}

/// The Weyl group element `r^l t_k`, acting as `t_k` first and then `r^l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeylElement {
    pub l: u8,
    pub k: i64,
}

impl WeylElement {
    pub const IDENTITY: WeylElement = WeylElement { l: 0, k: 0 };
    pub const R: WeylElement = WeylElement { l: 1, k: 0 };

    pub fn new(l: u8, k: i64) -> Self {
        WeylElement { l: l % 2, k }
    }

    pub fn translation(k: i64) -> Self {
        WeylElement { l: 0, k }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        let k = if other.l == 0 { self.k + other.k } else { other.k - self.k };
        WeylElement { l: (self.l + other.l) % 2, k }
    }

    pub fn inverse(&self) -> WeylElement {
        if self.l == 0 {
            WeylElement { l: 0, k: -self.k }
        } else {
            *self
        }
    }

    /// Determinant `(−1)^l`.
    pub fn sign(&self) -> i64 {
        if self.l == 0 {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.l, self.k) {
            (0, 0) => write!(f, "1"),
            (0, k) => write!(f, "t_{k}"),
            (_, 0) => write!(f, "r"),
            (_, k) => write!(f, "r t_{k}"),
        }
    }
}

/// `t_k(a, K, m) = (a − 2kK, K, m + ak − Kk²)`.
pub fn translate(k: i64, l: &Weight) -> Weight {
    Weight::new(l.a - 2 * k * l.k, l.k, l.m + l.a * k - l.k * k * k)
}

pub fn reflect(l: &Weight) -> Weight {
    Weight::new(-l.a, l.k, l.m)
}

pub fn weyl_apply(w: &WeylElement, l: &Weight) -> Weight {
    let t = translate(w.k, l);
    if w.l == 0 {
        t
    } else {
        reflect(&t)
    }
}

/// The dominant weight in the orbit of `λ` together with `w` such that
/// `w(λ)` is that weight.
pub fn dominant_representative(l: &Weight) -> Result<(Weight, WeylElement)> {
    if l.k < 0 {
        return Err(Error::NegativeLevel(l.k));
    }
    if l.k == 0 {
        if l.a == 0 {
            return Ok((*l, WeylElement::IDENTITY));
        }
        return Err(Error::NoDominantRepresentative(l.a, l.k, l.m));
    }
    if l.is_dominant() {
        return Ok((*l, WeylElement::IDENTITY));
    }
    let kk = l.k;
    let k = (l.a + kk).div_euclid(2 * kk);
    let t = translate(k, l);
    if t.a < 0 {
        Ok((reflect(&t), WeylElement::new(1, k)))
    } else {
        Ok((t, WeylElement::translation(k)))
    }
}

/// A positive root of affine sl2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PositiveRoot {
    /// α₁
    Alpha1,
    /// nδ + α₁, n ≥ 1
    Plus(i64),
    /// nδ − α₁, n ≥ 1
    Minus(i64),
    /// nδ, n ≥ 1
    Imaginary(i64),
}

impl PositiveRoot {
    pub fn weight(&self) -> Weight {
        match *self {
            PositiveRoot::Alpha1 => Weight::ALPHA1,
            PositiveRoot::Plus(n) => Weight::new(2, 0, n),
            PositiveRoot::Minus(n) => Weight::new(-2, 0, n),
            PositiveRoot::Imaginary(n) => Weight::new(0, 0, n),
        }
    }

    pub fn g2(&self) -> i64 {
        self.weight().g2()
    }

    pub fn is_real(&self) -> bool {
        !matches!(self, PositiveRoot::Imaginary(_))
    }
}

impl From<PositiveRoot> for Weight {
    fn from(r: PositiveRoot) -> Weight {
        r.weight()
    }
}

/// All positive roots `α` with `2(α, ρ) ≤ g2_bound`, sorted by grade.
pub fn positive_roots_up_to(g2_bound: i64) -> Vec<PositiveRoot> {
    let mut out = Vec::new();
    if g2_bound >= 2 {
        out.push(PositiveRoot::Alpha1);
    }
    let mut n = 1;
    while 4 * n - 2 <= g2_bound {
        out.push(PositiveRoot::Minus(n));
        if 4 * n <= g2_bound {
            out.push(PositiveRoot::Imaginary(n));
        }
        if 4 * n + 2 <= g2_bound {
            out.push(PositiveRoot::Plus(n));
        }
        n += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn pairing_values() {
        assert_eq!(pairing(&Weight::ALPHA1, &Weight::ALPHA1), q(2, 1));
        assert_eq!(pairing(&Weight::DELTA, &Weight::DELTA), q(0, 1));
        assert_eq!(pairing(&Weight::RHO, &Weight::RHO), q(1, 2));
        assert_eq!(pairing(&Weight::DELTA, &Weight::RHO), q(2, 1));
        assert_eq!(pairing(&Weight::ALPHA0, &Weight::ALPHA0), q(2, 1));
        assert_eq!(pairing(&Weight::ALPHA0, &Weight::ALPHA1), q(-2, 1));
    }

    #[test]
    fn weyl_examples() {
        assert_eq!(weyl_apply(&WeylElement::translation(1), &Weight::OMEGA1), Weight::new(-1, 1, 0));
        assert_eq!(weyl_apply(&WeylElement::R, &Weight::new(3, 2, -1)), Weight::new(-3, 2, -1));
        assert_eq!(weyl_apply(&WeylElement::translation(2), &Weight::new(0, 2, 0)), Weight::new(-8, 2, -8));
    }

    #[test]
    fn dominant_examples() {
        assert_eq!(dominant_representative(&Weight::new(-1, 1, 0)).unwrap(), (Weight::OMEGA1, WeylElement::R));
        assert_eq!(dominant_representative(&Weight::OMEGA1).unwrap(), (Weight::OMEGA1, WeylElement::IDENTITY));
        assert_eq!(
            dominant_representative(&Weight::new(-8, 2, -8)).unwrap(),
            (Weight::new(0, 2, 0), WeylElement::translation(-2))
        );
        assert!(dominant_representative(&Weight::new(1, 0, 0)).is_err());
        assert!(dominant_representative(&Weight::new(0, -1, 0)).is_err());
        assert_eq!(dominant_representative(&Weight::new(0, 0, 3)).unwrap().0, Weight::new(0, 0, 3));
    }

    #[test]
    fn casimir_examples() {
        assert_eq!(casimir_eigenvalue(&Weight::ZERO), q(0, 1));
        assert_eq!(casimir_eigenvalue(&Weight::new(0, 0, 3)), q(12, 1));
        assert_eq!(casimir_eigenvalue(&Weight::new(2, 2, 0)), q(4, 1));
    }

    #[test]
    fn root_enumeration() {
        assert!(positive_roots_up_to(0).is_empty());
        assert_eq!(positive_roots_up_to(2), vec![PositiveRoot::Alpha1, PositiveRoot::Minus(1)]);
        assert_eq!(
            positive_roots_up_to(4),
            vec![PositiveRoot::Alpha1, PositiveRoot::Minus(1), PositiveRoot::Imaginary(1)]
        );
    }

    #[test]
    fn root_pairings_with_rho() {
        for r in positive_roots_up_to(40) {
            assert_eq!(pairing_doubled(&r.weight(), &Weight::RHO), r.g2());
        }
    }
}
