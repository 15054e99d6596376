//! Radial part of the Casimir element acting on truncated series, in the
//! plain form `Π_{η,χ}(Ω)` and conjugated by the half denominator `δ̂`.
//!
//! All potentials are written with the normalized series `P_ij`, so the
//! operators have rational coefficients.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::characters_denominators::{denominator1, denominator2, denominator_half};
use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::formal_series::{equal_on_window, tau1_expand, FactorSign, Tau1Factor, TruncatedSeries};
use crate::report::CheckReport;
use crate::theta_weierstrass::{wp_series, ThetaChar};
use crate::weight_lattice::{pairing, positive_roots_up_to, Weight};

/// A one-dimensional representation of the Onsager algebra, given by its
/// values on `B₀` and `B₁`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Character1D {
    pub b0: BigRational,
    pub b1: BigRational,
}

impl Character1D {
    pub fn new(b0: i64, b1: i64) -> Self {
        Character1D { b0: BigRational::from_integer(b0.into()), b1: BigRational::from_integer(b1.into()) }
    }

    pub fn from_rationals(b0: BigRational, b1: BigRational) -> Self {
        Character1D { b0, b1 }
    }

    pub fn trivial() -> Self {
        Self::new(0, 0)
    }

    /// Integer values `(b₀, b₁)` if both are integral.
    pub fn as_integers(&self) -> Option<(i64, i64)> {
        use num_traits::ToPrimitive;
        if self.b0.is_integer() && self.b1.is_integer() {
            Some((self.b0.to_integer().to_i64()?, self.b1.to_integer().to_i64()?))
        } else {
            None
        }
    }
}

impl fmt::Display for Character1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.b0, self.b1)
    }
}

impl FromStr for Character1D {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 2 {
            return Err(Error::Parse(format!("expected 'b0,b1', got '{s}'")));
        }
        Ok(Character1D {
            b0: crate::coeff::parse_rational(parts[0].trim())?,
            b1: crate::coeff::parse_rational(parts[1].trim())?,
        })
    }
}

impl Serialize for Character1D {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.b0.to_string(), self.b1.to_string()].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Character1D {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [b0, b1] = <[String; 2]>::deserialize(d)?;
        let p = |x: &str| crate::coeff::parse_rational(x).map_err(serde::de::Error::custom);
        Ok(Character1D { b0: p(&b0)?, b1: p(&b1)? })
    }
}

/// Which radial operator to apply and on which output window.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialOperatorSpec {
    pub eta: Character1D,
    pub chi: Character1D,
    pub conjugated: bool,
    pub window: i64,
    /// Integer added to one of the four potential coefficients, in the
    /// order `(P01, P00, P11, P10)`. Only used to exercise failure reports;
    /// [`conjugation_identity_check`] applies it to the conjugated side only.
    pub perturbation: Option<(usize, i64)>,
}

impl RadialOperatorSpec {
    pub fn new(eta: Character1D, chi: Character1D, conjugated: bool, window: i64) -> Self {
        RadialOperatorSpec { eta, chi, conjugated, window, perturbation: None }
    }

    pub fn with_conjugated(&self, conjugated: bool) -> Self {
        RadialOperatorSpec { conjugated, ..self.clone() }
    }

    /// Coefficients of `(P01, P00, P11, P10)` before the factor `−1/2`.
    pub fn potential_coefficients(&self) -> [BigRational; 4] {
        let (a0, a1) = (&self.chi.b0, &self.chi.b1);
        let (b0, b1) = (&self.eta.b0, &self.eta.b1);
        let sq = |x: BigRational| &x * &x;
        let mut c = [sq(a0 - b0), sq(a0 + b0), sq(a1 - b1), sq(a1 + b1)];
        if self.conjugated {
            for x in c.iter_mut() {
                *x -= BigRational::one();
            }
        }
        if let Some((i, d)) = self.perturbation {
            if i < 4 {
                c[i] += BigRational::from_integer(d.into());
            }
        }
        c
    }
}

const POTENTIAL_CHARS: [ThetaChar; 4] = [ThetaChar::C01, ThetaChar::C00, ThetaChar::C11, ThetaChar::C10];

/// The level 0 potential `−½ Σ c_ij P_ij` on `g2 ≥ g2_floor`.
pub fn potential_series(spec: &RadialOperatorSpec, g2_floor: i64) -> Result<TruncatedSeries> {
    let mut v = TruncatedSeries::zero(0).truncate(g2_floor);
    for (c, ch) in spec.potential_coefficients().iter().zip(POTENTIAL_CHARS) {
        if c.is_zero() {
            continue;
        }
        let p = wp_series(ch, 1, 1, g2_floor)?;
        v = v.add(&p.scale_rational(c))?;
    }
    Ok(v.scale_rational(&BigRational::new(BigInt::from(-1), BigInt::from(2))))
}

fn top_grade(f: &TruncatedSeries) -> Option<i64> {
    f.g2_ceil()
}

/// `Π₀,₀(Ω) f = Δf + 2∂_ρ f + 2 Σ_{α>0} Σ_{k≥1} e^{−2kα} ∂_α f` on the
/// window `g2 ≥ window` (or the window of `f` if that is higher).
pub fn apply_pi00(f: &TruncatedSeries, window: i64) -> Result<TruncatedSeries> {
    let mut out = f.laplace_apply().add(&f.derivative_pairing(&Weight::RHO).scale(&Coefficient::from_int(2)))?;
    out = out.truncate(window);
    let top = match top_grade(f) {
        Some(t) => t,
        None => return Ok(out),
    };
    let span = top - window;
    let two = Coefficient::from_int(2);
    for r in positive_roots_up_to(span / 2) {
        let alpha = r.weight();
        let d = f.derivative_pairing(&alpha);
        if d.is_empty() {
            continue;
        }
        let mut k = 1;
        let mut terms = Vec::new();
        while 2 * k * r.g2() <= span {
            terms.push((-(2 * k) * alpha, Coefficient::one()));
            k += 1;
        }
        let s = TruncatedSeries::from_terms(0, terms, Some(-span), Some(-2 * r.g2()))?;
        out = out.add(&d.mul_truncated(&s, window)?.scale(&two))?;
    }
    Ok(out.truncate(window))
}

/// Apply the radial operator of `spec` to `f`.
///
/// Unconjugated: `Π₀,₀(Ω)f + V f`. Conjugated: `Δf − ½f + V_c f`.
pub fn apply_radial(spec: &RadialOperatorSpec, f: &TruncatedSeries) -> Result<TruncatedSeries> {
    let w = spec.window;
    let base = if spec.conjugated {
        f.laplace_apply().sub(&f.scale(&Coefficient::from_frac(1, 2)))?.truncate(w)
    } else {
        apply_pi00(f, w)?
    };
    let top = match top_grade(f) {
        Some(t) => t,
        None => return Ok(base),
    };
    let v = potential_series(spec, w - top)?;
    if v.is_empty() {
        return Ok(base);
    }
    Ok(base.add(&v.mul_truncated(f, w)?)?.truncate(w))
}

/// Check `δ̂ · Π_u(δ̂⁻¹ e^λ) = Π_c(e^λ)` on `g2 ≥ g2_floor` for each `λ`.
pub fn conjugation_identity_check(
    spec: &RadialOperatorSpec,
    test_weights: &[Weight],
    g2_floor: i64,
) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for l in test_weights {
        let top = l.g2();
        let rho_g2 = Weight::RHO.g2();
        // δ̂⁻¹ e^λ has top grade g2(λ) − 1; keep it one grade deeper than
        // the target so the final product still covers the window.
        let inner_floor = g2_floor - rho_g2;
        let dh = denominator_half(inner_floor - top + 2 * rho_g2)?;
        let dinv = dh.invert(inner_floor - top)?;
        let g = dinv.shift(l).truncate(inner_floor);
        let u_spec = RadialOperatorSpec { conjugated: false, window: inner_floor, perturbation: None, ..spec.clone() };
        let h = apply_radial(&u_spec, &g)?;
        let dh_outer = denominator_half(g2_floor - top + rho_g2)?;
        let lhs = dh_outer.mul_truncated(&h, g2_floor)?;
        let c_spec = RadialOperatorSpec { conjugated: true, window: g2_floor, ..spec.clone() };
        let rhs = apply_radial(&c_spec, &TruncatedSeries::monomial(*l))?;
        let cmp = equal_on_window(&lhs, &rhs);
        out.push(CheckReport::from_comparison_reaching(
            format!("conjugation[eta={},chi={},lambda={}]", spec.eta, spec.chi, l),
            &cmp,
            g2_floor,
        ));
    }
    Ok(out)
}

/// Verify `X = (v,v) − (ρ,ρ) − Σ_α e^{−2α}/(1−e^{−2α})² (α,α) = 0` on
/// `g2 ≥ g2_floor`, where `v = ∂_ρ + Σ_α (Σ_k e^{−2kα}) ∂_α`.
/// With `drop_cross_terms` the double sum over pairs of roots is omitted,
/// which must make the check fail.
pub fn v_identity_check(g2_floor: i64, drop_cross_terms: bool) -> Result<CheckReport> {
    let roots = positive_roots_up_to(-g2_floor / 2);
    let geometric: Vec<(Weight, TruncatedSeries)> = roots
        .iter()
        .map(|r| {
            let a = r.weight();
            let t = tau1_expand(-2 * a, &[Tau1Factor::new(2 * a, FactorSign::Minus, 1)], g2_floor)?;
            Ok((a, t))
        })
        .collect::<Result<_>>()?;
    let mut x = TruncatedSeries::zero(0).truncate(g2_floor);
    // (v,v) − (ρ,ρ): linear terms 2 Σ s_α (α,ρ)
    for (a, s) in &geometric {
        x = x.add(&s.scale_rational(&(pairing(a, &Weight::RHO) * BigInt::from(2))))?;
    }
    if !drop_cross_terms {
        for (a, sa) in &geometric {
            for (b, sb) in &geometric {
                let p = pairing(a, b);
                if p.is_zero() {
                    continue;
                }
                x = x.add(&sa.mul_truncated(sb, g2_floor)?.scale_rational(&p))?;
            }
        }
    }
    for (a, _) in &geometric {
        let d = tau1_expand(-2 * *a, &[Tau1Factor::new(2 * *a, FactorSign::Minus, 2)], g2_floor)?;
        x = x.sub(&d.scale_rational(&pairing(a, a)))?;
    }
    let zero = TruncatedSeries::zero(0).truncate(g2_floor);
    let cmp = equal_on_window(&x, &zero);
    let name = if drop_cross_terms { "v_identity_without_cross_terms" } else { "v_identity" };
    Ok(CheckReport::from_comparison_reaching(name, &cmp, g2_floor))
}

/// `Δ δ̂₂ = 2 δ̂₂` on `g2 ≥ g2_floor`. With `use_first` the check is run
/// on `δ̂₁` instead, where it must fail.
pub fn denominator_identity_check(g2_floor: i64, use_first: bool) -> Result<CheckReport> {
    let d = if use_first { denominator1(g2_floor)? } else { denominator2(g2_floor)? };
    let cmp = equal_on_window(&d.laplace_apply(), &d.scale(&Coefficient::from_int(2)));
    let name = if use_first { "laplace_first_denominator" } else { "laplace_second_denominator" };
    Ok(CheckReport::from_comparison_reaching(name, &cmp, g2_floor))
}

/// `δ̂² = δ̂₂` on `g2 ≥ g2_floor`.
pub fn delta_square_check(g2_floor: i64) -> Result<CheckReport> {
    let d = denominator_half(g2_floor - Weight::RHO.g2())?;
    let cmp = equal_on_window(&d.mul_truncated(&d, g2_floor)?, &denominator2(g2_floor)?);
    Ok(CheckReport::from_comparison_reaching("half_denominator_square", &cmp, g2_floor))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(eta: (i64, i64), chi: (i64, i64), conj: bool, w: i64) -> RadialOperatorSpec {
        RadialOperatorSpec::new(Character1D::new(eta.0, eta.1), Character1D::new(chi.0, chi.1), conj, w)
    }

    #[test]
    fn pi00_on_simple_inputs() {
        assert!(apply_pi00(&TruncatedSeries::one(), -10).unwrap().is_empty());
        for n in 1..4 {
            let e = TruncatedSeries::monomial(n * Weight::DELTA);
            let r = apply_pi00(&e, -10).unwrap();
            let cmp = equal_on_window(&r, &e.scale(&Coefficient::from_int(4 * n)));
            assert!(cmp.equal);
        }
        let r = apply_pi00(&TruncatedSeries::monomial(Weight::ALPHA1), -6).unwrap();
        assert_eq!(r.coeff(&Weight::ALPHA1), Coefficient::from_int(4));
        assert_eq!(r.coeff(&-Weight::ALPHA1), Coefficient::from_int(4));
    }

    #[test]
    fn potential_examples() {
        assert!(potential_series(&spec((0, 0), (0, 0), false, 0), -12).unwrap().is_empty());
        let v = potential_series(&spec((0, 0), (0, 0), true, 0), -12).unwrap();
        let mut expected = TruncatedSeries::zero(0).truncate(-12);
        for ch in POTENTIAL_CHARS {
            expected = expected.add(&wp_series(ch, 1, 1, -12).unwrap()).unwrap();
        }
        assert!(equal_on_window(&v, &expected.scale(&Coefficient::from_frac(1, 2))).equal);
        let v = potential_series(&spec((1, 1), (1, 1), false, 0), -12).unwrap();
        let p00 = wp_series(ThetaChar::C00, 1, 1, -12).unwrap();
        let p10 = wp_series(ThetaChar::C10, 1, 1, -12).unwrap();
        let expected = p00.add(&p10).unwrap().scale(&Coefficient::from_int(-2));
        assert!(equal_on_window(&v, &expected).equal);
    }

    #[test]
    fn small_identity_checks() {
        assert!(v_identity_check(-12, false).unwrap().pass);
        assert!(!v_identity_check(-12, true).unwrap().pass);
        assert!(denominator_identity_check(-16, false).unwrap().pass);
        assert!(!denominator_identity_check(-16, true).unwrap().pass);
        assert!(delta_square_check(-16).unwrap().pass);
    }

    #[test]
    fn conjugation_trivial_characters() {
        let s = spec((0, 0), (0, 0), false, -10);
        for r in conjugation_identity_check(&s, &[Weight::ZERO, Weight::OMEGA1, Weight::DELTA], -10).unwrap() {
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn conjugation_detects_perturbation() {
        let mut s = spec((0, 0), (0, 0), false, -10);
        s.perturbation = Some((2, 1));
        let r = &conjugation_identity_check(&s, &[Weight::OMEGA1], -10).unwrap()[0];
        assert!(!r.pass);
        assert!(r.witness.is_some());
    }
}
