//! Theta functions with characteristics and Weierstrass ℘-functions, both
//! as exact formal series in `y = e^{α₁}`, `q = e^{−δ}` and as floating
//! point functions of `(z, τ)`.
//!
//! The formal ℘-series are stored normalized, `P_ij = ℘_ij / (4π²)`, so
//! every coefficient is rational. Numerically `y = e^{2πiz}` and
//! `q = e^{πiτ}`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::formal_series::{equal_on_window, tau1_expand, FactorSign, Tau1Factor, TruncatedSeries};
use crate::report::CheckReport;
use crate::weight_lattice::Weight;

/// Sign `σ` in `℘_ij(z, τ) = −℘(z + shift_ij, τ) + σ·η₁(τ)`.
///
/// Fixed by comparing the formal series against lattice sums, see the
/// `eta1_sign_is_negative` test. With this sign the Heun-KZB constant is
/// `c(τ) = +η₁(τ) Σ l_k(l_k+1)`.
pub const ETA1_SIGN: f64 = -1.0;

/// A theta characteristic `(i, j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThetaChar {
    pub i: u8,
    pub j: u8,
}

impl ThetaChar {
    pub const C00: ThetaChar = ThetaChar { i: 0, j: 0 };
    pub const C01: ThetaChar = ThetaChar { i: 0, j: 1 };
    pub const C10: ThetaChar = ThetaChar { i: 1, j: 0 };
    pub const C11: ThetaChar = ThetaChar { i: 1, j: 1 };
    pub const ALL: [ThetaChar; 4] = [Self::C00, Self::C01, Self::C10, Self::C11];

    pub fn new(i: u8, j: u8) -> Result<Self> {
        if i > 1 || j > 1 {
            return Err(Error::Parse(format!("theta characteristic ({i},{j}) out of range")));
        }
        Ok(ThetaChar { i, j })
    }

    /// The half period `s` with `℘_ij(z) = ℘_11(z + s)`.
    pub fn shift(&self, tau: Complex64) -> Complex64 {
        match (self.i, self.j) {
            (0, 0) => (1.0 + tau) / 2.0,
            (0, 1) => tau / 2.0,
            (1, 0) => Complex64::new(0.5, 0.0),
            _ => Complex64::new(0.0, 0.0),
        }
    }
}

impl fmt::Display for ThetaChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.i, self.j)
    }
}

impl FromStr for ThetaChar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "00" => Ok(Self::C00),
            "01" => Ok(Self::C01),
            "10" => Ok(Self::C10),
            "11" => Ok(Self::C11),
            other => Err(Error::Parse(format!("unknown theta characteristic '{other}'"))),
        }
    }
}

/// A point `(z, u, τ)`; `u` is the central coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalPoint {
    pub z: Complex64,
    pub u: Complex64,
    pub tau: Complex64,
}

impl EvalPoint {
    pub fn new(z: Complex64, tau: Complex64) -> Result<Self> {
        if tau.im <= 0.0 {
            return Err(Error::InvalidPoint(format!("Im tau must be positive, got {}", tau.im)));
        }
        Ok(EvalPoint { z, u: Complex64::new(0.0, 0.0), tau })
    }

    /// `−Im τ / 2 < Im z < 0`.
    pub fn in_domain_d(&self) -> bool {
        -self.tau.im / 2.0 < self.z.im && self.z.im < 0.0
    }
}

/// A floating point result with an estimate of the neglected tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericValue {
    pub re: f64,
    pub im: f64,
    pub tail_bound: f64,
}

impl NumericValue {
    pub fn new(v: Complex64, tail_bound: f64) -> Self {
        NumericValue { re: v.re, im: v.im, tail_bound }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

fn check_tau(tau: Complex64) -> Result<()> {
    if tau.im <= 0.0 || !tau.im.is_finite() {
        return Err(Error::InvalidPoint(format!("Im tau must be positive, got {}", tau.im)));
    }
    Ok(())
}

fn i_pi() -> Complex64 {
    Complex64::new(0.0, PI)
}

/// `θ(z, τ) = Σ_n exp(πi n² τ + 2πi n z)`.
pub fn theta_numeric(z: Complex64, tau: Complex64, tol: f64) -> Result<NumericValue> {
    check_tau(tau)?;
    if tol <= 0.0 {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    let term = |n: f64| (i_pi() * (n * n * tau + 2.0 * n * z)).exp();
    let mut sum = term(0.0);
    // Past this index the terms decrease monotonically in both directions.
    let peak = (z.im.abs() / tau.im).ceil() + 1.0;
    let mut n = 1.0;
    loop {
        let t = term(n) + term(-n);
        sum += t;
        if n > peak && t.norm() < tol * 1e-3 {
            let next = term(n + 1.0).norm() + term(-n - 1.0).norm();
            return Ok(NumericValue::new(sum, 2.0 * next));
        }
        n += 1.0;
        if n > 1e6 {
            return Err(Error::Domain("theta sum did not converge".into()));
        }
    }
}

/// `θ_ij(z, τ)` from the shift relations with `θ = θ_00`.
pub fn theta_char_numeric(c: ThetaChar, z: Complex64, tau: Complex64, tol: f64) -> Result<NumericValue> {
    let half = Complex64::new(0.5, 0.0);
    let (pref, arg) = match (c.i, c.j) {
        (0, 0) => (Complex64::new(1.0, 0.0), z),
        (0, 1) => (Complex64::new(1.0, 0.0), z + half),
        (1, 0) => ((i_pi() * (tau / 4.0 + z)).exp(), z + tau / 2.0),
        _ => ((i_pi() * (tau / 4.0 + z + half)).exp(), z + tau / 2.0 + half),
    };
    let t = theta_numeric(arg, tau, tol / pref.norm().max(1e-300))?;
    Ok(NumericValue::new(pref * t.value(), pref.norm() * t.tail_bound))
}

/// Weight of `q^j y^s`: `(2s, 0, −j)`.
fn qy(j: i64, s: i64) -> Weight {
    Weight::new(2 * s, 0, -j)
}

/// Sum form of `θ_ij` as a formal series. `θ_10`, `θ_11` use `q_denom = 4`;
/// `g2_floor` is in the scaled units of the result.
pub fn theta_char_series(c: ThetaChar, g2_floor: i64) -> TruncatedSeries {
    let mut terms = Vec::new();
    if c.i == 0 {
        // Σ_n (±1)^n q^{n²} y^n, grade 2n − 4n²
        let mut n: i64 = 0;
        loop {
            let mut any = false;
            for nn in if n == 0 { vec![0] } else { vec![n, -n] } {
                if 2 * nn - 4 * nn * nn >= g2_floor {
                    any = true;
                    let sign = if c.j == 1 && nn.rem_euclid(2) == 1 { -1 } else { 1 };
                    terms.push(((2 * nn, -nn * nn), Coefficient::from_int(sign)));
                }
            }
            if !any {
                break;
            }
            n += 1;
        }
        TruncatedSeries::from_scaled_terms(0, 1, 1, terms, Some(g2_floor), Some(0)).unwrap()
    } else {
        // Σ_n q^{(n+1/2)²} y^{n+1/2}: key (2n+1, −(2n+1)²) with q_denom 4,
        // scaled grade 4(2n+1) − 4(2n+1)².
        let mut n: i64 = 0;
        loop {
            let mut any = false;
            for nn in [n, -n - 1] {
                let o = 2 * nn + 1;
                if 4 * o - 4 * o * o >= g2_floor {
                    any = true;
                    let sign = if c.j == 1 && nn.rem_euclid(2) == 1 { -1 } else { 1 };
                    let coef = if c.j == 1 { Coefficient::i() * Coefficient::from_int(sign) } else { Coefficient::one() };
                    terms.push(((o, -o * o), coef));
                }
            }
            if !any {
                break;
            }
            n += 1;
        }
        TruncatedSeries::from_scaled_terms(0, 1, 4, terms, Some(g2_floor), Some(0)).unwrap()
    }
}

/// Product form of `θ_ij`, built from the Jacobi triple product. Same
/// window convention as [`theta_char_series`].
pub fn theta_char_product_series(c: ThetaChar, g2_floor: i64) -> Result<TruncatedSeries> {
    // Work in unit denominators; θ_1j carries the prefactor q^{1/4}y^{1/2}
    // of scaled grade 0, so the unit floor is ceil(g2_floor / 4) there.
    let fl = if c.i == 0 { g2_floor } else { g2_floor.div_euclid(4) + if g2_floor.rem_euclid(4) == 0 { 0 } else { 1 } };
    let sign = if c.j == 0 { 1 } else { -1 };
    let mut acc = TruncatedSeries::one().truncate(fl);
    let factor = |x: Weight, s: i64, acc: &mut TruncatedSeries| -> Result<bool> {
        if x.g2() < fl {
            return Ok(false);
        }
        let f = TruncatedSeries::from_terms(0, [(Weight::ZERO, Coefficient::one()), (x, Coefficient::from_int(s))], None, None)?;
        *acc = acc.mul_truncated(&f, fl)?;
        Ok(true)
    };
    // C(q) = ∏_{m≥1} (1 − q^{2m})
    let mut m = 1;
    while factor(qy(2 * m, 0), -1, &mut acc)? {
        m += 1;
    }
    if c.i == 0 {
        let mut m = 0;
        loop {
            let a = factor(qy(2 * m + 1, -1), sign, &mut acc)?;
            let b = factor(qy(2 * m + 1, 1), sign, &mut acc)?;
            if !a && !b {
                break;
            }
            m += 1;
        }
        Ok(acc)
    } else {
        factor(qy(0, -1), sign, &mut acc)?;
        let mut m = 1;
        loop {
            let a = factor(qy(2 * m, -1), sign, &mut acc)?;
            let b = factor(qy(2 * m, 1), sign, &mut acc)?;
            if !a && !b {
                break;
            }
            m += 1;
        }
        let coef = if c.j == 0 { Coefficient::one() } else { Coefficient::i() };
        let pref = TruncatedSeries::from_scaled_terms(0, 1, 4, [((1, -1), coef)], None, None)?;
        Ok(pref.mul(&acc)?.truncate(g2_floor))
    }
}

/// Normalized ℘-series `P_ij(y^{y_power}, q^{q_power}) = ℘_ij / (4π²)`.
pub fn wp_series(c: ThetaChar, y_power: i64, q_power: i64, g2_floor: i64) -> Result<TruncatedSeries> {
    if !(1..=2).contains(&y_power) || !(1..=2).contains(&q_power) {
        return Err(Error::Domain(format!("powers must be 1 or 2, got y^{y_power} q^{q_power}")));
    }
    // x/(1 ∓ x)² with x = q^j y^s, j,s already substituted.
    let (fsign, overall) = if c.j == 1 { (FactorSign::Minus, 1) } else { (FactorSign::Plus, -1) };
    let mut out = TruncatedSeries::zero(0).truncate(g2_floor);
    let add_x = |j: i64, s: i64, out: &mut TruncatedSeries| -> Result<bool> {
        let x = qy(j * q_power, s * y_power);
        if x.g2() >= 0 {
            return Err(Error::Domain(format!(
                "substitution y^{y_power} q^{q_power} does not converge for {}{}",
                c.i, c.j
            )));
        }
        if x.g2() < g2_floor {
            return Ok(false);
        }
        let t = tau1_expand(x, &[Tau1Factor::new(-x, fsign, 2)], g2_floor)?;
        *out = out.add(&t)?;
        Ok(true)
    };
    if c.i == 0 {
        let mut m = 0;
        loop {
            let a = add_x(2 * m + 1, -1, &mut out)?;
            let b = add_x(2 * m + 1, 1, &mut out)?;
            if !a && !b {
                break;
            }
            m += 1;
        }
    } else {
        add_x(0, -1, &mut out)?;
        let mut m = 1;
        loop {
            let a = add_x(2 * m, -1, &mut out)?;
            let b = add_x(2 * m, 1, &mut out)?;
            if !a && !b {
                break;
            }
            m += 1;
        }
    }
    Ok(if overall == 1 { out } else { out.neg() })
}

/// Verify the three doubling identities for the ℘-series on `g2 ≥ g2_floor`.
pub fn wp_identity_check(g2_floor: i64) -> Result<Vec<CheckReport>> {
    let p = |c: ThetaChar, yp, qp| wp_series(c, yp, qp, g2_floor);
    let four = Coefficient::from_int(4);
    let p01 = p(ThetaChar::C01, 1, 1)?;
    let p00 = p(ThetaChar::C00, 1, 1)?;
    let p11 = p(ThetaChar::C11, 1, 1)?;
    let p10 = p(ThetaChar::C10, 1, 1)?;
    let p01_22 = p(ThetaChar::C01, 2, 2)?;
    let p11_22 = p(ThetaChar::C11, 2, 2)?;
    let p11_21 = p(ThetaChar::C11, 2, 1)?;
    let r1 = equal_on_window(&p01_22.scale(&four), &p01.add(&p00)?);
    let r2 = equal_on_window(&p11_22.scale(&four), &p11.add(&p10)?);
    let r3 = equal_on_window(&p11_21, &p01_22.add(&p11_22)?);
    Ok(vec![
        CheckReport::from_comparison_reaching("wp01x22", &r1, g2_floor),
        CheckReport::from_comparison_reaching("wp11x22", &r2, g2_floor),
        CheckReport::from_comparison_reaching("wp11x21", &r3, g2_floor),
    ])
}

/// `π² / sin²(πw)` without overflow for large `|Im w|`.
fn csc2(w: Complex64) -> Complex64 {
    let pi2 = PI * PI;
    let p = if w.im >= 0.0 { (2.0 * i_pi() * w).exp() } else { (-2.0 * i_pi() * w).exp() };
    -4.0 * pi2 * p / ((1.0 - p) * (1.0 - p))
}

/// `π cot(πw)` without overflow for large `|Im w|`.
fn pcot(w: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    if w.im >= 0.0 {
        let p = (2.0 * i_pi() * w).exp();
        -i * PI * (1.0 + p) / (1.0 - p)
    } else {
        let p = (-2.0 * i_pi() * w).exp();
        i * PI * (1.0 + p) / (1.0 - p)
    }
}

fn check_off_lattice(z: Complex64, tau: Complex64) -> Result<()> {
    let n = (z.im / tau.im).round();
    let w = z - n * tau;
    let m = w.re.round();
    if (w - m).norm() < 1e-12 {
        return Err(Error::InvalidPoint(format!("z = {z} lies on the period lattice")));
    }
    Ok(())
}

/// `℘(z, τ)` by row sums over the lattice, each row in closed form.
pub fn wp_numeric(z: Complex64, tau: Complex64, tol: f64) -> Result<NumericValue> {
    check_tau(tau)?;
    check_off_lattice(z, tau)?;
    let mut sum = csc2(z) - PI * PI / 3.0;
    let r = (-2.0 * PI * tau.im).exp();
    let mut n = 1.0;
    loop {
        let row = csc2(z - n * tau) + csc2(z + n * tau) - 2.0 * csc2(n * tau);
        sum += row;
        if n * tau.im > z.im.abs() + 1.0 && row.norm() < tol * 1e-3 {
            let tail = row.norm() * r / (1.0 - r);
            return Ok(NumericValue::new(sum, tail));
        }
        n += 1.0;
        if n > 1e6 {
            return Err(Error::Domain("lattice row sum did not converge".into()));
        }
    }
}

/// Plain lattice partial sum over `|m|, |n| ≤ cutoff` with an estimate of
/// the omitted part. Slow; serves as an independent reference for
/// [`wp_numeric`].
pub fn wp_lattice_numeric(z: Complex64, tau: Complex64, cutoff: i64) -> Result<NumericValue> {
    check_tau(tau)?;
    check_off_lattice(z, tau)?;
    let mut sum = 1.0 / (z * z);
    for n in -cutoff..=cutoff {
        for m in -cutoff..=cutoff {
            if m == 0 && n == 0 {
                continue;
            }
            let w = Complex64::new(m as f64, 0.0) + (n as f64) * tau;
            let d = z - w;
            sum += 1.0 / (d * d) - 1.0 / (w * w);
        }
    }
    // Remainder ≈ Σ 3z²/ω⁴ over the shells outside the square.
    let s = tau.im.min(1.0);
    let tail = 12.0 * z.norm_sqr() / (s.powi(4) * (cutoff as f64).powi(2));
    Ok(NumericValue::new(sum, tail))
}

/// Weierstrass `ζ(z, τ)` by row sums.
pub fn zeta_numeric(z: Complex64, tau: Complex64, tol: f64) -> Result<NumericValue> {
    check_tau(tau)?;
    check_off_lattice(z, tau)?;
    let mut sum = pcot(z) + z * PI * PI / 3.0;
    let r = (-2.0 * PI * tau.im).exp();
    let mut n = 1.0;
    loop {
        let row = pcot(z - n * tau) + pcot(z + n * tau) + 2.0 * z * csc2(n * tau);
        sum += row;
        if n * tau.im > z.im.abs() + 1.0 && row.norm() < tol * 1e-3 {
            return Ok(NumericValue::new(sum, row.norm() * r / (1.0 - r)));
        }
        n += 1.0;
        if n > 1e6 {
            return Err(Error::Domain("zeta row sum did not converge".into()));
        }
    }
}

/// Quasi-period `η₁(τ) = ζ(z₀ + 1) − ζ(z₀)`, evaluated at `z₀ = 0.2 + 0.3i·Im τ`.
pub fn eta1_numeric(tau: Complex64, tol: f64) -> Result<NumericValue> {
    eta1_numeric_at(Complex64::new(0.2, 0.3 * tau.im), tau, tol)
}

pub fn eta1_numeric_at(z0: Complex64, tau: Complex64, tol: f64) -> Result<NumericValue> {
    let a = zeta_numeric(z0 + 1.0, tau, tol)?;
    let b = zeta_numeric(z0, tau, tol)?;
    Ok(NumericValue::new(a.value() - b.value(), a.tail_bound + b.tail_bound))
}

/// `(θ_11'/θ_11)'(z, τ)` from termwise derivatives of the theta sum.
pub fn log_theta11_second_derivative(z: Complex64, tau: Complex64, tol: f64) -> Result<NumericValue> {
    check_tau(tau)?;
    check_off_lattice(z, tau)?;
    let half = Complex64::new(0.5, 0.0);
    let mut s = [Complex64::new(0.0, 0.0); 3];
    let peak = (z.im.abs() / tau.im).ceil() + 2.0;
    let mut n = 0.0;
    let mut last = f64::INFINITY;
    while n <= peak || last > tol * 1e-6 {
        last = 0.0;
        for k in if n == 0.0 { vec![0.0, -1.0] } else { vec![n, -n - 1.0] } {
            let h = k + 0.5;
            let t = (i_pi() * (h * h * tau + 2.0 * h * (z + half))).exp();
            let d = Complex64::new(0.0, 2.0 * PI * h);
            s[0] += t;
            s[1] += d * t;
            s[2] += d * d * t;
            last += (d * d * t).norm();
        }
        n += 1.0;
        if n > 1e6 {
            return Err(Error::Domain("theta derivative sum did not converge".into()));
        }
    }
    let v = s[2] / s[0] - (s[1] / s[0]) * (s[1] / s[0]);
    Ok(NumericValue::new(v, last / s[0].norm()))
}

/// `η₁(τ)` through the theta route `η₁ = −(θ_11'/θ_11)' − ℘`.
pub fn eta1_theta_route(z: Complex64, tau: Complex64, tol: f64) -> Result<NumericValue> {
    let l = log_theta11_second_derivative(z, tau, tol)?;
    let p = wp_numeric(z, tau, tol)?;
    Ok(NumericValue::new(-l.value() - p.value(), l.tail_bound + p.tail_bound))
}

/// `℘_k(z, τ) = ℘(z + ω_k)` with `ω = 0, 1/2, (1+τ)/2, τ/2` for `k = 0..3`.
pub fn wp_shifted_numeric(k: usize, z: Complex64, tau: Complex64, tol: f64) -> Result<NumericValue> {
    let shift = match k {
        0 => Complex64::new(0.0, 0.0),
        1 => Complex64::new(0.5, 0.0),
        2 => (1.0 + tau) / 2.0,
        3 => tau / 2.0,
        _ => return Err(Error::Domain(format!("shift index {k} out of range"))),
    };
    wp_numeric(z + shift, tau, tol)
}

/// `℘_ij(z, τ)` through the lattice: `−℘(z + shift_ij) + σ η₁` with
/// `σ = ETA1_SIGN`.
pub fn wp_char_lattice(c: ThetaChar, z: Complex64, tau: Complex64, tol: f64) -> Result<NumericValue> {
    let p = wp_numeric(z + c.shift(tau), tau, tol)?;
    let e = eta1_numeric(tau, tol)?;
    Ok(NumericValue::new(-p.value() + ETA1_SIGN * e.value(), p.tail_bound + e.tail_bound))
}

/// Evaluate a series at `(z, u, τ)` through `e^λ ↦ exp(πi(λ(h₁) z + K u − λ(d) τ))`.
///
/// The tail bound is the total magnitude of the lowest retained grade
/// band, an estimate of the omitted part when the series converges
/// geometrically at the point. Exact series report a tail of zero.
pub fn eval_series(f: &TruncatedSeries, p: &EvalPoint) -> Result<NumericValue> {
    check_tau(p.tau)?;
    let yd = f.y_denom() as f64;
    let qd = f.q_denom() as f64;
    let k = f.level() as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    let band_top = f.g2_floor().map(|fl| fl + 2 * f.grade_scale());
    let mut band = 0.0;
    for (a, m, c) in f.raw_terms() {
        let e = (i_pi() * ((a as f64 / yd) * p.z + k * p.u - (m as f64 / qd) * p.tau)).exp();
        let v = c.to_complex() * e;
        sum += v;
        if let Some(bt) = band_top {
            if f.scaled_grade(a, m) < bt {
                band += v.norm();
            }
        }
    }
    Ok(NumericValue::new(sum, band))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cz(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn theta_quasi_periodicity() {
        let (z, tau) = (cz(0.21, -0.13), cz(0.1, 1.1));
        let t = theta_numeric(z, tau, 1e-14).unwrap().value();
        let t1 = theta_numeric(z + 1.0, tau, 1e-14).unwrap().value();
        let tt = theta_numeric(z + tau, tau, 1e-14).unwrap().value();
        assert!((t - t1).norm() < 1e-12);
        let factor = (-i_pi() * tau - 2.0 * i_pi() * z).exp();
        assert!((tt - factor * t).norm() < 1e-12);
        assert!(theta_numeric((1.0 + tau) / 2.0, tau, 1e-14).unwrap().value().norm() < 1e-12);
    }

    #[test]
    fn theta_series_first_coefficients() {
        let s = theta_char_series(ThetaChar::C00, -20);
        assert_eq!(s.coeff(&Weight::ZERO), Coefficient::one());
        let s = theta_char_series(ThetaChar::C01, -20);
        assert_eq!(s.coeff(&qy(1, 1)), Coefficient::from_int(-1));
        let p = theta_char_product_series(ThetaChar::C01, -20).unwrap();
        assert_eq!(p.coeff(&qy(1, 1)), Coefficient::from_int(-1));
    }

    #[test]
    fn wp_series_first_coefficients() {
        let p11 = wp_series(ThetaChar::C11, 1, 1, -10).unwrap();
        for k in 1..=5 {
            assert_eq!(p11.coeff(&qy(0, -k)), Coefficient::from_int(k));
        }
        let p01 = wp_series(ThetaChar::C01, 1, 1, -10).unwrap();
        assert_eq!(p01.coeff(&qy(1, 1)), Coefficient::one());
        assert_eq!(p01.coeff(&qy(1, -1)), Coefficient::one());
        let p00 = wp_series(ThetaChar::C00, 1, 1, -10).unwrap();
        assert_eq!(p00.coeff(&qy(1, 1)), Coefficient::from_int(-1));
    }

    #[test]
    fn divergent_substitution_is_rejected() {
        assert!(wp_series(ThetaChar::C01, 2, 1, -10).is_err());
        assert!(wp_series(ThetaChar::C11, 3, 1, -10).is_err());
    }

    #[test]
    fn lattice_sum_properties() {
        let (z, tau) = (cz(0.31, -0.12), cz(0.0, 1.7));
        let p = wp_numeric(z, tau, 1e-14).unwrap().value();
        assert!((wp_numeric(-z, tau, 1e-14).unwrap().value() - p).norm() < 1e-10);
        assert!((wp_numeric(z + 1.0, tau, 1e-14).unwrap().value() - p).norm() < 1e-10);
        let plain = wp_lattice_numeric(z, tau, 200).unwrap();
        assert!((plain.value() - p).norm() < 10.0 * plain.tail_bound + 1e-6);
        assert!(wp_numeric(tau, tau, 1e-10).is_err());
    }

    #[test]
    fn eta1_independent_of_base_point_and_theta_route() {
        let tau = cz(0.2, 1.3);
        let a = eta1_numeric_at(cz(0.1, 0.2), tau, 1e-14).unwrap().value();
        let b = eta1_numeric_at(cz(0.37, -0.4), tau, 1e-14).unwrap().value();
        assert!((a - b).norm() < 1e-10);
        let t = eta1_theta_route(cz(0.3, -0.1), tau, 1e-14).unwrap().value();
        assert!((a - t).norm() < 1e-9, "{a} vs {t}");
        let big = eta1_numeric(cz(0.0, 12.0), 1e-14).unwrap().value();
        assert!((big - PI * PI / 3.0).norm() < 1e-12);
    }

    #[test]
    fn eta1_sign_is_negative() {
        // Series route 4π² P_11 against −℘ ± η₁ at a point with fast convergence.
        let (z, tau) = (cz(0.3, -0.4), cz(0.1, 1.6));
        let p = EvalPoint::new(z, tau).unwrap();
        let s = wp_series(ThetaChar::C11, 1, 1, -120).unwrap();
        let series = eval_series(&s, &p).unwrap().value() * (4.0 * PI * PI);
        let wp = wp_numeric(z, tau, 1e-15).unwrap().value();
        let eta = eta1_numeric(tau, 1e-15).unwrap().value();
        assert!((series - (-wp - eta)).norm() < 1e-8);
        assert!((series - (-wp + eta)).norm() > 1.0);
    }

    #[test]
    fn q_is_exp_pi_i_tau() {
        let p = EvalPoint::new(cz(0.0, 0.0), cz(0.0, 1.0)).unwrap();
        let v = eval_series(&TruncatedSeries::monomial(-Weight::DELTA), &p).unwrap().value();
        assert!((v - cz((-PI).exp(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn doubling_identities_small_window() {
        for r in wp_identity_check(-24).unwrap() {
            assert!(r.pass, "{:?}", r);
            assert_eq!(r.window, Some(-24));
        }
    }

    #[test]
    fn sum_equals_product_small_window() {
        for c in ThetaChar::ALL {
            let s = theta_char_series(c, -40);
            let p = theta_char_product_series(c, -40).unwrap();
            let cmp = equal_on_window(&s, &p);
            assert!(cmp.equal, "{c}: {:?}", cmp.first_difference);
            assert_eq!(cmp.window, Some(-40));
        }
    }

    #[test]
    fn theta_series_matches_numeric() {
        let (z, tau) = (cz(0.17, -0.3), cz(0.05, 2.2));
        let p = EvalPoint::new(z, tau).unwrap();
        for c in ThetaChar::ALL {
            let s = theta_char_series(c, -200);
            let v = eval_series(&s, &p).unwrap().value();
            let n = theta_char_numeric(c, z, tau, 1e-15).unwrap().value();
            assert!((v - n).norm() < 1e-12, "{c}: {v} vs {n}");
        }
    }
}
