use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::{heun_parameters, lambda0, solve_spherical, SphericalResult};
use crate::characters_denominators::{denominator_half, divide_exact, window_w_invariance};
use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::formal_series::{equal_on_window, TruncatedSeries};
use crate::radial_operator::{apply_radial, RadialOperatorSpec};
use crate::report::CheckReport;
use crate::theta_weierstrass::{eta1_numeric, wp_shifted_numeric, EvalPoint, ETA1_SIGN};

/// Smallest `Im τ` accepted by [`heun_kzb_numeric_check`].
pub const MIN_IM_TAU: f64 = 1.0;

fn label(r: &SphericalResult) -> String {
    format!("lambda={},eta={},chi={}", r.lambda, r.eta, r.chi)
}

/// `Π_{η,χ}(Ω) Ψ − E Ψ = 0` exactly on the window of the result.
pub fn eigen_residual_check(r: &SphericalResult) -> Result<CheckReport> {
    let floor = r.g2_floor();
    let spec = RadialOperatorSpec::new(r.eta.clone(), r.chi.clone(), false, floor);
    let lhs = apply_radial(&spec, &r.series)?;
    let rhs = r.series.scale(&Coefficient::from_rational(r.eigenvalue.clone()));
    let cmp = equal_on_window(&lhs, &rhs);
    Ok(CheckReport::from_comparison_reaching(format!("eigen_residual[{}]", label(r)), &cmp, floor))
}

fn support_in_delta_line(f: &TruncatedSeries, name: String) -> CheckReport {
    match f.weight_terms().find(|(w, _)| w.a != 0) {
        Some((w, _)) => CheckReport::new(name, f.g2_floor(), false, Some(format!("weight {w} is not a multiple of delta"))),
        None => CheckReport::new(name, f.g2_floor(), true, None),
    }
}

/// Support inside `2P + ℤδ`: even `λ(h₁)` and even level.
fn support_in_2p(f: &TruncatedSeries, name: String) -> CheckReport {
    if f.level().rem_euclid(2) != 0 {
        return CheckReport::new(name, f.g2_floor(), false, Some(format!("odd level {}", f.level())));
    }
    match f.weight_terms().find(|(w, _)| w.a.rem_euclid(2) != 0) {
        Some((w, _)) => CheckReport::new(name, f.g2_floor(), false, Some(format!("weight {w} has odd h1"))),
        None => CheckReport::new(name, f.g2_floor(), true, None),
    }
}

fn w_invariance_or_delta_line(f: &TruncatedSeries, name: String) -> Result<CheckReport> {
    if f.level() == 0 {
        return Ok(support_in_delta_line(f, name));
    }
    let mut rep = window_w_invariance(f, 0, false)?;
    rep.check = name;
    Ok(rep)
}

/// Window W-invariance for `η = χ`; for `η = χ = 0` also the support
/// patterns `2P + ℤδ` and `λ + 2Q + ℤδ`. Results with `η ≠ χ` are not
/// expected to be invariant and produce no reports.
pub fn invariance_and_support_checks(r: &SphericalResult) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    if r.eta != r.chi {
        return Ok(out);
    }
    out.push(w_invariance_or_delta_line(&r.series, format!("w_invariance[{}]", label(r)))?);
    if r.eta.b0.is_zero() && r.eta.b1.is_zero() {
        out.push(support_in_2p(&r.series, format!("support_2p[{}]", label(r))));
        let bad = r.series.weight_terms().find(|(w, _)| (w.a - r.lambda.a).rem_euclid(4) != 0);
        out.push(match bad {
            Some((w, _)) => CheckReport::new(
                format!("support_lambda_2q[{}]", label(r)),
                Some(r.g2_floor()),
                false,
                Some(format!("weight {w}")),
            ),
            None => CheckReport::new(format!("support_lambda_2q[{}]", label(r)), Some(r.g2_floor()), true, None),
        });
    }
    Ok(out)
}

/// Divide `Ψ(φ_λ)` by `Ψ(φ_{λ₀(η,χ)})` and check that the quotient
/// multiplies back exactly, is window W-invariant and is supported in
/// `2P + ℤδ`. Returns the quotient with the reports.
pub fn divisibility_check(r: &SphericalResult) -> Result<(TruncatedSeries, Vec<CheckReport>)> {
    let l0 = lambda0(&r.eta, &r.chi)?;
    let base = solve_spherical(&l0, &r.eta, &r.chi, r.depth)?;
    let floor = r.g2_floor() - l0.g2();
    let q = divide_exact(&r.series, &base.series, floor)?;
    let back = q.mul_truncated(&base.series, r.g2_floor())?;
    let cmp = equal_on_window(&back, &r.series);
    let tag = format!("{},lambda0={}", label(r), l0);
    let mut out = vec![CheckReport::from_comparison_reaching(format!("remultiply[{tag}]"), &cmp, r.g2_floor())];
    out.push(w_invariance_or_delta_line(&q, format!("quotient_w_invariance[{tag}]"))?);
    out.push(support_in_2p(&q, format!("quotient_support_2p[{tag}]")));
    Ok((q, out))
}

/// Relative residual of the Heun-KZB equation at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HeunResidual {
    pub z_re: f64,
    pub z_im: f64,
    pub tau_re: f64,
    pub tau_im: f64,
    pub residual: f64,
}

/// Evaluate `H_{K,ℓ} ψ̂` for `ψ̂ = δ̂ Ψ` at each point, termwise on the
/// exponentials, and compare with `2π² E ψ̂`. Passes if every relative
/// residual is below `tol`.
pub fn heun_kzb_numeric_check(r: &SphericalResult, points: &[EvalPoint], tol: f64) -> Result<(CheckReport, Vec<HeunResidual>)> {
    let floor = r.g2_floor() + 1;
    let dh = denominator_half(floor - r.lambda.g2())?;
    let psi = dh.mul_truncated(&r.series, floor)?;
    let level = psi.level();
    let params = heun_parameters(&r.eta, &r.chi, level);
    let ll: Vec<f64> = params
        .as_array()
        .iter()
        .map(|l| (l * (l + num_rational::BigRational::from_integer(1.into()))).to_f64().unwrap_or(f64::NAN))
        .collect();
    let e = r.eigenvalue.to_f64().unwrap_or(f64::NAN);
    let pi2 = PI * PI;
    let mut residuals = Vec::new();
    for p in points {
        if !p.in_domain_d() {
            return Err(Error::InvalidPoint(format!("z = {} is outside the domain for tau = {}", p.z, p.tau)));
        }
        if p.tau.im < MIN_IM_TAU {
            return Err(Error::InvalidPoint(format!("Im tau = {} is below {MIN_IM_TAU}", p.tau.im)));
        }
        let mut psi_v = Complex64::new(0.0, 0.0);
        let mut kinetic = Complex64::new(0.0, 0.0);
        let ipi = Complex64::new(0.0, PI);
        for (w, c) in psi.weight_terms() {
            let (a, m) = (w.a as f64, w.m as f64);
            let ev = c.to_complex() * (ipi * (a * p.z + level as f64 * p.u - m * p.tau)).exp();
            psi_v += ev;
            kinetic += ev * (pi2 * (a * a + 4.0 * level as f64 * m) - pi2);
        }
        let mut pot = Complex64::new(0.0, 0.0);
        for (k, lk) in ll.iter().enumerate() {
            if *lk != 0.0 {
                pot += *lk * wp_shifted_numeric(k, p.z, p.tau, 1e-16)?.value();
            }
        }
        let eta1 = eta1_numeric(p.tau, 1e-16)?.value();
        let c_tau = -ETA1_SIGN * eta1 * ll.iter().sum::<f64>();
        let h = kinetic + (pot + c_tau) * psi_v;
        let res = (h - 2.0 * pi2 * e * psi_v).norm() / psi_v.norm();
        residuals.push(HeunResidual { z_re: p.z.re, z_im: p.z.im, tau_re: p.tau.re, tau_im: p.tau.im, residual: res });
    }
    let worst = residuals.iter().map(|r| r.residual).fold(0.0, f64::max);
    let pass = worst < tol && worst.is_finite();
    let rep = CheckReport::new(
        format!("heun_kzb[{}]", label(r)),
        Some(floor),
        pass,
        Some(format!("max relative residual {worst:.3e}")),
    );
    Ok((rep, residuals))
}
