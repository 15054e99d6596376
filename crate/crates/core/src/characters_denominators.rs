//! Weyl denominators, orbit sums, Kac-Weyl characters and window checks
//! for (anti-)invariance under the affine Weyl group.

use std::collections::BTreeSet;

use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::formal_series::TruncatedSeries;
use crate::report::CheckReport;
use crate::weight_lattice::{dominant_representative, positive_roots_up_to, weyl_apply, Weight, WeylElement};

pub use crate::formal_series::divide_exact;

/// `∏ (1 − e^{−sα})` over positive roots, kept on `g2 ≥ rel_floor`.
fn root_product(scale: i64, rel_floor: i64) -> Result<TruncatedSeries> {
    let mut acc = TruncatedSeries::one().truncate(rel_floor);
    for r in positive_roots_up_to(-rel_floor / scale) {
        let f = TruncatedSeries::from_terms(
            0,
            [(Weight::ZERO, Coefficient::one()), (-(scale * r.weight()), Coefficient::from_int(-1))],
            None,
            None,
        )?;
        acc = acc.mul_truncated(&f, rel_floor)?;
    }
    Ok(acc)
}

/// `δ̂₁ = e^ρ ∏_{α>0} (1 − e^{−α})` on `g2 ≥ g2_floor`.
pub fn denominator1(g2_floor: i64) -> Result<TruncatedSeries> {
    let rho = Weight::RHO;
    Ok(root_product(1, g2_floor - rho.g2())?.shift(&rho))
}

/// `δ̂₂ = e^{2ρ} ∏_{α>0} (1 − e^{−2α})` on `g2 ≥ g2_floor`.
pub fn denominator2(g2_floor: i64) -> Result<TruncatedSeries> {
    let two_rho = 2 * Weight::RHO;
    Ok(root_product(2, g2_floor - two_rho.g2())?.shift(&two_rho))
}

/// `δ̂ = e^ρ exp(−½ Σ_{α>0} Σ_{n≥1} e^{−2nα}/n)` on `g2 ≥ g2_floor`.
pub fn denominator_half(g2_floor: i64) -> Result<TruncatedSeries> {
    let rho = Weight::RHO;
    let rel = g2_floor - rho.g2();
    let mut terms: Vec<(Weight, Coefficient)> = Vec::new();
    for r in positive_roots_up_to(-rel / 2) {
        let mut n = 1;
        while -2 * n * r.g2() >= rel {
            terms.push((-(2 * n) * r.weight(), Coefficient::from_frac(-1, 2 * n)));
            n += 1;
        }
    }
    let log = TruncatedSeries::from_terms(0, terms, Some(rel), Some(-2))?;
    Ok(log.exp_series(rel)?.shift(&rho))
}

/// Orbit members `w(λ)` with `g2 ≥ g2_floor`, each paired with one `w`.
/// Members with a nontrivial stabilizer may appear more than once, with
/// different `w`.
pub fn orbit_members(l: &Weight, g2_floor: i64) -> Result<Vec<(Weight, WeylElement)>> {
    if l.k < 0 {
        return Err(Error::NegativeLevel(l.k));
    }
    if l.k == 0 {
        if l.a != 0 {
            return Err(Error::NoDominantRepresentative(l.a, l.k, l.m));
        }
        return Ok(if l.g2() >= g2_floor { vec![(*l, WeylElement::IDENTITY)] } else { vec![] });
    }
    let mut out = Vec::new();
    for lr in 0..2u8 {
        for dir in [1i64, -1] {
            let mut k = if dir == 1 { 0 } else { -1 };
            let mut past_peak = false;
            loop {
                let w = WeylElement::new(lr, k);
                let mu = weyl_apply(&w, l);
                let next = weyl_apply(&WeylElement::new(lr, k + dir), l);
                if mu.g2() >= g2_floor {
                    out.push((mu, w));
                } else if past_peak || next.g2() < mu.g2() {
                    break;
                }
                if next.g2() < mu.g2() {
                    past_peak = true;
                }
                k += dir;
            }
        }
    }
    Ok(out)
}

/// `m_λ = Σ_{μ∈Wλ} e^μ` on `g2 ≥ g2_floor`.
pub fn orbit_sum(l: &Weight, g2_floor: i64) -> Result<TruncatedSeries> {
    if !l.is_dominant() {
        return Err(Error::NotDominant(l.a, l.k, l.m));
    }
    let distinct: BTreeSet<Weight> = orbit_members(l, g2_floor)?.into_iter().map(|(m, _)| m).collect();
    TruncatedSeries::from_terms(l.k, distinct.into_iter().map(|m| (m, Coefficient::one())), Some(g2_floor), Some(l.g2()))
}

/// `Σ_w sgn(w) e^{w(λ)}` on `g2 ≥ g2_floor`. Zero when `λ` has a
/// reflection in its stabilizer.
pub fn alternating_sum(l: &Weight, g2_floor: i64) -> Result<TruncatedSeries> {
    if !l.is_dominant() {
        return Err(Error::NotDominant(l.a, l.k, l.m));
    }
    let mut seen = BTreeSet::new();
    let mut terms = Vec::new();
    for (mu, w) in orbit_members(l, g2_floor)? {
        if seen.insert(mu) {
            terms.push((mu, Coefficient::from_int(w.sign())));
        } else {
            // A repeated member means a stabilizer; a sign-reversing one
            // annihilates the sum.
            return Ok(TruncatedSeries::zero(l.k).truncate(g2_floor));
        }
    }
    TruncatedSeries::from_terms(l.k, terms, Some(g2_floor), Some(l.g2()))
}

/// `ch V(λ) = Σ_w sgn(w) e^{w(λ+ρ)−ρ} / ∏_{α>0}(1 − e^{−α})` on
/// `g2 ≥ g2_floor`.
pub fn kac_weyl_character(l: &Weight, g2_floor: i64) -> Result<TruncatedSeries> {
    if l.k < 0 {
        return Err(Error::NegativeLevel(l.k));
    }
    if !l.is_dominant() {
        return Err(Error::NotDominant(l.a, l.k, l.m));
    }
    let rho = Weight::RHO;
    let num = alternating_sum(&(*l + rho), g2_floor + rho.g2())?.shift(&-rho);
    let den = root_product(1, g2_floor - l.g2())?;
    divide_exact(&num, &den, g2_floor)
}

/// Check that `f` is invariant (or, with `signed`, anti-invariant) under
/// the Weyl group on its window. Orbits whose dominant member lies below
/// `g2_floor + safety` are not asserted.
pub fn window_w_invariance(f: &TruncatedSeries, safety: i64, signed: bool) -> Result<CheckReport> {
    if f.level() == 0 {
        return Err(Error::Domain("window invariance is only meaningful at positive level".into()));
    }
    if f.level() < 0 {
        return Err(Error::NegativeLevel(f.level()));
    }
    if !f.has_unit_denominators() {
        return Err(Error::Domain("window invariance needs unit exponent denominators".into()));
    }
    let name = if signed { "w_anti_invariance" } else { "w_invariance" };
    let floor = match f.g2_floor() {
        Some(fl) => fl,
        None => f.weight_terms().map(|(w, _)| w.g2()).min().unwrap_or(0),
    };
    let mut done = BTreeSet::new();
    for (mu, _) in f.weight_terms() {
        let (dom, _) = dominant_representative(&mu)?;
        if dom.g2() < floor + safety || !done.insert(dom) {
            continue;
        }
        let c_dom = f.coeff(&dom);
        for (nu, w) in orbit_members(&dom, floor)? {
            let expected = if signed && w.sign() < 0 { -c_dom.clone() } else { c_dom.clone() };
            let got = f.coeff(&nu);
            if got != expected {
                return Ok(CheckReport::new(
                    name,
                    Some(floor),
                    false,
                    Some(format!("weight {nu} = ({w})({dom}): expected {expected}, got {got}")),
                ));
            }
        }
    }
    Ok(CheckReport::new(name, Some(floor), true, None))
}
