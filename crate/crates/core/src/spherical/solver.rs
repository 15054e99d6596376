use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use super::{admissible, Resonance, SphericalResult};
use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::formal_series::TruncatedSeries;
use crate::radial_operator::{potential_series, Character1D, RadialOperatorSpec};
use crate::weight_lattice::{casimir_eigenvalue, dominant_representative, pairing_doubled, positive_roots_up_to, Weight};

enum Step {
    /// `e^{−2kα} ∂_α` with coefficient `2·(α, μ′)`.
    Root(Weight),
    /// A potential monomial with a fixed coefficient.
    Potential(BigRational),
}

struct Transition {
    dx: i64,
    dy: i64,
    step: Step,
}

/// Steps in the coordinates `μ = λ − xα₀ − yα₁` that reach depth ≤ `n`.
fn transitions(spec: &RadialOperatorSpec, n: i64) -> Result<Vec<Transition>> {
    let mut out = Vec::new();
    for r in positive_roots_up_to(n) {
        let w = r.weight();
        // α = pα₀ + qα₁
        let p = w.m;
        let q = (w.a + 2 * p) / 2;
        let mut k = 1;
        while 2 * k * (p + q) <= n {
            out.push(Transition { dx: 2 * k * p, dy: 2 * k * q, step: Step::Root(w) });
            k += 1;
        }
    }
    let v = potential_series(spec, -2 * n)?;
    for (w, c) in v.weight_terms() {
        if !c.is_real() {
            return Err(Error::Domain("potential with non-real coefficients".into()));
        }
        let dx = -w.m;
        let dy = dx - w.a / 2;
        if w.a % 2 != 0 || dx < 0 || dy < 0 {
            return Err(Error::Domain(format!("potential term {w} leaves the cone")));
        }
        out.push(Transition { dx, dy, step: Step::Potential(c.re().clone()) });
    }
    Ok(out)
}

/// Solve `Π_{η,χ}(Ω) Ψ = (λ, λ+2ρ) Ψ` for `Ψ = e^λ + lower terms`, layer by
/// layer over `μ = λ − xα₀ − yα₁` with `x + y ≤ depth`.
///
/// Where `(μ, μ+2ρ) = (λ, λ+2ρ)` the recursion gives no information. If the
/// right-hand side is nonzero the input is obstructed. Otherwise, for
/// `η = χ` at positive level the coefficient is copied from the dominant
/// weight in the Weyl orbit of `μ` (zero if that weight is outside the
/// cone), and in all other cases it is set to zero. Every such weight is
/// recorded.
pub fn solve_spherical(l: &Weight, eta: &Character1D, chi: &Character1D, depth: i64) -> Result<SphericalResult> {
    if depth < 0 {
        return Err(Error::OutOfBounds(format!("depth must be non-negative, got {depth}")));
    }
    if !admissible(l, eta, chi)? {
        return Err(Error::Inadmissible(format!("lambda = {l} with eta = ({eta}), chi = ({chi})")));
    }
    let n = depth;
    let spec = RadialOperatorSpec::new(eta.clone(), chi.clone(), false, l.g2() - 2 * n);
    let trans = transitions(&spec, n)?;
    let e = casimir_eigenvalue(l);
    let symmetric = eta == chi && l.k >= 1;
    let side = (n + 1) as usize;
    let idx = |x: i64, y: i64| x as usize * side + y as usize;
    let weight_at = |x: i64, y: i64| *l - x * Weight::ALPHA0 - y * Weight::ALPHA1;
    let mut c: Vec<BigRational> = vec![BigRational::zero(); side * side];
    c[0] = BigRational::from_integer(BigInt::from(1));
    let mut resonances = Vec::new();

    for s in 1..=n {
        let layer: Vec<(i64, i64)> = (0..=s).map(|x| (x, s - x)).collect();
        let solved: Vec<Result<(BigRational, Option<Resonance>)>> = layer
            .par_iter()
            .map(|&(x, y)| {
                let mu = weight_at(x, y);
                let mut rhs = BigRational::zero();
                for t in &trans {
                    if t.dx > x || t.dy > y {
                        continue;
                    }
                    let (sx, sy) = (x - t.dx, y - t.dy);
                    let src = &c[idx(sx, sy)];
                    if src.is_zero() {
                        continue;
                    }
                    match &t.step {
                        Step::Root(a) => {
                            let p = pairing_doubled(a, &weight_at(sx, sy));
                            if p != 0 {
                                rhs += src * BigInt::from(p);
                            }
                        }
                        Step::Potential(v) => rhs += src * v,
                    }
                }
                let den = &e - casimir_eigenvalue(&mu);
                if !den.is_zero() {
                    return Ok((rhs / den, None));
                }
                if !rhs.is_zero() {
                    return Err(Error::ResonanceObstruction(mu.a, mu.k, mu.m));
                }
                if mu.k == 0 {
                    return Ok((BigRational::zero(), Some(Resonance { weight: mu, action: "zero_at_level_0".into() })));
                }
                if symmetric {
                    let (dom, _) = dominant_representative(&mu)?;
                    let dx = l.m - dom.m;
                    let twice_dy = l.a + 2 * dx - dom.a;
                    if dom != mu && dx >= 0 && twice_dy >= 0 && twice_dy % 2 == 0 && dx + twice_dy / 2 < s {
                        let v = c[idx(dx, twice_dy / 2)].clone();
                        return Ok((v, Some(Resonance { weight: mu, action: format!("copied_from_dominant {dom}") })));
                    }
                    if dom != mu {
                        return Ok((
                            BigRational::zero(),
                            Some(Resonance { weight: mu, action: format!("zero_dominant_outside_cone {dom}") }),
                        ));
                    }
                }
                Ok((BigRational::zero(), Some(Resonance { weight: mu, action: "zero_undetermined".into() })))
            })
            .collect();
        for ((x, y), r) in layer.into_iter().zip(solved) {
            let (v, res) = r?;
            c[idx(x, y)] = v;
            if let Some(res) = res {
                resonances.push(res);
            }
        }
    }

    let floor = l.g2() - 2 * n;
    let mut terms = Vec::new();
    for x in 0..=n {
        for y in 0..=(n - x) {
            let v = &c[idx(x, y)];
            if !v.is_zero() {
                terms.push((weight_at(x, y), Coefficient::from_rational(v.clone())));
            }
        }
    }
    let series = TruncatedSeries::from_terms(l.k, terms, Some(floor), Some(l.g2()))?;
    Ok(SphericalResult {
        lambda: *l,
        eta: eta.clone(),
        chi: chi.clone(),
        eigenvalue: e,
        series,
        resonances,
        depth: n,
    })
}
