//! Twisted zonal spherical functions: admissibility, the recursive
//! eigen-expansion solver, a brute-force representation oracle and the
//! checks built on top of them.

mod checks;
mod oracle;
mod solver;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formal_series::TruncatedSeries;
use crate::radial_operator::Character1D;
use crate::weight_lattice::Weight;

pub use checks::{
    divisibility_check, eigen_residual_check, heun_kzb_numeric_check, invariance_and_support_checks, HeunResidual,
};
pub use oracle::{oracle_spherical, weight_multiplicity};
pub use solver::solve_spherical;

/// What the solver did at a weight where the recursion degenerates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resonance {
    pub weight: Weight,
    pub action: String,
}

/// Output of [`solve_spherical`]. `series` has coefficient 1 at `e^λ` and
/// is exact on `g2 ≥ g2(λ) − 2·depth`.
#[derive(Clone, Debug, PartialEq)]
pub struct SphericalResult {
    pub lambda: Weight,
    pub eta: Character1D,
    pub chi: Character1D,
    pub eigenvalue: BigRational,
    pub series: TruncatedSeries,
    pub resonances: Vec<Resonance>,
    /// Number of solver steps; one step lowers `g2` by 2.
    pub depth: i64,
}

/// JSON form `{lambda, eta, chi, eigenvalue, depth, resonances, series}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphericalJson {
    pub lambda: Weight,
    pub eta: Character1D,
    pub chi: Character1D,
    pub eigenvalue: String,
    pub depth: i64,
    pub resonances: Vec<Resonance>,
    pub series: crate::formal_series::SeriesJson,
}

impl SphericalResult {
    pub fn to_json_value(&self) -> SphericalJson {
        SphericalJson {
            lambda: self.lambda,
            eta: self.eta.clone(),
            chi: self.chi.clone(),
            eigenvalue: self.eigenvalue.to_string(),
            depth: self.depth,
            resonances: self.resonances.clone(),
            series: self.series.to_json_value(),
        }
    }

    /// Lowest `g2` on which the series is exact.
    pub fn g2_floor(&self) -> i64 {
        self.lambda.g2() - 2 * self.depth
    }
}

/// Parameters `l₀ … l₃` of the Heun-KZB operator and its level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeunParams {
    pub l0: BigRational,
    pub l1: BigRational,
    pub l2: BigRational,
    pub l3: BigRational,
    pub level: i64,
}

impl HeunParams {
    pub fn as_array(&self) -> [BigRational; 4] {
        [self.l0.clone(), self.l1.clone(), self.l2.clone(), self.l3.clone()]
    }
}

/// `l₀ = (a₁−b₁−1)/2`, `l₁ = (a₁+b₁−1)/2`, `l₂ = (a₀+b₀−1)/2`,
/// `l₃ = (a₀−b₀−1)/2` with `a = χ`, `b = η`.
pub fn heun_parameters(eta: &Character1D, chi: &Character1D, level: i64) -> HeunParams {
    let one = BigRational::from_integer(BigInt::from(1));
    let half = |x: BigRational| (x - &one) / BigInt::from(2);
    HeunParams {
        l0: half(&chi.b1 - &eta.b1),
        l1: half(&chi.b1 + &eta.b1),
        l2: half(&chi.b0 + &eta.b0),
        l3: half(&chi.b0 - &eta.b0),
        level,
    }
}

fn in_two_n0(x: &BigRational) -> bool {
    x.is_integer() && !x.is_negative() && (x.to_integer() % BigInt::from(2)) == BigInt::from(0)
}

/// Whether `λ(h_j) − |η(B_j)|` and `λ(h_j) − |χ(B_j)|` are even and
/// non-negative for `j = 0, 1`.
pub fn admissible(l: &Weight, eta: &Character1D, chi: &Character1D) -> Result<bool> {
    if !l.is_dominant() {
        return Err(Error::NotDominant(l.a, l.k, l.m));
    }
    let h = [BigRational::from_integer(l.h0().into()), BigRational::from_integer(l.h1().into())];
    for c in [eta, chi] {
        for (hj, cj) in h.iter().zip([&c.b0, &c.b1]) {
            if !cj.is_integer() || !in_two_n0(&(hj - cj.abs())) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The minimal admissible dominant weight `m₀ϖ₀ + m₁ϖ₁` with
/// `m_j = max(|η(B_j)|, |χ(B_j)|)`.
pub fn lambda0(eta: &Character1D, chi: &Character1D) -> Result<Weight> {
    let (e0, e1) = eta.as_integers().ok_or_else(|| Error::Inadmissible(format!("eta = ({eta}) is not integral")))?;
    let (c0, c1) = chi.as_integers().ok_or_else(|| Error::Inadmissible(format!("chi = ({chi}) is not integral")))?;
    if (e0 - c0).rem_euclid(2) != 0 || (e1 - c1).rem_euclid(2) != 0 {
        return Err(Error::ParityMismatch(format!("eta = ({eta}) and chi = ({chi}) differ by an odd value")));
    }
    let m0 = e0.abs().max(c0.abs());
    let m1 = e1.abs().max(c1.abs());
    Ok(Weight::from_fundamental(m0, m1, 0))
}
