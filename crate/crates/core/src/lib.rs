//! Exact q-series arithmetic for affine sl2: weight lattice, truncated
//! series with completeness windows, theta and Weierstrass series, Weyl
//! denominators and characters, the radial part of the Casimir element and
//! a solver for twisted zonal spherical functions.

pub mod characters_denominators;
pub mod coeff;
pub mod error;
pub mod formal_series;
pub mod radial_operator;
pub mod report;
pub mod spherical;
pub mod theta_weierstrass;
pub mod weight_lattice;

pub use coeff::Coefficient;
pub use error::{Error, Result};
pub use formal_series::TruncatedSeries;
pub use weight_lattice::{PositiveRoot, Weight, WeylElement};
pub use report::CheckReport;
