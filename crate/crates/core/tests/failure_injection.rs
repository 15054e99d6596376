//! Deliberately broken inputs must produce failing reports with a witness.

use casimir_lab::characters_denominators::{orbit_sum, window_w_invariance};
use casimir_lab::radial_operator::{
    conjugation_identity_check, denominator_identity_check, v_identity_check, Character1D, RadialOperatorSpec,
};
use casimir_lab::spherical::{eigen_residual_check, solve_spherical};
use casimir_lab::{Coefficient, TruncatedSeries, Weight};

#[test]
fn perturbed_conjugation_fails_with_witness() {
    let weights = [Weight::ZERO, Weight::OMEGA1, Weight::new(2, 2, -1)];
    for i in 0..4 {
        let mut spec = RadialOperatorSpec::new(Character1D::new(1, 1), Character1D::new(1, 1), false, -12);
        assert!(conjugation_identity_check(&spec, &weights, -12).unwrap().iter().all(|r| r.pass));
        spec.perturbation = Some((i, 1));
        let reports = conjugation_identity_check(&spec, &weights, -12).unwrap();
        assert!(reports.iter().all(|r| !r.pass), "perturbing coefficient {i} went unnoticed");
        assert!(reports.iter().all(|r| r.witness.is_some()));
    }
}

#[test]
fn dropping_cross_terms_breaks_the_v_identity() {
    assert!(v_identity_check(-16, false).unwrap().pass);
    let r = v_identity_check(-16, true).unwrap();
    assert!(!r.pass);
    assert!(r.witness.is_some());
}

#[test]
fn first_denominator_has_a_different_laplace_eigenvalue() {
    let r = denominator_identity_check(-12, true).unwrap();
    assert!(!r.pass);
    assert!(r.witness.unwrap().contains("1/2"));
}

#[test]
fn broken_orbit_sum_is_not_invariant() {
    let l = Weight::new(1, 3, 0);
    let f = orbit_sum(&l, -20).unwrap();
    assert!(window_w_invariance(&f, 0, false).unwrap().pass);
    let extra = TruncatedSeries::monomial_with(Weight::new(-1, 3, -1), Coefficient::from_int(1));
    let broken = f.add(&extra.truncate(-20)).unwrap();
    let r = window_w_invariance(&broken, 0, false).unwrap();
    assert!(!r.pass);
    assert!(r.witness.is_some());
}

#[test]
fn altered_spherical_series_fails_the_residual() {
    let c = Character1D::new(1, 1);
    let mut r = solve_spherical(&(Weight::OMEGA0 + Weight::OMEGA1), &c, &c, 6).unwrap();
    assert!(eigen_residual_check(&r).unwrap().pass);
    let bump = TruncatedSeries::monomial(r.lambda - Weight::ALPHA1 - Weight::ALPHA0).truncate(r.g2_floor());
    r.series = r.series.add(&bump).unwrap();
    let rep = eigen_residual_check(&r).unwrap();
    assert!(!rep.pass);
    assert!(rep.witness.is_some());
}

#[test]
fn wrong_eigenvalue_fails_the_residual() {
    let mut r = solve_spherical(&Weight::new(2, 2, 0), &Character1D::trivial(), &Character1D::trivial(), 5).unwrap();
    r.eigenvalue += num_rational::BigRational::from_integer(1.into());
    assert!(!eigen_residual_check(&r).unwrap().pass);
}
