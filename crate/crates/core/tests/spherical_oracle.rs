//! The recursive solver against the brute-force construction inside the
//! irreducible module, including characters with `η ≠ χ`.

use casimir_lab::characters_denominators::kac_weyl_character;
use casimir_lab::formal_series::equal_on_window;
use casimir_lab::radial_operator::Character1D;
use casimir_lab::spherical::{admissible, oracle_spherical, solve_spherical, weight_multiplicity};
use casimir_lab::{Coefficient, Weight};

fn ch(a: i64, b: i64) -> Character1D {
    Character1D::new(a, b)
}

fn pairs() -> Vec<(Character1D, Character1D)> {
    let vals = [(0, 0), (1, 1), (2, 0), (0, 2), (1, -1), (-2, 0), (2, 2)];
    let mut out = Vec::new();
    for e in vals {
        for c in vals {
            if e != c {
                out.push((ch(e.0, e.1), ch(c.0, c.1)));
            }
        }
    }
    out
}

fn admissible_cases(max_level: i64) -> Vec<(Weight, Character1D, Character1D)> {
    let mut out = Vec::new();
    for (eta, chi) in pairs() {
        for k in 0..=max_level {
            for a in 0..=k {
                let l = Weight::new(a, k, 0);
                if admissible(&l, &eta, &chi).unwrap() {
                    out.push((l, eta.clone(), chi.clone()));
                }
            }
        }
    }
    out
}

#[test]
fn solver_matches_oracle_for_distinct_characters() {
    let cases = admissible_cases(4);
    assert!(cases.len() >= 10, "too few admissible cases: {}", cases.len());
    for (l, eta, chi) in cases {
        let depth = 3;
        let r = solve_spherical(&l, &eta, &chi, depth).unwrap();
        let o = oracle_spherical(&l, &eta, &chi, depth as usize).unwrap();
        let cmp = equal_on_window(&r.series, &o);
        assert!(cmp.equal, "lambda={l} eta={eta} chi={chi}: {:?}", cmp.first_difference);
        assert_eq!(cmp.window, Some(r.g2_floor()));
    }
}

#[test]
fn negating_eta_breaks_agreement() {
    // With η ↦ −η the solver computes a different function; the oracle for
    // the original pair must disagree somewhere.
    let mut disagreements = 0;
    let mut compared = 0;
    for (l, eta, chi) in admissible_cases(4) {
        let neg = Character1D::from_rationals(-eta.b0.clone(), -eta.b1.clone());
        if neg == eta || neg == chi {
            continue;
        }
        let Ok(r) = solve_spherical(&l, &neg, &chi, 3) else { continue };
        let o = oracle_spherical(&l, &eta, &chi, 3).unwrap();
        compared += 1;
        if !equal_on_window(&r.series, &o).equal {
            disagreements += 1;
        }
    }
    assert!(compared > 0);
    assert!(disagreements > 0, "negated eta agreed in all {compared} cases");
}

#[test]
fn oracle_rejects_inadmissible_input() {
    assert!(oracle_spherical(&Weight::OMEGA0, &ch(1, 0), &ch(0, 0), 2).is_err());
    assert!(oracle_spherical(&Weight::new(0, 2, 0), &ch(0, 0), &ch(0, 0), 7).is_err());
}

#[test]
fn character_coefficients_are_weight_multiplicities() {
    for l in [Weight::OMEGA0, Weight::OMEGA1, Weight::RHO, Weight::new(1, 3, 0)] {
        let depth = 3usize;
        let floor = l.g2() - 2 * depth as i64;
        let chr = kac_weyl_character(&l, floor).unwrap();
        for s in 0..=depth {
            for n0 in 0..=s {
                let n1 = s - n0;
                let mu = l - (n0 as i64) * Weight::ALPHA0 - (n1 as i64) * Weight::ALPHA1;
                if mu.g2() < floor {
                    continue;
                }
                let mult = weight_multiplicity(&l, n0, n1).unwrap();
                assert_eq!(chr.coeff(&mu), Coefficient::from_int(mult as i64), "lambda={l}, mu={mu}");
            }
        }
    }
}

#[test]
fn basic_module_multiplicities() {
    // V(ϖ₀) has the string ϖ₀, ϖ₀ − α₀, ϖ₀ − α₀ − α₁, ϖ₀ − 2α₀ − α₁, ...,
    // and the weight ϖ₀ − δ has multiplicity 1.
    assert_eq!(weight_multiplicity(&Weight::OMEGA0, 0, 0).unwrap(), 1);
    assert_eq!(weight_multiplicity(&Weight::OMEGA0, 2, 0).unwrap(), 0);
    assert_eq!(weight_multiplicity(&Weight::OMEGA0, 2, 1).unwrap(), 1);
    assert_eq!(weight_multiplicity(&Weight::OMEGA0, 2, 2).unwrap(), 2);
}
