//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit status
//! if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use casimir_lab::formal_series::{equal_on_window, TruncatedSeries};
use casimir_lab::radial_operator::{
    conjugation_identity_check, delta_square_check, denominator_identity_check, v_identity_check, Character1D,
    RadialOperatorSpec,
};
use casimir_lab::spherical::{
    admissible, divisibility_check, eigen_residual_check, heun_kzb_numeric_check, invariance_and_support_checks,
    oracle_spherical, solve_spherical,
};
use casimir_lab::theta_weierstrass::{
    eval_series, theta_char_numeric, theta_char_product_series, theta_char_series, theta_numeric, wp_char_lattice,
    wp_identity_check, wp_series, EvalPoint, ThetaChar,
};
use casimir_lab::{CheckReport, Weight};
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { pass: false, detail: detail.into() }
}

fn first_failure(reports: &[CheckReport]) -> Option<String> {
    reports.iter().find(|r| !r.pass).map(|r| format!("{} failed: {}", r.check, r.witness.clone().unwrap_or_default()))
}

fn from_reports(reports: Vec<CheckReport>, limit: Option<Duration>, elapsed: Duration) -> Outcome {
    if let Some(msg) = first_failure(&reports) {
        return fail(msg);
    }
    if let Some(lim) = limit {
        if elapsed > lim {
            return fail(format!("{} checks passed but took {:.2?} (limit {:.0?})", reports.len(), elapsed, lim));
        }
    }
    Outcome { pass: true, detail: format!("{} checks in {:.2?}", reports.len(), elapsed) }
}

fn ch(a: i64, b: i64) -> Character1D {
    Character1D::new(a, b)
}

fn criterion1() -> Outcome {
    let t = Instant::now();
    match wp_identity_check(-60) {
        Ok(r) => from_reports(r, Some(Duration::from_secs(5)), t.elapsed()),
        Err(e) => fail(e.to_string()),
    }
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * b.norm().max(1.0)
}

fn criterion2() -> Outcome {
    let t = Instant::now();
    let mut reports = Vec::new();
    for c in ThetaChar::ALL {
        let s = theta_char_series(c, -80);
        let p = match theta_char_product_series(c, -80) {
            Ok(p) => p,
            Err(e) => return fail(e.to_string()),
        };
        reports.push(CheckReport::from_comparison_reaching(format!("theta{c}_sum_vs_product"), &equal_on_window(&s, &p), -80));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let tol = 1e-12;
    let i_pi = Complex64::new(0.0, PI);
    for n in 0..10 {
        let tau = Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.8..2.0));
        let z = Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.4..0.4));
        let th = |w: Complex64| theta_numeric(w, tau, 1e-15).map(|v| v.value());
        let (Ok(t0), Ok(t1), Ok(tt), Ok(zero)) = (th(z), th(z + 1.0), th(z + tau), th((1.0 + tau) / 2.0)) else {
            return fail("theta evaluation failed");
        };
        let t11 = match theta_char_numeric(ThetaChar::C11, Complex64::new(0.0, 0.0), tau, 1e-15) {
            Ok(v) => v.value(),
            Err(e) => return fail(e.to_string()),
        };
        let factor = (-i_pi * tau - 2.0 * i_pi * z).exp();
        let ok = close(t1, t0, tol) && close(tt, factor * t0, tol) && zero.norm() < tol && t11.norm() < tol;
        reports.push(CheckReport::new(
            format!("theta_numeric_point_{n}"),
            None,
            ok,
            if ok { None } else { Some(format!("z={z}, tau={tau}")) },
        ));
    }
    from_reports(reports, None, t.elapsed())
}

fn criterion3() -> Outcome {
    let t = Instant::now();
    let r = delta_square_check(-60).and_then(|a| Ok(vec![a, denominator_identity_check(-60, false)?]));
    match r {
        Ok(r) => from_reports(r, None, t.elapsed()),
        Err(e) => fail(e.to_string()),
    }
}

fn criterion4() -> Outcome {
    let t = Instant::now();
    match v_identity_check(-24, false) {
        Ok(r) => from_reports(vec![r], None, t.elapsed()),
        Err(e) => fail(e.to_string()),
    }
}

fn criterion5() -> Outcome {
    let t = Instant::now();
    let etas = [(0, 0), (1, 1), (2, 0), (1, 3)];
    let chis = [(0, 0), (1, 1)];
    let weights = [
        Weight::ZERO,
        Weight::OMEGA0,
        Weight::OMEGA1,
        2 * Weight::OMEGA1,
        Weight::DELTA,
        Weight::new(2, 2, -1),
    ];
    let mut reports = Vec::new();
    for e in etas {
        for c in chis {
            if (e.0 - c.0) % 2 != 0 || (e.1 - c.1) % 2 != 0 {
                continue;
            }
            let spec = RadialOperatorSpec::new(ch(e.0, e.1), ch(c.0, c.1), false, -20);
            match conjugation_identity_check(&spec, &weights, -20) {
                Ok(r) => reports.extend(r),
                Err(err) => return fail(err.to_string()),
            }
        }
    }
    from_reports(reports, Some(Duration::from_secs(60)), t.elapsed())
}

const SYMMETRIC_CHARS: [(i64, i64); 3] = [(0, 0), (1, 1), (2, 0)];

fn admissible_weights(c: &Character1D, max_level: i64, max_h1: i64) -> Vec<Weight> {
    let mut out = Vec::new();
    for k in 0..=max_level {
        for a in 0..=k.min(max_h1) {
            let l = Weight::new(a, k, 0);
            if admissible(&l, c, c).unwrap_or(false) {
                out.push(l);
            }
        }
    }
    out
}

fn criterion6() -> Outcome {
    let t = Instant::now();
    let mut reports = Vec::new();
    let triv = Character1D::trivial();
    // Multiples of delta are their own spherical functions.
    for n in 1..=5 {
        let l = n * Weight::DELTA;
        let r = match solve_spherical(&l, &triv, &triv, 12) {
            Ok(r) => r,
            Err(e) => return fail(e.to_string()),
        };
        let series_ok = equal_on_window(&r.series, &TruncatedSeries::monomial(l)).equal;
        let eig_ok = r.eigenvalue == BigRational::from_integer((4 * n).into());
        reports.push(CheckReport::new(format!("delta_line_n{n}"), Some(r.g2_floor()), series_ok && eig_ok, None));
        match eigen_residual_check(&r) {
            Ok(rep) => reports.push(rep),
            Err(e) => return fail(e.to_string()),
        }
    }
    // Residual and invariance for symmetric characters.
    for c in SYMMETRIC_CHARS {
        let c = ch(c.0, c.1);
        for l in admissible_weights(&c, 3, 3) {
            let r = match solve_spherical(&l, &c, &c, 12) {
                Ok(r) => r,
                Err(e) => return fail(e.to_string()),
            };
            match eigen_residual_check(&r).and_then(|a| Ok((a, invariance_and_support_checks(&r)?))) {
                Ok((a, b)) => {
                    reports.push(a);
                    if b.is_empty() {
                        return fail(format!("no invariance report for {l}"));
                    }
                    reports.extend(b);
                }
                Err(e) => return fail(e.to_string()),
            }
        }
    }
    // Agreement with the module construction at small depth.
    for c in SYMMETRIC_CHARS {
        let c = ch(c.0, c.1);
        for l in admissible_weights(&c, 2, 2) {
            for d in 0..=3usize {
                let r = solve_spherical(&l, &c, &c, d as i64);
                let o = oracle_spherical(&l, &c, &c, d);
                match (r, o) {
                    (Ok(r), Ok(o)) => reports.push(CheckReport::from_comparison_reaching(
                        format!("oracle[{l},{c},depth {d}]"),
                        &equal_on_window(&r.series, &o),
                        r.g2_floor(),
                    )),
                    (Err(e), _) | (_, Err(e)) => return fail(e.to_string()),
                }
            }
        }
    }
    from_reports(reports, None, t.elapsed())
}

fn criterion7() -> Outcome {
    let t = Instant::now();
    let (eta, chi) = (ch(2, 0), ch(0, 0));
    let mut reports = Vec::new();
    let mut count = 0;
    for l in [Weight::new(0, 4, 0), Weight::new(2, 4, 0), Weight::new(2, 6, 0)] {
        let r = match solve_spherical(&l, &eta, &chi, 10) {
            Ok(r) => r,
            Err(e) => return fail(e.to_string()),
        };
        match divisibility_check(&r) {
            Ok((q, reps)) => {
                if q.level() < 1 {
                    return fail(format!("quotient for {l} has level 0"));
                }
                reports.extend(reps);
                count += 1;
            }
            Err(e) => return fail(e.to_string()),
        }
    }
    if count < 2 {
        return fail("fewer than two weights checked");
    }
    from_reports(reports, None, t.elapsed())
}

fn criterion8() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let series: Vec<(ThetaChar, TruncatedSeries)> =
        match ThetaChar::ALL.iter().map(|&c| wp_series(c, 1, 1, -60).map(|s| (c, s))).collect() {
            Ok(v) => v,
            Err(e) => return fail(e.to_string()),
        };
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let tau = Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(1.5..3.0));
        let z = Complex64::new(rng.gen_range(0.0..1.0), rng.gen_range((-tau.im / 2.0 + 0.2)..-0.2));
        let p = match EvalPoint::new(z, tau) {
            Ok(p) if p.in_domain_d() => p,
            _ => return fail(format!("sample point z={z}, tau={tau} is not in the domain")),
        };
        for (c, s) in &series {
            let (Ok(v), Ok(w)) = (eval_series(s, &p), wp_char_lattice(*c, z, tau, 1e-15)) else {
                return fail("numeric evaluation failed");
            };
            let diff = (v.value() * (4.0 * PI * PI) - w.value()).norm();
            worst = worst.max(diff);
            if diff >= 1e-8 {
                return fail(format!("P{c} at z={z}, tau={tau}: difference {diff:.3e}"));
            }
        }
    }
    Outcome { pass: true, detail: format!("80 comparisons, max difference {worst:.2e}, {:.2?}", t.elapsed()) }
}

fn criterion9() -> Outcome {
    let t = Instant::now();
    let point = match EvalPoint::new(Complex64::new(0.3, -0.1), Complex64::new(0.0, 4.0)) {
        Ok(p) => p,
        Err(e) => return fail(e.to_string()),
    };
    let mut reports = Vec::new();
    for (a, b) in [(0, 0), (1, 1)] {
        let c = ch(a, b);
        for l in [Weight::ZERO, Weight::DELTA, 2 * Weight::DELTA, 2 * Weight::OMEGA1] {
            if !admissible(&l, &c, &c).unwrap_or(false) {
                continue;
            }
            let r = match solve_spherical(&l, &c, &c, 40) {
                Ok(r) => r,
                Err(e) => return fail(e.to_string()),
            };
            match heun_kzb_numeric_check(&r, &[point], 1e-6) {
                Ok((rep, _)) => reports.push(rep),
                Err(e) => return fail(e.to_string()),
            }
        }
    }
    if reports.len() != 4 {
        return fail(format!("expected 4 admissible cases, found {}", reports.len()));
    }
    let worst = reports.iter().filter_map(|r| r.witness.clone()).last().unwrap_or_default();
    let mut out = from_reports(reports, Some(Duration::from_secs(120)), t.elapsed());
    if out.pass {
        out.detail = format!("{}, last case {worst}", out.detail);
    }
    out
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("wp doubling identities to g2 >= -60", criterion1),
        ("theta sum/product forms and numeric theta", criterion2),
        ("half denominator square and Laplacian of second denominator", criterion3),
        ("v identity to g2 >= -24", criterion4),
        ("conjugation identity on window -20", criterion5),
        ("spherical solver residual, invariance and oracle", criterion6),
        ("divisibility by the minimal spherical function", criterion7),
        ("numeric Weierstrass bridge at 20 points", criterion8),
        ("Heun-KZB eigen-check", criterion9),
    ];
    let mut all = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        all &= o.pass;
        println!("criterion {}: {} | {} | {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, name, o.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
