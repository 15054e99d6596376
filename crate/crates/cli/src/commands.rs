use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use casimir_lab::characters_denominators::{
    alternating_sum, denominator1, denominator2, denominator_half, kac_weyl_character, orbit_sum as orbit_sum_series,
    window_w_invariance,
};
use casimir_lab::formal_series::equal_on_window;
use casimir_lab::radial_operator::{
    apply_radial, conjugation_identity_check, delta_square_check, denominator_identity_check, v_identity_check,
    Character1D, RadialOperatorSpec,
};
use casimir_lab::spherical::{
    divisibility_check, eigen_residual_check, heun_kzb_numeric_check, invariance_and_support_checks, oracle_spherical,
    solve_spherical, HeunResidual, SphericalJson, SphericalResult,
};
use casimir_lab::theta_weierstrass::{
    eval_series, theta_char_product_series, theta_char_series, wp_identity_check, wp_series as wp_series_lib,
    EvalPoint, NumericValue, ThetaChar,
};
use casimir_lab::{CheckReport, Error, TruncatedSeries, Weight};

use crate::parse;

/// Largest solver depth (in steps) for which `--oracle` compares terms.
const ORACLE_MAX_STEPS: i64 = 4;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Math(Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) | CliError::Math(Error::Parse(_)) => 2,
            CliError::Math(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Io(m) => write!(f, "io: {m}"),
            CliError::Math(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Math(e)
    }
}

/// A command result in both output formats, plus whether every check
/// it ran passed.
pub struct Rendered {
    pub json: String,
    pub csv: String,
    pub pass: bool,
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("output serializes");
    s.push('\n');
    s
}

fn csv_string<F>(header: &[&str], fill: F) -> String
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    fill(&mut w).expect("in-memory csv");
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
}

fn render_series(s: &TruncatedSeries) -> Rendered {
    let mut json = s.to_json();
    json.push('\n');
    Rendered { json, csv: s.to_csv(), pass: true }
}

fn reports_csv(reports: &[CheckReport]) -> String {
    csv_string(&["check", "window", "pass", "witness"], |w| {
        for r in reports {
            let window = r.window.map(|x| x.to_string()).unwrap_or_default();
            w.write_record([r.check.as_str(), &window, if r.pass { "true" } else { "false" }, r.witness.as_deref().unwrap_or("")])?;
        }
        Ok(())
    })
}

fn render_reports(reports: Vec<CheckReport>) -> Rendered {
    let pass = reports.iter().all(|r| r.pass);
    Rendered { json: to_json(&reports), csv: reports_csv(&reports), pass }
}

fn render_numeric(v: &NumericValue, pass: bool) -> Rendered {
    let csv = csv_string(&["re", "im", "tail_bound"], |w| {
        w.write_record([v.re.to_string(), v.im.to_string(), v.tail_bound.to_string()])
    });
    Rendered { json: to_json(v), csv, pass }
}

fn depth_nonnegative(depth: i64) -> Result<i64, CliError> {
    if depth < 0 {
        return Err(CliError::Usage(format!("--depth must be non-negative, got {depth}")));
    }
    Ok(depth)
}

fn theta_char(s: &str) -> Result<ThetaChar, CliError> {
    s.parse().map_err(|e: Error| CliError::Usage(e.to_string()))
}

fn character1d(s: &str) -> Result<Character1D, CliError> {
    s.parse().map_err(|e: Error| CliError::Usage(e.to_string()))
}

fn eval_point(z: &str, tau: &str) -> Result<EvalPoint, CliError> {
    Ok(EvalPoint::new(parse::complex(z)?, parse::complex(tau)?)?)
}

pub fn wp_series(chr: &str, ypow: i64, qpow: i64, depth: i64) -> Result<Rendered, CliError> {
    let c = theta_char(chr)?;
    let s = wp_series_lib(c, ypow, qpow, -depth_nonnegative(depth)?)?;
    Ok(render_series(&s))
}

/// Sum and product forms of one theta function agree down to `floor`.
/// The odd-characteristic series move in steps of 4, so both are built
/// from the next multiple of 4 below `floor`.
fn theta_report(c: ThetaChar, floor: i64) -> Result<CheckReport, Error> {
    let built = floor.div_euclid(4) * 4;
    let cmp = equal_on_window(&theta_char_series(c, built), &theta_char_product_series(c, built)?);
    Ok(CheckReport::from_comparison_reaching(format!("theta{c}_sum_vs_product"), &cmp, floor))
}

pub fn theta_check(depth: i64) -> Result<Rendered, CliError> {
    let floor = -depth_nonnegative(depth)?;
    let reports = ThetaChar::ALL.par_iter().map(|&c| theta_report(c, floor)).collect::<Result<Vec<_>, Error>>()?;
    Ok(render_reports(reports))
}

pub fn denominator(which: &str, depth: i64) -> Result<Rendered, CliError> {
    let depth = depth_nonnegative(depth)?;
    let rho = Weight::RHO.g2();
    let s = match which {
        "1" => denominator1(rho - depth)?,
        "2" => denominator2(2 * rho - depth)?,
        "half" => denominator_half(rho - depth)?,
        other => return Err(CliError::Usage(format!("--which must be 1, 2 or half, got '{other}'"))),
    };
    Ok(render_series(&s))
}

pub fn orbit_sum(lambda: &str, depth: i64) -> Result<Rendered, CliError> {
    let l = parse::weight(lambda)?;
    let top = casimir_lab::weight_lattice::dominant_representative(&l)?.0.g2();
    let s = orbit_sum_series(&l, top - depth_nonnegative(depth)?)?;
    Ok(render_series(&s))
}

pub fn character(lambda: &str, depth: i64) -> Result<Rendered, CliError> {
    let l = parse::weight(lambda)?;
    let s = kac_weyl_character(&l, l.g2() - depth_nonnegative(depth)?)?;
    Ok(render_series(&s))
}

fn read_series(path: &Path) -> Result<TruncatedSeries, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(TruncatedSeries::from_json(&text)?)
}

pub fn radial_apply(
    eta: &str,
    chi: &str,
    conjugated: bool,
    input: &Path,
    depth: i64,
    echo: bool,
) -> Result<Rendered, CliError> {
    let eta = character1d(eta)?;
    let chi = character1d(chi)?;
    let depth = depth_nonnegative(depth)?;
    let f = read_series(input)?;
    if echo {
        return Ok(render_series(&f));
    }
    let top = f
        .sorted_terms()
        .first()
        .map(|(g, _, _)| *g)
        .or(f.g2_ceil())
        .unwrap_or(0);
    let spec = RadialOperatorSpec::new(eta, chi, conjugated, top - depth);
    Ok(render_series(&apply_radial(&spec, &f)?))
}

type Job = Box<dyn Fn() -> Result<Vec<CheckReport>, Error> + Send + Sync>;

fn one(r: Result<CheckReport, Error>) -> Result<Vec<CheckReport>, Error> {
    r.map(|x| vec![x])
}

fn spherical_suite(l: Weight, c: (i64, i64), steps: i64) -> Result<Vec<CheckReport>, Error> {
    let ch = Character1D::new(c.0, c.1);
    let r = solve_spherical(&l, &ch, &ch, steps)?;
    let mut out = vec![eigen_residual_check(&r)?];
    out.extend(invariance_and_support_checks(&r)?);
    Ok(out)
}

fn identity_jobs(floor: i64) -> Vec<Job> {
    let mut jobs: Vec<Job> = vec![Box::new(move || wp_identity_check(floor))];
    for c in ThetaChar::ALL {
        jobs.push(Box::new(move || one(theta_report(c, floor))));
    }
    jobs.push(Box::new(move || one(delta_square_check(floor))));
    jobs.push(Box::new(move || one(denominator_identity_check(floor, false))));
    jobs.push(Box::new(move || one(v_identity_check(floor, false))));
    for l in [Weight::OMEGA0, Weight::OMEGA1, Weight::RHO, 2 * Weight::OMEGA1] {
        jobs.push(Box::new(move || {
            let mut r = window_w_invariance(&kac_weyl_character(&l, l.g2() + floor)?, 0, false)?;
            r.check = format!("character_w_invariance[lambda={l}]");
            one(Ok(r))
        }));
        jobs.push(Box::new(move || {
            let shifted = l + Weight::RHO;
            let mut r = window_w_invariance(&alternating_sum(&shifted, shifted.g2() + floor)?, 0, true)?;
            r.check = format!("alternating_sum_anti_invariance[lambda={shifted}]");
            one(Ok(r))
        }));
    }
    let weights = [Weight::ZERO, Weight::OMEGA0, Weight::OMEGA1, Weight::DELTA];
    for (e, c) in [((0, 0), (0, 0)), ((1, 1), (1, 1)), ((2, 0), (0, 0)), ((1, 3), (1, 1))] {
        jobs.push(Box::new(move || {
            let spec = RadialOperatorSpec::new(Character1D::new(e.0, e.1), Character1D::new(c.0, c.1), false, floor);
            conjugation_identity_check(&spec, &weights, floor)
        }));
    }
    let steps = -floor / 2;
    for (l, c) in [(2 * Weight::OMEGA1, (0, 0)), (Weight::new(2, 4, 0), (0, 0)), (Weight::OMEGA0 + Weight::OMEGA1, (1, 1))] {
        jobs.push(Box::new(move || spherical_suite(l, c, steps)));
    }
    jobs
}

pub fn identity_suite(depth: i64) -> Result<Rendered, CliError> {
    let floor = -depth_nonnegative(depth)?;
    let jobs = identity_jobs(floor);
    let results: Vec<Result<Vec<CheckReport>, Error>> = jobs.par_iter().map(|j| j()).collect();
    let mut reports = Vec::new();
    for r in results {
        reports.extend(r?);
    }
    Ok(render_reports(reports))
}

#[derive(Serialize)]
struct SphericalOutput {
    #[serde(flatten)]
    result: SphericalJson,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    checks: Vec<CheckReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    heun_residuals: Vec<HeunResidual>,
}

fn solve_from_flags(lambda: &str, eta: &str, chi: &str, depth: i64) -> Result<SphericalResult, CliError> {
    let l = parse::weight(lambda)?;
    let eta = character1d(eta)?;
    let chi = character1d(chi)?;
    let steps = depth_nonnegative(depth)? / 2;
    Ok(solve_spherical(&l, &eta, &chi, steps)?)
}

fn oracle_report(r: &SphericalResult) -> Result<CheckReport, CliError> {
    let steps = r.depth.min(ORACLE_MAX_STEPS);
    let oracle = oracle_spherical(&r.lambda, &r.eta, &r.chi, steps as usize)?;
    let floor = r.lambda.g2() - 2 * steps;
    let cmp = equal_on_window(&r.series.truncate(floor), &oracle);
    Ok(CheckReport::from_comparison_reaching(
        format!("oracle[lambda={},eta={},chi={}]", r.lambda, r.eta, r.chi),
        &cmp,
        floor,
    ))
}

pub fn spherical(
    lambda: &str,
    eta: &str,
    chi: &str,
    depth: i64,
    oracle: bool,
    check_invariance: bool,
    heun: Option<(&str, &str, f64)>,
) -> Result<Rendered, CliError> {
    let r = solve_from_flags(lambda, eta, chi, depth)?;
    let mut checks = Vec::new();
    let mut heun_residuals = Vec::new();
    if oracle {
        checks.push(oracle_report(&r)?);
    }
    if check_invariance {
        checks.push(eigen_residual_check(&r)?);
        checks.extend(invariance_and_support_checks(&r)?);
        if r.lambda.k >= 1 {
            checks.extend(divisibility_check(&r)?.1);
        }
    }
    if let Some((z, tau, tol)) = heun {
        let (rep, res) = heun_kzb_numeric_check(&r, &[eval_point(z, tau)?], tol)?;
        checks.push(rep);
        heun_residuals = res;
    }
    let pass = checks.iter().all(|c| c.pass);
    let csv = r.series.to_csv();
    let mut result = r.to_json_value();
    result.depth = 2 * r.depth;
    let out = SphericalOutput { result, checks, heun_residuals };
    Ok(Rendered { json: to_json(&out), csv, pass })
}

pub fn wp_eval(chr: &str, z: &str, tau: &str, depth: i64, tol: f64) -> Result<Rendered, CliError> {
    let c = theta_char(chr)?;
    let p = eval_point(z, tau)?;
    if !p.in_domain_d() {
        return Err(Error::InvalidPoint(format!("z = {} is outside the convergence domain for tau = {}", p.z, p.tau)).into());
    }
    let s = wp_series_lib(c, 1, 1, -depth_nonnegative(depth)?)?;
    let v = eval_series(&s, &p)?;
    let scale = 4.0 * PI * PI;
    let v = NumericValue::new(v.value() * scale, v.tail_bound * scale);
    let pass = v.tail_bound <= tol;
    Ok(render_numeric(&v, pass))
}

#[derive(Serialize)]
struct HeunOutput {
    #[serde(flatten)]
    report: CheckReport,
    residuals: Vec<HeunResidual>,
}

pub fn heun_eval(lambda: &str, eta: &str, chi: &str, depth: i64, z: &str, tau: &str, tol: f64) -> Result<Rendered, CliError> {
    let r = solve_from_flags(lambda, eta, chi, depth)?;
    let (report, residuals) = heun_kzb_numeric_check(&r, &[eval_point(z, tau)?], tol)?;
    let csv = csv_string(&["z_re", "z_im", "tau_re", "tau_im", "residual"], |w| {
        for h in &residuals {
            w.write_record([h.z_re, h.z_im, h.tau_re, h.tau_im, h.residual].map(|x| x.to_string()))?;
        }
        Ok(())
    });
    let pass = report.pass;
    Ok(Rendered { json: to_json(&HeunOutput { report, residuals }), csv, pass })
}
