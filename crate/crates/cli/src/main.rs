mod commands;
mod parse;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{CliError, Rendered};

/// Exact q-series computations for affine sl2: Weierstrass and theta
/// series, Weyl denominators, the radial Casimir operator and twisted
/// zonal spherical functions.
///
/// All `--depth` values are measured in g2 units (twice the grade against
/// rho). A depth of D keeps every term whose g2 lies within D of the top.
#[derive(Parser, Debug)]
#[command(name = "casimir-lab", version)]
struct Cli {
    #[command(flatten)]
    output: OutputArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

const DEFAULT_Z: &str = "0.3-0.1i";
const DEFAULT_TAU: &str = "3i";
const DEFAULT_TOL: f64 = 1e-8;

#[derive(Subcommand, Debug)]
enum Command {
    /// Normalized Weierstrass series P_ij, optionally after substituting
    /// y -> y^ypow and q -> q^qpow.
    WpSeries {
        #[arg(long = "char", default_value = "11")]
        chr: String,
        #[arg(long, default_value_t = 1)]
        ypow: i64,
        #[arg(long, default_value_t = 1)]
        qpow: i64,
        #[arg(long)]
        depth: i64,
    },
    /// Compare the sum and product forms of the four theta functions.
    ThetaCheck {
        #[arg(long)]
        depth: i64,
    },
    /// Weyl denominators: 1 and 2 are the first and second denominators,
    /// half is the square root of the second.
    Denominator {
        #[arg(long)]
        which: String,
        #[arg(long)]
        depth: i64,
    },
    /// Weyl orbit sum of a weight given as a,k,m.
    OrbitSum {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value_t = 20)]
        depth: i64,
    },
    /// Kac-Weyl character of a dominant weight given as a,k,m.
    Character {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value_t = 20)]
        depth: i64,
    },
    /// Apply the radial Casimir operator to a series read from JSON.
    RadialApply {
        #[arg(long, allow_hyphen_values = true)]
        eta: String,
        #[arg(long, allow_hyphen_values = true)]
        chi: String,
        /// Use the operator conjugated by the half denominator.
        #[arg(long)]
        conjugated: bool,
        #[arg(long)]
        input: std::path::PathBuf,
        #[arg(long)]
        depth: i64,
        /// Skip the operator and re-emit the parsed input series.
        #[arg(long)]
        echo: bool,
    },
    /// Run every exact identity check down to g2 = -depth.
    IdentitySuite {
        #[arg(long)]
        depth: i64,
    },
    /// Solve for a twisted zonal spherical function. The solver takes
    /// depth/2 steps, each lowering g2 by 2.
    Spherical {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0,0")]
        eta: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0,0")]
        chi: String,
        #[arg(long)]
        depth: i64,
        /// Compare against the representation-theoretic construction.
        #[arg(long)]
        oracle: bool,
        /// Run the W-invariance and support checks.
        #[arg(long)]
        check_invariance: bool,
        /// Evaluate the Heun-KZB residual at (z, tau).
        #[arg(long)]
        heun_check: bool,
        #[arg(long, allow_hyphen_values = true, default_value = DEFAULT_Z)]
        z: String,
        #[arg(long, allow_hyphen_values = true, default_value = DEFAULT_TAU)]
        tau: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Evaluate the Weierstrass function of a characteristic at (z, tau)
    /// from its series.
    WpEval {
        #[arg(long = "char", default_value = "11")]
        chr: String,
        #[arg(long, allow_hyphen_values = true, default_value = DEFAULT_Z)]
        z: String,
        #[arg(long, allow_hyphen_values = true, default_value = DEFAULT_TAU)]
        tau: String,
        #[arg(long, default_value_t = 120)]
        depth: i64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Heun-KZB residual of a spherical function at one point.
    HeunEval {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0,0")]
        eta: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0,0")]
        chi: String,
        #[arg(long, default_value_t = 80)]
        depth: i64,
        #[arg(long, allow_hyphen_values = true, default_value = DEFAULT_Z)]
        z: String,
        #[arg(long, allow_hyphen_values = true, default_value = DEFAULT_TAU)]
        tau: String,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("CASIMIR_LAB_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Usage(format!("CASIMIR_LAB_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot configure thread pool: {e}")))
}

fn dispatch(cmd: Command) -> Result<Rendered, CliError> {
    use commands as c;
    match cmd {
        Command::WpSeries { chr, ypow, qpow, depth } => c::wp_series(&chr, ypow, qpow, depth),
        Command::ThetaCheck { depth } => c::theta_check(depth),
        Command::Denominator { which, depth } => c::denominator(&which, depth),
        Command::OrbitSum { lambda, depth } => c::orbit_sum(&lambda, depth),
        Command::Character { lambda, depth } => c::character(&lambda, depth),
        Command::RadialApply { eta, chi, conjugated, input, depth, echo } => {
            c::radial_apply(&eta, &chi, conjugated, &input, depth, echo)
        }
        Command::IdentitySuite { depth } => c::identity_suite(depth),
        Command::Spherical { lambda, eta, chi, depth, oracle, check_invariance, heun_check, z, tau, tol } => {
            let heun = heun_check.then_some((z.as_str(), tau.as_str(), tol));
            c::spherical(&lambda, &eta, &chi, depth, oracle, check_invariance, heun)
        }
        Command::WpEval { chr, z, tau, depth, tol } => c::wp_eval(&chr, &z, &tau, depth, tol),
        Command::HeunEval { lambda, eta, chi, depth, z, tau, tol } => c::heun_eval(&lambda, &eta, &chi, depth, &z, &tau, tol),
    }
}

fn write_output(out: &OutputArgs, text: &str) -> Result<(), CliError> {
    match &out.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}

fn run() -> Result<bool, CliError> {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return Ok(true);
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            return Err(CliError::Usage(first.trim_start_matches("error: ").to_string()));
        }
    };
    configure_threads()?;
    let rendered = dispatch(cli.command)?;
    let text = match cli.output.format {
        Format::Json => rendered.json,
        Format::Csv => rendered.csv,
    };
    write_output(&cli.output, &text)?;
    Ok(rendered.pass)
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", one_line(&e.to_string()));
            ExitCode::from(e.exit_code())
        }
    }
}
