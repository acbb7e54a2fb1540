//! Command-line front end.

pub mod config;
pub mod validate;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::discriminator::{discriminate, read_sweep_csv, Thresholds, Verdict};
use crate::error::Error;
use crate::liouvillian::{assemble_generator, evolve, CoefficientSet, TwoQubitState};
use crate::shifts::{rcpi_closed, rcpi_envelope, rcpi_quadrature, sweep, DickeState};
use config::{ConfigError, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "rcpi",
    version,
    about = "Resonance interaction between entangled atoms in de Sitter and thermal flat space"
)]
pub struct Cli {
    /// Flat JSON configuration file
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Write output here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Treat soft problems (indeterminate verdicts, method disagreement,
    /// positivity flags) as failures
    #[arg(long, global = true)]
    pub strict: bool,
    /// Worker threads for sweeps
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Interaction energy at a single separation, closed form and quadrature
    Shift,
    /// Interaction energy over a range of separations
    Sweep,
    /// Integrate the two-atom master equation
    Evolve,
    /// Fit the envelope of a sweep and classify the background
    Discriminate {
        /// Sweep CSV; `-` or absent reads stdin
        input: Option<PathBuf>,
        #[arg(long)]
        l_min: Option<f64>,
        #[arg(long)]
        l_max: Option<f64>,
    },
    /// Run the built-in consistency checks
    Validate {
        #[arg(long, value_enum, default_value = "quick")]
        level: validate::Level,
    },
}

/// Failure of a command, carrying its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Validation(e.to_string())
    }
}

/// Formats a float with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialise");
    s.push('\n');
    s
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Usage("this command needs --config PATH".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    Ok(RunConfig::parse(&text)?)
}

#[derive(Serialize)]
struct MethodShift {
    #[serde(rename = "dE_S")]
    delta_e_s: f64,
    #[serde(rename = "dE_A")]
    delta_e_a: f64,
    error: f64,
}

#[derive(Serialize)]
struct ShiftReport {
    spacetime: crate::Spacetime,
    #[serde(rename = "L")]
    l: f64,
    omega0: f64,
    mu: f64,
    kappa: Option<f64>,
    #[serde(rename = "L_over_kappa")]
    l_over_kappa: Option<f64>,
    regime: &'static str,
    envelope: f64,
    closed_form: MethodShift,
    quadrature: MethodShift,
    relative_difference: f64,
}

fn regime_hint(l_over_kappa: Option<f64>) -> &'static str {
    match l_over_kappa {
        None => "flat: 1/L law at every temperature",
        Some(x) if x < 0.1 => "near: curvature invisible, 1/L law",
        Some(x) if x > 10.0 => "far: 1/L^2 law",
        Some(_) => "crossover",
    }
}

fn cmd_shift(cli: &Cli, cfg: &RunConfig) -> Result<String, CliError> {
    let atoms = cfg.atoms()?;
    let s = cfg.spacetime;
    let l = atoms.separation;
    let closed = rcpi_closed(&s, l, atoms.omega0, atoms.mu, DickeState::S)?;
    let quad = rcpi_quadrature(
        &s,
        l,
        atoms.omega0,
        atoms.mu,
        DickeState::S,
        &cfg.quadrature,
    )?;
    let envelope = rcpi_envelope(&s, l, atoms.mu);
    // measured against the envelope so zero crossings stay meaningful
    let relative_difference = (quad.delta_e - closed).abs() / envelope;
    if cli.strict && relative_difference > 1e-6 {
        return Err(CliError::Validation(format!(
            "closed form {closed:e} and quadrature {:e} differ by {relative_difference:e} of the envelope",
            quad.delta_e
        )));
    }
    let kappa = s.kappa();
    let report = ShiftReport {
        spacetime: s,
        l,
        omega0: atoms.omega0,
        mu: atoms.mu,
        kappa,
        l_over_kappa: kappa.map(|k| l / k),
        regime: regime_hint(kappa.map(|k| l / k)),
        envelope,
        closed_form: MethodShift {
            delta_e_s: closed,
            delta_e_a: -closed,
            error: 0.0,
        },
        quadrature: MethodShift {
            delta_e_s: quad.delta_e,
            delta_e_a: -quad.delta_e,
            error: quad.error,
        },
        relative_difference,
    };
    Ok(match cli.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut out = String::from("method,dE_S,dE_A,error\n");
            for (name, m) in [
                ("closed_form", &report.closed_form),
                ("quadrature", &report.quadrature),
            ] {
                let _ = writeln!(
                    out,
                    "{name},{},{},{}",
                    fmt_float(m.delta_e_s),
                    fmt_float(m.delta_e_a),
                    fmt_float(m.error)
                );
            }
            out
        }
    })
}

fn cmd_sweep(cli: &Cli, cfg: &RunConfig) -> Result<String, CliError> {
    let sc = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Usage("sweep needs l_min and l_max in the config".into()))?;
    let rows = sweep(
        &cfg.spacetime,
        &sc.grid(),
        cfg.omega0,
        cfg.mu,
        sc.method,
        &cfg.quadrature,
    )?;
    Ok(match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut out = String::from(if sc.envelope_column {
                "L,dE_S,dE_A,envelope\n"
            } else {
                "L,dE_S,dE_A\n"
            });
            for r in &rows {
                let _ = write!(
                    out,
                    "{},{},{}",
                    fmt_float(r.l),
                    fmt_float(r.delta_e_s),
                    fmt_float(r.delta_e_a)
                );
                if sc.envelope_column {
                    let _ = write!(out, ",{}", fmt_float(r.envelope));
                }
                out.push('\n');
            }
            out
        }
        Format::Json => to_json(&rows),
    })
}

#[derive(Serialize)]
struct TrajectoryRow {
    tau: f64,
    #[serde(rename = "pG")]
    p_g: f64,
    #[serde(rename = "pE")]
    p_e: f64,
    #[serde(rename = "pS")]
    p_s: f64,
    #[serde(rename = "pA")]
    p_a: f64,
    trace: f64,
    min_eig: f64,
}

fn cmd_evolve(cli: &Cli, cfg: &RunConfig) -> Result<String, CliError> {
    let ec = cfg
        .evolve
        .as_ref()
        .ok_or_else(|| CliError::Usage("evolve needs tau_max in the config".into()))?;
    let atoms = cfg.atoms()?;
    let coeffs = CoefficientSet::compute(&cfg.spacetime, &atoms, ec.cutoff, &cfg.quadrature)?;
    let gen = assemble_generator(&coeffs, atoms.omega0);
    let traj = evolve(
        &TwoQubitState::pure(ec.initial_state),
        &gen,
        &ec.grid(),
        &ec.options,
    )?;
    if cli.strict && traj.positivity_violated {
        return Err(CliError::Numerical(
            "density matrix lost positivity beyond -1e-8".into(),
        ));
    }
    let rows: Vec<TrajectoryRow> = traj
        .points
        .iter()
        .map(|p| {
            let [p_g, p_e, p_s, p_a, trace, min_eig] = p.diagnostics();
            TrajectoryRow {
                tau: p.tau,
                p_g,
                p_e,
                p_s,
                p_a,
                trace,
                min_eig,
            }
        })
        .collect();
    Ok(match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut out = String::from("tau,pG,pE,pS,pA,trace,min_eig\n");
            for r in &rows {
                let cols = [r.tau, r.p_g, r.p_e, r.p_s, r.p_a, r.trace, r.min_eig].map(fmt_float);
                out.push_str(&cols.join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => to_json(&rows),
    })
}

fn cmd_discriminate(
    cli: &Cli,
    input: Option<&PathBuf>,
    l_min: Option<f64>,
    l_max: Option<f64>,
) -> Result<String, CliError> {
    let mut text = String::new();
    match input {
        Some(p) if p.as_os_str() != "-" => {
            text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))?
        }
        _ => {
            io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| CliError::Usage(format!("cannot read stdin: {e}")))?;
        }
    }
    let records = read_sweep_csv(text.as_bytes())?;
    let window = match (l_min, l_max) {
        (None, None) => None,
        (a, b) => Some((a.unwrap_or(0.0), b.unwrap_or(f64::INFINITY))),
    };
    let d = discriminate(&records, window, &Thresholds::default())?;
    let out = match cli.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&d),
        Format::Csv => format!(
            "exponent,amplitude,residual_rms,L_min,L_max,n_points,verdict\n{},{},{},{},{},{},{:?}\n",
            fmt_float(d.exponent),
            fmt_float(d.amplitude),
            fmt_float(d.residual_rms),
            fmt_float(d.window.0),
            fmt_float(d.window.1),
            d.n_points,
            d.verdict
        ),
    };
    if cli.strict && d.verdict == Verdict::Indeterminate {
        // the report still goes out so the caller can see why
        emit(cli, &out)?;
        return Err(CliError::Validation(format!(
            "indeterminate verdict (exponent {:.4})",
            d.exponent
        )));
    }
    Ok(out)
}

fn cmd_validate(cli: &Cli, level: validate::Level) -> Result<String, CliError> {
    let report = validate::run(level);
    let out = match cli.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut out = String::from("check,passed,max_error,tolerance\n");
            for c in &report.checks {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    c.name,
                    c.passed,
                    fmt_float(c.max_error),
                    fmt_float(c.tolerance)
                );
            }
            out
        }
    };
    if !report.passed {
        emit(cli, &out)?;
        let names: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect();
        return Err(CliError::Validation(format!(
            "failed checks: {}",
            names.join(", ")
        )));
    }
    Ok(out)
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Usage(format!("cannot write stdout: {e}")))
        }
    }
}

/// Runs a parsed command and returns its output text.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        crate::parallel::configure_threads(n);
    }
    match &cli.command {
        Command::Shift => cmd_shift(cli, &load_config(cli)?),
        Command::Sweep => cmd_sweep(cli, &load_config(cli)?),
        Command::Evolve => cmd_evolve(cli, &load_config(cli)?),
        Command::Discriminate {
            input,
            l_min,
            l_max,
        } => cmd_discriminate(cli, input.as_ref(), *l_min, *l_max),
        Command::Validate { level } => cmd_validate(cli, *level),
    }
}

/// Entry point shared by the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli).and_then(|out| emit(&cli, &out)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
