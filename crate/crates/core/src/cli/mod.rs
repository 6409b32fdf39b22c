//! Command-line front end: `fields`, `falloff`, `spectrum`, `validate` and
//! `energy`.

mod commands;
pub mod config;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::field::Branch;

pub use config::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config error {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Output(_) => EXIT_USAGE,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<crate::field::FieldError> for CliError {
    fn from(e: crate::field::FieldError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<crate::spectrum::SpectrumError> for CliError {
    fn from(e: crate::spectrum::SpectrumError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<crate::asymptotics::AsymptoticsError> for CliError {
    fn from(e: crate::asymptotics::AsymptoticsError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "edept", version, about = "Localized pulse fields, photon spectra and fall-off exponents")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the pulse exponent α.
    #[arg(long, global = true)]
    alpha: Option<u32>,
    /// Override the branch: real_part, imag_part or analytic.
    #[arg(long, global = true)]
    branch: Option<Branch>,
    /// Override the evaluation time.
    #[arg(long, global = true, allow_hyphen_values = true)]
    t: Option<f64>,
    /// Override the output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Field map over a (t, ρ, z) grid.
    Fields,
    /// Radial profiles and fitted fall-off exponents.
    Falloff,
    /// Photon spectrum export with norm and energies.
    Spectrum,
    /// Maxwell residuals and spectral checks.
    Validate,
    /// Energy at several time slices and its drift.
    Energy,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Fields => "fields",
            Command::Falloff => "falloff",
            Command::Spectrum => "spectrum",
            Command::Validate => "validate",
            Command::Energy => "energy",
        }
    }
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(alpha) = cli.alpha {
        let p = &cfg.params;
        let branch = p.branch();
        let kept = p.branch() != Branch::parity_default(p.alpha());
        cfg.params = crate::field::EdeptParams::new(alpha, p.g0(), p.g1(), p.g2())
            .map_err(|e| CliError::Usage(format!("--alpha: {e}")))?;
        if kept {
            cfg.params = cfg.params.with_branch(branch);
        }
        cfg.falloff.alphas = vec![alpha];
    }
    if let Some(b) = cli.branch {
        cfg.params = cfg.params.with_branch(b);
    }
    if let Some(t) = cli.t {
        if !t.is_finite() {
            return Err(CliError::Usage(format!("--t must be finite, got {t}")));
        }
        cfg.fields.times = vec![t];
        cfg.falloff.scan.t = t;
        cfg.spectrum.t0 = t;
        let g1 = cfg.params.g1() / cfg.params.constants().c();
        cfg.energy.times = cfg.energy.times.iter().map(|s| s + t / g1).collect();
    }
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    Ok(cfg)
}

/// Runs the tool on `argv` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = load(&cli).and_then(|cfg| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| CliError::Config(format!("at `threads`: {e}")))?;
        pool.install(|| commands::dispatch(cli.command.name(), &cfg))
    });
    match result {
        Ok(passed) => {
            if passed {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            eprintln!("edept: {e}");
            e.exit_code()
        }
    }
}
