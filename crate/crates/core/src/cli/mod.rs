//! Command-line front end. [`run`] parses arguments, validates them into a
//! [`RunConfig`], executes the command and returns the process exit code.
//!
//! Exit codes: 0 success, 1 usage error, 2 certification failure or missing
//! fixture, 3 internal invariant violation.

mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::amplitude::{AmplitudeError, ProblemSpec};
use crate::certify::CertifyError;
use crate::exactmath::{int, parse_rational, Rational};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILED: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "SHARPEMBED_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "sharpembed", version, about = "Sharp constants for W^r_2 -> C embeddings of the k-th derivative")]
struct Cli {
    #[command(subcommand)]
    command: CommandArgs,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Significant digits of decimal renderings.
    #[arg(long, global = true)]
    precision: Option<u32>,
}

#[derive(Debug, Args)]
struct SpecArgs {
    #[arg(long)]
    r: u32,
    #[arg(long)]
    k: u32,
}

#[derive(Debug, Subcommand)]
enum CommandArgs {
    /// Exact factorization of A^2 and its values at given points.
    Amplitude {
        #[command(flatten)]
        spec: SpecArgs,
        /// Evaluation point in [-1, 1], "a/b" or decimal; repeatable.
        #[arg(long, allow_hyphen_values = true)]
        x: Vec<String>,
    },
    /// Best constant: exact for even k, scanned for odd k.
    Lambda {
        #[command(flatten)]
        spec: SpecArgs,
        /// Grid size of the scan used for odd k.
        #[arg(long, default_value_t = 4001)]
        points: usize,
    },
    /// Certify that the center is the global maximum for all r > k.
    Certify {
        #[arg(long)]
        k: u32,
        /// Envelope fixture: a TOML file or one of the names k4, k6,
        /// k4-amended. The built-in fixture for k is used otherwise.
        #[arg(long)]
        fixture: Option<String>,
        /// Run the fixed-r meshes only at every 10th r.
        #[arg(long)]
        quick: bool,
        /// Multiply every scheduled mesh size.
        #[arg(long, default_value_t = 1)]
        mesh_multiplier: u32,
        /// Last r of the lambda table.
        #[arg(long, default_value_t = 20)]
        max_r: u32,
    },
    /// A^2 on a uniform grid over [-1, 1] as plot-ready rows.
    Scan {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Run the invariant checks at desk scale.
    Selftest {
        /// Largest r in the exhaustive checks.
        #[arg(long, default_value_t = 8)]
        max_r: u32,
        /// Check this fixture (file or built-in name) instead of the built-in ones.
        #[arg(long)]
        fixture: Option<String>,
    },
}

/// A validated command.
#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Amplitude { spec: ProblemSpec, xs: Vec<Rational> },
    Lambda { spec: ProblemSpec, points: usize },
    Certify { k: u32, fixture: Option<String>, quick: bool, mesh_multiplier: u32, max_r: u32 },
    Scan { spec: ProblemSpec, points: usize },
    Selftest { max_r: u32, fixture: Option<String> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub precision: u32,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<AmplitudeError> for CliError {
    fn from(e: AmplitudeError) -> Self {
        let code = match e {
            AmplitudeError::InvalidSpec { .. } | AmplitudeError::OddK { .. } => EXIT_USAGE,
            AmplitudeError::FactorizationBroken { .. } | AmplitudeError::InternalMismatch { .. } => EXIT_INTERNAL,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<CertifyError> for CliError {
    fn from(e: CertifyError) -> Self {
        let code = if e.is_internal() {
            EXIT_INTERNAL
        } else if let CertifyError::Amplitude(inner) = &e {
            CliError::from(inner.clone()).code
        } else {
            EXIT_FAILED
        };
        CliError { code, message: e.to_string() }
    }
}

fn spec_of(args: &SpecArgs) -> Result<ProblemSpec, CliError> {
    ProblemSpec::new(args.r, args.k)
        .map_err(|_| CliError::usage(format!("need 0 <= k < r, got r = {}, k = {}", args.r, args.k)))
}

impl RunConfig {
    /// Parses and validates command-line arguments (without the program name
    /// being special: pass it first as usual).
    pub fn parse_from<I, T>(args: I) -> Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let cli = Cli::try_parse_from(args)?;
        Self::from_cli(cli).map_err(|e| clap::Error::raw(clap::error::ErrorKind::ValueValidation, e.message + "\n"))
    }

    fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let precision = cli.precision.unwrap_or(17);
        if precision == 0 || precision > 10_000 {
            return Err(CliError::usage("--precision must lie in 1..=10000"));
        }
        let (command, default_format) = match cli.command {
            CommandArgs::Amplitude { spec, x } => {
                let spec = spec_of(&spec)?;
                let xs = x
                    .iter()
                    .map(|s| {
                        let q = parse_rational(s).map_err(|e| CliError::usage(e.to_string()))?;
                        if q < int(-1) || q > int(1) {
                            return Err(CliError::usage(format!("x = {s} lies outside [-1, 1]")));
                        }
                        Ok(q)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                (Command::Amplitude { spec, xs }, OutputFormat::Text)
            }
            CommandArgs::Lambda { spec, points } => {
                if points < 64 {
                    return Err(CliError::usage("--points must be at least 64 for lambda"));
                }
                (Command::Lambda { spec: spec_of(&spec)?, points }, OutputFormat::Text)
            }
            CommandArgs::Certify { k, fixture, quick, mesh_multiplier, max_r } => {
                if k % 2 == 1 {
                    return Err(CliError::usage("certification needs even k; odd k is settled by the sign law"));
                }
                if mesh_multiplier == 0 {
                    return Err(CliError::usage("--mesh-multiplier must be positive"));
                }
                (Command::Certify { k, fixture, quick, mesh_multiplier, max_r }, OutputFormat::Text)
            }
            CommandArgs::Scan { spec, points } => {
                if points < 2 {
                    return Err(CliError::usage("--points must be at least 2"));
                }
                (Command::Scan { spec: spec_of(&spec)?, points }, OutputFormat::Csv)
            }
            CommandArgs::Selftest { max_r, fixture } => {
                if max_r < 2 {
                    return Err(CliError::usage("--max-r must be at least 2"));
                }
                (Command::Selftest { max_r, fixture }, OutputFormat::Text)
            }
        };
        Ok(RunConfig { command, format: cli.format.unwrap_or(default_format), out: cli.out, precision })
    }
}

/// Caps the global thread pool from [`THREADS_ENV`], if set.
pub fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // Fails only if the pool already exists, which is fine.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Executes a validated configuration; the output goes to `config.out` or
/// `stdout`, diagnostics to `stderr`.
pub fn execute(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = commands::dispatch(config, stderr);
    let (body, code) = match result {
        Ok(output) => (output.body, output.code),
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            return e.code;
        }
    };
    let written = match &config.out {
        Some(path) => std::fs::write(path, &body).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => stdout.write_all(body.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(message) = written {
        let _ = writeln!(stderr, "error: {message}");
        return EXIT_FAILED;
    }
    code
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::parse_from(args) {
        Ok(config) => config,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
            } else {
                let _ = write!(stdout, "{rendered}");
            }
            return code;
        }
    };
    configure_threads();
    execute(&config, stdout, stderr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["sharpembed"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn parses_repeatable_x_values() {
        let config = RunConfig::parse_from(["sharpembed", "amplitude", "--r", "2", "--k", "1", "--x", "0.5", "--x", "-1/4"])
            .unwrap();
        assert_eq!(
            config.command,
            Command::Amplitude { spec: ProblemSpec::new(2, 1).unwrap(), xs: vec![rat(1, 2), rat(-1, 4)] }
        );
        assert_eq!(config.format, OutputFormat::Text);
        assert_eq!(config.precision, 17);
    }

    #[test]
    fn invalid_spec_is_a_usage_error() {
        let (code, _, err) = run_capture(&["amplitude", "--r", "3", "--k", "3"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("k < r"), "{err}");
        let (code, _, _) = run_capture(&["scan", "--r", "3", "--k", "1", "--points", "1"]);
        assert_eq!(code, EXIT_USAGE);
        let (code, _, _) = run_capture(&["amplitude", "--r", "3", "--k", "1", "--x", "2"]);
        assert_eq!(code, EXIT_USAGE);
        let (code, _, _) = run_capture(&["frobnicate"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn help_exits_cleanly() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("certify"));
    }
}
