//! The `corsol` command line: one subcommand per library operation, each
//! producing a `corsol/1` JSON record or a CSV table.
//!
//! Exit codes: 0 success, 1 usage error, 2 numeric failure, 3 an inconclusive
//! verdict from `diagnose --strict`.

mod commands;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::coefficient::scan::grid_between;
use crate::error::Error;
use output::Record;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "corsol", version, about = "Solvability, Green operator norms and majorants for -y' + q y = f")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Catalog name (constant_one, gaussian_osc, exp_osc, one_plus_cos) or expr:<expression>.
    #[arg(long = "coef")]
    pub coef: String,

    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,

    /// Write here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// d(x) over a sweep.
    Dfun {
        #[command(flatten)]
        common: Common,
        /// Points, as a:b:step or a comma list.
        #[arg(long, allow_hyphen_values = true)]
        xs: String,
        #[arg(long, default_value_t = 1e-10)]
        root_tol: f64,
    },
    /// Windowed estimates of q0(a) for each a of a ladder.
    Q0 {
        #[command(flatten)]
        common: Common,
        #[arg(long = "a", allow_hyphen_values = true)]
        a_ladder: String,
        /// Half-width of the scan (default: the coefficient's reach).
        #[arg(long)]
        window: Option<f64>,
        #[arg(long, default_value_t = 0.05)]
        grid_step: f64,
    },
    /// Abutting mass-2 segments starting at an origin.
    Cover {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        origin: f64,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// y = G f on a uniform grid, with the residual of the equation.
    Solve {
        #[command(flatten)]
        common: Common,
        /// expr:<expression>, indicator:a,b,h or bump:center,width.
        #[arg(long, allow_hyphen_values = true)]
        rhs: String,
        #[arg(long, allow_hyphen_values = true)]
        xs: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// G_p(x) over a sweep, next to the lower bound e^-2 d(x)^(1/p').
    Gnorm {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        xs: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// G_p / majorant ratios, q1 J, and the five sufficient conditions.
    Majorant {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        probes: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// sigma1, sigma2 and q1 d at each probe.
    Sigma {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        probes: String,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Solvability, decay in whole, compactness, and the equivalence cross-check.
    Diagnose {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "2")]
        p: String,
        /// Probes sorted by |x| (default: a ladder suited to the coefficient).
        #[arg(long, allow_hyphen_values = true)]
        probes: Option<String>,
        /// Ladder of a for the q0 scan.
        #[arg(long, default_value = "0.5,1,2,4")]
        a_ladder: String,
        #[arg(long)]
        window: Option<f64>,
        #[arg(long, default_value_t = 0.05)]
        grid_step: f64,
        /// Window half-width a for the mass trend of the limit test.
        #[arg(long, default_value_t = 0.25)]
        strip_a: f64,
        /// Ladder of a for the equivalence cross-check.
        #[arg(long, default_value = "0.125,0.25")]
        equivalence_ladder: String,
        #[arg(long, default_value_t = crate::diagnostics::DEFAULT_STRIP_THRESHOLD)]
        threshold: f64,
        /// Exit with 3 when any verdict is inconclusive.
        #[arg(long)]
        strict: bool,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Dfun { common, .. }
            | Command::Q0 { common, .. }
            | Command::Cover { common, .. }
            | Command::Solve { common, .. }
            | Command::Gnorm { common, .. }
            | Command::Majorant { common, .. }
            | Command::Sigma { common, .. }
            | Command::Diagnose { common, .. } => common,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Dfun { .. } => "dfun",
            Command::Q0 { .. } => "q0",
            Command::Cover { .. } => "cover",
            Command::Solve { .. } => "solve",
            Command::Gnorm { .. } => "gnorm",
            Command::Majorant { .. } => "majorant",
            Command::Sigma { .. } => "sigma",
            Command::Diagnose { .. } => "diagnose",
        }
    }
}

/// A bad flag value, reported with exit code 1.
#[derive(Debug)]
pub struct UsageError(pub String);

pub(crate) enum Failure {
    Usage(String),
    Numeric(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(m) => Failure::Usage(m),
            e @ (Error::SyntaxError { .. } | Error::UnknownName(_)) => Failure::Usage(e.to_string()),
            e => Failure::Numeric(e),
        }
    }
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

/// `a:b:step` (inclusive of `b` when it lies on the lattice) or `x1,x2,...`.
pub fn parse_points(spec: &str) -> Result<Vec<f64>, UsageError> {
    let bad = || UsageError(format!("cannot read points from '{spec}'"));
    let parts: Vec<&str> = spec.split(':').collect();
    let points = match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step): (f64, f64, f64) = (
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
                step.trim().parse().map_err(|_| bad())?,
            );
            if !(step > 0.0 && a.is_finite() && b >= a && b.is_finite()) {
                return Err(UsageError(format!("range '{spec}' needs a <= b and step > 0")));
            }
            if (b - a) / step > 1e7 {
                return Err(UsageError(format!("range '{spec}' has more than 10^7 points")));
            }
            grid_between(a, b, step)
        }
        [list] => list
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad())?,
        _ => return Err(bad()),
    };
    if points.is_empty() || points.iter().any(|v| !v.is_finite()) {
        return Err(bad());
    }
    Ok(points)
}

/// Parses the arguments, runs the command, writes its output, and returns the
/// process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return EXIT_USAGE;
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let common = cli.command.common().clone();
    match commands::run(&cli.command) {
        Ok((record, inconclusive)) => {
            let text = match common.format {
                Format::Json => record.render_json(),
                Format::Csv => record.render_csv(),
            };
            if let Err(e) = emit(&common, &text) {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
            let strict = matches!(cli.command, Command::Diagnose { strict: true, .. });
            if strict && inconclusive {
                EXIT_INCONCLUSIVE
            } else {
                EXIT_OK
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Numeric(e)) => {
            let record = json!({
                "schema_version": output::SCHEMA_VERSION,
                "command": cli.command.name(),
                "coefficient_label": common.coef,
                "error": { "name": e.name(), "message": e.to_string() },
            });
            eprintln!("error: {} ({})", e, e.name());
            let _ = emit(&common, &output::to_json(&record));
            EXIT_NUMERIC
        }
    }
}

fn emit(common: &Common, text: &str) -> std::io::Result<()> {
    match &common.output {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

/// Runs a command and returns its record without writing anything.
pub fn execute(command: &Command) -> Result<Record, String> {
    commands::run(command).map(|(r, _)| r).map_err(|f| match f {
        Failure::Usage(m) => m,
        Failure::Numeric(e) => format!("{} ({})", e, e.name()),
    })
}
