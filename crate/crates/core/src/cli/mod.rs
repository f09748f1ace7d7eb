//! Command-line front end.
//!
//! Every subcommand produces a [`Table`]; `--format` picks how it is printed
//! and `--out-dir` redirects it to a file. Failures print the stable error
//! name and exit with 2 (bad input), 3 (numerical failure) or 4 (I/O).

mod commands;
mod output;
mod params_file;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use output::{format_number, Cell, Format, Table};

use crate::error::{Error, Side};
use crate::model::{EvalContext, ModelParams};
use crate::reference::DEFAULT_QUAD_TOL;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] Error),
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn name(&self) -> &'static str {
        match self {
            CliError::Model(e) => e.name(),
            CliError::Config(_) => "ConfigError",
            CliError::Io { .. } => "IoError",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(e) => e.exit_code(),
            CliError::Config(_) => 2,
            CliError::Io { .. } => 4,
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_owned(),
            source,
        }
    }
}

/// Evenly spaced points `start:end:count`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(start: f64, end: f64, count: usize) -> Result<Self, CliError> {
        if !(start.is_finite() && end.is_finite() && start < end) {
            return Err(CliError::Config(format!(
                "grid needs finite min < max, got {start}..{end}"
            )));
        }
        if count < 2 {
            return Err(CliError::Config(format!("grid needs at least 2 points, got {count}")));
        }
        Ok(Grid { start, end, count })
    }

    pub fn points(&self) -> Vec<f64> {
        let n = (self.count - 1) as f64;
        // weighted endpoints keep decimal grids like -2:2:41 free of drift
        (0..self.count)
            .map(|i| (self.start * (n - i as f64) + self.end * i as f64) / n)
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(format!("expected start:end:count, got `{s}`"));
        };
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
        let count = n.trim().parse::<usize>().map_err(|e| format!("`{n}`: {e}"))?;
        Grid::new(num(a)?, num(b)?, count).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SideArg {
    Upper,
    Lower,
    Both,
}

impl SideArg {
    fn sides(self) -> &'static [Side] {
        match self {
            SideArg::Upper => &[Side::Upper],
            SideArg::Lower => &[Side::Lower],
            SideArg::Both => &[Side::Upper, Side::Lower],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OptionKind {
    Call,
    Put,
    /// the call for k >= 0, the put for k < 0
    Otm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Closed,
    Ode,
}

#[derive(Debug, Parser)]
#[command(
    name = "heston-wings",
    version,
    about = "Heston moment explosion, tail and smile-wing asymptotics"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Parameter file; the (vbar, lambda, c, rho, v0) = (0.0707, 0.6067,
    /// 0.2928, -0.7571, 0.0654) market example when omitted
    #[arg(long, global = true)]
    pub params: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    pub maturity: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Relative tolerance of the reference quadratures
    #[arg(long, global = true, default_value_t = DEFAULT_QUAD_TOL)]
    pub quad_tol: f64,
    /// Write results to files in this directory instead of stdout
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical moment, slope, curvature, tail and wing constants
    Constants {
        #[arg(long, value_enum, default_value_t = SideArg::Both)]
        side: SideArg,
    },
    /// Data behind the tail and smile figures, written as fig1.csv ... fig5.csv
    Figures {
        /// log x grid for the tail-constant convergence plots
        #[arg(long, default_value = "5:40:36")]
        logx_grid: Grid,
        /// log-spot grid for the log-density plot
        #[arg(long, default_value = "-4:4:81")]
        x_grid: Grid,
        /// log-strike grid for the implied variance plot
        #[arg(long, default_value = "-2:2:41")]
        k_grid: Grid,
    },
    /// Log-density of S_T by numerical Mellin inversion
    Density {
        #[arg(long, conflicts_with = "logx_grid", allow_negative_numbers = true)]
        logx: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        logx_grid: Option<Grid>,
        /// Contour abscissa in the Mellin variable; saddle point if omitted
        #[arg(long, allow_negative_numbers = true)]
        abscissa: Option<f64>,
        #[arg(long)]
        truncation: Option<f64>,
        /// Add the tail asymptotic of the matching side
        #[arg(long)]
        asymptotic: bool,
    },
    /// Undiscounted option price on a unit forward by Fourier inversion
    Price {
        #[arg(long, allow_negative_numbers = true)]
        k: f64,
        #[arg(long, value_enum, default_value_t = OptionKind::Call)]
        kind: OptionKind,
        /// Damping exponent: > 0 integrates the call, < -1 the put
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
        #[arg(long)]
        truncation: Option<f64>,
    },
    /// Black-Scholes implied volatility of the model, or of a given call price
    Impvol {
        #[arg(long, allow_negative_numbers = true)]
        k: f64,
        /// Invert this undiscounted call price instead of the model price
        #[arg(long)]
        price: Option<f64>,
        #[arg(long)]
        truncation: Option<f64>,
    },
    /// Implied volatility smile: exact and wing expansions
    Smile {
        #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
        k_min: f64,
        #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
        k_max: f64,
        #[arg(long, default_value_t = 41)]
        points: usize,
        /// Expansion orders to tabulate, from 1, 2, 3
        #[arg(long, value_delimiter = ',', default_value = "1,3")]
        orders: Vec<u8>,
        /// Include the implied volatility of the reference price
        #[arg(long)]
        exact: bool,
        /// Include the difference-of-square-roots form
        #[arg(long)]
        sqrt_form: bool,
    },
    /// Explosion time of the moment of order s
    Tstar {
        #[arg(long, allow_negative_numbers = true)]
        s: f64,
    },
    /// Critical moment with its slope and curvature
    Critical {
        #[arg(long, value_enum, default_value_t = SideArg::Both)]
        side: SideArg,
    },
    /// The transform (phi, psi) at a complex argument
    Transform {
        #[arg(long, allow_negative_numbers = true)]
        u_re: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        u_im: f64,
        /// Time argument; the maturity if omitted
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, value_enum, default_value_t = Method::Closed)]
        method: Method,
    },
}

/// Everything a subcommand needs besides its own flags.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: ModelParams,
    pub ctx: EvalContext,
    pub format: Format,
    pub quad_tol: f64,
    pub out_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_args(global: &GlobalArgs) -> Result<Self, CliError> {
        let params = match &global.params {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                params_file::parse(&text)?
            }
            None => ModelParams::market_example(),
        };
        if !(global.quad_tol > 0.0 && global.quad_tol < 1.0) {
            return Err(CliError::Config(format!(
                "--quad-tol must lie in (0, 1), got {}",
                global.quad_tol
            )));
        }
        Ok(RunConfig {
            params,
            ctx: EvalContext::new(global.maturity)?,
            format: global.format,
            quad_tol: global.quad_tol,
            out_dir: global.out_dir.clone(),
        })
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Constants { .. } => "constants",
        Command::Figures { .. } => "figures",
        Command::Density { .. } => "density",
        Command::Price { .. } => "price",
        Command::Impvol { .. } => "impvol",
        Command::Smile { .. } => "smile",
        Command::Tstar { .. } => "tstar",
        Command::Critical { .. } => "critical",
        Command::Transform { .. } => "transform",
    }
}

/// Runs a parsed command line, writing results to `stdout`.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let config = RunConfig::from_args(&cli.global)?;
    if let Command::Figures {
        logx_grid,
        x_grid,
        k_grid,
    } = &cli.command
    {
        let dir = config.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
        let written = commands::figures(&config, *logx_grid, *x_grid, *k_grid, &dir)?;
        for path in written {
            writeln!(stdout, "{}", path.display()).map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
        }
        return Ok(());
    }
    let table = commands::run(&config, &cli.command)?;
    let text = table.render(config.format);
    match &config.out_dir {
        Some(dir) => {
            let path = dir.join(format!("{}.{}", command_name(&cli.command), config.format.extension()));
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        }
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io(Path::new("<stdout>"), e))?,
    }
    Ok(())
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    match execute(&cli, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}: {e}", e.name());
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_are_exact() {
        let g: Grid = "5:40:36".parse().unwrap();
        let p = g.points();
        assert_eq!(p.len(), 36);
        assert_eq!(p[0], 5.0);
        assert_eq!(p[35], 40.0);
        assert_eq!(p[1], 6.0);
        let k: Grid = "-2:2:41".parse().unwrap();
        assert_eq!(k.points()[18], -0.2);
        assert_eq!(k.points()[20], 0.0);
        assert!("1:1:5".parse::<Grid>().is_err());
        assert!("0:1:1".parse::<Grid>().is_err());
        assert!("0:1".parse::<Grid>().is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Model(Error::Convergence("x".into())).exit_code(), 3);
        let io = CliError::io(Path::new("f"), std::io::Error::other("x"));
        assert_eq!((io.exit_code(), io.name()), (4, "IoError"));
    }
}
