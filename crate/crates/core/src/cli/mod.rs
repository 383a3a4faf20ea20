//! Command-line runner: one subcommand per study, JSON configs, CSV and SVG
//! artifacts, and exit codes that separate failures from inconclusive fits.

mod config;
mod output;
mod plot;
mod studies;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use config::{ResourceConfig, StudyConfig, StudyKind, Tolerances};
pub use output::{fmt_real, render_csv, sort_rows, Row, COLUMNS};
pub use plot::{auto_specs, emit_plot, render_svg, PlotSpec, Table};
pub use studies::{
    fig1_h_grid, fig1_t_grid, run_study, Check, Status, StudyOutput, BLOCK_M_LIST, BLOCK_SEED, DEFAULT_H_LIST,
    DEFAULT_L_LIST, DEFAULT_N_LIST, GENERAL_H_LIST, GENERAL_T0, QUADRATURE_M_LIST,
};

use crate::error::Error;
use crate::operators::Potential;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Study(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Io { .. } => EXIT_CONFIG,
            CliError::Study(e) => match e {
                Error::InvalidParameter { .. } | Error::InvalidGrid(_) | Error::MissingColumn(_) | Error::Io(_) => {
                    EXIT_CONFIG
                }
                Error::ReferenceNotConverged { .. } | Error::QuadratureNotConverged { .. } => EXIT_INCONCLUSIVE,
                _ => EXIT_ASSERTION,
            },
        }
    }
}

impl From<Status> for i32 {
    fn from(s: Status) -> i32 {
        match s {
            Status::Pass => EXIT_PASS,
            Status::Fail => EXIT_ASSERTION,
            Status::Inconclusive => EXIT_INCONCLUSIVE,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "magnus-sim", version, about = "Magnus integrator convergence studies and LCU circuit emulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Second-order Magnus in the interaction picture: local, global and N sweeps.
    #[command(name = "superconvergence")]
    Superconvergence(StudyArgs),
    /// The same system with the first-order Magnus step.
    #[command(name = "qhop_baseline")]
    QhopBaseline(StudyArgs),
    /// Local truncation orders for a general two-level H(t).
    #[command(name = "general_order")]
    GeneralOrder(StudyArgs),
    /// Riemann quadrature error against M at fixed h.
    #[command(name = "quadrature")]
    Quadrature(StudyArgs),
    /// Taylor-term and key-commutator norms across grid sizes.
    #[command(name = "commutators_fig1")]
    CommutatorsFig1(StudyArgs),
    /// Dense emulation of the HAM-T, COMP and LCU circuits.
    #[command(name = "block_encoding")]
    BlockEncoding(StudyArgs),
    /// Step counts, query costs and regime comparison rows.
    #[command(name = "resources")]
    Resources(StudyArgs),
    /// Render a study CSV as SVG.
    #[command(name = "plot")]
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct StudyArgs {
    /// JSON config; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write an SVG of the CSV.
    #[arg(long)]
    pub plot: bool,
    /// Grid size.
    #[arg(long)]
    pub n: Option<usize>,
    /// Potential: cos, zero or gaussian_bump.
    #[arg(long)]
    pub potential: Option<Potential>,
    #[arg(long)]
    pub domain_length: Option<f64>,
    #[arg(long)]
    pub t0: Option<f64>,
    #[arg(long)]
    pub t_total: Option<f64>,
    /// Step size for fixed-h studies.
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// System qubits for the circuit study.
    #[arg(long)]
    pub ns: Option<usize>,
    /// Quadrature points for the circuit study; shorthand for a one-entry M list.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub h_list: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub m_list: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub l_list: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub t_list: Option<Vec<f64>>,
    /// Order exponent of a single resource query.
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub c_h: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub deriv_sup: Option<f64>,
    #[arg(long)]
    pub n_a: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    /// Study CSV to render.
    pub csv: PathBuf,
    /// SVG path; defaults to the CSV path with an .svg extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// x column; the layout is chosen from the data when omitted.
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long, default_value = "error")]
    pub y: String,
    /// Linear axes instead of log-log.
    #[arg(long)]
    pub linear: bool,
}

impl StudyArgs {
    /// Loads the config file, applies flag overrides and validates.
    pub fn resolve(&self, kind: StudyKind) -> Result<StudyConfig, CliError> {
        let mut c = match &self.config {
            Some(p) => StudyConfig::load(p)?,
            None => StudyConfig::default(),
        }
        .bind(kind)?;
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field.clone() {
                    c.$field = Some(v);
                }
            )*};
        }
        set!(n, potential, domain_length, t0, t_total, h, alpha, ns, seed, h_list, m_list, n_list, l_list, t_list);
        if let Some(m) = self.m {
            c.m_list = Some(vec![m]);
        }
        macro_rules! set_resource {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field {
                    c.resources.$field = Some(v);
                }
            )*};
        }
        set_resource!(theta, c_h, epsilon, deriv_sup, n_a);
        if let Some(o) = &self.out {
            c.output = Some(o.clone());
        }
        if self.plot {
            c.plot = Some(true);
        }
        c.validate()?;
        Ok(c)
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Runs a validated study and writes its artifacts under the output
/// directory. Returns the study output for inspection.
pub fn execute(kind: StudyKind, cfg: &StudyConfig) -> Result<StudyOutput, CliError> {
    let result = run_study(kind, cfg)?;
    let dir = cfg.output.clone().unwrap_or_else(|| PathBuf::from("results"));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    })?;
    let csv_path = dir.join(format!("{kind}.csv"));
    write_file(&csv_path, &render_csv(&result.rows, &cfg.hash())?)?;
    for (name, contents) in &result.attachments {
        write_file(&dir.join(name), contents)?;
    }
    if cfg.plot.unwrap_or(false) {
        emit_plot(&csv_path, None, &dir.join(format!("{kind}.svg")))?;
    }
    Ok(result)
}

fn plot_command(args: &PlotArgs) -> Result<PathBuf, CliError> {
    let out = args.out.clone().unwrap_or_else(|| args.csv.with_extension("svg"));
    let specs = args.x.as_ref().map(|x| {
        vec![PlotSpec {
            log_x: !args.linear,
            log_y: !args.linear,
            ..PlotSpec::log_log(x, &args.y)
        }]
    });
    emit_plot(&args.csv, specs.as_deref(), &out)?;
    Ok(out)
}

/// Parses `args` (including the program name) and runs the command,
/// writing progress to `stdout` and errors to `stderr`. Returns the exit code.
pub fn run_with(args: impl IntoIterator<Item = impl Into<OsString> + Clone>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return if code == 0 { EXIT_PASS } else { EXIT_CONFIG };
        }
    };
    let (kind, study_args) = match &cli.command {
        Command::Superconvergence(a) => (StudyKind::Superconvergence, a),
        Command::QhopBaseline(a) => (StudyKind::QhopBaseline, a),
        Command::GeneralOrder(a) => (StudyKind::GeneralOrder, a),
        Command::Quadrature(a) => (StudyKind::Quadrature, a),
        Command::CommutatorsFig1(a) => (StudyKind::CommutatorsFig1, a),
        Command::BlockEncoding(a) => (StudyKind::BlockEncoding, a),
        Command::Resources(a) => (StudyKind::Resources, a),
        Command::Plot(p) => {
            return match plot_command(p) {
                Ok(out) => {
                    let _ = writeln!(stdout, "wrote {}", out.display());
                    EXIT_PASS
                }
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    e.exit_code()
                }
            };
        }
    };
    let outcome = study_args.resolve(kind).and_then(|cfg| execute(kind, &cfg).map(|o| (cfg, o)));
    match outcome {
        Ok((cfg, out)) => {
            for c in &out.checks {
                let _ = writeln!(stdout, "{c}");
            }
            let dir = cfg.output.unwrap_or_else(|| PathBuf::from("results"));
            let _ = writeln!(stdout, "wrote {}", dir.join(format!("{kind}.csv")).display());
            out.status().into()
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
