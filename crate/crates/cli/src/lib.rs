//! `starswitch`: design, simulate, verify and reroute spin-star switches.
//!
//! Exit status is 0 on success, 1 on usage, I/O or format errors, and 2 when
//! no feasible design exists or a design fails verification.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod files;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use starswitch::dynamics::models::builtin_models;
use starswitch::dynamics::{anchored_grid, DEFAULT_VERIFY_TOL};
use starswitch::{
    feasibility, min_feasible_even_eta, DesignInput, Designer, Error as CoreError,
    FeasibilityReport, RootChoice, RoutingState,
};
use thiserror::Error;

use files::{write_trace, DesignFile, FileError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;

/// Default span of a simulation, in units of the transfer time.
pub const DEFAULT_SPAN: f64 = 1.2;
pub const DEFAULT_STEPS: usize = 1000;

#[derive(Debug, Parser)]
#[command(
    name = "starswitch",
    version,
    about = "Design and verify spin-star quantum switches"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for the local potentials of a switch with M bystanders
    Design(DesignArgs),
    /// Write the transfer fidelity F(t) of a design as CSV
    Simulate(SimulateArgs),
    /// Check a design for perfect transfer at t = pi/e
    Verify(VerifyArgs),
    /// Tabulate minimal designs over a range of bystander counts
    Sweep(SweepArgs),
    /// Reroute a design to another target (or source) node
    Retarget(RetargetArgs),
    /// List the available cubic solvers and transfer models
    Strategies,
}

#[derive(Debug, Args)]
struct DesignArgs {
    /// Number of bystander nodes M (edge nodes minus two)
    #[arg(long = "bystanders", value_name = "M")]
    bystanders: usize,
    /// Even tuning parameter: the spectrum is {0, e, +eta*e, -eta*e}
    #[arg(long, value_name = "H")]
    eta: u64,
    /// Which root of the design polynomial to use: smallest, largest, index:<k>
    #[arg(long, default_value = "smallest", value_parser = parse_root)]
    root: RootChoice,
    /// Cubic solver used for the design polynomial
    #[arg(long, default_value = "trigonometric")]
    cubic: String,
    /// Output file (standard output if omitted)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, value_name = "FILE")]
    design: PathBuf,
    /// End of the time window (default 1.2 tau)
    #[arg(long, value_name = "T")]
    t_max: Option<f64>,
    /// Number of grid points
    #[arg(long, value_name = "S", default_value_t = DEFAULT_STEPS)]
    steps: usize,
    /// Source node (defaults to the design's)
    #[arg(long, requires = "target")]
    source: Option<usize>,
    /// Target node (defaults to the design's)
    #[arg(long, requires = "source")]
    target: Option<usize>,
    /// Simulate the full (N+1)-dimensional arrowhead
    #[arg(long, conflicts_with_all = ["reduced", "model"])]
    full: bool,
    /// Simulate the reduced 4x4 model (default)
    #[arg(long, conflicts_with = "model")]
    reduced: bool,
    /// Transfer model by name (see `strategies`)
    #[arg(long)]
    model: Option<String>,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_name = "FILE")]
    design: PathBuf,
    #[arg(long, default_value_t = DEFAULT_VERIFY_TOL)]
    tol: f64,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_name = "A")]
    m_min: usize,
    #[arg(long, value_name = "B")]
    m_max: usize,
    /// Largest eta to accept; rows needing more are reported as infeasible
    #[arg(long, value_name = "E")]
    eta_max: Option<u64>,
    #[arg(long, default_value = "smallest", value_parser = parse_root)]
    root: RootChoice,
    /// Output file (standard output if omitted)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RetargetArgs {
    #[arg(long, value_name = "FILE")]
    design: PathBuf,
    /// New target node
    #[arg(long, value_name = "K")]
    target: usize,
    /// New source node, applied before the target
    #[arg(long, value_name = "K")]
    source: Option<usize>,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

fn parse_root(s: &str) -> Result<RootChoice, String> {
    s.parse().map_err(|err: CoreError| err.to_string())
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    File(#[from] FileError),
    #[error("{0}")]
    Core(CoreError),
    #[error("no feasible design\n{0}")]
    Infeasible(FeasibilityReport),
    #[error("design failed verification")]
    VerificationFailed,
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::Infeasible(report) => CliError::Infeasible(report),
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Infeasible(_) | CliError::VerificationFailed => EXIT_INFEASIBLE,
            _ => EXIT_USAGE,
        }
    }
}

type CliResult = Result<(), CliError>;

/// Runs one command line. `args` includes the program name.
pub fn execute<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Design(a) => run_design(a, out),
        Command::Simulate(a) => run_simulate(a),
        Command::Verify(a) => run_verify(a, out),
        Command::Sweep(a) => run_sweep(a, out),
        Command::Retarget(a) => run_retarget(a),
        Command::Strategies => run_strategies(out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> CliResult {
    match path {
        Some(path) => std::fs::write(path, text).map_err(|source| {
            FileError::Io {
                path: path.to_path_buf(),
                source,
            }
            .into()
        }),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Usage(format!("writing output: {e}"))),
    }
}

fn load(path: &Path) -> Result<RoutingState, CliError> {
    Ok(DesignFile::read(path)?.to_routing(path)?)
}

fn run_design(args: DesignArgs, out: &mut dyn Write) -> CliResult {
    let designer = Designer::with_solver_name(&args.cubic)?;
    let input = DesignInput::new(args.bystanders, args.eta).with_root(args.root);
    let sol = designer.design(&input)?;
    let file = DesignFile::from_routing(&RoutingState::from_design(sol));
    emit(&file.to_json(), args.out.as_deref(), out)
}

fn run_simulate(args: SimulateArgs) -> CliResult {
    let state = load(&args.design)?;
    let models = builtin_models();
    let model = match (&args.model, args.full) {
        (Some(name), _) => models.get(name)?,
        (None, true) => models.get("arrowhead")?,
        (None, false) => models.get("reduced")?,
    };
    let (source, target) = match (args.source, args.target) {
        (Some(s), Some(t)) => (s, t),
        _ => (state.source, state.target),
    };
    let tau = state.base.transfer_time;
    let t_max = args.t_max.unwrap_or(DEFAULT_SPAN * tau);
    let grid = anchored_grid(t_max, args.steps, tau)?;
    let channel = model.prepare(&state.realized_spec, source, target)?;
    let trace = channel.fidelity_trace(&grid)?;
    write_trace(&trace, &args.out)?;
    Ok(())
}

fn run_verify(args: VerifyArgs, out: &mut dyn Write) -> CliResult {
    if !(args.tol.is_finite() && args.tol > 0.0) {
        return Err(CliError::Usage(format!(
            "--tol must be positive, got {}",
            args.tol
        )));
    }
    let state = load(&args.design)?;
    let report = state.verify(args.tol);
    let text = format!(
        "route {} -> {} on {} edge nodes, M = {}, eta = {}, tau = {}\n{report}\n",
        state.source,
        state.target,
        state.realized_spec.edge_count(),
        state.base.params.m,
        state.base.eta,
        state.base.transfer_time,
    );
    emit(&text, None, out)?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::VerificationFailed)
    }
}

fn run_sweep(args: SweepArgs, out: &mut dyn Write) -> CliResult {
    if args.m_min == 0 || args.m_min > args.m_max {
        return Err(CliError::Usage(format!(
            "need 1 <= --m-min <= --m-max, got {}..{}",
            args.m_min, args.m_max
        )));
    }
    let designer = Designer::default();
    let rows: Vec<String> = (args.m_min..=args.m_max)
        .into_par_iter()
        .map(|m| {
            let eta = min_feasible_even_eta(m);
            if args.eta_max.is_some_and(|cap| eta > cap) {
                let report = feasibility(m, args.eta_max.unwrap_or(0) as f64);
                return Ok(format!("{m},,,,,,,,infeasible (g_min {:e})", report.g_min));
            }
            let sol = designer.design(&DesignInput::new(m, eta).with_root(args.root))?;
            let p = sol.params;
            let root_m = (m as f64).sqrt();
            Ok(format!(
                "{m},{eta},{:?},{:?},{:?},{:?},{:?},{:?},",
                p.e,
                p.a,
                p.d,
                sol.transfer_time,
                p.a.abs() / root_m,
                p.d.abs() / root_m
            ))
        })
        .collect::<Result<_, CoreError>>()?;
    let mut text = String::from("m,eta,e,a,d,tau,abs_a_over_sqrt_m,abs_d_over_sqrt_m,note\n");
    for row in rows {
        let _ = writeln!(text, "{row}");
    }
    emit(&text, args.out.as_deref(), out)
}

fn run_retarget(args: RetargetArgs) -> CliResult {
    let mut state = load(&args.design)?;
    if let Some(source) = args.source {
        state = state.retarget_source(source)?;
    }
    state = state.retarget(args.target)?;
    DesignFile::from_routing(&state).write(&args.out)?;
    Ok(())
}

fn run_strategies(out: &mut dyn Write) -> CliResult {
    let mut text = String::new();
    let solvers = Designer::solvers();
    let _ = writeln!(text, "{}s:", solvers.kind());
    for s in solvers.iter() {
        let _ = writeln!(text, "  {:<14} {}", s.name(), s.description());
    }
    let models = builtin_models();
    let _ = writeln!(text, "{}s:", models.kind());
    for m in models.iter() {
        let limit = match m.max_edges() {
            usize::MAX => "no size limit".to_string(),
            n => format!("up to {n} edge nodes"),
        };
        let _ = writeln!(text, "  {:<14} {} ({limit})", m.name(), m.description());
    }
    emit(&text, None, out)
}
