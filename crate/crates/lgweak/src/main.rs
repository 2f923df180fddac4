//! `lgweak`: weak values from pointer displacements, end to end.
//!
//! Subcommands:
//!
//! * `simulate`: one scenario at one coupling strength; full report.
//! * `sweep`:    the same over a g grid.
//! * `extract`:  apply the inversion formulas to displacements in a CSV
//!   (measured elsewhere or emitted by this tool).
//! * `oracle`:   print the direct weak values of a scenario and stop.
//!
//! Exit codes: 0 on success, 1 when a run fails scientifically (vanishing
//! post-selection, near-orthogonal pre/post pair), 2 on usage errors
//! (unreadable files, malformed documents, bad flags).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lgweak::evolution::EvolutionError;
use lgweak::quantum::{joint_weak_value_report, QuantumError};
use lgweak::report::{emit_report, extract_rows, parse_report_csv, rows_to_csv, ReportFormat};
use lgweak::scenario::parse_scenario;
use lgweak::sweep::{g_grid, run_once, run_sweep, RowResult, DEFAULT_EQUAL_SQUARES_TOL};

#[derive(Parser)]
#[command(
    name = "lgweak",
    about = "Exact weak-measurement simulation and weak-value extraction \
             with Laguerre-Gauss pointers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => ReportFormat::Csv,
            Format::Json => ReportFormat::Json,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Report format.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScenarioArg {
    /// Scenario document (JSON).
    #[arg(long)]
    scenario: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario at one coupling strength.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArg,
        /// Override the scenario's coupling strength.
        #[arg(long)]
        g: Option<f64>,
        /// Tolerance for the A² = B² eligibility check.
        #[arg(long, default_value_t = DEFAULT_EQUAL_SQUARES_TOL)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a scenario over a grid of coupling strengths.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArg,
        #[arg(long)]
        g_min: f64,
        #[arg(long)]
        g_max: f64,
        /// Number of grid points (>= 2).
        #[arg(long)]
        points: usize,
        /// Space the grid logarithmically instead of linearly.
        #[arg(long)]
        log: bool,
        /// Tolerance for the A² = B² eligibility check.
        #[arg(long, default_value_t = DEFAULT_EQUAL_SQUARES_TOL)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Recover weak values from displacements measured elsewhere.
    Extract {
        /// CSV of displacement rows (the format `sweep` emits).
        #[arg(long)]
        from_csv: PathBuf,
        /// Also apply the single-probe readout to |l| = 2 rows; only valid
        /// when the measured pair satisfied A² = B².
        #[arg(long)]
        single_probe: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print the direct weak values of a scenario as JSON.
    Oracle {
        #[command(flatten)]
        scenario: ScenarioArg,
    },
}

/// Failure modes with distinct exit codes: scientific failures mean the
/// configured experiment cannot deliver a result, usage failures mean the
/// invocation itself was broken.
enum Failure {
    Scientific(String),
    Usage(String),
}

impl Failure {
    fn code(&self) -> ExitCode {
        match self {
            Failure::Scientific(_) => ExitCode::from(1),
            Failure::Usage(_) => ExitCode::from(2),
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Scientific(m) | Failure::Usage(m) => m,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn classify_evolution(e: EvolutionError) -> Failure {
    match e {
        EvolutionError::PostSelectionVanished { .. } => Failure::Scientific(e.to_string()),
        EvolutionError::Quantum(QuantumError::NearOrthogonalPostSelection { .. }) => {
            Failure::Scientific(e.to_string())
        }
        other => Failure::Usage(other.to_string()),
    }
}

fn read_file(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn write_output(output: &OutputArgs, text: &str) -> Result<(), Failure> {
    match &output.out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => fs::write(path, text)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
    }
}

/// Nonzero when any row was flagged; the first flagged row is named.
fn check_rows(rows: &[RowResult]) -> Result<(), Failure> {
    for (idx, row) in rows.iter().enumerate() {
        if let RowResult::Failed { g, error, .. } = row {
            return Err(Failure::Scientific(format!(
                "row {idx} (g = {g}) failed: {error}"
            )));
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate {
            scenario,
            g,
            tol,
            output,
        } => {
            let mut sc = parse_scenario(&read_file(&scenario.scenario)?).map_err(usage)?;
            if let Some(g) = g {
                sc = sc.with_g(g);
            }
            let report = run_once(&sc, tol).map_err(classify_evolution)?;
            let rows = vec![RowResult::Ok(report)];
            write_output(&output, &emit_report(&rows, output.format.into()))
        }
        Command::Sweep {
            scenario,
            g_min,
            g_max,
            points,
            log,
            tol,
            output,
        } => {
            let sc = parse_scenario(&read_file(&scenario.scenario)?).map_err(usage)?;
            let grid = g_grid(g_min, g_max, points, log).map_err(Failure::Usage)?;
            let rows = run_sweep(&sc, &grid, tol).map_err(classify_evolution)?;
            write_output(&output, &emit_report(&rows, output.format.into()))?;
            check_rows(&rows)
        }
        Command::Extract {
            from_csv,
            single_probe,
            output,
        } => {
            let rows = parse_report_csv(&read_file(&from_csv)?).map_err(usage)?;
            let extracted = extract_rows(&rows, single_probe)
                .map_err(|e| Failure::Scientific(e.to_string()))?;
            let text = match output.format {
                Format::Csv => rows_to_csv(&extracted),
                Format::Json => serde_json::to_string_pretty(&extracted)
                    .expect("row serialization cannot fail"),
            };
            write_output(&output, &text)
        }
        Command::Oracle { scenario } => {
            let sc = parse_scenario(&read_file(&scenario.scenario)?).map_err(usage)?;
            let oracle = joint_weak_value_report(&sc.pre, &sc.post, &sc.a, &sc.b)
                .map_err(|e| Failure::Scientific(e.to_string()))?;
            println!(
                "{}",
                serde_json::to_string_pretty(&oracle).expect("oracle serialization cannot fail")
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("lgweak: {}", failure.message());
            failure.code()
        }
    }
}
