//! `corot`: generate Fin-Ray fingers, run nonlinear solves and design sweeps.
//!
//! Exit codes: 0 success, 1 output could not be written, 2 invalid input,
//! 3 the solve diverged (its partial history is still written).

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use log::{info, warn};

use corot_core::finray::{generate, FinRayParams};
use corot_core::io::{write_solve_csv, LoadDoc, StructureDoc};
use corot_core::sweep::{run_sweep, SweepSpec};
use corot_core::{solve, SolveStatus, SolverConfig};

#[derive(Parser)]
#[command(
    name = "corot",
    version,
    about = "Co-rotational frame solver and Fin-Ray design tool"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a Fin-Ray finger from a parameter file and write its structure JSON.
    Generate { params: PathBuf, out: PathBuf },
    /// Run the incremental Newton-Raphson analysis and write per-increment CSV.
    Solve {
        structure: PathBuf,
        load: PathBuf,
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        n_inc: usize,
        #[arg(long, default_value_t = 1e-3)]
        tolerance: f64,
        #[arg(long, default_value_t = 100)]
        maxiter: usize,
        /// Follow the iterations past limit points instead of reporting collapse.
        #[arg(long)]
        no_collapse_check: bool,
    },
    /// Run a design sweep and write the report CSV plus a JSON summary.
    Sweep {
        spec: PathBuf,
        out: PathBuf,
        /// Probe every variant for its maximum allowable force.
        #[arg(long)]
        probe_max_force: bool,
        /// Run variants concurrently.
        #[arg(long)]
        parallel: bool,
        /// Summary path; defaults to the report path with a .json extension.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

enum Failure {
    Input(anyhow::Error),
    Output(anyhow::Error),
}

impl Failure {
    fn input<E: Into<anyhow::Error>>(e: E) -> Self {
        Failure::Input(e.into())
    }

    fn output<E: Into<anyhow::Error>>(e: E) -> Self {
        Failure::Output(e.into())
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::input)?;
    serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(Failure::input)
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .with_context(|| format!("creating {}", path.display()))
        .map_err(Failure::output)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(Failure::output)?;
    text.push('\n');
    std::fs::write(path, text)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::output)
}

fn cmd_generate(params: &Path, out: &Path) -> Result<ExitCode, Failure> {
    let params: FinRayParams = read_json(params)?;
    let model = generate(&params).map_err(Failure::input)?;
    write_json(out, &StructureDoc::from_finray(&model))?;
    info!(
        "wrote {} nodes, {} elements",
        model.structure.nodes().len(),
        model.structure.elements().len()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(
    structure: &Path,
    load: &Path,
    out: &Path,
    config: SolverConfig,
) -> Result<ExitCode, Failure> {
    let doc: StructureDoc = read_json(structure)?;
    let s = doc.to_structure().map_err(Failure::input)?;
    let load: LoadDoc = read_json(load)?;
    let load = load.to_load_case(&s).map_err(Failure::input)?;
    config.validate().map_err(Failure::input)?;
    let result = solve(&s, &load, &config).map_err(Failure::input)?;
    write_solve_csv(create(out)?, &s, &result).map_err(Failure::output)?;
    match result.status {
        SolveStatus::Completed => {
            info!(
                "completed {} increments, mean {:.2} iterations",
                result.increments.len(),
                result.mean_iterations()
            );
            Ok(ExitCode::SUCCESS)
        }
        SolveStatus::DivergedAtIncrement { increment, cause } => {
            eprintln!("diverged at increment {increment}: {cause:?}");
            Ok(ExitCode::from(3))
        }
    }
}

fn cmd_sweep(
    spec: &Path,
    out: &Path,
    probe: bool,
    parallel: bool,
    summary: Option<PathBuf>,
) -> Result<ExitCode, Failure> {
    let spec: SweepSpec = read_json(spec)?;
    let report = run_sweep(&spec, probe, parallel).map_err(Failure::input)?;
    report.write_csv(create(out)?).map_err(Failure::output)?;
    let summary_path = summary.unwrap_or_else(|| out.with_extension("json"));
    write_json(&summary_path, &report.summary())?;
    let diverged = report.rows().filter(|r| !r.converged).count();
    if diverged > 0 {
        warn!("{diverged} solves diverged");
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("COROT_LOG", "warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate { params, out } => cmd_generate(&params, &out),
        Command::Solve {
            structure,
            load,
            out,
            n_inc,
            tolerance,
            maxiter,
            no_collapse_check,
        } => cmd_solve(
            &structure,
            &load,
            &out,
            SolverConfig {
                n_inc,
                tolerance,
                maxiter,
                collapse_check: !no_collapse_check,
            },
        ),
        Command::Sweep {
            spec,
            out,
            probe_max_force,
            parallel,
            summary,
        } => cmd_sweep(&spec, &out, probe_max_force, parallel, summary),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Output(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
