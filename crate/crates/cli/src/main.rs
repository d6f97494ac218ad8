//! `bic`: batch front end. `bic run` executes one scenario file and writes
//! a CSV plus a JSON summary; `bic plotdata` turns result CSVs into plain
//! (x, y) series files.
//!
//! Exit codes: 0 all-pass, 2 validator failures, 1 usage/parse errors.

use bic_core::scenario::{self, Scenario, ScenarioError};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "bic", version, about = "half-disc singular-metric laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario file and write CSV + JSON summary
    Run(RunArgs),
    /// Extract (x, y) series files from a results CSV
    Plotdata(PlotArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario JSON path
    #[arg(long)]
    scenario: PathBuf,
    /// Output CSV path (summary goes next to it)
    #[arg(long)]
    out: PathBuf,
    /// Override the scenario seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the refinement level
    #[arg(long)]
    levels: Option<u32>,
    /// Override the solver grid resolution
    #[arg(long)]
    grid: Option<usize>,
    /// Worker threads (falls back to BIC_JOBS, then all cores)
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct PlotArgs {
    /// Results CSV produced by `bic run`
    #[arg(long)]
    results: PathBuf,
    /// Output directory for the series files (defaults to the CSV's parent)
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Cmd::Run(args) => match run(&args) {
            Ok(failures) => {
                if failures > 0 {
                    ExitCode::from(2)
                } else {
                    ExitCode::SUCCESS
                }
            }
            Err(msg) => {
                eprintln!("bic run: {msg}");
                ExitCode::from(1)
            }
        },
        Cmd::Plotdata(args) => match plotdata(&args) {
            Ok(n) => {
                eprintln!("bic plotdata: wrote {n} series file(s)");
                ExitCode::SUCCESS
            }
            Err(msg) => {
                eprintln!("bic plotdata: {msg}");
                ExitCode::from(1)
            }
        },
    }
}

fn run(args: &RunArgs) -> Result<usize, String> {
    let text = std::fs::read_to_string(&args.scenario)
        .map_err(|e| format!("cannot read {}: {e}", args.scenario.display()))?;
    let mut scenario = Scenario::from_json(&text).map_err(|e| e.to_string())?;
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    if let Some(levels) = args.levels {
        scenario.levels = Some(levels);
    }
    if let Some(grid) = args.grid {
        scenario.grid = Some(grid);
    }
    let jobs = args
        .jobs
        .or_else(|| std::env::var("BIC_JOBS").ok().and_then(|v| v.parse().ok()));
    if jobs.is_some() {
        scenario.jobs = jobs;
    }
    let result = scenario::run_scenario(&scenario).map_err(|e| match e {
        ScenarioError::Parse(p) => format!("schema violation: {p}"),
        other => other.to_string(),
    })?;
    std::fs::write(&args.out, &result.csv)
        .map_err(|e| format!("cannot write {}: {e}", args.out.display()))?;
    let summary_path = summary_path(&args.out);
    let pretty = serde_json::to_string_pretty(&result.summary).expect("summary serializes");
    std::fs::write(&summary_path, pretty + "\n")
        .map_err(|e| format!("cannot write {}: {e}", summary_path.display()))?;
    Ok(result.failures)
}

fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.json")
}

fn plotdata(args: &PlotArgs) -> Result<usize, String> {
    let text = std::fs::read_to_string(&args.results)
        .map_err(|e| format!("cannot read {}: {e}", args.results.display()))?;
    let series = scenario::plotdata(&text).map_err(|e| e.to_string())?;
    let dir = match &args.out_dir {
        Some(d) => d.clone(),
        None => args.results.parent().unwrap_or(Path::new(".")).to_path_buf(),
    };
    std::fs::create_dir_all(&dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    let n = series.len();
    for (name, body) in series {
        let path = dir.join(format!("series_{name}.csv"));
        std::fs::write(&path, body).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(n)
}
