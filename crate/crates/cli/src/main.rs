//! `eqcol`: command-line front end for the equitable coloring tabu search.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O or parse error, 3 verification
//! failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use eqcol_core::bench::{
    append_csv, run_instance, run_sweep, write_csv, SolveMode, SolveOptions, SweepConfig,
    SweepInstance,
};
use eqcol_core::driver::{DescentConfig, DEFAULT_ITERATION_CAP};
use eqcol_core::partition::{verify_eqcol, ColoringFile};
use eqcol_core::tabu::{StopCondition, TenureParams};
use eqcol_core::{Error, Graph};

const FULL_BUDGET_SECS: f64 = 3600.0;
const QUICK_BUDGET_SECS: f64 = 30.0;

#[derive(Parser, Debug)]
#[command(
    name = "eqcol",
    version,
    about = "Tabu search for equitable graph coloring"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one DIMACS instance, by descending k or at a fixed k.
    Solve(SolveArgs),
    /// Run a fixed-k parameter sweep over a list of instances.
    Sweep(SweepArgs),
    /// Check a coloring file against a graph.
    Verify(VerifyArgs),
    /// Write the Kneser graph K(a, b) in DIMACS format.
    GenKneser(KneserArgs),
}

#[derive(Args, Debug)]
struct BudgetArgs {
    /// Tenure coefficient applied to the number of conflicting vertices.
    #[arg(long, default_value_t = 0.9)]
    alpha: f64,
    /// Range of the random tenure term.
    #[arg(long, default_value_t = 5)]
    beta: u32,
    /// Wall-clock budget in seconds (default 3600).
    #[arg(long = "time", value_name = "SECONDS")]
    time: Option<f64>,
    /// Use the 30-second budget.
    #[arg(long, conflicts_with = "time")]
    quick: bool,
    /// Iteration cap per search.
    #[arg(long = "iters")]
    iters: Option<u64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Append result rows to this CSV file instead of printing them.
    #[arg(long = "csv", value_name = "PATH")]
    csv: Option<PathBuf>,
    /// Leave the `seconds` column empty so rows are reproducible.
    #[arg(long)]
    no_timing: bool,
}

impl BudgetArgs {
    fn params(&self) -> Result<TenureParams, Error> {
        TenureParams::new(self.alpha, self.beta)
    }

    fn explicit_time(&self) -> Result<Option<Duration>, Error> {
        let secs = match (self.time, self.quick) {
            (Some(t), _) => t,
            (None, true) => QUICK_BUDGET_SECS,
            (None, false) => return Ok(None),
        };
        if !(secs.is_finite() && secs >= 0.0) {
            return Err(Error::InvalidParameters(format!(
                "invalid time budget {secs}"
            )));
        }
        Ok(Some(Duration::from_secs_f64(secs)))
    }

    /// Iteration and time bounds for a fixed-k search. Without any flag the
    /// full one-hour budget applies.
    fn stop(&self) -> Result<StopCondition, Error> {
        let time = self.explicit_time()?;
        Ok(match (self.iters, time) {
            (Some(i), Some(t)) => StopCondition::iterations(i).with_time(t),
            (Some(i), None) => StopCondition::iterations(i),
            (None, Some(t)) => StopCondition::time(t),
            (None, None) => StopCondition::time(Duration::from_secs_f64(FULL_BUDGET_SECS)),
        })
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// DIMACS .col instance.
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,
    /// Known lower bound on the equitable chromatic number.
    #[arg(long, default_value_t = 1)]
    lb: usize,
    /// Search this k only, from a from-scratch initial partition.
    #[arg(long)]
    k: Option<usize>,
    /// Write the best coloring here.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Instance name for the CSV row (defaults to the file stem).
    #[arg(long)]
    name: Option<String>,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// File listing one instance per line: `<path> <k> [lb]`; `#` starts a
    /// comment. Relative paths resolve against the file's directory.
    #[arg(long, value_name = "FILE")]
    instances: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = [0.3, 0.6, 0.9])]
    alphas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [5, 10, 15])]
    betas: Vec<u32>,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,
    #[arg(long, value_name = "PATH")]
    coloring: PathBuf,
}

#[derive(Args, Debug)]
struct KneserArgs {
    #[arg(long)]
    a: usize,
    #[arg(long)]
    b: usize,
    /// Output path; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Io(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        match err {
            Error::Parse { .. } | Error::Io(_) | Error::Csv(_) => Failure::Io(err.to_string()),
            Error::NotAnEqcol(_) => Failure::Verification(err.to_string()),
            _ => Failure::Usage(err.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Solve(args) => solve(args),
        Command::Sweep(args) => sweep(args),
        Command::Verify(args) => verify(args),
        Command::GenKneser(args) => gen_kneser(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(3)
        }
    }
}

fn read_graph(path: &Path) -> Result<Graph, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    Graph::parse_dimacs(&text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents)
        .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

fn instance_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn emit_records(
    csv: Option<&Path>,
    records: &[eqcol_core::bench::RunRecord],
) -> Result<(), Failure> {
    match csv {
        Some(path) => append_csv(path, records)?,
        None => write_csv(std::io::stdout().lock(), records, true)?,
    }
    Ok(())
}

fn solve(args: SolveArgs) -> Result<(), Failure> {
    let graph = read_graph(&args.input)?;
    let budget = &args.budget;
    let mode = match args.k {
        Some(k) => SolveMode::FixedK {
            k,
            stop: budget.stop()?,
        },
        None => SolveMode::Descending(DescentConfig {
            lower_bound: args.lb,
            params: budget.params()?,
            time_limit: budget
                .explicit_time()?
                .unwrap_or(Duration::from_secs_f64(FULL_BUDGET_SECS)),
            iteration_cap: budget.iters.unwrap_or(DEFAULT_ITERATION_CAP),
        }),
    };
    let options = SolveOptions {
        params: budget.params()?,
        seed: budget.seed,
        mode,
        suppress_timing: budget.no_timing,
        lower_bound: args.lb,
    };
    let name = args
        .name
        .clone()
        .unwrap_or_else(|| instance_name(&args.input));
    let outcome = run_instance(&name, &graph, &options)?;
    let record = &outcome.record;
    eprintln!(
        "{name}: k={} solved={} residual={} iterations={}",
        record.k_reached, record.solved, record.residual, record.iterations
    );
    if let Some(out) = &args.out {
        write_file(out, &outcome.coloring.to_coloring_file())?;
    }
    emit_records(budget.csv.as_deref(), std::slice::from_ref(record))
}

fn parse_instance_list(path: &Path) -> Result<Vec<(PathBuf, usize, usize)>, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let bad = || {
            Failure::Io(format!(
                "{}:{}: expected `<path> <k> [lb]`",
                path.display(),
                idx + 1
            ))
        };
        let (file, k, lb) = match tokens.as_slice() {
            [file, k] => (*file, k.parse().map_err(|_| bad())?, 1),
            [file, k, lb] => (
                *file,
                k.parse().map_err(|_| bad())?,
                lb.parse().map_err(|_| bad())?,
            ),
            _ => return Err(bad()),
        };
        entries.push((base.join(file), k, lb));
    }
    Ok(entries)
}

fn sweep(args: SweepArgs) -> Result<(), Failure> {
    let budget = &args.budget;
    let entries = parse_instance_list(&args.instances)?;
    if entries.is_empty() {
        return Err(Failure::Usage("instance list is empty".into()));
    }
    let config = SweepConfig {
        alphas: args.alphas.clone(),
        betas: args.betas.clone(),
        stop: budget.stop()?,
        seed: budget.seed,
        suppress_timing: budget.no_timing,
    };
    let instances = entries.into_iter().map(|(path, k, lower_bound)| {
        let text = fs::read_to_string(&path)?;
        let graph = Graph::parse_dimacs(&text)?;
        Ok(SweepInstance {
            name: instance_name(&path),
            graph,
            k,
            lower_bound,
        })
    });
    match run_sweep(instances, &config) {
        Ok(table) => {
            print!("{}", table.render());
            if let Some(csv) = &budget.csv {
                append_csv(csv, &table.records())?;
            }
            Ok(())
        }
        Err(aborted) => {
            if aborted.completed.cell_count() > 0 {
                print!("{}", aborted.completed.render());
            }
            let failure = Failure::from(aborted.source);
            let msg = format!(
                "sweep aborted after {} completed cells",
                aborted.completed.cell_count()
            );
            Err(match failure {
                Failure::Io(m) => Failure::Io(format!("{msg}: {m}")),
                Failure::Usage(m) => Failure::Usage(format!("{msg}: {m}")),
                Failure::Verification(m) => Failure::Verification(format!("{msg}: {m}")),
            })
        }
    }
}

fn verify(args: VerifyArgs) -> Result<(), Failure> {
    let graph = read_graph(&args.input)?;
    let text = fs::read_to_string(&args.coloring)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", args.coloring.display())))?;
    let coloring = ColoringFile::parse(&text)
        .map_err(|e| Failure::Io(format!("{}: {e}", args.coloring.display())))?;
    if coloring.color_of.len() != graph.n() {
        return Err(Failure::Verification(format!(
            "coloring covers {} vertices, graph has {}",
            coloring.color_of.len(),
            graph.n()
        )));
    }
    if !verify_eqcol(&graph, coloring.k, &coloring.color_of) {
        return Err(Failure::Verification(format!(
            "not a proper equitable {}-coloring",
            coloring.k
        )));
    }
    println!("valid equitable {}-coloring", coloring.k);
    Ok(())
}

fn gen_kneser(args: KneserArgs) -> Result<(), Failure> {
    let graph = Graph::kneser(args.a, args.b)?;
    let text = graph.to_dimacs();
    match &args.out {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
