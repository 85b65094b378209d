//! Run records, CSV output and parameter sweeps.
//!
//! A single run either follows the descending-`k` protocol or searches a fixed
//! `k` from a from-scratch initial partition. A sweep runs the fixed-`k` search
//! for every `(alpha, beta)` combination of a grid over a list of instances,
//! reusing one initial partition per instance, and summarises each
//! combination by the residual objective left on failures, the success rate
//! and the mean time of successful runs.

use std::fmt::{self, Write as _};
use std::fs::OpenOptions;
use std::io::{Read, Write};
use std::path::Path;
use std::time::Duration;

use crate::construct::procedure1;
use crate::driver::{solve_descending, DescentConfig};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;
use crate::rng::SeededRng;
use crate::tabu::{tabu_eqcol, StopCondition, TenureParams};

pub const CSV_HEADER: [&str; 12] = [
    "instance", "n", "m", "lb", "alpha", "beta", "seed", "k", "solved", "residual", "iters",
    "seconds",
];

/// One row of results.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub instance: String,
    pub n: usize,
    pub m: usize,
    pub lower_bound: usize,
    pub alpha: f64,
    pub beta: u32,
    pub seed: u64,
    pub k_reached: usize,
    pub solved: bool,
    /// Best objective of the failed search; 0 when solved.
    pub residual: usize,
    pub iterations: u64,
    /// Wall-clock seconds, `None` when timing is suppressed.
    pub seconds: Option<f64>,
}

impl RunRecord {
    pub fn to_fields(&self) -> [String; 12] {
        [
            self.instance.clone(),
            self.n.to_string(),
            self.m.to_string(),
            self.lower_bound.to_string(),
            self.alpha.to_string(),
            self.beta.to_string(),
            self.seed.to_string(),
            self.k_reached.to_string(),
            self.solved.to_string(),
            self.residual.to_string(),
            self.iterations.to_string(),
            self.seconds.map(|s| format!("{s:.3}")).unwrap_or_default(),
        ]
    }

    pub fn from_fields(record: &csv::StringRecord) -> Result<Self> {
        if record.len() != CSV_HEADER.len() {
            return Err(Error::InvalidParameters(format!(
                "expected {} CSV fields, found {}",
                CSV_HEADER.len(),
                record.len()
            )));
        }
        let field = |i: usize| &record[i];
        fn num<T: std::str::FromStr>(text: &str, name: &str) -> Result<T> {
            text.parse()
                .map_err(|_| Error::InvalidParameters(format!("bad {name} field `{text}`")))
        }
        Ok(Self {
            instance: field(0).to_string(),
            n: num(field(1), "n")?,
            m: num(field(2), "m")?,
            lower_bound: num(field(3), "lb")?,
            alpha: num(field(4), "alpha")?,
            beta: num(field(5), "beta")?,
            seed: num(field(6), "seed")?,
            k_reached: num(field(7), "k")?,
            solved: num(field(8), "solved")?,
            residual: num(field(9), "residual")?,
            iterations: num(field(10), "iters")?,
            seconds: match field(11) {
                "" => None,
                s => Some(num(s, "seconds")?),
            },
        })
    }
}

/// Writes records as CSV, with the header line first when `header` is set.
pub fn write_csv<W: Write>(writer: W, records: &[RunRecord], header: bool) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    if header {
        out.write_record(CSV_HEADER)?;
    }
    for record in records {
        out.write_record(record.to_fields())?;
    }
    out.flush()?;
    Ok(())
}

/// Appends records to a CSV file, writing the header if the file is new or
/// empty.
pub fn append_csv(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    let empty = file.metadata()?.len() == 0;
    let mut buffer = Vec::new();
    write_csv(&mut buffer, records, empty)?;
    file.write_all(&buffer)?;
    Ok(())
}

pub fn read_csv<R: Read>(reader: R) -> Result<Vec<RunRecord>> {
    let mut input = csv::Reader::from_reader(reader);
    input
        .records()
        .map(|row| RunRecord::from_fields(&row?))
        .collect()
}

#[derive(Clone, Copy, Debug)]
pub enum SolveMode {
    /// Descending-`k` protocol.
    Descending(DescentConfig),
    /// One search at a fixed `k`, started from a from-scratch partition.
    FixedK { k: usize, stop: StopCondition },
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub params: TenureParams,
    pub seed: u64,
    pub mode: SolveMode,
    /// Report no wall-clock time, which makes records reproducible.
    pub suppress_timing: bool,
    /// Recorded in the `lb` column in fixed-`k` mode.
    pub lower_bound: usize,
}

#[derive(Clone, Debug)]
pub struct SolveOutcome<'g> {
    pub record: RunRecord,
    pub coloring: Partition<'g>,
}

/// Runs one instance and returns its record and best partition.
pub fn run_instance<'g>(
    name: &str,
    graph: &'g Graph,
    options: &SolveOptions,
) -> Result<SolveOutcome<'g>> {
    let mut rng = SeededRng::new(options.seed);
    let timing = |elapsed: Duration| (!options.suppress_timing).then_some(elapsed.as_secs_f64());
    let (record_fields, coloring) = match options.mode {
        SolveMode::Descending(config) => {
            let config = DescentConfig {
                params: options.params,
                ..config
            };
            let report = solve_descending(graph, &config, &mut rng)?;
            let solved = report.best_k <= config.lower_bound;
            let fields = RecordFields {
                lower_bound: config.lower_bound,
                k_reached: report.best_k,
                solved,
                residual: if solved { 0 } else { report.residual() },
                iterations: report.total_iterations(),
                seconds: timing(report.total_elapsed),
            };
            (fields, report.best_coloring)
        }
        SolveMode::FixedK { k, stop } => {
            let s0 = procedure1(graph, k, &mut rng, None)?;
            let result = tabu_eqcol(s0, options.params, stop, &mut rng)?;
            let fields = RecordFields {
                lower_bound: options.lower_bound,
                k_reached: k,
                solved: result.solved,
                residual: result.best_objective,
                iterations: result.iterations_run,
                seconds: timing(result.elapsed),
            };
            (fields, result.best)
        }
    };
    let record = RunRecord {
        instance: name.to_string(),
        n: graph.n(),
        m: graph.m(),
        lower_bound: record_fields.lower_bound,
        alpha: options.params.alpha(),
        beta: options.params.beta(),
        seed: options.seed,
        k_reached: record_fields.k_reached,
        solved: record_fields.solved,
        residual: record_fields.residual,
        iterations: record_fields.iterations,
        seconds: record_fields.seconds,
    };
    Ok(SolveOutcome { record, coloring })
}

struct RecordFields {
    lower_bound: usize,
    k_reached: usize,
    solved: bool,
    residual: usize,
    iterations: u64,
    seconds: Option<f64>,
}

/// An instance of a sweep, searched at a predetermined `k`.
#[derive(Clone, Debug)]
pub struct SweepInstance {
    pub name: String,
    pub graph: Graph,
    pub k: usize,
    pub lower_bound: usize,
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub alphas: Vec<f64>,
    pub betas: Vec<u32>,
    pub stop: StopCondition,
    pub seed: u64,
    pub suppress_timing: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepColumn {
    pub label: String,
    pub params: TenureParams,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub instance: String,
    pub n: usize,
    pub m: usize,
    pub lower_bound: usize,
    pub k: usize,
    /// One record per column.
    pub cells: Vec<RunRecord>,
}

/// Aggregates of one parameter combination.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnSummary {
    /// Sum of residual objectives over unsolved cells.
    pub residual_sum: usize,
    pub success_percent: f64,
    /// Mean seconds over solved cells with timing.
    pub mean_seconds: Option<f64>,
}

impl ColumnSummary {
    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a RunRecord>) -> Self {
        let mut total = 0usize;
        let mut solved = 0usize;
        let mut residual_sum = 0;
        let mut times = Vec::new();
        for r in records {
            total += 1;
            if r.solved {
                solved += 1;
                times.extend(r.seconds);
            } else {
                residual_sum += r.residual;
            }
        }
        Self {
            residual_sum,
            success_percent: if total == 0 {
                0.0
            } else {
                100.0 * solved as f64 / total as f64
            },
            mean_seconds: (!times.is_empty())
                .then(|| times.iter().sum::<f64>() / times.len() as f64),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepTable {
    pub columns: Vec<SweepColumn>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn cell_count(&self) -> usize {
        self.rows.iter().map(|r| r.cells.len()).sum()
    }

    /// All cell records, row by row.
    pub fn records(&self) -> Vec<RunRecord> {
        self.rows
            .iter()
            .flat_map(|r| r.cells.iter().cloned())
            .collect()
    }

    pub fn summaries(&self) -> Vec<ColumnSummary> {
        (0..self.columns.len())
            .map(|c| ColumnSummary::from_records(self.rows.iter().map(|r| &r.cells[c])))
            .collect()
    }

    /// Plain-text matrix: solved cells show seconds, unsolved ones `{f}`.
    pub fn render(&self) -> String {
        let mut header = vec![
            "Instance".to_string(),
            "n".into(),
            "m".into(),
            "lb".into(),
            "k".into(),
        ];
        header.extend(self.columns.iter().map(|c| c.label.clone()));
        let mut params_row = vec![String::new(); 5];
        params_row[0] = "(alpha,beta)".into();
        params_row.extend(
            self.columns
                .iter()
                .map(|c| format!("({},{})", c.params.alpha(), c.params.beta())),
        );

        let mut body: Vec<Vec<String>> = Vec::new();
        for row in &self.rows {
            let mut line = vec![
                row.instance.clone(),
                row.n.to_string(),
                row.m.to_string(),
                row.lower_bound.to_string(),
                row.k.to_string(),
            ];
            line.extend(row.cells.iter().map(|cell| {
                if cell.solved {
                    cell.seconds
                        .map(|s| format!("{s:.1}"))
                        .unwrap_or_else(|| "ok".into())
                } else {
                    format!("{{{}}}", cell.residual)
                }
            }));
            body.push(line);
        }

        let summaries = self.summaries();
        let footer_row = |title: &str, cells: Vec<String>| {
            let mut line = vec![
                title.to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ];
            line.extend(cells);
            line
        };
        let footer = vec![
            footer_row(
                "Sum of objective values",
                summaries
                    .iter()
                    .map(|s| s.residual_sum.to_string())
                    .collect(),
            ),
            footer_row(
                "Success",
                summaries
                    .iter()
                    .map(|s| format!("{:.0}%", s.success_percent))
                    .collect(),
            ),
            footer_row(
                "Average Time",
                summaries
                    .iter()
                    .map(|s| {
                        s.mean_seconds
                            .map(|t| format!("{t:.1}"))
                            .unwrap_or_else(|| "-".into())
                    })
                    .collect(),
            ),
        ];

        let all = [vec![header, params_row], body, footer].concat();
        let widths: Vec<usize> = (0..all[0].len())
            .map(|c| all.iter().map(|line| line[c].len()).max().unwrap_or(0))
            .collect();
        let rule_at = 2 + self.rows.len();
        let mut out = String::new();
        for (i, line) in all.iter().enumerate() {
            if i == 2 || i == rule_at {
                writeln!(
                    out,
                    "{}",
                    "-".repeat(widths.iter().sum::<usize>() + 2 * widths.len())
                )
                .unwrap();
            }
            let cells: Vec<String> = line
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(c, (text, &w))| {
                    if c == 0 {
                        format!("{text:<w$}")
                    } else {
                        format!("{text:>w$}")
                    }
                })
                .collect();
            writeln!(out, "{}", cells.join("  ").trim_end()).unwrap();
        }
        out
    }
}

/// Column label for a zero-based index: `A..Z`, then `AA`, `AB`, ...
pub fn column_label(mut index: usize) -> String {
    let mut label = Vec::new();
    loop {
        label.push(b'A' + (index % 26) as u8);
        if index < 26 {
            break;
        }
        index = index / 26 - 1;
    }
    label.reverse();
    String::from_utf8(label).unwrap()
}

/// A sweep that stopped on a failing instance, with the cells completed
/// before it.
#[derive(Debug)]
pub struct SweepAborted {
    pub completed: SweepTable,
    pub source: Error,
}

impl fmt::Display for SweepAborted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sweep aborted after {} completed cells: {}",
            self.completed.cell_count(),
            self.source
        )
    }
}

impl std::error::Error for SweepAborted {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

/// Runs every `(alpha, beta)` combination, alpha-major, on every instance.
/// Each instance gets one initial partition, shared by all its cells.
pub fn run_sweep<I>(
    instances: I,
    config: &SweepConfig,
) -> std::result::Result<SweepTable, SweepAborted>
where
    I: IntoIterator<Item = Result<SweepInstance>>,
{
    let mut table = SweepTable::default();
    let grid: Result<Vec<TenureParams>> = config
        .alphas
        .iter()
        .flat_map(|&a| config.betas.iter().map(move |&b| TenureParams::new(a, b)))
        .collect();
    let grid = match grid {
        Ok(g) if !g.is_empty() => g,
        Ok(_) => {
            return Err(SweepAborted {
                completed: table,
                source: Error::InvalidParameters("empty parameter grid".into()),
            })
        }
        Err(source) => {
            return Err(SweepAborted {
                completed: table,
                source,
            })
        }
    };
    table.columns = grid
        .iter()
        .enumerate()
        .map(|(i, &params)| SweepColumn {
            label: column_label(i),
            params,
        })
        .collect();

    for instance in instances {
        match sweep_instance(instance, &grid, config) {
            Ok(row) => table.rows.push(row),
            Err(source) => {
                return Err(SweepAborted {
                    completed: table,
                    source,
                })
            }
        }
    }
    Ok(table)
}

fn sweep_instance(
    instance: Result<SweepInstance>,
    grid: &[TenureParams],
    config: &SweepConfig,
) -> Result<SweepRow> {
    let instance = instance?;
    let graph = &instance.graph;
    let s0 = procedure1(graph, instance.k, &mut SeededRng::new(config.seed), None)?;
    let mut cells = Vec::with_capacity(grid.len());
    for &params in grid {
        let mut rng = SeededRng::new(config.seed);
        let result = tabu_eqcol(s0.clone(), params, config.stop, &mut rng)?;
        cells.push(RunRecord {
            instance: instance.name.clone(),
            n: graph.n(),
            m: graph.m(),
            lower_bound: instance.lower_bound,
            alpha: params.alpha(),
            beta: params.beta(),
            seed: config.seed,
            k_reached: instance.k,
            solved: result.solved,
            residual: result.best_objective,
            iterations: result.iterations_run,
            seconds: (!config.suppress_timing).then_some(result.elapsed.as_secs_f64()),
        });
    }
    Ok(SweepRow {
        instance: instance.name,
        n: graph.n(),
        m: graph.m(),
        lower_bound: instance.lower_bound,
        k: instance.k,
        cells,
    })
}
