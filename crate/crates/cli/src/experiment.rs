use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use fracopt::fdesolve::format_real;
use fracopt::optimizers::run;
use fracopt::{Error, RunResult};
use rayon::prelude::*;

use crate::spec::{derive_seed, ExperimentSpec, MethodSpec};
use crate::HarnessError;

/// Where and how to run an experiment.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Worker threads; 0 lets rayon decide.
    pub workers: usize,
    /// Overrides the spec's base seed.
    pub seed: Option<u64>,
    /// Also write `timing.csv` with wall-clock times (not reproducible).
    pub timing: bool,
}

impl RunOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        RunOptions { out_dir: out_dir.into(), workers: 0, seed: None, timing: false }
    }
}

/// How a single (method, restart) cell ended.
#[derive(Debug, Clone, PartialEq)]
pub enum CellStatus {
    Completed,
    /// Nonfinite state, step-size underflow or a singular configuration.
    Diverged(String),
    Failed(String),
}

impl CellStatus {
    fn as_field(&self) -> String {
        match self {
            CellStatus::Completed => "completed".into(),
            CellStatus::Diverged(m) => format!("diverged: {m}"),
            CellStatus::Failed(m) => format!("failed: {m}"),
        }
    }
}

/// One row of the summary table.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRecord {
    pub problem: String,
    pub method_index: usize,
    pub label: String,
    pub method: String,
    pub alpha: f64,
    pub gain: f64,
    pub restart: usize,
    pub seed: u64,
    pub status: CellStatus,
    /// First-passage time per threshold, in the order of the spec.
    pub first_passage: Vec<Option<f64>>,
    pub final_metric: f64,
    pub best_metric: f64,
    /// Final metric of the α = 1 baseline divided by this final metric.
    pub ratio_vs_baseline: Option<f64>,
    pub steps: usize,
    pub field_evaluations: usize,
    pub wall_time: Duration,
    /// Trace file name relative to the experiment directory.
    pub trace_file: Option<String>,
}

/// Result of [`run_experiment`].
#[derive(Debug)]
pub struct ExperimentReport {
    pub name: String,
    pub dir: PathBuf,
    pub thresholds: Vec<f64>,
    pub records: Vec<SummaryRecord>,
    /// Successful results keyed like `records`; `None` for cells that did not complete.
    pub results: Vec<Option<RunResult>>,
}

impl ExperimentReport {
    pub fn all_completed(&self) -> bool {
        self.records.iter().all(|r| r.status == CellStatus::Completed)
    }

    pub fn summary_path(&self) -> PathBuf {
        self.dir.join("summary.csv")
    }
}

struct Cell {
    method_index: usize,
    restart: usize,
    seed: u64,
}

/// Runs every (method × restart) cell of `spec`, writing `summary.csv` and one trace
/// CSV per cell under `<out_dir>/<name>/`.
pub fn run_experiment(spec: &ExperimentSpec, opts: &RunOptions) -> Result<ExperimentReport, HarnessError> {
    spec.validate()?;
    let objective = spec.problem.build()?;
    let base_seed = opts.seed.unwrap_or(spec.run.seed);
    let configs = spec.method.iter().map(MethodSpec::to_config).collect::<Result<Vec<_>, _>>()?;
    let rules = spec.method.iter().map(|m| spec.stopping_rule_for(m)).collect::<Result<Vec<_>, _>>()?;

    let cells: Vec<Cell> = (0..spec.method.len())
        .flat_map(|m| {
            (0..spec.run.restarts).map(move |r| Cell { method_index: m, restart: r, seed: derive_seed(base_seed, r) })
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot start workers: {e}")))?;
    let mut outcomes: Vec<(usize, usize, u64, Result<RunResult, Error>)> = pool.install(|| {
        cells
            .par_iter()
            .map(|c| {
                let outcome = spec
                    .problem
                    .initial_point(spec.run.initial.as_deref(), c.seed)
                    .map_err(|e| Error::Config(e.to_string()))
                    .and_then(|u0| run(objective.as_ref(), &u0, &configs[c.method_index], &rules[c.method_index]));
                (c.method_index, c.restart, c.seed, outcome)
            })
            .collect()
    });
    outcomes.sort_by_key(|(m, r, _, _)| (*m, *r));

    let dir = opts.out_dir.join(&spec.name);
    fs::create_dir_all(&dir)?;
    if spec.run.write_traces {
        fs::create_dir_all(dir.join("traces"))?;
    }

    let mut records = Vec::with_capacity(outcomes.len());
    let mut results = Vec::with_capacity(outcomes.len());
    for (m, restart, seed, outcome) in outcomes {
        let cfg = &configs[m];
        let mut record = SummaryRecord {
            problem: spec.problem.id(),
            method_index: m,
            label: cfg.label(),
            method: cfg.method().name().to_string(),
            alpha: cfg.alpha().value(),
            gain: cfg.gain(),
            restart,
            seed,
            status: CellStatus::Completed,
            first_passage: vec![None; spec.run.thresholds.len()],
            final_metric: f64::NAN,
            best_metric: f64::NAN,
            ratio_vs_baseline: None,
            steps: 0,
            field_evaluations: 0,
            wall_time: Duration::ZERO,
            trace_file: None,
        };
        match outcome {
            Ok(res) => {
                record.first_passage = spec.run.thresholds.iter().map(|&eps| res.passage(eps)).collect();
                record.final_metric = res.final_metric;
                record.best_metric = res.best_metric;
                record.steps = res.cost.steps;
                record.field_evaluations = res.cost.field_evaluations;
                record.wall_time = res.cost.wall_time;
                if spec.run.write_traces {
                    let name = format!("traces/m{m:02}_r{restart:02}.csv");
                    res.write_trace_csv(fs::File::create(dir.join(&name))?)?;
                    record.trace_file = Some(name);
                }
                results.push(Some(res));
            }
            Err(e) => {
                record.status = match e {
                    Error::Divergence { .. } | Error::Stiffness { .. } | Error::Singularity { .. } => {
                        CellStatus::Diverged(e.to_string())
                    }
                    other => CellStatus::Failed(other.to_string()),
                };
                results.push(None);
            }
        }
        records.push(record);
    }
    fill_ratios(&mut records);

    write_summary(&records, &spec.run.thresholds, fs::File::create(dir.join("summary.csv"))?)?;
    if opts.timing {
        write_timing(&records, fs::File::create(dir.join("timing.csv"))?)?;
    }
    Ok(ExperimentReport { name: spec.name.clone(), dir, thresholds: spec.run.thresholds.clone(), records, results })
}

/// For every restart, divides the final metric of the first completed α = 1 method by
/// each row's final metric.
fn fill_ratios(records: &mut [SummaryRecord]) {
    let restarts: Vec<usize> = records.iter().map(|r| r.restart).collect();
    for restart in restarts {
        let baseline = records
            .iter()
            .find(|r| r.restart == restart && r.alpha == 1.0 && r.status == CellStatus::Completed)
            .map(|r| r.final_metric);
        if let Some(b) = baseline {
            for r in records.iter_mut().filter(|r| r.restart == restart && r.status == CellStatus::Completed) {
                r.ratio_vs_baseline = Some(b / r.final_metric);
            }
        }
    }
}

fn optional(x: Option<f64>) -> String {
    x.map(format_real).unwrap_or_default()
}

/// Column name for a first-passage threshold, e.g. `t_lt_0.01`.
pub fn passage_column(eps: f64) -> String {
    format!("t_lt_{eps}")
}

pub fn write_summary<W: Write>(records: &[SummaryRecord], thresholds: &[f64], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> =
        ["problem", "method_index", "label", "method", "alpha", "gain", "restart", "seed", "status"]
            .map(String::from)
            .to_vec();
    header.extend(thresholds.iter().map(|e| passage_column(*e)));
    header.extend(
        ["final_metric", "best_metric", "ratio_vs_alpha1", "steps", "field_evaluations", "trace"].map(String::from),
    );
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![
            r.problem.clone(),
            r.method_index.to_string(),
            r.label.clone(),
            r.method.clone(),
            format_real(r.alpha),
            format_real(r.gain),
            r.restart.to_string(),
            r.seed.to_string(),
            r.status.as_field(),
        ];
        row.extend(r.first_passage.iter().map(|t| optional(*t)));
        row.extend([
            format_real(r.final_metric),
            format_real(r.best_metric),
            optional(r.ratio_vs_baseline),
            r.steps.to_string(),
            r.field_evaluations.to_string(),
            r.trace_file.clone().unwrap_or_default(),
        ]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn write_timing<W: Write>(records: &[SummaryRecord], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method_index", "label", "restart", "wall_seconds"])?;
    for r in records {
        w.write_record([
            r.method_index.to_string(),
            r.label.clone(),
            r.restart.to_string(),
            format!("{:.6}", r.wall_time.as_secs_f64()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Fixed-width table for terminal output.
pub fn render_table(records: &[SummaryRecord], thresholds: &[f64]) -> String {
    let mut s = format!("{:<34} {:>3} {:>12}", "label", "r", "final");
    for eps in thresholds {
        s.push_str(&format!(" {:>12}", format!("t<{eps}")));
    }
    s.push_str(&format!(" {:>12} {:>10}  status\n", "ratio", "evals"));
    for r in records {
        s.push_str(&format!("{:<34} {:>3} {:>12.4e}", r.label, r.restart, r.final_metric));
        for t in &r.first_passage {
            s.push_str(&format!(" {:>12}", t.map(|t| format!("{t:.4}")).unwrap_or_else(|| "-".into())));
        }
        let ratio = r.ratio_vs_baseline.map(|x| format!("{x:.4e}")).unwrap_or_else(|| "-".into());
        s.push_str(&format!(" {:>12} {:>10}  {}\n", ratio, r.field_evaluations, r.status.as_field()));
    }
    s
}

/// Reads a summary CSV back as rows of strings, header first.
pub fn read_csv(path: &Path) -> Result<Vec<Vec<String>>, HarnessError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_path(path)?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        rows.push(rec?.iter().map(String::from).collect());
    }
    Ok(rows)
}
