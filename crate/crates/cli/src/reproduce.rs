//! Canonical experiments behind the figure and table data.

use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use fracopt::fdesolve::format_real;
use fracopt::optimizers::{energy_trace, oscillation_census, stability_envelope_check};
use fracopt::problems::thomson_reference_energy;
use fracopt::{make_thomson, FractionalOrder};

use crate::experiment::{run_experiment, ExperimentReport, RunOptions};
use crate::spec::{ExperimentSpec, MethodSpec, ProblemSpec, RunSpec};
use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Table1,
    Table2,
}

impl Target {
    pub const ALL: [Target; 6] = [Target::Fig1, Target::Fig2, Target::Fig3, Target::Fig4, Target::Table1, Target::Table2];

    pub fn name(self) -> &'static str {
        match self {
            Target::Fig1 => "fig1",
            Target::Fig2 => "fig2",
            Target::Fig3 => "fig3",
            Target::Fig4 => "fig4",
            Target::Table1 => "table1",
            Target::Table2 => "table2",
        }
    }
}

impl FromStr for Target {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        Target::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown target {s:?}; expected one of fig1..fig4, table1, table2")))
    }
}

pub const TABLE1_ORDERS: [f64; 5] = [0.8, 1.0, 1.2, 1.4, 1.6];
pub const TABLE1_LAMBDA: f64 = 0.001;
pub const TABLE1_STEP: f64 = 5.0;
pub const TABLE1_HORIZON: f64 = 50_000.0;

pub const TABLE2_CHARGES: [usize; 4] = [4, 5, 6, 12];
pub const TABLE2_LAMBDA: f64 = 1.0;
pub const TABLE2_STEP: f64 = 0.01;
pub const TABLE2_HORIZON: f64 = 50.0;
pub const TABLE2_RESTARTS: usize = 10;
pub const TABLE2_SEED: u64 = 7;
pub const TABLE2_FRACTIONAL_ORDER: f64 = 0.7;

fn fctm(alpha: f64, lambda: f64, h: f64) -> MethodSpec {
    MethodSpec::FCTM { alpha, lambda, h, v0: None }
}

fn quadratic_run(t_end: f64, thresholds: Vec<f64>) -> RunSpec {
    RunSpec { t_end: Some(t_end), thresholds, ..RunSpec::default() }
}

/// The experiments a target runs, in output order.
pub fn specs(target: Target) -> Vec<ExperimentSpec> {
    let quadratic = ProblemSpec::Quadratic { center: 3.0 };
    match target {
        Target::Fig1 => {
            let fgdm = |operator: &str| MethodSpec::FGDM {
                alpha: 0.9,
                omega: 0.05,
                operator: operator.into(),
                lower_limit: 0.0,
                memory_length: None,
                gl_step: None,
            };
            vec![ExperimentSpec {
                name: "fig1".into(),
                problem: quadratic,
                run: RunSpec { max_iter: Some(1000), ..quadratic_run(20.0, vec![0.1, 0.01, 0.001]) },
                method: vec![fgdm("rl"), fgdm("caputo"), fctm(0.9, 1.0, 0.01), MethodSpec::GDM { omega: 0.05 }],
            }]
        }
        Target::Fig2 => vec![ExperimentSpec {
            name: "fig2".into(),
            problem: quadratic,
            run: quadratic_run(40.0, vec![0.1, 0.01, 0.003, 0.001]),
            method: [0.5, 0.7, 0.9, 1.0, 1.2, 1.5, 1.7].iter().map(|&a| fctm(a, 1.0, 1e-3)).collect(),
        }],
        Target::Fig3 => {
            let mut method = Vec::new();
            for alpha in [1.2, 1.5, 1.7] {
                for v in [0.0, 0.5] {
                    method.push(MethodSpec::FCTM { alpha, lambda: 1.0, h: 1e-3, v0: Some(vec![v]) });
                }
            }
            vec![ExperimentSpec {
                name: "fig3".into(),
                problem: quadratic,
                run: quadratic_run(20.0, vec![0.1, 0.01, 0.003]),
                method,
            }]
        }
        Target::Fig4 => vec![ExperimentSpec {
            name: "fig4".into(),
            problem: quadratic,
            run: RunSpec { write_traces: false, ..quadratic_run(20.0, vec![0.1, 0.01, 0.001]) },
            method: [0.5, 0.7, 0.9, 1.0, 1.2, 1.5, 1.7].iter().map(|&a| fctm(a, 1.0, 1e-2)).collect(),
        }],
        Target::Table1 => vec![ExperimentSpec {
            name: "table1".into(),
            problem: ProblemSpec::Vandermonde { degree: 10, nodes: None, u_true: None, coefficient_seed: None },
            run: RunSpec {
                metric: Some("residual".into()),
                ..quadratic_run(TABLE1_HORIZON, vec![0.1, 0.01, 0.001])
            },
            method: TABLE1_ORDERS.iter().map(|&a| fctm(a, TABLE1_LAMBDA, TABLE1_STEP)).collect(),
        }],
        Target::Table2 => TABLE2_CHARGES
            .iter()
            .map(|&n| ExperimentSpec {
                name: format!("n{n}"),
                problem: ProblemSpec::Thomson { charges: n },
                run: RunSpec {
                    metric: Some("value".into()),
                    thresholds: Vec::new(),
                    t_end: Some(TABLE2_HORIZON),
                    restarts: TABLE2_RESTARTS,
                    seed: TABLE2_SEED,
                    write_traces: false,
                    ..RunSpec::default()
                },
                method: vec![
                    MethodSpec::CGM { lambda: TABLE2_LAMBDA, h: TABLE2_STEP, rel_tol: 1e-8, abs_tol: 1e-10, max_step: None },
                    fctm(TABLE2_FRACTIONAL_ORDER, TABLE2_LAMBDA, TABLE2_STEP),
                ],
            })
            .collect(),
    }
}

/// Row of the condensed Thomson table.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyRow {
    pub charges: usize,
    pub label: String,
    pub best_energy: f64,
    pub best_restart: usize,
    pub reference: f64,
    pub relative_error: f64,
    pub field_evaluations: usize,
}

#[derive(Debug)]
pub struct ReproduceReport {
    pub target: Target,
    pub dir: PathBuf,
    pub experiments: Vec<ExperimentReport>,
    /// Condensed table written next to the experiment directories.
    pub table: String,
    pub energy_rows: Vec<EnergyRow>,
}

impl ReproduceReport {
    pub fn all_completed(&self) -> bool {
        self.experiments.iter().all(ExperimentReport::all_completed)
    }
}

/// Runs a target under `<out_dir>/<target>/`.
pub fn reproduce(target: Target, opts: &RunOptions) -> Result<ReproduceReport, HarnessError> {
    let dir = opts.out_dir.join(target.name());
    let inner = RunOptions { out_dir: dir.clone(), ..opts.clone() };
    let experiments =
        specs(target).iter().map(|s| run_experiment(s, &inner)).collect::<Result<Vec<_>, HarnessError>>()?;
    let mut report = ReproduceReport { target, dir, experiments, table: String::new(), energy_rows: Vec::new() };
    match target {
        Target::Fig4 => write_energy_data(&mut report)?,
        Target::Table1 => write_table1(&mut report)?,
        Target::Table2 => write_table2(&mut report)?,
        _ => {
            let e = &report.experiments[0];
            report.table = crate::experiment::render_table(&e.records, &e.thresholds);
        }
    }
    Ok(report)
}

fn write_energy_data(report: &mut ReproduceReport) -> Result<(), HarnessError> {
    let e = &report.experiments[0];
    let mut census = csv::Writer::from_path(report.dir.join("census.csv"))?;
    census.write_record(["alpha", "oscillation_census", "monotone", "envelope_passed", "envelope_max_excess"])?;
    let mut table = format!("{:>6} {:>8} {:>9} {:>9}\n", "alpha", "census", "monotone", "envelope");
    for (rec, res) in e.records.iter().zip(&e.results) {
        let Some(traj) = res.as_ref().and_then(|r| r.trace.trajectory()) else { continue };
        let energy = energy_trace(traj, &[3.0], 2.0);
        energy.write_csv(fs::File::create(report.dir.join(format!("energy_alpha{}.csv", rec.alpha)))?)?;
        let n = oscillation_census(&energy);
        let envelope = if rec.alpha <= 1.0 {
            Some(stability_envelope_check(traj, &[3.0], 2.0, FractionalOrder::new(rec.alpha)?)?)
        } else {
            None
        };
        census.write_record([
            format_real(rec.alpha),
            n.to_string(),
            energy.is_nonincreasing().to_string(),
            envelope.as_ref().map(|c| c.passed.to_string()).unwrap_or_default(),
            envelope.as_ref().map(|c| format_real(c.max_excess)).unwrap_or_default(),
        ])?;
        let env = envelope.map(|c| if c.passed { "pass" } else { "FAIL" }).unwrap_or("-");
        table.push_str(&format!("{:>6} {:>8} {:>9} {:>9}\n", rec.alpha, n, energy.is_nonincreasing(), env));
    }
    census.flush()?;
    report.table = table;
    Ok(())
}

fn write_table1(report: &mut ReproduceReport) -> Result<(), HarnessError> {
    let e = &report.experiments[0];
    let mut w = csv::Writer::from_path(report.dir.join("table1.csv"))?;
    let mut header = vec!["alpha".to_string()];
    header.extend(e.thresholds.iter().map(|t| crate::experiment::passage_column(*t)));
    header.extend(["final_residual".into(), "ratio_vs_alpha1".into()]);
    w.write_record(&header)?;
    let mut rows: Vec<_> = e.records.iter().collect();
    rows.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    for r in rows {
        let mut row = vec![format_real(r.alpha)];
        row.extend(r.first_passage.iter().map(|t| t.map(format_real).unwrap_or_default()));
        row.push(format_real(r.final_metric));
        row.push(r.ratio_vs_baseline.map(format_real).unwrap_or_default());
        w.write_record(&row)?;
    }
    w.flush()?;
    report.table = crate::experiment::render_table(&e.records, &e.thresholds);
    Ok(())
}

fn write_table2(report: &mut ReproduceReport) -> Result<(), HarnessError> {
    let mut rows = Vec::new();
    for (n, e) in TABLE2_CHARGES.iter().zip(&report.experiments) {
        let reference = thomson_reference_energy(*n).expect("reference energies cover the table");
        let spec = *make_thomson(*n)?.spec();
        let methods: Vec<usize> = {
            let mut m: Vec<usize> = e.records.iter().map(|r| r.method_index).collect();
            m.dedup();
            m
        };
        for m in methods {
            let cells: Vec<_> = e.records.iter().zip(&e.results).filter(|(r, _)| r.method_index == m).collect();
            let best = cells
                .iter()
                .filter_map(|(r, res)| res.as_ref().map(|res| (r, res)))
                .min_by(|a, b| a.0.final_metric.total_cmp(&b.0.final_metric));
            let evals = cells.iter().map(|(r, _)| r.field_evaluations).sum();
            let (best_energy, best_restart) = match best {
                Some((r, res)) => {
                    let path = report.dir.join(format!("n{n}_m{m}_best_configuration.csv"));
                    spec.write_csv(&res.converged_to, fs::File::create(path)?)?;
                    (r.final_metric, r.restart)
                }
                None => (f64::NAN, 0),
            };
            rows.push(EnergyRow {
                charges: *n,
                label: cells[0].0.label.clone(),
                best_energy,
                best_restart,
                reference,
                relative_error: (best_energy - reference).abs() / reference,
                field_evaluations: evals,
            });
        }
    }

    let mut w = csv::Writer::from_path(report.dir.join("table2.csv"))?;
    w.write_record([
        "charges",
        "label",
        "t_end",
        "h",
        "lambda",
        "restarts",
        "best_energy",
        "best_restart",
        "reference_energy",
        "relative_error",
        "field_evaluations",
    ])?;
    let mut table = format!(
        "t_end = {TABLE2_HORIZON}, h = {TABLE2_STEP}, lambda = {TABLE2_LAMBDA}, {TABLE2_RESTARTS} restarts\n{:>3} {:<18} {:>14} {:>14} {:>10} {:>10}\n",
        "N", "label", "best", "reference", "rel.err", "evals"
    );
    for r in &rows {
        w.write_record([
            r.charges.to_string(),
            r.label.clone(),
            format_real(TABLE2_HORIZON),
            format_real(TABLE2_STEP),
            format_real(TABLE2_LAMBDA),
            TABLE2_RESTARTS.to_string(),
            format_real(r.best_energy),
            r.best_restart.to_string(),
            format_real(r.reference),
            format_real(r.relative_error),
            r.field_evaluations.to_string(),
        ])?;
        table.push_str(&format!(
            "{:>3} {:<18} {:>14.9} {:>14.9} {:>10.2e} {:>10}\n",
            r.charges, r.label, r.best_energy, r.reference, r.relative_error, r.field_evaluations
        ));
    }
    w.flush()?;
    report.table = table;
    report.energy_rows = rows;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_canonical_spec_is_valid() {
        for t in Target::ALL {
            for s in specs(t) {
                s.validate().unwrap_or_else(|e| panic!("{}: {e}", t.name()));
                assert_eq!(ExperimentSpec::from_toml(&s.to_toml()).unwrap(), s);
            }
        }
    }

    #[test]
    fn target_names_round_trip() {
        for t in Target::ALL {
            assert_eq!(t.name().parse::<Target>().unwrap(), t);
        }
        assert!("fig9".parse::<Target>().is_err());
    }
}
