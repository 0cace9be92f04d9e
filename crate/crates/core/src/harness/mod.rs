//! Experiment harness: configuration, paired multi-trial execution,
//! aggregation, and CSV emission.
//!
//! Within a trial every policy faces the identical environment and the
//! identical `(seed, t)`-keyed noise stream, so policies are compared on
//! paired draws. All outputs are deterministic functions of the
//! configuration.

mod config;

pub use config::{parse_config, EnvSpec, ExperimentConfig, NamedPolicy};

use crate::error::{Error, Result};
use crate::policy::{self, PolicyVariant, RunRecord};
use std::fs;
use std::io::Write;
use std::path::Path;

/// One policy's trace in one trial.
#[derive(Debug, Clone)]
pub struct TrialRun {
    pub trial: usize,
    pub policy: String,
    pub record: RunRecord,
}

/// Per-policy mean cumulative regret and half standard deviation over
/// trials, per time step.
#[derive(Debug, Clone)]
pub struct AggregateResult {
    pub policy_names: Vec<String>,
    pub mean_cum_regret: Vec<Vec<f64>>,
    pub half_std: Vec<Vec<f64>>,
    /// Observation-reveal times per policy (identical across trials).
    pub batch_ends: Vec<Vec<usize>>,
    pub horizon: usize,
}

impl AggregateResult {
    pub fn policy_index(&self, name: &str) -> Option<usize> {
        self.policy_names.iter().position(|n| n == name)
    }

    pub fn final_mean_regret(&self, name: &str) -> Option<f64> {
        let i = self.policy_index(name)?;
        self.mean_cum_regret[i].last().copied()
    }
}

/// Full output of [`run_experiment`].
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub aggregate: AggregateResult,
    pub raw: Vec<TrialRun>,
}

/// Executes every (trial, policy) pair and aggregates the curves.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let horizon = config.horizon;
    let names: Vec<String> = config.policies.iter().map(|p| p.name.clone()).collect();
    let mut raw = Vec::with_capacity(config.trials * config.policies.len());
    let mut curves: Vec<Vec<Vec<f64>>> = vec![Vec::new(); config.policies.len()];
    for trial in 0..config.trials {
        let seed = config.base_seed.wrapping_add(trial as u64);
        let env = config.env_spec.build(seed)?;
        for (pi, named) in config.policies.iter().enumerate() {
            let record = policy::run(&named.config, &env, horizon, seed)?;
            curves[pi].push(record.cum_regret_curve());
            raw.push(TrialRun {
                trial,
                policy: named.name.clone(),
                record,
            });
        }
    }
    let mut mean_cum_regret = Vec::with_capacity(config.policies.len());
    let mut half_std = Vec::with_capacity(config.policies.len());
    for per_trial in &curves {
        let (mean, half) = aggregate_curves(per_trial, horizon);
        mean_cum_regret.push(mean);
        half_std.push(half);
    }
    let batch_ends: Vec<Vec<usize>> = config
        .policies
        .iter()
        .enumerate()
        .map(|(pi, _)| {
            raw[pi] // trial 0 entries come first, in policy order
                .record
                .batch_ends
                .clone()
        })
        .collect();
    Ok(ExperimentOutput {
        aggregate: AggregateResult {
            policy_names: names,
            mean_cum_regret,
            half_std,
            batch_ends,
            horizon,
        },
        raw,
    })
}

/// Mean and half population standard deviation across trials, per step.
fn aggregate_curves(per_trial: &[Vec<f64>], horizon: usize) -> (Vec<f64>, Vec<f64>) {
    let n = per_trial.len() as f64;
    let mut mean = vec![0.0; horizon];
    let mut half = vec![0.0; horizon];
    for t in 0..horizon {
        let m: f64 = per_trial.iter().map(|c| c[t]).sum::<f64>() / n;
        let var: f64 = per_trial
            .iter()
            .map(|c| (c[t] - m) * (c[t] - m))
            .sum::<f64>()
            / n;
        mean[t] = m;
        half[t] = 0.5 * var.max(0.0).sqrt();
    }
    (mean, half)
}

pub const RAW_CSV_HEADER: &str = "trial,policy,t,batch,point_index,y,regret,cum_regret";
pub const SUMMARY_CSV_HEADER: &str = "policy,t,mean_cum_regret,half_std";

/// The full `raw.csv` contents.
pub fn render_raw_csv(output: &ExperimentOutput) -> String {
    let mut raw = String::new();
    raw.push_str(RAW_CSV_HEADER);
    raw.push('\n');
    for run in &output.raw {
        for s in &run.record.steps {
            raw.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                run.trial,
                run.policy,
                s.t,
                s.batch,
                s.point_index,
                s.y,
                s.regret,
                s.cum_regret
            ));
        }
    }
    raw
}

/// The full `summary.csv` contents.
pub fn render_summary_csv(agg: &AggregateResult) -> String {
    let mut summary = String::new();
    summary.push_str(SUMMARY_CSV_HEADER);
    summary.push('\n');
    for (pi, name) in agg.policy_names.iter().enumerate() {
        for t in 0..agg.horizon {
            summary.push_str(&format!(
                "{},{},{},{}\n",
                name,
                t + 1,
                agg.mean_cum_regret[pi][t],
                agg.half_std[pi][t]
            ));
        }
    }
    summary
}

/// One line per policy echoing its batch lengths.
pub fn render_schedule_txt(config: &ExperimentConfig) -> Result<String> {
    let mut sched = String::new();
    for named in &config.policies {
        match (&named.config.variant, &named.config.schedule) {
            (PolicyVariant::GpUcb, _) => {
                sched.push_str(&format!("{}: sequential\n", named.name));
            }
            (_, Some(s)) => {
                sched.push_str(&format!("{}: {}\n", named.name, s));
            }
            (_, None) => {
                return Err(Error::Config(format!(
                    "policy {} has no schedule to echo",
                    named.name
                )))
            }
        }
    }
    Ok(sched)
}

/// Writes `raw.csv`, `summary.csv` and `schedule.txt` into `output_dir`.
pub fn emit_csv(
    output: &ExperimentOutput,
    config: &ExperimentConfig,
    output_dir: &Path,
) -> Result<()> {
    fs::create_dir_all(output_dir)?;
    fs::write(output_dir.join("raw.csv"), render_raw_csv(output))?;
    fs::write(
        output_dir.join("summary.csv"),
        render_summary_csv(&output.aggregate),
    )?;
    let mut f = fs::File::create(output_dir.join("schedule.txt"))?;
    f.write_all(render_schedule_txt(config)?.as_bytes())?;
    Ok(())
}
