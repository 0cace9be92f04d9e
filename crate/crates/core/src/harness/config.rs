//! Flat key=value experiment configuration.
//!
//! Keys carry section prefixes: `run.` (horizon, trials, seed, output),
//! `env.` (environment construction), and `policy.<n>.` (one section per
//! policy, 1-based). Unknown keys are errors. Example:
//!
//! ```text
//! run.T = 1000
//! run.trials = 10
//! run.base_seed = 42
//! run.output_dir = out/single-peak
//!
//! env.kind = single-peak
//! env.per_axis = 50
//! env.noise_sigma = 0.02
//!
//! policy.1.variant = bpe
//! policy.1.schedule = orig
//! policy.1.beta = 2.0
//!
//! policy.2.variant = gp-ucb
//! policy.2.beta = 2.0
//! ```

use crate::conf::{BetaMode, ConfidenceConfig};
use crate::env::{self, Environment, PeakStyle};
use crate::error::{Error, Result};
use crate::kernels::{KernelFamily, KernelSpec};
use crate::policy::{PolicyConfig, PolicyVariant, TieBreak};
use crate::schedule::{self, BatchSchedule, ScheduleKind};
use std::collections::BTreeMap;
use std::path::PathBuf;

/// How each trial's environment is constructed.
#[derive(Debug, Clone)]
pub enum EnvSpec {
    Peaked {
        style: PeakStyle,
        per_axis: usize,
        lo: f64,
        hi: f64,
        noise_sigma: f64,
    },
    Rkhs {
        kernel: KernelSpec,
        d: usize,
        per_axis: usize,
        lo: f64,
        hi: f64,
        noise_sigma: f64,
        psi: f64,
        num_centers: usize,
    },
    /// A pre-built environment, identical across trials.
    Fixed(Environment),
}

impl EnvSpec {
    /// Number of domain points implied by the spec.
    pub fn num_points(&self) -> usize {
        match self {
            EnvSpec::Peaked { per_axis, .. } => per_axis * per_axis,
            EnvSpec::Rkhs { d, per_axis, .. } => per_axis.pow(*d as u32),
            EnvSpec::Fixed(e) => e.num_points(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            EnvSpec::Peaked { .. } => 2,
            EnvSpec::Rkhs { d, .. } => *d,
            EnvSpec::Fixed(e) => e.dim(),
        }
    }

    pub fn noise_sigma(&self) -> f64 {
        match self {
            EnvSpec::Peaked { noise_sigma, .. } | EnvSpec::Rkhs { noise_sigma, .. } => {
                *noise_sigma
            }
            EnvSpec::Fixed(e) => e.noise_sigma(),
        }
    }

    /// Builds the environment for one trial seed.
    pub fn build(&self, seed: u64) -> Result<Environment> {
        match self {
            EnvSpec::Peaked {
                style,
                per_axis,
                lo,
                hi,
                noise_sigma,
            } => {
                let grid = env::build_grid(2, *per_axis, *lo, *hi);
                Ok(env::make_peaked_function(&grid, *style, seed)?
                    .with_noise_sigma(*noise_sigma)
                    .with_per_axis(*per_axis))
            }
            EnvSpec::Rkhs {
                kernel,
                d,
                per_axis,
                lo,
                hi,
                noise_sigma,
                psi,
                num_centers,
            } => {
                let grid = env::build_grid(*d, *per_axis, *lo, *hi);
                Ok(
                    env::sample_rkhs_function(kernel, &grid, *psi, *num_centers, seed)?
                        .with_noise_sigma(*noise_sigma)
                        .with_per_axis(*per_axis),
                )
            }
            EnvSpec::Fixed(e) => Ok(e.clone()),
        }
    }
}

/// A policy together with its label in the outputs.
#[derive(Debug, Clone)]
pub struct NamedPolicy {
    pub name: String,
    pub config: PolicyConfig,
}

/// Everything needed to run one experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub env_spec: EnvSpec,
    pub policies: Vec<NamedPolicy>,
    pub horizon: usize,
    pub trials: usize,
    pub base_seed: u64,
    pub output_dir: PathBuf,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse value '{value}' for key '{key}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!(
            "cannot parse boolean '{value}' for key '{key}'"
        ))),
    }
}

struct Section {
    prefix: String,
    entries: BTreeMap<String, String>,
    consumed: std::collections::BTreeSet<String>,
}

impl Section {
    fn new(prefix: &str) -> Self {
        Self {
            prefix: prefix.to_string(),
            entries: BTreeMap::new(),
            consumed: Default::default(),
        }
    }

    fn get(&mut self, key: &str) -> Option<&str> {
        if self.entries.contains_key(key) {
            self.consumed.insert(key.to_string());
            self.entries.get(key).map(|s| s.as_str())
        } else {
            None
        }
    }

    fn require(&mut self, key: &str) -> Result<&str> {
        if self.entries.contains_key(key) {
            self.consumed.insert(key.to_string());
            Ok(self.entries.get(key).unwrap().as_str())
        } else {
            Err(Error::Config(format!(
                "missing required key '{}{key}'",
                self.prefix
            )))
        }
    }

    fn finish(&self) -> Result<()> {
        for key in self.entries.keys() {
            if !self.consumed.contains(key) {
                return Err(Error::Config(format!(
                    "unknown key '{}{key}'",
                    self.prefix
                )));
            }
        }
        Ok(())
    }
}

fn build_kernel(section: &mut Section, d: usize) -> Result<KernelSpec> {
    let family = section.get("kernel").unwrap_or("se").to_string();
    let lengthscale: f64 = match section.get("lengthscale") {
        Some(v) => parse_value("lengthscale", v)?,
        None => 0.5,
    };
    match family.as_str() {
        "se" => KernelSpec::squared_exponential(lengthscale, d),
        "matern" => {
            let nu: f64 = match section.get("nu") {
                Some(v) => parse_value("nu", v)?,
                None => 2.5,
            };
            KernelSpec::matern(lengthscale, nu, d)
        }
        other => Err(Error::Config(format!("unknown kernel family '{other}'"))),
    }
}

/// Parses the flat key=value format into an [`ExperimentConfig`].
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut run = Section::new("run.");
    let mut envs = Section::new("env.");
    let mut policies: BTreeMap<usize, Section> = BTreeMap::new();

    for (lineno, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected key = value", lineno + 1))
        })?;
        let key = key.trim();
        let value = value.trim().to_string();
        if let Some(rest) = key.strip_prefix("run.") {
            run.entries.insert(rest.to_string(), value);
        } else if let Some(rest) = key.strip_prefix("env.") {
            envs.entries.insert(rest.to_string(), value);
        } else if let Some(rest) = key.strip_prefix("policy.") {
            let (idx, field) = rest.split_once('.').ok_or_else(|| {
                Error::Config(format!("policy key '{key}' needs an index segment"))
            })?;
            let idx: usize = parse_value(key, idx)?;
            if idx == 0 {
                return Err(Error::Config("policy indices are 1-based".into()));
            }
            policies
                .entry(idx)
                .or_insert_with(|| Section::new(&format!("policy.{idx}.")))
                .entries
                .insert(field.to_string(), value);
        } else {
            return Err(Error::Config(format!("unknown key '{key}'")));
        }
    }

    // run section
    let horizon: usize = parse_value("run.T", run.require("T")?)?;
    let trials: usize = match run.get("trials") {
        Some(v) => parse_value("run.trials", v)?,
        None => 1,
    };
    if trials == 0 {
        return Err(Error::Config("run.trials must be at least 1".into()));
    }
    let base_seed: u64 = match run.get("base_seed") {
        Some(v) => parse_value("run.base_seed", v)?,
        None => 0,
    };
    let output_dir = PathBuf::from(run.get("output_dir").unwrap_or("out").to_string());
    run.finish()?;

    // env section
    let kind = envs.require("kind")?.to_string();
    let noise_sigma: f64 = match envs.get("noise_sigma") {
        Some(v) => parse_value("env.noise_sigma", v)?,
        None => 0.02,
    };
    let per_axis: usize = match envs.get("per_axis") {
        Some(v) => parse_value("env.per_axis", v)?,
        None => 50,
    };
    let lo: f64 = match envs.get("lo") {
        Some(v) => parse_value("env.lo", v)?,
        None => 0.0,
    };
    let hi: f64 = match envs.get("hi") {
        Some(v) => parse_value("env.hi", v)?,
        None => 1.0,
    };
    let env_spec = match kind.as_str() {
        "single-peak" | "multi-peak" => {
            let style = if kind == "single-peak" {
                PeakStyle::SinglePeak
            } else {
                PeakStyle::MultiPeak
            };
            EnvSpec::Peaked {
                style,
                per_axis,
                lo,
                hi,
                noise_sigma,
            }
        }
        "rkhs" => {
            let d: usize = match envs.get("d") {
                Some(v) => parse_value("env.d", v)?,
                None => 2,
            };
            let psi: f64 = match envs.get("psi") {
                Some(v) => parse_value("env.psi", v)?,
                None => 1.0,
            };
            let num_centers: usize = match envs.get("num_centers") {
                Some(v) => parse_value("env.num_centers", v)?,
                None => 10,
            };
            let kernel = build_kernel(&mut envs, d)?;
            EnvSpec::Rkhs {
                kernel,
                d,
                per_axis,
                lo,
                hi,
                noise_sigma,
                psi,
                num_centers,
            }
        }
        other => {
            return Err(Error::Config(format!(
                "unknown env.kind '{other}' (expected single-peak, multi-peak or rkhs)"
            )))
        }
    };
    envs.finish()?;

    if policies.is_empty() {
        return Err(Error::Config("configuration defines no policies".into()));
    }
    let domain_size = env_spec.num_points();
    let dim = env_spec.dim();
    let mut named = Vec::with_capacity(policies.len());
    for (idx, mut sec) in policies {
        let named_policy = build_policy(
            &mut sec,
            idx,
            horizon,
            dim,
            domain_size,
            noise_sigma,
        )?;
        sec.finish()?;
        named.push(named_policy);
    }
    let mut seen = std::collections::BTreeSet::new();
    for p in &named {
        if !seen.insert(p.name.clone()) {
            return Err(Error::Config(format!(
                "duplicate policy name '{}'",
                p.name
            )));
        }
    }

    Ok(ExperimentConfig {
        env_spec,
        policies: named,
        horizon,
        trials,
        base_seed,
        output_dir,
    })
}

fn build_policy(
    sec: &mut Section,
    idx: usize,
    horizon: usize,
    dim: usize,
    domain_size: usize,
    env_noise: f64,
) -> Result<NamedPolicy> {
    let variant = match sec.require("variant")? {
        "bpe" => PolicyVariant::BpeBatchLocal,
        "bpe-full" => PolicyVariant::BpeFullPosterior,
        "bpe-fixed" => PolicyVariant::BpeFixedBatches,
        "gp-ucb" => PolicyVariant::GpUcb,
        other => {
            return Err(Error::Config(format!(
                "policy.{idx}.variant '{other}' is not one of bpe, bpe-full, bpe-fixed, gp-ucb"
            )))
        }
    };
    let kernel = build_kernel(sec, dim)?;

    let b: Option<usize> = match sec.get("B") {
        Some(v) => Some(parse_value("B", v)?),
        None => None,
    };
    let normalize = match sec.get("normalize") {
        Some(v) => parse_bool("normalize", v)?,
        None => true,
    };
    let schedule_kind = sec.get("schedule").unwrap_or("orig").to_string();
    let (schedule, sched_label): (Option<BatchSchedule>, String) = if variant.is_batched() {
        let (s, label) = match schedule_kind.as_str() {
            "orig" => (schedule::orig_bpe_schedule(horizon)?, "orig".to_string()),
            "const-se" | "const-matern" => {
                let b = b.ok_or_else(|| {
                    Error::Config(format!(
                        "policy.{idx}: constant-batch schedules need B"
                    ))
                })?;
                let sched_kernel = if schedule_kind == "const-se" {
                    KernelSpec::squared_exponential(kernel.lengthscale(), dim)?
                } else {
                    kernel.clone()
                };
                if schedule_kind == "const-matern"
                    && sched_kernel.family() != KernelFamily::Matern
                {
                    return Err(Error::Config(format!(
                        "policy.{idx}: const-matern schedule needs a Matérn kernel"
                    )));
                }
                (
                    schedule::constant_b_schedule(horizon, b, &sched_kernel, normalize)?,
                    format!("{b}"),
                )
            }
            "fixed" => {
                let b = b.ok_or_else(|| {
                    Error::Config(format!("policy.{idx}: fixed schedules need B"))
                })?;
                (schedule::fixed_equal_schedule(horizon, b)?, format!("{b}"))
            }
            other => {
                return Err(Error::Config(format!(
                    "policy.{idx}.schedule '{other}' is not one of orig, const-se, const-matern, fixed"
                )))
            }
        };
        (Some(s), label)
    } else {
        (None, String::new())
    };

    let noise_r: f64 = match sec.get("noise-r") {
        Some(v) => parse_value("noise-r", v)?,
        None => env_noise,
    };
    let lambda: f64 = match sec.get("lambda") {
        Some(v) => parse_value("lambda", v)?,
        None => {
            if noise_r > 0.0 {
                noise_r * noise_r
            } else {
                return Err(Error::Config(format!(
                    "policy.{idx}: lambda defaults to the squared noise level, \
                     which is zero here; set policy.{idx}.lambda explicitly"
                )));
            }
        }
    };
    let psi: f64 = match sec.get("psi") {
        Some(v) => parse_value("psi", v)?,
        None => 1.0,
    };
    let delta: f64 = match sec.get("delta") {
        Some(v) => parse_value("delta", v)?,
        None => 0.1,
    };
    let mode = match sec.get("beta-mode").unwrap_or("fixed") {
        "fixed" => {
            let beta: f64 = match sec.get("beta") {
                Some(v) => parse_value("beta", v)?,
                None => 2.0,
            };
            BetaMode::FixedBeta(beta)
        }
        "theoretical" => BetaMode::Theoretical,
        "growing-log" => {
            let multiplier: f64 = match sec.get("beta-multiplier") {
                Some(v) => parse_value("beta-multiplier", v)?,
                None => 3.0,
            };
            let offset: f64 = match sec.get("beta-offset") {
                Some(v) => parse_value("beta-offset", v)?,
                None => 2.0,
            };
            BetaMode::GrowingLog { multiplier, offset }
        }
        other => {
            return Err(Error::Config(format!(
                "policy.{idx}.beta-mode '{other}' is not one of fixed, theoretical, growing-log"
            )))
        }
    };
    let num_batches = schedule.as_ref().map_or(horizon, |s| s.num_batches());
    let confidence = ConfidenceConfig {
        psi,
        noise_r,
        lambda,
        delta,
        domain_size,
        num_batches,
        mode,
    };

    let default_name = match variant {
        PolicyVariant::GpUcb => "gp-ucb".to_string(),
        PolicyVariant::BpeFixedBatches => format!("fixed-{sched_label}-bpe"),
        PolicyVariant::BpeBatchLocal | PolicyVariant::BpeFullPosterior => {
            let base = match schedule.as_ref().map(|s| s.kind()) {
                Some(ScheduleKind::OrigBpe) => "orig-bpe".to_string(),
                Some(ScheduleKind::FixedEqual) => format!("fixed-{sched_label}-bpe"),
                _ => format!("{sched_label}-bpe"),
            };
            if variant == PolicyVariant::BpeFullPosterior {
                format!("full-{base}")
            } else {
                base
            }
        }
    };
    let name = sec.get("name").unwrap_or(&default_name).to_string();

    Ok(NamedPolicy {
        name,
        config: PolicyConfig {
            variant,
            schedule,
            confidence,
            kernel,
            tie_break: TieBreak::LowestIndex,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# comment line
run.T = 100
run.trials = 3
run.base_seed = 7
run.output_dir = /tmp/x

env.kind = single-peak
env.per_axis = 12
env.noise_sigma = 0.02

policy.1.variant = bpe
policy.1.schedule = orig
policy.1.beta = 2.0

policy.2.variant = bpe
policy.2.schedule = const-se
policy.2.B = 3

policy.3.variant = gp-ucb
policy.3.beta = 2.0

policy.4.variant = bpe-fixed
policy.4.schedule = fixed
policy.4.B = 4
";

    #[test]
    fn parses_sample() {
        let cfg = parse_config(SAMPLE).unwrap();
        assert_eq!(cfg.horizon, 100);
        assert_eq!(cfg.trials, 3);
        assert_eq!(cfg.base_seed, 7);
        assert_eq!(cfg.policies.len(), 4);
        assert_eq!(cfg.policies[0].name, "orig-bpe");
        assert_eq!(cfg.policies[1].name, "3-bpe");
        assert_eq!(cfg.policies[2].name, "gp-ucb");
        assert_eq!(cfg.policies[3].name, "fixed-4-bpe");
        // lambda defaults to the squared noise level
        assert!((cfg.policies[0].config.confidence.lambda - 0.0004).abs() < 1e-12);
        let s = cfg.policies[3].config.schedule.as_ref().unwrap();
        assert_eq!(s.lengths(), &[25, 25, 25, 25]);
    }

    #[test]
    fn unknown_key_is_config_error() {
        let text = format!("{SAMPLE}\nrun.bogus = 1\n");
        match parse_config(&text) {
            Err(Error::Config(msg)) => assert!(msg.contains("bogus"), "{msg}"),
            other => panic!("expected config error, got {other:?}"),
        }
        let text = format!("{SAMPLE}\npolicy.1.tuning = aggressive\n");
        match parse_config(&text) {
            Err(Error::Config(msg)) => assert!(msg.contains("tuning"), "{msg}"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_names_rejected() {
        let text = format!("{SAMPLE}\npolicy.2.name = orig-bpe\n");
        assert!(matches!(parse_config(&text), Err(Error::Config(_))));
    }

    #[test]
    fn missing_required_keys() {
        assert!(matches!(
            parse_config("env.kind = rkhs\npolicy.1.variant = bpe\n"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            parse_config("run.T = 10\npolicy.1.variant = bpe\n"),
            Err(Error::Config(_))
        ));
        // no policies
        assert!(matches!(
            parse_config("run.T = 10\nenv.kind = single-peak\n"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn zero_noise_requires_explicit_lambda() {
        let text = "\
run.T = 10
env.kind = single-peak
env.noise_sigma = 0
policy.1.variant = bpe
";
        match parse_config(text) {
            Err(Error::Config(msg)) => assert!(msg.contains("lambda"), "{msg}"),
            other => panic!("expected config error, got {other:?}"),
        }
        let text = format!("{text}policy.1.lambda = 0.01\n");
        assert!(parse_config(&text).is_ok());
    }

    #[test]
    fn growing_log_mode_parsed() {
        let text = "\
run.T = 10
env.kind = single-peak
policy.1.variant = bpe-full
policy.1.beta-mode = growing-log
";
        let cfg = parse_config(text).unwrap();
        assert_eq!(
            cfg.policies[0].config.confidence.mode,
            BetaMode::GrowingLog {
                multiplier: 3.0,
                offset: 2.0
            }
        );
        assert_eq!(cfg.policies[0].name, "full-orig-bpe");
    }

    #[test]
    fn infeasible_schedule_fails_at_parse_time() {
        let text = "\
run.T = 40
env.kind = single-peak
policy.1.variant = bpe
policy.1.schedule = const-se
policy.1.B = 3
policy.1.normalize = false
";
        assert!(matches!(parse_config(text), Err(Error::Config(_))));
    }
}
