//! Reduced-scale property checks runnable from the CLI, plus the shared
//! empirical-check machinery the full-scale verification suite drives with
//! larger instance counts.

use crate::conf::{self, ConfidenceConfig};
use crate::diag;
use crate::env::{self, Environment};
use crate::error::{Error, Result};
use crate::gp::{GPModel, PosteriorTracker};
use crate::harness::{self, EnvSpec, ExperimentConfig, NamedPolicy};
use crate::kernels::KernelSpec;
use crate::policy::{self, PolicyConfig, PolicyVariant, TieBreak};
use crate::schedule;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Dense posterior solve by Gaussian elimination with partial pivoting;
/// an implementation route independent of the incremental factorization.
fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("nonempty range");
        if a[pivot_row][col].abs() < 1e-300 {
            return Err(Error::Numerical("singular dense system".into()));
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

fn regularized_gram(spec: &KernelSpec, lambda: f64, pts: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let mut g = spec.gram(pts)?;
    for (i, row) in g.iter_mut().enumerate() {
        row[i] += lambda;
    }
    Ok(g)
}

/// Largest absolute deviation of incremental posterior mean/variance from a
/// dense direct solve, over random instances with up to 25 design points.
pub fn posterior_oracle_max_error(instances: usize, base_seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    let mut worst: f64 = 0.0;
    for i in 0..instances {
        let d = 1 + (i % 3);
        let n = 1 + rng.random_range(0..25usize);
        let lambda = 10f64.powf(rng.random_range(-4.0..0.0));
        let k = KernelSpec::squared_exponential(rng.random_range(0.2..1.2), d)?;
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.random_range(0.0..1.0)).collect())
            .collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let model = GPModel::fit(&k, lambda, &pts)?.attach_observations(&y)?;
        let gram = regularized_gram(&k, lambda, &pts)?;
        for _ in 0..5 {
            let q: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..1.0)).collect();
            let kv: Vec<f64> = pts
                .iter()
                .map(|p| k.eval(p, &q))
                .collect::<Result<_>>()?;
            let sol = dense_solve(gram.clone(), kv.clone())?;
            let dense_var =
                k.eval(&q, &q)? - kv.iter().zip(&sol).map(|(a, b)| a * b).sum::<f64>();
            let alpha = dense_solve(gram.clone(), y.clone())?;
            let dense_mean: f64 = kv.iter().zip(&alpha).map(|(a, b)| a * b).sum();
            worst = worst
                .max((model.mean(&q)? - dense_mean).abs())
                .max((model.variance(&q)? - dense_var.max(0.0)).abs());
        }
    }
    Ok(worst)
}

/// Fraction of sampled RKHS functions (exact norm) for which any domain
/// point violates `|f(x) − μ(x)| ≤ √β(δ/|X|)·σ(x)` under an offline design
/// with Gaussian noise.
pub fn coverage_violation_rate(num_funcs: usize, delta: f64, seed: u64) -> Result<f64> {
    let k = KernelSpec::squared_exponential(0.25, 1)?;
    let domain = env::build_grid(1, 30, 0.0, 1.0);
    let psi = 2.0;
    let noise_r = 0.1;
    let lambda = noise_r * noise_r;
    let cfg = ConfidenceConfig::theoretical(psi, noise_r, lambda, delta, domain.len(), 1);
    let b = conf::beta(&cfg, 1)?;
    let mut design_rng = ChaCha8Rng::seed_from_u64(seed);
    // offline design: indices chosen without reference to any observations
    let design_idx: Vec<usize> = (0..20)
        .map(|_| design_rng.random_range(0..domain.len()))
        .collect();
    let design: Vec<Vec<f64>> = design_idx.iter().map(|&i| domain[i].clone()).collect();
    let base = GPModel::fit(&k, lambda, &design)?;
    let mut violations = 0usize;
    for i in 0..num_funcs {
        let e = env::sample_rkhs_function(&k, &domain, psi, 6, seed ^ (i as u64 + 1))?;
        let mut noise_rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(777 + i as u64));
        let y: Vec<f64> = design_idx
            .iter()
            .map(|&idx| {
                let z: f64 = noise_rng.sample(StandardNormal);
                e.f_values()[idx] + noise_r * z
            })
            .collect();
        let m = base.attach_observations(&y)?;
        let mut violated = false;
        for (idx, x) in domain.iter().enumerate() {
            let mu = m.mean(x)?;
            let sigma = m.variance(x)?.sqrt();
            if (e.f_values()[idx] - mu).abs() > b.sqrt() * sigma + 1e-12 {
                violated = true;
                break;
            }
        }
        if violated {
            violations += 1;
        }
    }
    Ok(violations as f64 / num_funcs as f64)
}

/// Per-batch trace of a batch-local run: what was sampled and what
/// survived elimination.
pub struct BatchTrace {
    pub selected: Vec<usize>,
    pub survivors: Vec<usize>,
    /// Information gain of the sampled set.
    pub gain: f64,
    pub beta: f64,
}

/// Runs the batch-local policy on a noiseless environment and records the
/// per-batch sample sets and surviving points.
pub fn trace_batch_local(
    kernel: &KernelSpec,
    lambda: f64,
    beta: f64,
    e: &Environment,
    sched: &schedule::BatchSchedule,
) -> Result<Vec<BatchTrace>> {
    let mut domain = policy::ActiveDomain::new(e.domain().to_vec())?;
    let mut traces = Vec::new();
    let horizon = sched.horizon();
    let mut t = 0usize;
    for &len in sched.lengths() {
        let take = len.min(horizon - t);
        if take == 0 {
            break;
        }
        let act = domain.active_indices();
        let pts: Vec<Vec<f64>> = act.iter().map(|&g| e.domain()[g].clone()).collect();
        let mut tracker = PosteriorTracker::new(kernel, lambda, &pts)?;
        let mut picked = Vec::with_capacity(take);
        for _ in 0..take {
            let sel = tracker.argmax_variance(None).expect("active set nonempty");
            tracker.add_design(sel)?;
            picked.push(act[sel]);
        }
        t += take;
        // noiseless observations are the ground-truth values
        let ys: Vec<f64> = picked.iter().map(|&g| e.f_values()[g]).collect();
        tracker.attach_observations(&ys)?;
        let sampled: Vec<Vec<f64>> = picked.iter().map(|&g| e.domain()[g].clone()).collect();
        let gain = diag::gain_of_set(kernel, lambda, &sampled)?;
        if t < horizon {
            let mut ucbs = Vec::with_capacity(act.len());
            let mut lcbs = Vec::with_capacity(act.len());
            for j in 0..act.len() {
                let mu = tracker.mean(j)?;
                let sigma = tracker.sigma(j);
                ucbs.push(conf::ucb_value(mu, sigma, beta));
                lcbs.push(conf::lcb_value(mu, sigma, beta));
            }
            let keep = policy::survivors(&ucbs, &lcbs);
            domain = domain.retain_subset(&act, &keep);
        }
        traces.push(BatchTrace {
            selected: picked,
            survivors: domain.active_indices(),
            gain,
            beta,
        });
    }
    Ok(traces)
}

fn noiseless_instance(seed: u64) -> Result<(KernelSpec, Environment, schedule::BatchSchedule)> {
    let k = KernelSpec::squared_exponential(0.3, 1)?;
    let domain = env::build_grid(1, 60, 0.0, 1.0);
    let e = env::sample_rkhs_function(&k, &domain, 1.5, 6, seed)?;
    let sched = schedule::orig_bpe_schedule(150)?;
    Ok((k, e, sched))
}

/// Number of noiseless runs (exact-norm coefficient) in which the optimum
/// was eliminated in some batch. Should be zero.
pub fn elimination_safety_failures(instances: usize, base_seed: u64) -> Result<usize> {
    let mut failures = 0;
    for i in 0..instances {
        let (k, e, sched) = noiseless_instance(base_seed + i as u64)?;
        let psi = e.rkhs_norm().expect("sampled function has a known norm");
        let traces = trace_batch_local(&k, 1e-3, psi * psi, &e, &sched)?;
        if traces
            .iter()
            .any(|tr| !tr.survivors.contains(&e.optimum_index()))
        {
            failures += 1;
        }
    }
    Ok(failures)
}

/// Fraction of noiseless instances in which every surviving point after
/// every batch respects the elimination-gap bound
/// `2·√(C₁·gain(S_i)·β/N_i)`.
pub fn lemma3_instance_pass_rate(instances: usize, base_seed: u64) -> Result<f64> {
    let mut passes = 0;
    for i in 0..instances {
        let (k, e, sched) = noiseless_instance(base_seed + i as u64)?;
        let psi = e.rkhs_norm().expect("sampled function has a known norm");
        let lambda = 1e-3;
        let traces = trace_batch_local(&k, lambda, psi * psi, &e, &sched)?;
        let f_star = e.f_values()[e.optimum_index()];
        let mut ok = true;
        for tr in &traces {
            let bound = diag::lemma3_bound(tr.gain, tr.beta, tr.selected.len(), lambda);
            for &g in &tr.survivors {
                if f_star - e.f_values()[g] > bound + 1e-9 {
                    ok = false;
                }
            }
        }
        if ok {
            passes += 1;
        }
    }
    Ok(passes as f64 / instances as f64)
}

/// Greedy-vs-exhaustive information gain check over random small domains.
pub fn info_gain_oracle_ok(domains: usize, base_seed: u64) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    let k = KernelSpec::squared_exponential(0.35, 1)?;
    for _ in 0..domains {
        let n = rng.random_range(4..=10usize);
        let domain: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random_range(0.0..1.0)]).collect();
        let lambda = 10f64.powf(rng.random_range(-1.5..0.5));
        for t in 1..=3usize.min(n) {
            let r = diag::greedy_max_gain(&k, lambda, &domain, t)?;
            let ex = r
                .exhaustive_gain
                .expect("tiny instance computes the exhaustive value");
            if r.greedy_gain > ex + 1e-12 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn tiny_experiment_config() -> Result<ExperimentConfig> {
    let kernel = KernelSpec::squared_exponential(0.5, 1)?;
    let sched = schedule::orig_bpe_schedule(15)?;
    Ok(ExperimentConfig {
        env_spec: EnvSpec::Rkhs {
            kernel: kernel.clone(),
            d: 1,
            per_axis: 12,
            lo: 0.0,
            hi: 1.0,
            noise_sigma: 0.02,
            psi: 1.0,
            num_centers: 3,
        },
        policies: vec![NamedPolicy {
            name: "orig-bpe".into(),
            config: PolicyConfig {
                variant: PolicyVariant::BpeBatchLocal,
                schedule: Some(sched),
                confidence: ConfidenceConfig::fixed(2.0, 0.0004),
                kernel,
                tie_break: TieBreak::LowestIndex,
            },
        }],
        horizon: 15,
        trials: 2,
        base_seed: 11,
        output_dir: std::path::PathBuf::from("unused"),
    })
}

/// Runs every reduced-scale check, returning one outcome per check.
pub fn run_all() -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let mut push = |name: &'static str, result: Result<(bool, String)>| match result {
        Ok((passed, detail)) => out.push(CheckOutcome {
            name,
            passed,
            detail,
        }),
        Err(e) => out.push(CheckOutcome {
            name,
            passed: false,
            detail: format!("error: {e}"),
        }),
    };

    push("schedule-doubling-bound", (|| {
        for t in 2..=30_000usize {
            let s = schedule::orig_bpe_schedule(t)?;
            if s.num_batches() > schedule::orig_bpe_batch_bound(t) {
                return Ok((false, format!("bound violated at T = {t}")));
            }
            if s.lengths().iter().sum::<usize>() != t {
                return Ok((false, format!("lengths do not sum to T = {t}")));
            }
        }
        let s = schedule::orig_bpe_schedule(1000)?;
        Ok((
            s.lengths() == [32, 179, 424, 365],
            format!("T=1000 schedule {s}"),
        ))
    })());

    push("schedule-constant-b-arithmetic", (|| {
        let k = KernelSpec::matern(1.0, 1.0, 2)?;
        let s = schedule::constant_b_schedule(1000, 3, &k, false)?;
        Ok((s.lengths() == [194, 720, 86], format!("lengths {s}")))
    })());

    push("posterior-dense-oracle", (|| {
        let err = posterior_oracle_max_error(30, 17)?;
        Ok((err < 1e-8, format!("max |deviation| = {err:.3e}")))
    })());

    push("confidence-coverage", (|| {
        let delta = 0.2;
        let rate = coverage_violation_rate(100, delta, 23)?;
        let se = (delta * (1.0 - delta) / 100.0).sqrt();
        Ok((
            rate <= delta + 3.0 * se,
            format!("violation rate {rate:.3} vs {:.3}", delta + 3.0 * se),
        ))
    })());

    push("elimination-safety", (|| {
        let failures = elimination_safety_failures(20, 40)?;
        Ok((failures == 0, format!("{failures} optima eliminated of 20")))
    })());

    push("elimination-gap-bound", (|| {
        let rate = lemma3_instance_pass_rate(20, 60)?;
        Ok((rate >= 0.95, format!("pass rate {rate:.2}")))
    })());

    push("info-gain-oracle", (|| {
        let ok = info_gain_oracle_ok(10, 31)?;
        Ok((ok, "greedy ≤ exhaustive on all instances".to_string()))
    })());

    push("experiment-determinism", (|| {
        let cfg = tiny_experiment_config()?;
        let a = harness::run_experiment(&cfg)?;
        let b = harness::run_experiment(&cfg)?;
        let same = harness::render_raw_csv(&a) == harness::render_raw_csv(&b)
            && harness::render_summary_csv(&a.aggregate)
                == harness::render_summary_csv(&b.aggregate);
        Ok((same, "re-run outputs byte-identical".to_string()))
    })());

    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_solver_solves_known_system() {
        // [[2, 1], [1, 3]] x = (3, 5) -> x = (0.8, 1.4)
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = dense_solve(a, vec![3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-12);
        assert!((x[1] - 1.4).abs() < 1e-12);
    }

    #[test]
    fn posterior_oracle_small() {
        let err = posterior_oracle_max_error(10, 3).unwrap();
        assert!(err < 1e-8, "max deviation {err}");
    }

    #[test]
    fn all_reduced_checks_pass() {
        for outcome in run_all() {
            assert!(outcome.passed, "{}: {}", outcome.name, outcome.detail);
        }
    }
}
