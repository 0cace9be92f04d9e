//! Confidence-bound arithmetic: exploration coefficients and UCB/LCB values.
//!
//! The theoretical coefficient follows the offline-design bound
//! `β = (Ψ + (R/√λ)·√(2 ln(|X|·B/δ)))²`, which union-bounds a per-point
//! confidence statement over a finite domain and a fixed number of batches.
//! Experiment modes override it with a constant, or a per-batch
//! `β_i = m·ln(c·i)`. All logarithms are natural.

use crate::error::{Error, Result};
use crate::gp::GPModel;

/// How the exploration coefficient is produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaMode {
    /// The union-bounded offline confidence coefficient; does not vary with
    /// the batch index.
    Theoretical,
    /// A constant override (e.g. hand-tuned values such as 2 or 6).
    FixedBeta(f64),
    /// `β_i = multiplier · ln(offset · i)` in the i-th batch.
    GrowingLog { multiplier: f64, offset: f64 },
}

/// Inputs for the exploration coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceConfig {
    /// RKHS norm bound Ψ.
    pub psi: f64,
    /// Sub-Gaussian noise parameter R.
    pub noise_r: f64,
    /// GP regularizer λ (shared with the posterior computation).
    pub lambda: f64,
    /// Failure probability δ ∈ (0, 1).
    pub delta: f64,
    /// Number of candidate points |X|.
    pub domain_size: usize,
    /// Number of batches B.
    pub num_batches: usize,
    pub mode: BetaMode,
}

impl ConfidenceConfig {
    /// Theoretical-mode configuration with all parameters explicit.
    pub fn theoretical(
        psi: f64,
        noise_r: f64,
        lambda: f64,
        delta: f64,
        domain_size: usize,
        num_batches: usize,
    ) -> Self {
        Self {
            psi,
            noise_r,
            lambda,
            delta,
            domain_size,
            num_batches,
            mode: BetaMode::Theoretical,
        }
    }

    /// Constant-β configuration; the remaining fields are irrelevant to the
    /// coefficient but `lambda` still parameterizes the posterior.
    pub fn fixed(beta: f64, lambda: f64) -> Self {
        Self {
            psi: 0.0,
            noise_r: 0.0,
            lambda,
            delta: 0.5,
            domain_size: 1,
            num_batches: 1,
            mode: BetaMode::FixedBeta(beta),
        }
    }
}

/// Exploration coefficient for the given batch index (1-based).
///
/// Theoretical mode ignores the index; growing-log mode returns
/// `multiplier · ln(offset · batch_index)`.
pub fn beta(config: &ConfidenceConfig, batch_index: usize) -> Result<f64> {
    if batch_index == 0 {
        return Err(Error::InvalidInput("batch index is 1-based".into()));
    }
    match config.mode {
        BetaMode::Theoretical => {
            if !(config.delta > 0.0 && config.delta < 1.0) {
                return Err(Error::Config(format!(
                    "delta must lie in (0, 1), got {}",
                    config.delta
                )));
            }
            if !(config.lambda > 0.0) {
                return Err(Error::Config(format!(
                    "lambda must be positive, got {}",
                    config.lambda
                )));
            }
            if config.domain_size == 0 || config.num_batches == 0 {
                return Err(Error::Config(
                    "domain size and batch count must be positive".into(),
                ));
            }
            let events = (config.domain_size as f64) * (config.num_batches as f64);
            let tail = (2.0 * (events / config.delta).ln()).sqrt();
            let root = config.psi + config.noise_r / config.lambda.sqrt() * tail;
            Ok(root * root)
        }
        BetaMode::FixedBeta(v) => Ok(v),
        BetaMode::GrowingLog { multiplier, offset } => {
            Ok(multiplier * (offset * batch_index as f64).ln())
        }
    }
}

/// `μ + √β σ` from precomputed posterior moments.
#[inline]
pub fn ucb_value(mean: f64, sigma: f64, beta: f64) -> f64 {
    mean + beta.sqrt() * sigma
}

/// `μ − √β σ` from precomputed posterior moments.
#[inline]
pub fn lcb_value(mean: f64, sigma: f64, beta: f64) -> f64 {
    mean - beta.sqrt() * sigma
}

fn moments(model: &GPModel, beta: f64, x: &[f64]) -> Result<(f64, f64)> {
    if !(beta >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "beta must be nonnegative, got {beta}"
        )));
    }
    Ok((model.mean(x)?, model.variance(x)?.sqrt()))
}

/// Upper confidence bound of `model` at `x`.
pub fn ucb(model: &GPModel, beta: f64, x: &[f64]) -> Result<f64> {
    let (mu, sigma) = moments(model, beta, x)?;
    Ok(ucb_value(mu, sigma, beta))
}

/// Lower confidence bound of `model` at `x`.
pub fn lcb(model: &GPModel, beta: f64, x: &[f64]) -> Result<f64> {
    let (mu, sigma) = moments(model, beta, x)?;
    Ok(lcb_value(mu, sigma, beta))
}
