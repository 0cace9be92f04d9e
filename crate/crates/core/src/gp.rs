//! Exact Gaussian-process posterior inference.
//!
//! [`GPModel`] answers posterior mean and variance queries at arbitrary
//! points for a fixed design, via a regularized Gram factorization
//! `(K + λI) = L Lᵀ`:
//!
//! ```text
//! μ(x)  = k(x)ᵀ (K + λI)⁻¹ y
//! σ²(x) = k(x,x) − k(x)ᵀ (K + λI)⁻¹ k(x)
//! ```
//!
//! The design can be grown one point at a time ([`GPModel::extend`]) as a
//! rank-one factor update; `fit` is exactly a fold of such updates, so the
//! two construction routes agree bit for bit.
//!
//! [`PosteriorTracker`] serves selection loops that repeatedly ask for the
//! posterior at every candidate of a fixed finite set: it caches each
//! candidate's forward-solve vector and refreshes all of them in O(n·t) when
//! a design point is added, instead of O(n·t²) for fresh per-point queries.

use crate::chol::CholFactor;
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;

fn jitter_for(lambda: f64) -> f64 {
    1e-10 * (1.0 + lambda)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Config(format!(
            "regularizer lambda must be a positive finite real, got {lambda}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone)]
struct Observations {
    y: Vec<f64>,
    /// alpha = (K + λI)⁻¹ y
    alpha: Vec<f64>,
}

/// A GP posterior over a fixed design, with or without observations.
///
/// Without observations the model still answers variance queries (the
/// posterior variance does not depend on observed values), which is what
/// within-batch maximum-variance sampling relies on.
#[derive(Debug, Clone)]
pub struct GPModel {
    spec: KernelSpec,
    lambda: f64,
    design: Vec<Vec<f64>>,
    chol: CholFactor,
    obs: Option<Observations>,
}

impl GPModel {
    /// Fits a model to a (possibly empty) design with no observations.
    pub fn fit(spec: &KernelSpec, lambda: f64, design: &[Vec<f64>]) -> Result<Self> {
        check_lambda(lambda)?;
        let mut model = Self {
            spec: spec.clone(),
            lambda,
            design: Vec::with_capacity(design.len()),
            chol: CholFactor::new(),
            obs: None,
        };
        for x in design {
            model.push_design_point(x)?;
        }
        Ok(model)
    }

    fn push_design_point(&mut self, x: &[f64]) -> Result<()> {
        let mut cov = Vec::with_capacity(self.design.len());
        for p in &self.design {
            cov.push(self.spec.eval(p, x)?);
        }
        let diag = self.spec.eval(x, x)? + self.lambda;
        self.chol.extend(&cov, diag, jitter_for(self.lambda))?;
        self.design.push(x.to_vec());
        Ok(())
    }

    /// Returns a model over `design + [x_new]`, equivalent to a fresh
    /// [`GPModel::fit`] on the extended design. Observations are dropped:
    /// extension is a design-construction operation.
    pub fn extend(&self, x_new: &[f64]) -> Result<Self> {
        let mut model = self.clone();
        model.obs = None;
        model.push_design_point(x_new)?;
        Ok(model)
    }

    /// Attaches observed values to the design; mean queries become valid.
    pub fn attach_observations(&self, y: &[f64]) -> Result<Self> {
        if y.len() != self.design.len() {
            return Err(Error::InvalidInput(format!(
                "got {} observations for a design of {} points",
                y.len(),
                self.design.len()
            )));
        }
        let w = self.chol.solve_lower(y);
        let alpha = self.chol.solve_lower_transpose(&w);
        let mut model = self.clone();
        model.obs = Some(Observations {
            y: y.to_vec(),
            alpha,
        });
        Ok(model)
    }

    /// Posterior mean; requires observations.
    pub fn mean(&self, x: &[f64]) -> Result<f64> {
        let obs = self.obs.as_ref().ok_or_else(|| {
            Error::State("mean query on a model without observations".into())
        })?;
        let mut acc = 0.0;
        for (p, a) in self.design.iter().zip(obs.alpha.iter()) {
            acc += self.spec.eval(p, x)? * a;
        }
        Ok(acc)
    }

    /// Posterior variance, clamped to `[0, k(x,x)]`.
    pub fn variance(&self, x: &[f64]) -> Result<f64> {
        let kxx = self.spec.eval(x, x)?;
        if self.design.is_empty() {
            return Ok(kxx);
        }
        let mut cov = Vec::with_capacity(self.design.len());
        for p in &self.design {
            cov.push(self.spec.eval(p, x)?);
        }
        let v = self.chol.solve_lower(&cov);
        let sumsq: f64 = v.iter().map(|a| a * a).sum();
        Ok((kxx - sumsq).clamp(0.0, kxx))
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn design(&self) -> &[Vec<f64>] {
        &self.design
    }

    pub fn len(&self) -> usize {
        self.design.len()
    }

    pub fn is_empty(&self) -> bool {
        self.design.is_empty()
    }

    pub fn has_observations(&self) -> bool {
        self.obs.is_some()
    }

    pub fn observations(&self) -> Option<&[f64]> {
        self.obs.as_ref().map(|o| o.y.as_slice())
    }
}

/// Incremental posterior over a fixed candidate set.
///
/// Maintains, for every candidate `x`, the vector `v_x = L⁻¹ k_t(x)` plus
/// its running squared norm and (once observations arrive) the running dot
/// with `w = L⁻¹ y`. These give `σ²(x) = k(x,x) − ‖v_x‖²` and
/// `μ(x) = v_xᵀ w` in O(1) per candidate. Design points must themselves be
/// candidates; observations are attached in design order.
#[derive(Debug, Clone)]
pub struct PosteriorTracker {
    spec: KernelSpec,
    lambda: f64,
    candidates: Vec<Vec<f64>>,
    prior_diag: Vec<f64>,
    chol: CholFactor,
    design: Vec<Vec<f64>>,
    /// feat[c] = L⁻¹ k_t(candidate c), grown one entry per design point.
    feat: Vec<Vec<f64>>,
    sumsq: Vec<f64>,
    dot: Vec<f64>,
    /// w = L⁻¹ y over the observed design prefix.
    w: Vec<f64>,
}

impl PosteriorTracker {
    pub fn new(spec: &KernelSpec, lambda: f64, candidates: &[Vec<f64>]) -> Result<Self> {
        check_lambda(lambda)?;
        let mut prior_diag = Vec::with_capacity(candidates.len());
        for c in candidates {
            prior_diag.push(spec.eval(c, c)?);
        }
        Ok(Self {
            spec: spec.clone(),
            lambda,
            candidates: candidates.to_vec(),
            prior_diag,
            chol: CholFactor::new(),
            design: Vec::new(),
            feat: vec![Vec::new(); candidates.len()],
            sumsq: vec![0.0; candidates.len()],
            dot: vec![0.0; candidates.len()],
            w: Vec::new(),
        })
    }

    pub fn num_candidates(&self) -> usize {
        self.candidates.len()
    }

    pub fn design_len(&self) -> usize {
        self.design.len()
    }

    pub fn observed_len(&self) -> usize {
        self.w.len()
    }

    pub fn design_points(&self) -> &[Vec<f64>] {
        &self.design
    }

    pub fn candidate(&self, i: usize) -> &[f64] {
        &self.candidates[i]
    }

    /// Posterior variance of candidate `i`, clamped to `[0, k(x,x)]`.
    #[inline]
    pub fn variance(&self, i: usize) -> f64 {
        (self.prior_diag[i] - self.sumsq[i]).clamp(0.0, self.prior_diag[i])
    }

    #[inline]
    pub fn sigma(&self, i: usize) -> f64 {
        self.variance(i).sqrt()
    }

    /// Posterior mean of candidate `i`; requires every design point to have
    /// an attached observation.
    pub fn mean(&self, i: usize) -> Result<f64> {
        if self.w.len() != self.design.len() {
            return Err(Error::State(format!(
                "mean query with {} of {} design observations attached",
                self.w.len(),
                self.design.len()
            )));
        }
        Ok(self.dot[i])
    }

    /// Index of the maximum-variance candidate, restricted to `mask` when
    /// given; ties break to the lowest index.
    pub fn argmax_variance(&self, mask: Option<&[bool]>) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.candidates.len() {
            if let Some(m) = mask {
                if !m[i] {
                    continue;
                }
            }
            let v = self.prior_diag[i] - self.sumsq[i];
            match best {
                Some((_, bv)) if v <= bv => {}
                _ => best = Some((i, v)),
            }
        }
        best.map(|(i, _)| i)
    }

    /// Adds candidate `sel` to the design and refreshes all candidate
    /// solve vectors in O(num_candidates · design_len).
    pub fn add_design(&mut self, sel: usize) -> Result<()> {
        if sel >= self.candidates.len() {
            return Err(Error::InvalidInput(format!(
                "design selection {sel} out of range for {} candidates",
                self.candidates.len()
            )));
        }
        let row = self.feat[sel].clone();
        let point = self.candidates[sel].clone();
        self.push_design_row(row, point)
    }

    /// Adds an arbitrary design point (not necessarily a candidate), e.g. to
    /// preload history before a selection pass.
    pub fn add_design_point(&mut self, x: &[f64]) -> Result<()> {
        let mut cov = Vec::with_capacity(self.design.len());
        for p in &self.design {
            cov.push(self.spec.eval(p, x)?);
        }
        let row = self.chol.solve_lower(&cov);
        self.push_design_row(row, x.to_vec())
    }

    fn push_design_row(&mut self, row: Vec<f64>, point: Vec<f64>) -> Result<()> {
        let diag = self.spec.eval(&point, &point)? + self.lambda;
        let pivot = self
            .chol
            .extend_with_solved(&row, diag, jitter_for(self.lambda))?;
        for (c, feat) in self.feat.iter_mut().enumerate() {
            let kv = self.spec.eval(&point, &self.candidates[c])?;
            let dot: f64 = row.iter().zip(feat.iter()).map(|(a, b)| a * b).sum();
            let entry = (kv - dot) / pivot;
            feat.push(entry);
            self.sumsq[c] += entry * entry;
        }
        self.design.push(point);
        Ok(())
    }

    /// Attaches observations for the next unobserved design points, in
    /// design order.
    pub fn attach_observations(&mut self, y: &[f64]) -> Result<()> {
        if self.w.len() + y.len() > self.design.len() {
            return Err(Error::InvalidInput(format!(
                "attaching {} observations would exceed the design size {}",
                y.len(),
                self.design.len()
            )));
        }
        for &val in y {
            let j = self.w.len();
            // w_j = (y_j − L[j, ..j]·w) / L[j, j]
            let dot: f64 = self.chol.row(j)[..j]
                .iter()
                .zip(self.w.iter())
                .map(|(a, b)| a * b)
                .sum();
            let wj = (val - dot) / self.chol.diag(j);
            self.w.push(wj);
            for (c, feat) in self.feat.iter().enumerate() {
                self.dot[c] += feat[j] * wj;
            }
        }
        Ok(())
    }
}
