//! Synthetic benchmark environments: finite grid domains, RKHS-norm-bounded
//! test functions, peaked 2D surfaces, observation noise, and the regret
//! oracle.
//!
//! Regret is always computed from the noiseless ground truth stored in the
//! environment, never from observations. Noise draws are keyed by
//! `(seed, t)` so that batched and sequential policies facing the same seed
//! see comparable noise streams.

use crate::chol::CholFactor;
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::util::{ceil_sqrt, keyed_rng};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::io::{BufRead, Write};

/// Default cap on discretization size.
pub const POINT_CAP: usize = 1_000_000;

/// Style selector for the synthetic 2D surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeakStyle {
    /// One dominant smooth bump.
    SinglePeak,
    /// Three to five bumps with near-equal heights.
    MultiPeak,
}

/// A finite benchmark environment: candidate points, ground-truth values,
/// noise level, and the location of the optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    domain: Vec<Vec<f64>>,
    f_values: Vec<f64>,
    noise_sigma: f64,
    optimum_index: usize,
    rkhs_norm: Option<f64>,
    per_axis: Option<usize>,
}

impl Environment {
    /// Builds an environment from explicit ground-truth values.
    pub fn from_values(domain: Vec<Vec<f64>>, f_values: Vec<f64>, noise_sigma: f64) -> Result<Self> {
        if domain.is_empty() || domain.len() != f_values.len() {
            return Err(Error::InvalidInput(format!(
                "domain has {} points but {} function values",
                domain.len(),
                f_values.len()
            )));
        }
        if f_values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("function values must be finite".into()));
        }
        if !(noise_sigma >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "noise level must be nonnegative, got {noise_sigma}"
            )));
        }
        let optimum_index = argmax_lowest(&f_values);
        Ok(Self {
            domain,
            f_values,
            noise_sigma,
            optimum_index,
            rkhs_norm: None,
            per_axis: None,
        })
    }

    pub fn with_noise_sigma(mut self, noise_sigma: f64) -> Self {
        self.noise_sigma = noise_sigma;
        self
    }

    pub fn with_per_axis(mut self, per_axis: usize) -> Self {
        self.per_axis = Some(per_axis);
        self
    }

    pub fn domain(&self) -> &[Vec<f64>] {
        &self.domain
    }

    pub fn num_points(&self) -> usize {
        self.domain.len()
    }

    pub fn dim(&self) -> usize {
        self.domain[0].len()
    }

    pub fn f_values(&self) -> &[f64] {
        &self.f_values
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }

    pub fn optimum_index(&self) -> usize {
        self.optimum_index
    }

    pub fn rkhs_norm(&self) -> Option<f64> {
        self.rkhs_norm
    }

    pub fn per_axis(&self) -> Option<usize> {
        self.per_axis
    }

    /// Noisy observation of point `index` at time `t`. The draw depends only
    /// on `(rng_seed, t)`, so repeating a query reproduces the same value.
    pub fn observe(&self, index: usize, t: usize, rng_seed: u64) -> f64 {
        let f = self.f_values[index];
        if self.noise_sigma == 0.0 {
            return f;
        }
        let z: f64 = keyed_rng(rng_seed, t as u64).sample(StandardNormal);
        f + self.noise_sigma * z
    }

    /// Instantaneous regret of selecting `index`: `f(x*) − f(x)`.
    pub fn regret(&self, index: usize) -> f64 {
        self.f_values[self.optimum_index] - self.f_values[index]
    }

    /// Writes the flat text form: a header line with `d`, `per_axis`,
    /// `noise_sigma` and `rkhs_norm`, then one line per point with the
    /// coordinates and the ground-truth value.
    pub fn write_text<W: Write>(&self, w: &mut W) -> Result<()> {
        let per_axis = match self.per_axis {
            Some(n) => n.to_string(),
            None => "-".to_string(),
        };
        let norm = match self.rkhs_norm {
            Some(v) => v.to_string(),
            None => "-".to_string(),
        };
        writeln!(
            w,
            "d={} per_axis={} noise_sigma={} rkhs_norm={}",
            self.dim(),
            per_axis,
            self.noise_sigma,
            norm
        )?;
        for (p, f) in self.domain.iter().zip(self.f_values.iter()) {
            let coords: Vec<String> = p.iter().map(|c| c.to_string()).collect();
            writeln!(w, "{} {}", coords.join(" "), f)?;
        }
        Ok(())
    }

    /// Reads the format produced by [`Environment::write_text`].
    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidInput("empty environment file".into()))??;
        let mut d = None;
        let mut per_axis = None;
        let mut noise_sigma = None;
        let mut rkhs_norm = None;
        for field in header.split_whitespace() {
            let (key, value) = field.split_once('=').ok_or_else(|| {
                Error::InvalidInput(format!("malformed header field '{field}'"))
            })?;
            match key {
                "d" => d = Some(parse_num::<usize>(key, value)?),
                "per_axis" => {
                    if value != "-" {
                        per_axis = Some(parse_num::<usize>(key, value)?);
                    }
                }
                "noise_sigma" => noise_sigma = Some(parse_num::<f64>(key, value)?),
                "rkhs_norm" => {
                    if value != "-" {
                        rkhs_norm = Some(parse_num::<f64>(key, value)?);
                    }
                }
                other => {
                    return Err(Error::InvalidInput(format!(
                        "unknown header field '{other}'"
                    )))
                }
            }
        }
        let d = d.ok_or_else(|| Error::InvalidInput("header missing 'd'".into()))?;
        let noise_sigma =
            noise_sigma.ok_or_else(|| Error::InvalidInput("header missing 'noise_sigma'".into()))?;
        let mut domain = Vec::new();
        let mut f_values = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut vals = Vec::with_capacity(d + 1);
            for tok in line.split_whitespace() {
                vals.push(parse_num::<f64>("point", tok)?);
            }
            if vals.len() != d + 1 {
                return Err(Error::InvalidInput(format!(
                    "expected {} values per line, got {}",
                    d + 1,
                    vals.len()
                )));
            }
            let f = vals.pop().expect("checked length above");
            domain.push(vals);
            f_values.push(f);
        }
        let mut env = Environment::from_values(domain, f_values, noise_sigma)?;
        env.rkhs_norm = rkhs_norm;
        env.per_axis = per_axis;
        Ok(env)
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidInput(format!("cannot parse {key} value '{value}'")))
}

fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Evenly spaced lattice of `per_axis^d` points over `[lo, hi]^d`, in
/// row-major order (the last axis varies fastest).
pub fn build_grid(d: usize, per_axis: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    assert!(per_axis >= 2, "grid needs at least 2 points per axis");
    assert!(d >= 1, "grid needs at least 1 dimension");
    let step = (hi - lo) / (per_axis - 1) as f64;
    let total = per_axis.pow(d as u32);
    let mut points = Vec::with_capacity(total);
    let mut idx = vec![0usize; d];
    for _ in 0..total {
        points.push(idx.iter().map(|&i| lo + step * i as f64).collect());
        for axis in (0..d).rev() {
            idx[axis] += 1;
            if idx[axis] < per_axis {
                break;
            }
            idx[axis] = 0;
        }
    }
    points
}

/// Closed lattice over `[0, 1]^d` with per-axis spacing `1/⌈√T⌉`, i.e.
/// `(⌈√T⌉ + 1)^d` points.
pub fn discretize_for_horizon(d: usize, t: usize) -> Result<Vec<Vec<f64>>> {
    discretize_for_horizon_capped(d, t, POINT_CAP)
}

/// As [`discretize_for_horizon`] but with an explicit point-count cap.
pub fn discretize_for_horizon_capped(d: usize, t: usize, cap: usize) -> Result<Vec<Vec<f64>>> {
    if t < 4 {
        return Err(Error::InvalidInput(format!(
            "discretization requires a horizon of at least 4, got {t}"
        )));
    }
    let m = ceil_sqrt(t as u64) as usize;
    let per_axis = m + 1;
    let count = (per_axis as u128).checked_pow(d as u32);
    match count {
        Some(c) if c <= cap as u128 => {}
        _ => {
            return Err(Error::Resource(format!(
                "discretization of [0,1]^{d} at horizon {t} needs {per_axis}^{d} points, \
                 above the cap of {cap}"
            )))
        }
    }
    Ok(build_grid(d, per_axis, 0.0, 1.0))
}

/// Draws a function with an exactly known RKHS norm as a kernel mixture
/// `f(x) = Σ_j α_j k(x, c_j)` with centers drawn uniformly from the domain
/// and weights rescaled so that `√(αᵀ K_c α) = psi`.
pub fn sample_rkhs_function(
    spec: &KernelSpec,
    domain: &[Vec<f64>],
    psi: f64,
    num_centers: usize,
    rng_seed: u64,
) -> Result<Environment> {
    if num_centers == 0 {
        return Err(Error::InvalidInput("need at least one center".into()));
    }
    if !(psi > 0.0) {
        return Err(Error::InvalidInput(format!(
            "norm bound must be positive, got {psi}"
        )));
    }
    if domain.is_empty() {
        return Err(Error::InvalidInput("domain must be nonempty".into()));
    }
    if num_centers > domain.len() {
        return Err(Error::InvalidInput(format!(
            "cannot draw {num_centers} distinct centers from {} points",
            domain.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for _attempt in 0..10 {
        let idxs: Vec<usize> = (0..num_centers)
            .map(|_| rng.random_range(0..domain.len()))
            .collect();
        let mut sorted = idxs.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != idxs.len() {
            continue; // duplicate centers: resample
        }
        let centers: Vec<Vec<f64>> = idxs.iter().map(|&i| domain[i].clone()).collect();
        let gram = spec.gram(&centers)?;
        if factor_gram(&gram).is_none() {
            continue; // numerically singular center set: resample
        }
        let mut alpha: Vec<f64> = (0..num_centers)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let q = quad_form(&gram, &alpha);
        if !(q > 0.0) {
            continue;
        }
        let scale = psi / q.sqrt();
        for a in &mut alpha {
            *a *= scale;
        }
        let mut f_values = mixture_values(spec, domain, &centers, &alpha)?;
        // Orient so the extreme value is a maximum (negation preserves the
        // norm); a maximization benchmark whose optimum is the flat
        // near-zero region far from every center is degenerate.
        let max = f_values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = f_values.iter().cloned().fold(f64::INFINITY, f64::min);
        if -min > max {
            for v in f_values.iter_mut().chain(alpha.iter_mut()) {
                *v = -*v;
            }
        }
        let mut env = Environment::from_values(domain.to_vec(), f_values, 0.0)?;
        env.rkhs_norm = Some(quad_form(&gram, &alpha).sqrt());
        return Ok(env);
    }
    Err(Error::Numerical(
        "failed to draw a non-singular center set in 10 attempts".into(),
    ))
}

/// Builds a 2D test surface as a kernel mixture: either one dominant bump
/// or several near-equal bumps. Values are rescaled so the maximum over the
/// grid is exactly 1 (scaling preserves the mixture form, so the RKHS norm
/// stays exactly computable).
pub fn make_peaked_function(
    domain: &[Vec<f64>],
    style: PeakStyle,
    rng_seed: u64,
) -> Result<Environment> {
    if domain.is_empty() || domain[0].len() != 2 {
        return Err(Error::InvalidInput(
            "peaked surfaces are defined over 2D domains".into(),
        ));
    }
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in domain {
        for a in 0..2 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    if !(span > 0.0) {
        return Err(Error::InvalidInput("degenerate 2D domain".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let (bump_scale, centers) = match style {
        PeakStyle::SinglePeak => {
            let c: Vec<f64> = (0..2)
                .map(|a| {
                    let margin = 0.2 * (hi[a] - lo[a]);
                    rng.random_range(lo[a] + margin..hi[a] - margin)
                })
                .collect();
            (0.25 * span, vec![c])
        }
        PeakStyle::MultiPeak => {
            let count = rng.random_range(3..=5usize);
            let min_sep = 0.38 * span;
            let mut centers: Vec<Vec<f64>> = Vec::new();
            let mut proposals = 0;
            while centers.len() < count && proposals < 500 {
                proposals += 1;
                let c: Vec<f64> = (0..2)
                    .map(|a| {
                        let margin = 0.1 * (hi[a] - lo[a]);
                        rng.random_range(lo[a] + margin..hi[a] - margin)
                    })
                    .collect();
                let ok = centers.iter().all(|other| {
                    let d2: f64 = c
                        .iter()
                        .zip(other.iter())
                        .map(|(x, y)| (x - y) * (x - y))
                        .sum();
                    d2.sqrt() >= min_sep
                });
                if ok {
                    centers.push(c);
                }
            }
            if centers.len() < 3 {
                return Err(Error::Numerical(
                    "could not place 3 separated bumps in the domain".into(),
                ));
            }
            (0.12 * span, centers)
        }
    };
    let bump = KernelSpec::squared_exponential(bump_scale, 2)?;
    let gram = bump.gram(&centers)?;
    // Weights solving M alpha = 1 put every bump apex at exactly height 1.
    let mut alpha = vec![1.0; centers.len()];
    if centers.len() > 1 {
        let factor = factor_gram(&gram).ok_or_else(|| {
            Error::Numerical("bump Gram matrix is numerically singular".into())
        })?;
        let ones = vec![1.0; centers.len()];
        let w = factor.solve_lower(&ones);
        alpha = factor.solve_lower_transpose(&w);
    }
    let mut f_values = mixture_values(&bump, domain, &centers, &alpha)?;
    let max = f_values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(max > 0.0) {
        return Err(Error::Numerical("surface has no positive values".into()));
    }
    for v in &mut f_values {
        *v /= max;
    }
    for a in &mut alpha {
        *a /= max;
    }
    let mut env = Environment::from_values(domain.to_vec(), f_values, 0.0)?;
    env.rkhs_norm = Some(quad_form(&gram, &alpha).sqrt());
    Ok(env)
}

fn factor_gram(gram: &[Vec<f64>]) -> Option<CholFactor> {
    let mut f = CholFactor::new();
    for (i, row) in gram.iter().enumerate() {
        if f.extend(&row[..i], row[i], 0.0).is_err() {
            return None;
        }
    }
    Some(f)
}

fn quad_form(gram: &[Vec<f64>], alpha: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (i, a) in alpha.iter().enumerate() {
        for (j, b) in alpha.iter().enumerate() {
            acc += a * b * gram[i][j];
        }
    }
    acc
}

fn mixture_values(
    spec: &KernelSpec,
    domain: &[Vec<f64>],
    centers: &[Vec<f64>],
    alpha: &[f64],
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(domain.len());
    for x in domain {
        let mut acc = 0.0;
        for (c, a) in centers.iter().zip(alpha.iter()) {
            acc += a * spec.eval(x, c)?;
        }
        out.push(acc);
    }
    Ok(out)
}
