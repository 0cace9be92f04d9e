//! Stationary covariance kernels (squared exponential and Matérn) and
//! Gram-matrix assembly.
//!
//! Both families are normalized so that `k(x, x) = 1`, and distances are
//! Euclidean. Matérn smoothness is restricted to the half-integer values
//! `ν ∈ {1/2, 3/2, 5/2}`, which have closed forms and avoid Bessel-function
//! dependencies.

use crate::error::{Error, Result};

/// Kernel family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    SquaredExponential,
    Matern,
}

/// An immutable kernel description: family, lengthscale, smoothness and
/// input dimension. All evaluation goes through [`KernelSpec::eval`].
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    family: KernelFamily,
    lengthscale: f64,
    nu: Option<f64>,
    dim: usize,
}

impl KernelSpec {
    /// Squared-exponential kernel `exp(-r² / (2 l²))`.
    pub fn squared_exponential(lengthscale: f64, dim: usize) -> Result<Self> {
        Self::validate_common(lengthscale, dim)?;
        Ok(Self {
            family: KernelFamily::SquaredExponential,
            lengthscale,
            nu: None,
            dim,
        })
    }

    /// Matérn kernel with smoothness `nu`.
    ///
    /// Any positive `nu` is accepted here so that schedule arithmetic can use
    /// arbitrary smoothness exponents; [`KernelSpec::eval`] only supports the
    /// half-integer closed forms `nu ∈ {1/2, 3/2, 5/2}` and reports a
    /// configuration error for anything else.
    pub fn matern(lengthscale: f64, nu: f64, dim: usize) -> Result<Self> {
        Self::validate_common(lengthscale, dim)?;
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::Config(format!(
                "Matérn smoothness must be a positive finite real, got {nu}"
            )));
        }
        Ok(Self {
            family: KernelFamily::Matern,
            lengthscale,
            nu: Some(nu),
            dim,
        })
    }

    fn validate_common(lengthscale: f64, dim: usize) -> Result<()> {
        if !(lengthscale > 0.0) || !lengthscale.is_finite() {
            return Err(Error::Config(format!(
                "lengthscale must be a positive finite real, got {lengthscale}"
            )));
        }
        if dim == 0 {
            return Err(Error::Config("dimension must be at least 1".into()));
        }
        Ok(())
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn lengthscale(&self) -> f64 {
        self.lengthscale
    }

    pub fn nu(&self) -> Option<f64> {
        self.nu
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Evaluates `k(x, x2)`.
    pub fn eval(&self, x: &[f64], x2: &[f64]) -> Result<f64> {
        if x.len() != self.dim || x2.len() != self.dim {
            return Err(Error::InvalidInput(format!(
                "kernel expects dimension {}, got points of dimension {} and {}",
                self.dim,
                x.len(),
                x2.len()
            )));
        }
        let r2: f64 = x
            .iter()
            .zip(x2.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        Ok(self.eval_sq_dist(r2)?)
    }

    /// Evaluates the kernel from a squared Euclidean distance.
    pub(crate) fn eval_sq_dist(&self, r2: f64) -> Result<f64> {
        let l = self.lengthscale;
        match self.family {
            KernelFamily::SquaredExponential => Ok((-r2 / (2.0 * l * l)).exp()),
            KernelFamily::Matern => {
                let nu = self.nu.expect("Matérn spec always stores nu");
                let r = r2.sqrt();
                // s = sqrt(2 nu) * r / l
                if nu == 0.5 {
                    let s = r / l; // sqrt(2 * 1/2) = 1
                    Ok((-s).exp())
                } else if nu == 1.5 {
                    let s = 3.0_f64.sqrt() * r / l;
                    Ok((1.0 + s) * (-s).exp())
                } else if nu == 2.5 {
                    let s = 5.0_f64.sqrt() * r / l;
                    Ok((1.0 + s + s * s / 3.0) * (-s).exp())
                } else {
                    Err(Error::Config(format!(
                        "unsupported Matérn smoothness {nu}; closed forms exist for 0.5, 1.5, 2.5"
                    )))
                }
            }
        }
    }

    /// Assembles the Gram matrix `[k(p_i, p_j)]` for a nonempty point list.
    pub fn gram(&self, points: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        if points.is_empty() {
            return Err(Error::InvalidInput(
                "gram matrix requires at least one point".into(),
            ));
        }
        let n = points.len();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                let v = self.eval(&points[i], &points[j])?;
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        Ok(m)
    }
}
