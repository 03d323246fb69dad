//! Principal-component front-end: correlation-matrix PCA with Kaiser
//! (eigenvalue > 1) component selection, forward projection and
//! back-transformation.
//!
//! Missing cells are mean-substituted (zero after centering) before
//! projection, which keeps the mapping linear and is the minimal choice
//! consistent with values missing completely at random.

use ndarray::{s, Array1, Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;

/// Eigenvalues may dip this far below zero from rounding before the fit is
/// treated as numerically invalid.
const EIGENVALUE_FLOOR: f64 = -1e-9;

/// A fitted principal-component model.
///
/// `components` is the m×m orthonormal eigenvector matrix of the (scaled)
/// covariance; column i pairs with `eigenvalues[i]`, sorted descending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    mean: Vec<f64>,
    scale: Vec<f64>,
    eigenvalues: Vec<f64>,
    components: Array2<f64>,
    kept: usize,
}

impl PcaModel {
    /// Fits a PCA on the given feature matrix. NaN entries are treated as
    /// missing: column statistics come from observed values only and missing
    /// cells are mean-substituted for the covariance accumulation.
    ///
    /// With `standardize` set (the default everywhere in the toolkit), each
    /// column is divided by its standard deviation so the decomposed matrix
    /// is the correlation matrix, which is what makes the eigenvalue > 1
    /// selection rule meaningful.
    pub fn fit(features: ArrayView2<f64>, standardize: bool) -> Result<PcaModel> {
        let n = features.nrows();
        let m = features.ncols();
        if n < 2 {
            return Err(Error::Data(format!("PCA needs at least 2 rows, got {n}")));
        }
        if m == 0 {
            return Err(Error::Data("PCA needs at least 1 column".into()));
        }

        let mut mean = vec![0.0; m];
        let mut scale = vec![1.0; m];
        for c in 0..m {
            let observed: Vec<f64> = features.column(c).iter().copied().filter(|v| !v.is_nan()).collect();
            if observed.is_empty() {
                log::warn!("column {c} has no observed values; centering at 0");
                continue;
            }
            let mu = observed.iter().sum::<f64>() / observed.len() as f64;
            mean[c] = mu;
            if standardize {
                let var = if observed.len() < 2 {
                    0.0
                } else {
                    observed.iter().map(|v| (v - mu).powi(2)).sum::<f64>()
                        / (observed.len() - 1) as f64
                };
                if var <= f64::EPSILON {
                    log::warn!("column {c} has zero variance; leaving it unscaled");
                    scale[c] = 1.0;
                } else {
                    scale[c] = var.sqrt();
                }
            }
        }

        // Centered (and scaled) data with missing cells at the column mean.
        let z = Array2::from_shape_fn((n, m), |(r, c)| {
            let v = features[[r, c]];
            if v.is_nan() {
                0.0
            } else {
                (v - mean[c]) / scale[c]
            }
        });
        let cov = z.t().dot(&z) / (n - 1) as f64;
        let (raw_values, components) = symmetric_eigen(&cov)?;

        let mut eigenvalues = Vec::with_capacity(m);
        for &v in raw_values.iter() {
            if v < EIGENVALUE_FLOOR {
                return Err(Error::Numeric(format!(
                    "covariance eigenvalue {v:e} below the numerical floor"
                )));
            }
            eigenvalues.push(v.max(0.0));
        }

        let kept = eigenvalues.iter().filter(|&&v| v > 1.0).count().max(1);
        Ok(PcaModel {
            mean,
            scale,
            eigenvalues,
            components,
            kept,
        })
    }

    pub fn n_attributes(&self) -> usize {
        self.mean.len()
    }

    /// Number of selected components (Kaiser rule at fit time).
    pub fn kept(&self) -> usize {
        self.kept
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn components(&self) -> &Array2<f64> {
        &self.components
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    /// Same model with a different selected-component count.
    pub fn with_kept(mut self, kept: usize) -> Result<PcaModel> {
        let m = self.mean.len();
        if kept == 0 || kept > m {
            return Err(Error::Config(format!(
                "kept component count must lie in 1..={m}, got {kept}"
            )));
        }
        self.kept = kept;
        Ok(self)
    }

    /// Projects rows onto the first `kept` components. NaN cells are
    /// mean-substituted before projection; the output is always complete.
    pub fn transform(&self, features: ArrayView2<f64>) -> Result<Array2<f64>> {
        let m = self.mean.len();
        if features.ncols() != m {
            return Err(Error::Data(format!(
                "transform expects {m} columns, got {}",
                features.ncols()
            )));
        }
        let n = features.nrows();
        let z = Array2::from_shape_fn((n, m), |(r, c)| {
            let v = features[[r, c]];
            if v.is_nan() {
                0.0
            } else {
                (v - self.mean[c]) / self.scale[c]
            }
        });
        Ok(z.dot(&self.components.slice(s![.., ..self.kept])))
    }

    /// Maps component-space rows back to the original attribute space.
    pub fn inverse_transform(&self, projected: ArrayView2<f64>) -> Result<Array2<f64>> {
        if projected.ncols() != self.kept {
            return Err(Error::Data(format!(
                "inverse_transform expects {} columns, got {}",
                self.kept,
                projected.ncols()
            )));
        }
        let z = projected.dot(&self.components.slice(s![.., ..self.kept]).t());
        let m = self.mean.len();
        Ok(Array2::from_shape_fn((z.nrows(), m), |(r, c)| {
            z[[r, c]] * self.scale[c] + self.mean[c]
        }))
    }

    /// Component-space sample variances of a projected matrix, in component
    /// order.
    pub fn component_variances(projected: &Array2<f64>) -> Array1<f64> {
        let n = projected.nrows();
        let mut out = Array1::zeros(projected.ncols());
        if n < 2 {
            return out;
        }
        for (c, col) in projected.columns().into_iter().enumerate() {
            let mu = col.sum() / n as f64;
            out[c] = col.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (n - 1) as f64;
        }
        out
    }
}
