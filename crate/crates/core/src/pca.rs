//! Principal component analysis of a centered return panel.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Eigenvalues in `[-EIGENVALUE_CLIP, 0)` are rounding noise and are set to 0.
pub const EIGENVALUE_CLIP: f64 = 1e-12;

/// Divisor applied to `XᵀX` (and to PC variances in the regression method).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CovarianceDivisor {
    /// Unbiased sample covariance, `M − 1`.
    #[default]
    SampleMinusOne,
    /// Population covariance, `M`.
    Population,
}

impl CovarianceDivisor {
    pub fn value(self, rows: usize) -> f64 {
        match self {
            Self::SampleMinusOne => (rows - 1) as f64,
            Self::Population => rows as f64,
        }
    }
}

/// Ordered eigenpairs of the panel covariance and the projected components.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaResult {
    /// λ_1 ≥ … ≥ λ_N ≥ 0, per-day variances.
    pub eigenvalues: DVector<f64>,
    /// Orthonormal W; column j is the j-th principal axis.
    pub eigenvectors: DMatrix<f64>,
    /// P = X W (M×N).
    pub components: DMatrix<f64>,
    /// Means removed from the raw panel before analysis.
    pub column_means: DVector<f64>,
}

impl PcaResult {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// Subtracts each column's mean. Returns the centered matrix and the means.
pub fn center_columns(x: &DMatrix<f64>) -> Result<(DMatrix<f64>, DVector<f64>)> {
    if x.nrows() < 2 {
        return Err(Error::InsufficientHistory {
            required: 2,
            available: x.nrows(),
        });
    }
    // a constant column keeps its value as the mean so it centers to exact zeros
    let means = DVector::from_iterator(
        x.ncols(),
        x.column_iter().map(|c| {
            if c.iter().all(|v| *v == c[0]) {
                c[0]
            } else {
                c.mean()
            }
        }),
    );
    let mut centered = x.clone();
    for (mut col, mean) in centered.column_iter_mut().zip(means.iter()) {
        col.add_scalar_mut(-mean);
    }
    Ok((centered, means))
}

/// PCA of an already-centered panel `x0`: eigenpairs of `x0ᵀx0 / divisor`,
/// sorted by descending eigenvalue, with each eigenvector signed so that its
/// largest-magnitude entry is positive (first index wins ties).
pub fn pca(x0: &DMatrix<f64>, divisor: CovarianceDivisor) -> Result<PcaResult> {
    pca_with_means(x0, DVector::zeros(x0.ncols()), divisor)
}

/// Centers `x` and runs [`pca`], recording the removed means.
pub fn pca_of_panel(x: &DMatrix<f64>, divisor: CovarianceDivisor) -> Result<PcaResult> {
    let (centered, means) = center_columns(x)?;
    pca_with_means(&centered, means, divisor)
}

fn pca_with_means(
    x0: &DMatrix<f64>,
    column_means: DVector<f64>,
    divisor: CovarianceDivisor,
) -> Result<PcaResult> {
    let (m, n) = x0.shape();
    if m < 2 {
        return Err(Error::InsufficientHistory {
            required: 2,
            available: m,
        });
    }
    if n == 0 {
        return Err(Error::InvalidInput("panel has no columns".into()));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("pca input"));
    }

    let mut cov = x0.tr_mul(x0) / divisor.value(m);
    // exact symmetry before the eigen solver
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (cov[(i, j)] + cov[(j, i)]);
            cov[(i, j)] = s;
            cov[(j, i)] = s;
        }
    }
    let eig = SymmetricEigen::new(cov);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mut eigenvalues = DVector::zeros(n);
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let lambda = eig.eigenvalues[src];
        if !lambda.is_finite() {
            return Err(Error::NonFinite("eigenvalue"));
        }
        eigenvalues[dst] = if (-EIGENVALUE_CLIP..0.0).contains(&lambda) {
            0.0
        } else {
            lambda
        };
        let mut v = eig.eigenvectors.column(src).into_owned();
        let mut lead = 0;
        for i in 1..n {
            if v[i].abs() > v[lead].abs() {
                lead = i;
            }
        }
        if v[lead] < 0.0 {
            v.neg_mut();
        }
        eigenvectors.set_column(dst, &v);
    }

    let components = x0 * &eigenvectors;
    Ok(PcaResult {
        eigenvalues,
        eigenvectors,
        components,
        column_means,
    })
}
