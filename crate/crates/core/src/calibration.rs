//! Per-window estimation of the drift vector μ and the N×(N−1) volatility
//! loading matrix Σ.

use chrono::NaiveDate;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::market::ReturnMatrix;
use crate::pca::{self, CovarianceDivisor, PcaResult, EIGENVALUE_CLIP};

/// A principal component whose variance is below this fraction of the
/// leading one is treated as zero-variance by the regression method.
pub const ZERO_VARIANCE_RATIO: f64 = 1e-14;

/// How Σ is derived from the principal components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SigmaMethod {
    /// σ_jk = √λ_k · w_jk.
    #[default]
    Direct,
    /// OLS of the demeaned returns on the standardized leading components.
    Regression,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CalibrationOptions {
    /// Divisor of the PCA covariance.
    pub covariance_divisor: CovarianceDivisor,
    /// Divisor of the component variances used to standardize regressors.
    pub regression_divisor: CovarianceDivisor,
}

/// μ and Σ estimated from one window.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibratedModel {
    pub mu: DVector<f64>,
    pub sigma: DMatrix<f64>,
    pub method: SigmaMethod,
    pub window_end_date: NaiveDate,
}

/// σ_jk = √λ_k · w_jk for k < N; the last principal axis is discarded.
pub fn sigma_direct(p: &PcaResult) -> Result<DMatrix<f64>> {
    let n = p.dim();
    if n < 2 {
        return Err(Error::InvalidInput("need at least 2 eigenpairs".into()));
    }
    let mut sigma = DMatrix::zeros(n, n - 1);
    for k in 0..n - 1 {
        let lambda = p.eigenvalues[k];
        if lambda < -EIGENVALUE_CLIP {
            return Err(Error::NegativeEigenvalue {
                index: k,
                value: lambda,
            });
        }
        let scale = libm::sqrt(lambda.max(0.0));
        sigma.set_column(k, &(p.eigenvectors.column(k) * scale));
    }
    Ok(sigma)
}

/// Regression estimate of Σ.
///
/// `returns` is the raw (uncentered) window; `p` must come from its centered
/// version. Each standardized regressor is `(P_k − mean P_k) / √Var P_k`
/// with the variance taken over `divisor`. No intercept is fitted since both
/// sides are demeaned. An all-zero demeaned panel yields Σ = 0.
pub fn sigma_regression(
    returns: &DMatrix<f64>,
    p: &PcaResult,
    divisor: CovarianceDivisor,
) -> Result<DMatrix<f64>> {
    let (m, n) = returns.shape();
    if p.dim() != n {
        return Err(Error::DimensionMismatch {
            context: "regression pca",
            expected: n,
            found: p.dim(),
        });
    }
    if n < 2 {
        return Err(Error::InvalidInput("need at least 2 assets".into()));
    }
    let (y, _) = pca::center_columns(returns)?;
    if y.amax() == 0.0 {
        return Ok(DMatrix::zeros(n, n - 1));
    }

    let (regressors, _) = pca::center_columns(&p.components.columns(0, n - 1).into_owned())?;
    let variances: DVector<f64> = DVector::from_iterator(
        n - 1,
        regressors
            .column_iter()
            .map(|c| c.norm_squared() / divisor.value(m)),
    );
    let lead = variances.max();
    let mut standardized = regressors;
    for (k, mut col) in standardized.column_iter_mut().enumerate() {
        let var = variances[k];
        if !(var > ZERO_VARIANCE_RATIO * lead) {
            return Err(Error::SingularRegressors { column: k });
        }
        col /= libm::sqrt(var);
    }

    // least squares through a thin QR: R B = Qᵀ Y
    let qr = standardized.qr();
    let q = qr.q();
    let r = qr.r();
    let coefficients = r
        .solve_upper_triangular(&q.tr_mul(&y))
        .ok_or(Error::SingularRegressors { column: n - 2 })?;
    Ok(coefficients.transpose())
}

/// Steps 2–4 of the per-date procedure: demean, PCA, Σ.
pub fn calibrate(
    r: &ReturnMatrix,
    method: SigmaMethod,
    options: CalibrationOptions,
) -> Result<CalibratedModel> {
    let (m, n) = (r.rows(), r.assets());
    if m <= n {
        return Err(Error::InsufficientHistory {
            required: n + 1,
            available: m,
        });
    }
    let p = pca::pca_of_panel(r.values(), options.covariance_divisor)?;
    let sigma = match method {
        SigmaMethod::Direct => sigma_direct(&p)?,
        SigmaMethod::Regression => sigma_regression(r.values(), &p, options.regression_divisor)?,
    };
    if sigma
        .iter()
        .chain(p.column_means.iter())
        .any(|v| !v.is_finite())
    {
        return Err(Error::NonFinite("calibration output"));
    }
    Ok(CalibratedModel {
        mu: p.column_means,
        sigma,
        method,
        window_end_date: r.last_date().expect("non-empty window"),
    })
}
