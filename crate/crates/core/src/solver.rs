//! The deflator linear system `Φ x = μ` with `Φ = [𝟙, −Σ]` and
//! `x = [ν, σ_π1, …, σ_π(N−1)]`.
//!
//! Three routes solve it: pivoted LU (the production path), SVD with an
//! optional replacement of the singular values (the regularized path), and a
//! determinant ratio for ν kept as a cross-check.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{jacobi_svd, leibniz_determinant, Lu};

/// Singular values at or below `SINGULAR_FLOOR · d_1` are treated as zero.
pub const SINGULAR_FLOOR: f64 = 1e-14;

/// Coefficient matrix and right-hand side of the deflator system.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiSystem {
    phi: DMatrix<f64>,
    mu: DVector<f64>,
}

impl PhiSystem {
    pub fn phi(&self) -> &DMatrix<f64> {
        &self.phi
    }

    pub fn mu(&self) -> &DVector<f64> {
        &self.mu
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    /// `Φ_μ = [μ, −Σ]`, the numerator matrix of the ν determinant ratio.
    pub fn phi_mu(&self) -> DMatrix<f64> {
        let mut m = self.phi.clone();
        m.set_column(0, &self.mu);
        m
    }

    /// `Φ x − μ`; entry j equals `−(μ_j + μ_π + Σ_k σ_jk σ_πk)`.
    pub fn residual(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.phi * x - &self.mu
    }
}

/// Assembles `Φ = [𝟙_N, −Σ]`.
pub fn build_phi(sigma: &DMatrix<f64>, mu: &DVector<f64>) -> Result<PhiSystem> {
    let n = mu.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty drift vector".into()));
    }
    if sigma.nrows() != n {
        return Err(Error::DimensionMismatch {
            context: "sigma rows",
            expected: n,
            found: sigma.nrows(),
        });
    }
    if sigma.ncols() + 1 != n {
        return Err(Error::DimensionMismatch {
            context: "sigma columns",
            expected: n - 1,
            found: sigma.ncols(),
        });
    }
    let mut phi = DMatrix::from_element(n, n, 1.0);
    phi.columns_mut(1, n - 1).copy_from(&(-sigma));
    Ok(PhiSystem {
        phi,
        mu: mu.clone(),
    })
}

/// `Φ = U diag(d) Vᵀ` with `d` non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdFactors {
    pub u: DMatrix<f64>,
    pub d: DVector<f64>,
    pub v: DMatrix<f64>,
}

impl SvdFactors {
    pub fn of(a: &DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch {
                context: "svd (square)",
                expected: n,
                found: a.ncols(),
            });
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("svd input"));
        }
        let (u, d, v) = jacobi_svd(a)?;
        let out = Self { u, d, v };
        Ok(out)
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.u * DMatrix::from_diagonal(&self.d) * self.v.transpose()
    }
}

/// `d_1 / d_N`, or `+∞` when `d_N` is at or below the singular floor.
pub fn kappa_of(d: &DVector<f64>) -> f64 {
    let (hi, lo) = (d.max(), d.min());
    if hi <= 0.0 || lo <= SINGULAR_FLOOR * hi {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// 2-norm condition number from the singular values of `phi`.
pub fn condition_number(phi: &DMatrix<f64>) -> Result<f64> {
    Ok(kappa_of(&SvdFactors::of(phi)?.d))
}

/// Drift and volatility of the state-price deflator for one date.
#[derive(Debug, Clone, PartialEq)]
pub struct DeflatorSolution {
    /// Shadow riskless rate ν = −μ_π, per day.
    pub nu: f64,
    pub sigma_pi_vec: DVector<f64>,
    pub sigma_pi_total: f64,
    /// ‖Φx − μ‖₂ against the unregularized Φ.
    pub residual_norm: f64,
    /// Condition number of the matrix actually inverted.
    pub kappa: f64,
}

impl DeflatorSolution {
    fn from_x(sys: &PhiSystem, x: &DVector<f64>, kappa: f64) -> Result<Self> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("deflator solution"));
        }
        let sigma_pi_vec = x.rows(1, x.len() - 1).into_owned();
        Ok(Self {
            nu: x[0],
            sigma_pi_total: total_volatility(sigma_pi_vec.as_slice()),
            sigma_pi_vec,
            residual_norm: sys.residual(x).norm(),
            kappa,
        })
    }

    /// The stacked unknown `[ν, σ_π1, …]`.
    pub fn x(&self) -> DVector<f64> {
        let mut x = DVector::zeros(self.sigma_pi_vec.len() + 1);
        x[0] = self.nu;
        x.rows_mut(1, self.sigma_pi_vec.len())
            .copy_from(&self.sigma_pi_vec);
        x
    }
}

/// Solves by LU with partial pivoting.
pub fn solve_lu(sys: &PhiSystem) -> Result<DeflatorSolution> {
    let lu = Lu::factor(&sys.phi)?;
    let x = lu.solve(&sys.mu)?;
    DeflatorSolution::from_x(sys, &x, condition_number(&sys.phi)?)
}

/// Solves through the SVD: `y = Uᵀμ`, `z = D⁻¹y`, `x = Vz`.
pub fn solve_svd(sys: &PhiSystem, d_override: Option<&DVector<f64>>) -> Result<DeflatorSolution> {
    let factors = SvdFactors::of(&sys.phi)?;
    solve_with_factors(sys, &factors, d_override)
}

/// As [`solve_svd`], reusing an existing factorization of `sys.phi()`.
/// When `d_override` is given it replaces the singular values in the
/// inversion; the residual is still measured against the original Φ.
pub fn solve_with_factors(
    sys: &PhiSystem,
    factors: &SvdFactors,
    d_override: Option<&DVector<f64>>,
) -> Result<DeflatorSolution> {
    let d = d_override.unwrap_or(&factors.d);
    if d.len() != sys.dim() {
        return Err(Error::DimensionMismatch {
            context: "singular values",
            expected: sys.dim(),
            found: d.len(),
        });
    }
    let (largest, smallest) = (d.max(), d.min());
    if !(largest > 0.0 && smallest > SINGULAR_FLOOR * largest) {
        return Err(Error::SingularValueFloor { smallest, largest });
    }
    let y = factors.u.tr_mul(&sys.mu);
    let z = y.component_div(d);
    let x = &factors.v * z;
    DeflatorSolution::from_x(sys, &x, largest / smallest)
}

/// ν = det Φ_μ / det Φ, evaluated by permutation expansion.
pub fn solve_determinant(sys: &PhiSystem) -> Result<f64> {
    let det = leibniz_determinant(&sys.phi)?;
    let scale = sys.phi.column_iter().map(|c| c.norm()).product::<f64>();
    if !(det.abs() > SINGULAR_FLOOR * scale) {
        return Err(Error::ZeroDeterminant);
    }
    Ok(leibniz_determinant(&sys.phi_mu())? / det)
}

/// `σ_π = √(Σ_k σ_πk²)`.
pub fn total_volatility(sigma_pi_vec: &[f64]) -> f64 {
    libm::sqrt(sigma_pi_vec.iter().map(|s| s * s).sum::<f64>())
}

/// Closed-form two-asset solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoAssetSrr {
    pub nu: f64,
    pub sigma_pi: f64,
}

impl TwoAssetSrr {
    /// Largest deviation among `(μ_1 − ν)/σ_1`, `−σ_π` and `(μ_2 − ν)/σ_2`,
    /// which agree exactly in exact arithmetic.
    pub fn market_price_of_risk_gap(&self, mu1: f64, mu2: f64, s1: f64, s2: f64) -> f64 {
        let a = (mu1 - self.nu) / s1;
        let b = -self.sigma_pi;
        let c = (mu2 - self.nu) / s2;
        (a - b).abs().max((c - b).abs()).max((a - c).abs())
    }
}

/// ν = (μ_1σ_2 − μ_2σ_1)/(σ_2 − σ_1), σ_π = (μ_1 − μ_2)/(σ_2 − σ_1).
pub fn srr_two_asset(mu1: f64, mu2: f64, s1: f64, s2: f64) -> Result<TwoAssetSrr> {
    let gap = s2 - s1;
    if gap == 0.0 {
        return Err(Error::EqualVolatilities);
    }
    Ok(TwoAssetSrr {
        nu: (mu1 * s2 - mu2 * s1) / gap,
        sigma_pi: (mu1 - mu2) / gap,
    })
}
