#![allow(dead_code)]

use srr_core::{DMatrix, DVector, GbmSpec};

/// The five-asset market used by the end-to-end recovery check.
pub fn recovery_spec(steps: usize, seed: u64) -> GbmSpec {
    let mu = DVector::from_column_slice(&[0.0004, 0.0002, 0.0006, 0.0003, 0.0005]);
    let sigma = DMatrix::from_row_slice(
        5,
        4,
        &[
            0.012, 0.002, 0.001, 0.000, //
            0.008, 0.009, -0.002, 0.001, //
            0.010, -0.004, 0.006, 0.002, //
            0.007, 0.003, 0.002, 0.008, //
            0.011, 0.001, -0.003, -0.004,
        ],
    );
    GbmSpec::new(mu, sigma, steps, seed)
}

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix, unsorted.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |j| *j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off <= 1e-32 * a.norm_squared() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)] == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (kp, kq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * kp - s * kq;
                    a[(k, q)] = s * kp + c * kq;
                }
                for k in 0..n {
                    let (pk, qk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * pk - s * qk;
                    a[(q, k)] = s * pk + c * qk;
                }
                for k in 0..n {
                    let (kp, kq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * kp - s * kq;
                    v[(k, q)] = s * kp + c * kq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)]).collect(), v)
}

/// Eigenvector of the smallest eigenvalue.
pub fn null_direction(sym: &DMatrix<f64>) -> DVector<f64> {
    let (vals, vecs) = jacobi_eigen(sym);
    let imin = (0..vals.len()).fold(0, |b, i| if vals[i] < vals[b] { i } else { b });
    vecs.column(imin).into_owned()
}

/// ν = nᵀμ / nᵀ𝟙 with n orthogonal to the loading space: the drift of the
/// zero-volatility portfolio, computed without forming or inverting Φ.
pub fn nu_by_null_vector(loading_gram: &DMatrix<f64>, mu: &DVector<f64>) -> f64 {
    let n = null_direction(loading_gram);
    n.dot(mu) / n.sum()
}

/// Column means and the (M−1)-normalized sample covariance, by loops.
pub fn moments(x: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let (m, n) = x.shape();
    let means = DVector::from_fn(n, |j, _| (0..m).map(|i| x[(i, j)]).sum::<f64>() / m as f64);
    let cov = DMatrix::from_fn(n, n, |a, b| {
        (0..m)
            .map(|i| (x[(i, a)] - means[a]) * (x[(i, b)] - means[b]))
            .sum::<f64>()
            / (m - 1) as f64
    });
    (means, cov)
}

/// SplitMix64, for test inputs.
pub struct Mix(pub u64);

impl Mix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform on [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * ((self.next_u64() >> 11) as f64 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        (0..12).map(|_| self.uniform(0.0, 1.0)).sum::<f64>() - 6.0
    }

    pub fn matrix(&mut self, rows: usize, cols: usize, scale: f64) -> DMatrix<f64> {
        DMatrix::from_fn(rows, cols, |_, _| scale * self.normal())
    }
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}
