//! Dense kernels the solver needs beyond nalgebra: a partially pivoted LU,
//! a one-sided Jacobi SVD and a Leibniz determinant used as an
//! elimination-free cross-check.
//!
//! The Jacobi SVD is used instead of nalgebra's bidiagonal QR because the
//! latter can stop early on matrices whose singular values span a few
//! decades, leaving reconstruction errors far above rounding level.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Pivots at or below `PIVOT_FLOOR · max|A|` are treated as singular.
pub const PIVOT_FLOOR: f64 = 1e-14;

/// Largest dimension accepted by [`leibniz_determinant`].
pub const LEIBNIZ_MAX_DIM: usize = 20;

/// `PA = LU` with row partial pivoting, stored compactly.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: DMatrix<f64>,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    pub fn factor(a: &DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch {
                context: "lu (square)",
                expected: n,
                found: a.ncols(),
            });
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("lu input"));
        }
        let floor = PIVOT_FLOOR * a.amax();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            if !(pivot > floor) {
                return Err(Error::SingularMatrix { pivot: k });
            }
            if p != k {
                lu.swap_rows(p, k);
                perm.swap(p, k);
                swaps += 1;
            }
            let d = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                for j in k + 1..n {
                    lu[(i, j)] -= f * lu[(k, j)];
                }
            }
        }
        Ok(Self { lu, perm, swaps })
    }

    pub fn solve(&self, b: &DVector<f64>) -> Result<DVector<f64>> {
        let n = self.lu.nrows();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                context: "lu solve",
                expected: n,
                found: b.len(),
            });
        }
        let mut x = DVector::from_iterator(n, self.perm.iter().map(|&i| b[i]));
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        Ok(x)
    }

    pub fn determinant(&self) -> f64 {
        let sign = if self.swaps % 2 == 0 { 1.0 } else { -1.0 };
        sign * self.lu.diagonal().iter().product::<f64>()
    }
}

/// `det A = Σ_σ sgn σ Π a_{i,σ(i)}`, accumulated over column subsets in
/// O(N·2^N). No elimination, no pivoting.
pub fn leibniz_determinant(a: &DMatrix<f64>) -> Result<f64> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "determinant (square)",
            expected: n,
            found: a.ncols(),
        });
    }
    if n > LEIBNIZ_MAX_DIM {
        return Err(Error::InvalidInput(alloc::format!(
            "determinant expansion limited to N <= {LEIBNIZ_MAX_DIM}"
        )));
    }
    if n == 0 {
        return Ok(1.0);
    }
    // partial[mask]: signed sum over assignments of rows 0..|mask| onto mask
    let mut partial = vec![0.0_f64; 1 << n];
    partial[0] = 1.0;
    for mask in 0usize..(1 << n) {
        let acc = partial[mask];
        if acc == 0.0 {
            continue;
        }
        let row = mask.count_ones() as usize;
        if row == n {
            continue;
        }
        for c in 0..n {
            if mask & (1 << c) != 0 {
                continue;
            }
            // columns already used that sit to the right of c form new inversions
            let inversions = (mask >> (c + 1)).count_ones();
            let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
            partial[mask | (1 << c)] += sign * acc * a[(row, c)];
        }
    }
    Ok(partial[(1 << n) - 1])
}

/// Sweep limit for [`jacobi_svd`].
pub const JACOBI_MAX_SWEEPS: usize = 80;

/// One-sided (Hestenes) Jacobi SVD of a square matrix.
///
/// Returns `(u, d, v)` with `a = u·diag(d)·vᵀ`, `d` sorted descending and
/// `u`, `v` orthogonal. Columns of `u` whose singular value is below rounding
/// level of `a` are completed to an orthonormal basis.
pub fn jacobi_svd(a: &DMatrix<f64>) -> Result<(DMatrix<f64>, DVector<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "svd (square)",
            expected: n,
            found: a.ncols(),
        });
    }
    let mut w = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    // columns below rounding level of the whole matrix carry no direction
    let negligible = {
        let scale = f64::EPSILON * a.norm();
        scale * scale
    };
    let mut converged = n < 2;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dot(&w.column(q));
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                if gamma == 0.0
                    || gamma.abs() <= f64::EPSILON * libm::sqrt(alpha) * libm::sqrt(beta)
                {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = libm::copysign(1.0, zeta) / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                rotate_columns(&mut w, p, q, c, s);
                rotate_columns(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            iterations: JACOBI_MAX_SWEEPS,
        });
    }

    let norms: Vec<f64> = w.column_iter().map(|c| c.norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));

    let mut u = DMatrix::zeros(n, n);
    let mut d = DVector::zeros(n);
    let mut v_sorted = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        d[dst] = norms[src];
        v_sorted.set_column(dst, &v.column(src));
        if norms[src] > 0.0 && norms[src] * norms[src] > negligible {
            u.set_column(dst, &(w.column(src) / norms[src]));
        }
    }
    complete_orthonormal(&mut u);
    Ok((u, d, v_sorted))
}

fn rotate_columns(m: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..m.nrows() {
        let (mp, mq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = c * mp - s * mq;
        m[(k, q)] = s * mp + c * mq;
    }
}

/// Replaces the zero columns of `u` with unit vectors orthogonal to every
/// other column.
fn complete_orthonormal(u: &mut DMatrix<f64>) {
    let n = u.nrows();
    for j in 0..n {
        if u.column(j).norm_squared() > 0.0 {
            continue;
        }
        let mut best = DVector::zeros(n);
        let mut best_norm = -1.0;
        for e in 0..n {
            let mut cand = DVector::zeros(n);
            cand[e] = 1.0;
            for _pass in 0..2 {
                for k in 0..n {
                    if k == j || u.column(k).norm_squared() == 0.0 {
                        continue;
                    }
                    let proj = u.column(k).dot(&cand);
                    cand -= u.column(k) * proj;
                }
            }
            let norm = cand.norm();
            if norm > best_norm {
                best_norm = norm;
                best = cand;
            }
        }
        u.set_column(j, &(best / best_norm));
    }
}
