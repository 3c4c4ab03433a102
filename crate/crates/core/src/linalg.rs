//! Dense real linear algebra: a one-sided Jacobi SVD and the minimum-norm
//! least-squares solve built on it.

use alloc::vec::Vec;

use crate::math::{hypot, sqrt};
use crate::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: alloc::vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|r| {
                self.data[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }
}

/// Thin SVD `A = U·diag(s)·Vᵀ` with `s` nonincreasing.
/// `u` is m×k and `v` is n×k, with k = min(m, n).
#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    pub u: Matrix,
    pub s: Vec<f64>,
    pub v: Matrix,
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd(a: &Matrix) -> Result<Svd> {
    if a.rows == 0 || a.cols == 0 {
        return Err(Error::EmptyMatrix);
    }
    if a.rows < a.cols {
        let t = svd(&a.transpose())?;
        return Ok(Svd { u: t.v, s: t.s, v: t.u });
    }
    let (m, n) = (a.rows, a.cols);
    // Work column-major: columns of `w` are rotated until mutually orthogonal.
    let mut w: Vec<Vec<f64>> = (0..n).map(|c| (0..m).map(|r| a.get(r, c)).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|c| (0..n).map(|r| if r == c { 1.0 } else { 0.0 }).collect())
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = w[p].iter().map(|x| x * x).sum();
                let beta: f64 = w[q].iter().map(|x| x * x).sum();
                let gamma: f64 = w[p].iter().zip(&w[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + hypot(1.0, zeta));
                let c = 1.0 / hypot(1.0, t);
                let s = c * t;
                rotate(&mut w, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<(usize, f64)> = w
        .iter()
        .enumerate()
        .map(|(i, col)| (i, sqrt(col.iter().map(|x| x * x).sum())))
        .collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1));

    let mut u = Matrix::zeros(m, n);
    let mut vm = Matrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (k, &(i, sigma)) in order.iter().enumerate() {
        s.push(sigma);
        if sigma > 0.0 {
            for (r, x) in w[i].iter().enumerate() {
                u.set(r, k, x / sigma);
            }
        }
        for (r, x) in v[i].iter().enumerate() {
            vm.set(r, k, *x);
        }
    }
    Ok(Svd { u, s, v: vm })
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(q);
    for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// Singular values only, nonincreasing.
pub fn singular_values(a: &Matrix) -> Result<Vec<f64>> {
    Ok(svd(a)?.s)
}

/// Moore–Penrose pseudoinverse (n×m). Singular values below `rcond·σ₁`
/// are treated as zero.
pub fn pseudo_inverse(a: &Matrix, rcond: f64) -> Result<Matrix> {
    let d = svd(a)?;
    let mut p = Matrix::zeros(a.cols, a.rows);
    let cutoff = rcond * d.s[0];
    for (k, &sigma) in d.s.iter().enumerate() {
        if sigma <= 0.0 || sigma < cutoff {
            continue;
        }
        for i in 0..a.cols {
            let vi = d.v.get(i, k) / sigma;
            for r in 0..a.rows {
                p.data[i * a.rows + r] += vi * d.u.get(r, k);
            }
        }
    }
    Ok(p)
}

/// Minimum-norm minimizer of ‖A·x − b‖₂, via [`pseudo_inverse`].
pub fn lstsq_min_norm(a: &Matrix, b: &[f64], rcond: f64) -> Result<Vec<f64>> {
    if b.len() != a.rows {
        return Err(Error::DimensionMismatch {
            expected: a.rows,
            actual: b.len(),
        });
    }
    Ok(pseudo_inverse(a, rcond)?.mul_vec(b))
}
