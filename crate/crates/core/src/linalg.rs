//! Minimal dense linear algebra for the classifier trainers.
//!
//! Everything here operates on row-major `Vec<f64>` buffers. Problem
//! sizes are small (covariances up to 32×32, ANFIS consequent solves up
//! to a few hundred unknowns), so plain Cholesky-based routines are all
//! that is needed.

/// Cholesky factor L (lower triangular, row-major) of a symmetric
/// positive-definite matrix. Returns `None` when a pivot is not
/// strictly positive.
pub fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i * n + j];
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if sum <= 0.0 {
                    return None;
                }
                l[i * n + j] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// Solve A x = b given the Cholesky factor L of A.
pub fn cholesky_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    // forward: L y = b
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i * n + k] * y[k];
        }
        y[i] = sum / l[i * n + i];
    }
    // backward: L^T x = y
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut sum = y[i];
        for k in (i + 1)..n {
            sum -= l[k * n + i] * x[k];
        }
        x[i] = sum / l[i * n + i];
    }
    x
}

/// log(det A) from the Cholesky factor of A.
pub fn cholesky_logdet(l: &[f64], n: usize) -> f64 {
    (0..n).map(|i| l[i * n + i].ln()).sum::<f64>() * 2.0
}

/// Sample covariance (1/n) of rows, optionally ridge-regularized by
/// `ridge * mean(diag)` added to the diagonal. Returns (mean, cov).
pub fn mean_and_covariance(rows: &[&[f64]], dim: usize, ridge: f64) -> (Vec<f64>, Vec<f64>) {
    let n = rows.len().max(1) as f64;
    let mut mean = vec![0.0; dim];
    for r in rows {
        for (m, v) in mean.iter_mut().zip(r.iter()) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= n;
    }
    let mut cov = vec![0.0; dim * dim];
    for r in rows {
        for i in 0..dim {
            let di = r[i] - mean[i];
            for j in 0..=i {
                cov[i * dim + j] += di * (r[j] - mean[j]);
            }
        }
    }
    for i in 0..dim {
        for j in 0..=i {
            let v = cov[i * dim + j] / n;
            cov[i * dim + j] = v;
            cov[j * dim + i] = v;
        }
    }
    if ridge > 0.0 {
        let tr: f64 = (0..dim).map(|i| cov[i * dim + i]).sum();
        let lambda = ridge * (tr / dim as f64).max(f64::MIN_POSITIVE);
        for i in 0..dim {
            cov[i * dim + i] += lambda;
        }
    }
    (mean, cov)
}

/// Ridge least squares: minimize ||X w - y||^2 + lambda ||w||^2 via the
/// normal equations. `x` is row-major with `cols` columns.
pub fn ridge_least_squares(x: &[f64], rows: usize, cols: usize, y: &[f64], lambda: f64) -> Vec<f64> {
    debug_assert_eq!(x.len(), rows * cols);
    debug_assert_eq!(y.len(), rows);
    let mut xtx = vec![0.0; cols * cols];
    let mut xty = vec![0.0; cols];
    for r in 0..rows {
        let row = &x[r * cols..(r + 1) * cols];
        for i in 0..cols {
            xty[i] += row[i] * y[r];
            for j in 0..=i {
                xtx[i * cols + j] += row[i] * row[j];
            }
        }
    }
    for i in 0..cols {
        for j in 0..i {
            xtx[j * cols + i] = xtx[i * cols + j];
        }
    }
    // escalate the ridge until the factorization succeeds
    let scale = (0..cols)
        .map(|i| xtx[i * cols + i])
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let mut lam = lambda.max(1e-12 * scale);
    loop {
        let mut m = xtx.clone();
        for i in 0..cols {
            m[i * cols + i] += lam;
        }
        if let Some(l) = cholesky(&m, cols) {
            return cholesky_solve(&l, cols, &xty);
        }
        lam = (lam * 10.0).max(1e-12 * scale);
        if lam > 1e6 * scale {
            // numerically hopeless design matrix: return zeros
            return vec![0.0; cols];
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}
