//! Orthogonal matching pursuit over an equivalent dictionary D = Phi Psi.
//!
//! Selection correlates the residual against norm-normalized columns: the
//! equivalent dictionary has non-uniform column norms by construction, and
//! coherence (which normalizes) is the quantity the recovery theory speaks
//! about, so the unnormalized inner product would bias selection toward
//! long columns.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis, s};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Output of one OMP run: a length-L coefficient vector supported on the
/// selected columns, in selection order.
#[derive(Debug, Clone)]
pub struct RecoveryResult {
    pub coefficients: Array1<f64>,
    pub support: Vec<usize>,
    pub residual_norm: f64,
    pub iterations: usize,
}

fn norm(v: ArrayView1<'_, f64>) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Least squares min ||a x - b||_2 by Householder QR; on (numerically)
/// rank-deficient systems falls back to the minimum-norm solution via a
/// Jacobi eigendecomposition of a^T a.
pub(crate) fn lstsq(a: ArrayView2<'_, f64>, b: ArrayView1<'_, f64>) -> Array1<f64> {
    let (m, n) = (a.nrows(), a.ncols());
    debug_assert!(m >= n);
    let mut r = a.to_owned();
    let mut qtb = b.to_owned();
    // Householder triangularization, applying each reflector to b as well
    for k in 0..n {
        let col = r.slice(s![k.., k]).to_owned();
        let alpha = norm(col.view());
        if alpha == 0.0 {
            continue;
        }
        let mut v = col;
        let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
        v[0] += sign * alpha;
        let vnorm_sq: f64 = v.iter().map(|x| x * x).sum();
        if vnorm_sq == 0.0 {
            continue;
        }
        for j in k..n {
            let dot: f64 = v
                .iter()
                .zip(r.slice(s![k.., j]).iter())
                .map(|(vi, ri)| vi * ri)
                .sum();
            let scale = 2.0 * dot / vnorm_sq;
            for (i, vi) in v.iter().enumerate() {
                r[[k + i, j]] -= scale * vi;
            }
        }
        let dot: f64 = v
            .iter()
            .zip(qtb.slice(s![k..]).iter())
            .map(|(vi, bi)| vi * bi)
            .sum();
        let scale = 2.0 * dot / vnorm_sq;
        for (i, vi) in v.iter().enumerate() {
            qtb[k + i] -= scale * vi;
        }
    }
    // detect rank deficiency from the triangular diagonal
    let max_diag = (0..n).map(|i| r[[i, i]].abs()).fold(0.0f64, f64::max);
    let tol = max_diag * (m.max(n) as f64) * f64::EPSILON;
    if (0..n).any(|i| r[[i, i]].abs() <= tol) {
        return min_norm_lstsq(a, b);
    }
    let mut x = Array1::zeros(n);
    for i in (0..n).rev() {
        let mut s = qtb[i];
        for j in i + 1..n {
            s -= r[[i, j]] * x[j];
        }
        x[i] = s / r[[i, i]];
    }
    x
}

/// Minimum-norm least squares via pseudo-inversion of a^T a (cyclic Jacobi
/// eigendecomposition; fine at OMP support sizes).
fn min_norm_lstsq(a: ArrayView2<'_, f64>, b: ArrayView1<'_, f64>) -> Array1<f64> {
    let n = a.ncols();
    let ata = a.t().dot(&a);
    let atb = a.t().dot(&b);
    let (mut d, mut v) = (ata.clone(), Array2::<f64>::eye(n));
    for _sweep in 0..100 {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += d[[p, q]] * d[[p, q]];
            }
        }
        if off.sqrt() <= 1e-30 * (1.0 + d.diag().iter().map(|x| x.abs()).fold(0.0, f64::max)) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if d[[p, q]] == 0.0 {
                    continue;
                }
                let theta = 0.5 * (d[[q, q]] - d[[p, p]]) / d[[p, q]];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (dkp, dkq) = (d[[k, p]], d[[k, q]]);
                    d[[k, p]] = c * dkp - s * dkq;
                    d[[k, q]] = s * dkp + c * dkq;
                }
                for k in 0..n {
                    let (dpk, dqk) = (d[[p, k]], d[[q, k]]);
                    d[[p, k]] = c * dpk - s * dqk;
                    d[[q, k]] = s * dpk + c * dqk;
                    let (vkp, vkq) = (v[[k, p]], v[[k, q]]);
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    let eig_max = d.diag().iter().map(|x| x.abs()).fold(0.0f64, f64::max);
    let cutoff = eig_max * (n as f64) * f64::EPSILON;
    let mut x = Array1::zeros(n);
    for k in 0..n {
        let lam = d[[k, k]];
        if lam.abs() <= cutoff {
            continue;
        }
        let coeff = v.column(k).dot(&atb) / lam;
        x.scaled_add(coeff, &v.column(k));
    }
    x
}

/// OMP with norm-normalized correlation selection and exact least squares on
/// the growing support. Runs at most `k` iterations, stopping early when the
/// residual norm drops below `tol` (`None` -> 1e-10 ||y||). Ties in
/// correlation break toward the lowest column index; zero-norm columns are
/// never selectable.
pub fn omp(
    y: ArrayView1<'_, f64>,
    d: &DenseMatrix,
    k: usize,
    tol: Option<f64>,
) -> Result<RecoveryResult> {
    let (m, l) = (d.rows(), d.cols());
    if y.len() != m {
        return Err(Error::InvalidDimension(format!(
            "y has length {} but dictionary has {} rows",
            y.len(),
            m
        )));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("sparsity k must be >= 1".into()));
    }
    if k > m {
        return Err(Error::InvalidParameter(format!(
            "sparsity k = {k} exceeds measurement count {m}"
        )));
    }
    let col_norms: Vec<f64> = d
        .array()
        .axis_iter(Axis(1))
        .map(|c| norm(c))
        .collect();
    if col_norms.iter().all(|&n| n == 0.0) {
        return Err(Error::DegenerateDictionary);
    }
    let tol = tol.unwrap_or(1e-10 * norm(y));

    let mut support: Vec<usize> = Vec::with_capacity(k);
    let mut residual = y.to_owned();
    let mut residual_norm = norm(residual.view());
    let mut coef_on_support = Array1::zeros(0);
    let mut iterations = 0;

    while iterations < k && residual_norm >= tol {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..l {
            if col_norms[j] == 0.0 || support.contains(&j) {
                continue;
            }
            let corr = (d.array().column(j).dot(&residual) / col_norms[j]).abs();
            // strict > keeps the lowest index on ties
            if best.map_or(true, |(_, b)| corr > b) {
                best = Some((j, corr));
            }
        }
        let (j, _) = match best {
            Some(b) => b,
            None => break, // support exhausted every usable column
        };
        support.push(j);
        let sub = select_columns(d.array().view(), &support);
        coef_on_support = lstsq(sub.view(), y);
        residual = y.to_owned() - sub.dot(&coef_on_support);
        residual_norm = norm(residual.view());
        iterations += 1;
    }

    let mut coefficients = Array1::zeros(l);
    for (idx, &j) in support.iter().enumerate() {
        coefficients[j] = coef_on_support[idx];
    }
    Ok(RecoveryResult {
        coefficients,
        support,
        residual_norm,
        iterations,
    })
}

fn select_columns(a: ArrayView2<'_, f64>, cols: &[usize]) -> Array2<f64> {
    let mut out = Array2::zeros((a.nrows(), cols.len()));
    for (k, &j) in cols.iter().enumerate() {
        out.column_mut(k).assign(&a.column(j));
    }
    out
}
