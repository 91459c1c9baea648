//! The two projection operators of the alternating scheme: onto the relaxed
//! ETF Gram set and onto row-sparse matrices.

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::frame::symmetrize;
use crate::matrix::DenseMatrix;

/// Slack allowed on the off-diagonal bound when validating a Gram matrix.
pub const GRAM_TOL: f64 = 1e-12;

/// Symmetric L x L matrix with unit diagonal and off-diagonal magnitudes
/// capped at xi. Built by [`project_gram`]; the invariants hold exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetGram {
    entries: Array2<f64>,
    xi: f64,
}

impl TargetGram {
    pub fn new(entries: Array2<f64>, xi: f64) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::InvalidDimension(format!(
                "Gram must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        for i in 0..entries.nrows() {
            if entries[[i, i]] != 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "diagonal entry ({i},{i}) is {}, expected 1",
                    entries[[i, i]]
                )));
            }
            for j in 0..entries.ncols() {
                if entries[[i, j]] != entries[[j, i]] {
                    return Err(Error::InvalidParameter(format!(
                        "asymmetry at ({i},{j})"
                    )));
                }
                if i != j && entries[[i, j]].abs() > xi + GRAM_TOL {
                    return Err(Error::InvalidParameter(format!(
                        "off-diagonal ({i},{j}) = {} exceeds xi = {xi}",
                        entries[[i, j]]
                    )));
                }
            }
        }
        Ok(Self { entries, xi })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn array(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn into_dense(self) -> DenseMatrix {
        DenseMatrix::new(self.entries).expect("entries validated at construction")
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: Array2::eye(dim),
            xi: 0.0,
        }
    }

    /// Membership test used by the extended objective.
    pub fn is_member(g: ArrayView2<'_, f64>, xi: f64) -> bool {
        if g.nrows() != g.ncols() {
            return false;
        }
        for i in 0..g.nrows() {
            if g[[i, i]] != 1.0 {
                return false;
            }
            for j in 0..g.ncols() {
                if g[[i, j]] != g[[j, i]] {
                    return false;
                }
                if i != j && g[[i, j]].abs() > xi + GRAM_TOL {
                    return false;
                }
            }
        }
        true
    }
}

/// M x N matrix with at most kappa non-zeros per row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSensingMatrix {
    entries: Array2<f64>,
    kappa: usize,
}

impl SparseSensingMatrix {
    pub fn new(entries: Array2<f64>, kappa: usize) -> Result<Self> {
        if kappa == 0 || kappa > entries.ncols() {
            return Err(Error::InvalidParameter(format!(
                "kappa = {kappa} outside 1..={}",
                entries.ncols()
            )));
        }
        for (i, row) in entries.rows().into_iter().enumerate() {
            let nnz = row.iter().filter(|v| **v != 0.0).count();
            if nnz > kappa {
                return Err(Error::InvalidParameter(format!(
                    "row {i} has {nnz} non-zeros, budget is {kappa}"
                )));
            }
        }
        Ok(Self { entries, kappa })
    }

    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn array(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn into_dense(self) -> DenseMatrix {
        DenseMatrix::new(self.entries).expect("entries validated at construction")
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::new(self.entries.clone()).expect("entries validated at construction")
    }

    pub fn is_member(z: ArrayView2<'_, f64>, kappa: usize) -> bool {
        z.rows()
            .into_iter()
            .all(|row| row.iter().filter(|v| **v != 0.0).count() <= kappa)
    }
}

/// Projects a square matrix onto the relaxed-ETF Gram set: symmetrize, set
/// the diagonal to 1, clip each off-diagonal to magnitude xi keeping its sign.
pub fn project_gram(g_in: &DenseMatrix, xi: f64) -> Result<TargetGram> {
    if g_in.rows() != g_in.cols() {
        return Err(Error::InvalidDimension(format!(
            "Gram projection needs a square input, got {}x{}",
            g_in.rows(),
            g_in.cols()
        )));
    }
    if !(0.0..1.0).contains(&xi) {
        return Err(Error::InvalidParameter(format!("xi = {xi} outside [0,1)")));
    }
    Ok(project_gram_raw(g_in.view(), xi))
}

pub(crate) fn project_gram_raw(g_in: ArrayView2<'_, f64>, xi: f64) -> TargetGram {
    let mut g = symmetrize(&g_in.to_owned());
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            if i == j {
                g[[i, j]] = 1.0;
            } else {
                let v = g[[i, j]];
                g[[i, j]] = v.signum() * v.abs().min(xi);
                if g[[i, j]] == 0.0 {
                    g[[i, j]] = 0.0; // normalize -0.0 from signum
                }
            }
        }
    }
    TargetGram { entries: g, xi }
}

/// Euclidean projection onto the row-kappa-sparse set: per row keep the kappa
/// largest-magnitude entries, zero the rest. Ties keep the lowest column
/// index.
pub fn project_row_sparse(z: &DenseMatrix, kappa: usize) -> Result<SparseSensingMatrix> {
    if kappa == 0 || kappa > z.cols() {
        return Err(Error::InvalidParameter(format!(
            "kappa = {kappa} outside 1..={}",
            z.cols()
        )));
    }
    Ok(project_row_sparse_raw(z.view(), kappa))
}

pub(crate) fn project_row_sparse_raw(z: ArrayView2<'_, f64>, kappa: usize) -> SparseSensingMatrix {
    let mut out = Array2::zeros(z.raw_dim());
    let mut idx: Vec<usize> = Vec::with_capacity(z.ncols());
    for (i, row) in z.rows().into_iter().enumerate() {
        idx.clear();
        idx.extend(0..row.len());
        // stable sort by descending magnitude preserves column order on ties
        idx.sort_by(|&a, &b| {
            row[b]
                .abs()
                .partial_cmp(&row[a].abs())
                .expect("entries are finite")
        });
        for &j in idx.iter().take(kappa) {
            out[[i, j]] = row[j];
        }
    }
    SparseSensingMatrix {
        entries: out,
        kappa,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;
    use rand::{Rng as _, SeedableRng as _};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn randn(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((rows, cols), |_| rng.sample(StandardNormal))
    }

    #[test]
    fn gram_projection_clips_and_resets_diagonal() {
        let g = DenseMatrix::new(array![[2.0, 0.5], [0.5, 2.0]]).unwrap();
        let p = project_gram(&g, 0.2).unwrap();
        assert_eq!(p.array(), &array![[1.0, 0.2], [0.2, 1.0]]);

        let g = DenseMatrix::new(array![[1.0, -0.5], [-0.5, 1.0]]).unwrap();
        let p = project_gram(&g, 0.2).unwrap();
        assert_eq!(p.array(), &array![[1.0, -0.2], [-0.2, 1.0]]);
    }

    #[test]
    fn gram_projection_xi_zero_is_identity() {
        let g = DenseMatrix::new(randn(3, 3, 5)).unwrap();
        let p = project_gram(&g, 0.0).unwrap();
        assert_eq!(p.array(), &Array2::<f64>::eye(3));
    }

    #[test]
    fn gram_projection_rejects_bad_inputs() {
        let g = DenseMatrix::new(randn(3, 4, 6)).unwrap();
        assert!(matches!(
            project_gram(&g, 0.2),
            Err(Error::InvalidDimension(_))
        ));
        let g = DenseMatrix::new(randn(3, 3, 6)).unwrap();
        assert!(project_gram(&g, 1.0).is_err());
        assert!(project_gram(&g, -0.1).is_err());
    }

    #[test]
    fn gram_projection_idempotent() {
        let g = DenseMatrix::new(randn(6, 6, 9)).unwrap();
        let p1 = project_gram(&g, 0.3).unwrap();
        let p2 = project_gram(&p1.clone().into_dense(), 0.3).unwrap();
        assert_eq!(p1.array(), p2.array());
    }

    #[test]
    fn gram_projection_nonexpansive_on_symmetric_inputs() {
        for seed in 0..10u64 {
            let x = {
                let a = randn(5, 5, seed);
                (&a + &a.t()) * 0.5
            };
            let y = {
                let a = randn(5, 5, 1000 + seed);
                (&a + &a.t()) * 0.5
            };
            let px = project_gram_raw(x.view(), 0.25);
            let py = project_gram_raw(y.view(), 0.25);
            let d_in = (&x - &y).iter().map(|v| v * v).sum::<f64>().sqrt();
            let d_out = (px.array() - py.array())
                .iter()
                .map(|v| v * v)
                .sum::<f64>()
                .sqrt();
            assert!(d_out <= d_in + 1e-12, "{d_out} > {d_in}");
        }
    }

    #[test]
    fn row_sparse_keeps_largest_magnitudes() {
        let z = DenseMatrix::new(array![[3.0, -1.0, 2.0], [0.0, 5.0, -4.0]]).unwrap();
        let p = project_row_sparse(&z, 2).unwrap();
        assert_eq!(p.array(), &array![[3.0, 0.0, 2.0], [0.0, 5.0, -4.0]]);
    }

    #[test]
    fn row_sparse_tie_breaks_toward_low_index() {
        let z = DenseMatrix::new(array![[1.0, 1.0, 1.0]]).unwrap();
        let p = project_row_sparse(&z, 2).unwrap();
        assert_eq!(p.array(), &array![[1.0, 1.0, 0.0]]);
    }

    #[test]
    fn row_sparse_rejects_bad_kappa() {
        let z = DenseMatrix::new(randn(2, 3, 1)).unwrap();
        assert!(project_row_sparse(&z, 0).is_err());
        assert!(project_row_sparse(&z, 4).is_err());
    }

    #[test]
    fn row_sparse_idempotent() {
        let z = DenseMatrix::new(randn(4, 7, 2)).unwrap();
        let p1 = project_row_sparse(&z, 3).unwrap();
        let p2 = project_row_sparse(&p1.to_dense(), 3).unwrap();
        assert_eq!(p1.array(), p2.array());
    }

    /// Brute-force distance over all per-row support choices.
    fn brute_force_distance(z: &Array2<f64>, kappa: usize) -> f64 {
        fn supports(n: usize, k: usize) -> Vec<Vec<usize>> {
            let mut out = Vec::new();
            let mut cur = Vec::new();
            fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
                if cur.len() == k {
                    out.push(cur.clone());
                    return;
                }
                for i in start..n {
                    cur.push(i);
                    rec(i + 1, n, k, cur, out);
                    cur.pop();
                }
            }
            rec(0, n, k, &mut cur, &mut out);
            out
        }
        let mut total = 0.0;
        for row in z.rows() {
            let mut best = f64::INFINITY;
            for sup in supports(row.len(), kappa) {
                let d: f64 = row
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| !sup.contains(j))
                    .map(|(_, v)| v * v)
                    .sum();
                if d < best {
                    best = d;
                }
            }
            total += best;
        }
        total.sqrt()
    }

    #[test]
    fn row_sparse_matches_brute_force_distance() {
        let z = randn(2, 6, 77);
        let p = project_row_sparse_raw(z.view(), 3);
        let d = (&z - p.array()).iter().map(|v| v * v).sum::<f64>().sqrt();
        let best = brute_force_distance(&z, 3);
        assert!((d - best).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn row_sparse_output_in_budget(seed in 0u64..500, kappa in 1usize..5, cols in 5usize..9) {
            let z = randn(3, cols, seed);
            let kappa = kappa.min(cols);
            let p = project_row_sparse_raw(z.view(), kappa);
            prop_assert!(SparseSensingMatrix::is_member(p.array().view(), kappa));
            // optimality against brute force at small sizes
            let d = (&z - p.array()).iter().map(|v| v * v).sum::<f64>().sqrt();
            let best = brute_force_distance(&z, kappa);
            prop_assert!(d <= best + 1e-12);
        }
    }
}
