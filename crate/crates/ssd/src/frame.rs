//! Base-matrix construction, mutual coherence and equivalent-Gram computation.

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::projections::SparseSensingMatrix;

/// Column norms below this count as zero for coherence purposes.
pub const ZERO_NORM_TOL: f64 = 1e-14;

/// Mutual coherence of a matrix together with its Welch lower bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceReport {
    pub mu: f64,
    pub welch: f64,
    pub row_count: usize,
    pub column_count: usize,
}

/// Welch bound sqrt((L-M)/(M(L-1))) for an M x L matrix; 0 when L <= M.
pub fn welch_bound(m: usize, l: usize) -> f64 {
    if l > m && m >= 1 {
        (((l - m) as f64) / ((m * (l - 1)) as f64)).sqrt()
    } else {
        0.0
    }
}

pub fn make_identity_base(n: usize) -> Result<DenseMatrix> {
    if n == 0 {
        return Err(Error::InvalidDimension("identity base needs n >= 1".into()));
    }
    DenseMatrix::new(Array2::eye(n))
}

/// Orthonormal type-II DCT matrix: row 0 is 1/sqrt(n), row k > 0 column j is
/// sqrt(2/n) cos(pi (2j+1) k / (2n)).
pub fn make_dct_base(n: usize) -> Result<DenseMatrix> {
    if n == 0 {
        return Err(Error::InvalidDimension("DCT base needs n >= 1".into()));
    }
    let nf = n as f64;
    let mut a = Array2::zeros((n, n));
    for j in 0..n {
        a[[0, j]] = 1.0 / nf.sqrt();
    }
    let scale = (2.0 / nf).sqrt();
    for k in 1..n {
        for j in 0..n {
            let angle = std::f64::consts::PI * (2 * j + 1) as f64 * k as f64 / (2.0 * nf);
            a[[k, j]] = scale * angle.cos();
        }
    }
    DenseMatrix::new(a)
}

pub fn mutual_coherence(q: &DenseMatrix) -> Result<CoherenceReport> {
    mutual_coherence_of(q.view())
}

pub fn mutual_coherence_of(q: ArrayView2<'_, f64>) -> Result<CoherenceReport> {
    let (m, l) = (q.nrows(), q.ncols());
    if l < 2 {
        return Err(Error::InvalidDimension(format!(
            "mutual coherence needs >= 2 columns, got {l}"
        )));
    }
    let norms: Vec<f64> = (0..l)
        .map(|j| q.column(j).iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    for (j, &n) in norms.iter().enumerate() {
        if n < ZERO_NORM_TOL {
            return Err(Error::ZeroColumn { index: j });
        }
    }
    let mut mu = 0.0f64;
    for i in 0..l {
        for j in (i + 1)..l {
            let dot = q.column(i).dot(&q.column(j));
            let c = (dot / (norms[i] * norms[j])).abs();
            if c > mu {
                mu = c;
            }
        }
    }
    // inner-product round-off can push slightly past 1
    mu = mu.min(1.0);
    Ok(CoherenceReport {
        mu,
        welch: welch_bound(m, l),
        row_count: m,
        column_count: l,
    })
}

/// The Gram of the equivalent dictionary: Psi^T Phi^T Phi Psi, symmetrized.
pub fn equivalent_gram(phi: &SparseSensingMatrix, psi: &DenseMatrix) -> Result<DenseMatrix> {
    if phi.cols() != psi.rows() {
        return Err(Error::InvalidDimension(format!(
            "phi is {}x{} but psi has {} rows",
            phi.rows(),
            phi.cols(),
            psi.rows()
        )));
    }
    let g = gram_of_product(phi.array().view(), psi.view());
    DenseMatrix::new(g)
}

/// (Phi Psi)^T (Phi Psi) with explicit (B + B^T)/2 symmetrization.
pub(crate) fn gram_of_product(phi: ArrayView2<'_, f64>, psi: ArrayView2<'_, f64>) -> Array2<f64> {
    let b = phi.dot(&psi);
    let g = b.t().dot(&b);
    symmetrize(&g)
}

pub(crate) fn symmetrize(a: &Array2<f64>) -> Array2<f64> {
    (a + &a.t()) * 0.5
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projections::project_row_sparse;
    use ndarray::array;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn randn(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((rows, cols), |_| rng.sample(StandardNormal))
    }

    #[test]
    fn identity_base_small() {
        let a = make_identity_base(1).unwrap();
        assert_eq!(a.array(), &array![[1.0]]);
        let a3 = make_identity_base(3).unwrap();
        assert_eq!(a3.array().diag().sum(), 3.0);
        assert!(make_identity_base(0).is_err());
    }

    #[test]
    fn identity_base_acts_as_identity() {
        let a = make_identity_base(8).unwrap();
        let v = randn(8, 1, 3);
        let av = a.array().dot(&v);
        assert_eq!(av, v);
    }

    #[test]
    fn dct_n1_and_n2_match_hand_evaluation() {
        let a = make_dct_base(1).unwrap();
        assert!((a.array()[[0, 0]] - 1.0).abs() < 1e-15);

        let a2 = make_dct_base(2).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let expect = array![[s, s], [s, -s]];
        for (x, y) in a2.array().iter().zip(expect.iter()) {
            assert!((x - y).abs() < 1e-15, "{x} vs {y}");
        }
        assert!(make_dct_base(0).is_err());
    }

    #[test]
    fn dct_rows_orthonormal() {
        for n in [4, 16, 64, 256] {
            let a = make_dct_base(n).unwrap();
            let aat = a.array().dot(&a.array().t());
            let eye = Array2::<f64>::eye(n);
            let err = (&aat - &eye).iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(err < 1e-10, "n={n} err={err}");
            // columns too: square orthonormal rows imply orthonormal columns
            let ata = a.array().t().dot(a.array());
            let err = (&ata - &eye).iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(err < 1e-10, "n={n} col err={err}");
        }
    }

    #[test]
    fn coherence_identity_is_zero() {
        let q = DenseMatrix::new(Array2::eye(3)).unwrap();
        let r = mutual_coherence(&q).unwrap();
        assert_eq!(r.mu, 0.0);
        assert_eq!(r.welch, 0.0); // L = M
    }

    #[test]
    fn coherence_hand_example() {
        let q = DenseMatrix::new(array![[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]]).unwrap();
        let r = mutual_coherence(&q).unwrap();
        assert!((r.mu - 1.0 / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn welch_bound_25_80() {
        let w = welch_bound(25, 80);
        assert!((w - (55.0f64 / 1975.0).sqrt()).abs() < 1e-12);
        assert!((w - 0.166878).abs() < 1e-6);
        let q = DenseMatrix::new(randn(25, 80, 7)).unwrap();
        let r = mutual_coherence(&q).unwrap();
        assert_eq!(r.welch, w);
        assert!(r.mu >= r.welch - 1e-12);
    }

    #[test]
    fn coherence_zero_column_error_names_index() {
        let q = DenseMatrix::new(array![[1.0, 0.0], [0.0, 0.0]]).unwrap();
        match mutual_coherence(&q) {
            Err(Error::ZeroColumn { index: 1 }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn coherence_single_column_rejected() {
        let q = DenseMatrix::new(array![[1.0], [2.0]]).unwrap();
        assert!(matches!(
            mutual_coherence(&q),
            Err(Error::InvalidDimension(_))
        ));
    }

    #[test]
    fn coherence_scale_invariant() {
        let mut a = randn(6, 9, 11);
        let base = mutual_coherence_of(a.view()).unwrap().mu;
        for (j, s) in [(0usize, 3.5), (4, -0.02), (8, 1e6)] {
            a.column_mut(j).mapv_inplace(|v| v * s);
        }
        let scaled = mutual_coherence_of(a.view()).unwrap().mu;
        assert!((base - scaled).abs() < 1e-12);
    }

    #[test]
    fn gram_zero_and_identity_cases() {
        let psi = DenseMatrix::new(Array2::eye(4)).unwrap();
        let phi = SparseSensingMatrix::new(Array2::zeros((3, 4)), 4).unwrap();
        let g = equivalent_gram(&phi, &psi).unwrap();
        assert!(g.array().iter().all(|&v| v == 0.0));

        let phi_i = SparseSensingMatrix::new(Array2::eye(4), 4).unwrap();
        let g = equivalent_gram(&phi_i, &psi).unwrap();
        assert_eq!(g.array(), &Array2::<f64>::eye(4));
    }

    #[test]
    fn gram_matches_naive_triple_product() {
        let phi = project_row_sparse(
            &DenseMatrix::new(randn(3, 4, 21)).unwrap(),
            4,
        )
        .unwrap();
        let psi = DenseMatrix::new(randn(4, 5, 22)).unwrap();
        let g = equivalent_gram(&phi, &psi).unwrap();

        // naive O(n^4) oracle over the triple product
        let p = phi.array();
        let s = psi.array();
        let (l, n, m) = (5, 4, 3);
        let mut oracle = Array2::<f64>::zeros((l, l));
        for a in 0..l {
            for b in 0..l {
                let mut acc = 0.0;
                for r in 0..m {
                    let mut ra = 0.0;
                    let mut rb = 0.0;
                    for c in 0..n {
                        ra += p[[r, c]] * s[[c, a]];
                        rb += p[[r, c]] * s[[c, b]];
                    }
                    acc += ra * rb;
                }
                oracle[[a, b]] = acc;
            }
        }
        for (x, y) in g.array().iter().zip(oracle.iter()) {
            assert!((x - y).abs() < 1e-10 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn gram_is_symmetric_and_psd() {
        let phi = project_row_sparse(&DenseMatrix::new(randn(5, 8, 31)).unwrap(), 3).unwrap();
        let psi = DenseMatrix::new(randn(8, 10, 32)).unwrap();
        let g = equivalent_gram(&phi, &psi).unwrap();
        let ga = g.array();
        for i in 0..10 {
            for j in 0..10 {
                assert_eq!(ga[[i, j]], ga[[j, i]]);
            }
        }
        for seed in 0..20u64 {
            let v = randn(10, 1, 100 + seed);
            let q = v.t().dot(ga).dot(&v)[[0, 0]];
            assert!(q >= -1e-10, "v^T G v = {q}");
        }
    }

    #[test]
    fn gram_dimension_mismatch() {
        let phi = SparseSensingMatrix::new(Array2::zeros((3, 4)), 4).unwrap();
        let psi = DenseMatrix::new(Array2::eye(5)).unwrap();
        assert!(matches!(
            equivalent_gram(&phi, &psi),
            Err(Error::InvalidDimension(_))
        ));
    }
}
