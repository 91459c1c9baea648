//! Sparse recovery with orthogonal matching pursuit: build a sensing system,
//! compress a synthetic sparse signal, and recover it.
//!
//! Run with: cargo run --release --example omp_recovery

use ssd::bench::{gen_sparse_signals, make_random_gaussian};
use ssd::matrix::DenseMatrix;
use ssd::recovery::omp;

fn main() -> ssd::Result<()> {
    let (m, n, l, k) = (25, 60, 80, 4);
    let psi = make_random_gaussian(n, l, 1)?;
    let phi = make_random_gaussian(m, n, 2)?;
    let equivalent = DenseMatrix::new(phi.array().dot(psi.array()))?;

    let ensemble = gen_sparse_signals(&psi, k, 5, f64::INFINITY, 3)?;
    for i in 0..5 {
        let x = ensemble.signals.array().column(i);
        let y = phi.array().dot(&x);
        let result = omp(y.view(), &equivalent, k, None)?;
        let x_hat = psi.array().dot(&result.coefficients);
        let err: f64 = x
            .iter()
            .zip(x_hat.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let true_support: Vec<usize> = ensemble
            .codes
            .array()
            .column(i)
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(j, _)| j)
            .collect();
        let mut found = result.support.clone();
        found.sort_unstable();
        println!(
            "signal {i}: true support {:?}, found {:?}, residual {:.2e}, reconstruction error {:.2e}",
            true_support, found, result.residual_norm, err
        );
    }
    Ok(())
}
