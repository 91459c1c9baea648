//! Compare CS systems (random Gaussian, binary sparse, designed) by OMP
//! recovery MSE on a synthetic ensemble.
//!
//! Run with: cargo run --release --example benchmark_systems

use ssd::bench::{
    gen_sparse_signals, make_binary_sparse, make_random_gaussian, run_benchmark,
};
use ssd::designer::{design, DesignConfig, XiSpec};
use ssd::frame::make_identity_base;
use ssd::matrix::DenseMatrix;

fn main() -> ssd::Result<()> {
    let (m, n, l, k, kappa) = (25, 60, 80, 4, 20);
    let dict = make_random_gaussian(n, l, 1000)?;
    let ensemble = gen_sparse_signals(&dict, k, 500, 15.0, 11)?;

    let mut config = DesignConfig::new(m, n, l, kappa);
    config.xi = XiSpec::Welch;
    config.lambda = 0.25;
    config.max_iters = 1000;
    config.seed = 3;
    let base = make_identity_base(n)?;
    let designed = design(&dict, &base, &config)?.phi.into_dense();

    let systems: Vec<(String, DenseMatrix)> = vec![
        ("randn".into(), make_random_gaussian(m, n, 4)?),
        ("bispar".into(), make_binary_sparse(m, n, kappa, 5)?.into_dense()),
        ("designed".into(), designed),
    ];
    let report = run_benchmark(&systems, &dict, &ensemble, k)?;
    println!("system      mse          psnr (dB)   failures");
    for row in &report.rows {
        println!(
            "{:<10}  {:>10.4e}  {:>9.2}   {}",
            row.system, row.mse, row.psnr_db, row.failures
        );
    }
    Ok(())
}
