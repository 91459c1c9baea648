//! Sweep recovery MSE across SNR levels for several CS systems and print a
//! plot-ready table.
//!
//! Run with: cargo run --release --example sweep_snr

use ssd::bench::{make_random_gaussian, sweep, BenchConfig, SweepAxis, SystemKind};

fn main() -> ssd::Result<()> {
    let mut config = BenchConfig::default_desk();
    config.j = 500;
    config.design_iters = 500;
    config.systems = vec![SystemKind::Randn, SystemKind::Bispar, SystemKind::Sparse];
    let dict = make_random_gaussian(config.n, config.l, 1000)?;

    let snrs = [10.0, 15.0, 20.0, 25.0, 30.0];
    let report = sweep(&dict, &config, SweepAxis::Snr, &snrs)?;
    println!("support sampler: {}", report.support_sampler);
    println!("{:<10} {:>8} {:>12} {:>10}", "system", "snr", "mse", "psnr");
    for row in &report.rows {
        println!(
            "{:<10} {:>8.1} {:>12.4e} {:>10.2}",
            row.system, row.axis_value, row.mse, row.psnr_db
        );
    }
    Ok(())
}
