//! Audit a design run post-hoc: monotone objective and the per-step
//! sufficient-decrease inequality, straight from the trace.
//!
//! Run with: cargo run --release --example trace_diagnostics

use ssd::bench::make_random_gaussian;
use ssd::cli::{diagnose_trace, DiagnoseOutcome};
use ssd::designer::{design, write_trace_csv, DesignConfig, XiSpec};
use ssd::frame::make_identity_base;

fn main() -> ssd::Result<()> {
    let dict = make_random_gaussian(60, 80, 1000)?;
    let base = make_identity_base(60)?;
    let mut config = DesignConfig::new(25, 60, 80, 20);
    config.xi = XiSpec::Welch;
    config.max_iters = 400;
    config.seed = 2;
    let result = design(&dict, &base, &config)?;

    let mut csv = Vec::new();
    write_trace_csv(&result.trace, &mut csv)?;
    println!("trace: {} rows, {} bytes of CSV", result.trace.len(), csv.len());

    match diagnose_trace(&result.trace, 0.9, None) {
        DiagnoseOutcome::Pass { final_surrogate } => println!(
            "all checks pass; final stationarity surrogate {:.3e}",
            final_surrogate.unwrap_or(f64::NAN)
        ),
        other => println!("violation found: {other:?}"),
    }

    // inject a corruption and watch the audit catch it
    let mut broken = result.trace.clone();
    broken[100].f = broken[99].f + 1.0;
    match diagnose_trace(&broken, 0.9, None) {
        DiagnoseOutcome::MonotonicityViolation { iter, .. } => {
            println!("corrupted trace correctly flagged at iteration {iter}")
        }
        other => println!("unexpected outcome: {other:?}"),
    }
    Ok(())
}
