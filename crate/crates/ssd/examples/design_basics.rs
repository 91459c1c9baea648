//! Design a row-sparse sensing matrix for a random Gaussian dictionary and
//! inspect the convergence trace.
//!
//! Run with: cargo run --release --example design_basics

use ssd::bench::make_random_gaussian;
use ssd::designer::{design, DesignConfig, XiSpec};
use ssd::frame::{make_identity_base, mutual_coherence_of};

fn main() -> ssd::Result<()> {
    let (m, n, l) = (25, 60, 80);
    let dict = make_random_gaussian(n, l, 1000)?;
    let base = make_identity_base(n)?;

    let mut config = DesignConfig::new(m, n, l, 20);
    config.xi = XiSpec::Welch;
    config.lambda = 0.25;
    config.max_iters = 300;
    config.seed = 7;

    let result = design(&dict, &base, &config)?;
    println!(
        "terminated after {} iterations ({:?}), xi resolved to {:.6}",
        result.trace.len(),
        result.termination_reason,
        result.xi_resolved
    );
    for r in result.trace.iter().step_by(50) {
        println!(
            "iter {:>4}  f {:>12.4e}  d_phi {:>10.3e}  d_g {:>10.3e}  eta {:>9.3e}  halvings {}",
            r.iter, r.f, r.d_phi, r.d_g, r.eta, r.halvings
        );
    }

    let d = result.phi.array().dot(dict.array());
    let report = mutual_coherence_of(d.view())?;
    println!(
        "equivalent dictionary: mu = {:.4}, Welch bound = {:.4}",
        report.mu, report.welch
    );
    let nonzeros = result.phi.array().iter().filter(|v| **v != 0.0).count();
    println!(
        "phi: {}x{} with {} non-zeros (<= {} per row)",
        m,
        n,
        nonzeros,
        result.phi.kappa()
    );
    Ok(())
}
