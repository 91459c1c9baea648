//! Mutual coherence of random vs designed systems against the Welch bound,
//! with both identity and DCT base matrices.
//!
//! Run with: cargo run --release --example coherence_and_welch

use ssd::bench::make_random_gaussian;
use ssd::designer::{design, DesignConfig, XiSpec};
use ssd::frame::{make_dct_base, make_identity_base, mutual_coherence_of, welch_bound};

fn main() -> ssd::Result<()> {
    let (m, n, l) = (25, 60, 80);
    let dict = make_random_gaussian(n, l, 1000)?;
    println!("Welch bound for {m}x{l}: {:.6}", welch_bound(m, l));

    let phi_random = make_random_gaussian(m, n, 5)?;
    let mu_random = mutual_coherence_of(phi_random.array().dot(dict.array()).view())?.mu;
    println!("random Gaussian phi:        mu = {mu_random:.4}");

    for (label, base, xi) in [
        ("designed, identity base  ", make_identity_base(n)?, XiSpec::Value(0.0)),
        ("designed, Welch-level xi ", make_identity_base(n)?, XiSpec::Welch),
        ("designed, DCT base       ", make_dct_base(n)?, XiSpec::Value(0.0)),
    ] {
        let mut config = DesignConfig::new(m, n, l, 20);
        config.xi = xi;
        config.lambda = 0.25;
        config.max_iters = 500;
        config.seed = 5;
        let result = design(&dict, &base, &config)?;
        let psi = base.array().dot(dict.array());
        let mu = mutual_coherence_of(result.phi.array().dot(&psi).view())?.mu;
        println!("{label}: mu = {mu:.4}");
    }
    Ok(())
}
