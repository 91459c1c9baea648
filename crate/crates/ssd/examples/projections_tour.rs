//! The two projectors that shape the design problem: row-sparse hard
//! thresholding and the relaxed-ETF Gram projection.
//!
//! Run with: cargo run --example projections_tour

use ndarray::array;
use ssd::matrix::DenseMatrix;
use ssd::projections::{project_gram, project_row_sparse};

fn main() -> ssd::Result<()> {
    let z = DenseMatrix::new(array![
        [3.0, -1.0, 0.5, 2.0],
        [0.1, 0.2, -0.3, 0.05],
    ])?;
    let sparse = project_row_sparse(&z, 2)?;
    println!("row-sparse projection (kappa = 2), keeps the 2 largest magnitudes per row:");
    println!("{:6.2}", sparse.array());

    let g = DenseMatrix::new(array![
        [0.9, 0.8, -0.6],
        [0.8, 1.2, 0.1],
        [-0.6, 0.1, 1.0],
    ])?;
    let projected = project_gram(&g, 0.3)?;
    println!("gram projection (xi = 0.3): unit diagonal, off-diagonals clipped to |g| <= 0.3:");
    println!("{:6.2}", projected.array());

    // xi = 0 collapses the feasible Gram set to the identity
    let identity = project_gram(&g, 0.0)?;
    println!("gram projection (xi = 0) is always the identity:");
    println!("{:6.2}", identity.array());
    Ok(())
}
