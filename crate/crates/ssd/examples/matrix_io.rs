//! Matrix file round-trips: lossless CSV and the SSMX binary format.
//!
//! Run with: cargo run --example matrix_io

use ssd::bench::make_random_gaussian;
use ssd::matrix::DenseMatrix;

fn main() -> ssd::Result<()> {
    let a = make_random_gaussian(4, 6, 9)?;

    let mut csv = Vec::new();
    a.write_csv(&mut csv)?;
    println!("CSV ({} bytes), first line:", csv.len());
    println!("{}", String::from_utf8_lossy(&csv).lines().next().unwrap());
    let back = DenseMatrix::read_csv(&csv[..])?;
    assert_eq!(a.array(), back.array());
    println!("CSV round-trip is bit-exact (17 significant digits)");

    let mut bin = Vec::new();
    a.write_binary(&mut bin)?;
    println!(
        "SSMX binary: {} bytes (magic + 2 x u32 dims + {} f64 entries)",
        bin.len(),
        a.rows() * a.cols()
    );
    let back = DenseMatrix::read_binary(&bin[..])?;
    assert_eq!(a.array(), back.array());
    println!("binary round-trip is bit-exact");
    Ok(())
}
