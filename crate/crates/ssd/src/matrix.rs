//! Dense matrix carrier with finiteness checks and file round-trips.
//!
//! Two on-disk forms are supported: plain-text CSV (one row per line,
//! `{:.17e}` formatting so values survive a round-trip) and a small binary
//! format with magic bytes `SSMX`, u32 row/col counts and little-endian f64
//! entries.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};

/// Real matrix in row-major order. All entries are finite by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    data: Array2<f64>,
}

impl DenseMatrix {
    pub fn new(data: Array2<f64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::InvalidDimension(format!(
                "matrix must be non-empty, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        for ((i, j), v) in data.indexed_iter() {
            if !v.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
        Ok(Self { data })
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn array(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.data.view()
    }

    pub fn into_array(self) -> Array2<f64> {
        self.data
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        for row in self.data.rows() {
            let line: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let reader = BufReader::new(r);
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (ln, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row: std::result::Result<Vec<f64>, _> =
                line.split(',').map(|t| t.trim().parse::<f64>()).collect();
            let row = row.map_err(|e| Error::Parse(format!("line {}: {e}", ln + 1)))?;
            if let Some(first) = rows.first() {
                if row.len() != first.len() {
                    return Err(Error::Parse(format!(
                        "line {}: expected {} fields, got {}",
                        ln + 1,
                        first.len(),
                        row.len()
                    )));
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse("empty matrix file".into()));
        }
        let (nr, nc) = (rows.len(), rows[0].len());
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        let data = Array2::from_shape_vec((nr, nc), flat)
            .map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(data)
    }

    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(b"SSMX")?;
        w.write_all(&(self.rows() as u32).to_le_bytes())?;
        w.write_all(&(self.cols() as u32).to_le_bytes())?;
        for v in self.data.iter() {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != b"SSMX" {
            return Err(Error::Parse("bad magic, expected SSMX".into()));
        }
        let mut u = [0u8; 4];
        r.read_exact(&mut u)?;
        let nr = u32::from_le_bytes(u) as usize;
        r.read_exact(&mut u)?;
        let nc = u32::from_le_bytes(u) as usize;
        let mut flat = vec![0f64; nr.checked_mul(nc).ok_or_else(|| {
            Error::Parse("matrix dimensions overflow".into())
        })?];
        let mut buf = [0u8; 8];
        for v in flat.iter_mut() {
            r.read_exact(&mut buf)?;
            *v = f64::from_le_bytes(buf);
        }
        let data = Array2::from_shape_vec((nr, nc), flat)
            .map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(data)
    }

    /// Loads CSV or SSMX binary based on the file's leading bytes.
    pub fn read_path(path: &Path) -> Result<Self> {
        let mut f = File::open(path)?;
        let mut magic = [0u8; 4];
        let n = f.read(&mut magic)?;
        drop(f);
        let f = File::open(path)?;
        if n == 4 && &magic == b"SSMX" {
            Self::read_binary(BufReader::new(f))
        } else {
            Self::read_csv(f)
        }
    }

    pub fn write_csv_path(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_csv(&mut w)?;
        w.flush()?;
        Ok(())
    }
}

impl TryFrom<Array2<f64>> for DenseMatrix {
    type Error = Error;
    fn try_from(a: Array2<f64>) -> Result<Self> {
        Self::new(a)
    }
}
