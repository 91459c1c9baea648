//! Synthetic benchmark harness: sparse-signal ensembles, baseline sensing
//! matrices, MSE / PSNR scoring, and sweeps over SNR, dimensions, and
//! sparsity levels.
//!
//! Support indices are drawn uniformly without replacement; the sampler name
//! is recorded on every report so downstream consumers see the convention.

use std::io::Write;
use std::str::FromStr;

use ndarray::Array2;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::designer::{design, seeded_randn, DesignConfig, StepRule, XiSpec};
use crate::error::{Error, Result};
use crate::frame::{make_dct_base, make_identity_base};
use crate::matrix::DenseMatrix;
use crate::projections::SparseSensingMatrix;
use crate::recovery::omp;

pub const SUPPORT_SAMPLER: &str = "uniform-without-replacement";

/// N x J noisy signals X = Psi S + E together with the true codes S.
/// One sigma serves the whole ensemble, chosen from the mean per-entry
/// clean-signal energy so that 10 log10(energy / sigma^2) = snr_db.
#[derive(Debug, Clone)]
pub struct SignalEnsemble {
    pub signals: DenseMatrix,
    pub codes: DenseMatrix,
    pub sigma: f64,
    pub snr_db: f64,
    pub k: usize,
    pub seed: u64,
}

/// Draws `k` distinct indices from 0..l by partial Fisher-Yates.
fn draw_support(rng: &mut ChaCha8Rng, l: usize, k: usize, scratch: &mut Vec<usize>) -> Vec<usize> {
    scratch.clear();
    scratch.extend(0..l);
    for i in 0..k {
        let j = rng.gen_range(i..l);
        scratch.swap(i, j);
    }
    scratch[..k].to_vec()
}

pub fn gen_sparse_signals(
    psi: &DenseMatrix,
    k: usize,
    j: usize,
    snr_db: f64,
    seed: u64,
) -> Result<SignalEnsemble> {
    let (n, l) = (psi.rows(), psi.cols());
    if k == 0 || k > l {
        return Err(Error::InvalidParameter(format!(
            "signal sparsity k = {k} outside 1..={l}"
        )));
    }
    if j == 0 {
        return Err(Error::InvalidParameter("signal count j must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut codes = Array2::zeros((l, j));
    let mut scratch = Vec::with_capacity(l);
    for col in 0..j {
        for idx in draw_support(&mut rng, l, k, &mut scratch) {
            codes[[idx, col]] = rng.sample::<f64, _>(StandardNormal);
        }
    }
    let clean = psi.array().dot(&codes);
    let sigma = if snr_db.is_infinite() && snr_db > 0.0 {
        0.0
    } else {
        let energy = clean.iter().map(|v| v * v).sum::<f64>() / (n * j) as f64;
        (energy / 10f64.powf(snr_db / 10.0)).sqrt()
    };
    let signals = if sigma == 0.0 {
        clean
    } else {
        let noise = Array2::from_shape_fn((n, j), |_| rng.sample::<f64, _>(StandardNormal) * sigma);
        clean + noise
    };
    Ok(SignalEnsemble {
        signals: DenseMatrix::new(signals)?,
        codes: DenseMatrix::new(codes)?,
        sigma,
        snr_db,
        k,
        seed,
    })
}

pub fn make_random_gaussian(m: usize, n: usize, seed: u64) -> Result<DenseMatrix> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidDimension(format!(
            "random matrix dimensions {m}x{n} must be positive"
        )));
    }
    DenseMatrix::new(seeded_randn(m, n, seed))
}

/// Binary baseline: each row gets exactly `kappa` ones at uniformly random
/// distinct positions.
pub fn make_binary_sparse(
    m: usize,
    n: usize,
    kappa: usize,
    seed: u64,
) -> Result<SparseSensingMatrix> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidDimension(format!(
            "binary matrix dimensions {m}x{n} must be positive"
        )));
    }
    if kappa == 0 || kappa > n {
        return Err(Error::InvalidParameter(format!(
            "kappa = {kappa} outside 1..={n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scratch = Vec::with_capacity(n);
    let mut out = Array2::zeros((m, n));
    for row in 0..m {
        for idx in draw_support(&mut rng, n, kappa, &mut scratch) {
            out[[row, idx]] = 1.0;
        }
    }
    SparseSensingMatrix::new(out, kappa)
}

pub fn mse(x: &DenseMatrix, x_hat: &DenseMatrix) -> Result<f64> {
    if x.rows() != x_hat.rows() || x.cols() != x_hat.cols() {
        return Err(Error::InvalidDimension(format!(
            "mse shapes differ: {}x{} vs {}x{}",
            x.rows(),
            x.cols(),
            x_hat.rows(),
            x_hat.cols()
        )));
    }
    let total: f64 = x
        .array()
        .iter()
        .zip(x_hat.array().iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(total / (x.rows() * x.cols()) as f64)
}

/// 10 log10((2^r - 1)^2 / mse); mse <= 0 means perfect reconstruction and
/// maps to the infinite sentinel rather than an error.
pub fn psnr(mse_value: f64, r: u32) -> f64 {
    if mse_value <= 0.0 {
        return f64::INFINITY;
    }
    let peak = (2f64.powi(r as i32) - 1.0).powi(2);
    10.0 * (peak / mse_value).log10()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub system: String,
    pub axis: String,
    pub axis_value: f64,
    pub mse: f64,
    pub psnr_db: f64,
    pub failures: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub support_sampler: String,
}

impl ExperimentReport {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "system,axis,axis_value,mse,psnr_db,failures,seed")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{:.17e},{:.17e},{:.17e},{},{}",
                r.system, r.axis, r.axis_value, r.mse, r.psnr_db, r.failures, r.seed
            )?;
        }
        Ok(())
    }

    /// Rows for one system, in input order.
    pub fn system_rows(&self, system: &str) -> Vec<&ReportRow> {
        self.rows.iter().filter(|r| r.system == system).collect()
    }
}

/// Per-system benchmark: sense Y = Phi X, recover each column by OMP on the
/// equivalent dictionary Phi Psi, reconstruct x_hat = Psi s_hat, and score.
/// Recovery failures count the zero reconstruction and are tallied, never
/// fatal. Per-column errors are reduced sequentially in column order, so
/// results are byte-identical at any parallelism degree.
pub fn run_benchmark(
    systems: &[(String, DenseMatrix)],
    psi: &DenseMatrix,
    ensemble: &SignalEnsemble,
    k: usize,
) -> Result<ExperimentReport> {
    let (n, j) = (ensemble.signals.rows(), ensemble.signals.cols());
    if psi.rows() != n {
        return Err(Error::InvalidDimension(format!(
            "psi has {} rows but signals have {}",
            psi.rows(),
            n
        )));
    }
    let mut rows = Vec::with_capacity(systems.len());
    for (name, phi) in systems {
        if phi.cols() != n {
            return Err(Error::InvalidDimension(format!(
                "system {name} has {} cols but signals have {} rows",
                phi.cols(),
                n
            )));
        }
        let d = DenseMatrix::new(phi.array().dot(psi.array()))?;
        let y_all = phi.array().dot(ensemble.signals.array());
        let cells: Vec<(f64, bool)> = (0..j)
            .into_par_iter()
            .map(|col| {
                let y = y_all.column(col);
                match omp(y, &d, k, None) {
                    Ok(rec) => {
                        let x_hat = psi.array().dot(&rec.coefficients);
                        let err: f64 = ensemble
                            .signals
                            .array()
                            .column(col)
                            .iter()
                            .zip(x_hat.iter())
                            .map(|(a, b)| (a - b) * (a - b))
                            .sum();
                        (err, false)
                    }
                    Err(_) => {
                        let err: f64 = ensemble
                            .signals
                            .array()
                            .column(col)
                            .iter()
                            .map(|v| v * v)
                            .sum();
                        (err, true)
                    }
                }
            })
            .collect();
        let mut total = 0.0;
        let mut failures = 0usize;
        for (err, failed) in cells {
            total += err;
            failures += failed as usize;
        }
        let mse_val = total / (n * j) as f64;
        rows.push(ReportRow {
            system: name.clone(),
            axis: "none".into(),
            axis_value: 0.0,
            mse: mse_val,
            psnr_db: psnr(mse_val, 8),
            failures,
            seed: ensemble.seed,
        });
    }
    Ok(ExperimentReport {
        rows,
        support_sampler: SUPPORT_SAMPLER.into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    /// i.i.d. Gaussian baseline.
    Randn,
    /// Binary row-sparse baseline.
    Bispar,
    /// Designed row-sparse matrix, identity Gram target, identity base.
    Sparse,
    /// Designed row-sparse matrix, Welch-level relaxed Gram target.
    SparseEtf,
    /// Designed row-sparse matrix with the orthonormal DCT base.
    SparseA,
}

impl SystemKind {
    pub fn name(self) -> &'static str {
        match self {
            SystemKind::Randn => "randn",
            SystemKind::Bispar => "bispar",
            SystemKind::Sparse => "sparse",
            SystemKind::SparseEtf => "sparse-etf",
            SystemKind::SparseA => "sparse-a",
        }
    }
}

impl FromStr for SystemKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "randn" => Ok(SystemKind::Randn),
            "bispar" => Ok(SystemKind::Bispar),
            "sparse" => Ok(SystemKind::Sparse),
            "sparse-etf" => Ok(SystemKind::SparseEtf),
            "sparse-a" => Ok(SystemKind::SparseA),
            other => Err(Error::Parse(format!("unknown system kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Snr,
    M,
    K,
    Kappa,
    Lambda,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Snr => "snr",
            SweepAxis::M => "m",
            SweepAxis::K => "k",
            SweepAxis::Kappa => "kappa",
            SweepAxis::Lambda => "lambda",
        }
    }
}

impl FromStr for SweepAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "snr" => Ok(SweepAxis::Snr),
            "m" => Ok(SweepAxis::M),
            "k" => Ok(SweepAxis::K),
            "kappa" => Ok(SweepAxis::Kappa),
            "lambda" => Ok(SweepAxis::Lambda),
            other => Err(Error::Parse(format!("unknown sweep axis {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchConfig {
    pub m: usize,
    pub n: usize,
    pub l: usize,
    /// Signal sparsity K.
    pub k: usize,
    /// Row budget for designed and binary systems.
    pub kappa: usize,
    pub lambda: f64,
    pub snr_db: f64,
    /// Signals per ensemble.
    pub j: usize,
    pub design_iters: usize,
    pub seed: u64,
    pub systems: Vec<SystemKind>,
}

impl BenchConfig {
    /// Fig.-5-scale defaults: M=25, N=60, L=80, K=4, J=2000, kappa=20,
    /// lambda=0.25.
    pub fn default_desk() -> Self {
        Self {
            m: 25,
            n: 60,
            l: 80,
            k: 4,
            kappa: 20,
            lambda: 0.25,
            snr_db: 15.0,
            j: 2000,
            design_iters: 1000,
            seed: 0,
            systems: vec![
                SystemKind::Randn,
                SystemKind::Bispar,
                SystemKind::Sparse,
                SystemKind::SparseEtf,
            ],
        }
    }
}

fn build_system(
    kind: SystemKind,
    psi_bar: &DenseMatrix,
    cfg: &BenchConfig,
) -> Result<DenseMatrix> {
    match kind {
        SystemKind::Randn => make_random_gaussian(cfg.m, cfg.n, cfg.seed.wrapping_add(1)),
        SystemKind::Bispar => {
            Ok(make_binary_sparse(cfg.m, cfg.n, cfg.kappa, cfg.seed.wrapping_add(2))?.into_dense())
        }
        SystemKind::Sparse | SystemKind::SparseEtf | SystemKind::SparseA => {
            let mut dc = DesignConfig::new(cfg.m, cfg.n, cfg.l, cfg.kappa);
            dc.lambda = cfg.lambda;
            dc.max_iters = cfg.design_iters;
            dc.seed = cfg.seed;
            dc.step_rule = StepRule::default();
            dc.xi = match kind {
                SystemKind::SparseEtf => XiSpec::Welch,
                _ => XiSpec::Value(0.0),
            };
            let base = match kind {
                SystemKind::SparseA => make_dct_base(cfg.n)?,
                _ => make_identity_base(cfg.n)?,
            };
            Ok(design(psi_bar, &base, &dc)?.phi.into_dense())
        }
    }
}

fn apply_axis(cfg: &BenchConfig, axis: SweepAxis, value: f64) -> Result<BenchConfig> {
    let mut c = cfg.clone();
    let as_count = |v: f64, what: &str| -> Result<usize> {
        if v.fract() != 0.0 || v < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "{what} axis value {v} is not a positive integer"
            )));
        }
        Ok(v as usize)
    };
    match axis {
        SweepAxis::Snr => c.snr_db = value,
        SweepAxis::M => c.m = as_count(value, "m")?,
        SweepAxis::K => c.k = as_count(value, "k")?,
        SweepAxis::Kappa => c.kappa = as_count(value, "kappa")?,
        SweepAxis::Lambda => {
            if !(value >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "lambda axis value {value} < 0"
                )));
            }
            c.lambda = value;
        }
    }
    Ok(c)
}

/// Re-designs the configured systems and re-runs the benchmark once per axis
/// value. Signal ensembles share the configured seed, so axis values are
/// compared under common random numbers.
pub fn sweep(
    psi_bar: &DenseMatrix,
    cfg: &BenchConfig,
    axis: SweepAxis,
    values: &[f64],
) -> Result<ExperimentReport> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("sweep values list is empty".into()));
    }
    if cfg.systems.is_empty() {
        return Err(Error::InvalidParameter("no systems configured".into()));
    }
    let mut rows = Vec::with_capacity(values.len() * cfg.systems.len());
    for &value in values {
        let c = apply_axis(cfg, axis, value)?;
        let ensemble = gen_sparse_signals(psi_bar, c.k, c.j, c.snr_db, c.seed)?;
        let systems: Vec<(String, DenseMatrix)> = c
            .systems
            .iter()
            .map(|&kind| Ok((kind.name().to_string(), build_system(kind, psi_bar, &c)?)))
            .collect::<Result<_>>()?;
        let report = run_benchmark(&systems, psi_bar, &ensemble, c.k)?;
        for mut row in report.rows {
            row.axis = axis.name().into();
            row.axis_value = value;
            rows.push(row);
        }
    }
    Ok(ExperimentReport {
        rows,
        support_sampler: SUPPORT_SAMPLER.into(),
    })
}
