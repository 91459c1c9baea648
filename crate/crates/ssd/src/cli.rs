//! Configuration files, run manifests, and the subcommand bodies behind the
//! `ssd` binary. Everything here is a plain function so the binary stays a
//! thin argument parser.
//!
//! Config files are TOML with one section per subcommand ([design],
//! [benchmark], [sweep]). Every field can be overridden by an `SSD_`-prefixed
//! environment variable (e.g. `SSD_SEED=3`) and, above that, by a command-line
//! flag. The run manifest records the fully resolved config and which
//! defaults were filled in, so no default is ever silent.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::bench::{
    sweep, BenchConfig, ExperimentReport, SweepAxis, SystemKind, SUPPORT_SAMPLER,
};
use crate::designer::{
    design, read_trace_csv, write_trace_csv, DesignConfig, DesignResult, StepRule, TraceRecord,
    XiSpec,
};
use crate::error::{Error, Result};
use crate::frame::{make_dct_base, make_identity_base};
use crate::matrix::DenseMatrix;

/// Stable process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_DIAGNOSTIC: i32 = 4;

pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::NumericDivergence { .. } | Error::StepSearchFailure { .. } => EXIT_NUMERIC,
        _ => EXIT_CONFIG,
    }
}

fn now_unix() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// Atomic write: temp file in the target directory, then rename over.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub version: String,
    pub config: serde_json::Value,
    pub defaults_applied: Vec<String>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub support_sampler: Option<String>,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub status: String,
}

impl RunManifest {
    fn new(subcommand: &str, config: serde_json::Value, defaults: Vec<String>) -> Self {
        Self {
            subcommand: subcommand.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config,
            defaults_applied: defaults,
            inputs: Vec::new(),
            outputs: Vec::new(),
            support_sampler: None,
            started_unix: now_unix(),
            finished_unix: 0.0,
            status: "running".into(),
        }
    }

    pub fn write(&mut self, path: &Path, status: &str) -> Result<()> {
        self.finished_unix = now_unix();
        self.status = status.into();
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Parse(format!("manifest serialization: {e}")))?;
        atomic_write(path, json.as_bytes())
    }
}

/// Flat string-to-string overrides, merged from `SSD_*` environment variables
/// and `--key value` command-line pairs (command line wins).
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    map: BTreeMap<String, String>,
}

impl Overrides {
    pub fn from_env() -> Self {
        let mut map = BTreeMap::new();
        for (k, v) in std::env::vars() {
            if let Some(rest) = k.strip_prefix("SSD_") {
                map.insert(rest.to_ascii_lowercase(), v);
            }
        }
        Self { map }
    }

    pub fn set(&mut self, key: &str, value: String) {
        self.map.insert(key.replace('-', "_"), value);
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| Error::Parse(format!("override {key} = {raw:?}: {e}"))),
        }
    }
}

/// Either a float level or the symbolic Welch bound, as written in config
/// files ("welch" or a number).
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawXi {
    Level(f64),
    Name(String),
}

fn parse_xi_str(s: &str) -> Result<XiSpec> {
    if s.eq_ignore_ascii_case("welch") {
        return Ok(XiSpec::Welch);
    }
    s.parse::<f64>()
        .map(XiSpec::Value)
        .map_err(|_| Error::Parse(format!("xi must be a number or \"welch\", got {s:?}")))
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDesignSection {
    m: Option<usize>,
    n: Option<usize>,
    l: Option<usize>,
    kappa: Option<usize>,
    xi: Option<RawXi>,
    lambda: Option<f64>,
    max_iters: Option<usize>,
    step_rule: Option<String>,
    eta: Option<f64>,
    eta0: Option<f64>,
    gamma: Option<f64>,
    alpha: Option<f64>,
    tol_phi: Option<f64>,
    tol_obj: Option<f64>,
    seed: Option<u64>,
    base: Option<String>,
    dict_path: Option<String>,
    dict_seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBenchSection {
    m: Option<usize>,
    n: Option<usize>,
    l: Option<usize>,
    k: Option<usize>,
    kappa: Option<usize>,
    lambda: Option<f64>,
    snr_db: Option<f64>,
    j: Option<usize>,
    design_iters: Option<usize>,
    seed: Option<u64>,
    systems: Option<Vec<String>>,
    dict_path: Option<String>,
    dict_seed: Option<u64>,
    normalize_dict: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweepSection {
    axis: Option<String>,
    values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfigFile {
    design: Option<RawDesignSection>,
    benchmark: Option<RawBenchSection>,
    sweep: Option<RawSweepSection>,
}

fn load_raw(config_path: Option<&Path>) -> Result<RawConfigFile> {
    match config_path {
        None => Ok(RawConfigFile::default()),
        Some(p) => {
            let text = fs::read_to_string(p)?;
            toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))
        }
    }
}

/// Fully resolved design run: the solver config plus dictionary provenance.
#[derive(Debug, Clone, Serialize)]
pub struct DesignRun {
    pub config: DesignConfig,
    pub base: String,
    pub dict_path: Option<String>,
    pub dict_seed: u64,
}

macro_rules! resolve_field {
    ($raw:expr, $ovr:expr, $defaults:expr, $field:ident, $default:expr) => {{
        match $ovr.parse(stringify!($field))? {
            Some(v) => v,
            None => match $raw.$field {
                Some(v) => v,
                None => {
                    $defaults.push(stringify!($field).to_string());
                    $default
                }
            },
        }
    }};
}

pub fn resolve_design(
    config_path: Option<&Path>,
    ovr: &Overrides,
) -> Result<(DesignRun, Vec<String>)> {
    let raw = load_raw(config_path)?.design.unwrap_or_default();
    let mut defaults = Vec::new();
    let m = resolve_field!(raw, ovr, defaults, m, 25);
    let n = resolve_field!(raw, ovr, defaults, n, 60);
    let l = resolve_field!(raw, ovr, defaults, l, 80);
    let kappa = resolve_field!(raw, ovr, defaults, kappa, 20);
    let lambda = resolve_field!(raw, ovr, defaults, lambda, 0.25);
    let max_iters = resolve_field!(raw, ovr, defaults, max_iters, 1000);
    let tol_phi = resolve_field!(raw, ovr, defaults, tol_phi, 1e-8);
    let tol_obj = resolve_field!(raw, ovr, defaults, tol_obj, 1e-12);
    let seed = resolve_field!(raw, ovr, defaults, seed, 0);
    let dict_seed = resolve_field!(raw, ovr, defaults, dict_seed, 1000);

    let xi = match ovr.get("xi") {
        Some(s) => parse_xi_str(s)?,
        None => match raw.xi {
            Some(RawXi::Level(v)) => XiSpec::Value(v),
            Some(RawXi::Name(s)) => parse_xi_str(&s)?,
            None => {
                defaults.push("xi".into());
                XiSpec::Welch
            }
        },
    };

    let rule_name = match ovr.get("step_rule") {
        Some(s) => s.to_string(),
        None => raw.step_rule.clone().unwrap_or_else(|| {
            defaults.push("step_rule".into());
            "backtracking".into()
        }),
    };
    let step_rule = match rule_name.as_str() {
        "constant" => StepRule::Constant {
            eta: resolve_field!(raw, ovr, defaults, eta, 1.0),
        },
        "backtracking" => StepRule::Backtracking {
            eta0: resolve_field!(raw, ovr, defaults, eta0, 1.0),
            gamma: resolve_field!(raw, ovr, defaults, gamma, 0.9),
            alpha: resolve_field!(raw, ovr, defaults, alpha, 0.5),
        },
        other => {
            return Err(Error::Parse(format!(
                "step_rule must be \"constant\" or \"backtracking\", got {other:?}"
            )))
        }
    };

    let base = match ovr.get("base") {
        Some(s) => s.to_string(),
        None => raw.base.clone().unwrap_or_else(|| {
            defaults.push("base".into());
            "identity".into()
        }),
    };
    if base != "identity" && base != "dct" {
        return Err(Error::Parse(format!(
            "base must be \"identity\" or \"dct\", got {base:?}"
        )));
    }
    let dict_path = ovr
        .get("dict_path")
        .map(String::from)
        .or_else(|| raw.dict_path.clone());

    let config = DesignConfig {
        m,
        n,
        l,
        kappa,
        xi,
        lambda,
        max_iters,
        step_rule,
        tol_phi,
        tol_obj,
        seed,
    };
    config.validate()?;
    Ok((
        DesignRun {
            config,
            base,
            dict_path,
            dict_seed,
        },
        defaults,
    ))
}

/// Fully resolved benchmark/sweep run.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRun {
    pub config: BenchConfig,
    pub dict_path: Option<String>,
    pub dict_seed: u64,
    pub normalize_dict: bool,
}

pub fn resolve_bench(
    config_path: Option<&Path>,
    ovr: &Overrides,
) -> Result<(BenchRun, Vec<String>)> {
    let raw = load_raw(config_path)?.benchmark.unwrap_or_default();
    let mut defaults = Vec::new();
    let m = resolve_field!(raw, ovr, defaults, m, 25);
    let n = resolve_field!(raw, ovr, defaults, n, 60);
    let l = resolve_field!(raw, ovr, defaults, l, 80);
    let k = resolve_field!(raw, ovr, defaults, k, 4);
    let kappa = resolve_field!(raw, ovr, defaults, kappa, 20);
    let lambda = resolve_field!(raw, ovr, defaults, lambda, 0.25);
    let snr_db = resolve_field!(raw, ovr, defaults, snr_db, 15.0);
    let j = resolve_field!(raw, ovr, defaults, j, 2000);
    let design_iters = resolve_field!(raw, ovr, defaults, design_iters, 1000);
    let seed = resolve_field!(raw, ovr, defaults, seed, 0);
    let dict_seed = resolve_field!(raw, ovr, defaults, dict_seed, 1000);
    let normalize_dict = resolve_field!(raw, ovr, defaults, normalize_dict, false);

    let system_names: Vec<String> = match ovr.get("systems") {
        Some(s) => s.split(',').map(|t| t.trim().to_string()).collect(),
        None => raw.systems.clone().unwrap_or_else(|| {
            defaults.push("systems".into());
            vec![
                "randn".into(),
                "bispar".into(),
                "sparse".into(),
                "sparse-etf".into(),
            ]
        }),
    };
    let systems: Vec<SystemKind> = system_names
        .iter()
        .map(|s| s.parse())
        .collect::<Result<_>>()?;
    let dict_path = ovr
        .get("dict_path")
        .map(String::from)
        .or_else(|| raw.dict_path.clone());

    Ok((
        BenchRun {
            config: BenchConfig {
                m,
                n,
                l,
                k,
                kappa,
                lambda,
                snr_db,
                j,
                design_iters,
                seed,
                systems,
            },
            dict_path,
            dict_seed,
            normalize_dict,
        },
        defaults,
    ))
}

pub fn resolve_sweep(
    config_path: Option<&Path>,
    ovr: &Overrides,
) -> Result<(BenchRun, SweepAxis, Vec<f64>, Vec<String>)> {
    let (bench, mut defaults) = resolve_bench(config_path, ovr)?;
    let raw = load_raw(config_path)?.sweep.unwrap_or_default();
    let axis: SweepAxis = match ovr.get("axis") {
        Some(s) => s.parse()?,
        None => match raw.axis {
            Some(s) => s.parse()?,
            None => {
                defaults.push("axis".into());
                SweepAxis::Snr
            }
        },
    };
    let values: Vec<f64> = match ovr.get("values") {
        Some(s) => s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse()
                    .map_err(|e| Error::Parse(format!("sweep value {t:?}: {e}")))
            })
            .collect::<Result<_>>()?,
        None => raw.values.unwrap_or_else(|| {
            defaults.push("values".into());
            vec![10.0, 15.0, 20.0, 25.0, 30.0]
        }),
    };
    Ok((bench, axis, values, defaults))
}

fn load_or_make_dict(
    dict_path: Option<&str>,
    n: usize,
    l: usize,
    dict_seed: u64,
    normalize: bool,
) -> Result<DenseMatrix> {
    let mut dict = match dict_path {
        Some(p) => {
            let d = DenseMatrix::read_path(Path::new(p))?;
            if d.rows() != n || d.cols() != l {
                return Err(Error::InvalidDimension(format!(
                    "dictionary at {p} is {}x{}, expected {n}x{l}",
                    d.rows(),
                    d.cols()
                )));
            }
            d
        }
        None => crate::bench::make_random_gaussian(n, l, dict_seed)?,
    };
    if normalize {
        dict = normalize_columns(&dict)?;
    }
    Ok(dict)
}

/// Scales every column to unit Euclidean norm.
pub fn normalize_columns(a: &DenseMatrix) -> Result<DenseMatrix> {
    let mut out = a.array().clone();
    for (j, mut col) in out.columns_mut().into_iter().enumerate() {
        let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= crate::frame::ZERO_NORM_TOL {
            return Err(Error::ZeroColumn { index: j });
        }
        col.mapv_inplace(|v| v / norm);
    }
    DenseMatrix::new(out)
}

fn json_of<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

pub struct DesignOutputs {
    pub phi_path: PathBuf,
    pub trace_path: PathBuf,
    pub manifest_path: PathBuf,
}

/// `ssd design`: run the design loop, write Phi (CSV or SSMX by extension),
/// the trace CSV, and the manifest. The manifest is written even when the
/// solver fails.
pub fn cmd_design(run: &DesignRun, defaults: Vec<String>, out_dir: &Path, binary: bool) -> Result<DesignOutputs> {
    let phi_path = out_dir.join(if binary { "phi.ssmx" } else { "phi.csv" });
    let trace_path = out_dir.join("trace.csv");
    let manifest_path = out_dir.join("manifest.json");
    let mut manifest = RunManifest::new("design", json_of(run), defaults);
    if let Some(p) = &run.dict_path {
        manifest.inputs.push(p.clone());
    }
    manifest.outputs = vec![
        phi_path.display().to_string(),
        trace_path.display().to_string(),
    ];

    let result = (|| -> Result<DesignResult> {
        let dict = load_or_make_dict(
            run.dict_path.as_deref(),
            run.config.n,
            run.config.l,
            run.dict_seed,
            false,
        )?;
        let base = match run.base.as_str() {
            "dct" => make_dct_base(run.config.n)?,
            _ => make_identity_base(run.config.n)?,
        };
        design(&dict, &base, &run.config)
    })();

    match result {
        Ok(res) => {
            let phi = res.phi.to_dense();
            let mut bytes = Vec::new();
            if binary {
                phi.write_binary(&mut bytes)?;
            } else {
                phi.write_csv(&mut bytes)?;
            }
            atomic_write(&phi_path, &bytes)?;
            let mut trace_bytes = Vec::new();
            write_trace_csv(&res.trace, &mut trace_bytes)?;
            atomic_write(&trace_path, &trace_bytes)?;
            manifest.write(&manifest_path, "ok")?;
            Ok(DesignOutputs {
                phi_path,
                trace_path,
                manifest_path,
            })
        }
        Err(e) => {
            manifest.write(&manifest_path, &format!("error: {e}"))?;
            Err(e)
        }
    }
}

/// Outcome of a trace audit: which check failed first, if any.
#[derive(Debug, Clone, PartialEq)]
pub enum DiagnoseOutcome {
    /// All rows pass; carries the final stationarity surrogate (the last
    /// accepted step's ||Phi_k - P(Phi_{k-1} - eta grad)||_F).
    Pass { final_surrogate: Option<f64> },
    /// f increased beyond slack at this iteration.
    MonotonicityViolation { iter: usize, prev_f: f64, f: f64 },
    /// Sufficient decrease fails at this iteration.
    SufficientDecreaseViolation { iter: usize, lhs: f64, rhs: f64 },
}

/// Audits a design trace: f must be non-increasing (1e-10 slack) and every
/// accepted step must satisfy the sufficient-decrease inequality
/// f_{k-1} - f_k >= (gamma / (2 eta_k)) d_phi_k^2 (the exact Gram update can
/// only lower f further, so the recorded f-drop dominates the Phi-step drop).
pub fn diagnose_trace(trace: &[TraceRecord], gamma: f64, f0: Option<f64>) -> DiagnoseOutcome {
    const SLACK: f64 = 1e-10;
    let mut prev_f = f0;
    for r in trace {
        if let Some(pf) = prev_f {
            if r.f > pf + SLACK {
                return DiagnoseOutcome::MonotonicityViolation {
                    iter: r.iter,
                    prev_f: pf,
                    f: r.f,
                };
            }
            let lhs = pf - r.f;
            let rhs = (gamma / (2.0 * r.eta)) * r.d_phi * r.d_phi;
            if lhs < rhs - SLACK {
                return DiagnoseOutcome::SufficientDecreaseViolation {
                    iter: r.iter,
                    lhs,
                    rhs,
                };
            }
        }
        prev_f = Some(r.f);
    }
    DiagnoseOutcome::Pass {
        final_surrogate: trace.last().map(|r| r.d_phi),
    }
}

/// `ssd diagnose`: audit a trace CSV. Returns the process exit code.
pub fn cmd_diagnose(trace_path: &Path, gamma: f64, out_dir: &Path) -> Result<i32> {
    let file = fs::File::open(trace_path)?;
    let trace = read_trace_csv(file)?;
    let manifest_path = out_dir.join("manifest.json");
    let mut manifest = RunManifest::new(
        "diagnose",
        serde_json::json!({ "trace": trace_path.display().to_string(), "gamma": gamma }),
        Vec::new(),
    );
    manifest.inputs = vec![trace_path.display().to_string()];

    if trace.is_empty() {
        eprintln!("warning: empty trace, nothing to check");
        println!("diagnose: PASS (vacuous)");
        manifest.write(&manifest_path, "ok: vacuous")?;
        return Ok(EXIT_OK);
    }
    // the first row has no predecessor in the file; checks start at row 2
    match diagnose_trace(&trace, gamma, None) {
        DiagnoseOutcome::Pass { final_surrogate } => {
            println!(
                "diagnose: PASS ({} iterations, final stationarity surrogate {:.6e})",
                trace.len(),
                final_surrogate.unwrap_or(f64::NAN)
            );
            manifest.write(&manifest_path, "ok")?;
            Ok(EXIT_OK)
        }
        DiagnoseOutcome::MonotonicityViolation { iter, prev_f, f } => {
            eprintln!("diagnose: FAIL at iteration {iter}: f increased {prev_f:.6e} -> {f:.6e}");
            manifest.write(&manifest_path, &format!("fail: monotonicity at {iter}"))?;
            Ok(EXIT_DIAGNOSTIC)
        }
        DiagnoseOutcome::SufficientDecreaseViolation { iter, lhs, rhs } => {
            eprintln!(
                "diagnose: FAIL at iteration {iter}: decrease {lhs:.6e} < required {rhs:.6e}"
            );
            manifest.write(
                &manifest_path,
                &format!("fail: sufficient decrease at {iter}"),
            )?;
            Ok(EXIT_DIAGNOSTIC)
        }
    }
}

pub struct BenchOutputs {
    pub report_path: PathBuf,
    pub manifest_path: PathBuf,
    pub report: ExperimentReport,
}

/// `ssd benchmark` / `ssd sweep`: both delegate to the sweep engine; a plain
/// benchmark is a singleton sweep over the configured SNR.
pub fn cmd_sweep(
    run: &BenchRun,
    axis: SweepAxis,
    values: &[f64],
    defaults: Vec<String>,
    subcommand: &str,
    out_dir: &Path,
) -> Result<BenchOutputs> {
    let report_path = out_dir.join("report.csv");
    let manifest_path = out_dir.join("manifest.json");
    let mut manifest = RunManifest::new(
        subcommand,
        serde_json::json!({
            "bench": json_of(run),
            "axis": axis.name(),
            "values": values,
        }),
        defaults,
    );
    if let Some(p) = &run.dict_path {
        manifest.inputs.push(p.clone());
    }
    manifest.outputs = vec![report_path.display().to_string()];
    manifest.support_sampler = Some(SUPPORT_SAMPLER.into());

    let result = (|| -> Result<ExperimentReport> {
        let dict = load_or_make_dict(
            run.dict_path.as_deref(),
            run.config.n,
            run.config.l,
            run.dict_seed,
            run.normalize_dict,
        )?;
        sweep(&dict, &run.config, axis, values)
    })();

    match result {
        Ok(report) => {
            let mut bytes = Vec::new();
            report.write_csv(&mut bytes)?;
            atomic_write(&report_path, &bytes)?;
            manifest.write(&manifest_path, "ok")?;
            Ok(BenchOutputs {
                report_path,
                manifest_path,
                report,
            })
        }
        Err(e) => {
            manifest.write(&manifest_path, &format!("error: {e}"))?;
            Err(e)
        }
    }
}

pub fn cmd_benchmark(
    run: &BenchRun,
    defaults: Vec<String>,
    out_dir: &Path,
) -> Result<BenchOutputs> {
    let snr = run.config.snr_db;
    cmd_sweep(run, SweepAxis::Snr, &[snr], defaults, "benchmark", out_dir)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designer::TraceRecord;

    fn rec(iter: usize, f: f64, d_phi: f64, eta: f64) -> TraceRecord {
        TraceRecord {
            iter,
            f,
            d_phi,
            d_g: 0.0,
            eta,
            halvings: 0,
        }
    }

    #[test]
    fn diagnose_passes_clean_trace() {
        let trace = vec![rec(1, 10.0, 1.0, 1.0), rec(2, 9.0, 1.0, 1.0)];
        // drop 1.0 >= 0.45 * 1.0
        assert_eq!(
            diagnose_trace(&trace, 0.9, None),
            DiagnoseOutcome::Pass {
                final_surrogate: Some(1.0)
            }
        );
    }

    #[test]
    fn diagnose_flags_increase() {
        let trace = vec![rec(1, 10.0, 0.1, 1.0), rec(2, 11.0, 0.1, 1.0)];
        assert!(matches!(
            diagnose_trace(&trace, 0.9, None),
            DiagnoseOutcome::MonotonicityViolation { iter: 2, .. }
        ));
    }

    #[test]
    fn diagnose_flags_insufficient_decrease() {
        // drop 0.1 < 0.45 * 4.0
        let trace = vec![rec(1, 10.0, 1.0, 1.0), rec(2, 9.9, 2.0, 1.0)];
        assert!(matches!(
            diagnose_trace(&trace, 0.9, None),
            DiagnoseOutcome::SufficientDecreaseViolation { iter: 2, .. }
        ));
    }

    #[test]
    fn resolve_design_defaults_are_listed() {
        let (run, defaults) = resolve_design(None, &Overrides::default()).unwrap();
        assert_eq!(run.config.m, 25);
        assert!(defaults.contains(&"m".to_string()));
        assert!(defaults.contains(&"xi".to_string()));
        assert!(defaults.contains(&"gamma".to_string()));
    }

    #[test]
    fn overrides_beat_defaults() {
        let mut ovr = Overrides::default();
        ovr.set("m", "7".into());
        ovr.set("xi", "0.25".into());
        ovr.set("step-rule", "constant".into());
        ovr.set("eta", "0.5".into());
        let (run, defaults) = resolve_design(None, &ovr).unwrap();
        assert_eq!(run.config.m, 7);
        assert_eq!(run.config.xi, XiSpec::Value(0.25));
        assert_eq!(run.config.step_rule, StepRule::Constant { eta: 0.5 });
        assert!(!defaults.contains(&"m".to_string()));
    }

    #[test]
    fn bad_override_is_a_parse_error() {
        let mut ovr = Overrides::default();
        ovr.set("m", "many".into());
        assert!(resolve_design(None, &ovr).is_err());
        let mut ovr = Overrides::default();
        ovr.set("systems", "randn,warp-drive".into());
        assert!(resolve_bench(None, &ovr).is_err());
    }

    #[test]
    fn config_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(
            &path,
            r#"
[design]
m = 5
n = 10
l = 12
kappa = 3
xi = "welch"
lambda = 0.1
seed = 9

[benchmark]
m = 5
n = 10
l = 12
k = 2
systems = ["randn", "sparse-a"]

[sweep]
axis = "kappa"
values = [2, 3, 4]
"#,
        )
        .unwrap();
        let (run, _) = resolve_design(Some(&path), &Overrides::default()).unwrap();
        assert_eq!(run.config.m, 5);
        assert_eq!(run.config.xi, XiSpec::Welch);
        assert_eq!(run.config.seed, 9);
        let (bench, axis, values, _) =
            resolve_sweep(Some(&path), &Overrides::default()).unwrap();
        assert_eq!(bench.config.systems, vec![SystemKind::Randn, SystemKind::SparseA]);
        assert_eq!(axis, SweepAxis::Kappa);
        assert_eq!(values, vec![2.0, 3.0, 4.0]);
    }

    #[test]
    fn unknown_config_key_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "[design]\nwat = 1\n").unwrap();
        assert!(resolve_design(Some(&path), &Overrides::default()).is_err());
    }

    #[test]
    fn atomic_write_creates_parents_and_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a/b/out.txt");
        atomic_write(&path, b"one").unwrap();
        atomic_write(&path, b"two").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"two");
        assert!(fs::read_dir(path.parent().unwrap()).unwrap().count() == 1);
    }

    #[test]
    fn normalize_columns_unit_norms() {
        let a = crate::bench::make_random_gaussian(6, 4, 3).unwrap();
        let n = normalize_columns(&a).unwrap();
        for col in n.array().columns() {
            let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code_for(&Error::InvalidParameter("x".into())), 2);
        assert_eq!(exit_code_for(&Error::NumericDivergence { iteration: 3 }), 3);
        assert_eq!(exit_code_for(&Error::StepSearchFailure { halvings: 60 }), 3);
    }
}
