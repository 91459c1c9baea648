//! Alternating minimization for the sparse sensing-matrix design problem:
//! projected gradient steps on Phi, closed-form projected Gram updates on G,
//! with backtracking step-size search and per-iteration trace collection.

use std::io::{BufRead, BufReader, Read, Write};

use ndarray::Array2;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{gram_of_product, welch_bound};
use crate::matrix::DenseMatrix;
use crate::objective::{objective_value_raw, ObjectiveContext};
use crate::projections::{
    project_gram_raw, project_row_sparse_raw, SparseSensingMatrix, TargetGram,
};

/// Hard cap on backtracking halvings; beyond this the step underflows f64.
pub const MAX_HALVINGS: usize = 60;

/// Gram relaxation level: a concrete value in [0,1) or the Welch bound of
/// the design dimensions, resolved when the run starts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum XiSpec {
    Value(f64),
    Welch,
}

impl XiSpec {
    pub fn resolve(self, m: usize, l: usize) -> f64 {
        match self {
            XiSpec::Value(v) => v,
            XiSpec::Welch => welch_bound(m, l),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "lowercase")]
pub enum StepRule {
    Constant { eta: f64 },
    Backtracking { eta0: f64, gamma: f64, alpha: f64 },
}

impl Default for StepRule {
    fn default() -> Self {
        StepRule::Backtracking {
            eta0: 1.0,
            gamma: 0.9,
            alpha: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignConfig {
    pub m: usize,
    pub n: usize,
    pub l: usize,
    pub kappa: usize,
    pub xi: XiSpec,
    pub lambda: f64,
    pub max_iters: usize,
    pub step_rule: StepRule,
    pub tol_phi: f64,
    pub tol_obj: f64,
    pub seed: u64,
}

impl DesignConfig {
    pub fn new(m: usize, n: usize, l: usize, kappa: usize) -> Self {
        Self {
            m,
            n,
            l,
            kappa,
            xi: XiSpec::Value(0.0),
            lambda: 0.25,
            max_iters: 1000,
            step_rule: StepRule::default(),
            tol_phi: 1e-8,
            tol_obj: 1e-12,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 || self.l == 0 {
            return Err(Error::InvalidDimension(
                "m, n, l must all be positive".into(),
            ));
        }
        if self.kappa == 0 || self.kappa > self.n {
            return Err(Error::InvalidParameter(format!(
                "kappa = {} outside 1..={}",
                self.kappa, self.n
            )));
        }
        if let XiSpec::Value(v) = self.xi {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("xi = {v} outside [0,1)")));
            }
        }
        if !(self.lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda = {} < 0",
                self.lambda
            )));
        }
        match self.step_rule {
            StepRule::Constant { eta } => {
                if !(eta > 0.0) {
                    return Err(Error::InvalidParameter(format!("eta = {eta} <= 0")));
                }
            }
            StepRule::Backtracking { eta0, gamma, alpha } => {
                if !(eta0 > 0.0) {
                    return Err(Error::InvalidParameter(format!("eta0 = {eta0} <= 0")));
                }
                if !(0.0 < gamma && gamma < 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "gamma = {gamma} outside (0,1)"
                    )));
                }
                if !(0.0 < alpha && alpha < 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "alpha = {alpha} outside (0,1)"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iter: usize,
    pub f: f64,
    pub d_phi: f64,
    pub d_g: f64,
    pub eta: f64,
    pub halvings: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    MaxIters,
    PhiTolerance,
    ObjectiveTolerance,
}

#[derive(Debug, Clone)]
pub struct DesignResult {
    pub phi: SparseSensingMatrix,
    pub g: TargetGram,
    pub trace: Vec<TraceRecord>,
    pub termination_reason: TerminationReason,
    /// xi actually used after resolving a symbolic Welch choice.
    pub xi_resolved: f64,
}

impl DesignResult {
    /// Last accepted step size, or the configured initial step before any
    /// iteration ran.
    pub fn final_eta(&self, config: &DesignConfig) -> f64 {
        self.trace.last().map(|r| r.eta).unwrap_or(match config.step_rule {
            StepRule::Constant { eta } => eta,
            StepRule::Backtracking { eta0, .. } => eta0,
        })
    }
}

/// Seeded standard-normal matrix, row-major fill.
pub(crate) fn seeded_randn(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Array2::from_shape_fn((rows, cols), |_| rng.sample(StandardNormal))
}

/// One backtracking step-size search. Returns the first eta in the halving
/// schedule whose projected step satisfies
/// f(Phi_k, G_k) - f(Phi+, G_k) >= (gamma / (2 eta)) ||Phi+ - Phi_k||_F^2,
/// together with that Phi+ and the number of halvings taken.
pub fn backtrack_step(
    phi_k: &SparseSensingMatrix,
    g_k: &TargetGram,
    ctx: &ObjectiveContext,
    kappa: usize,
    eta0: f64,
    gamma: f64,
    alpha: f64,
) -> Result<(f64, SparseSensingMatrix, usize)> {
    if !(eta0 > 0.0) || !(0.0 < gamma && gamma < 1.0) || !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "backtracking needs eta0 > 0, gamma, alpha in (0,1); got ({eta0}, {gamma}, {alpha})"
        )));
    }
    let grad = crate::objective::gradient_phi_raw(phi_k.array().view(), g_k.array().view(), ctx);
    let f_k = objective_value_raw(phi_k.array().view(), g_k.array().view(), ctx);
    let mut eta = eta0;
    for halvings in 0..=MAX_HALVINGS {
        let stepped = phi_k.array() - &(&grad * eta);
        let phi_next = project_row_sparse_raw(stepped.view(), kappa);
        let diff_sq: f64 = (phi_next.array() - phi_k.array())
            .iter()
            .map(|v| v * v)
            .sum();
        let f_next = objective_value_raw(phi_next.array().view(), g_k.array().view(), ctx);
        if f_k - f_next >= (gamma / (2.0 * eta)) * diff_sq {
            return Ok((eta, phi_next, halvings));
        }
        eta *= alpha;
    }
    Err(Error::StepSearchFailure {
        halvings: MAX_HALVINGS,
    })
}

/// Computable criticality proxy: ||Phi - P_{S_kappa}(Phi - eta grad f)||_F.
pub fn stationarity_surrogate(
    phi: &SparseSensingMatrix,
    g: &TargetGram,
    ctx: &ObjectiveContext,
    kappa: usize,
    eta: f64,
) -> f64 {
    let grad = crate::objective::gradient_phi_raw(phi.array().view(), g.array().view(), ctx);
    let stepped = phi.array() - &(&grad * eta);
    let proj = project_row_sparse_raw(stepped.view(), kappa);
    (proj.array() - phi.array())
        .iter()
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt()
}

enum GramUpdate {
    /// Project the equivalent Gram onto G_xi each iteration.
    Project { xi: f64 },
    /// xi = 0 special case: the Gram set is { I }, no projection needed.
    FixedIdentity,
}

/// Alternating minimization on (Phi, G). Psi = base * psi_bar is formed once;
/// Phi_0 is a projected seeded standard normal and G_0 the projected Gram of
/// Phi_0.
pub fn design(
    psi_bar: &DenseMatrix,
    base: &DenseMatrix,
    config: &DesignConfig,
) -> Result<DesignResult> {
    config.validate()?;
    let xi = config.xi.resolve(config.m, config.l);
    let update = if xi == 0.0 {
        GramUpdate::FixedIdentity
    } else {
        GramUpdate::Project { xi }
    };
    run_design(psi_bar, base, config, xi, update)
}

/// The xi = 0 special case (the Gram target is pinned at the identity), i.e.
/// iterative hard thresholding on Phi alone. Produces the same Phi sequence
/// as `design` with xi = 0.
pub fn design_identity_target(
    psi_bar: &DenseMatrix,
    base: &DenseMatrix,
    config: &DesignConfig,
) -> Result<DesignResult> {
    config.validate()?;
    if config.xi.resolve(config.m, config.l) != 0.0 {
        return Err(Error::InvalidParameter(
            "design_identity_target requires xi = 0".into(),
        ));
    }
    run_design(psi_bar, base, config, 0.0, GramUpdate::FixedIdentity)
}

fn run_design(
    psi_bar: &DenseMatrix,
    base: &DenseMatrix,
    config: &DesignConfig,
    xi: f64,
    update: GramUpdate,
) -> Result<DesignResult> {
    if base.rows() != config.n || base.cols() != config.n {
        return Err(Error::InvalidDimension(format!(
            "base must be {0}x{0}, got {1}x{2}",
            config.n,
            base.rows(),
            base.cols()
        )));
    }
    if psi_bar.rows() != config.n || psi_bar.cols() != config.l {
        return Err(Error::InvalidDimension(format!(
            "psi_bar must be {}x{}, got {}x{}",
            config.n,
            config.l,
            psi_bar.rows(),
            psi_bar.cols()
        )));
    }
    let psi = DenseMatrix::new(base.array().dot(psi_bar.array()))?;
    let ctx = ObjectiveContext::new(psi, config.lambda)?;

    let mut phi = project_row_sparse_raw(
        seeded_randn(config.m, config.n, config.seed).view(),
        config.kappa,
    );
    let mut g = match update {
        GramUpdate::FixedIdentity => TargetGram::identity(config.l),
        GramUpdate::Project { xi } => project_gram_raw(
            gram_of_product(phi.array().view(), ctx.psi().view()).view(),
            xi,
        ),
    };

    let mut trace = Vec::with_capacity(config.max_iters);
    let mut termination = TerminationReason::MaxIters;
    let mut obj_tol_streak = 0usize;
    let mut prev_f = f64::INFINITY;
    // warm-started backtracking: begin at twice the last accepted step,
    // capped at the configured eta0
    let mut eta_start = match config.step_rule {
        StepRule::Constant { eta } => eta,
        StepRule::Backtracking { eta0, .. } => eta0,
    };

    for iter in 1..=config.max_iters {
        let (eta, phi_next, halvings) = match config.step_rule {
            StepRule::Constant { eta } => {
                let grad = crate::objective::gradient_phi_raw(
                    phi.array().view(),
                    g.array().view(),
                    &ctx,
                );
                let stepped = phi.array() - &(&grad * eta);
                (eta, project_row_sparse_raw(stepped.view(), config.kappa), 0)
            }
            StepRule::Backtracking { eta0, gamma, alpha } => {
                let (eta, phi_next, halvings) =
                    backtrack_step(&phi, &g, &ctx, config.kappa, eta_start, gamma, alpha)?;
                eta_start = (eta * 2.0).min(eta0);
                (eta, phi_next, halvings)
            }
        };
        let d_phi = (phi_next.array() - phi.array())
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt();
        phi = phi_next;

        let d_g = match update {
            GramUpdate::FixedIdentity => 0.0,
            GramUpdate::Project { xi } => {
                let g_next = project_gram_raw(
                    gram_of_product(phi.array().view(), ctx.psi().view()).view(),
                    xi,
                );
                let d = (g_next.array() - g.array())
                    .iter()
                    .map(|v| v * v)
                    .sum::<f64>()
                    .sqrt();
                g = g_next;
                d
            }
        };

        let f = objective_value_raw(phi.array().view(), g.array().view(), &ctx);
        if !f.is_finite() {
            return Err(Error::NumericDivergence { iteration: iter });
        }
        trace.push(TraceRecord {
            iter,
            f,
            d_phi,
            d_g,
            eta,
            halvings,
        });

        if d_phi < config.tol_phi {
            termination = TerminationReason::PhiTolerance;
            break;
        }
        let rel_change = (prev_f - f).abs() / f.abs().max(1e-300);
        if rel_change < config.tol_obj {
            obj_tol_streak += 1;
            if obj_tol_streak >= 5 {
                termination = TerminationReason::ObjectiveTolerance;
                break;
            }
        } else {
            obj_tol_streak = 0;
        }
        prev_f = f;
    }

    Ok(DesignResult {
        phi,
        g,
        trace,
        termination_reason: termination,
        xi_resolved: xi,
    })
}

pub const TRACE_HEADER: &str = "iter,f,d_phi,d_g,eta,halvings";

pub fn write_trace_csv<W: Write>(trace: &[TraceRecord], mut w: W) -> Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    for r in trace {
        writeln!(
            w,
            "{},{:.17e},{:.17e},{:.17e},{:.17e},{}",
            r.iter, r.f, r.d_phi, r.d_g, r.eta, r.halvings
        )?;
    }
    Ok(())
}

pub fn read_trace_csv<R: Read>(r: R) -> Result<Vec<TraceRecord>> {
    let reader = BufReader::new(r);
    let mut lines = reader.lines();
    match lines.next() {
        Some(header) => {
            let header = header?;
            if header.trim() != TRACE_HEADER {
                return Err(Error::Parse(format!(
                    "unexpected trace header: {header:?}"
                )));
            }
        }
        None => return Err(Error::Parse("empty trace file".into())),
    }
    let mut out = Vec::new();
    for (ln, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Parse(format!(
                "trace line {}: expected 6 fields, got {}",
                ln + 2,
                fields.len()
            )));
        }
        let parse_f = |s: &str| -> Result<f64> {
            s.trim()
                .parse()
                .map_err(|e| Error::Parse(format!("trace line {}: {e}", ln + 2)))
        };
        let parse_u = |s: &str| -> Result<usize> {
            s.trim()
                .parse()
                .map_err(|e| Error::Parse(format!("trace line {}: {e}", ln + 2)))
        };
        out.push(TraceRecord {
            iter: parse_u(fields[0])?,
            f: parse_f(fields[1])?,
            d_phi: parse_f(fields[2])?,
            d_g: parse_f(fields[3])?,
            eta: parse_f(fields[4])?,
            halvings: parse_u(fields[5])?,
        });
    }
    Ok(out)
}
