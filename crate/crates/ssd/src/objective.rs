//! The design objective f(Phi, G) = ||G - Psi^T Phi^T Phi Psi||_F^2
//! + lambda ||Phi||_F^2, its gradients, and the extended objective rho that
//! adds the feasible-set indicators.

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::projections::{SparseSensingMatrix, TargetGram};

/// Effective dictionary and trade-off weight shared by all objective calls.
///
/// The regularizer is lambda ||Phi||_F^2: with the training residuals drawn
/// i.i.d. Gaussian, ||Phi E||_F^2 / J converges to sigma^2 ||Phi||_F^2, so the
/// residual matrix never needs to be materialized.
#[derive(Debug, Clone)]
pub struct ObjectiveContext {
    psi: DenseMatrix,
    lambda: f64,
}

impl ObjectiveContext {
    pub fn new(psi: DenseMatrix, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!("lambda = {lambda} < 0")));
        }
        Ok(Self { psi, lambda })
    }

    pub fn psi(&self) -> &DenseMatrix {
        &self.psi
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    fn check_dims(&self, phi: ArrayView2<'_, f64>, g: ArrayView2<'_, f64>) -> Result<()> {
        if phi.ncols() != self.psi.rows() {
            return Err(Error::InvalidDimension(format!(
                "phi has {} cols but psi has {} rows",
                phi.ncols(),
                self.psi.rows()
            )));
        }
        if g.nrows() != self.psi.cols() || g.ncols() != self.psi.cols() {
            return Err(Error::InvalidDimension(format!(
                "G is {}x{} but psi has {} cols",
                g.nrows(),
                g.ncols(),
                self.psi.cols()
            )));
        }
        Ok(())
    }
}

/// Value of the extended objective rho: the indicator functions make
/// infeasible pairs an explicit tagged value rather than a float infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rho {
    Finite(f64),
    Infeasible,
}

impl Rho {
    pub fn finite(self) -> Option<f64> {
        match self {
            Rho::Finite(v) => Some(v),
            Rho::Infeasible => None,
        }
    }

    pub fn is_infeasible(self) -> bool {
        matches!(self, Rho::Infeasible)
    }
}

pub fn objective_value(
    phi: &SparseSensingMatrix,
    g: &TargetGram,
    ctx: &ObjectiveContext,
) -> Result<f64> {
    ctx.check_dims(phi.array().view(), g.array().view())?;
    Ok(objective_value_raw(
        phi.array().view(),
        g.array().view(),
        ctx,
    ))
}

pub(crate) fn objective_value_raw(
    phi: ArrayView2<'_, f64>,
    g: ArrayView2<'_, f64>,
    ctx: &ObjectiveContext,
) -> f64 {
    let b = phi.dot(ctx.psi.array());
    let resid = &g.to_owned() - &b.t().dot(&b);
    let fit: f64 = resid.iter().map(|v| v * v).sum();
    let reg: f64 = phi.iter().map(|v| v * v).sum();
    fit + ctx.lambda * reg
}

/// Gradient in Phi: 2 lambda Phi - 4 Phi Psi G Psi^T
/// + 4 Phi Psi Psi^T Phi^T Phi Psi Psi^T.
pub fn gradient_phi(
    phi: &SparseSensingMatrix,
    g: &TargetGram,
    ctx: &ObjectiveContext,
) -> Result<DenseMatrix> {
    ctx.check_dims(phi.array().view(), g.array().view())?;
    let grad = gradient_phi_raw(phi.array().view(), g.array().view(), ctx);
    DenseMatrix::new(grad)
}

pub(crate) fn gradient_phi_raw(
    phi: ArrayView2<'_, f64>,
    g: ArrayView2<'_, f64>,
    ctx: &ObjectiveContext,
) -> Array2<f64> {
    // With B = Phi Psi the two quartic/quadratic terms collapse to
    // 4 B (B^T B - G) Psi^T.
    let b = phi.dot(ctx.psi.array());
    let inner = &b.t().dot(&b) - &g.to_owned();
    let mut grad = b.dot(&inner).dot(&ctx.psi.array().t()) * 4.0;
    grad.scaled_add(2.0 * ctx.lambda, &phi);
    grad
}

/// Auxiliary gradient in G: 2 (G - Psi^T Phi^T Phi Psi).
pub fn gradient_g(
    phi: &SparseSensingMatrix,
    g: &TargetGram,
    ctx: &ObjectiveContext,
) -> Result<DenseMatrix> {
    ctx.check_dims(phi.array().view(), g.array().view())?;
    let b = phi.array().dot(ctx.psi.array());
    let grad = (&g.array().view().to_owned() - &b.t().dot(&b)) * 2.0;
    DenseMatrix::new(grad)
}

/// rho(Phi, G) = f(Phi, G) on the feasible set, Infeasible otherwise.
pub fn rho_value(
    phi: &SparseSensingMatrix,
    g: &TargetGram,
    ctx: &ObjectiveContext,
    kappa: usize,
    xi: f64,
) -> Result<Rho> {
    ctx.check_dims(phi.array().view(), g.array().view())?;
    if !SparseSensingMatrix::is_member(phi.array().view(), kappa)
        || !TargetGram::is_member(g.array().view(), xi)
    {
        return Ok(Rho::Infeasible);
    }
    Ok(Rho::Finite(objective_value_raw(
        phi.array().view(),
        g.array().view(),
        ctx,
    )))
}
