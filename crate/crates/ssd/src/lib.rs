//! Row-sparse structured sensing-matrix design for compressive sensing.
//!
//! The design problem alternates projected gradient descent on a row-sparse
//! sensing matrix Phi with a closed-form projection of the target Gram of the
//! equivalent dictionary Phi Psi onto a relaxed equiangular-tight-frame set.
//! The resulting systems are evaluated by OMP recovery on synthetic sparse
//! signals against random-Gaussian and binary-sparse baselines.
//!
//! Modules, roughly bottom-up:
//! - [`matrix`]: dense matrix wrapper with finiteness invariants and CSV /
//!   binary I/O
//! - [`frame`]: base matrices (identity, orthonormal DCT-II), mutual
//!   coherence, the Welch bound, and equivalent-Gram computation
//! - [`projections`]: the row-sparse and relaxed-Gram projectors plus the
//!   feasible-set newtypes
//! - [`objective`]: the design objective, its gradients, and the extended
//!   objective with feasibility indicators
//! - [`designer`]: the alternating-minimization loop with backtracking line
//!   search and convergence traces
//! - [`recovery`]: orthogonal matching pursuit
//! - [`bench`]: synthetic signal ensembles, MSE / PSNR scoring, benchmark
//!   sweeps over SNR / dimensions / sparsity

pub mod bench;
pub mod cli;
pub mod designer;
pub mod error;
pub mod frame;
pub mod matrix;
pub mod objective;
pub mod projections;
pub mod recovery;

pub use error::{Error, Result};
pub use matrix::DenseMatrix;
