//! Centralized numeric tolerances.
//!
//! Every threshold used by the solvers lives here so that the acceptance
//! suite and the CLI report the exact values in effect. All values are `f64`
//! and converted to the working scalar on use.

/// Simplex sum tolerance: probability vectors must sum to 1 within this.
pub const TAU_SUM: f64 = 1e-9;

/// Entry nonnegativity tolerance on input validation. Entries in
/// `[-TAU_NEG, 0)` are clamped to zero; anything more negative is rejected.
pub const TAU_NEG: f64 = 1e-12;

/// Nonnegativity-gate tolerance: reconstructed input weights in
/// `[-TAU_GATE, 0)` are clamped to zero and the gate passes. Rounding must
/// not spuriously trigger support reduction.
pub const TAU_GATE: f64 = 1e-10;

/// Equal-divergence tolerance: the certificate check
/// `max_x D(W_x || Q) - sum_x Q*(x) D(W_x || Q) <= TAU_EQ`.
pub const TAU_EQ: f64 = 1e-8;

/// Linear-solve residual tolerance (dual-basis gram deviation from the
/// identity, least-squares recovery residual).
pub const TAU_LIN: f64 = 1e-9;

/// Gradient stopping tolerance for the free-parameter minimization.
pub const TAU_GRAD: f64 = 1e-10;

/// Reciprocal-condition floor on the row matrix; below this the channel is
/// treated as numerically rank deficient.
pub const KAPPA_MIN: f64 = 1e-12;

/// Smallest eigenvalue admitted into a matrix logarithm; below this the
/// operator is rank deficient rather than silently clamped.
pub const LAMBDA_MIN: f64 = 1e-12;

/// Hermiticity tolerance: max entrywise deviation of `A` from its adjoint.
pub const TAU_HERM: f64 = 1e-10;

/// Density-matrix positivity tolerance on eigenvalues.
pub const TAU_PSD: f64 = 1e-10;

/// Iteration cap for the damped Newton minimization of the log-partition.
pub const NEWTON_MAX_ITER: usize = 200;

/// Default Blahut-Arimoto stopping tolerance (classical).
pub const BA_DEFAULT_TOL: f64 = 1e-10;

/// Default Blahut-Arimoto stopping tolerance (classical-quantum); looser
/// because every iteration pays for a matrix logarithm.
pub const BA_CQ_DEFAULT_TOL: f64 = 1e-9;

/// Default iteration cap for both Blahut-Arimoto solvers.
pub const BA_DEFAULT_MAX_ITER: usize = 100_000;

/// Largest number of input subsets enumerated exhaustively before the
/// driver switches to the hybrid (oracle-seeded) strategy.
pub const SUBSET_CAP: usize = 100_000;

/// Input-mass cutoff used when the oracle seeds the candidate support.
pub const MASS_CUTOFF: f64 = 1e-6;
