//! Exact, non-iterative computation of discrete channel capacities.
//!
//! The central routine inverts the channel's row matrix to obtain a dual
//! function basis, reads the natural parameters of an exponential family of
//! output laws off the row entropies, and evaluates the capacity as the
//! log-partition value minus the reference-row entropy. A nonnegativity
//! gate on the reconstructed input weights certifies exactness; gate
//! failures trigger support reduction, and channels with more inputs than
//! outputs are handled by subset search or an oracle-seeded hybrid. The
//! classical-quantum analogue runs the same construction over Hermitian
//! observables. An independent Blahut-Arimoto implementation serves as the
//! verification oracle throughout.
//!
//! All numeric code is generic over the scalar type via [`scalar::Real`]
//! (`f32` or `f64`); the `*64` aliases below pin the validated double
//! precision instantiation.
//!
//! ```
//! use chancap::{capacity, CapacityOptions, Channel64};
//!
//! let w = Channel64::from_rows(vec![vec![0.9, 0.1], vec![0.1, 0.9]]).unwrap();
//! let report = capacity(&w, &CapacityOptions::default()).unwrap();
//! assert!((report.capacity.bits() - 0.531004406).abs() < 1e-6);
//! ```

pub mod cq;
pub mod error;
pub mod exact;
pub mod families;
pub mod linalg;
pub mod oracle;
pub mod prob;
pub mod quantum;
pub mod sample;
pub mod scalar;
pub mod tol;

pub use error::{CapacityError, Result};
pub use exact::{
    algorithm1, build_dual_basis, capacity, equal_divergence_residual,
    solve_mixture_exponential_intersection, solve_theta, CapacityOptions, CapacityReport,
    DualBasis, ExactSolution, MixtureMode, NaturalParameters, PathStep, SolutionStatus,
    SolvePath, SubsetStrategy,
};
pub use cq::{
    algorithm2, build_observable_basis, cq_capacity, CqCapacityOptions, CqCapacityReport,
    CqExactSolution, CqStepTimings,
};
pub use families::{
    binary_channel_capacity, candidate_capacities, case1_input_weights, compute_thresholds,
    find_threshold, gate_functions, piecewise_capacity, qhat_limit_check,
    CandidateCapacitySet, EpsilonFamilyChannel, EpsilonThresholds, QhatLimitComparison,
};
pub use oracle::{blahut_arimoto, blahut_arimoto_cq, hybrid_support_detect, IterationTrace, TracePoint};
pub use prob::{
    entropy, kl_divergence, mutual_information, output_distribution, CapacityValue,
    ClassicalChannel, Distribution, SignedWeightVector,
};
pub use quantum::{
    matrix_exp, matrix_log, quantum_relative_entropy, unvectorize, vectorize,
    von_neumann_entropy, CqChannel, DensityMatrix, HermitianMatrix, HermitianVector,
};
pub use scalar::Real;

/// Double-precision aliases; this is the instantiation the test suites pin.
pub type Distribution64 = prob::Distribution<f64>;
pub type Channel64 = prob::ClassicalChannel<f64>;
pub type CapacityValue64 = prob::CapacityValue<f64>;
pub type SignedWeightVector64 = prob::SignedWeightVector<f64>;
pub type CapacityReport64 = exact::CapacityReport<f64>;
pub type CapacityOptions64 = exact::CapacityOptions<f64>;
pub type HermitianMatrix64 = quantum::HermitianMatrix<f64>;
pub type DensityMatrix64 = quantum::DensityMatrix<f64>;
pub type CqChannel64 = quantum::CqChannel<f64>;

/// Single-precision aliases; compiles and runs, but the default tolerances
/// in [`tol`] assume double precision.
pub type Distribution32 = prob::Distribution<f32>;
pub type Channel32 = prob::ClassicalChannel<f32>;
