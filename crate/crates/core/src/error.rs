//! Error type shared by all solver modules.
//!
//! Diagnostics are carried as `f64` regardless of the working scalar so the
//! error type stays non-generic.

/// All failure modes of the capacity solvers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CapacityError {
    /// Shapes disagree (vector lengths, matrix dimensions).
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    /// A domain-type invariant was violated on construction.
    #[error("invalid {what}: {detail}")]
    Invalid { what: &'static str, detail: String },

    /// Channel rows (or vectorized states) are numerically dependent.
    #[error("singular channel: reciprocal condition estimate {rcond:.3e} below {floor:.3e}")]
    SingularChannel { rcond: f64, floor: f64 },

    /// The free-parameter minimization did not reach the gradient tolerance.
    #[error("minimization did not converge after {iterations} iterations (gradient norm {grad_norm:.3e})")]
    NoConvergence { iterations: usize, grad_norm: f64 },

    /// An iterative solver hit its iteration cap; carries the best bounds.
    #[error("iteration cap {max_iter} reached with bounds [{lower:.12e}, {upper:.12e}]")]
    MaxIterExceeded {
        max_iter: usize,
        lower: f64,
        upper: f64,
    },

    /// A matrix that must be strictly positive definite is not.
    #[error("rank deficient{}: smallest eigenvalue {min_eigenvalue:.3e}", match .state { Some(i) => format!(" (state {i})"), None => String::new() })]
    RankDeficient {
        state: Option<usize>,
        min_eigenvalue: f64,
    },

    /// Input matrix deviates from its adjoint beyond tolerance.
    #[error("not Hermitian: max deviation from adjoint {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    /// Root bracketing failed: no sign change over the interval.
    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    /// No candidate input support produced a verified exact solution and the
    /// oracle fallback was disabled; carries the best certified lower bound.
    #[error("subset search inconclusive: best lower bound {best_lower:.12e} nats")]
    SubsetSearchInconclusive { best_lower: f64 },

    /// Argument outside the mathematical domain of a closed form.
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, CapacityError>;
