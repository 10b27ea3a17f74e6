//! Exact capacity of a classical-quantum channel.
//!
//! The quantum analogue of the square-channel solver: states are encoded as
//! real vectors under the trace-orthonormal Hermitian basis, the observable
//! basis is the inverse of the state matrix in that encoding, the natural
//! parameters are von Neumann entropy differences, and the log-partition of
//! the resulting matrix exponential family yields the capacity when the
//! reconstructed input weights pass the nonnegativity gate.
//!
//! There is no support-reduction recursion here: on a gate failure the
//! driver falls back to the iterative oracle and flags the route.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;

use crate::error::{CapacityError, Result};
use crate::exact::{PathStep, SolutionStatus, SolvePath};
use crate::linalg;
use crate::oracle;
use crate::prob::{CapacityValue, Distribution, SignedWeightVector};
use crate::quantum::{
    matrix_exp, quantum_relative_entropy, unvectorize, vectorize, von_neumann_entropy,
    CqChannel, DensityMatrix, HermitianMatrix, HermitianVector,
};
use crate::scalar::{real, to_f64, Real};
use crate::tol;

/// Wall time spent in each stage of the exact solve, for the empirical
/// complexity comparison.
#[derive(Debug, Clone, Copy, Default)]
pub struct CqStepTimings {
    pub observable_basis: Duration,
    pub natural_parameters: Duration,
    pub log_partition: Duration,
    pub weight_reconstruction: Duration,
}

/// Output of the exact classical-quantum solve.
#[derive(Debug, Clone)]
pub struct CqExactSolution<T: Real> {
    pub capacity: CapacityValue<T>,
    pub theta: Vec<T>,
    pub phi: T,
    /// The equal-divergence state `rho_theta`.
    pub sigma_star: DensityMatrix<T>,
    pub input_candidate: SignedWeightVector<T>,
    pub status: SolutionStatus,
    pub timings: CqStepTimings,
}

/// Observable basis dual to the channel states: `Tr(W_i A_j) = delta_ij`.
///
/// Requires `n1 = dim^2` and linearly independent vectorized states. The
/// observables come out Hermitian for free because the inversion happens in
/// the real vectorized space.
pub fn build_observable_basis<T: Real>(cq: &CqChannel<T>) -> Result<Vec<HermitianMatrix<T>>> {
    let n1 = cq.num_inputs();
    let dim = cq.dim();
    if n1 != dim * dim {
        return Err(CapacityError::Dimension {
            what: "build_observable_basis (n1 = dim^2 required)",
            expected: dim * dim,
            found: n1,
        });
    }
    let s = state_matrix(cq);
    let inv = linalg::invert_checked(&s, tol::KAPPA_MIN)?;
    let mut observables = Vec::with_capacity(n1);
    for j in 0..n1 {
        let col = inv.column(j).into_owned();
        observables.push(unvectorize(&HermitianVector::new(col, dim)?));
    }
    Ok(observables)
}

/// Rows are the vectorized channel states.
fn state_matrix<T: Real>(cq: &CqChannel<T>) -> DMatrix<T> {
    let n1 = cq.num_inputs();
    let n = cq.dim() * cq.dim();
    let mut s = DMatrix::zeros(n1, n);
    for i in 0..n1 {
        let v = vectorize(cq.state(i).as_hermitian());
        for k in 0..n {
            s[(i, k)] = v.coords()[k];
        }
    }
    s
}

/// Exact algorithm for the classical-quantum capacity.
///
/// Every state must be strictly positive definite (finite entropies and
/// divergences); the capacity is `phi - H(W_last)` when the gate passes.
pub fn algorithm2<T: Real>(cq: &CqChannel<T>) -> Result<CqExactSolution<T>> {
    let n1 = cq.num_inputs();
    for x in 0..n1 {
        let min = cq.state(x).min_eigenvalue();
        if to_f64(min) < tol::LAMBDA_MIN {
            return Err(CapacityError::RankDeficient {
                state: Some(x),
                min_eigenvalue: to_f64(min),
            });
        }
    }
    let mut timings = CqStepTimings::default();

    let t0 = Instant::now();
    let observables = build_observable_basis(cq)?;
    timings.observable_basis = t0.elapsed();

    let t0 = Instant::now();
    let entropies: Vec<T> = (0..n1).map(|x| von_neumann_entropy(cq.state(x))).collect();
    let theta: Vec<T> = (0..n1 - 1).map(|i| entropies[n1 - 1] - entropies[i]).collect();
    timings.natural_parameters = t0.elapsed();

    let t0 = Instant::now();
    let mut generator = HermitianMatrix::zeros(cq.dim());
    for (j, th) in theta.iter().enumerate() {
        generator = generator.add(&observables[j].scale(*th));
    }
    // phi = log Tr exp(G), stabilized by shifting the spectrum
    let eigs = generator.eigenvalues();
    let shift = eigs
        .iter()
        .copied()
        .fold(real::<T>(f64::NEG_INFINITY), |a, b| if b > a { b } else { a });
    let tr_shifted: T = eigs.iter().map(|&v| (v - shift).exp()).fold(T::zero(), |a, b| a + b);
    let phi = shift + tr_shifted.ln();
    let shifted = generator.add(&HermitianMatrix::identity(cq.dim()).scale(-phi));
    let rho = DensityMatrix::new(matrix_exp(&shifted))?;
    timings.log_partition = t0.elapsed();

    let t0 = Instant::now();
    let weights: Vec<T> = (0..n1)
        .map(|x| rho.as_hermitian().trace_product(&observables[x]))
        .collect();
    let input_candidate = SignedWeightVector::new_unchecked(weights);
    timings.weight_reconstruction = t0.elapsed();

    let negative = input_candidate.negative_indices(real::<T>(tol::TAU_GATE));
    let status = if negative.is_empty() {
        SolutionStatus::Valid
    } else {
        SolutionStatus::GateFailed { negative }
    };
    Ok(CqExactSolution {
        capacity: CapacityValue::new(phi - entropies[n1 - 1])?,
        theta,
        phi,
        sigma_star: rho,
        input_candidate,
        status,
    timings,
    })
}

/// Unified classical-quantum capacity result.
#[derive(Debug, Clone)]
pub struct CqCapacityReport<T: Real> {
    pub capacity: CapacityValue<T>,
    pub optimal_input: Distribution<T>,
    pub path: SolvePath,
    pub oracle_check: Option<T>,
    /// Present when the exact route ran (whatever its gate said).
    pub exact: Option<CqExactSolution<T>>,
}

/// Options for the classical-quantum driver.
#[derive(Debug, Clone)]
pub struct CqCapacityOptions<T: Real> {
    pub oracle_check: bool,
    pub ba_tol: T,
    pub ba_max_iter: usize,
}

impl<T: Real> Default for CqCapacityOptions<T> {
    fn default() -> Self {
        Self {
            oracle_check: false,
            ba_tol: real(tol::BA_CQ_DEFAULT_TOL),
            ba_max_iter: tol::BA_DEFAULT_MAX_ITER,
        }
    }
}

/// Classical-quantum capacity driver: the exact algorithm when the state
/// count matches `dim^2` and its gate passes, the iterative oracle on a
/// flagged fallback path otherwise.
pub fn cq_capacity<T: Real>(
    cq: &CqChannel<T>,
    options: &CqCapacityOptions<T>,
) -> Result<CqCapacityReport<T>> {
    let n1 = cq.num_inputs();
    let dim = cq.dim();
    let exact = if n1 == dim * dim {
        match algorithm2(cq) {
            Ok(sol) => Some(sol),
            Err(CapacityError::SingularChannel { .. }) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };

    if let Some(ref sol) = exact {
        if sol.status == SolutionStatus::Valid {
            let input = sol
                .input_candidate
                .clone()
                .into_distribution(real::<T>(tol::TAU_GATE))?;
            let oracle_check = if options.oracle_check {
                let (v, _, _) = oracle::blahut_arimoto_cq(cq, options.ba_tol, options.ba_max_iter)?;
                Some(v.nats())
            } else {
                None
            };
            return Ok(CqCapacityReport {
                capacity: sol.capacity,
                optimal_input: input,
                path: SolvePath {
                    steps: vec![PathStep::Algorithm1 { n: n1 }],
                },
                oracle_check,
                exact,
            });
        }
    }

    let (value, q, _) = oracle::blahut_arimoto_cq(cq, options.ba_tol, options.ba_max_iter)?;
    let mut steps = Vec::new();
    if let Some(ref sol) = exact {
        if let SolutionStatus::GateFailed { ref negative } = sol.status {
            steps.push(PathStep::Algorithm1 { n: n1 });
            steps.push(PathStep::GateFailed {
                negative: negative.clone(),
            });
        }
    }
    steps.push(PathStep::OracleFallback);
    Ok(CqCapacityReport {
        capacity: value,
        optimal_input: q,
        path: SolvePath { steps },
        oracle_check: Some(value.nats()),
        exact,
    })
}

/// Upper-bound check `C_q <= D(W_x || sigma*)`: largest divergence from the
/// equal-divergence state.
pub fn max_divergence_to_sigma<T: Real>(
    cq: &CqChannel<T>,
    sigma: &DensityMatrix<T>,
) -> Result<T> {
    let mut hi = real::<T>(f64::NEG_INFINITY);
    for x in 0..cq.num_inputs() {
        let d = quantum_relative_entropy(cq.state(x), sigma)?;
        if d > hi {
            hi = d;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::algorithm1;
    use crate::prob::ClassicalChannel;
    use crate::sample;
    use approx::assert_abs_diff_eq;
    use nalgebra::Complex;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn spec_qubit_ensemble() -> CqChannel<f64> {
        let half = 0.5;
        let states = vec![
            // (I + 0.5 sx)/2
            DensityMatrix::from_complex(DMatrix::from_row_slice(
                2,
                2,
                &[c(half, 0.0), c(0.25, 0.0), c(0.25, 0.0), c(half, 0.0)],
            ))
            .unwrap(),
            // (I + 0.5 sy)/2
            DensityMatrix::from_complex(DMatrix::from_row_slice(
                2,
                2,
                &[c(half, 0.0), c(0.0, -0.25), c(0.0, 0.25), c(half, 0.0)],
            ))
            .unwrap(),
            // (I + 0.5 sz)/2
            DensityMatrix::from_complex(DMatrix::from_row_slice(
                2,
                2,
                &[c(0.75, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.25, 0.0)],
            ))
            .unwrap(),
            DensityMatrix::maximally_mixed(2),
        ];
        CqChannel::new(states).unwrap()
    }

    #[test]
    fn observable_basis_gram_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (cq, _, _) = sample::embedded_classical_ensemble(&mut rng).unwrap();
        let obs = build_observable_basis(&cq).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let h = cq.state(i).as_hermitian().trace_product(&obs[j]);
                let expected = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(h, expected, epsilon = tol::TAU_LIN);
                // the same identity through the isometry
                let dot = vectorize(cq.state(i).as_hermitian()).dot(&vectorize(&obs[j]));
                assert_abs_diff_eq!(dot, expected, epsilon = tol::TAU_LIN);
            }
        }
    }

    #[test]
    fn observable_basis_rejects_duplicates() {
        let s = DensityMatrix::<f64>::maximally_mixed(2);
        let cq = CqChannel::new(vec![s.clone(), s.clone(), s.clone(), s]).unwrap();
        assert!(matches!(
            build_observable_basis(&cq),
            Err(CapacityError::SingularChannel { .. })
        ));
    }

    #[test]
    fn algorithm2_matches_embedded_classical() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let (cq, classical_capacity, _) =
                sample::embedded_classical_ensemble(&mut rng).unwrap();
            let sol = algorithm2(&cq).unwrap();
            assert_eq!(sol.status, SolutionStatus::Valid);
            assert_abs_diff_eq!(sol.capacity.nats(), classical_capacity, epsilon = 1e-9);
            assert_abs_diff_eq!(sol.input_candidate.sum(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn algorithm2_rejects_pure_state() {
        let pure = DensityMatrix::from_complex(DMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        ))
        .unwrap();
        let cq = CqChannel::new(vec![
            pure,
            DensityMatrix::maximally_mixed(2),
            DensityMatrix::maximally_mixed(2),
            DensityMatrix::maximally_mixed(2),
        ])
        .unwrap();
        assert!(matches!(
            algorithm2(&cq),
            Err(CapacityError::RankDeficient { state: Some(0), .. })
        ));
    }

    #[test]
    fn spec_ensemble_gate_fails_but_bounds_hold() {
        let cq = spec_qubit_ensemble();
        let sol = algorithm2(&cq).unwrap();
        // weights sum to one regardless of the gate
        assert_abs_diff_eq!(sol.input_candidate.sum(), 1.0, epsilon = 1e-9);
        assert!(matches!(sol.status, SolutionStatus::GateFailed { .. }));
        // equal-divergence level is an upper bound on the capacity
        let (ba, _, _) = oracle::blahut_arimoto_cq(&cq, 1e-9, 100_000).unwrap();
        assert!(sol.capacity.nats() >= ba.nats() - 1e-9);
        // Theorem identity: divergences agree across states
        let ds: Vec<f64> = (0..4)
            .map(|x| quantum_relative_entropy(cq.state(x), &sol.sigma_star).unwrap())
            .collect();
        let spread = ds.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - ds.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread <= 1e-9, "divergence spread {spread}");
    }

    #[test]
    fn cq_driver_fallback_on_gate_failure() {
        let cq = spec_qubit_ensemble();
        let r = cq_capacity(&cq, &CqCapacityOptions::default()).unwrap();
        assert!(r.path.steps.contains(&PathStep::OracleFallback));
        let (ba, _, _) = oracle::blahut_arimoto_cq(&cq, 1e-9, 100_000).unwrap();
        assert_abs_diff_eq!(r.capacity.nats(), ba.nats(), epsilon = 1e-12);
    }

    #[test]
    fn cq_driver_exact_on_passing_gate() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (cq, classical_capacity, _) =
            sample::embedded_classical_ensemble(&mut rng).unwrap();
        let r = cq_capacity(&cq, &CqCapacityOptions::default()).unwrap();
        assert!(!r.path.steps.contains(&PathStep::OracleFallback));
        assert_abs_diff_eq!(r.capacity.nats(), classical_capacity, epsilon = 1e-9);
    }

    #[test]
    fn reconstruction_identity_when_gate_passes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (cq, _, _) = sample::embedded_classical_ensemble(&mut rng).unwrap();
        let sol = algorithm2(&cq).unwrap();
        // sum_x Qhat(x) W_x = rho_theta
        let mut acc = HermitianMatrix::zeros(2);
        for x in 0..4 {
            acc = acc.add(&cq.state(x).as_hermitian().scale(sol.input_candidate.get(x)));
        }
        let diff = (acc.data() - sol.sigma_star.as_hermitian().data()).camax();
        assert!(diff < 1e-9);
    }

    #[test]
    fn commuting_diagonal_embedding_matches_classical_oracle() {
        // fully diagonal 2-state ensemble: not condition (D), but the cq BA
        // must reproduce the classical value of the diagonal channel
        let w = ClassicalChannel::from_rows(vec![vec![0.85, 0.15], vec![0.25, 0.75]]).unwrap();
        let cq = CqChannel::new(vec![
            DensityMatrix::from_distribution(&w.row_distribution(0)),
            DensityMatrix::from_distribution(&w.row_distribution(1)),
        ])
        .unwrap();
        let r = cq_capacity(&cq, &CqCapacityOptions::default()).unwrap();
        let classical = algorithm1(&w).unwrap();
        assert_abs_diff_eq!(
            r.capacity.nats(),
            classical.capacity.nats(),
            epsilon = 1e-8
        );
        assert!(r.path.steps.contains(&PathStep::OracleFallback));
    }
}
