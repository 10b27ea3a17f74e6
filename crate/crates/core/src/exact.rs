//! Exact, non-iterative classical capacity computation.
//!
//! The solver works in the natural parametrization of an exponential family
//! of output laws. For a square channel with independent rows, the dual
//! basis is the inverse of the row matrix, the natural parameters are plain
//! entropy differences, and the capacity falls out of the log-partition
//! value; a nonnegativity gate on the reconstructed input weights certifies
//! optimality. Gate failures trigger support reduction; rectangular cases
//! (fewer inputs than outputs) add a convex minimization over the free
//! parameters, solved in closed form when the null-space directions pair up
//! two outputs at a time and by damped Newton otherwise.
//!
//! The full driver composes these routes, certifies every candidate against
//! the equal-divergence bound over all inputs of the original channel, and
//! falls back to an oracle-seeded support when certification fails.

use nalgebra::{DMatrix, DVector};

use crate::error::{CapacityError, Result};
use crate::linalg;
use crate::oracle;
use crate::prob::{
    entropy_slice, kl_slices, output_distribution, CapacityValue, ClassicalChannel,
    Distribution, SignedWeightVector,
};
use crate::scalar::{real, to_f64, Real};
use crate::tol;

/// Dual function basis for a square channel: `functions[(y, j)] = f_j(y)` is
/// the inverse of the row matrix, so the gram `h_{i,j} = sum_y W_i(y) f_j(y)`
/// is the identity.
#[derive(Debug, Clone)]
pub struct DualBasis<T: Real> {
    functions: DMatrix<T>,
    gram: DMatrix<T>,
    rcond: f64,
}

impl<T: Real> DualBasis<T> {
    /// `f_j(y)`.
    pub fn f(&self, y: usize, j: usize) -> T {
        self.functions[(y, j)]
    }

    pub fn functions(&self) -> &DMatrix<T> {
        &self.functions
    }

    pub fn gram(&self) -> &DMatrix<T> {
        &self.gram
    }

    pub fn rcond(&self) -> f64 {
        self.rcond
    }
}

/// Natural parameters of the output exponential family with the
/// log-partition value `phi` at that point.
#[derive(Debug, Clone)]
pub struct NaturalParameters<T: Real> {
    pub theta: DVector<T>,
    pub phi: T,
}

/// Outcome of the nonnegativity gate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolutionStatus {
    /// Gate passed: the value is the exact capacity.
    Valid,
    /// Reconstructed input weights have strictly negative entries at these
    /// indices; the value is only an equal-divergence level, not the
    /// capacity.
    GateFailed { negative: Vec<usize> },
    /// A structural assumption failed numerically (e.g. the linear
    /// reconstruction of the input weights left a residual).
    ConditionViolated { reason: String },
}

/// Output of the square-channel exact algorithm.
#[derive(Debug, Clone)]
pub struct ExactSolution<T: Real> {
    pub capacity: CapacityValue<T>,
    pub theta: NaturalParameters<T>,
    pub output_law: Distribution<T>,
    pub input_candidate: SignedWeightVector<T>,
    pub status: SolutionStatus,
}

/// Builds the dual basis of a square channel by inverting the row matrix.
pub fn build_dual_basis<T: Real>(channel: &ClassicalChannel<T>) -> Result<DualBasis<T>> {
    let n1 = channel.num_inputs();
    let n2 = channel.num_outputs();
    if n1 != n2 {
        return Err(CapacityError::Dimension {
            what: "build_dual_basis (square channel required)",
            expected: n2,
            found: n1,
        });
    }
    let m = channel.matrix();
    let rc = linalg::rcond(m);
    let functions = linalg::invert_checked(m, tol::KAPPA_MIN)?;
    let gram = m * &functions;
    Ok(DualBasis {
        functions,
        gram,
        rcond: rc,
    })
}

/// Entropy of each channel row.
fn row_entropies<T: Real>(channel: &ClassicalChannel<T>) -> Vec<T> {
    (0..channel.num_inputs())
        .map(|x| entropy_slice(&channel.row(x)))
        .collect()
}

/// Natural parameters for a square channel: `theta^i = H(W_n) - H(W_i)`,
/// with the log-partition evaluated on the dual basis.
pub fn solve_theta<T: Real>(
    channel: &ClassicalChannel<T>,
    basis: &DualBasis<T>,
) -> NaturalParameters<T> {
    let n = channel.num_inputs();
    let hs = row_entropies(channel);
    let theta = DVector::from_fn(n - 1, |i, _| hs[n - 1] - hs[i]);
    let exponents = basis.functions.columns(0, n - 1) * &theta;
    let phi = linalg::log_sum_exp(&exponents);
    NaturalParameters { theta, phi }
}

/// Exact algorithm for a square channel: dual basis, natural parameters,
/// output law, reconstructed input weights, and the nonnegativity gate.
pub fn algorithm1<T: Real>(channel: &ClassicalChannel<T>) -> Result<ExactSolution<T>> {
    let basis = build_dual_basis(channel)?;
    let n = channel.num_inputs();
    let params = solve_theta(channel, &basis);
    let exponents = basis.functions.columns(0, n - 1) * &params.theta;
    let output: Vec<T> = exponents.iter().map(|&e| (e - params.phi).exp()).collect();
    let output_law = Distribution::new(output.clone())?;
    let p = DVector::from_column_slice(&output);
    let qhat_vec = basis.functions.transpose() * &p;
    let qhat = SignedWeightVector::new_unchecked(qhat_vec.iter().copied().collect());
    let hs = row_entropies(channel);
    let capacity = CapacityValue::new(params.phi - hs[n - 1])?;
    let gram_dev = {
        let mut dev = T::zero();
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { T::one() } else { T::zero() };
                let d = (basis.gram[(i, j)] - target).abs();
                if d > dev {
                    dev = d;
                }
            }
        }
        dev
    };
    let negative = qhat.negative_indices(real::<T>(tol::TAU_GATE));
    let status = if to_f64(gram_dev) > tol::TAU_LIN {
        SolutionStatus::ConditionViolated {
            reason: format!(
                "dual-basis gram deviates from the identity by {:.3e}",
                to_f64(gram_dev)
            ),
        }
    } else if negative.is_empty() {
        SolutionStatus::Valid
    } else {
        SolutionStatus::GateFailed { negative }
    };
    Ok(ExactSolution {
        capacity,
        theta: params,
        output_law,
        input_candidate: qhat,
        status,
    })
}

/// Spread of the per-input divergences from the solution's output law:
/// `max_x D(W_x || P) - min_x D(W_x || P)`. Zero (up to rounding) is the
/// equal-divergence guarantee of any exact run.
pub fn equal_divergence_residual<T: Real>(
    solution: &ExactSolution<T>,
    channel: &ClassicalChannel<T>,
) -> T {
    divergence_spread(channel, solution.output_law.probs())
}

fn divergence_spread<T: Real>(channel: &ClassicalChannel<T>, output: &[T]) -> T {
    let mut lo = real::<T>(f64::INFINITY);
    let mut hi = real::<T>(f64::NEG_INFINITY);
    for x in 0..channel.num_inputs() {
        let d = kl_slices(&channel.row(x), output);
        if d < lo {
            lo = d;
        }
        if d > hi {
            hi = d;
        }
    }
    hi - lo
}

/// How the free parameters of a rectangular solve are minimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MixtureMode {
    /// Closed form when every null-space direction pairs two outputs on
    /// disjoint pairs; Newton otherwise.
    #[default]
    Auto,
    /// Always run the Newton minimization (used to cross-check the closed
    /// form).
    ForceNumeric,
}

#[derive(Debug, Clone)]
struct MixtureSolution<T: Real> {
    theta: DVector<T>,
    phi: T,
    output_law: Distribution<T>,
    equal_divergence_value: T,
    closed_form: bool,
    newton_iterations: usize,
}

/// Finds the unique output law in the intersection of the row mixture
/// family and the constrained exponential family for a channel with fewer
/// inputs than outputs. This is the equal-divergence law; its value is the
/// capacity exactly when the reconstructed input weights are nonnegative.
pub fn solve_mixture_exponential_intersection<T: Real>(
    channel: &ClassicalChannel<T>,
) -> Result<(Distribution<T>, NaturalParameters<T>)> {
    let n1 = channel.num_inputs();
    let n2 = channel.num_outputs();
    if n1 == n2 {
        // no free parameters: plain square solve
        let basis = build_dual_basis(channel)?;
        let params = solve_theta(channel, &basis);
        let exponents = basis.functions.columns(0, n1 - 1) * &params.theta;
        let output: Vec<T> = exponents.iter().map(|&e| (e - params.phi).exp()).collect();
        return Ok((Distribution::new(output)?, params));
    }
    let sol = mixture_solution(channel, MixtureMode::Auto)?;
    Ok((
        sol.output_law,
        NaturalParameters {
            theta: sol.theta,
            phi: sol.phi,
        },
    ))
}

fn mixture_solution<T: Real>(
    channel: &ClassicalChannel<T>,
    mode: MixtureMode,
) -> Result<MixtureSolution<T>> {
    let n1 = channel.num_inputs();
    let n2 = channel.num_outputs();
    debug_assert!(n1 < n2);
    let m = channel.matrix();
    let rc = linalg::rcond(m);
    if rc < tol::KAPPA_MIN {
        return Err(CapacityError::SingularChannel {
            rcond: rc,
            floor: tol::KAPPA_MIN,
        });
    }
    let nfree = n2 - n1;
    let pairs = linalg::dependent_column_pairs(m);
    let structured = pairs.len() == nfree && mode != MixtureMode::ForceNumeric;

    // extended row matrix: W_0..W_{n1-2}, null-space completion, W_{n1-1}
    let mut mt = DMatrix::zeros(n2, n2);
    for i in 0..n1 - 1 {
        for y in 0..n2 {
            mt[(i, y)] = m[(i, y)];
        }
    }
    if structured {
        for (k, &(y, yp, lambda)) in pairs.iter().enumerate() {
            mt[(n1 - 1 + k, y)] = lambda;
            mt[(n1 - 1 + k, yp)] = -T::one();
        }
    } else {
        for (k, v) in linalg::null_space_basis(m).into_iter().enumerate() {
            for y in 0..n2 {
                mt[(n1 - 1 + k, y)] = v[y];
            }
        }
    }
    for y in 0..n2 {
        mt[(n2 - 1, y)] = m[(n1 - 1, y)];
    }
    let f = linalg::invert_checked(&mt, tol::KAPPA_MIN)?;

    let hs = row_entropies(channel);
    let theta_fixed = DVector::from_fn(n1 - 1, |i, _| hs[n1 - 1] - hs[i]);
    let fixed_exponents = f.columns(0, n1 - 1) * &theta_fixed;
    let f_free = f.columns(n1 - 1, nfree).into_owned();

    let mut eta = DVector::zeros(nfree);
    let mut newton_iterations = 0usize;
    let mut used_closed_form = false;
    if structured {
        let mut ok = true;
        for (k, &(y, yp, _)) in pairs.iter().enumerate() {
            let fj_y = f_free[(y, k)];
            let fj_yp = f_free[(yp, k)];
            if fj_y == T::zero() || (-fj_yp / fj_y) <= T::zero() {
                ok = false;
                break;
            }
            let mut shift = T::zero();
            for i in 0..n1 - 1 {
                shift += (f[(yp, i)] - f[(y, i)]) * theta_fixed[i];
            }
            eta[k] = (shift + (-fj_yp / fj_y).ln()) / (fj_y - fj_yp);
        }
        if ok {
            // closed form is exact; confirm the first-order conditions hold
            let expo = &fixed_exponents + &f_free * &eta;
            let phi = linalg::log_sum_exp(&expo);
            let p = expo.map(|e| (e - phi).exp());
            let grad = f_free.transpose() * &p;
            used_closed_form = grad.amax() <= real::<T>(tol::TAU_GRAD);
        }
        if !used_closed_form {
            eta = DVector::zeros(nfree);
        }
    }
    if !used_closed_form {
        newton_iterations = newton_minimize_phi(&fixed_exponents, &f_free, &mut eta)?;
    }

    let mut theta = DVector::zeros(n2 - 1);
    for i in 0..n1 - 1 {
        theta[i] = theta_fixed[i];
    }
    for k in 0..nfree {
        theta[n1 - 1 + k] = eta[k];
    }
    let expo = f.columns(0, n2 - 1) * &theta;
    let phi = linalg::log_sum_exp(&expo);
    let output: Vec<T> = expo.iter().map(|&e| (e - phi).exp()).collect();
    Ok(MixtureSolution {
        theta,
        phi,
        output_law: Distribution::new(output)?,
        equal_divergence_value: phi - hs[n1 - 1],
        closed_form: used_closed_form,
        newton_iterations,
    })
}

/// Damped Newton minimization of the log-partition over the free
/// parameters. Gradient is the expectation of the free functions under the
/// current law, Hessian their covariance; backtracking line search keeps
/// every step a descent step.
fn newton_minimize_phi<T: Real>(
    fixed_exponents: &DVector<T>,
    f_free: &DMatrix<T>,
    eta: &mut DVector<T>,
) -> Result<usize> {
    let nfree = f_free.ncols();
    let armijo = real::<T>(1e-4);
    let grad_tol = real::<T>(tol::TAU_GRAD);
    for it in 1..=tol::NEWTON_MAX_ITER {
        let expo = fixed_exponents + f_free * &*eta;
        let phi = linalg::log_sum_exp(&expo);
        let p = expo.map(|e| (e - phi).exp());
        let grad = f_free.transpose() * &p;
        if grad.amax() <= grad_tol {
            return Ok(it - 1);
        }
        let mut hess = DMatrix::zeros(nfree, nfree);
        for y in 0..f_free.nrows() {
            let fy = f_free.row(y);
            for a in 0..nfree {
                for b in 0..nfree {
                    hess[(a, b)] += p[y] * fy[a] * fy[b];
                }
            }
        }
        hess -= &grad * grad.transpose();
        for a in 0..nfree {
            hess[(a, a)] += real::<T>(1e-14);
        }
        let step = hess
            .lu()
            .solve(&(-&grad))
            .ok_or(CapacityError::NoConvergence {
                iterations: it,
                grad_norm: to_f64(grad.amax()),
            })?;
        let slope = grad.dot(&step);
        let mut t = T::one();
        let mut accepted = false;
        for _ in 0..60 {
            let trial = &*eta + &step * t;
            let e2 = fixed_exponents + f_free * &trial;
            let phi2 = linalg::log_sum_exp(&e2);
            if phi2 <= phi + armijo * t * slope {
                *eta = trial;
                accepted = true;
                break;
            }
            t *= real::<T>(0.5);
        }
        if !accepted {
            return Err(CapacityError::NoConvergence {
                iterations: it,
                grad_norm: to_f64(grad.amax()),
            });
        }
    }
    // final gradient check after the cap
    let expo = fixed_exponents + f_free * &*eta;
    let phi = linalg::log_sum_exp(&expo);
    let p = expo.map(|e| (e - phi).exp());
    let grad = f_free.transpose() * &p;
    if grad.amax() <= real::<T>(tol::TAU_GRAD) {
        Ok(tol::NEWTON_MAX_ITER)
    } else {
        Err(CapacityError::NoConvergence {
            iterations: tol::NEWTON_MAX_ITER,
            grad_norm: to_f64(grad.amax()),
        })
    }
}

/// Subset strategy for channels with more inputs than outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SubsetStrategy {
    /// Exhaustive when the number of subsets fits the cap, hybrid otherwise.
    #[default]
    Auto,
    Exhaustive,
    Hybrid,
}

/// Driver options.
#[derive(Debug, Clone)]
pub struct CapacityOptions<T: Real> {
    /// Populate `oracle_check` with an independent Blahut-Arimoto value.
    pub oracle_check: bool,
    /// Oracle stopping tolerance.
    pub ba_tol: T,
    /// Oracle iteration cap.
    pub ba_max_iter: usize,
    pub subset_strategy: SubsetStrategy,
    /// Max enumerations before `Auto` switches to the hybrid strategy.
    pub subset_cap: usize,
    /// Oracle-mass cutoff for hybrid support detection.
    pub mass_cutoff: T,
    pub mixture_mode: MixtureMode,
    /// Allow the iterative oracle to seed supports and to stand in when no
    /// exact candidate certifies. With this off the driver is fully
    /// non-iterative and fails with `SubsetSearchInconclusive` instead.
    pub allow_oracle_fallback: bool,
}

impl<T: Real> Default for CapacityOptions<T> {
    fn default() -> Self {
        Self {
            oracle_check: false,
            ba_tol: real(tol::BA_DEFAULT_TOL),
            ba_max_iter: tol::BA_DEFAULT_MAX_ITER,
            subset_strategy: SubsetStrategy::Auto,
            subset_cap: tol::SUBSET_CAP,
            mass_cutoff: real(tol::MASS_CUTOFF),
            mixture_mode: MixtureMode::Auto,
            allow_oracle_fallback: true,
        }
    }
}

/// One step of the route the driver took. Indices are in the original
/// channel's input numbering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathStep {
    Algorithm1 { n: usize },
    GateFailed { negative: Vec<usize> },
    SupportReduction { dropped: Vec<usize> },
    MixtureMinimization { free: usize, closed_form: bool, newton_iterations: usize },
    SubsetSearch { combinations: usize, selected: Vec<usize> },
    HybridSeed { selected: Vec<usize> },
    SingleInput,
    OracleFallback,
}

/// Route record of a driver run.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SolvePath {
    pub steps: Vec<PathStep>,
}

impl std::fmt::Display for SolvePath {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for s in &self.steps {
            if !first {
                write!(fm, " -> ")?;
            }
            first = false;
            match s {
                PathStep::Algorithm1 { n } => write!(fm, "exact[n={n}]")?,
                PathStep::GateFailed { negative } => write!(fm, "gate-failed{negative:?}")?,
                PathStep::SupportReduction { dropped } => write!(fm, "drop{dropped:?}")?,
                PathStep::MixtureMinimization {
                    free,
                    closed_form,
                    newton_iterations,
                } => {
                    if *closed_form {
                        write!(fm, "mixture[free={free}, closed-form]")?
                    } else {
                        write!(fm, "mixture[free={free}, newton={newton_iterations}]")?
                    }
                }
                PathStep::SubsetSearch {
                    combinations,
                    selected,
                } => write!(fm, "subset-search[{combinations} tried]{selected:?}")?,
                PathStep::HybridSeed { selected } => write!(fm, "hybrid-seed{selected:?}")?,
                PathStep::SingleInput => write!(fm, "single-input")?,
                PathStep::OracleFallback => write!(fm, "oracle-fallback")?,
            }
        }
        Ok(())
    }
}

/// Unified capacity result.
#[derive(Debug, Clone)]
pub struct CapacityReport<T: Real> {
    pub capacity: CapacityValue<T>,
    pub optimal_input: Distribution<T>,
    pub path: SolvePath,
    /// Independent Blahut-Arimoto value, when requested (always present on
    /// fallback routes).
    pub oracle_check: Option<T>,
    /// Whether the equal-divergence certificate over all inputs passed.
    pub certified: bool,
    /// `max_x D(W_x || W.Q*) - sum_x Q*(x) D(W_x || W.Q*)` on the original
    /// channel.
    pub verification_gap: T,
}

struct Candidate<T: Real> {
    /// Equal-divergence value of the accepted exact solve.
    value: T,
    /// Input weights on original indices.
    input: Vec<(usize, T)>,
    steps: Vec<PathStep>,
}

/// Exact solve on a sub-support (`n1 <= n2` after zero-column pruning),
/// recursing through gate failures.
/// How aggressively a gate failure shrinks the support.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ReductionPolicy {
    /// Drop every strictly negative index at once (primary policy).
    AllNegative,
    /// Drop only the most negative index per round (retry policy when the
    /// one-shot reduction loses the certificate).
    MostNegativeOnly,
}

fn solve_support<T: Real>(
    channel: &ClassicalChannel<T>,
    orig: &[usize],
    mode: MixtureMode,
    policy: ReductionPolicy,
) -> Result<Candidate<T>> {
    let nz = channel.nonzero_output_columns();
    let pruned;
    let channel = if nz.len() < channel.num_outputs() {
        pruned = channel.restrict_outputs(&nz);
        &pruned
    } else {
        channel
    };
    let n1 = channel.num_inputs();
    let n2 = channel.num_outputs();
    if n1 == 1 {
        return Ok(Candidate {
            value: T::zero(),
            input: vec![(orig[0], T::one())],
            steps: vec![PathStep::SingleInput],
        });
    }
    if n1 > n2 {
        // rows cannot be independent in fewer dimensions
        return Err(CapacityError::SingularChannel {
            rcond: linalg::rcond(channel.matrix()),
            floor: tol::KAPPA_MIN,
        });
    }
    let gate = real::<T>(tol::TAU_GATE);
    let (value, weights, mut steps): (T, Vec<T>, Vec<PathStep>) = if n1 == n2 {
        let sol = algorithm1(channel)?;
        if let SolutionStatus::ConditionViolated { reason } = sol.status {
            return Err(CapacityError::Invalid {
                what: "algorithm1",
                detail: reason,
            });
        }
        (
            sol.capacity.nats(),
            sol.input_candidate.weights().to_vec(),
            vec![PathStep::Algorithm1 { n: n1 }],
        )
    } else {
        let sol = mixture_solution(channel, mode)?;
        let p = DVector::from_column_slice(sol.output_law.probs());
        let (q, resid) = linalg::least_squares(&channel.matrix().transpose(), &p)?;
        if to_f64(resid) > tol::TAU_LIN {
            return Err(CapacityError::Invalid {
                what: "mixture input recovery",
                detail: format!(
                    "least-squares residual {} exceeds {}",
                    to_f64(resid),
                    tol::TAU_LIN
                ),
            });
        }
        (
            sol.equal_divergence_value,
            q.iter().copied().collect(),
            vec![PathStep::MixtureMinimization {
                free: n2 - n1,
                closed_form: sol.closed_form,
                newton_iterations: sol.newton_iterations,
            }],
        )
    };
    let negative: Vec<usize> = (0..n1).filter(|&x| weights[x] < -gate).collect();
    if negative.is_empty() {
        let input = (0..n1)
            .map(|x| {
                let w = if weights[x] < T::zero() { T::zero() } else { weights[x] };
                (orig[x], w)
            })
            .collect();
        return Ok(Candidate {
            value,
            input,
            steps,
        });
    }
    steps.push(PathStep::GateFailed {
        negative: negative.iter().map(|&x| orig[x]).collect(),
    });
    let dropped: Vec<usize> = match policy {
        ReductionPolicy::AllNegative => negative,
        ReductionPolicy::MostNegativeOnly => {
            let worst = (0..n1)
                .min_by(|&a, &b| {
                    weights[a]
                        .partial_cmp(&weights[b])
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .expect("non-empty input set");
            vec![worst]
        }
    };
    let keep: Vec<usize> = (0..n1).filter(|x| !dropped.contains(x)).collect();
    steps.push(PathStep::SupportReduction {
        dropped: dropped.iter().map(|&x| orig[x]).collect(),
    });
    let reduced = channel.restrict_inputs(&keep)?;
    let orig_keep: Vec<usize> = keep.iter().map(|&x| orig[x]).collect();
    let sub = solve_support(&reduced, &orig_keep, mode, policy)?;
    steps.extend(sub.steps);
    Ok(Candidate {
        value: sub.value,
        input: sub.input,
        steps,
    })
}

/// Equal-divergence certificate of a candidate input on the full channel:
/// returns `(achieved mutual information, max divergence, gap)`.
fn verify_candidate<T: Real>(
    channel: &ClassicalChannel<T>,
    input: &Distribution<T>,
) -> Result<(T, T, T)> {
    let out = output_distribution(input, channel)?;
    let mut lower = T::zero();
    let mut upper = real::<T>(f64::NEG_INFINITY);
    for x in 0..channel.num_inputs() {
        let d = kl_slices(&channel.row(x), out.probs());
        lower += input.get(x) * d;
        if d > upper {
            upper = d;
        }
    }
    Ok((lower, upper, upper - lower))
}

fn assemble_input<T: Real>(n1: usize, pairs: &[(usize, T)]) -> Result<Distribution<T>> {
    let mut q = vec![T::zero(); n1];
    for &(x, w) in pairs {
        q[x] = if w < T::zero() { T::zero() } else { w };
    }
    let s: T = q.iter().copied().fold(T::zero(), |a, b| a + b);
    if s <= T::zero() {
        return Err(CapacityError::Invalid {
            what: "candidate input",
            detail: "all weights vanished".into(),
        });
    }
    for v in q.iter_mut() {
        *v /= s;
    }
    Distribution::new(q)
}

fn binomial_capped(n: usize, k: usize, cap: usize) -> usize {
    let mut num: u128 = 1;
    for i in 0..k.min(n) {
        num = num.saturating_mul((n - i) as u128);
        num /= (i + 1) as u128;
        if num > cap as u128 * 1000 {
            return cap + 1;
        }
    }
    num.min(usize::MAX as u128) as usize
}

/// Full capacity driver.
///
/// Route selection: square channels run the exact algorithm directly, with
/// support reduction on gate failure; fewer inputs than outputs adds the
/// free-parameter minimization; more inputs than outputs searches over
/// output-sized input subsets (exhaustively or oracle-seeded). Every
/// candidate is certified by the equal-divergence bound over all inputs of
/// the original channel; on certification failure the driver reseeds from
/// the oracle support, and as a last resort reports the oracle value on a
/// flagged fallback path.
pub fn capacity<T: Real>(
    channel: &ClassicalChannel<T>,
    options: &CapacityOptions<T>,
) -> Result<CapacityReport<T>> {
    let n1 = channel.num_inputs();
    let n2 = channel.num_outputs();
    let all: Vec<usize> = (0..n1).collect();
    let tau = real::<T>(tol::TAU_EQ);
    let mut best_lower = T::zero();
    let mut first_error: Option<CapacityError> = None;

    // certify a candidate against the original channel
    let certify = |c: Candidate<T>,
                       best_lower: &mut T|
     -> Result<Option<(T, Distribution<T>, Vec<PathStep>, T)>> {
        let input = assemble_input(n1, &c.input)?;
        let (lower, _, gap) = verify_candidate(channel, &input)?;
        if lower > *best_lower {
            *best_lower = lower;
        }
        if gap <= tau && (c.value - lower).abs() <= tau {
            Ok(Some((c.value, input, c.steps, gap)))
        } else {
            Ok(None)
        }
    };

    // primary route and, when the one-shot reduction loses the certificate,
    // the one-index-per-round retry
    if n1 <= n2 {
        for policy in [ReductionPolicy::AllNegative, ReductionPolicy::MostNegativeOnly] {
            match solve_support(channel, &all, options.mixture_mode, policy) {
                Ok(c) => {
                    let reduced = c
                        .steps
                        .iter()
                        .any(|s| matches!(s, PathStep::SupportReduction { .. }));
                    if let Some((value, input, steps, gap)) = certify(c, &mut best_lower)? {
                        return finish_report(channel, value, input, steps, gap, options);
                    }
                    if !reduced {
                        // nothing to retry: the direct solve itself failed
                        break;
                    }
                }
                Err(e) => {
                    if first_error.is_none() {
                        first_error = Some(e);
                    }
                    break;
                }
            }
        }
    } else {
        let combos = binomial_capped(n1, n2, options.subset_cap);
        let exhaustive = match options.subset_strategy {
            SubsetStrategy::Exhaustive => true,
            SubsetStrategy::Hybrid => false,
            SubsetStrategy::Auto => combos <= options.subset_cap,
        };
        if exhaustive {
            if let Some(c) = exhaustive_subset_search(channel, options, &mut best_lower)? {
                if let Some((value, input, steps, gap)) = certify(c, &mut best_lower)? {
                    return finish_report(channel, value, input, steps, gap, options);
                }
            }
        }
    }

    if !options.allow_oracle_fallback {
        return Err(first_error.unwrap_or(CapacityError::SubsetSearchInconclusive {
            best_lower: to_f64(best_lower),
        }));
    }

    // oracle-seeded support: a cheap best-effort run ranks the input masses;
    // over-inclusion is harmless because the exact solve re-reduces and the
    // certificate still guards the value
    let seed_cap = options.ba_max_iter.min(20_000);
    let q_seed = oracle::seed_input_law(channel, real::<T>(1e-7), seed_cap);
    let seed = top_mass_indices(&q_seed, n2, options.mass_cutoff);
    if !seed.is_empty() {
        if let Ok(sub) = channel.restrict_inputs(&seed) {
            if let Ok(c) = solve_support(&sub, &seed, options.mixture_mode, ReductionPolicy::AllNegative)
            {
                let mut steps = vec![PathStep::HybridSeed {
                    selected: seed.clone(),
                }];
                steps.extend(c.steps);
                let c = Candidate {
                    value: c.value,
                    input: c.input,
                    steps,
                };
                if let Some((value, input, steps, gap)) = certify(c, &mut best_lower)? {
                    return finish_report(channel, value, input, steps, gap, options);
                }
            }
        }
    }

    // flagged oracle fallback: run the full-precision oracle, escalating the
    // gap if a degenerate instance cannot reach it within the iteration cap
    let mut tol_step = options.ba_tol;
    let (ba_value, q_ba) = loop {
        match oracle::blahut_arimoto(channel, tol_step, options.ba_max_iter) {
            Ok((cap, q, _)) => break (cap.nats(), q),
            Err(CapacityError::MaxIterExceeded { .. }) if tol_step < real::<T>(1e-6) => {
                tol_step *= real::<T>(10.0);
            }
            Err(e) => return Err(e),
        }
    };
    let (_, _, gap) = verify_candidate(channel, &q_ba)?;
    let report = CapacityReport {
        capacity: CapacityValue::new(ba_value)?,
        optimal_input: q_ba,
        path: SolvePath {
            steps: vec![PathStep::OracleFallback],
        },
        oracle_check: Some(ba_value),
        certified: false,
        verification_gap: gap,
    };
    if report.capacity.nats() > max_capacity_bound(channel) {
        return Err(CapacityError::Invalid {
            what: "capacity",
            detail: "value exceeds log(min(n1,n2))".into(),
        });
    }
    Ok(report)
}

fn max_capacity_bound<T: Real>(channel: &ClassicalChannel<T>) -> T {
    let n = channel.num_inputs().min(channel.num_outputs());
    real::<T>((n as f64).ln() + 1e-6)
}

fn finish_report<T: Real>(
    channel: &ClassicalChannel<T>,
    value: T,
    input: Distribution<T>,
    steps: Vec<PathStep>,
    gap: T,
    options: &CapacityOptions<T>,
) -> Result<CapacityReport<T>> {
    let capacity = CapacityValue::new(value)?;
    if capacity.nats() > max_capacity_bound(channel) {
        return Err(CapacityError::Invalid {
            what: "capacity",
            detail: "value exceeds log(min(n1,n2))".into(),
        });
    }
    let oracle_check = if options.oracle_check {
        let (cap, _, _) = oracle::blahut_arimoto(channel, options.ba_tol, options.ba_max_iter)?;
        Some(cap.nats())
    } else {
        None
    };
    Ok(CapacityReport {
        capacity,
        optimal_input: input,
        path: SolvePath { steps },
        oracle_check,
        certified: true,
        verification_gap: gap,
    })
}

fn exhaustive_subset_search<T: Real>(
    channel: &ClassicalChannel<T>,
    options: &CapacityOptions<T>,
    best_lower: &mut T,
) -> Result<Option<Candidate<T>>> {
    use itertools::Itertools;
    let n1 = channel.num_inputs();
    let n2 = channel.num_outputs();
    let mut tried = 0usize;
    let tau = real::<T>(tol::TAU_EQ);
    for subset in (0..n1).combinations(n2) {
        tried += 1;
        let sub = match channel.restrict_inputs(&subset) {
            Ok(s) => s,
            Err(_) => continue,
        };
        if linalg::rcond(sub.matrix()) < tol::KAPPA_MIN {
            continue;
        }
        let c = match solve_support(&sub, &subset, options.mixture_mode, ReductionPolicy::AllNegative) {
            Ok(c) => c,
            Err(_) => continue,
        };
        let input = assemble_input(n1, &c.input)?;
        let (lower, _, gap) = verify_candidate(channel, &input)?;
        if lower > *best_lower {
            *best_lower = lower;
        }
        if gap <= tau && (c.value - lower).abs() <= tau {
            let mut steps = vec![PathStep::SubsetSearch {
                combinations: tried,
                selected: subset.clone(),
            }];
            steps.extend(c.steps);
            return Ok(Some(Candidate {
                value: c.value,
                input: c.input,
                steps,
            }));
        }
    }
    Ok(None)
}

/// Largest-mass input indices: everything at or above the cutoff, trimmed
/// to at most `limit` indices (ties broken toward lower index), returned in
/// ascending order.
fn top_mass_indices<T: Real>(q: &Distribution<T>, limit: usize, cutoff: T) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..q.len()).collect();
    idx.sort_by(|&a, &b| {
        q.get(b)
            .partial_cmp(&q.get(a))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut keep: Vec<usize> = idx
        .into_iter()
        .take(limit)
        .filter(|&x| q.get(x) >= cutoff)
        .collect();
    if keep.is_empty() {
        keep = (0..q.len().min(limit)).collect();
    }
    keep.sort_unstable();
    keep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::mutual_information;
    use approx::assert_abs_diff_eq;

    const LN2: f64 = std::f64::consts::LN_2;

    fn h2(p: f64) -> f64 {
        if p <= 0.0 || p >= 1.0 {
            0.0
        } else {
            -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
        }
    }

    fn bsc(p: f64) -> ClassicalChannel<f64> {
        ClassicalChannel::from_rows(vec![vec![1.0 - p, p], vec![p, 1.0 - p]]).unwrap()
    }

    fn identity_channel(n: usize) -> ClassicalChannel<f64> {
        ClassicalChannel::from_rows(
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        )
        .unwrap()
    }

    fn epsilon_family(e: f64) -> ClassicalChannel<f64> {
        ClassicalChannel::from_rows(vec![
            vec![1.0 - e, 0.0, e],
            vec![0.0, 1.0 - e, e],
            vec![0.5, 0.5, 0.0],
            vec![0.5 - e, 0.5 - e, 2.0 * e],
        ])
        .unwrap()
    }

    #[test]
    fn dual_basis_identity_channel() {
        let basis = build_dual_basis(&identity_channel(2)).unwrap();
        assert_abs_diff_eq!(basis.f(0, 0), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(basis.f(1, 1), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(basis.f(0, 1), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn dual_basis_bsc_matches_inverse() {
        let p = 0.1;
        let basis = build_dual_basis(&bsc(p)).unwrap();
        let d = 1.0 - 2.0 * p;
        assert_abs_diff_eq!(basis.f(0, 0), (1.0 - p) / d, epsilon = 1e-12);
        assert_abs_diff_eq!(basis.f(0, 1), -p / d, epsilon = 1e-12);
        assert_abs_diff_eq!(basis.f(1, 0), -p / d, epsilon = 1e-12);
        // gram is the identity
        assert!((basis.gram() - DMatrix::<f64>::identity(2, 2)).amax() < tol::TAU_LIN);
        // row sums of the basis are 1 (row-stochastic row matrix)
        for y in 0..2 {
            let s: f64 = (0..2).map(|j| basis.f(y, j)).sum();
            assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn dual_basis_rejects_duplicate_rows() {
        let w =
            ClassicalChannel::from_rows(vec![vec![0.4, 0.6], vec![0.4, 0.6]]).unwrap();
        assert!(matches!(
            build_dual_basis(&w),
            Err(CapacityError::SingularChannel { .. })
        ));
    }

    #[test]
    fn theta_zero_for_equal_row_entropies() {
        let w = bsc(0.1);
        let basis = build_dual_basis(&w).unwrap();
        let params = solve_theta(&w, &basis);
        assert_abs_diff_eq!(params.theta[0], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(params.phi, LN2, epsilon = 1e-14);
    }

    #[test]
    fn theta_epsilon_family_inputs_123() {
        // square subchannel on inputs {1,2,3}: theta = (h4, h4), h4 = log2 - h(eps)
        let e = 0.2;
        let w = epsilon_family(e).restrict_inputs(&[0, 1, 2]).unwrap();
        let basis = build_dual_basis(&w).unwrap();
        let params = solve_theta(&w, &basis);
        let h4 = LN2 - h2(e);
        assert_abs_diff_eq!(params.theta[0], h4, epsilon = 1e-12);
        assert_abs_diff_eq!(params.theta[1], h4, epsilon = 1e-12);
    }

    #[test]
    fn algorithm1_identity_three() {
        let sol = algorithm1(&identity_channel(3)).unwrap();
        assert_eq!(sol.status, SolutionStatus::Valid);
        assert_abs_diff_eq!(sol.capacity.nats(), 3.0f64.ln(), epsilon = 1e-12);
        for x in 0..3 {
            assert_abs_diff_eq!(sol.input_candidate.get(x), 1.0 / 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn algorithm1_bsc() {
        let sol = algorithm1(&bsc(0.1)).unwrap();
        assert_eq!(sol.status, SolutionStatus::Valid);
        assert_abs_diff_eq!(sol.capacity.nats(), LN2 - h2(0.1), epsilon = 1e-12);
        assert_abs_diff_eq!(sol.input_candidate.get(0), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.input_candidate.get(1), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn algorithm1_gate_fails_on_epsilon_family_inputs_123() {
        // at eps = 0.2 the third component of the reconstructed weights is negative
        let w = epsilon_family(0.2).restrict_inputs(&[0, 1, 2]).unwrap();
        let sol = algorithm1(&w).unwrap();
        match sol.status {
            SolutionStatus::GateFailed { ref negative } => assert_eq!(negative, &vec![2]),
            ref s => panic!("expected GateFailed, got {s:?}"),
        }
        // weights still sum to one
        assert_abs_diff_eq!(sol.input_candidate.sum(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn algorithm1_z_channel_not_the_printed_form() {
        // the correct exact value is log(5/4); the transposed-basis closed
        // form would give log(3/2) and must not be reproduced
        let w = ClassicalChannel::from_rows(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        let sol = algorithm1(&w).unwrap();
        assert_eq!(sol.status, SolutionStatus::Valid);
        assert_abs_diff_eq!(sol.capacity.nats(), 1.25f64.ln(), epsilon = 1e-12);
        assert!((sol.capacity.nats() - 1.5f64.ln()).abs() > 0.15);
        assert_abs_diff_eq!(sol.input_candidate.get(0), 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.input_candidate.get(1), 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.output_law.get(0), 0.8, epsilon = 1e-12);
    }

    #[test]
    fn theorem_identity_and_residual() {
        for p in [0.25, 0.1, 0.37] {
            let w = bsc(p);
            let sol = algorithm1(&w).unwrap();
            assert!(equal_divergence_residual(&sol, &w) <= 1e-12);
            // D(W_x || P) = phi - H(W_n) for every x
            let hs = row_entropies(&w);
            for x in 0..2 {
                let d = kl_slices(&w.row(x), sol.output_law.probs());
                assert_abs_diff_eq!(d, sol.theta.phi - hs[1], epsilon = 1e-10);
            }
        }
        let w = identity_channel(4);
        let sol = algorithm1(&w).unwrap();
        assert!(equal_divergence_residual(&sol, &w) <= 1e-12);
    }

    #[test]
    fn xlr_consistency() {
        // W^T Qhat reproduces the output law even when the gate fails
        let w = epsilon_family(0.2).restrict_inputs(&[0, 1, 2]).unwrap();
        let sol = algorithm1(&w).unwrap();
        let q = DVector::from_column_slice(sol.input_candidate.weights());
        let re = w.matrix().transpose() * q;
        for y in 0..3 {
            assert_abs_diff_eq!(re[y], sol.output_law.get(y), epsilon = 1e-9);
        }
    }

    #[test]
    fn mixture_square_reduces_to_solve_theta() {
        let w = bsc(0.2);
        let (p, params) = solve_mixture_exponential_intersection(&w).unwrap();
        let sol = algorithm1(&w).unwrap();
        for y in 0..2 {
            assert_abs_diff_eq!(p.get(y), sol.output_law.get(y), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(params.phi, sol.theta.phi, epsilon = 1e-12);
    }

    #[test]
    fn mixture_binary_ternary_matches_oracle() {
        let w = ClassicalChannel::from_rows(vec![
            vec![0.7, 0.2, 0.1],
            vec![0.1, 0.2, 0.7],
        ])
        .unwrap();
        let (p, _) = solve_mixture_exponential_intersection(&w).unwrap();
        let max_d = (0..2)
            .map(|x| kl_slices(&w.row(x), p.probs()))
            .fold(f64::NEG_INFINITY, f64::max);
        let (ba, _, _) = oracle::blahut_arimoto(&w, 1e-10, 100_000).unwrap();
        assert_abs_diff_eq!(max_d, ba.nats(), epsilon = 1e-9);
    }

    #[test]
    fn mixture_closed_form_agrees_with_newton() {
        // paired dependent columns make the two-point closed form available
        let w = ClassicalChannel::from_rows(vec![
            vec![0.2, 0.2, 0.3, 0.3],
            vec![0.35, 0.35, 0.15, 0.15],
        ])
        .unwrap();
        let closed = mixture_solution(&w, MixtureMode::Auto).unwrap();
        assert!(closed.closed_form);
        let newton = mixture_solution(&w, MixtureMode::ForceNumeric).unwrap();
        assert!(!newton.closed_form);
        assert_abs_diff_eq!(
            closed.equal_divergence_value,
            newton.equal_divergence_value,
            epsilon = 1e-9
        );
        for y in 0..4 {
            assert_abs_diff_eq!(
                closed.output_law.get(y),
                newton.output_law.get(y),
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn capacity_epsilon_family_branches() {
        let opts = CapacityOptions::<f64> {
            oracle_check: true,
            ..Default::default()
        };
        // eps = 0.2: capacity C* = 0.8 log 2, uniform on inputs {1,2}
        let r = capacity(&epsilon_family(0.2), &opts).unwrap();
        assert!(r.certified);
        assert_abs_diff_eq!(r.capacity.nats(), 0.8 * LN2, epsilon = 1e-9);
        assert_abs_diff_eq!(r.optimal_input.get(0), 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(r.optimal_input.get(1), 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(r.optimal_input.get(2), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.optimal_input.get(3), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(
            r.capacity.nats(),
            r.oracle_check.unwrap(),
            epsilon = 1e-8
        );

        // eps = 0.38: capacity C4 = log(1 + exp(h4/eps)/2)
        let e = 0.38;
        let h4 = LN2 - h2(e);
        let c4 = (1.0 + (h4 / e).exp() / 2.0).ln();
        let r = capacity(&epsilon_family(e), &opts).unwrap();
        assert_abs_diff_eq!(r.capacity.nats(), c4, epsilon = 1e-9);
        assert_abs_diff_eq!(r.capacity.nats(), r.oracle_check.unwrap(), epsilon = 1e-8);

        // eps = 0.45: capacity C** on inputs {3,4}
        let r = capacity(&epsilon_family(0.45), &opts).unwrap();
        assert_abs_diff_eq!(r.capacity.nats(), r.oracle_check.unwrap(), epsilon = 1e-8);
        assert_abs_diff_eq!(r.optimal_input.get(0), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.optimal_input.get(1), 0.0, epsilon = 1e-9);
        assert!(r.optimal_input.get(2) > 0.0 && r.optimal_input.get(3) > 0.0);
    }

    #[test]
    fn capacity_report_input_achieves_capacity() {
        let w = epsilon_family(0.31);
        let r = capacity(&w, &CapacityOptions::default()).unwrap();
        let mi = mutual_information(&r.optimal_input, &w).unwrap();
        assert_abs_diff_eq!(mi, r.capacity.nats(), epsilon = tol::TAU_EQ);
        // minimax: the output law's max divergence is at least the capacity
        let out = output_distribution(&r.optimal_input, &w).unwrap();
        let max_d = (0..4)
            .map(|x| kl_slices(&w.row(x), out.probs()))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(max_d >= r.capacity.nats() - 1e-10);
    }

    #[test]
    fn capacity_single_input_is_zero() {
        let w = ClassicalChannel::from_rows(vec![vec![0.3, 0.7]]).unwrap();
        let r = capacity(&w, &CapacityOptions::default()).unwrap();
        assert_eq!(r.capacity.nats(), 0.0);
        assert_eq!(r.path.steps, vec![PathStep::SingleInput]);
    }

    #[test]
    fn capacity_identical_rows_falls_back() {
        // condition (A) fails outright; the driver reports the oracle value
        let w = ClassicalChannel::from_rows(vec![vec![0.3, 0.7], vec![0.3, 0.7]]).unwrap();
        let r = capacity(&w, &CapacityOptions::default()).unwrap();
        assert!(!r.certified);
        assert!(r.path.steps.contains(&PathStep::OracleFallback));
        assert_abs_diff_eq!(r.capacity.nats(), 0.0, epsilon = 1e-9);
        // and errors out when the fallback is disabled
        let opts = CapacityOptions {
            allow_oracle_fallback: false,
            ..Default::default()
        };
        assert!(capacity(&w, &opts).is_err());
    }

    #[test]
    fn capacity_hybrid_strategy_on_tall_channel() {
        let w = epsilon_family(0.2);
        let opts = CapacityOptions::<f64> {
            subset_strategy: SubsetStrategy::Hybrid,
            ..Default::default()
        };
        let r = capacity(&w, &opts).unwrap();
        assert!(r.certified);
        assert_abs_diff_eq!(r.capacity.nats(), 0.8 * LN2, epsilon = 1e-9);
        assert!(matches!(r.path.steps[0], PathStep::HybridSeed { .. }));
    }

    #[test]
    fn near_singular_channel_flags_condition_violation() {
        // rcond sits above the singularity floor but the inverted basis is
        // too inaccurate for the gram identity
        let d = 1e-11;
        let w = ClassicalChannel::from_rows(vec![
            vec![0.5 + d, 0.5 - d],
            vec![0.5, 0.5],
        ])
        .unwrap();
        match algorithm1(&w) {
            Ok(sol) => assert!(matches!(
                sol.status,
                SolutionStatus::ConditionViolated { .. }
            )),
            Err(CapacityError::SingularChannel { .. }) => {}
            other => panic!("expected degraded status, got {other:?}"),
        }
    }

    #[test]
    fn capacity_wide_random_channels_match_oracle() {
        // fewer inputs than outputs: the free-parameter minimization route
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let opts = CapacityOptions::<f64>::default();
        for _ in 0..20 {
            let w = crate::sample::random_channel::<f64, _>(&mut rng, 3, 6, 1e-4).unwrap();
            let r = capacity(&w, &opts).unwrap();
            let (ba, _, _) = oracle::blahut_arimoto(&w, 1e-10, 1_000_000).unwrap();
            assert!(
                (r.capacity.nats() - ba.nats()).abs() <= 1e-8,
                "wide channel disagrees: {} vs {}",
                r.capacity.nats(),
                ba.nats()
            );
        }
    }

    #[test]
    fn capacity_tall_random_channels_match_oracle() {
        // more inputs than outputs: subset search route
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(32);
        let opts = CapacityOptions::<f64>::default();
        for _ in 0..15 {
            let w = crate::sample::random_channel::<f64, _>(&mut rng, 5, 3, 1e-4).unwrap();
            let r = capacity(&w, &opts).unwrap();
            let (ba, _, _) = oracle::blahut_arimoto(&w, 1e-10, 1_000_000).unwrap();
            assert!(
                (r.capacity.nats() - ba.nats()).abs() <= 1e-8,
                "tall channel disagrees: {} vs {}",
                r.capacity.nats(),
                ba.nats()
            );
        }
    }

    #[test]
    fn path_display_is_readable() {
        let p = SolvePath {
            steps: vec![
                PathStep::SubsetSearch {
                    combinations: 4,
                    selected: vec![0, 1, 2],
                },
                PathStep::Algorithm1 { n: 3 },
                PathStep::GateFailed { negative: vec![2] },
                PathStep::SupportReduction { dropped: vec![2] },
                PathStep::MixtureMinimization {
                    free: 1,
                    closed_form: true,
                    newton_iterations: 0,
                },
            ],
        };
        let s = p.to_string();
        assert!(s.contains("subset-search"));
        assert!(s.contains("closed-form"));
    }
}
