//! Closed-form channel families: the general binary-output capacity and the
//! four-input/three-output epsilon family with its candidate capacities,
//! gate functions, thresholds, and piecewise capacity curve.
//!
//! Thresholds are always recomputed by root-finding; the four-digit values
//! quoted in reports never enter control flow.

use crate::error::{CapacityError, Result};
use crate::exact::{algorithm1, capacity, CapacityOptions, SolutionStatus};
use crate::prob::{entropy_slice, CapacityValue, ClassicalChannel, Distribution, SignedWeightVector};
use crate::scalar::{real, to_f64, Real};

/// Binary entropy in nats.
fn h2<T: Real>(p: T) -> T {
    entropy_slice(&[p, T::one() - p])
}

/// Capacity of the two-input binary-output channel with rows
/// `(1-p, p)` and `(1-q, q)`.
///
/// Computed by the exact square-channel algorithm (never by a pre-printed
/// closed form): the gate always passes for distinct rows because the
/// optimal output law lies between them.
pub fn binary_channel_capacity<T: Real>(
    p: T,
    q: T,
) -> Result<(CapacityValue<T>, Distribution<T>)> {
    for (name, v) in [("p", p), ("q", q)] {
        if v < T::zero() || v > T::one() {
            return Err(CapacityError::Domain(format!(
                "{name} = {} outside [0, 1]",
                to_f64(v)
            )));
        }
    }
    let w = ClassicalChannel::from_rows(vec![
        vec![T::one() - p, p],
        vec![T::one() - q, q],
    ])?;
    let sol = algorithm1(&w)?;
    debug_assert_eq!(sol.status, SolutionStatus::Valid);
    let input = sol.input_candidate.into_distribution(real(crate::tol::TAU_GATE))?;
    Ok((sol.capacity, input))
}

/// The four-input, three-output family parametrized by `epsilon`.
///
/// Rows: `(1-e, 0, e)`, `(0, 1-e, e)`, `(1/2, 1/2, 0)`, `(1/2-e, 1/2-e, 2e)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonFamilyChannel<T: Real> {
    epsilon: T,
}

impl<T: Real> EpsilonFamilyChannel<T> {
    pub fn new(epsilon: T) -> Result<Self> {
        if epsilon < T::zero() || epsilon > real::<T>(0.5) {
            return Err(CapacityError::Domain(format!(
                "epsilon = {} outside [0, 1/2]",
                to_f64(epsilon)
            )));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn channel(&self) -> ClassicalChannel<T> {
        let e = self.epsilon;
        let half = real::<T>(0.5);
        let two = real::<T>(2.0);
        ClassicalChannel::from_rows(vec![
            vec![T::one() - e, T::zero(), e],
            vec![T::zero(), T::one() - e, e],
            vec![half, half, T::zero()],
            vec![half - e, half - e, two * e],
        ])
        .expect("rows are distributions for epsilon in [0, 1/2]")
    }

    /// The square subchannel that drops input `excluded` (0-based).
    pub fn subchannel_without(&self, excluded: usize) -> Result<ClassicalChannel<T>> {
        if excluded >= 4 {
            return Err(CapacityError::Domain(format!(
                "input index {excluded} out of range"
            )));
        }
        let keep: Vec<usize> = (0..4).filter(|&x| x != excluded).collect();
        self.channel().restrict_inputs(&keep)
    }
}

/// The closed-form candidate capacities and auxiliary entropies of the
/// epsilon family, all in nats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateCapacitySet<T: Real> {
    /// Inputs `{2,3,4}` equal-divergence value.
    pub c1: T,
    /// Inputs `{1,2,4}` equal-divergence value.
    pub c3: T,
    /// Inputs `{1,2,3}` equal-divergence value.
    pub c4: T,
    /// Uniform-on-`{1,2}` capacity `(1-e) log 2`.
    pub c_star: T,
    /// Two-input `{3,4}` capacity.
    pub c_double_star: T,
    pub h1: T,
    pub h3: T,
    pub h4: T,
}

fn check_open_interval<T: Real>(epsilon: T) -> Result<()> {
    if epsilon <= T::zero() || epsilon >= real::<T>(0.5) {
        return Err(CapacityError::Domain(format!(
            "epsilon = {} outside the open interval (0, 1/2)",
            to_f64(epsilon)
        )));
    }
    Ok(())
}

/// Evaluates all candidate closed forms at `epsilon` in `(0, 1/2)`.
pub fn candidate_capacities<T: Real>(epsilon: T) -> Result<CandidateCapacitySet<T>> {
    check_open_interval(epsilon)?;
    let e = epsilon;
    let one = T::one();
    let two = real::<T>(2.0);
    let ln2 = T::ln_2();
    let h_e = h2(e);
    let h_2e = h2(two * e);
    let h4 = ln2 - h_e;
    let h3 = h_2e + (one - two * e) * ln2 - h_e;
    let h1 = h_2e - two * e * ln2;

    let c4 = (one + (h4 / e).exp() / two).ln();
    let c_star = (one - e) * ln2;
    let c3 = (two + (-h3 / e).exp()).ln() + h_2e + (one - two * e) * ln2 - two * h_e;

    let a = (one - two * e) / real::<T>(4.0);
    let ex = (one - two * e) / (two - two * e);
    let tail = real::<T>(4.0) * e * (one - two * e).powf((one - two * e) / (two * e));
    let big = a.powf(ex) / (one - e) + (one - e) * a.powf(-ex) + tail;
    let c1 = big.ln() - ln2;

    let p_star = one / (two * e + (one - two * e).powf(-(one - two * e) / (two * e)));
    let c_double_star = h2(two * e * p_star) - p_star * h_2e;

    Ok(CandidateCapacitySet {
        c1,
        c3,
        c4,
        c_star,
        c_double_star,
        h1,
        h3,
        h4,
    })
}

/// The three gate functions controlling achievability of `C4` and `C3`.
pub fn gate_functions<T: Real>(epsilon: T) -> Result<(T, T, T)> {
    check_open_interval(epsilon)?;
    let e = epsilon;
    let one = T::one();
    let two = real::<T>(2.0);
    let set = candidate_capacities(e)?;
    let g1 = (one - e) / (two * e) * (set.h4 / e).exp();
    let g2 = (one - e) / (two * e) * (-set.h3 / e).exp();
    let g3 = (one - two * e) / (two * e) * (-set.h3 / e).exp();
    Ok((g1, g2, g3))
}

/// Reconstructed input weights of the inputs-`{2,3,4}` square subchannel;
/// component 0 is the weight on input 2, whose sign change marks the
/// capacity branch switch to the two-input `{3,4}` regime.
pub fn case1_input_weights<T: Real>(epsilon: T) -> Result<SignedWeightVector<T>> {
    check_open_interval(epsilon)?;
    let sub = EpsilonFamilyChannel::new(epsilon)?.subchannel_without(0)?;
    Ok(algorithm1(&sub)?.input_candidate)
}

/// Deterministic bisection on a bracketed sign change.
pub fn find_threshold<T: Real>(
    f: impl Fn(T) -> T,
    bracket: (T, T),
    tol: T,
) -> Result<T> {
    let (mut lo, mut hi) = bracket;
    if !(hi > lo) || tol <= T::zero() {
        return Err(CapacityError::Domain(format!(
            "bad bracket or tolerance: [{}, {}], tol {}",
            to_f64(lo),
            to_f64(hi),
            to_f64(tol)
        )));
    }
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == T::zero() {
        return Ok(lo);
    }
    if fhi == T::zero() {
        return Ok(hi);
    }
    if flo * fhi > T::zero() {
        return Err(CapacityError::NoSignChange {
            lo: to_f64(lo),
            hi: to_f64(hi),
        });
    }
    while hi - lo > tol {
        let mid = (lo + hi) * real::<T>(0.5);
        let fmid = f(mid);
        if fmid == T::zero() {
            return Ok(mid);
        }
        if fmid * flo < T::zero() {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    Ok((lo + hi) * real::<T>(0.5))
}

/// Branch boundaries of the piecewise capacity, recovered by root-finding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonThresholds<T: Real> {
    /// `g1 = 1` crossing; `C*` gives way to `C4` here (near 0.3588).
    pub c_star_to_c4: T,
    /// Sign change of the input-2 weight in the `{2,3,4}` case; `C4` gives
    /// way to `C**` here (near 0.3972).
    pub c4_to_c_double_star: T,
    /// `g2 = 1` crossing; `C3` becomes achievable here (near 0.4286).
    pub g2_crossing: T,
}

/// Computes the three thresholds by bisection to `root_tol`.
pub fn compute_thresholds<T: Real>(root_tol: T) -> Result<EpsilonThresholds<T>> {
    let g1_shift = |e: T| match gate_functions(e) {
        Ok((g1, _, _)) => g1 - T::one(),
        Err(_) => T::one(),
    };
    let qhat2 = |e: T| match case1_input_weights(e) {
        Ok(q) => q.get(0),
        Err(_) => T::one(),
    };
    let g2_shift = |e: T| match gate_functions(e) {
        Ok((_, g2, _)) => g2 - T::one(),
        Err(_) => -T::one(),
    };
    Ok(EpsilonThresholds {
        c_star_to_c4: find_threshold(g1_shift, (real(0.3), real(0.4)), root_tol)?,
        c4_to_c_double_star: find_threshold(qhat2, (real(0.35), real(0.45)), root_tol)?,
        g2_crossing: find_threshold(g2_shift, (real(0.4), real(0.45)), root_tol)?,
    })
}

/// The piecewise capacity of the full four-input family, selecting the
/// applicable branch by the computed thresholds.
pub fn piecewise_capacity<T: Real>(
    epsilon: T,
    thresholds: &EpsilonThresholds<T>,
) -> Result<CapacityValue<T>> {
    let set = candidate_capacities(epsilon)?;
    let value = if epsilon <= thresholds.c_star_to_c4 {
        set.c_star
    } else if epsilon <= thresholds.c4_to_c_double_star {
        set.c4
    } else {
        set.c_double_star
    };
    CapacityValue::new(value)
}

/// Comparison of the reconstructed `{2,3,4}`-case weights at a small
/// `epsilon` against their analytic limit `(3/5, 7/10 - 4/(5e), 4/(5e) - 3/10)`.
#[derive(Debug, Clone)]
pub struct QhatLimitComparison<T: Real> {
    pub epsilon: T,
    pub computed: SignedWeightVector<T>,
    pub limit: SignedWeightVector<T>,
}

/// Evaluates the `{2,3,4}`-case weights at `epsilon = 1e-4` next to the
/// analytic small-`epsilon` limit.
pub fn qhat_limit_check<T: Real>() -> Result<QhatLimitComparison<T>> {
    let epsilon = real::<T>(1e-4);
    let computed = case1_input_weights(epsilon)?;
    let e = real::<T>(std::f64::consts::E);
    let five = real::<T>(5.0);
    let limit = SignedWeightVector::new(vec![
        real::<T>(0.6),
        real::<T>(0.7) - real::<T>(4.0) / (five * e),
        real::<T>(4.0) / (five * e) - real::<T>(0.3),
    ])?;
    Ok(QhatLimitComparison {
        epsilon,
        computed,
        limit,
    })
}

/// Capacity of the full family channel via the exact driver.
pub fn family_capacity<T: Real>(epsilon: T) -> Result<CapacityValue<T>> {
    let channel = EpsilonFamilyChannel::new(epsilon)?.channel();
    Ok(capacity(&channel, &CapacityOptions::default())?.capacity)
}
