//! Iterative Blahut-Arimoto solvers, used as the independent ground truth
//! for the exact algorithms and as the seed for hybrid support detection.
//!
//! Both solvers maintain the standard bound sandwich: at input law `Q` with
//! output `sigma = W . Q`, the mutual information `sum_x Q(x) D(W_x||sigma)`
//! is a lower bound on capacity and `max_x D(W_x||sigma)` an upper bound.
//! Iteration stops when the certified gap drops below `tol`. Recorded trace
//! points carry the best bounds certified so far, which makes them monotone
//! by construction even though the raw per-iteration upper bound need not be.

use std::time::{Duration, Instant};

use crate::error::{CapacityError, Result};
use crate::prob::{CapacityValue, ClassicalChannel, Distribution};
use crate::quantum::{matrix_log, CqChannel};
use crate::scalar::{real, to_f64, Real};
use crate::tol;

/// One recorded point of the bound sandwich.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint<T: Real> {
    pub iteration: usize,
    pub lower_bound: T,
    pub upper_bound: T,
}

/// Convergence record of a Blahut-Arimoto run.
#[derive(Debug, Clone)]
pub struct IterationTrace<T: Real> {
    pub iterations: usize,
    pub lower_bound: T,
    pub upper_bound: T,
    pub gap: T,
    pub elapsed: Duration,
    /// Best-so-far bounds at powers of two and at the final iteration.
    pub history: Vec<TracePoint<T>>,
}

fn should_record(it: usize) -> bool {
    it & (it - 1) == 0
}

/// Classical Blahut-Arimoto. Returns the capacity estimate (the certified
/// lower bound), the final input law, and the convergence trace.
pub fn blahut_arimoto<T: Real>(
    channel: &ClassicalChannel<T>,
    tol_gap: T,
    max_iter: usize,
) -> Result<(CapacityValue<T>, Distribution<T>, IterationTrace<T>)> {
    if tol_gap <= T::zero() {
        return Err(CapacityError::Invalid {
            what: "blahut_arimoto",
            detail: "tolerance must be positive".into(),
        });
    }
    let start = Instant::now();
    let n1 = channel.num_inputs();
    let n2 = channel.num_outputs();
    let rows: Vec<Vec<T>> = (0..n1).map(|x| channel.row(x)).collect();
    let mut q = vec![T::one() / real::<T>(n1 as f64); n1];
    let mut best_lower = T::zero();
    let mut best_upper = real::<T>(f64::INFINITY);
    let mut history = Vec::new();
    let mut div = vec![T::zero(); n1];

    for it in 1..=max_iter {
        let mut out = vec![T::zero(); n2];
        for x in 0..n1 {
            for y in 0..n2 {
                out[y] += q[x] * rows[x][y];
            }
        }
        let mut lower = T::zero();
        let mut upper = real::<T>(f64::NEG_INFINITY);
        for x in 0..n1 {
            let mut d = T::zero();
            for y in 0..n2 {
                let w = rows[x][y];
                if w > T::zero() {
                    d += w * (w / out[y]).ln();
                }
            }
            div[x] = d;
            lower += q[x] * d;
            if d > upper {
                upper = d;
            }
        }
        if lower > best_lower {
            best_lower = lower;
        }
        if upper < best_upper {
            best_upper = upper;
        }
        if should_record(it) {
            history.push(TracePoint {
                iteration: it,
                lower_bound: best_lower,
                upper_bound: best_upper,
            });
        }
        if upper - lower <= tol_gap {
            if !should_record(it) {
                history.push(TracePoint {
                    iteration: it,
                    lower_bound: best_lower,
                    upper_bound: best_upper,
                });
            }
            let trace = IterationTrace {
                iterations: it,
                lower_bound: lower,
                upper_bound: upper,
                gap: upper - lower,
                elapsed: start.elapsed(),
                history,
            };
            return Ok((CapacityValue::new(lower)?, Distribution::new(normalize(q))?, trace));
        }
        // multiplicative update q'(x) ~ q(x) exp(D_x), stabilized
        let dmax = upper;
        let mut z = T::zero();
        for x in 0..n1 {
            q[x] *= (div[x] - dmax).exp();
            z += q[x];
        }
        for v in q.iter_mut() {
            *v /= z;
        }
    }
    Err(CapacityError::MaxIterExceeded {
        max_iter,
        lower: to_f64(best_lower),
        upper: to_f64(best_upper),
    })
}

fn normalize<T: Real>(mut q: Vec<T>) -> Vec<T> {
    let s: T = q.iter().copied().fold(T::zero(), |a, b| a + b);
    for v in q.iter_mut() {
        *v /= s;
    }
    q
}

/// Best-effort run for support seeding: iterates until the gap closes or
/// the cap is hit, returning the reached input law either way.
pub(crate) fn seed_input_law<T: Real>(
    channel: &ClassicalChannel<T>,
    tol_gap: T,
    max_iter: usize,
) -> Distribution<T> {
    let n1 = channel.num_inputs();
    let n2 = channel.num_outputs();
    let rows: Vec<Vec<T>> = (0..n1).map(|x| channel.row(x)).collect();
    let mut q = vec![T::one() / real::<T>(n1 as f64); n1];
    let mut div = vec![T::zero(); n1];
    for _ in 0..max_iter {
        let mut out = vec![T::zero(); n2];
        for x in 0..n1 {
            for y in 0..n2 {
                out[y] += q[x] * rows[x][y];
            }
        }
        let mut lower = T::zero();
        let mut upper = real::<T>(f64::NEG_INFINITY);
        for x in 0..n1 {
            let mut d = T::zero();
            for y in 0..n2 {
                let w = rows[x][y];
                if w > T::zero() {
                    d += w * (w / out[y]).ln();
                }
            }
            div[x] = d;
            lower += q[x] * d;
            if d > upper {
                upper = d;
            }
        }
        if upper - lower <= tol_gap {
            break;
        }
        let mut z = T::zero();
        for x in 0..n1 {
            q[x] *= (div[x] - upper).exp();
            z += q[x];
        }
        for v in q.iter_mut() {
            *v /= z;
        }
    }
    Distribution::new(normalize(q)).expect("multiplicative updates stay on the simplex")
}

/// Classical-quantum Blahut-Arimoto with the input-averaged state update.
///
/// Every state must be strictly positive definite so the relative entropies
/// stay finite along the whole trajectory.
pub fn blahut_arimoto_cq<T: Real>(
    cq: &CqChannel<T>,
    tol_gap: T,
    max_iter: usize,
) -> Result<(CapacityValue<T>, Distribution<T>, IterationTrace<T>)> {
    if tol_gap <= T::zero() {
        return Err(CapacityError::Invalid {
            what: "blahut_arimoto_cq",
            detail: "tolerance must be positive".into(),
        });
    }
    let start = Instant::now();
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
    // Tr W_x log W_x, fixed across iterations
    let tr_w_log_w: Vec<T> = (0..n1)
        .map(|x| {
            cq.state(x)
                .as_hermitian()
                .eigenvalues()
                .into_iter()
                .filter(|v| *v > T::zero())
                .fold(T::zero(), |acc, v| acc + v * v.ln())
        })
        .collect();

    let mut q = Distribution::uniform(n1);
    let mut best_lower = T::zero();
    let mut best_upper = real::<T>(f64::INFINITY);
    let mut history = Vec::new();

    for it in 1..=max_iter {
        let sigma = cq.average_state(&q)?;
        let log_sigma = matrix_log(sigma.as_hermitian())?;
        let mut div = vec![T::zero(); n1];
        let mut lower = T::zero();
        let mut upper = real::<T>(f64::NEG_INFINITY);
        for x in 0..n1 {
            let d = tr_w_log_w[x] - cq.state(x).as_hermitian().trace_product(&log_sigma);
            div[x] = d;
            lower += q.get(x) * d;
            if d > upper {
                upper = d;
            }
        }
        if lower > best_lower {
            best_lower = lower;
        }
        if upper < best_upper {
            best_upper = upper;
        }
        if should_record(it) {
            history.push(TracePoint {
                iteration: it,
                lower_bound: best_lower,
                upper_bound: best_upper,
            });
        }
        if upper - lower <= tol_gap {
            if !should_record(it) {
                history.push(TracePoint {
                    iteration: it,
                    lower_bound: best_lower,
                    upper_bound: best_upper,
                });
            }
            let trace = IterationTrace {
                iterations: it,
                lower_bound: lower,
                upper_bound: upper,
                gap: upper - lower,
                elapsed: start.elapsed(),
                history,
            };
            let cap = CapacityValue::new(if lower < T::zero() { T::zero() } else { lower })?;
            return Ok((cap, q, trace));
        }
        let mut w: Vec<T> = (0..n1).map(|x| q.get(x) * (div[x] - upper).exp()).collect();
        let z: T = w.iter().copied().fold(T::zero(), |a, b| a + b);
        for v in w.iter_mut() {
            *v /= z;
        }
        q = Distribution::new(w)?;
    }
    Err(CapacityError::MaxIterExceeded {
        max_iter,
        lower: to_f64(best_lower),
        upper: to_f64(best_upper),
    })
}

/// Input indices whose Blahut-Arimoto-optimal mass reaches `mass_cutoff`,
/// intended as the seed support for the exact solver.
pub fn hybrid_support_detect<T: Real>(
    channel: &ClassicalChannel<T>,
    mass_cutoff: T,
) -> Result<Vec<usize>> {
    let n1 = channel.num_inputs();
    if mass_cutoff <= T::zero() || mass_cutoff >= T::one() / real::<T>(n1 as f64) {
        return Err(CapacityError::Invalid {
            what: "hybrid_support_detect",
            detail: "mass cutoff must lie in (0, 1/n1)".into(),
        });
    }
    let (_, q, _) = blahut_arimoto(
        channel,
        real::<T>(tol::BA_DEFAULT_TOL),
        tol::BA_DEFAULT_MAX_ITER,
    )?;
    Ok((0..n1).filter(|&x| q.get(x) >= mass_cutoff).collect())
}
