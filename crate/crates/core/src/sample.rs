//! Seeded random instance generators for tests and benchmarks.
//!
//! Channels draw their rows from a flat Dirichlet and are rejection-sampled
//! until a conditioning floor holds, so downstream solves stay numerically
//! honest. All generators are deterministic functions of the supplied RNG.

use nalgebra::{Complex, DMatrix};
use rand::Rng;

use crate::error::{CapacityError, Result};
use crate::exact::{algorithm1, SolutionStatus};
use crate::linalg;
use crate::prob::{ClassicalChannel, Distribution};
use crate::quantum::{
    quantum_relative_entropy, vectorize, CqChannel, DensityMatrix, HermitianMatrix,
};
use crate::scalar::{real, Real};

/// Flat-Dirichlet probability vector of length `n`.
fn dirichlet_row<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    // normalized iid Exp(1) draws
    let mut row: Vec<f64> = (0..n)
        .map(|_| -(1.0 - rng.gen::<f64>()).ln())
        .collect();
    let s: f64 = row.iter().sum();
    for v in row.iter_mut() {
        *v /= s;
    }
    row
}

/// Random channel with rows resampled until the reciprocal condition of the
/// row matrix reaches `min_rcond`.
pub fn random_channel<T: Real, R: Rng>(
    rng: &mut R,
    n1: usize,
    n2: usize,
    min_rcond: f64,
) -> Result<ClassicalChannel<T>> {
    for _ in 0..10_000 {
        let rows: Vec<Vec<f64>> = (0..n1).map(|_| dirichlet_row(rng, n2)).collect();
        let m = DMatrix::from_fn(n1, n2, |i, j| rows[i][j]);
        if linalg::rcond(&m) < min_rcond {
            continue;
        }
        let rows_t: Vec<Vec<T>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| real::<T>(v)).collect())
            .collect();
        return ClassicalChannel::from_rows(rows_t);
    }
    Err(CapacityError::Invalid {
        what: "random_channel",
        detail: format!("no channel with rcond >= {min_rcond} found"),
    })
}

/// Random full-rank qubit-or-larger state: a complex Wishart draw mixed with
/// the maximally mixed state by `mixing` in `(0, 1)`.
pub fn random_state<T: Real, R: Rng>(rng: &mut R, dim: usize, mixing: f64) -> DensityMatrix<T> {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        Complex::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
    });
    let w = &g * g.adjoint();
    let tr: f64 = (0..dim).map(|i| w[(i, i)].re).sum();
    let floor = mixing / dim as f64;
    let m = DMatrix::from_fn(dim, dim, |i, j| {
        let v = w[(i, j)] * ((1.0 - mixing) / tr);
        let d = if i == j { floor } else { 0.0 };
        Complex::new(real::<T>(v.re + d), real::<T>(v.im))
    });
    DensityMatrix::from_complex(m).expect("construction yields a valid state")
}

/// Random classical-quantum channel with `dim^2` full-rank states whose
/// vectorizations clear the conditioning floor.
pub fn random_cq_ensemble<T: Real, R: Rng>(
    rng: &mut R,
    dim: usize,
    mixing: f64,
    min_rcond: f64,
) -> Result<CqChannel<T>> {
    let n1 = dim * dim;
    for _ in 0..10_000 {
        let states: Vec<DensityMatrix<T>> =
            (0..n1).map(|_| random_state(rng, dim, mixing)).collect();
        let mut s = DMatrix::zeros(n1, n1);
        for (i, st) in states.iter().enumerate() {
            let v = vectorize(st.as_hermitian());
            for k in 0..n1 {
                s[(i, k)] = v.coords()[k];
            }
        }
        if linalg::rcond(&s) < min_rcond {
            continue;
        }
        return CqChannel::new(states);
    }
    Err(CapacityError::Invalid {
        what: "random_cq_ensemble",
        detail: format!("no ensemble with rcond >= {min_rcond} found"),
    })
}

/// Four-state qubit ensemble embedding a random binary classical channel.
///
/// The first two states are diagonal (they commute) and carry the rows of an
/// invertible 2x2 classical channel; the other two are full-rank states with
/// symmetric respectively antisymmetric off-diagonal parts placed exactly on
/// the divergence sphere `D(. || sigma*) = C` around the classical optimum
/// `sigma*`. The unique equal-divergence state of the ensemble is then
/// `sigma*` itself, the reconstruction weights are the classical optimum
/// padded with zeros, the gate passes, and the exact cq capacity equals the
/// embedded classical capacity.
///
/// Returns the ensemble, the classical capacity, and the classical optimal
/// input.
pub fn embedded_classical_ensemble<R: Rng>(
    rng: &mut R,
) -> Result<(CqChannel<f64>, f64, Distribution<f64>)> {
    for _ in 0..10_000 {
        let a = 0.05 + 0.9 * rng.gen::<f64>();
        let b = 0.05 + 0.9 * rng.gen::<f64>();
        // a wide gap keeps the divergence sphere large enough for the
        // vectorized states to stay well conditioned
        if (a - b).abs() < 0.2 {
            continue;
        }
        let w = ClassicalChannel::from_rows(vec![vec![a, 1.0 - a], vec![b, 1.0 - b]])?;
        let sol = algorithm1(&w)?;
        if sol.status != SolutionStatus::Valid {
            continue;
        }
        let capacity = sol.capacity.nats();
        let sigma = DensityMatrix::<f64>::from_distribution(&sol.output_law);
        let mut states = vec![
            DensityMatrix::from_distribution(&w.row_distribution(0)),
            DensityMatrix::from_distribution(&w.row_distribution(1)),
        ];
        let sym = divergence_sphere_state(rng, &sigma, capacity, false);
        let anti = divergence_sphere_state(rng, &sigma, capacity, true);
        let (Some(s3), Some(s4)) = (sym, anti) else {
            continue;
        };
        states.push(s3);
        states.push(s4);
        let cq = CqChannel::new(states)?;
        let mut s = DMatrix::zeros(4, 4);
        for (i, st) in cq.states().iter().enumerate() {
            let v = vectorize(st.as_hermitian());
            for k in 0..4 {
                s[(i, k)] = v.coords()[k];
            }
        }
        // a healthy conditioning floor keeps the reconstructed weights'
        // structural zeros below the gate tolerance
        if linalg::rcond(&s) < 1e-3 {
            continue;
        }
        let input = sol
            .input_candidate
            .into_distribution(1e-10)
            .expect("valid gate output");
        return Ok((cq, capacity, input));
    }
    Err(CapacityError::Invalid {
        what: "embedded_classical_ensemble",
        detail: "construction did not converge".into(),
    })
}

/// Full-rank qubit state at relative entropy exactly `target` from `sigma`,
/// reached along a random traceless Hermitian direction. `with_antisymmetric`
/// selects whether the direction carries an imaginary off-diagonal part.
fn divergence_sphere_state<R: Rng>(
    rng: &mut R,
    sigma: &DensityMatrix<f64>,
    target: f64,
    with_antisymmetric: bool,
) -> Option<DensityMatrix<f64>> {
    'directions: for _ in 0..200 {
        let dz = rng.gen::<f64>() * 2.0 - 1.0;
        let dx = rng.gen::<f64>() * 2.0 - 1.0;
        let dy = if with_antisymmetric {
            rng.gen::<f64>() * 2.0 - 1.0
        } else {
            0.0
        };
        let off_abs = if with_antisymmetric { dy.abs() } else { dx.abs() };
        if off_abs < 0.3 {
            continue;
        }
        let norm = (2.0 * (dz * dz + dx * dx + dy * dy)).sqrt();
        let v = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex::new(dz / norm, 0.0),
                Complex::new(dx / norm, -dy / norm),
                Complex::new(dx / norm, dy / norm),
                Complex::new(-dz / norm, 0.0),
            ],
        );
        let state_at = |t: f64| -> DMatrix<Complex<f64>> {
            sigma.as_hermitian().data() + &v * Complex::new(t, 0.0)
        };
        let min_eig = |t: f64| -> f64 {
            HermitianMatrix::new(state_at(t))
                .expect("hermitian by construction")
                .eigenvalues()
                .into_iter()
                .fold(f64::INFINITY, f64::min)
        };
        // largest step keeping the state comfortably positive definite
        let mut hi = 1.0;
        while min_eig(hi) > 0.0 {
            hi *= 1.5;
            if hi > 1e3 {
                continue 'directions;
            }
        }
        let mut lo = 0.0;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if min_eig(mid) > 1e-6 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t_feasible = lo;
        let div_at = |t: f64| -> f64 {
            let st = DensityMatrix::from_complex(state_at(t)).expect("psd on feasible range");
            quantum_relative_entropy(&st, sigma).expect("same dimension")
        };
        if div_at(t_feasible) < target {
            continue;
        }
        let mut lo2 = 0.0;
        let mut hi2 = t_feasible;
        for _ in 0..200 {
            let mid = 0.5 * (lo2 + hi2);
            if div_at(mid) < target {
                lo2 = mid;
            } else {
                hi2 = mid;
            }
        }
        let t = 0.5 * (lo2 + hi2);
        if min_eig(t) < 1e-6 {
            continue;
        }
        return DensityMatrix::from_complex(state_at(t)).ok();
    }
    None
}
