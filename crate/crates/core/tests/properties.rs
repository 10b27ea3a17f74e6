//! Property tests for the structural invariants of the information
//! measures, the Hermitian encoding, and the exact solver.

use nalgebra::{Complex, DMatrix, DVector};
use proptest::prelude::*;

use chancap::linalg;
use chancap::prob::{
    entropy, kl_divergence, mutual_information, output_distribution, ClassicalChannel,
    Distribution,
};
use chancap::quantum::{matrix_exp, matrix_log, vectorize, HermitianMatrix};
use chancap::{algorithm1, equal_divergence_residual};

fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    for x in v.iter_mut() {
        *x /= s;
    }
    v
}

fn dist_strategy(n: usize) -> impl Strategy<Value = Distribution<f64>> {
    prop::collection::vec(1e-3..1.0f64, n).prop_map(|v| Distribution::new(normalize(v)).unwrap())
}

fn channel_strategy(n1: usize, n2: usize) -> impl Strategy<Value = ClassicalChannel<f64>> {
    prop::collection::vec(prop::collection::vec(1e-3..1.0f64, n2), n1)
        .prop_map(|rows| ClassicalChannel::from_rows(rows.into_iter().map(normalize).collect()).unwrap())
}

fn hermitian_strategy(n: usize) -> impl Strategy<Value = HermitianMatrix<f64>> {
    prop::collection::vec(-1.0..1.0f64, 2 * n * n).prop_map(move |v| {
        let mut m = DMatrix::zeros(n, n);
        let mut k = 0;
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = Complex::new(v[k], v[k + 1]);
                k += 2;
            }
        }
        let adj = m.adjoint();
        HermitianMatrix::new((m + adj) * Complex::new(0.5, 0.0)).unwrap()
    })
}

proptest! {
    #[test]
    fn entropy_bounds(p in dist_strategy(5)) {
        let h = entropy(&p);
        prop_assert!(h >= -1e-12);
        prop_assert!(h <= 5.0f64.ln() + 1e-12);
    }

    #[test]
    fn kl_nonnegative_and_zero_iff_equal(p in dist_strategy(4), q in dist_strategy(4)) {
        let d = kl_divergence(&p, &q).unwrap();
        prop_assert!(d >= -1e-12);
        let max_diff = (0..4)
            .map(|i| (p.get(i) - q.get(i)).abs())
            .fold(0.0f64, f64::max);
        if d.abs() <= 1e-15 {
            prop_assert!(max_diff <= 1e-6);
        }
        if max_diff <= 1e-12 {
            prop_assert!(d <= 1e-9);
        }
    }

    #[test]
    fn mutual_information_entropy_identity(q in dist_strategy(3), w in channel_strategy(3, 4)) {
        let mi = mutual_information(&q, &w).unwrap();
        let out = output_distribution(&q, &w).unwrap();
        let alt = entropy(&out)
            - (0..3).map(|x| q.get(x) * entropy(&w.row_distribution(x))).sum::<f64>();
        prop_assert!((mi - alt).abs() <= 1e-12);
        prop_assert!(mi >= -1e-12);
    }

    #[test]
    fn output_distribution_is_affine(
        p in dist_strategy(3),
        q in dist_strategy(3),
        w in channel_strategy(3, 3),
        lambda in 0.0..1.0f64,
    ) {
        let mix = Distribution::new(
            (0..3).map(|i| lambda * p.get(i) + (1.0 - lambda) * q.get(i)).collect()
        ).unwrap();
        let out_mix = output_distribution(&mix, &w).unwrap();
        let out_p = output_distribution(&p, &w).unwrap();
        let out_q = output_distribution(&q, &w).unwrap();
        for y in 0..3 {
            let expect = lambda * out_p.get(y) + (1.0 - lambda) * out_q.get(y);
            prop_assert!((out_mix.get(y) - expect).abs() <= 1e-12);
        }
    }

    #[test]
    fn vectorize_is_trace_isometry(a in hermitian_strategy(3), b in hermitian_strategy(3)) {
        let lhs = a.trace_product(&b);
        let rhs = vectorize(&a).dot(&vectorize(&b));
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn log_exp_roundtrip(a in hermitian_strategy(2)) {
        let e = matrix_exp(&a);
        let back = matrix_log(&e).unwrap();
        let dev = (back.data() - a.data()).camax();
        prop_assert!(dev <= 1e-9);
    }

    #[test]
    fn algorithm1_structural_invariants(w in channel_strategy(4, 4)) {
        prop_assume!(linalg::rcond(w.matrix()) >= 1e-4);
        let sol = algorithm1(&w).unwrap();
        // reconstructed weights always sum to one
        prop_assert!((sol.input_candidate.sum() - 1.0).abs() <= 1e-9);
        // the weights reproduce the output law through the channel
        let q = DVector::from_column_slice(sol.input_candidate.weights());
        let re = w.matrix().transpose() * q;
        for y in 0..4 {
            prop_assert!((re[y] - sol.output_law.get(y)).abs() <= 1e-9);
        }
        // equal divergence across all inputs
        prop_assert!(equal_divergence_residual(&sol, &w) <= 1e-10);
        // minimax: max divergence from the output law dominates the value
        let max_d = (0..4)
            .map(|x| kl_divergence(&w.row_distribution(x), &sol.output_law).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(max_d >= sol.capacity.nats() - 1e-10);
    }
}
