//! Small dense linear-algebra helpers shared by the exact solvers.

use nalgebra::{DMatrix, DVector};

use crate::error::{CapacityError, Result};
use crate::scalar::{real, to_f64, Real};
use crate::tol;

/// Reciprocal 2-norm condition estimate `sigma_min / sigma_max` of a
/// (possibly rectangular) matrix. Zero for a rank-deficient matrix.
pub fn rcond<T: Real>(m: &DMatrix<T>) -> f64 {
    let svd = m.clone().svd(false, false);
    let mut smin = f64::INFINITY;
    let mut smax = 0.0f64;
    for s in svd.singular_values.iter() {
        let v = to_f64(*s);
        smin = smin.min(v);
        smax = smax.max(v);
    }
    if smax == 0.0 {
        0.0
    } else {
        smin / smax
    }
}

/// Inverts a square matrix, rejecting numerically singular inputs.
pub fn invert_checked<T: Real>(m: &DMatrix<T>, floor: f64) -> Result<DMatrix<T>> {
    let rc = rcond(m);
    if !rc.is_finite() || rc < floor {
        return Err(CapacityError::SingularChannel { rcond: rc, floor });
    }
    m.clone()
        .try_inverse()
        .ok_or(CapacityError::SingularChannel { rcond: rc, floor })
}

/// Least-squares solution of `A q = b` via SVD, with the max-norm residual.
pub fn least_squares<T: Real>(a: &DMatrix<T>, b: &DVector<T>) -> Result<(DVector<T>, T)> {
    let svd = a.clone().svd(true, true);
    let q = svd
        .solve(b, real::<T>(tol::KAPPA_MIN))
        .map_err(|detail| CapacityError::Invalid {
            what: "least_squares",
            detail: detail.into(),
        })?;
    let resid = (a * &q - b).amax();
    Ok((q, resid))
}

/// Orthonormal basis of the row-space orthogonal complement (the functions
/// annihilating every channel row), from the eigenvectors of the Gram
/// matrix `M^T M` belonging to its vanishing eigenvalues.
pub fn null_space_basis<T: Real>(m: &DMatrix<T>) -> Vec<DVector<T>> {
    let n1 = m.nrows();
    let n2 = m.ncols();
    let gram = m.transpose() * m;
    let se = gram.symmetric_eigen();
    let mut idx: Vec<usize> = (0..n2).collect();
    idx.sort_by(|&a, &b| {
        se.eigenvalues[a]
            .partial_cmp(&se.eigenvalues[b])
            .expect("eigenvalues are ordered")
    });
    idx.into_iter()
        .take(n2 - n1)
        .map(|k| se.eigenvectors.column(k).into_owned())
        .collect()
}

/// Disjoint output pairs `(y, y')` whose two channel columns are linearly
/// dependent, together with the dependence ratio `lambda` (`col_y' = lambda
/// col_y`). Scanned in lexicographic order, greedily keeping disjoint pairs.
///
/// Each such pair supports a two-point null-space direction, which is what
/// makes the closed-form solution of the free-parameter minimization
/// available.
pub fn dependent_column_pairs<T: Real>(m: &DMatrix<T>) -> Vec<(usize, usize, T)> {
    let n1 = m.nrows();
    let n2 = m.ncols();
    let mut used = vec![false; n2];
    let mut pairs = Vec::new();
    for y in 0..n2 {
        if used[y] {
            continue;
        }
        for yp in (y + 1)..n2 {
            if used[yp] {
                continue;
            }
            let mut sub = DMatrix::zeros(n1, 2);
            for x in 0..n1 {
                sub[(x, 0)] = m[(x, y)];
                sub[(x, 1)] = m[(x, yp)];
            }
            let svd = sub.clone().svd(false, false);
            let s = &svd.singular_values;
            let smax = to_f64(s.max());
            let smin = s.iter().map(|v| to_f64(*v)).fold(f64::INFINITY, f64::min);
            if smax > 0.0 && smin <= tol::TAU_LIN * smax {
                let cy: DVector<T> = sub.column(0).into();
                let cyp: DVector<T> = sub.column(1).into();
                let denom = cy.dot(&cy);
                if denom <= T::zero() {
                    continue;
                }
                let lambda = cy.dot(&cyp) / denom;
                if lambda <= T::zero() {
                    continue;
                }
                used[y] = true;
                used[yp] = true;
                pairs.push((y, yp, lambda));
                break;
            }
        }
    }
    pairs
}

/// `log sum_i exp(v_i)`, stabilized against overflow.
pub fn log_sum_exp<T: Real>(v: &DVector<T>) -> T {
    let m = v.max();
    let mut s = T::zero();
    for &x in v.iter() {
        s += (x - m).exp();
    }
    m + s.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rcond_identity_is_one() {
        let m = DMatrix::<f64>::identity(4, 4);
        assert_abs_diff_eq!(rcond(&m), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rcond_duplicate_rows_is_zero() {
        let m = DMatrix::<f64>::from_row_slice(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        assert!(rcond(&m) < 1e-15);
        assert!(matches!(
            invert_checked(&m, tol::KAPPA_MIN),
            Err(CapacityError::SingularChannel { .. })
        ));
    }

    #[test]
    fn invert_bsc() {
        let p = 0.1;
        let m = DMatrix::<f64>::from_row_slice(2, 2, &[1.0 - p, p, p, 1.0 - p]);
        let inv = invert_checked(&m, tol::KAPPA_MIN).unwrap();
        let d = 1.0 - 2.0 * p;
        assert_abs_diff_eq!(inv[(0, 0)], (1.0 - p) / d, epsilon = 1e-12);
        assert_abs_diff_eq!(inv[(0, 1)], -p / d, epsilon = 1e-12);
    }

    #[test]
    fn null_space_annihilates_rows() {
        let m = DMatrix::<f64>::from_row_slice(2, 4, &[0.1, 0.2, 0.3, 0.4, 0.4, 0.3, 0.2, 0.1]);
        let ns = null_space_basis(&m);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let r = &m * v;
            assert!(r.amax() < 1e-12);
            assert_abs_diff_eq!(v.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn dependent_pairs_detected() {
        // columns 0,1 proportional (ratio 1), columns 2,3 proportional (ratio 1/2)
        let m = DMatrix::<f64>::from_row_slice(
            2,
            4,
            &[0.2, 0.2, 0.4, 0.2, 0.35, 0.35, 0.2, 0.1],
        );
        let pairs = dependent_column_pairs(&m);
        assert_eq!(pairs.len(), 2);
        assert_eq!((pairs[0].0, pairs[0].1), (0, 1));
        assert_eq!((pairs[1].0, pairs[1].1), (2, 3));
        assert_abs_diff_eq!(pairs[0].2, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pairs[1].2, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn log_sum_exp_stable() {
        let v = DVector::from_vec(vec![1000.0f64, 1000.0]);
        assert_abs_diff_eq!(log_sum_exp(&v), 1000.0 + 2.0f64.ln(), epsilon = 1e-12);
    }
}
