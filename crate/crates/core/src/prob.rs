//! Probability-simplex types and classical information measures.
//!
//! Everything speaks natural logarithms internally; conversion to bits
//! happens only at presentation time via [`CapacityValue::bits`].

use nalgebra::{DMatrix, DVector};

use crate::error::{CapacityError, Result};
use crate::scalar::{infinity, real, to_f64, Real};
use crate::tol;

/// Finite probability vector.
///
/// Entries are nonnegative within [`tol::TAU_NEG`] (small negatives are
/// clamped to zero on construction) and sum to one within [`tol::TAU_SUM`].
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<T: Real> {
    probs: Vec<T>,
}

impl<T: Real> Distribution<T> {
    pub fn new(probs: Vec<T>) -> Result<Self> {
        if probs.is_empty() {
            return Err(CapacityError::Invalid {
                what: "Distribution",
                detail: "length must be at least 1".into(),
            });
        }
        let mut clamped = probs;
        let mut sum = T::zero();
        for (i, p) in clamped.iter_mut().enumerate() {
            if *p < -real::<T>(tol::TAU_NEG) {
                return Err(CapacityError::Invalid {
                    what: "Distribution",
                    detail: format!("entry {i} is negative: {}", to_f64(*p)),
                });
            }
            if *p < T::zero() {
                *p = T::zero();
            }
            sum += *p;
        }
        if (sum - T::one()).abs() > real::<T>(tol::TAU_SUM) {
            return Err(CapacityError::Invalid {
                what: "Distribution",
                detail: format!("entries sum to {}, not 1", to_f64(sum)),
            });
        }
        Ok(Self { probs: clamped })
    }

    /// Uniform distribution on `n` points.
    pub fn uniform(n: usize) -> Self {
        let p = T::one() / real::<T>(n as f64);
        Self { probs: vec![p; n] }
    }

    /// Point mass at `index`.
    pub fn point_mass(n: usize, index: usize) -> Self {
        let mut probs = vec![T::zero(); n];
        probs[index] = T::one();
        Self { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn get(&self, i: usize) -> T {
        self.probs[i]
    }

    /// Indices with `p(x) > 0`.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.probs[i] > T::zero()).collect()
    }
}

/// Affine weight vector: entries sum to one but may be negative.
///
/// This is the shape of the reconstructed input weights before the
/// nonnegativity gate, and of mixture coefficients in general.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedWeightVector<T: Real> {
    weights: Vec<T>,
}

impl<T: Real> SignedWeightVector<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return Err(CapacityError::Invalid {
                what: "SignedWeightVector",
                detail: "length must be at least 1".into(),
            });
        }
        let sum: T = weights.iter().copied().fold(T::zero(), |a, b| a + b);
        if (sum - T::one()).abs() > real::<T>(tol::TAU_SUM) {
            return Err(CapacityError::Invalid {
                what: "SignedWeightVector",
                detail: format!("entries sum to {}, not 1", to_f64(sum)),
            });
        }
        Ok(Self { weights })
    }

    /// Constructs without the affine check; used by solvers whose output is
    /// checked by tests rather than gated at construction.
    pub(crate) fn new_unchecked(weights: Vec<T>) -> Self {
        Self { weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn get(&self, i: usize) -> T {
        self.weights[i]
    }

    pub fn sum(&self) -> T {
        self.weights.iter().copied().fold(T::zero(), |a, b| a + b)
    }

    /// Indices with weight below `-threshold`.
    pub fn negative_indices(&self, threshold: T) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.weights[i] < -threshold).collect()
    }

    /// Clamps entries in `[-threshold, 0)` to zero and returns a
    /// distribution, if the result is a valid one.
    pub fn into_distribution(self, threshold: T) -> Result<Distribution<T>> {
        let mut w = self.weights;
        for v in w.iter_mut() {
            if *v < T::zero() && *v >= -threshold {
                *v = T::zero();
            }
        }
        Distribution::new(w)
    }
}

/// Discrete memoryless channel as a row-stochastic matrix `W(y|x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalChannel<T: Real> {
    matrix: DMatrix<T>,
    input_labels: Option<Vec<String>>,
    output_labels: Option<Vec<String>>,
}

impl<T: Real> ClassicalChannel<T> {
    /// Builds a channel from rows; each row must be a valid distribution.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(CapacityError::Invalid {
                what: "ClassicalChannel",
                detail: "need at least one input row".into(),
            });
        }
        let n2 = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * n2);
        for (x, row) in rows.iter().enumerate() {
            if row.len() != n2 {
                return Err(CapacityError::Dimension {
                    what: "channel row",
                    expected: n2,
                    found: row.len(),
                });
            }
            let d = Distribution::new(row.clone()).map_err(|e| CapacityError::Invalid {
                what: "ClassicalChannel",
                detail: format!("row {x}: {e}"),
            })?;
            data.extend_from_slice(d.probs());
        }
        let matrix = DMatrix::from_row_slice(rows.len(), n2, &data);
        Ok(Self {
            matrix,
            input_labels: None,
            output_labels: None,
        })
    }

    pub fn with_labels(
        mut self,
        input_labels: Option<Vec<String>>,
        output_labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if let Some(ref l) = input_labels {
            if l.len() != self.num_inputs() {
                return Err(CapacityError::Dimension {
                    what: "input labels",
                    expected: self.num_inputs(),
                    found: l.len(),
                });
            }
        }
        if let Some(ref l) = output_labels {
            if l.len() != self.num_outputs() {
                return Err(CapacityError::Dimension {
                    what: "output labels",
                    expected: self.num_outputs(),
                    found: l.len(),
                });
            }
        }
        self.input_labels = input_labels;
        self.output_labels = output_labels;
        Ok(self)
    }

    pub fn num_inputs(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn num_outputs(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    pub fn input_labels(&self) -> Option<&[String]> {
        self.input_labels.as_deref()
    }

    pub fn output_labels(&self) -> Option<&[String]> {
        self.output_labels.as_deref()
    }

    /// `W(y|x)`.
    pub fn prob(&self, x: usize, y: usize) -> T {
        self.matrix[(x, y)]
    }

    /// Row `x` as a plain vector.
    pub fn row(&self, x: usize) -> Vec<T> {
        self.matrix.row(x).iter().copied().collect()
    }

    pub fn row_distribution(&self, x: usize) -> Distribution<T> {
        Distribution { probs: self.row(x) }
    }

    /// Channel restricted to the given input indices (in the given order).
    pub fn restrict_inputs(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(CapacityError::Invalid {
                what: "ClassicalChannel",
                detail: "restriction to an empty input set".into(),
            });
        }
        let rows: Vec<Vec<T>> = indices.iter().map(|&x| self.row(x)).collect();
        Self::from_rows(rows)
    }

    /// Channel restricted to the given output indices (in the given order).
    /// Rows are not renormalized; callers drop only all-zero columns.
    pub(crate) fn restrict_outputs(&self, indices: &[usize]) -> Self {
        let n1 = self.num_inputs();
        let mut m = DMatrix::zeros(n1, indices.len());
        for (k, &y) in indices.iter().enumerate() {
            for x in 0..n1 {
                m[(x, k)] = self.matrix[(x, y)];
            }
        }
        Self {
            matrix: m,
            input_labels: None,
            output_labels: None,
        }
    }

    /// Output columns whose total mass is positive.
    pub(crate) fn nonzero_output_columns(&self) -> Vec<usize> {
        (0..self.num_outputs())
            .filter(|&y| {
                (0..self.num_inputs()).any(|x| self.matrix[(x, y)] > T::zero())
            })
            .collect()
    }
}

/// Capacity in nats; nonnegative. Units conversion is presentation-only.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CapacityValue<T: Real>(T);

impl<T: Real> CapacityValue<T> {
    /// Clamps tiny numerical negatives to zero; rejects NaN and values more
    /// negative than the equal-divergence tolerance.
    pub fn new(nats: T) -> Result<Self> {
        let v = to_f64(nats);
        if v.is_nan() {
            return Err(CapacityError::Invalid {
                what: "CapacityValue",
                detail: "NaN".into(),
            });
        }
        if nats < -real::<T>(tol::TAU_EQ) {
            return Err(CapacityError::Invalid {
                what: "CapacityValue",
                detail: format!("negative capacity {v}"),
            });
        }
        Ok(Self(if nats < T::zero() { T::zero() } else { nats }))
    }

    pub fn nats(&self) -> T {
        self.0
    }

    pub fn bits(&self) -> T {
        self.0 / T::ln_2()
    }
}

/// Shannon entropy in nats, with the `0 log 0 = 0` convention.
pub fn entropy<T: Real>(p: &Distribution<T>) -> T {
    entropy_slice(p.probs())
}

pub(crate) fn entropy_slice<T: Real>(p: &[T]) -> T {
    let mut h = T::zero();
    for &v in p {
        if v > T::zero() {
            h -= v * v.ln();
        }
    }
    h
}

/// Kullback-Leibler divergence `D(p || q)` in nats; `+inf` when the support
/// of `p` escapes the support of `q`.
pub fn kl_divergence<T: Real>(p: &Distribution<T>, q: &Distribution<T>) -> Result<T> {
    if p.len() != q.len() {
        return Err(CapacityError::Dimension {
            what: "kl_divergence",
            expected: p.len(),
            found: q.len(),
        });
    }
    Ok(kl_slices(p.probs(), q.probs()))
}

pub(crate) fn kl_slices<T: Real>(p: &[T], q: &[T]) -> T {
    let mut d = T::zero();
    for (&a, &b) in p.iter().zip(q.iter()) {
        if a > T::zero() {
            if b <= T::zero() {
                return infinity();
            }
            d += a * (a / b).ln();
        }
    }
    d
}

/// Output law `W . Q_X` of the channel under the given input.
pub fn output_distribution<T: Real>(
    input: &Distribution<T>,
    channel: &ClassicalChannel<T>,
) -> Result<Distribution<T>> {
    if input.len() != channel.num_inputs() {
        return Err(CapacityError::Dimension {
            what: "output_distribution input",
            expected: channel.num_inputs(),
            found: input.len(),
        });
    }
    let q = DVector::from_column_slice(input.probs());
    let out = channel.matrix().transpose() * q;
    Ok(Distribution {
        probs: out.iter().map(|&v| if v < T::zero() { T::zero() } else { v }).collect(),
    })
}

/// Mutual information `sum_x Q(x) D(W_x || W . Q)` in nats.
pub fn mutual_information<T: Real>(
    input: &Distribution<T>,
    channel: &ClassicalChannel<T>,
) -> Result<T> {
    let out = output_distribution(input, channel)?;
    let mut mi = T::zero();
    for x in 0..channel.num_inputs() {
        let qx = input.get(x);
        if qx > T::zero() {
            mi += qx * kl_slices(&channel.row(x), out.probs());
        }
    }
    Ok(mi)
}
