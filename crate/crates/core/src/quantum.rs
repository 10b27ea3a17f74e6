//! Hermitian-matrix arithmetic for the classical-quantum solvers.
//!
//! Hermitian operators on an `n`-dimensional system are carried alongside an
//! isometric encoding as `n^2` real coordinates: `n` diagonal entries, then
//! the `n(n-1)/2` symmetric pair coordinates, then the `n(n-1)/2`
//! antisymmetric pair coordinates, pairs in row-major `(j > j')` order and
//! scaled by `1/sqrt(2)` so that `Tr(X Y) = <vec X, vec Y>`.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{CapacityError, Result};
use crate::prob::Distribution;
use crate::scalar::{infinity, real, to_f64, Real};
use crate::tol;

/// Hermitian matrix; construction symmetrizes as `(A + A^dag)/2` after
/// checking the deviation is within [`tol::TAU_HERM`].
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix<T: Real> {
    data: DMatrix<Complex<T>>,
}

impl<T: Real> HermitianMatrix<T> {
    pub fn new(data: DMatrix<Complex<T>>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(CapacityError::Dimension {
                what: "HermitianMatrix",
                expected: data.nrows(),
                found: data.ncols(),
            });
        }
        let adj = data.adjoint();
        let dev = (&data - &adj).camax();
        if to_f64(dev) > tol::TAU_HERM {
            return Err(CapacityError::NotHermitian {
                deviation: to_f64(dev),
            });
        }
        let half = Complex::new(real::<T>(0.5), T::zero());
        Ok(Self {
            data: (&data + adj) * half,
        })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            data: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        let mut data = DMatrix::zeros(n, n);
        for (j, &v) in diag.iter().enumerate() {
            data[(j, j)] = Complex::new(v, T::zero());
        }
        Self { data }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn data(&self) -> &DMatrix<Complex<T>> {
        &self.data
    }

    pub fn trace(&self) -> T {
        self.data.trace().re
    }

    /// `Tr(self * other)`; real for Hermitian arguments.
    pub fn trace_product(&self, other: &Self) -> T {
        let mut acc = T::zero();
        for i in 0..self.dim() {
            for k in 0..self.dim() {
                acc += (self.data[(i, k)] * other.data[(k, i)]).re;
            }
        }
        acc
    }

    /// Eigenvalues (ascending) and unitary eigenvectors.
    pub fn eigendecompose(&self) -> (Vec<T>, DMatrix<Complex<T>>) {
        let se = self.data.clone().symmetric_eigen();
        let mut idx: Vec<usize> = (0..self.dim()).collect();
        idx.sort_by(|&a, &b| {
            se.eigenvalues[a]
                .partial_cmp(&se.eigenvalues[b])
                .expect("eigenvalues are ordered")
        });
        let vals: Vec<T> = idx.iter().map(|&i| se.eigenvalues[i]).collect();
        let mut vecs = DMatrix::zeros(self.dim(), self.dim());
        for (col, &i) in idx.iter().enumerate() {
            vecs.set_column(col, &se.eigenvectors.column(i));
        }
        (vals, vecs)
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        self.eigendecompose().0
    }

    /// Applies `f` to the eigenvalues: `U f(Lambda) U^dag`.
    fn map_eigenvalues(&self, f: impl Fn(T) -> T) -> Self {
        let (vals, u) = self.eigendecompose();
        let mut scaled = u.clone();
        for (j, &v) in vals.iter().enumerate() {
            let fv = Complex::new(f(v), T::zero());
            let col = scaled.column(j) * fv;
            scaled.set_column(j, &col);
        }
        let m = &scaled * u.adjoint();
        // exact re-hermitization of rounding noise
        let adj = m.adjoint();
        let half = Complex::new(real::<T>(0.5), T::zero());
        Self {
            data: (m + adj) * half,
        }
    }

    pub fn scale(&self, factor: T) -> Self {
        Self {
            data: &self.data * Complex::new(factor, T::zero()),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            data: &self.data + &other.data,
        }
    }
}

/// Density matrix: Hermitian, positive semidefinite within [`tol::TAU_PSD`],
/// unit trace within [`tol::TAU_SUM`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    matrix: HermitianMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(matrix: HermitianMatrix<T>) -> Result<Self> {
        let tr = matrix.trace();
        if (tr - T::one()).abs() > real::<T>(tol::TAU_SUM) {
            return Err(CapacityError::Invalid {
                what: "DensityMatrix",
                detail: format!("trace {} is not 1", to_f64(tr)),
            });
        }
        let min = matrix
            .eigenvalues()
            .into_iter()
            .fold(infinity::<T>(), |a, b| if b < a { b } else { a });
        if min < -real::<T>(tol::TAU_PSD) {
            return Err(CapacityError::RankDeficient {
                state: None,
                min_eigenvalue: to_f64(min),
            });
        }
        Ok(Self { matrix })
    }

    pub fn from_complex(data: DMatrix<Complex<T>>) -> Result<Self> {
        Self::new(HermitianMatrix::new(data)?)
    }

    /// Diagonal density matrix carrying a classical distribution.
    pub fn from_distribution(p: &Distribution<T>) -> Self {
        Self {
            matrix: HermitianMatrix::from_real_diagonal(p.probs()),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let p = T::one() / real::<T>(dim as f64);
        Self {
            matrix: HermitianMatrix::from_real_diagonal(&vec![p; dim]),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix<T> {
        &self.matrix
    }

    pub fn min_eigenvalue(&self) -> T {
        self.matrix
            .eigenvalues()
            .into_iter()
            .fold(infinity::<T>(), |a, b| if b < a { b } else { a })
    }

    /// The diagonal as a classical distribution (clamping PSD noise).
    pub fn diagonal_distribution(&self) -> Result<Distribution<T>> {
        let d: Vec<T> = (0..self.dim()).map(|j| self.matrix.data()[(j, j)].re).collect();
        Distribution::new(d)
    }
}

/// Classical-quantum channel: one density matrix per classical input.
#[derive(Debug, Clone, PartialEq)]
pub struct CqChannel<T: Real> {
    states: Vec<DensityMatrix<T>>,
}

impl<T: Real> CqChannel<T> {
    pub fn new(states: Vec<DensityMatrix<T>>) -> Result<Self> {
        if states.is_empty() {
            return Err(CapacityError::Invalid {
                what: "CqChannel",
                detail: "need at least one state".into(),
            });
        }
        let dim = states[0].dim();
        for (i, s) in states.iter().enumerate() {
            if s.dim() != dim {
                return Err(CapacityError::Dimension {
                    what: "CqChannel state",
                    expected: dim,
                    found: s.dim(),
                });
            }
            let _ = i;
        }
        Ok(Self { states })
    }

    pub fn num_inputs(&self) -> usize {
        self.states.len()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn state(&self, x: usize) -> &DensityMatrix<T> {
        &self.states[x]
    }

    pub fn states(&self) -> &[DensityMatrix<T>] {
        &self.states
    }

    /// Average state `sum_x q(x) W_x`.
    pub fn average_state(&self, input: &Distribution<T>) -> Result<DensityMatrix<T>> {
        if input.len() != self.num_inputs() {
            return Err(CapacityError::Dimension {
                what: "average_state input",
                expected: self.num_inputs(),
                found: input.len(),
            });
        }
        let mut acc = HermitianMatrix::zeros(self.dim());
        for x in 0..self.num_inputs() {
            acc = acc.add(&self.states[x].as_hermitian().scale(input.get(x)));
        }
        DensityMatrix::new(acc)
    }
}

/// Real coordinates of a Hermitian matrix under the trace-orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianVector<T: Real> {
    coords: DVector<T>,
    dim: usize,
}

impl<T: Real> HermitianVector<T> {
    pub fn new(coords: DVector<T>, dim: usize) -> Result<Self> {
        if coords.len() != dim * dim {
            return Err(CapacityError::Dimension {
                what: "HermitianVector",
                expected: dim * dim,
                found: coords.len(),
            });
        }
        Ok(Self { coords, dim })
    }

    pub fn coords(&self) -> &DVector<T> {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dot(&self, other: &Self) -> T {
        self.coords.dot(&other.coords)
    }
}

/// Encodes a Hermitian matrix as its `n^2` real coordinates.
pub fn vectorize<T: Real>(a: &HermitianMatrix<T>) -> HermitianVector<T> {
    let n = a.dim();
    let sqrt2 = real::<T>(2.0).sqrt();
    let mut coords = Vec::with_capacity(n * n);
    for j in 0..n {
        coords.push(a.data()[(j, j)].re);
    }
    for j in 1..n {
        for jp in 0..j {
            coords.push(sqrt2 * a.data()[(j, jp)].re);
        }
    }
    for j in 1..n {
        for jp in 0..j {
            coords.push(sqrt2 * a.data()[(j, jp)].im);
        }
    }
    HermitianVector {
        coords: DVector::from_vec(coords),
        dim: n,
    }
}

/// Inverse of [`vectorize`].
pub fn unvectorize<T: Real>(v: &HermitianVector<T>) -> HermitianMatrix<T> {
    let n = v.dim;
    let inv_sqrt2 = T::one() / real::<T>(2.0).sqrt();
    let mut data: DMatrix<Complex<T>> = DMatrix::zeros(n, n);
    for j in 0..n {
        data[(j, j)] = Complex::new(v.coords[j], T::zero());
    }
    let mut k = n;
    for j in 1..n {
        for jp in 0..j {
            let re = v.coords[k] * inv_sqrt2;
            data[(j, jp)] += Complex::new(re, T::zero());
            data[(jp, j)] += Complex::new(re, T::zero());
            k += 1;
        }
    }
    for j in 1..n {
        for jp in 0..j {
            let im = v.coords[k] * inv_sqrt2;
            data[(j, jp)] += Complex::new(T::zero(), im);
            data[(jp, j)] += Complex::new(T::zero(), -im);
            k += 1;
        }
    }
    HermitianMatrix { data }
}

/// Matrix exponential via eigendecomposition of the (symmetrized) input.
pub fn matrix_exp<T: Real>(a: &HermitianMatrix<T>) -> HermitianMatrix<T> {
    a.map_eigenvalues(|v| v.exp())
}

/// Matrix logarithm; rank deficient below [`tol::LAMBDA_MIN`] rather than a
/// clamped log, because the exact solvers need finite entropies.
pub fn matrix_log<T: Real>(p: &HermitianMatrix<T>) -> Result<HermitianMatrix<T>> {
    let min = p
        .eigenvalues()
        .into_iter()
        .fold(infinity::<T>(), |a, b| if b < a { b } else { a });
    if min < real::<T>(tol::LAMBDA_MIN) {
        return Err(CapacityError::RankDeficient {
            state: None,
            min_eigenvalue: to_f64(min),
        });
    }
    Ok(p.map_eigenvalues(|v| v.ln()))
}

/// Von Neumann entropy `-Tr rho log rho` in nats.
pub fn von_neumann_entropy<T: Real>(rho: &DensityMatrix<T>) -> T {
    let mut h = T::zero();
    for v in rho.as_hermitian().eigenvalues() {
        if v > T::zero() {
            h -= v * v.ln();
        }
    }
    h
}

/// Quantum relative entropy `Tr rho (log rho - log sigma)` in nats;
/// `+inf` when the support of `rho` is not contained in that of `sigma`.
pub fn quantum_relative_entropy<T: Real>(
    rho: &DensityMatrix<T>,
    sigma: &DensityMatrix<T>,
) -> Result<T> {
    if rho.dim() != sigma.dim() {
        return Err(CapacityError::Dimension {
            what: "quantum_relative_entropy",
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let n = rho.dim();
    let (svals, svecs) = sigma.as_hermitian().eigendecompose();
    let cutoff = real::<T>(tol::LAMBDA_MIN);
    // mass of rho on the kernel of sigma
    let mut kernel_mass = T::zero();
    for (k, &sv) in svals.iter().enumerate() {
        if sv < cutoff {
            let u = svecs.column(k);
            let ru = rho.as_hermitian().data() * u;
            let mut m = T::zero();
            for i in 0..n {
                m += (u[i].conj() * ru[i]).re;
            }
            kernel_mass += m;
        }
    }
    if kernel_mass > real::<T>(tol::TAU_PSD) {
        return Ok(infinity());
    }
    let mut tr_rho_log_rho = T::zero();
    for v in rho.as_hermitian().eigenvalues() {
        if v > T::zero() {
            tr_rho_log_rho += v * v.ln();
        }
    }
    // Tr rho log sigma over the support of sigma
    let mut tr_rho_log_sigma = T::zero();
    for (k, &sv) in svals.iter().enumerate() {
        if sv >= cutoff {
            let u = svecs.column(k);
            let ru = rho.as_hermitian().data() * u;
            let mut m = T::zero();
            for i in 0..n {
                m += (u[i].conj() * ru[i]).re;
            }
            tr_rho_log_sigma += m * sv.ln();
        }
    }
    Ok(tr_rho_log_rho - tr_rho_log_sigma)
}
