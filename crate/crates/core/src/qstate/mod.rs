//! Dense states on small tensor-product spaces.
//!
//! Amplitude index convention: for factor dimensions `d_0, ..., d_{n-1}` the
//! basis state `|i_0 ... i_{n-1}>` lives at `sum_k i_k * prod_{j>k} d_j`, so
//! the first factor is the most significant digit.

mod io;
mod random;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance;

pub use io::{DensityFile, StateFile};
pub use random::{
    derive_seed, haar_isometry, haar_random_pure, haar_unitary, random_mixed, rng_from_seed,
    sample_rng, SampleRng,
};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);

fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() {
        return Err(Error::Dimension("at least one factor is required".into()));
    }
    if let Some(d) = dims.iter().find(|&&d| d < 2) {
        return Err(Error::Dimension(format!("factor dimension {d} is below 2")));
    }
    Ok(dims.iter().product())
}

/// Normalized pure state over `dims`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    dims: Vec<usize>,
    amplitudes: CVector,
}

impl StateVector {
    /// Wraps amplitudes that must already have unit norm.
    pub fn new(dims: Vec<usize>, amplitudes: CVector) -> Result<Self> {
        let total = check_dims(&dims)?;
        if amplitudes.len() != total {
            return Err(Error::Dimension(format!(
                "{} amplitudes for total dimension {total}",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > tolerance::NORM {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { dims, amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(dims: Vec<usize>, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(dims, amplitudes.unscale(norm))
    }

    pub fn from_real(dims: Vec<usize>, amplitudes: &[f64]) -> Result<Self> {
        let v = CVector::from_iterator(amplitudes.len(), amplitudes.iter().map(|&a| C64::new(a, 0.0)));
        Self::normalized(dims, v)
    }

    /// Computational basis state `|digits>`.
    pub fn basis(dims: Vec<usize>, digits: &[usize]) -> Result<Self> {
        let total = check_dims(&dims)?;
        if digits.len() != dims.len() || digits.iter().zip(&dims).any(|(i, d)| i >= d) {
            return Err(Error::Dimension(format!("basis label {digits:?} does not fit {dims:?}")));
        }
        let index = digits.iter().zip(&dims).fold(0, |acc, (i, d)| acc * d + i);
        let mut v = CVector::zeros(total);
        v[index] = C64::new(1.0, 0.0);
        Self::new(dims, v)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn num_factors(&self) -> usize {
        self.dims.len()
    }

    /// Amplitudes arranged as a `dim(left) x dim(right)` matrix.
    pub fn bipartite_matrix(&self, part: &Bipartition) -> Result<CMatrix> {
        part.check_factors(self.dims.len())?;
        let table = IndexTable::new(&self.dims, &part.left, &part.right);
        Ok(CMatrix::from_fn(table.rows, table.cols, |l, r| {
            self.amplitudes[table.full(l, r)]
        }))
    }

    /// Applies one unitary per factor, in factor order.
    pub fn apply_local(&self, unitaries: &[CMatrix]) -> Result<Self> {
        if unitaries.len() != self.dims.len() {
            return Err(Error::Dimension(format!(
                "{} local unitaries for {} factors",
                unitaries.len(),
                self.dims.len()
            )));
        }
        let mut amps = self.amplitudes.clone();
        for (k, u) in unitaries.iter().enumerate() {
            let d = self.dims[k];
            if u.nrows() != d || u.ncols() != d {
                return Err(Error::Dimension(format!("unitary for factor {k} is not {d}x{d}")));
            }
            let inner: usize = self.dims[k + 1..].iter().product();
            let outer: usize = self.dims[..k].iter().product();
            let mut next = CVector::zeros(amps.len());
            for o in 0..outer {
                for i in 0..inner {
                    for a in 0..d {
                        let mut acc = ZERO;
                        for b in 0..d {
                            acc += u[(a, b)] * amps[(o * d + b) * inner + i];
                        }
                        next[(o * d + a) * inner + i] = acc;
                    }
                }
            }
            amps = next;
        }
        Self::normalized(self.dims.clone(), amps)
    }

    /// Reduced density matrix on `keep`, computed as `M M^dag` from the
    /// amplitude matrix so that it is exactly Hermitian with rank at most
    /// the dimension of the traced part.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let part = Bipartition::new(keep, self.dims.len())?;
        let m = self.bipartite_matrix(&part)?;
        let dims = part.left.iter().map(|&k| self.dims[k]).collect();
        Ok(DensityMatrix::from_factor_unchecked(dims, &m))
    }
}

/// Split of the factor set into two nonempty complementary parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bipartition {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Bipartition {
    /// `left` lists the factor indices on the left side; the rest go right.
    pub fn new(left: &[usize], num_factors: usize) -> Result<Self> {
        let mut l = left.to_vec();
        l.sort_unstable();
        l.dedup();
        if l.len() != left.len() {
            return Err(Error::InvalidPartition(format!("repeated factor in {left:?}")));
        }
        if let Some(&bad) = l.iter().find(|&&k| k >= num_factors) {
            return Err(Error::InvalidPartition(format!(
                "factor {bad} does not exist among {num_factors}"
            )));
        }
        if l.is_empty() || l.len() == num_factors {
            return Err(Error::InvalidPartition(format!(
                "{left:?} is not a nonempty proper subset of {num_factors} factors"
            )));
        }
        let right = (0..num_factors).filter(|k| !l.contains(k)).collect();
        Ok(Self { left: l, right })
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn num_factors(&self) -> usize {
        self.left.len() + self.right.len()
    }

    pub fn left_dim(&self, dims: &[usize]) -> usize {
        self.left.iter().map(|&k| dims[k]).product()
    }

    pub fn right_dim(&self, dims: &[usize]) -> usize {
        self.right.iter().map(|&k| dims[k]).product()
    }

    fn check_factors(&self, n: usize) -> Result<()> {
        if self.num_factors() != n {
            return Err(Error::InvalidPartition(format!(
                "partition covers {} factors, state has {n}",
                self.num_factors()
            )));
        }
        Ok(())
    }
}

/// Maps (left multi-index, right multi-index) pairs to full basis indices.
#[derive(Clone, Debug)]
pub(crate) struct IndexTable {
    rows: usize,
    cols: usize,
    full: Vec<usize>,
}

impl IndexTable {
    pub(crate) fn new(dims: &[usize], left: &[usize], right: &[usize]) -> Self {
        let mut strides = vec![1usize; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        let offsets = |factors: &[usize]| -> Vec<usize> {
            let size: usize = factors.iter().map(|&k| dims[k]).product();
            (0..size)
                .map(|mut idx| {
                    let mut off = 0;
                    for &k in factors.iter().rev() {
                        off += (idx % dims[k]) * strides[k];
                        idx /= dims[k];
                    }
                    off
                })
                .collect()
        };
        let lo = offsets(left);
        let ro = offsets(right);
        let full = lo.iter().flat_map(|&l| ro.iter().map(move |&r| l + r)).collect();
        Self { rows: lo.len(), cols: ro.len(), full }
    }

    #[inline]
    pub(crate) fn full(&self, l: usize, r: usize) -> usize {
        self.full[l * self.cols + r]
    }

    pub(crate) fn rows(&self) -> usize {
        self.rows
    }

    pub(crate) fn cols(&self) -> usize {
        self.cols
    }
}

/// Unit-trace positive semidefinite Hermitian matrix with factor dims.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(dims: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        let total = check_dims(&dims)?;
        if matrix.nrows() != total || matrix.ncols() != total {
            return Err(Error::Dimension(format!(
                "{}x{} matrix for total dimension {total}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let dev = hermitian_deviation(&matrix);
        if dev > tolerance::HERMITIAN {
            return Err(Error::InvalidDensity(format!("Hermitian deviation {dev:e}")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tolerance::TRACE || tr.im.abs() > tolerance::TRACE {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let min = hermitian_eigen(&matrix).0.iter().copied().fold(f64::INFINITY, f64::min);
        if min < tolerance::PSD {
            return Err(Error::InvalidDensity(format!("eigenvalue {min:e} is negative")));
        }
        Ok(Self { dims, matrix })
    }

    /// Projector onto a pure state.
    pub fn from_pure(psi: &StateVector) -> Self {
        let v = psi.amplitudes();
        let m = CMatrix::from_column_slice(v.len(), 1, v.as_slice());
        Self::from_factor_unchecked(psi.dims.to_vec(), &m)
    }

    /// `X X^dag` for a factor whose Frobenius norm is one.
    pub(crate) fn from_factor_unchecked(dims: Vec<usize>, factor: &CMatrix) -> Self {
        Self { dims, matrix: factor * factor.adjoint() }
    }

    pub(crate) fn from_matrix_unchecked(dims: Vec<usize>, matrix: CMatrix) -> Self {
        Self { dims, matrix }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn num_factors(&self) -> usize {
        self.dims.len()
    }

    /// Eigenvalues in nonincreasing order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.matrix).0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().last().copied().unwrap_or(0.0)
    }

    /// Number of eigenvalues above `tolerance::RANK_CUTOFF`.
    pub fn rank(&self) -> usize {
        self.eigenvalues().iter().filter(|&&e| e > tolerance::RANK_CUTOFF).count()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Square-root factor `X` with `rho = X X^dag`, one column per retained
    /// eigenvector (scaled by the root of its eigenvalue). Eigenvalues below
    /// `tolerance::FACTOR_FLOOR` are dropped.
    pub fn sqrt_factor(&self) -> CMatrix {
        let (vals, vecs) = hermitian_eigen(&self.matrix);
        let keep: Vec<usize> =
            (0..vals.len()).filter(|&i| vals[i] > tolerance::FACTOR_FLOOR).collect();
        let mut x = CMatrix::zeros(self.matrix.nrows(), keep.len().max(1));
        for (c, &i) in keep.iter().enumerate() {
            x.set_column(c, &(vecs.column(i) * C64::new(vals[i].sqrt(), 0.0)));
        }
        x
    }
}

/// Largest entrywise deviation `|M - M^dag|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues nonincreasing and
/// eigenvectors as matching columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// Traces out every factor not in `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let part = Bipartition::new(keep, rho.num_factors())?;
    let table = IndexTable::new(&rho.dims, &part.left, &part.right);
    let m = &rho.matrix;
    let out = CMatrix::from_fn(table.rows, table.rows, |a, b| {
        (0..table.cols).map(|t| m[(table.full(a, t), table.full(b, t))]).sum()
    });
    let dims = part.left.iter().map(|&k| rho.dims[k]).collect();
    Ok(DensityMatrix::from_matrix_unchecked(dims, out))
}

/// Transposes the left-side factor indices of `rho`.
pub fn partial_transpose(rho: &DensityMatrix, part: &Bipartition) -> Result<CMatrix> {
    part.check_factors(rho.num_factors())?;
    let table = IndexTable::new(&rho.dims, &part.left, &part.right);
    let m = &rho.matrix;
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    for l1 in 0..table.rows {
        for l2 in 0..table.rows {
            for r1 in 0..table.cols {
                for r2 in 0..table.cols {
                    out[(table.full(l1, r1), table.full(l2, r2))] =
                        m[(table.full(l2, r1), table.full(l1, r2))];
                }
            }
        }
    }
    Ok(out)
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
    }
    let dev = hermitian_deviation(m);
    if dev > tolerance::HERMITIAN {
        return Err(Error::Contract(format!("trace norm of a non-Hermitian matrix (deviation {dev:e})")));
    }
    Ok(hermitian_eigen(m).0.iter().map(|e| e.abs()).sum())
}

/// Squared Schmidt coefficients, nonincreasing, summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtSpectrum {
    pub coefficients: Vec<f64>,
}

impl SchmidtSpectrum {
    pub fn total(&self) -> f64 {
        self.coefficients.iter().sum()
    }
}

pub fn schmidt_spectrum(psi: &StateVector, part: &Bipartition) -> Result<SchmidtSpectrum> {
    let m = psi.bipartite_matrix(part)?;
    let mut coefficients: Vec<f64> =
        m.singular_values().iter().map(|s| s * s).collect();
    coefficients.sort_by(|a, b| b.total_cmp(a));
    Ok(SchmidtSpectrum { coefficients })
}
