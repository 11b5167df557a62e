use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{check_dims, CMatrix, CVector, DensityMatrix, StateVector, C64};
use crate::error::{Error, Result};

/// Generator used for every sampled quantity in the crate.
pub type SampleRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for sample `index` of a campaign seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> SampleRng {
    rng_from_seed(seed ^ index)
}

/// Independent sub-seed for `(stream, index)` under `base` (splitmix64 mixing).
pub fn derive_seed(base: u64, stream: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    CVector::from_iterator(n, (0..n).map(|_| gaussian(rng)))
}

/// Haar-random pure state: normalized standard complex Gaussian vector.
pub fn haar_random_pure(dims: &[usize], seed: u64) -> Result<StateVector> {
    let mut rng = rng_from_seed(seed);
    haar_random_pure_with(dims, &mut rng)
}

pub(crate) fn haar_random_pure_with<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<StateVector> {
    let total = check_dims(dims)?;
    StateVector::normalized(dims.to_vec(), gaussian_vector(total, rng))
}

/// Haar-random `n x n` unitary (QR of a Ginibre matrix with phase fix).
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for c in 0..n {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        let mut col = q.column_mut(c);
        col *= phase;
    }
    q
}

/// First `cols` columns of a Haar-random `rows x rows` unitary.
pub fn haar_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    haar_unitary(rows, rng).columns(0, cols).into_owned()
}

/// Marginal of a Haar-random pure state on `dims ⊗ C^rank`.
pub fn random_mixed(dims: &[usize], rank: usize, seed: u64) -> Result<DensityMatrix> {
    let total = check_dims(dims)?;
    if rank == 0 || rank > total {
        return Err(Error::RankOutOfRange { rank, max: total });
    }
    let mut rng = rng_from_seed(seed);
    let v = gaussian_vector(total * rank, &mut rng);
    let norm = v.norm();
    // System index is the more significant digit, ancilla the less.
    let factor = CMatrix::from_fn(total, rank, |i, a| v[i * rank + a] / norm);
    Ok(DensityMatrix::from_factor_unchecked(dims.to_vec(), &factor))
}
