//! Entanglement measures: concurrence, concurrence of assistance, negativity
//! and the convex-roof negativities on two-qubit states.
//!
//! Mixed two-qubit concurrence and its assistance counterpart use the
//! spin-flip spectrum `mu_1 >= ... >= mu_4` (square roots of the eigenvalues
//! of `rho * (Y⊗Y) rho^* (Y⊗Y)`). With `rho = X X^dag` those are exactly the
//! singular values of the symmetric matrix `X^T (Y⊗Y) X`, which is how they
//! are computed here; this avoids square roots of eigenvalues that are zero
//! up to rounding.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qstate::{partial_transpose, trace_norm, Bipartition, CMatrix, DensityMatrix, StateVector, C64};
use crate::tolerance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Concurrence,
    ConcurrenceAssist,
    Negativity,
    Cren,
    Crenoa,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeasureValue {
    pub value: f64,
    pub measure: Measure,
}

impl MeasureValue {
    /// Clamps `raw` into `[0, max]` when it is within `tolerance::MEASURE_CLAMP`
    /// of that range; anything further out is a contract violation.
    fn checked(measure: Measure, raw: f64, max: f64) -> Result<Self> {
        let slack = tolerance::MEASURE_CLAMP;
        if !raw.is_finite() || raw < -slack || raw > max + slack {
            return Err(Error::Contract(format!("{measure:?} value {raw} outside [0, {max}]")));
        }
        Ok(Self { value: raw.clamp(0.0, max), measure })
    }

    fn relabel(self, measure: Measure) -> Self {
        Self { measure, ..self }
    }
}

impl From<MeasureValue> for f64 {
    fn from(v: MeasureValue) -> f64 {
        v.value
    }
}

/// `sum_{i<j} sum_{k<l} |m_ik m_jl - m_il m_jk|^2`, the second elementary
/// symmetric function of the eigenvalues of `M M^dag`.
fn second_minor_sum(m: &CMatrix) -> f64 {
    let (rows, cols) = m.shape();
    let mut acc = 0.0;
    for i in 0..rows {
        for j in i + 1..rows {
            for k in 0..cols {
                for l in k + 1..cols {
                    acc += (m[(i, k)] * m[(j, l)] - m[(i, l)] * m[(j, k)]).norm_sqr();
                }
            }
        }
    }
    acc
}

/// `p * C(psi / sqrt(p))` for an unnormalized amplitude matrix with
/// `p = ||M||_F^2`. For a normalized state this is `sqrt(2 (1 - Tr rho^2))`.
pub fn weighted_pure_concurrence(m: &CMatrix) -> f64 {
    2.0 * second_minor_sum(m).sqrt()
}

/// `p * N(psi / sqrt(p))` via the Schmidt form `N = (sum s_i)^2 - 1`.
pub fn weighted_pure_negativity(m: &CMatrix) -> f64 {
    let s = m.singular_values();
    let sum: f64 = s.iter().sum();
    let sq: f64 = s.iter().map(|x| x * x).sum();
    (sum * sum - sq).max(0.0)
}

fn max_concurrence(dmin: usize) -> f64 {
    (2.0 * (1.0 - 1.0 / dmin as f64)).sqrt()
}

/// Pure-state concurrence across `part`.
pub fn concurrence_pure(psi: &StateVector, part: &Bipartition) -> Result<MeasureValue> {
    let m = psi.bipartite_matrix(part)?;
    let dmin = m.nrows().min(m.ncols());
    MeasureValue::checked(Measure::Concurrence, weighted_pure_concurrence(&m), max_concurrence(dmin))
}

/// `||rho^{T_left}||_1 - 1`.
pub fn negativity(rho: &DensityMatrix, part: &Bipartition) -> Result<MeasureValue> {
    let pt = partial_transpose(rho, part)?;
    let dmin = part.left_dim(rho.dims()).min(part.right_dim(rho.dims()));
    MeasureValue::checked(Measure::Negativity, trace_norm(&pt)? - 1.0, (dmin - 1) as f64)
}

/// Spin-flip spectrum `mu`, nonincreasing, from any `X` with `rho = X X^dag`.
pub fn spin_flip_spectrum_from_factor(x: &CMatrix) -> Result<[f64; 4]> {
    if x.nrows() != 4 {
        return Err(Error::Dimension(format!("two-qubit factor needs 4 rows, got {}", x.nrows())));
    }
    let k = x.ncols();
    // (Y⊗Y) acting on a column: (-x3, x2, x1, -x0).
    let tau = CMatrix::from_fn(k, k, |a, b| {
        -x[(0, a)] * x[(3, b)] + x[(1, a)] * x[(2, b)] + x[(2, a)] * x[(1, b)] - x[(3, a)] * x[(0, b)]
    });
    let mut sv: Vec<f64> = tau.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let mut mu = [0.0; 4];
    for (slot, v) in mu.iter_mut().zip(sv) {
        *slot = v;
    }
    Ok(mu)
}

fn require_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dims() != [2, 2] {
        return Err(Error::Dimension(format!("expected dims [2, 2], got {:?}", rho.dims())));
    }
    Ok(())
}

pub fn spin_flip_spectrum(rho: &DensityMatrix) -> Result<[f64; 4]> {
    require_two_qubit(rho)?;
    spin_flip_spectrum_from_factor(&rho.sqrt_factor())
}

/// `max(0, mu_1 - mu_2 - mu_3 - mu_4)`.
pub fn concurrence_from_spectrum(mu: &[f64; 4]) -> f64 {
    (mu[0] - mu[1] - mu[2] - mu[3]).max(0.0)
}

/// `mu_1 + mu_2 + mu_3 + mu_4`.
pub fn assistance_from_spectrum(mu: &[f64; 4]) -> f64 {
    mu.iter().sum()
}

/// Convex-roof concurrence of a two-qubit state (closed form).
pub fn concurrence_two_qubit(rho: &DensityMatrix) -> Result<MeasureValue> {
    let mu = spin_flip_spectrum(rho)?;
    MeasureValue::checked(Measure::Concurrence, concurrence_from_spectrum(&mu), 1.0)
}

/// Concurrence of assistance of a two-qubit state (closed form).
pub fn concurrence_assist_two_qubit(rho: &DensityMatrix) -> Result<MeasureValue> {
    let mu = spin_flip_spectrum(rho)?;
    MeasureValue::checked(Measure::ConcurrenceAssist, assistance_from_spectrum(&mu), 1.0)
}

/// Convex-roof extended negativity; equals the concurrence on two qubits.
pub fn cren_two_qubit(rho: &DensityMatrix) -> Result<MeasureValue> {
    Ok(concurrence_two_qubit(rho)?.relabel(Measure::Cren))
}

/// Convex-roof extended negativity of assistance; equals the concurrence of
/// assistance on two qubits.
pub fn crenoa_two_qubit(rho: &DensityMatrix) -> Result<MeasureValue> {
    Ok(concurrence_assist_two_qubit(rho)?.relabel(Measure::Crenoa))
}

/// Both closed forms from a two-qubit factor, `(C, C_a)`.
pub fn two_qubit_pair_from_factor(x: &CMatrix) -> Result<(MeasureValue, MeasureValue)> {
    let mu = spin_flip_spectrum_from_factor(x)?;
    Ok((
        MeasureValue::checked(Measure::Concurrence, concurrence_from_spectrum(&mu), 1.0)?,
        MeasureValue::checked(Measure::ConcurrenceAssist, assistance_from_spectrum(&mu), 1.0)?,
    ))
}

/// `(Y⊗Y) rho^* (Y⊗Y)`.
pub fn spin_flipped(rho: &DensityMatrix) -> Result<CMatrix> {
    require_two_qubit(rho)?;
    let yy = CMatrix::from_fn(4, 4, |r, c| match (r, c) {
        (0, 3) | (3, 0) => C64::new(-1.0, 0.0),
        (1, 2) | (2, 1) => C64::new(1.0, 0.0),
        _ => C64::new(0.0, 0.0),
    });
    Ok(&yy * rho.matrix().conjugate() * &yy)
}
