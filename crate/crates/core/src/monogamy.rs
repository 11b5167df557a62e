//! Monogamy trade-off between `C(ρ_AB) + C_a(ρ_AB)` and the entanglement of
//! `AB` with a third qubit: residuals of the pure-state bound in its three
//! formulations, the mixed-state corollary, and a saturating family.
//!
//! Residuals are always `1 − lhs`, so a bound holds iff its residual is
//! nonnegative.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::Serialize;

use crate::convexroof::{mixed_concurrence_split, oracle_comparison, OracleComparison, RoofConfig};
use crate::error::{Error, Result};
use crate::measures::{
    concurrence_pure, concurrence_two_qubit, negativity, two_qubit_pair_from_factor, weighted_pure_negativity,
};
use crate::qstate::{
    derive_seed, haar_random_pure, hermitian_eigen, partial_trace, random_mixed, Bipartition, DensityMatrix,
    StateVector,
};
use crate::tolerance;

const THREE_QUBITS: [usize; 3] = [2, 2, 2];

fn require_three_qubits(dims: &[usize]) -> Result<()> {
    if dims != THREE_QUBITS {
        return Err(Error::Dimension(format!("expected three qubits, got dims {dims:?}")));
    }
    Ok(())
}

fn ab_split() -> Bipartition {
    Bipartition::new(&[0, 1], 3).expect("valid split")
}

/// `C | AB`, with qubit C on the left.
fn c_split() -> Bipartition {
    Bipartition::new(&[2], 3).expect("valid split")
}

/// `sqrt(1 − C²(|ψ>_{C|AB}))` evaluated as the Bloch length of qubit C,
/// `sqrt((ρ_00 − ρ_11)² + 4|ρ_01|²)`. The direct form loses half the
/// digits when `C` is close to one.
fn external_slack(psi: &StateVector) -> Result<f64> {
    let rho_c = psi.reduced(&[2])?;
    let m = rho_c.matrix();
    let z = m[(0, 0)].re - m[(1, 1)].re;
    Ok((z * z + 4.0 * m[(0, 1)].norm_sqr()).sqrt())
}

/// Pure-state trade-off in all three formulations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TheoremReport {
    pub c_ab: f64,
    pub ca_ab: f64,
    pub c_ext: f64,
    /// `C(ρ_AB) + C_a(ρ_AB) − sqrt(1 − C²(|ψ>_{C|AB}))`.
    pub lhs_conc: f64,
    /// Same with the convex-roof negativities `Ñ`, `Ñ_a` and `Ñ(|ψ>_{C|AB})`.
    pub lhs_cren: f64,
    /// `N(ρ_AB) + Ñ_a(ρ_AB) − sqrt(1 − N²(|ψ>_{C|AB}))`.
    pub lhs_neg: f64,
    pub residual_conc: f64,
    pub residual_cren: f64,
    pub residual_neg: f64,
}

impl TheoremReport {
    pub fn residuals(&self) -> [f64; 3] {
        [self.residual_conc, self.residual_cren, self.residual_neg]
    }

    pub fn min_residual(&self) -> f64 {
        self.residuals().into_iter().fold(f64::INFINITY, f64::min)
    }
}

pub fn theorem_check(psi: &StateVector) -> Result<TheoremReport> {
    require_three_qubits(psi.dims())?;
    let ab = ab_split();
    // ρ_AB = M M^dag with M the 4 x 2 amplitude matrix across AB | C.
    let factor = psi.bipartite_matrix(&ab)?;
    let (c, ca) = two_qubit_pair_from_factor(&factor)?;
    let c_ext = concurrence_pure(psi, &c_split())?.value;
    let slack = external_slack(psi)?;

    // On two qubits Ñ = C and Ñ_a = C_a, and N = C on pure states.
    let (cren, crenoa) = (c.value, ca.value);
    let rho_ab = DensityMatrix::from_factor_unchecked(vec![2, 2], &factor);
    let n_ab = negativity(&rho_ab, &Bipartition::new(&[0], 2)?)?.value;

    let lhs_conc = c.value + ca.value - slack;
    let lhs_cren = cren + crenoa - slack;
    let lhs_neg = n_ab + crenoa - slack;
    Ok(TheoremReport {
        c_ab: c.value,
        ca_ab: ca.value,
        c_ext,
        lhs_conc,
        lhs_cren,
        lhs_neg,
        residual_conc: 1.0 - lhs_conc,
        residual_cren: 1.0 - lhs_cren,
        residual_neg: 1.0 - lhs_neg,
    })
}

/// `g(x) = (1 + sqrt(1 − x²)) / 2`, concave and decreasing on `[0, 1]`.
pub fn g(x: f64) -> Result<f64> {
    let tol = tolerance::IDENTITY;
    if !(-tol..=1.0 + tol).contains(&x) {
        return Err(Error::OutOfRange(format!("g is defined on [0, 1], got {x}")));
    }
    let x = x.clamp(0.0, 1.0);
    Ok((1.0 + (1.0 - x * x).sqrt()) / 2.0)
}

/// How `C(ρ_{C|AB})` entered a corollary check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SplitSource {
    /// Rank-one input, evaluated in closed form.
    Exact,
    /// Min-mode oracle value. It can only overestimate the roof, and the
    /// bound term increases with it, so the residual is conservative.
    OracleUpperBound { restarts: usize, ensemble_size: usize, converged: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CorollaryReport {
    pub c_ab: f64,
    pub c_split: f64,
    /// `C(ρ_AB) + (1 − sqrt(1 − C²(ρ_{C|AB}))) / 2`.
    pub lhs: f64,
    pub residual: f64,
    pub source: SplitSource,
}

impl CorollaryReport {
    /// Whether the residual is below the slack for its source.
    pub fn violated(&self) -> bool {
        let slack = match self.source {
            SplitSource::Exact => tolerance::RESIDUAL,
            SplitSource::OracleUpperBound { .. } => tolerance::ORACLE_SLACK,
        };
        self.residual < -slack
    }
}

pub fn corollary_check(rho: &DensityMatrix, config: &RoofConfig) -> Result<CorollaryReport> {
    require_three_qubits(rho.dims())?;
    let (vals, vecs) = hermitian_eigen(rho.matrix());
    let rank = vals.iter().filter(|&&e| e > tolerance::RANK_CUTOFF).count();

    if rank == 1 {
        let psi = StateVector::normalized(rho.dims().to_vec(), vecs.column(0).into_owned())?;
        let (c, _) = two_qubit_pair_from_factor(&psi.bipartite_matrix(&ab_split())?)?;
        let c_split = concurrence_pure(&psi, &c_split())?.value;
        let lhs = c.value + (1.0 - external_slack(&psi)?) / 2.0;
        return Ok(CorollaryReport { c_ab: c.value, c_split, lhs, residual: 1.0 - lhs, source: SplitSource::Exact });
    }

    let c_ab = concurrence_two_qubit(&partial_trace(rho, &[0, 1])?)?.value;
    let roof = mixed_concurrence_split(rho, &c_split(), config)?;
    let c_split = roof.value.min(1.0);
    let lhs = c_ab + 1.0 - g(c_split)?;
    Ok(CorollaryReport {
        c_ab,
        c_split,
        lhs,
        residual: 1.0 - lhs,
        source: SplitSource::OracleUpperBound {
            restarts: roof.restarts_used,
            ensemble_size: config.ensemble_size.unwrap_or(rank * rank),
            converged: roof.converged,
        },
    })
}

/// `sin φ|000> + cos φ sin θ|110> + cos φ cos θ|111>`, with `φ = phi_fam`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FamilyParams {
    theta: f64,
    phi_fam: f64,
}

impl FamilyParams {
    pub fn new(theta: f64, phi_fam: f64) -> Result<Self> {
        for (name, v) in [("theta", theta), ("phi_fam", phi_fam)] {
            if !(0.0..=FRAC_PI_2).contains(&v) {
                return Err(Error::OutOfRange(format!("{name} = {v} outside [0, π/2]")));
            }
        }
        Ok(Self { theta, phi_fam })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi_fam(&self) -> f64 {
        self.phi_fam
    }
}

pub fn family_state(fp: &FamilyParams) -> StateVector {
    let (sp, cp) = fp.phi_fam.sin_cos();
    let (st, ct) = fp.theta.sin_cos();
    let mut amps = [0.0; 8];
    amps[0b000] = sp;
    amps[0b110] = cp * st;
    amps[0b111] = cp * ct;
    StateVector::from_real(THREE_QUBITS.to_vec(), &amps).expect("family state has unit norm")
}

/// Closed-form `(C(ρ_AB), C_a(ρ_AB), C(|ψ>_{C|AB}))` on the family.
pub fn family_measures(fp: &FamilyParams) -> (f64, f64, f64) {
    let s = (2.0 * fp.phi_fam).sin();
    (s * fp.theta.sin(), s, s * fp.theta.cos())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub theta: f64,
    pub phi_fam: f64,
    pub c_ab: f64,
    pub ca_ab: f64,
    pub c_ext: f64,
    pub lhs_conc: f64,
    pub residual: f64,
}

/// Uniform θ grid on `[0, π/2]`; endpoints are hit exactly.
pub fn theta_grid(grid_size: usize) -> Result<Vec<f64>> {
    if grid_size < 2 {
        return Err(Error::OutOfRange(format!("grid size must be at least 2, got {grid_size}")));
    }
    let last = grid_size - 1;
    Ok((0..grid_size)
        .map(|i| if i == last { FRAC_PI_2 } else { FRAC_PI_2 * i as f64 / last as f64 })
        .collect())
}

/// Family states along the θ grid, each evaluated with [`theorem_check`].
pub fn saturation_sweep(grid_size: usize, phi_fam: f64) -> Result<Vec<SweepRow>> {
    theta_grid(grid_size)?
        .into_iter()
        .map(|theta| {
            let fp = FamilyParams::new(theta, phi_fam)?;
            let report = theorem_check(&family_state(&fp))?;
            Ok(SweepRow {
                theta,
                phi_fam,
                c_ab: report.c_ab,
                ca_ab: report.ca_ab,
                c_ext: report.c_ext,
                lhs_conc: report.lhs_conc,
                residual: report.residual_conc,
            })
        })
        .collect()
}

/// Seed of the `index`-th sample of a campaign.
pub fn sample_seed(seed: u64, index: u64) -> u64 {
    seed ^ index
}

/// Theorem residuals for `samples` Haar-random three-qubit states, ordered
/// by sample index.
pub fn theorem_campaign(samples: usize, seed: u64) -> Result<Vec<TheoremReport>> {
    (0..samples as u64)
        .into_par_iter()
        .map(|i| theorem_check(&haar_random_pure(&THREE_QUBITS, sample_seed(seed, i))?))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TheoremSummary {
    pub samples: usize,
    pub min_residual_conc: f64,
    pub min_residual_cren: f64,
    pub min_residual_neg: f64,
    pub violations: usize,
}

impl TheoremSummary {
    pub fn of(reports: &[TheoremReport]) -> Self {
        let min = |f: fn(&TheoremReport) -> f64| reports.iter().map(f).fold(f64::INFINITY, f64::min);
        Self {
            samples: reports.len(),
            min_residual_conc: min(|r| r.residual_conc),
            min_residual_cren: min(|r| r.residual_cren),
            min_residual_neg: min(|r| r.residual_neg),
            violations: reports.iter().filter(|r| r.min_residual() < -tolerance::RESIDUAL).count(),
        }
    }
}

/// Oracle budget shared by every sample of a corollary campaign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OracleBudget {
    pub restarts: usize,
    pub ensemble_size: Option<usize>,
}

impl OracleBudget {
    /// Default restarts for states on `dims`, ensemble size `rank²`.
    pub fn default_for(dims: &[usize]) -> Self {
        let d = RoofConfig::default_for(dims, 0);
        Self { restarts: d.restarts, ensemble_size: d.ensemble_size }
    }

    fn config(&self, seed: u64) -> RoofConfig {
        RoofConfig { ensemble_size: self.ensemble_size, restarts: self.restarts, seed }
    }
}

// Stream tag separating oracle seeds from state seeds.
const ORACLE_STREAM: u64 = 0x434F_524F;

/// Corollary residuals for `samples` random rank-`rank` three-qubit states.
pub fn corollary_campaign(samples: usize, rank: usize, seed: u64, budget: &OracleBudget) -> Result<Vec<CorollaryReport>> {
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let rho = random_mixed(&THREE_QUBITS, rank, sample_seed(seed, i))?;
            corollary_check(&rho, &budget.config(derive_seed(seed, ORACLE_STREAM, i)))
        })
        .collect()
}

/// Oracle against closed forms on `samples` random rank-`rank` two-qubit
/// states.
pub fn oracle_campaign(samples: usize, rank: usize, seed: u64, budget: &OracleBudget) -> Result<Vec<OracleComparison>> {
    (0..samples as u64)
        .map(|i| {
            let rho = random_mixed(&[2, 2], rank, sample_seed(seed, i))?;
            oracle_comparison(&rho, &budget.config(derive_seed(seed, ORACLE_STREAM, i)))
        })
        .collect()
}

/// Negativity of a pure state across `part`; equals its concurrence.
pub fn pure_negativity(psi: &StateVector, part: &Bipartition) -> Result<f64> {
    Ok(weighted_pure_negativity(&psi.bipartite_matrix(part)?))
}
