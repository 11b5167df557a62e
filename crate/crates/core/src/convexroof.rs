//! Brute-force convex-roof (min) and concave-roof (max) evaluation over
//! ensemble decompositions of a density matrix.
//!
//! Every decomposition of `rho = sum_i η_i |e_i><e_i|` into `m` pure states
//! is `|ψ̃_j> = sum_i V_ji sqrt(η_i) |e_i>` for an `m x r` isometry `V`. The
//! optimizer draws Haar-random isometries and polishes each by sweeping over
//! member pairs, applying the best two-member unitary mixing found by a
//! derivative-free search. Results are bounds: min mode returns the average
//! of an actual ensemble (an upper bound on the roof), max mode a lower bound.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{
    assistance_from_spectrum, concurrence_from_spectrum, negativity, spin_flip_spectrum, weighted_pure_concurrence,
    weighted_pure_negativity,
};
use crate::qstate::{
    derive_seed, haar_isometry, hermitian_eigen, rng_from_seed, Bipartition, CMatrix, CVector,
    DensityMatrix, IndexTable, StateVector, C64, ZERO,
};
use crate::tolerance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RoofMode {
    Min,
    Max,
}

impl RoofMode {
    fn sign(self) -> f64 {
        match self {
            RoofMode::Min => 1.0,
            RoofMode::Max => -1.0,
        }
    }
}

/// Finite decomposition `rho = sum_j p_j |ψ_j><ψ_j|`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    members: Vec<(f64, StateVector)>,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, StateVector)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::OutOfRange("empty ensemble".into()));
        }
        if members.iter().any(|(p, _)| p.is_nan() || *p < 0.0) {
            return Err(Error::OutOfRange("negative ensemble weight".into()));
        }
        let total: f64 = members.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::OutOfRange(format!("ensemble weights sum to {total}")));
        }
        let dims = members[0].1.dims();
        if members.iter().any(|(_, psi)| psi.dims() != dims) {
            return Err(Error::Dimension("ensemble members have different dims".into()));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(f64, StateVector)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `sum_j p_j |ψ_j><ψ_j|`
    pub fn density(&self) -> CMatrix {
        let n = self.members[0].1.amplitudes().len();
        let mut out = CMatrix::zeros(n, n);
        for (p, psi) in &self.members {
            let v = psi.amplitudes();
            out += (v * v.adjoint()).scale(*p);
        }
        out
    }

    /// Frobenius distance between the reconstructed and the given state.
    pub fn reconstruction_error(&self, rho: &DensityMatrix) -> f64 {
        (self.density() - rho.matrix()).norm()
    }

    pub fn average(&self, functional: &PureFunctional) -> Result<f64> {
        self.members.iter().map(|(p, psi)| Ok(p * functional.evaluate(psi)?)).sum()
    }
}

/// Pure-state entanglement measure across a declared bipartition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PureFunctional {
    Concurrence(Bipartition),
    Negativity(Bipartition),
}

impl PureFunctional {
    fn partition(&self) -> &Bipartition {
        match self {
            PureFunctional::Concurrence(p) | PureFunctional::Negativity(p) => p,
        }
    }

    pub fn evaluate(&self, psi: &StateVector) -> Result<f64> {
        let m = psi.bipartite_matrix(self.partition())?;
        Ok(match self {
            PureFunctional::Concurrence(_) => weighted_pure_concurrence(&m),
            PureFunctional::Negativity(_) => weighted_pure_negativity(&m),
        })
    }

    fn evaluator(&self, dims: &[usize]) -> Result<Evaluator> {
        let part = self.partition();
        if part.num_factors() != dims.len() {
            return Err(Error::InvalidPartition(format!(
                "functional partition covers {} factors, state has {}",
                part.num_factors(),
                dims.len()
            )));
        }
        Ok(Evaluator {
            negativity: matches!(self, PureFunctional::Negativity(_)),
            table: IndexTable::new(dims, part.left(), part.right()),
        })
    }
}

/// Weighted functional `p * f(ψ̃ / sqrt(p))` on raw amplitude slices.
struct Evaluator {
    negativity: bool,
    table: IndexTable,
}

impl Evaluator {
    fn weighted(&self, v: &[C64]) -> f64 {
        let t = &self.table;
        // With a qubit on either side there are two Schmidt values and
        // `(s0 + s1)² − s0² − s1² = 2 s0 s1`, which Cauchy–Binet turns into the
        // minor sum below; only wider splits need singular values.
        if self.negativity && t.rows().min(t.cols()) > 2 {
            let m = CMatrix::from_fn(t.rows(), t.cols(), |l, r| v[t.full(l, r)]);
            return weighted_pure_negativity(&m);
        }
        let mut acc = 0.0;
        for i in 0..t.rows() {
            for j in i + 1..t.rows() {
                for k in 0..t.cols() {
                    for l in k + 1..t.cols() {
                        let minor = v[t.full(i, k)] * v[t.full(j, l)] - v[t.full(i, l)] * v[t.full(j, k)];
                        acc += minor.norm_sqr();
                    }
                }
            }
        }
        2.0 * acc.sqrt()
    }
}

/// Optimizer budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RoofConfig {
    /// Ensemble size `m`; `None` means `rank²`.
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
}

impl RoofConfig {
    /// 64 restarts on two qubits, 256 on anything larger.
    pub fn default_for(dims: &[usize], seed: u64) -> Self {
        let total: usize = dims.iter().product();
        Self { ensemble_size: None, restarts: if total <= 4 { 64 } else { 256 }, seed }
    }
}

#[derive(Clone, Debug)]
pub struct RoofResult {
    pub value: f64,
    pub ensemble: Ensemble,
    pub mode: RoofMode,
    pub restarts_used: usize,
    /// Every polish pass stopped on the improvement threshold rather than
    /// the sweep cap.
    pub converged: bool,
    /// Average over the eigen-ensemble, always a candidate.
    pub eigen_value: f64,
}

/// Retained eigenpairs folded into an `n x r` factor `X = [sqrt(η_i) e_i]`.
fn eigen_factor(rho: &DensityMatrix) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(rho.matrix());
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > tolerance::RANK_CUTOFF).collect();
    let mut x = CMatrix::zeros(vecs.nrows(), keep.len());
    for (c, &i) in keep.iter().enumerate() {
        x.set_column(c, &(vecs.column(i) * C64::new(vals[i].sqrt(), 0.0)));
    }
    x
}

// Members whose weight is below this carry no state and are dropped.
const EMPTY_MEMBER: f64 = 1e-24;

fn ensemble_from_members(dims: &[usize], members: &[C64], n: usize) -> Result<Ensemble> {
    let raw: Vec<(f64, CVector)> = members
        .chunks(n)
        .map(|c| {
            let v = CVector::from_column_slice(c);
            (v.norm_squared(), v)
        })
        .filter(|(p, _)| *p > EMPTY_MEMBER)
        .collect();
    let total: f64 = raw.iter().map(|(p, _)| p).sum();
    let members = raw
        .into_iter()
        .map(|(p, v)| Ok((p / total, StateVector::normalized(dims.to_vec(), v)?)))
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(members)
}

/// Ensemble `|ψ̃_j> = sum_i V_ji sqrt(η_i) |e_i>` with `p_j = <ψ̃_j|ψ̃_j>`.
pub fn ensemble_from_isometry(rho: &DensityMatrix, v: &CMatrix) -> Result<Ensemble> {
    let x = eigen_factor(rho);
    let r = x.ncols();
    if v.ncols() != r {
        return Err(Error::Dimension(format!("isometry has {} columns, rank is {r}", v.ncols())));
    }
    if v.nrows() < r {
        return Err(Error::EnsembleTooSmall { size: v.nrows(), rank: r });
    }
    let deviation = (v.adjoint() * v - CMatrix::identity(r, r)).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if deviation > 1e-10 {
        return Err(Error::NotIsometry { deviation });
    }
    let psi = &x * v.transpose();
    ensemble_from_members(rho.dims(), psi.as_slice(), psi.nrows())
}

/// Best roof value over the eigen-ensemble and `config.restarts` polished
/// random decompositions.
pub fn roof_optimize(
    rho: &DensityMatrix,
    functional: &PureFunctional,
    mode: RoofMode,
    config: &RoofConfig,
) -> Result<RoofResult> {
    let eval = functional.evaluator(rho.dims())?;
    let x = eigen_factor(rho);
    let (n, r) = x.shape();
    let m = config.ensemble_size.unwrap_or(r * r);
    if m < r {
        return Err(Error::EnsembleTooSmall { size: m, rank: r });
    }
    let sign = mode.sign();

    // Column-major `n x m`: member j occupies one contiguous column.
    let members_for = |v: &CMatrix| -> Vec<C64> { (&x * v.transpose()).as_slice().to_vec() };
    let objective = |members: &[C64]| -> f64 { members.chunks(n).map(|c| eval.weighted(c)).sum() };

    let mut eye = CMatrix::zeros(m, r);
    for i in 0..r {
        eye[(i, i)] = C64::new(1.0, 0.0);
    }
    let eigen_members = members_for(&eye);
    let eigen_value = objective(&eigen_members);

    // Screen every restart with a coarse polish, then refine the leaders.
    let mut runs: Vec<(usize, f64, Vec<C64>, bool)> = (0..config.restarts)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_from_seed(derive_seed(config.seed, 0x524F_4F46, k as u64));
            let mut members = members_for(&haar_isometry(m, r, &mut rng));
            polish(&mut members, n, &eval, sign, &SCREEN);
            (k, sign * objective(&members), members, true)
        })
        .collect();
    runs.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    runs.truncate(REFINED);
    runs.par_iter_mut().for_each(|run| {
        run.3 = polish(&mut run.2, n, &eval, sign, &REFINE);
        run.1 = objective(&run.2);
    });

    let mut best_value = eigen_value;
    let mut best_members = eigen_members;
    let mut converged = true;
    for (_, value, members, ok) in runs {
        converged &= ok;
        if sign * value < sign * best_value {
            best_value = value;
            best_members = members;
        }
    }
    Ok(RoofResult {
        value: best_value,
        ensemble: ensemble_from_members(rho.dims(), &best_members, n)?,
        mode,
        restarts_used: config.restarts,
        converged,
        eigen_value,
    })
}

/// Convex-roof concurrence across a bipartition of a three-qubit state
/// (typically `C|AB`), as a min-mode oracle value.
pub fn mixed_concurrence_split(
    rho: &DensityMatrix,
    part: &Bipartition,
    config: &RoofConfig,
) -> Result<RoofResult> {
    roof_optimize(rho, &PureFunctional::Concurrence(part.clone()), RoofMode::Min, config)
}

/// Two-qubit closed forms next to the oracle values they should match.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OracleComparison {
    pub wootters: f64,
    pub oracle_min: f64,
    pub sum_mu: f64,
    pub oracle_max: f64,
    pub negativity: f64,
}

impl OracleComparison {
    /// Largest disagreement between a closed form and its oracle value.
    pub fn max_gap(&self) -> f64 {
        (self.oracle_min - self.wootters).abs().max((self.oracle_max - self.sum_mu).abs())
    }

    /// `N <= oracle_min <= oracle_max`, each up to `slack`.
    pub fn ordered(&self, slack: f64) -> bool {
        self.negativity <= self.oracle_min + slack && self.oracle_min <= self.oracle_max + slack
    }
}

/// Runs the concurrence oracle in both modes on a two-qubit state.
pub fn oracle_comparison(rho: &DensityMatrix, config: &RoofConfig) -> Result<OracleComparison> {
    let mu = spin_flip_spectrum(rho)?;
    let ab = Bipartition::new(&[0], 2)?;
    let functional = PureFunctional::Concurrence(ab.clone());
    Ok(OracleComparison {
        wootters: concurrence_from_spectrum(&mu),
        oracle_min: roof_optimize(rho, &functional, RoofMode::Min, config)?.value,
        sum_mu: assistance_from_spectrum(&mu),
        oracle_max: roof_optimize(rho, &functional, RoofMode::Max, config)?.value,
        negativity: negativity(rho, &ab)?.value,
    })
}

struct PolishBudget {
    max_sweeps: usize,
    sweep_tol: f64,
    angle_tol: f64,
}

const SCREEN: PolishBudget = PolishBudget { max_sweeps: 40, sweep_tol: 1e-6, angle_tol: 1e-4 };
const REFINE: PolishBudget = PolishBudget { max_sweeps: 300, sweep_tol: 1e-9, angle_tol: 1e-7 };
// Screened restarts that get the full polish.
const REFINED: usize = 4;
const THETA_GRID: [f64; 6] = [-3.0 * PI / 8.0, -PI / 4.0, -PI / 8.0, PI / 8.0, PI / 4.0, 3.0 * PI / 8.0];
const PHASE_GRID: [f64; 3] = [0.0, PI / 3.0, 2.0 * PI / 3.0];

/// Coordinate descent over member pairs. Returns whether the last sweep
/// improved the signed objective by less than the budget's tolerance.
fn polish(members: &mut [C64], n: usize, eval: &Evaluator, sign: f64, budget: &PolishBudget) -> bool {
    let m = members.len() / n;
    let mut vals: Vec<f64> = members.chunks(n).map(|c| sign * eval.weighted(c)).collect();
    let mut a = vec![ZERO; n];
    let mut b = vec![ZERO; n];

    let mix = |out_a: &mut [C64], out_b: &mut [C64], ja: &[C64], kb: &[C64], theta: f64, phi: f64| {
        let (s, c) = theta.sin_cos();
        let e = C64::from_polar(1.0, phi);
        for i in 0..n {
            out_a[i] = ja[i] * c - e * kb[i] * s;
            out_b[i] = e.conj() * ja[i] * s + kb[i] * c;
        }
    };

    for _ in 0..budget.max_sweeps {
        let mut gained = 0.0;
        for j in 0..m {
            for k in j + 1..m {
                let (head, tail) = members.split_at_mut(k * n);
                let pj = &mut head[j * n..(j + 1) * n];
                let pk = &mut tail[..n];
                let base = vals[j] + vals[k];
                let mut trial = |theta: f64, phi: f64| -> f64 {
                    mix(&mut a, &mut b, pj, pk, theta, phi);
                    sign * (eval.weighted(&a) + eval.weighted(&b))
                };

                let mut best = (0.0, 0.0, base);
                for &phi in &PHASE_GRID {
                    for &theta in &THETA_GRID {
                        let v = trial(theta, phi);
                        if v < best.2 {
                            best = (theta, phi, v);
                        }
                    }
                }
                let (mut st, mut sp) = (PI / 16.0, PI / 6.0);
                let mut steps = 0;
                while st > budget.angle_tol && steps < 400 {
                    steps += 1;
                    let mut moved = false;
                    for (dt, dp) in [(st, 0.0), (-st, 0.0), (0.0, sp), (0.0, -sp)] {
                        let v = trial(best.0 + dt, best.1 + dp);
                        if v < best.2 {
                            best = (best.0 + dt, best.1 + dp, v);
                            moved = true;
                            break;
                        }
                    }
                    if !moved {
                        st *= 0.5;
                        sp *= 0.5;
                    }
                }

                if best.2 < base {
                    mix(&mut a, &mut b, pj, pk, best.0, best.1);
                    pj.copy_from_slice(&a);
                    pk.copy_from_slice(&b);
                    vals[j] = sign * eval.weighted(pj);
                    vals[k] = sign * eval.weighted(pk);
                    gained += base - (vals[j] + vals[k]);
                }
            }
        }
        if gained < budget.sweep_tol {
            return true;
        }
    }
    false
}
