//! Acín canonical form of three-qubit pure states,
//!
//! `λ0|000> + λ1 e^{iφ}|100> + λ2|101> + λ3|110> + λ4|111>`,
//!
//! and the scalar quantities used to bound `C(ρ_AB) + C_a(ρ_AB)` on it.

use std::cmp::Ordering;
use std::f64::consts::PI;

use nalgebra::Matrix2;
use rand::Rng;
use rand_distr::{Exp1, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{concurrence_pure, two_qubit_pair_from_factor};
use crate::qstate::{Bipartition, CVector, StateVector, C64};
use crate::tolerance;

/// Five nonnegative amplitudes and one phase of the canonical form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcinParams {
    pub lambda: [f64; 5],
    pub phi: f64,
}

impl AcinParams {
    pub fn new(lambda: [f64; 5], phi: f64) -> Result<Self> {
        if lambda.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return Err(Error::OutOfRange(format!("coefficients must be nonnegative: {lambda:?}")));
        }
        let norm: f64 = lambda.iter().map(|l| l * l).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::OutOfRange(format!("squared coefficients sum to {norm}")));
        }
        if !(0.0..=PI).contains(&phi) {
            return Err(Error::OutOfRange(format!("phase {phi} outside [0, π]")));
        }
        Ok(Self { lambda, phi })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Self = serde_json::from_str(text)?;
        Self::new(raw.lambda, raw.phi)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("params serialization")
    }

    /// `sqrt(λ3² + λ4²)`
    pub fn r(&self) -> f64 {
        self.lambda[3].hypot(self.lambda[4])
    }

    /// `λ0 (λ3 + r)`
    pub fn t(&self) -> f64 {
        self.lambda[0] * (self.lambda[3] + self.r())
    }

    fn ordering_key(&self) -> [f64; 6] {
        let l = self.lambda;
        [l[0], l[1], l[2], l[3], l[4], self.phi]
    }
}

/// Draws `λ²` from the flat Dirichlet distribution on the 4-simplex and
/// `φ` uniformly on `[0, π]`.
pub fn random_params<R: Rng + ?Sized>(rng: &mut R) -> AcinParams {
    let mut e = [0.0f64; 5];
    for x in e.iter_mut() {
        *x = rng.sample(Exp1);
    }
    let total: f64 = e.iter().sum();
    let lambda = e.map(|x| (x / total).sqrt());
    let phi = rng.sample(Uniform::new_inclusive(0.0, PI).expect("valid range"));
    AcinParams { lambda, phi }
}

pub fn acin_reconstruct(params: &AcinParams) -> StateVector {
    let [l0, l1, l2, l3, l4] = params.lambda;
    let mut v = CVector::zeros(8);
    v[0] = C64::new(l0, 0.0);
    v[4] = C64::from_polar(l1, params.phi);
    v[5] = C64::new(l2, 0.0);
    v[6] = C64::new(l3, 0.0);
    v[7] = C64::new(l4, 0.0);
    StateVector::normalized(vec![2, 2, 2], v).expect("canonical parameters have unit norm")
}

/// `A(φ) = λ0²λ2² + λ0²λ4² + λ1²λ4² + λ2²λ3² − 2 λ1λ2λ3λ4 cos φ`.
pub fn a_phi(params: &AcinParams) -> f64 {
    let [l0, l1, l2, l3, l4] = params.lambda;
    let a = l0 * l0 * l2 * l2 + l0 * l0 * l4 * l4 + l1 * l1 * l4 * l4 + l2 * l2 * l3 * l3
        - 2.0 * l1 * l2 * l3 * l4 * params.phi.cos();
    a.max(0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AcinMeasures {
    pub c_ab: f64,
    pub ca_ab: f64,
    pub c_c_ab: f64,
}

/// Closed-form `C(ρ_AB) = 2λ0λ3`, `C_a(ρ_AB) = 2λ0 r` and `C(|ψ>_{C|AB}) = 2 sqrt(A(φ))`.
pub fn acin_measures(params: &AcinParams) -> AcinMeasures {
    let l = params.lambda;
    AcinMeasures {
        c_ab: 2.0 * l[0] * l[3],
        ca_ab: 2.0 * l[0] * params.r(),
        c_c_ab: 2.0 * a_phi(params).sqrt(),
    }
}

/// `1 − 4A(φ)` written as the squared Bloch length of qubit C,
/// `(ρ_00 − ρ_11)² + 4|ρ_01|²`, which stays accurate when it is near zero.
/// Agrees with `1 − 4A(φ)` for normalized parameters.
fn external_gap_sq(params: &AcinParams) -> f64 {
    let [l0, l1, l2, l3, l4] = params.lambda;
    let z = l0 * l0 + l1 * l1 + l3 * l3 - l2 * l2 - l4 * l4;
    let off = C64::from_polar(l1 * l2, params.phi) + l3 * l4;
    z * z + 4.0 * off.norm_sqr()
}

/// `f = 1 + sqrt(1 − 4A(φ)) − 2t`; nonnegative for every valid input.
pub fn theorem_residual_f(params: &AcinParams) -> Result<f64> {
    let radicand = 1.0 - 4.0 * a_phi(params);
    if radicand < -tolerance::IDENTITY {
        return Err(Error::Contract(format!("1 - 4A(φ) = {radicand:e} is negative")));
    }
    Ok(1.0 + external_gap_sq(params).sqrt() - 2.0 * params.t())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProofQuantities {
    pub r: f64,
    pub t: f64,
    pub s: f64,
    pub u: f64,
    pub delta: f64,
    pub a_phi: f64,
    /// `A` at the worst-case phase `cos φ = −1`.
    pub a_wc: f64,
    /// Maximum of `a_wc` over `(λ1, λ2)` on the circle `λ1² + λ2² = s`.
    pub a_max: f64,
    pub f: f64,
    pub n_matrix: [[f64; 2]; 2],
    pub lambda_max_n: f64,
}

impl ProofQuantities {
    /// `1 + sqrt(1 − 4 a_wc) − 2t`
    pub fn worst_case_bound(&self) -> f64 {
        1.0 + (1.0 - 4.0 * self.a_wc).max(0.0).sqrt() - 2.0 * self.t
    }

    /// `1 + sqrt(1 − 4 a_max) − 2t`
    pub fn reduced_bound(&self) -> f64 {
        1.0 + (1.0 - 4.0 * self.a_max).max(0.0).sqrt() - 2.0 * self.t
    }
}

pub fn proof_quantities(params: &AcinParams) -> Result<ProofQuantities> {
    let [l0, l1, l2, l3, l4] = params.lambda;
    let r = params.r();
    let t = params.t();
    let s = 1.0 - l0 * l0 - r * r;
    let u = l0 * l0 + r * r;
    // U² − 4λ0²λ4² = (λ0² − λ4²)² + λ3²(λ3² + 2λ0² + 2λ4²), free of cancellation.
    let (a, b, c) = (l0 * l0, l3 * l3, l4 * l4);
    let delta = ((a - c).powi(2) + b * (b + 2.0 * a + 2.0 * c)).sqrt();
    let cross = l2 * l3 + l1 * l4;
    let a_wc = l0 * l0 * (l2 * l2 + l4 * l4) + cross * cross;
    let lambda_max_n = (u + delta) / 2.0;
    let a_max = l0 * l0 * l4 * l4 + s * lambda_max_n;
    Ok(ProofQuantities {
        r,
        t,
        s,
        u,
        delta,
        a_phi: a_phi(params),
        a_wc,
        a_max,
        f: theorem_residual_f(params)?,
        n_matrix: [[l4 * l4, l3 * l4], [l3 * l4, l3 * l3 + l0 * l0]],
        lambda_max_n,
    })
}

/// `(1 − 4 A_max) − (Δ − s)²`; identically zero.
pub fn key_identity_residual(params: &AcinParams) -> Result<f64> {
    let q = proof_quantities(params)?;
    Ok((1.0 - 4.0 * q.a_max) - (q.delta - q.s).powi(2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EstimateCase {
    /// `t <= 1/2`: `f >= 1 - 2t >= 0` directly.
    SmallOverlap,
    /// `t > 1/2`: needs `U + Δ >= 2t`.
    LargeOverlap,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FinalEstimate {
    pub case: EstimateCase,
    pub t: f64,
    /// `1 − 2t`
    pub small_margin: f64,
    /// `U + Δ − 2t`
    pub large_margin: f64,
    /// `4 λ0 (r + λ3)(λ0 − r)²`
    pub certificate: f64,
    /// `4 λ0 (λ3 + r)(U − λ0(λ3 + r)) − 4 λ0² λ4²`
    pub certificate_expansion: f64,
    pub holds: bool,
}

pub fn final_estimate_check(params: &AcinParams) -> Result<FinalEstimate> {
    let q = proof_quantities(params)?;
    let [l0, _, _, l3, l4] = params.lambda;
    let r = q.r;
    let certificate = 4.0 * l0 * (r + l3) * (l0 - r).powi(2);
    let certificate_expansion =
        4.0 * l0 * (l3 + r) * (q.u - l0 * (l3 + r)) - 4.0 * l0 * l0 * l4 * l4;
    let small_margin = 1.0 - 2.0 * q.t;
    let large_margin = q.u + q.delta - 2.0 * q.t;
    // Rounding puts t = 1/2 exactly on either side; the boundary belongs to
    // the first case, whose margin is then zero.
    let case = if q.t <= 0.5 + tolerance::IDENTITY {
        EstimateCase::SmallOverlap
    } else {
        EstimateCase::LargeOverlap
    };
    let holds = match case {
        EstimateCase::SmallOverlap => small_margin >= -tolerance::IDENTITY,
        EstimateCase::LargeOverlap => {
            large_margin >= -tolerance::IDENTITY
                && (certificate - certificate_expansion).abs() <= tolerance::IDENTITY
        }
    };
    Ok(FinalEstimate {
        case,
        t: q.t,
        small_margin,
        large_margin,
        certificate,
        certificate_expansion,
        holds,
    })
}

/// Local-unitary invariants used to certify a decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LuInvariants {
    /// Mixed-state concurrence of ρ_AB, ρ_AC, ρ_BC.
    pub pair_concurrence: [f64; 3],
    /// Pure-state concurrence across A|BC, B|AC, C|AB.
    pub split_concurrence: [f64; 3],
    /// Tr ρ_A², Tr ρ_B², Tr ρ_C².
    pub purity: [f64; 3],
}

impl LuInvariants {
    pub fn of(psi: &StateVector) -> Result<Self> {
        if psi.dims() != [2, 2, 2] {
            return Err(Error::Dimension(format!("expected three qubits, got {:?}", psi.dims())));
        }
        let mut inv = Self { pair_concurrence: [0.0; 3], split_concurrence: [0.0; 3], purity: [0.0; 3] };
        for (slot, pair) in [[0usize, 1], [0, 2], [1, 2]].iter().enumerate() {
            let x = psi.bipartite_matrix(&Bipartition::new(pair, 3)?)?;
            inv.pair_concurrence[slot] = two_qubit_pair_from_factor(&x)?.0.value;
        }
        for k in 0..3 {
            inv.split_concurrence[k] = concurrence_pure(psi, &Bipartition::new(&[k], 3)?)?.value;
            inv.purity[k] = psi.reduced(&[k])?.purity();
        }
        Ok(inv)
    }

    pub fn max_deviation(&self, other: &Self) -> f64 {
        let a = self.pair_concurrence.iter().chain(&self.split_concurrence).chain(&self.purity);
        let b = other.pair_concurrence.iter().chain(&other.split_concurrence).chain(&other.purity);
        a.zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub original: LuInvariants,
    pub reconstructed: LuInvariants,
    pub max_deviation: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Decomposition {
    pub params: AcinParams,
    pub certificate: Certificate,
}

type Slice = Matrix2<C64>;

// Amplitudes below this are treated as exact zeros when fixing phases.
const ZERO_AMPLITUDE: f64 = 1e-13;

/// Canonical parameters of a three-qubit pure state.
pub fn acin_decompose(psi: &StateVector) -> Result<AcinParams> {
    Ok(decompose_with_certificate(psi)?.params)
}

/// Canonical parameters together with the invariant-matching certificate.
///
/// The qubit-A rotation is chosen so that its first output slice
/// `a T0 + b T1` is singular, i.e. `(a, b)` is a projective root of
/// `det(a T0 + b T1)`. Each root yields a candidate; candidates that certify
/// are ranked by preferring `λ0 > 0` and then the lexicographically smallest
/// `(λ0, ..., λ4, φ)`. If no root certifies (or the determinant form vanishes
/// identically), rotations from the A|BC Schmidt basis are tried.
pub fn decompose_with_certificate(psi: &StateVector) -> Result<Decomposition> {
    let original = LuInvariants::of(psi)?;
    let amps = psi.amplitudes();
    let t0 = Slice::new(amps[0], amps[1], amps[2], amps[3]);
    let t1 = Slice::new(amps[4], amps[5], amps[6], amps[7]);

    let c0 = t0.determinant();
    let c2 = t1.determinant();
    let c1 = t0[(0, 0)] * t1[(1, 1)] + t1[(0, 0)] * t0[(1, 1)]
        - t0[(0, 1)] * t1[(1, 0)]
        - t1[(0, 1)] * t0[(1, 0)];

    let mut best: Option<(AcinParams, Certificate)> = None;
    let mut worst_seen = 0.0f64;
    let mut consider = |rows: Vec<(C64, C64)>, best: &mut Option<(AcinParams, Certificate)>| -> Result<()> {
        for (a, b) in rows {
            let params = canonicalize(&t0, &t1, a, b);
            let reconstructed = LuInvariants::of(&acin_reconstruct(&params))?;
            let max_deviation = original.max_deviation(&reconstructed);
            worst_seen = worst_seen.max(max_deviation);
            if max_deviation > tolerance::CERTIFICATE {
                continue;
            }
            let cert = Certificate { original, reconstructed, max_deviation };
            if best.as_ref().is_none_or(|(p, _)| prefer(&params, p) == Ordering::Less) {
                *best = Some((params, cert));
            }
        }
        Ok(())
    };

    consider(projective_roots(c0, c1, c2), &mut best)?;
    if best.is_none() {
        consider(schmidt_rows(&t0, &t1), &mut best)?;
    }
    best.map(|(params, certificate)| Decomposition { params, certificate }).ok_or_else(|| {
        Error::Decomposition(format!(
            "no candidate matched the invariants within {:e} (smallest deviation above {worst_seen:e})",
            tolerance::CERTIFICATE
        ))
    })
}

fn prefer(a: &AcinParams, b: &AcinParams) -> Ordering {
    let empty = |p: &AcinParams| p.lambda[0] <= ZERO_AMPLITUDE;
    empty(a).cmp(&empty(b)).then_with(|| {
        a.ordering_key()
            .iter()
            .zip(b.ordering_key().iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

fn unit_row(a: C64, b: C64) -> (C64, C64) {
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    (a / n, b / n)
}

/// Unit vectors `(a, b)` with `c0 a² + c1 ab + c2 b² = 0`.
fn projective_roots(c0: C64, c1: C64, c2: C64) -> Vec<(C64, C64)> {
    let scale = c0.norm().max(c1.norm()).max(c2.norm());
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    if scale < 1e-13 {
        return Vec::new();
    }
    // Solve in whichever affine chart keeps the leading coefficient largest.
    let flip = c2.norm() < c0.norm();
    let (lead, mid, tail) = if flip { (c0, c1, c2) } else { (c2, c1, c0) };
    let roots: Vec<C64> = if lead.norm() <= 1e-14 * scale {
        // lead and tail both vanish: the roots are 0 and infinity.
        return vec![(one, zero), (zero, one)];
    } else {
        let disc = (mid * mid - 4.0 * lead * tail).sqrt();
        let plus = mid + disc;
        let minus = mid - disc;
        let q = if plus.norm() >= minus.norm() { -plus / 2.0 } else { -minus / 2.0 };
        if q.norm() <= 1e-300 {
            vec![zero]
        } else {
            vec![q / lead, tail / q]
        }
    };
    roots
        .into_iter()
        .map(|x| if flip { unit_row(x, one) } else { unit_row(one, x) })
        .collect()
}

/// Rows of the unitary that diagonalizes ρ_A, plus the two basis rows.
fn schmidt_rows(t0: &Slice, t1: &Slice) -> Vec<(C64, C64)> {
    let inner = |x: &Slice, y: &Slice| x.iter().zip(y.iter()).map(|(p, q)| p * q.conj()).sum::<C64>();
    let rho_a = nalgebra::Matrix2::new(inner(t0, t0), inner(t0, t1), inner(t1, t0), inner(t1, t1));
    let eig = rho_a.symmetric_eigen();
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut rows: Vec<(C64, C64)> = (0..2)
        .map(|k| {
            let v = eig.eigenvectors.column(k);
            unit_row(v[0].conj(), v[1].conj())
        })
        .collect();
    rows.push((one, zero));
    rows.push((zero, one));
    rows
}

/// Sorted SVD of a 2x2 slice: `(U, [σ0, σ1], V)` with `m = U diag(σ) V^dag`.
fn svd2(m: &Slice) -> (Slice, [f64; 2], Slice) {
    let svd = m.svd(true, true);
    let mut u = svd.u.expect("u requested");
    let mut v = svd.v_t.expect("v_t requested").adjoint();
    let mut s = [svd.singular_values[0], svd.singular_values[1]];
    if s[1] > s[0] {
        s.swap(0, 1);
        u.swap_columns(0, 1);
        v.swap_columns(0, 1);
    }
    (u, s, v)
}

fn canonicalize(t0: &Slice, t1: &Slice, a: C64, b: C64) -> AcinParams {
    // Qubit A rotated by [[a, b], [-b*, a*]].
    let s0 = t0 * a + t1 * b;
    let s1 = t1 * a.conj() - t0 * b.conj();

    if s0.norm() <= ZERO_AMPLITUDE {
        let (_, sv, _) = svd2(&s1);
        return finish([0.0, sv[0], 0.0, 0.0, sv[1]], 0.0);
    }
    let (u, sv, v) = svd2(&s0);
    // Rotations on B and C: rows by U^dag, columns by V.
    let rest = u.adjoint() * s1 * v;
    let (p, q, r, w) = (rest[(0, 0)], rest[(0, 1)], rest[(1, 0)], rest[(1, 1)]);
    let phase = if [p, q, r, w].iter().any(|z| z.norm() <= ZERO_AMPLITUDE) {
        0.0
    } else {
        // The only phase not removable by local diagonal unitaries.
        (p * w * q.conj() * r.conj()).arg().abs()
    };
    finish([sv[0], p.norm(), q.norm(), r.norm(), w.norm()], phase)
}

fn finish(lambda: [f64; 5], phi: f64) -> AcinParams {
    let norm = lambda.iter().map(|l| l * l).sum::<f64>().sqrt();
    AcinParams { lambda: lambda.map(|l| l / norm), phi: phi.clamp(0.0, PI) }
}
