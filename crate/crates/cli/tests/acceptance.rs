//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Run with `cargo test -p monogamy-cli --test acceptance`.

use std::f64::consts::FRAC_PI_4;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use monogamy_core::canonical::{
    acin_measures, decompose_with_certificate, final_estimate_check, key_identity_residual, proof_quantities,
    random_params,
};
use monogamy_core::convexroof::{roof_optimize, PureFunctional, RoofConfig};
use monogamy_core::measures::{concurrence_pure, negativity};
use monogamy_core::monogamy::{
    corollary_campaign, family_measures, oracle_campaign, saturation_sweep, theorem_campaign, theorem_check,
    FamilyParams, OracleBudget,
};
use monogamy_core::qstate::{haar_random_pure, random_mixed, rng_from_seed};
use monogamy_core::{Bipartition, DensityMatrix, StateVector};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

fn min_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(f64::INFINITY, f64::min)
}

fn theorem_campaign_1e6() -> Outcome {
    let reports = theorem_campaign(1_000_000, 20_250_101).expect("campaign runs");
    let worst = min_of(reports.iter().map(|r| r.min_residual()));
    outcome(worst >= -1e-9, format!("10^6 pure states, min residual over three forms {worst:.3e} (need >= -1e-9)"))
}

fn saturation_curve() -> Outcome {
    let rows = saturation_sweep(101, FRAC_PI_4).expect("sweep runs");
    // lhs_conc is C + C_a − sqrt(1 − C_ext²), so this is the saturation gap.
    let gap = max_of(rows.iter().map(|r| (r.lhs_conc - 1.0).abs()));
    let curve = max_of(rows.iter().map(|r| {
        let (c, ca, ext) = family_measures(&FamilyParams::new(r.theta, r.phi_fam).unwrap());
        (r.c_ab - c).abs().max((r.ca_ab - ca).abs()).max((r.c_ext - ext).abs())
    }));
    outcome(
        rows.len() == 101 && gap <= 1e-10 && curve <= 1e-10,
        format!("101-point family, saturation gap {gap:.3e}, closed-form curve gap {curve:.3e} (need <= 1e-10)"),
    )
}

fn known_points() -> Outcome {
    let h = 0.5f64.sqrt();
    let t = (1.0f64 / 3.0).sqrt();
    let ghz = StateVector::from_real(vec![2, 2, 2], &[h, 0., 0., 0., 0., 0., 0., h]).unwrap();
    let w = StateVector::from_real(vec![2, 2, 2], &[0., t, t, 0., t, 0., 0., 0.]).unwrap();
    let cases = [(ghz, [0.0, 1.0, 1.0]), (w, [2.0 / 3.0, 2.0 / 3.0, 2.0 * 2f64.sqrt() / 3.0])];
    let mut err: f64 = 0.0;
    for (psi, want) in &cases {
        let r = theorem_check(psi).unwrap();
        for (got, want) in [r.c_ab, r.ca_ab, r.c_ext].iter().zip(want) {
            err = err.max((got - want).abs());
        }
        err = err.max(r.residual_conc.abs());
    }
    outcome(err <= 1e-10, format!("GHZ and W measures and residuals, max error {err:.3e} (need <= 1e-10)"))
}

fn key_identity() -> Outcome {
    let mut rng = rng_from_seed(4);
    let worst = max_of((0..100_000).map(|_| key_identity_residual(&random_params(&mut rng)).unwrap().abs()));
    outcome(worst <= 1e-12, format!("10^5 random parameter sets, max identity residual {worst:.3e} (need <= 1e-12)"))
}

fn proof_chain() -> Outcome {
    let mut rng = rng_from_seed(4);
    let (mut chain, mut bound, mut cert) = (f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0f64);
    let mut estimates_hold = true;
    for _ in 0..100_000 {
        let p = random_params(&mut rng);
        let q = proof_quantities(&p).unwrap();
        chain = chain.max(q.a_phi - q.a_wc).max(q.a_wc - q.a_max);
        bound = bound.max(q.reduced_bound() - q.f);
        let e = final_estimate_check(&p).unwrap();
        cert = cert.max((e.certificate - e.certificate_expansion).abs());
        estimates_hold &= e.holds;
    }
    outcome(
        chain <= 1e-12 && bound <= 1e-12 && cert <= 1e-12 && estimates_hold,
        format!(
            "10^5 parameter sets, worst A ordering excess {chain:.3e}, worst f shortfall {bound:.3e}, \
             certificate mismatch {cert:.3e} (need <= 1e-12)"
        ),
    )
}

fn canonical_round_trip() -> Outcome {
    let (mut failures, mut worst_cert, mut worst_measure) = (0usize, 0.0f64, 0.0f64);
    for s in 0..10_000u64 {
        let psi = haar_random_pure(&[2, 2, 2], 60_000 + s).unwrap();
        match decompose_with_certificate(&psi) {
            Ok(d) if d.certificate.max_deviation <= 1e-8 => {
                worst_cert = worst_cert.max(d.certificate.max_deviation);
                let m = acin_measures(&d.params);
                let r = theorem_check(&psi).unwrap();
                worst_measure = worst_measure
                    .max((m.c_ab - r.c_ab).abs())
                    .max((m.ca_ab - r.ca_ab).abs())
                    .max((m.c_c_ab - r.c_ext).abs());
            }
            _ => failures += 1,
        }
    }
    outcome(
        failures == 0 && worst_measure <= 1e-10,
        format!(
            "10^4 states, {failures} failures, worst invariant deviation {worst_cert:.3e} (need <= 1e-8), \
             closed-form measure gap {worst_measure:.3e} (need <= 1e-10)"
        ),
    )
}

fn measure_equivalences() -> Outcome {
    let mut pure_gap: f64 = 0.0;
    for dims in [[2usize, 2], [2, 4]] {
        let part = Bipartition::new(&[0], 2).unwrap();
        for s in 0..10_000u64 {
            let psi = haar_random_pure(&dims, 70_000 + s).unwrap();
            let n = negativity(&DensityMatrix::from_pure(&psi), &part).unwrap().value;
            let c = concurrence_pure(&psi, &part).unwrap().value;
            pure_gap = pure_gap.max((n - c).abs());
        }
    }

    // N <= Ñ <= Ñ_a holds for any ensemble the oracle reports, so a small
    // budget (minimal ensembles, two restarts) is enough to exercise it.
    let part = Bipartition::new(&[0], 2).unwrap();
    let functional = PureFunctional::Negativity(part.clone());
    let slack = 2e-3;
    let mut worst: f64 = f64::NEG_INFINITY;
    for s in 0..1_000u64 {
        let rank = 2 + (s % 3) as usize;
        let rho = random_mixed(&[2, 2], rank, 80_000 + s).unwrap();
        let config = RoofConfig { ensemble_size: Some(rank), restarts: 2, seed: s };
        let n = negativity(&rho, &part).unwrap().value;
        let lo = roof_optimize(&rho, &functional, monogamy_core::RoofMode::Min, &config).unwrap().value;
        let hi = roof_optimize(&rho, &functional, monogamy_core::RoofMode::Max, &config).unwrap().value;
        worst = worst.max(n - lo).max(lo - hi);
    }
    outcome(
        pure_gap <= 1e-10 && worst <= slack,
        format!(
            "pure N = C on 2x2 and 2x4 (2 x 10^4 states) gap {pure_gap:.3e} (need <= 1e-10); \
             10^3 mixed states, worst ordering excess {worst:.3e} (need <= 2e-3)"
        ),
    )
}

fn oracle_cross_validation() -> Outcome {
    let budget = OracleBudget::default_for(&[2, 2]);
    let mut rows = oracle_campaign(100, 2, 90_001, &budget).unwrap();
    rows.extend(oracle_campaign(100, 3, 90_002, &budget).unwrap());
    let gap_min = max_of(rows.iter().map(|r| (r.oracle_min - r.wootters).abs()));
    let gap_max = max_of(rows.iter().map(|r| (r.oracle_max - r.sum_mu).abs()));
    outcome(
        gap_min <= 2e-3 && gap_max <= 2e-3,
        format!(
            "200 rank-2/3 states ({} restarts), |min - Wootters| {gap_min:.3e}, |max - sum mu| {gap_max:.3e} (need <= 2e-3)",
            budget.restarts
        ),
    )
}

fn corollary() -> Outcome {
    let budget = OracleBudget::default_for(&[2, 2, 2]);
    let mixed = corollary_campaign(200, 2, 100_001, &budget).unwrap();
    let pure = corollary_campaign(500, 1, 100_002, &budget).unwrap();
    let worst_mixed = min_of(mixed.iter().map(|r| r.residual));
    let worst_pure = min_of(pure.iter().map(|r| r.residual));
    outcome(
        worst_mixed >= -2e-3 && worst_pure >= -1e-9,
        format!(
            "200 rank-2 states ({} restarts) min residual {worst_mixed:.3e} (need >= -2e-3); \
             500 rank-1 states min residual {worst_pure:.3e} (need >= -1e-9)",
            budget.restarts
        ),
    )
}

fn run_twice(args: &[&str], dir: &Path, tag: &str) -> Result<bool, String> {
    let mut outputs = Vec::new();
    for round in 0..2 {
        let out = dir.join(format!("{tag}-{round}"));
        let status = Command::new(env!("CARGO_BIN_EXE_monogamy"))
            .args(args)
            .arg("--out")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(format!("{tag} exited with {:?}", status.status.code()));
        }
        outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    Ok(!outputs[0].is_empty() && outputs[0] == outputs[1])
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let state = dir.path().join("state.json");
    std::fs::write(&state, haar_random_pure(&[2, 2, 2], 11).unwrap().to_json()).unwrap();
    let state = state.to_str().unwrap().to_string();
    let commands: Vec<(&str, Vec<&str>)> = vec![
        ("theorem-csv", vec!["verify-theorem", "--samples", "500", "--seed", "7"]),
        ("theorem-json", vec!["verify-theorem", "--samples", "50", "--seed", "7", "--format", "json"]),
        ("sweep", vec!["sweep-family", "--grid", "101"]),
        ("sweep-json", vec!["sweep-family", "--grid", "11", "--phi-fam", "0.5", "--format", "json"]),
        ("canonical", vec!["canonical", "--input", &state, "--format", "json"]),
        ("corollary", vec!["verify-corollary", "--samples", "4", "--rank", "2", "--seed", "3"]),
        ("corollary-pure", vec!["verify-corollary", "--samples", "50", "--rank", "1", "--seed", "3"]),
        ("oracle", vec!["oracle-check", "--samples", "6", "--seed", "3", "--rank", "3"]),
    ];
    let mut differing = Vec::new();
    for (tag, args) in &commands {
        match run_twice(args, dir.path(), tag) {
            Ok(true) => {}
            Ok(false) => differing.push(tag.to_string()),
            Err(e) => differing.push(e),
        }
    }
    outcome(
        differing.is_empty(),
        if differing.is_empty() {
            format!("{} command configurations reproduce byte-identical reports", commands.len())
        } else {
            format!("not reproducible: {}", differing.join(", "))
        },
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("theorem campaign", theorem_campaign_1e6),
        ("saturation reproduction", saturation_curve),
        ("known saturating points", known_points),
        ("key identity", key_identity),
        ("proof-chain inequalities", proof_chain),
        ("canonical-form round trip", canonical_round_trip),
        ("measure equivalences", measure_equivalences),
        ("oracle cross-validation", oracle_cross_validation),
        ("corollary campaign", corollary),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict} {name}: {} [{:.1}s]", i + 1, o.detail, start.elapsed().as_secs_f64());
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
