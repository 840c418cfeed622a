//! Acceptance suite. One line per criterion, non-zero exit if any fails.

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_trace_core::geodesics::{closure_census, liouville_mean_square, LiouvilleGrid, CLOSURE_THRESHOLD};
use spectral_trace_core::geometry::zeta::ThetaKind;
use spectral_trace_core::geometry::{builtin_metric, integrate_scalar, HarmonicExpansion, MetricFamily, MetricPatch, Profile, ScalarField};
use spectral_trace_core::numerics::FitModel;
use spectral_trace_core::spectra::{cluster_statistics, sphere_galerkin, ShiftReference};
use spectral_trace_core::traces::{
    cluster_law, fit_heat_coefficients, geometric_grid, sf_constants, theorem_rhs, verify_trace, ThetaSeries, TraceConfig,
};

struct Outcome {
    passed: bool,
    detail: String,
}

type Check = fn() -> Result<Outcome, String>;

fn outcome(passed: bool, detail: String) -> Result<Outcome, String> {
    Ok(Outcome { passed, detail })
}

fn heat_trace_constants() -> Result<Outcome, String> {
    let fit = fit_heat_coefficients(&ThetaSeries::round(), &geometric_grid(0.005, 0.04, 8), FitModel::HeatTripleCorrected, ThetaKind::F)
        .map_err(|e| e.to_string())?;
    let h = fit.coefficients;
    let err = [(h.h0 - 1.0).abs(), (h.h1 - 1.0 / 3.0).abs(), (h.h2 - 1.0 / 15.0).abs()];
    outcome(err.iter().all(|&e| e <= 1e-4), format!("(f0, f1, f2) = ({:.8}, {:.8}, {:.8}), max error {:.1e}", h.h0, h.h1, h.h2, err.iter().fold(0.0f64, |a, &b| a.max(b))))
}

fn gauss_bonnet() -> Result<Outcome, String> {
    let mut worst: f64 = 0.0;
    for eps in [0.0, 0.05, 0.1, 0.2] {
        let m = if eps == 0.0 { MetricPatch::round() } else { MetricPatch::zoll(eps).map_err(|e| e.to_string())? };
        let total = integrate_scalar(&m, &ScalarField::Curvature(m.clone())).map_err(|e| e.to_string())?;
        worst = worst.max((total - 4.0 * PI).abs());
    }
    outcome(worst <= 1e-6, format!("max |∬K dS - 4π| = {worst:.1e} over round, zoll(0.05, 0.1, 0.2)"))
}

fn constant_potential_exactness() -> Result<Outcome, String> {
    let mut worst: f64 = 0.0;
    for c in [-1.0, 0.3, 2.0] {
        let r = verify_trace(&MetricPatch::round(), &ScalarField::Constant(c), &TraceConfig::default()).map_err(|e| e.to_string())?;
        worst = worst.max(r.lhs.abs()).max(r.rhs.value.abs()).max(r.discrepancy);
    }
    outcome(worst <= 1e-9, format!("max(|LHS|, |RHS|, |LHS - RHS|) = {worst:.1e} for c in {{-1, 0.3, 2}}"))
}

fn odd_potential_trace() -> Result<Outcome, String> {
    let alpha = 0.5;
    let target = -alpha * alpha / (8.0 * PI);
    let q = ScalarField::harmonic(1, 0, alpha).map_err(|e| e.to_string())?;
    let cfg = TraceConfig { degree: 240, ..TraceConfig::default() };
    let r = verify_trace(&MetricPatch::round(), &q, &cfg).map_err(|e| e.to_string())?;
    let (dl, dr) = ((r.lhs - target).abs(), (r.rhs.value - target).abs());
    outcome(
        dl <= 2e-4 && dr <= 2e-4 && r.method_gap <= 2e-4,
        format!("Abel LHS {:.9e}, RHS {:.9e}, target {target:.9e}; |LHS - target| {dl:.1e}, partial-sum gap {:.1e}", r.lhs, r.rhs.value, r.method_gap),
    )
}

fn random_band_limited(rng: &mut ChaCha8Rng) -> ScalarField {
    let terms = (0..8)
        .map(|_| {
            let l = rng.gen_range(0..=6usize);
            (l, rng.gen_range(-(l as i64)..=(l as i64)), rng.gen_range(-1.0..1.0))
        })
        .collect();
    ScalarField::Harmonic(HarmonicExpansion::new(terms).expect("valid degrees"))
}

fn sf_oracle_equality() -> Result<Outcome, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut worst_rhs, mut worst_kernel): (f64, f64) = (0.0, 0.0);
    for _ in 0..10 {
        let q = random_band_limited(&mut rng);
        let s = sf_constants(&q).map_err(|e| e.to_string())?;
        let r = theorem_rhs(&MetricPatch::round(), &q, LiouvilleGrid::default()).map_err(|e| e.to_string())?;
        worst_rhs = worst_rhs.max((r.value - 2.0 * s.c1).abs());
        worst_kernel = worst_kernel.max(s.relative_disagreement);
    }
    outcome(worst_rhs <= 1e-8 && worst_kernel <= 1e-6, format!("max |RHS - 2c1| = {worst_rhs:.1e}, max kernel disagreement {worst_kernel:.1e} (10 potentials, band <= 6)"))
}

fn cluster_laws() -> Result<Outcome, String> {
    let q = ScalarField::Harmonic(HarmonicExpansion::new(vec![(2, 0, 0.6), (1, 0, 0.4), (4, 0, 0.3)]).expect("valid degrees"));
    let s = sphere_galerkin(&q, 100).map_err(|e| e.to_string())?;
    let stats = cluster_statistics(&s, ShiftReference::Round).map_err(|e| e.to_string())?;
    let fit = cluster_law(&stats, 5, s.k_max_reliable).map_err(|e| e.to_string())?;
    let [a0, a1, a2] = [fit.coefficients[0], fit.coefficients[1], fit.coefficients[2]];
    let v2 = liouville_mean_square(&MetricPatch::round(), &q).map_err(|e| e.to_string())?.value;
    let k = 60;
    let variance = stats[k].sum_squares / (2 * k + 1) as f64;
    let rel = (variance / v2 - 1.0).abs();
    outcome(
        a0.abs() <= 5e-3 && a1.abs() <= 5e-3 && a2.abs() <= 5e-3 && rel <= 0.05,
        format!("(a0, a1, a2) = ({a0:.1e}, {a1:.1e}, {a2:.1e}); variance/(2k+1) at k = 60 is {variance:.6e} vs V2 {v2:.6e} ({:.2}%)", 100.0 * rel),
    )
}

fn closure_certification() -> Result<Outcome, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let starts: Vec<([f64; 3], f64)> = (0..100)
        .map(|_| {
            let z: f64 = rng.gen_range(-1.0..1.0);
            let phi = rng.gen_range(0.0..TAU);
            let r = (1.0 - z * z).sqrt();
            ([r * phi.cos(), r * phi.sin(), z], rng.gen_range(0.0..TAU))
        })
        .collect();
    let zoll = closure_census(&MetricPatch::zoll(0.1).map_err(|e| e.to_string())?, &starts, CLOSURE_THRESHOLD).map_err(|e| e.to_string())?;
    let control_metric = builtin_metric(MetricFamily::Revolution(Profile::even_bump(0.1))).map_err(|e| e.to_string())?;
    let control = closure_census(&control_metric, &starts, CLOSURE_THRESHOLD).map_err(|e| e.to_string())?;
    outcome(
        zoll.certified() && control.max_residual() > 1e-2,
        format!("zoll(0.1) max residual {:.1e} over 100 starts; control max residual {:.1e}", zoll.max_residual(), control.max_residual()),
    )
}

fn zoll_pipeline() -> Result<Outcome, String> {
    let cfg = TraceConfig { degree: 140, ..TraceConfig::default() };
    let r = verify_trace(&MetricPatch::zoll(0.1).map_err(|e| e.to_string())?, &ScalarField::zero(), &cfg).map_err(|e| e.to_string())?;
    let l = r.fitted_l.coefficients;
    let (e1, e2) = ((l.h1 - 1.0 / 3.0).abs(), (l.h2 - r.heat_l.h2).abs());
    let rel = r.discrepancy / r.rhs.value.abs();
    outcome(
        e1 <= 2e-3 && e2 <= 5e-3 && rel <= 0.1,
        format!("l1 {:.8} (err {e1:.1e}), l2 {:.6} vs -ζ(1) {:.6} (err {e2:.1e}); LHS {:.6e} vs RHS {:.6e} ({:.1e} rel)", l.h1, l.h2, r.heat_l.h2, r.lhs, r.rhs.value, rel),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Check, Duration); 8] = [
        ("heat-trace constants", heat_trace_constants, Duration::from_secs(5)),
        ("Gauss-Bonnet", gauss_bonnet, Duration::from_secs(10)),
        ("constant-potential exactness", constant_potential_exactness, Duration::from_secs(30)),
        ("odd-potential trace", odd_potential_trace, Duration::from_secs(180)),
        ("round-sphere oracle equality", sf_oracle_equality, Duration::from_secs(60)),
        ("cluster laws", cluster_laws, Duration::from_secs(120)),
        ("closure certification", closure_certification, Duration::from_secs(60)),
        ("Zoll pipeline cross-check", zoll_pipeline, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (passed, detail) = match result {
            Ok(o) => (o.passed && elapsed <= *budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failed += 1;
        }
        println!(
            "{} {}. {name}: {detail} [{:.2} s / {} s]",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
