use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use spectral_trace_core::geodesics::{closure_census, lift_at, zelditch_sigma_with};
use spectral_trace_core::geometry::{gauss_curvature_at, heat_coefficients_from_zeta, integrate_scalar, HeatCoefficients, MetricPatch, ScalarField, ThetaKind};
use spectral_trace_core::numerics::FitModel;
use spectral_trace_core::spectra::{zoll_spectrum, ClusteredSpectrum, OperatorSpec, Truncation};
use spectral_trace_core::traces::{fit_heat_coefficients, heat_grid, sf_constants, theorem_rhs, verify_trace_with, HeatFit, ThetaSeries, TraceReport};

use crate::cache::{Lookup, SpectrumCache, SpectrumKind};
use crate::config::ExperimentConfig;
use crate::error::LabError;
use crate::report::{fmt, num, Output, Table};

/// Gauss–Bonnet `--check` bound on `|∬K dS - 4π|`.
pub const GAUSS_BONNET_TOLERANCE: f64 = 1e-6;
/// `oracle --check` bounds.
pub const ORACLE_RHS_TOLERANCE: f64 = 1e-8;
pub const ORACLE_KERNEL_TOLERANCE: f64 = 1e-6;

#[derive(Debug)]
pub struct Context {
    pub config: ExperimentConfig,
    pub metric: MetricPatch,
    pub potential: ScalarField,
    pub out: Output,
    pub cache: SpectrumCache,
    pub check: bool,
    pub seed: u64,
}

impl Context {
    fn violation(&self, failures: Vec<String>) -> Result<(), LabError> {
        if self.check && !failures.is_empty() {
            Err(LabError::Check(failures.join("; ")))
        } else {
            Ok(())
        }
    }
}

fn heat_json(h: &HeatCoefficients) -> Value {
    json!([num(h.h0), num(h.h1), num(h.h2)])
}

fn fit_json(f: &HeatFit) -> Value {
    json!({
        "coefficients": heat_json(&f.coefficients),
        "model": f.fit.model_id(),
        "residual": num(f.fit.residual_norm),
        "t_grid": f.t_grid.iter().map(|&t| num(t)).collect::<Vec<_>>(),
        "warning": f.warning.as_ref().map(|w| w.to_string()),
    })
}

fn sphere_point(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

pub fn curvature(ctx: &mut Context) -> Result<(), LabError> {
    let n = ctx.config.curvature.grid;
    let mut table = Table::new(&["theta", "phi", "x", "y", "z", "curvature"]);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let theta = (i as f64 + 0.5) * PI / n as f64;
        for j in 0..2 * n {
            let phi = j as f64 * PI / n as f64;
            let x = sphere_point(theta, phi);
            let k = gauss_curvature_at(&ctx.metric, x).map_err(|e| LabError::stage("curvature", e))?;
            lo = lo.min(k);
            hi = hi.max(k);
            table.push(vec![fmt(theta), fmt(phi), fmt(x[0]), fmt(x[1]), fmt(x[2]), fmt(k)]);
        }
    }
    let total = integrate_scalar(&ctx.metric, &ScalarField::Curvature(ctx.metric.clone())).map_err(|e| LabError::stage("curvature", e))?;
    let error = (total - 4.0 * PI).abs();
    eprintln!("∬K dS = {total:.15}, |∬K dS - 4π| = {error:.2e}, K in [{lo:.6}, {hi:.6}]");
    ctx.out.csv("curvature.csv", &table)?;
    ctx.out.json(
        "curvature.json",
        "curvature",
        json!({
            "metric": ctx.metric.family_label(),
            "grid": n,
            "curvature_min": num(lo),
            "curvature_max": num(hi),
            "gauss_bonnet_integral": num(total),
            "gauss_bonnet_error": num(error),
            "gauss_bonnet_tolerance": num(GAUSS_BONNET_TOLERANCE),
        }),
    )?;
    let fails = if error > GAUSS_BONNET_TOLERANCE { vec![format!("Gauss-Bonnet error {error:.2e} > {GAUSS_BONNET_TOLERANCE:.0e}")] } else { Vec::new() };
    ctx.violation(fails)
}

/// Uniform points on the sphere with uniform directions.
pub fn random_starts(seed: u64, n: usize) -> Vec<([f64; 3], f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let z: f64 = rng.gen_range(-1.0..1.0);
            let phi = rng.gen_range(0.0..TAU);
            let r = (1.0 - z * z).sqrt();
            ([r * phi.cos(), r * phi.sin(), z], rng.gen_range(0.0..TAU))
        })
        .collect()
}

pub fn geodesics(ctx: &mut Context) -> Result<(), LabError> {
    let g = ctx.config.geodesics.clone();
    let starts = random_starts(ctx.seed, g.starts);
    let census = closure_census(&ctx.metric, &starts, g.threshold).map_err(|e| LabError::stage("geodesics", e))?;
    let mut table = Table::new(&["index", "x", "y", "z", "direction", "closure_residual"]);
    for (i, ((x, dir), r)) in starts.iter().zip(&census.residuals).enumerate() {
        table.push(vec![i.to_string(), fmt(x[0]), fmt(x[1]), fmt(x[2]), fmt(*dir), fmt(*r)]);
    }
    ctx.out.csv("geodesics.csv", &table)?;
    let claims = ctx.metric.claims_zoll();
    eprintln!("closure: max residual {:.2e}, {} of {} above {:.0e}", census.max_residual(), census.failures(), starts.len(), g.threshold);

    // σ along the first start, only meaningful when orbits close
    let mut sigma = Value::Null;
    if census.certified() {
        let (x, dir) = starts[0];
        let start = lift_at(&ctx.metric, x, dir).map_err(|e| LabError::stage("geodesics", e))?;
        let s = zelditch_sigma_with(&ctx.metric, start, g.sigma_samples).map_err(|e| LabError::stage("sigma", e))?;
        let mut st = Table::new(&["r", "sigma", "curvature", "normal_derivative"]);
        for i in 0..s.r.len() {
            st.push(vec![fmt(s.r[i]), fmt(s.sigma[i]), fmt(s.curvature[i]), fmt(s.normal_derivative[i])]);
        }
        ctx.out.csv("sigma.csv", &st)?;
        sigma = json!({
            "average": num(s.average),
            "closure_residual": num(s.closure_residual),
            "wronskian_drift": num(s.wronskian_drift),
            "samples": s.r.len(),
        });
    }
    ctx.out.json(
        "geodesics.json",
        "geodesics",
        json!({
            "metric": ctx.metric.family_label(),
            "claims_closed_geodesics": claims,
            "seed": ctx.seed,
            "starts": starts.len(),
            "threshold": num(g.threshold),
            "max_residual": num(census.max_residual()),
            "failures": census.failures(),
            "certified": census.certified(),
            "sigma": sigma,
        }),
    )?;
    let fails = if claims && !census.certified() {
        vec![format!("{} of {} geodesics fail to close (max residual {:.2e})", census.failures(), starts.len(), census.max_residual())]
    } else {
        Vec::new()
    };
    ctx.violation(fails)
}

fn cached(ctx: &Context, kind: SpectrumKind, with_potential: bool, compute: impl FnOnce() -> Result<ClusteredSpectrum, LabError>) -> Result<ClusteredSpectrum, LabError> {
    let identity = ctx.config.spectrum_identity(with_potential);
    let (s, lookup) = ctx.cache.get_or_compute(&identity, kind, compute)?;
    eprintln!(
        "{} spectrum ({}, k_max = {}): {}",
        kind.name(),
        s.provenance,
        s.k_max_reliable,
        if lookup == Lookup::Hit { "cache hit" } else { "computed" }
    );
    Ok(s)
}

/// `μ` and, when the trace needs it separately, `λ`.
pub fn spectra(ctx: &Context) -> Result<(ClusteredSpectrum, Option<ClusteredSpectrum>), LabError> {
    let degree = ctx.config.solver.degree;
    let spec = OperatorSpec::new(ctx.metric.clone(), ctx.potential.clone(), Truncation::Degree(degree)).map_err(|e| LabError::stage("config", e))?;
    let mu = cached(ctx, SpectrumKind::Mu, true, || spec.solve().map_err(|e| LabError::stage("spectrum", e)))?;
    let lambda = if ctx.potential.is_zero() || ctx.metric.is_round() {
        None
    } else {
        Some(cached(ctx, SpectrumKind::Lambda, false, || zoll_spectrum(&ctx.metric, &ScalarField::zero(), degree).map_err(|e| LabError::stage("spectrum", e)))?)
    };
    Ok((mu, lambda))
}

pub fn spectrum(ctx: &mut Context) -> Result<(), LabError> {
    let (mu, lambda) = spectra(ctx)?;
    let mut table = Table::new(&["kind", "k", "index", "value", "shift"]);
    let mut summary = Vec::new();
    for (kind, s) in [(SpectrumKind::Mu, Some(&mu)), (SpectrumKind::Lambda, lambda.as_ref())] {
        let Some(s) = s else { continue };
        for (k, c) in s.clusters.iter().enumerate() {
            let center = (k * (k + 1)) as f64;
            for (i, &v) in c.iter().enumerate() {
                table.push(vec![kind.name().into(), k.to_string(), i.to_string(), fmt(v), fmt(v - center)]);
            }
        }
        summary.push(json!({
            "kind": kind.name(),
            "provenance": s.provenance,
            "k_max_reliable": s.k_max_reliable,
            "eigenvalues": s.len(),
            "lowest": num(s.clusters[0][0]),
        }));
    }
    ctx.out.csv("spectrum.csv", &table)?;
    ctx.out.json("spectrum.json", "spectrum", json!({ "inputs": ctx.config.spectrum_identity(true), "spectra": summary }))
}

pub fn heat_fit(ctx: &mut Context) -> Result<(), LabError> {
    let (mu, lambda) = spectra(ctx)?;
    let gamma = ctx.config.trace_config().gamma;
    let theta_m = ThetaSeries::Spectrum(&mu);
    let theta_l = match &lambda {
        Some(l) => ThetaSeries::Spectrum(l),
        None if ctx.potential.is_zero() => theta_m,
        None => ThetaSeries::round(),
    };
    let grid = heat_grid(&theta_m, ctx.config.trace.heat_t_min);
    let model = FitModel::HeatTripleCorrected;
    let mut rows = Table::new(&["series", "coefficient", "fitted", "zeta", "abs_error"]);
    let mut fits = serde_json::Map::new();
    let mut worst: f64 = 0.0;
    for (kind, name, theta) in [(ThetaKind::F, "F", ThetaSeries::round()), (ThetaKind::L, "L", theta_l), (ThetaKind::M, "M", theta_m)] {
        let fit = fit_heat_coefficients(&theta, &grid, model, kind).map_err(|e| LabError::stage("heat-fit", e))?;
        let zeta = heat_coefficients_from_zeta(&ctx.metric, &ctx.potential, kind, gamma).map_err(|e| LabError::stage("zeta", e))?;
        let f = fit.coefficients;
        let pairs = [("h0", f.h0, zeta.h0), ("h1", f.h1, zeta.h1), ("h2", f.h2, zeta.h2)];
        for (c, a, b) in pairs {
            worst = worst.max((a - b).abs());
            rows.push(vec![name.into(), c.into(), fmt(a), fmt(b), fmt((a - b).abs())]);
        }
        eprintln!("{name}: fitted ({:.8}, {:.8}, {:.8}) zeta ({:.8}, {:.8}, {:.8})", f.h0, f.h1, f.h2, zeta.h0, zeta.h1, zeta.h2);
        fits.insert(name.into(), json!({ "fit": fit_json(&fit), "zeta": heat_json(&zeta) }));
    }
    let mut theta_table = Table::new(&["t", "theta_l", "theta_m"]);
    for &t in &grid {
        let l = theta_l.eval(t).map_err(|e| LabError::stage("heat-fit", e))?;
        let m = theta_m.eval(t).map_err(|e| LabError::stage("heat-fit", e))?;
        theta_table.push(vec![fmt(t), fmt(l), fmt(m)]);
    }
    ctx.out.csv("heat_fit.csv", &rows)?;
    ctx.out.csv("theta.csv", &theta_table)?;
    let tol = ctx.config.trace.heat_tolerance;
    ctx.out.json(
        "heat_fit.json",
        "heat-fit",
        json!({
            "inputs": ctx.config.spectrum_identity(true),
            "gamma": format!("{gamma:?}"),
            "series": fits,
            "max_abs_error": num(worst),
            "tolerance": num(tol),
        }),
    )?;
    let fails = if worst > tol { vec![format!("heat coefficients differ by {worst:.2e} > {tol:.0e}")] } else { Vec::new() };
    ctx.violation(fails)
}

fn trace_json(ctx: &Context, r: &TraceReport) -> Value {
    let abel: Vec<Value> = r.abel.iter().map(|a| json!({ "t": num(a.t), "value": num(a.value), "tail_bound": num(a.tail_bound) })).collect();
    let rhs: serde_json::Map<String, Value> = r.rhs.items().iter().map(|(n, v)| (n.to_string(), num(*v))).collect();
    json!({
        "inputs": ctx.config.spectrum_identity(true),
        "provenance": r.provenance,
        "k_max_reliable": r.k_max_reliable,
        "gamma": format!("{:?}", r.gamma),
        "heat": {
            "f": heat_json(&r.heat_f),
            "l": heat_json(&r.heat_l),
            "m": heat_json(&r.heat_m),
            "fitted_l": fit_json(&r.fitted_l),
            "fitted_m": fit_json(&r.fitted_m),
        },
        "constants": { "a0": num(r.constants.a0), "b0": num(r.constants.b0), "c0": num(r.constants.c0) },
        "partial_sums": {
            "limit": num(r.partial_extrapolation.limit),
            "model": r.partial_extrapolation.fit.model_id(),
            "residual": num(r.partial_extrapolation.fit.residual_norm),
        },
        "abel": {
            "limit": num(r.abel_extrapolation.limit),
            "model": r.abel_extrapolation.fit.model_id(),
            "residual": num(r.abel_extrapolation.fit.residual_norm),
            "means": abel,
        },
        "lhs": num(r.lhs),
        "rhs": num(r.rhs.value),
        "rhs_terms": rhs,
        "v2_q_error_estimate": num(r.rhs.v2_q.error_estimate),
        "v2_sigma_error_estimate": num(r.rhs.v2_sigma.error_estimate),
        "sigma_mean": num(r.rhs.sigma_mean),
        "discrepancy": num(r.discrepancy),
        "relative_discrepancy": num(r.discrepancy / r.rhs.value.abs()),
        "method_gap": num(r.method_gap),
        "alternative_rhs": num(r.alternative_rhs),
        "alternative_discrepancy": num(r.alternative_discrepancy),
        "tolerances": {
            "check_absolute": num(ctx.config.trace.tolerance),
            "check_relative": ctx.config.trace.relative_tolerance.map(num),
            "abel_residual": num(r.tolerances.abel_residual),
            "partial_sum_residual": num(r.tolerances.partial_sum_residual),
            "heat_residual": num(r.tolerances.heat_residual),
        },
    })
}

pub fn trace_verify(ctx: &mut Context) -> Result<(), LabError> {
    let (mu, lambda) = spectra(ctx)?;
    let cfg = ctx.config.trace_config();
    let r = verify_trace_with(&ctx.metric, &ctx.potential, &mu, lambda.as_ref(), &cfg)?;

    let k_grid = &ctx.config.trace.k_grid;
    let mut sums = Table::new(&["K", "S_K", "per_cluster_deficit"]);
    for &(k, s, d) in r.partial_sums.iter().filter(|(k, ..)| k_grid.is_empty() || k_grid.contains(k)) {
        sums.push(vec![k.to_string(), fmt(s), fmt(d)]);
    }
    let mut abel = Table::new(&["t", "G_t", "tail_bound"]);
    for a in &r.abel {
        abel.push(vec![fmt(a.t), fmt(a.value), fmt(a.tail_bound)]);
    }
    let mut rhs = Table::new(&["term", "value"]);
    for (n, v) in r.rhs.items() {
        rhs.push(vec![n.into(), fmt(v)]);
    }
    rhs.push(vec!["total".into(), fmt(r.rhs.value)]);
    ctx.out.csv("partial_sums.csv", &sums)?;
    ctx.out.csv("abel.csv", &abel)?;
    ctx.out.csv("rhs.csv", &rhs)?;
    ctx.out.json("trace.json", "trace-verify", trace_json(ctx, &r))?;

    eprintln!(
        "LHS (Abel) {:.10e}, partial sums {:.10e}, RHS {:.10e}, |LHS - RHS| {:.2e}",
        r.lhs, r.partial_extrapolation.limit, r.rhs.value, r.discrepancy
    );
    let t = &ctx.config.trace;
    let mut fails = Vec::new();
    if !(r.discrepancy <= t.tolerance) {
        fails.push(format!("|LHS - RHS| = {:.3e} > {:.1e}", r.discrepancy, t.tolerance));
    }
    if let Some(rel) = t.relative_tolerance {
        let got = r.discrepancy / r.rhs.value.abs();
        if !(got <= rel) {
            fails.push(format!("|LHS - RHS| / |RHS| = {got:.3e} > {rel:.1e}"));
        }
    }
    ctx.violation(fails)
}

/// Round-sphere constants of the configured potential, by the spectral and
/// the direct kernel integral, against the flow-side right side.
pub fn oracle(ctx: &mut Context) -> Result<(), LabError> {
    let s = sf_constants(&ctx.potential).map_err(|e| LabError::stage("oracle", e))?;
    let rhs = theorem_rhs(&MetricPatch::round(), &ctx.potential, ctx.config.trace_config().liouville).map_err(|e| LabError::stage("rhs", e))?;
    let gap = (rhs.value - 2.0 * s.c1).abs();
    if !ctx.metric.is_round() {
        eprintln!("note: oracle constants refer to the round sphere; the configured metric is ignored");
    }
    eprintln!(
        "c0 {:.12e}, c1 {:.12e}; kernel spectral {:.12e}, direct {:.12e} (rel {:.1e}); |RHS - 2c1| {gap:.2e}",
        s.c0, s.c1, s.kernel_spectral, s.kernel_direct, s.relative_disagreement
    );
    let mut t = Table::new(&["quantity", "value"]);
    for (n, v) in [
        ("c0", s.c0),
        ("c1", s.c1),
        ("kernel_spectral", s.kernel_spectral),
        ("kernel_direct", s.kernel_direct),
        ("square_integral", s.square_integral),
        ("rhs", rhs.value),
    ] {
        t.push(vec![n.into(), fmt(v)]);
    }
    ctx.out.csv("oracle.csv", &t)?;
    ctx.out.json(
        "oracle.json",
        "oracle",
        json!({
            "inputs": ctx.config.spectrum_identity(true),
            "c0": num(s.c0),
            "c1": num(s.c1),
            "kernel_spectral": num(s.kernel_spectral),
            "kernel_direct": num(s.kernel_direct),
            "relative_disagreement": num(s.relative_disagreement),
            "square_integral": num(s.square_integral),
            "rhs": num(rhs.value),
            "rhs_minus_2c1": num(rhs.value - 2.0 * s.c1),
        }),
    )?;
    let mut fails = Vec::new();
    if gap > ORACLE_RHS_TOLERANCE {
        fails.push(format!("|RHS - 2c1| = {gap:.2e} > {ORACLE_RHS_TOLERANCE:.0e}"));
    }
    if s.relative_disagreement > ORACLE_KERNEL_TOLERANCE {
        fails.push(format!("kernel routes disagree by {:.2e}", s.relative_disagreement));
    }
    ctx.violation(fails)
}
