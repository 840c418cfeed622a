//! Experiment manifests: strict TOML with range validation.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use spectral_trace_core::geodesics::{LiouvilleGrid, CLOSURE_THRESHOLD};
use spectral_trace_core::geometry::{builtin_metric, GammaConvention, HarmonicExpansion, MetricFamily, MetricPatch, Profile, ScalarField};
use spectral_trace_core::numerics::FitModel;
use spectral_trace_core::traces::{geometric_grid, TraceConfig};

use crate::error::LabError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub metric: MetricSection,
    #[serde(default)]
    pub potential: PotentialSection,
    pub solver: SolverSection,
    #[serde(default)]
    pub trace: TraceSection,
    #[serde(default)]
    pub geodesics: GeodesicsSection,
    #[serde(default)]
    pub curvature: CurvatureSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Round,
    Zoll,
    Revolution,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSection {
    pub family: Family,
    /// Zoll amplitude in `h = ε x (1 - x²)`.
    pub epsilon: Option<f64>,
    /// Coefficients of `r` in `h = (1 - x²) r(x)` for `revolution`.
    pub r: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuiltinPotential {
    Zero,
    Constant,
    /// `amplitude · Y₁₀ = amplitude √(3/4π) cos θ`.
    CosTheta,
    /// `amplitude · Y₂₀`.
    ZonalQuadrupole,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicTerm {
    pub l: usize,
    pub m: i64,
    pub coefficient: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    pub builtin: Option<BuiltinPotential>,
    pub amplitude: Option<f64>,
    pub terms: Option<Vec<HarmonicTerm>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub degree: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AbelModel {
    AbelSingular,
    QuadraticInT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gamma {
    Curvature,
    CurvatureMinusOne,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TraceSection {
    pub abel_t_min: f64,
    pub abel_t_max: f64,
    pub abel_points: usize,
    pub abel_model: AbelModel,
    pub heat_t_min: f64,
    pub gamma: Gamma,
    /// Cutoffs listed in the partial-sum table; empty lists every cluster.
    pub k_grid: Vec<usize>,
    /// `--check` fails when `|LHS - RHS|` exceeds this.
    pub tolerance: f64,
    /// Optional relative bound, `|LHS - RHS| / |RHS|`.
    pub relative_tolerance: Option<f64>,
    /// `heat-fit --check` bound on fitted versus zeta coefficients.
    pub heat_tolerance: f64,
    pub liouville: LiouvilleSection,
}

impl Default for TraceSection {
    fn default() -> Self {
        TraceSection {
            abel_t_min: 1e-4,
            abel_t_max: 1e-2,
            abel_points: 12,
            abel_model: AbelModel::AbelSingular,
            heat_t_min: 0.005,
            gamma: Gamma::Curvature,
            k_grid: Vec::new(),
            tolerance: 2e-4,
            relative_tolerance: None,
            heat_tolerance: 1e-3,
            liouville: LiouvilleSection::default(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LiouvilleSection {
    pub fiber: usize,
    pub height: usize,
    pub azimuth: usize,
    pub orbit_samples: usize,
}

impl Default for LiouvilleSection {
    fn default() -> Self {
        let g = LiouvilleGrid::default();
        LiouvilleSection { fiber: g.fiber, height: g.height, azimuth: g.azimuth, orbit_samples: g.orbit_samples }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeodesicsSection {
    pub starts: usize,
    pub threshold: f64,
    pub sigma_samples: usize,
}

impl Default for GeodesicsSection {
    fn default() -> Self {
        GeodesicsSection { starts: 100, threshold: CLOSURE_THRESHOLD, sigma_samples: 256 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CurvatureSection {
    pub grid: usize,
}

impl Default for CurvatureSection {
    fn default() -> Self {
        CurvatureSection { grid: 24 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub cache_dir: PathBuf,
    pub json: bool,
    pub csv: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: PathBuf::from("out"), cache_dir: PathBuf::from("cache"), json: true, csv: true }
    }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), LabError> {
    if ok {
        Ok(())
    } else {
        Err(LabError::Validation(msg()))
    }
}

impl ExperimentConfig {
    /// Parse and validate. Relative output paths are resolved against the
    /// directory holding the config file.
    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::Validation(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.output.dir, &mut cfg.output.cache_dir] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, LabError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| LabError::Validation(e.message().trim().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), LabError> {
        let m = &self.metric;
        match m.family {
            Family::Round => check(m.epsilon.is_none() && m.r.is_none(), || "metric.family = \"round\" takes no epsilon or r".into())?,
            Family::Zoll => {
                check(m.r.is_none(), || "metric.r is for family \"revolution\"".into())?;
                let e = m.epsilon.ok_or_else(|| LabError::Validation("metric.epsilon is required for family \"zoll\"".into()))?;
                check(e.is_finite() && e.abs() <= 0.5, || format!("metric.epsilon = {e} outside [-0.5, 0.5]"))?;
            }
            Family::Revolution => {
                check(m.epsilon.is_none(), || "metric.epsilon is for family \"zoll\"".into())?;
                let r = m.r.as_ref().ok_or_else(|| LabError::Validation("metric.r is required for family \"revolution\"".into()))?;
                check(!r.is_empty() && r.len() <= 8 && r.iter().all(|c| c.is_finite()), || "metric.r needs 1 to 8 finite coefficients".into())?;
            }
        }
        let p = &self.potential;
        match (&p.builtin, &p.terms) {
            (Some(_), Some(_)) => return Err(LabError::Validation("potential takes either builtin or terms, not both".into())),
            (Some(BuiltinPotential::Zero), _) | (None, None) => {
                check(p.amplitude.is_none(), || "potential.amplitude needs a builtin other than \"zero\"".into())?
            }
            (Some(_), None) => {
                let a = p.amplitude.ok_or_else(|| LabError::Validation("potential.amplitude is required".into()))?;
                check(a.is_finite() && a.abs() <= 10.0, || format!("potential.amplitude = {a} outside [-10, 10]"))?;
            }
            (None, Some(terms)) => {
                check(p.amplitude.is_none(), || "potential.amplitude is for builtins".into())?;
                check(!terms.is_empty(), || "potential.terms is empty".into())?;
                for t in terms {
                    check(t.l <= 32 && t.m.unsigned_abs() as usize <= t.l, || format!("potential term (l, m) = ({}, {}) needs |m| ≤ l ≤ 32", t.l, t.m))?;
                    check(t.coefficient.is_finite() && t.coefficient.abs() <= 10.0, || format!("potential coefficient {} outside [-10, 10]", t.coefficient))?;
                }
            }
        }
        check((8..=400).contains(&self.solver.degree), || format!("solver.degree = {} outside [8, 400]", self.solver.degree))?;
        let t = &self.trace;
        check(t.abel_t_min >= 1e-4 && t.abel_t_max <= 0.2 && t.abel_t_min < t.abel_t_max, || {
            format!("trace Abel range [{}, {}] must lie in [1e-4, 0.2]", t.abel_t_min, t.abel_t_max)
        })?;
        check((6..=64).contains(&t.abel_points), || format!("trace.abel_points = {} outside [6, 64]", t.abel_points))?;
        check(t.heat_t_min > 0.0 && t.heat_t_min <= 0.1, || format!("trace.heat_t_min = {} outside (0, 0.1]", t.heat_t_min))?;
        check(t.tolerance > 0.0 && t.tolerance.is_finite(), || "trace.tolerance must be positive".into())?;
        check(t.heat_tolerance > 0.0 && t.heat_tolerance.is_finite(), || "trace.heat_tolerance must be positive".into())?;
        check(t.relative_tolerance.is_none_or(|r| r > 0.0 && r.is_finite()), || "trace.relative_tolerance must be positive".into())?;
        let l = &t.liouville;
        for (name, v, lo) in [("fiber", l.fiber, 4), ("height", l.height, 4), ("azimuth", l.azimuth, 4), ("orbit_samples", l.orbit_samples, 8)] {
            check(v >= lo && v <= 512, || format!("trace.liouville.{name} = {v} outside [{lo}, 512]"))?;
        }
        let g = &self.geodesics;
        check((1..=10_000).contains(&g.starts), || format!("geodesics.starts = {} outside [1, 10000]", g.starts))?;
        check(g.threshold > 0.0, || "geodesics.threshold must be positive".into())?;
        check((16..=8192).contains(&g.sigma_samples), || format!("geodesics.sigma_samples = {} outside [16, 8192]", g.sigma_samples))?;
        check((4..=512).contains(&self.curvature.grid), || format!("curvature.grid = {} outside [4, 512]", self.curvature.grid))?;
        check(self.output.json || self.output.csv, || "output needs json or csv enabled".into())?;
        Ok(())
    }

    pub fn metric(&self) -> Result<MetricPatch, LabError> {
        let m = match self.metric.family {
            Family::Round => Ok(MetricPatch::round()),
            Family::Zoll => MetricPatch::zoll(self.metric.epsilon.unwrap_or(0.0)),
            Family::Revolution => Profile::new(self.metric.r.clone().unwrap_or_default()).and_then(|p| builtin_metric(MetricFamily::Revolution(p))),
        };
        m.map_err(|e| LabError::Validation(format!("metric: {e}")))
    }

    pub fn potential(&self) -> Result<ScalarField, LabError> {
        let p = &self.potential;
        let a = p.amplitude.unwrap_or(0.0);
        let q = match (&p.builtin, &p.terms) {
            (Some(BuiltinPotential::Zero), _) | (None, None) => Ok(ScalarField::zero()),
            (Some(BuiltinPotential::Constant), _) => Ok(ScalarField::Constant(a)),
            (Some(BuiltinPotential::CosTheta), _) => ScalarField::harmonic(1, 0, a),
            (Some(BuiltinPotential::ZonalQuadrupole), _) => ScalarField::harmonic(2, 0, a),
            (None, Some(terms)) => HarmonicExpansion::new(terms.iter().map(|t| (t.l, t.m, t.coefficient)).collect()).map(ScalarField::Harmonic),
        };
        q.map_err(|e| LabError::Validation(format!("potential: {e}")))
    }

    pub fn trace_config(&self) -> TraceConfig {
        let t = &self.trace;
        let l = &t.liouville;
        TraceConfig {
            degree: self.solver.degree,
            gamma: match t.gamma {
                Gamma::Curvature => GammaConvention::Curvature,
                Gamma::CurvatureMinusOne => GammaConvention::CurvatureMinusOne,
            },
            abel_grid: geometric_grid(t.abel_t_min, t.abel_t_max, t.abel_points),
            abel_model: match t.abel_model {
                AbelModel::AbelSingular => FitModel::AbelSingular,
                AbelModel::QuadraticInT => FitModel::QuadraticInT,
            },
            heat_t_lo: t.heat_t_min,
            heat_model: FitModel::HeatTripleCorrected,
            liouville: LiouvilleGrid { fiber: l.fiber, height: l.height, azimuth: l.azimuth, orbit_samples: l.orbit_samples },
        }
    }

    /// Canonical text of everything a spectrum depends on.
    pub fn spectrum_identity(&self, with_potential: bool) -> String {
        let mut s = String::new();
        let m = &self.metric;
        let _ = write!(s, "metric={:?};epsilon={:?};r={:?};", m.family, m.epsilon, m.r);
        if with_potential {
            let p = &self.potential;
            let terms: Option<Vec<(usize, i64, f64)>> = p.terms.as_ref().map(|t| t.iter().map(|t| (t.l, t.m, t.coefficient)).collect());
            let _ = write!(s, "potential={:?};amplitude={:?};terms={:?};", p.builtin, p.amplitude, terms);
        } else {
            s.push_str("potential=zero;");
        }
        let _ = write!(s, "degree={}", self.solver.degree);
        s
    }
}
