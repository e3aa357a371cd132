//! Run configurations. TOML first, JSON as fallback; every command has a
//! built-in default so a bare invocation reproduces the sample run.

use std::path::Path;

use anyhow::{bail, Context, Result};
use edgestates::direct2d::{RadialGrid, RadialProblem};
use edgestates::geometry::{circle, ellipse, BoundaryCurve, BoundaryField, RadialField, Side};
use edgestates::model_ops::SBoundary;
use serde::de::DeserializeOwned;
use serde::Deserialize;

/// Raised for malformed or out-of-contract configs; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid config: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn reject<T>(msg: impl Into<String>) -> Result<T> {
    Err(ConfigError(msg.into()).into())
}

pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    match toml::from_str(text) {
        Ok(v) => Ok(v),
        Err(toml_err) => match serde_json::from_str(text) {
            Ok(v) => Ok(v),
            Err(json_err) => reject(format!("not TOML ({toml_err}) nor JSON ({json_err})")),
        },
    }
}

fn check_positive(name: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return reject(format!("{name} is empty"));
    }
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return reject(format!("{name} must be positive, got {v}"));
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MuConfig {
    pub xi: Vec<f64>,
}

impl Default for MuConfig {
    fn default() -> Self {
        Self {
            xi: (0..=20).map(|k| -3.0 + 0.25 * k as f64).collect(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NuConfig {
    pub beta: Vec<f64>,
}

impl Default for NuConfig {
    fn default() -> Self {
        Self {
            beta: (0..8).map(|k| 0.6 + 0.05 * k as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfcylRow {
    pub h: f64,
    pub s: f64,
    pub b: f64,
    pub lambda: f64,
}

/// Cartesian grid with `lambda = beta * h * b`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfcylGrid {
    pub h: Vec<f64>,
    pub s: Vec<f64>,
    pub b: Vec<f64>,
    pub beta: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfcylConfig {
    #[serde(default)]
    pub grid: Option<HalfcylGrid>,
    #[serde(default)]
    pub rows: Vec<HalfcylRow>,
}

impl Default for HalfcylConfig {
    fn default() -> Self {
        Self {
            grid: Some(HalfcylGrid {
                h: vec![1e-2, 1e-3, 1e-4],
                s: vec![1.0, 2.0 * std::f64::consts::PI],
                b: vec![1.0, 2.0],
                beta: vec![0.5, 0.7, 0.8, 0.9],
            }),
            rows: Vec::new(),
        }
    }
}

impl HalfcylConfig {
    /// Grid rows first (h, s, b, beta nesting), then explicit rows.
    pub fn expand(&self) -> Vec<HalfcylRow> {
        let mut out = Vec::new();
        if let Some(g) = &self.grid {
            for &h in &g.h {
                for &s in &g.s {
                    for &b in &g.b {
                        for &beta in &g.beta {
                            out.push(HalfcylRow {
                                h,
                                s,
                                b,
                                lambda: beta * h * b,
                            });
                        }
                    }
                }
            }
        }
        out.extend(self.rows.iter().copied());
        out
    }

    pub fn validate(&self) -> Result<Vec<HalfcylRow>> {
        let rows = self.expand();
        if rows.is_empty() {
            return reject("no rows");
        }
        let bad: Vec<String> = rows
            .iter()
            .filter(|r| !(r.h > 0.0 && r.s > 0.0 && r.b > 0.0) || !(r.lambda < r.h * r.b))
            .map(|r| format!("(h {}, S {}, B {}, lambda {})", r.h, r.s, r.b, r.lambda))
            .collect();
        if !bad.is_empty() {
            return reject(format!(
                "rows need positive h, S, B and lambda < hB: {}",
                bad.join(", ")
            ));
        }
        Ok(rows)
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum BcConfig {
    Dirichlet,
    Periodic,
}

impl From<BcConfig> for SBoundary {
    fn from(b: BcConfig) -> Self {
        match b {
            BcConfig::Dirichlet => SBoundary::Dirichlet,
            BcConfig::Periodic => SBoundary::Periodic,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StripConfig {
    pub s: f64,
    pub t: f64,
    pub b: f64,
    pub h: Vec<f64>,
    #[serde(default)]
    pub kappa: Vec<f64>,
    pub bc: BcConfig,
    pub beta: Vec<f64>,
    #[serde(default = "default_strip_ppl")]
    pub points_per_length: f64,
    /// Allowed excess of the strip count over the cylinder bound.
    #[serde(default)]
    pub slack: Option<u64>,
}

fn default_strip_ppl() -> f64 {
    10.0
}

impl Default for StripConfig {
    fn default() -> Self {
        Self {
            s: 1.0,
            t: 0.5,
            b: 1.0,
            h: vec![0.02, 0.01],
            kappa: vec![0.0, 0.5],
            bc: BcConfig::Dirichlet,
            beta: vec![0.7, 0.8, 0.9],
            points_per_length: default_strip_ppl(),
            slack: Some(2),
        }
    }
}

impl StripConfig {
    pub fn kappas(&self) -> Vec<f64> {
        if self.kappa.is_empty() {
            vec![0.0]
        } else {
            self.kappa.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("s, t, b", &[self.s, self.t, self.b])?;
        check_positive("h", &self.h)?;
        check_positive("beta", &self.beta)?;
        if let Some(k) = self.kappas().iter().find(|k| 2.0 * k.abs() * self.t > 1.0) {
            return reject(format!("kappa {k} violates 2|kappa| T <= 1"));
        }
        if self.beta.iter().any(|&b| b >= 1.0) {
            return reject("beta must stay below 1 (lambda < hB)");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase", deny_unknown_fields)]
pub enum CurveConfig {
    Circle { r: f64 },
    Ellipse { a: f64, b: f64 },
}

impl CurveConfig {
    pub fn build(&self, side: Side) -> Result<BoundaryCurve> {
        Ok(match *self {
            CurveConfig::Circle { r } => circle(r, side)?,
            CurveConfig::Ellipse { a, b } => ellipse(a, b, side)?,
        })
    }
}

/// Constant boundary field or equispaced samples with the global infimum.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum FieldConfig {
    Constant(f64),
    Sampled { samples: Vec<f64>, b: f64 },
}

impl FieldConfig {
    pub fn build(&self) -> Result<BoundaryField> {
        Ok(match self {
            FieldConfig::Constant(b) => BoundaryField::constant(*b)?,
            FieldConfig::Sampled { samples, b } => BoundaryField::new(samples.clone(), *b)?,
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeylConfig {
    pub curve: CurveConfig,
    pub side: Side,
    pub field: FieldConfig,
    #[serde(default)]
    pub b0: Vec<f64>,
    #[serde(default)]
    pub kappa0: Vec<f64>,
}

impl Default for WeylConfig {
    fn default() -> Self {
        Self {
            curve: CurveConfig::Circle { r: 1.0 },
            side: Side::Interior,
            field: FieldConfig::Constant(1.0),
            b0: vec![0.7, 0.8, 0.9],
            kappa0: vec![-0.5, 0.0, 0.5],
        }
    }
}

fn default_radius() -> f64 {
    1.0
}

fn default_side() -> Side {
    Side::Interior
}

fn default_disk_ppl() -> f64 {
    40.0
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyThresholds {
    pub max_final_rel_err: Option<f64>,
    #[serde(default)]
    pub require_nonincreasing: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_side")]
    pub side: Side,
    pub field: RadialField,
    pub b0: f64,
    pub h: Vec<f64>,
    #[serde(default = "default_disk_ppl")]
    pub points_per_length: f64,
    #[serde(default)]
    pub thresholds: VerifyThresholds,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            radius: 1.0,
            side: Side::Interior,
            field: RadialField::Constant { b: 1.0 },
            b0: 0.8,
            h: vec![4e-3, 2e-3, 1e-3],
            points_per_length: default_disk_ppl(),
            thresholds: VerifyThresholds {
                max_final_rel_err: Some(0.15),
                require_nonincreasing: true,
            },
        }
    }
}

fn radial_problem(side: Side, radius: f64, field: RadialField, h: f64, ppl: f64) -> Result<RadialProblem> {
    let p = match side {
        Side::Interior => RadialProblem::disk(radius, field, h),
        Side::Exterior => RadialProblem::exterior(radius, field, h),
    }
    .with_grid(RadialGrid { points_per_length: ppl });
    p.validate()?;
    Ok(p)
}

impl VerifyConfig {
    pub fn problem(&self) -> Result<RadialProblem> {
        check_positive("h", &self.h)?;
        radial_problem(self.side, self.radius, self.field, self.h[0], self.points_per_length)
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theorem2Thresholds {
    /// Largest allowed `|h^{1/4} N - prediction|`.
    pub band: Option<f64>,
    /// Largest allowed raw count.
    pub max_count: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theorem2Config {
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_side")]
    pub side: Side,
    pub b: f64,
    pub kappa0: f64,
    pub h: Vec<f64>,
    #[serde(default = "default_disk_ppl")]
    pub points_per_length: f64,
    #[serde(default)]
    pub thresholds: Theorem2Thresholds,
}

impl Default for Theorem2Config {
    fn default() -> Self {
        Self {
            radius: 1.0,
            side: Side::Interior,
            b: 1.0,
            kappa0: 0.0,
            h: vec![1e-3, 5e-4, 2.5e-4, 1e-4],
            points_per_length: default_disk_ppl(),
            thresholds: Theorem2Thresholds {
                band: Some(0.5),
                max_count: None,
            },
        }
    }
}

impl Theorem2Config {
    pub fn problem(&self) -> Result<RadialProblem> {
        check_positive("h", &self.h)?;
        if !(self.b > 0.0) {
            bail!(ConfigError(format!("b must be positive, got {}", self.b)));
        }
        radial_problem(
            self.side,
            self.radius,
            RadialField::Constant { b: self.b },
            self.h[0],
            self.points_per_length,
        )
    }
}
