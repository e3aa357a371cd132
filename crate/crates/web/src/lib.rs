//! wasm-bindgen surface for `www/index.html`. Each export has a plain Rust
//! twin returning `Result<_, String>` so the logic is testable natively.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use edgestates::de_gennes::DeGennes;
use edgestates::direct2d::{count_edge_states, RadialProblem};
use edgestates::geometry::{circle, BoundaryField, RadialField, Side};
use edgestates::model_ops::{count_half_cylinder_exact, half_cylinder_main_term, HalfCylinderSpec};
use edgestates::weyl_law::edge_weyl_term;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Coarsest grid the demo accepts for disk counts, per magnetic length.
const DISK_POINTS_PER_LENGTH: f64 = 20.0;
const MAX_CURVE_POINTS: usize = 400;

fn dg() -> &'static DeGennes {
    DeGennes::shared()
}

#[derive(Debug, Serialize)]
pub struct Curve {
    pub xi: Vec<f64>,
    pub mu: Vec<f64>,
    pub theta0: f64,
    pub xi0: f64,
}

/// `μ(ξ)` on `n` equispaced points of `[lo, hi]`.
pub fn de_gennes_curve(lo: f64, hi: f64, n: usize) -> Result<Curve, String> {
    if !(lo < hi) || !(2..=MAX_CURVE_POINTS).contains(&n) {
        return Err(format!("need lo < hi and 2 <= n <= {MAX_CURVE_POINTS}"));
    }
    let xi: Vec<f64> = (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect();
    let mu = xi
        .iter()
        .map(|&x| dg().mu(x))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    Ok(Curve {
        xi,
        mu,
        theta0: dg().theta0(),
        xi0: dg().xi0(),
    })
}

#[derive(Debug, Serialize)]
pub struct HalfCylinderRow {
    pub beta: f64,
    pub count: u64,
    /// `h^{-1/2}` times the lattice-free main term.
    pub main_term: f64,
}

/// Exact counts below `β h B` for each `β` in `betas`.
pub fn half_cylinder_counts(s_len: f64, field: f64, h: f64, betas: &[f64]) -> Result<Vec<HalfCylinderRow>, String> {
    let spec = HalfCylinderSpec::new(s_len, field, h).map_err(|e| e.to_string())?;
    betas
        .iter()
        .map(|&beta| {
            let lambda = beta * h * field;
            let count = count_half_cylinder_exact(dg(), &spec, lambda).map_err(|e| e.to_string())?;
            let main = half_cylinder_main_term(dg(), &spec, lambda / h).map_err(|e| e.to_string())?;
            Ok(HalfCylinderRow {
                beta,
                count,
                main_term: main / h.sqrt(),
            })
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct DiskCount {
    pub count: u64,
    pub prediction: f64,
    pub modes: Vec<(i64, u64)>,
}

/// Edge states of the unit-field disk (or its exterior) below `β h`.
pub fn disk_count(radius: f64, h: f64, beta: f64, exterior: bool) -> Result<DiskCount, String> {
    let side = if exterior { Side::Exterior } else { Side::Interior };
    let field = RadialField::Constant { b: 1.0 };
    let p = match side {
        Side::Interior => RadialProblem::disk(radius, field, h),
        Side::Exterior => RadialProblem::exterior(radius, field, h),
    }
    .with_grid(edgestates::direct2d::RadialGrid {
        points_per_length: DISK_POINTS_PER_LENGTH,
    });
    if p.n_nodes() > 200_000 {
        return Err("grid too large for the browser; raise h or shrink the radius".into());
    }
    let r = count_edge_states(&p, beta * h).map_err(|e| e.to_string())?;
    let curve = circle(radius, side).map_err(|e| e.to_string())?;
    let bf = BoundaryField::constant(1.0).map_err(|e| e.to_string())?;
    let prediction = match edge_weyl_term(dg(), &curve, &bf, beta) {
        Ok(p) => p.count_at(h),
        Err(_) => 0.0,
    };
    Ok(DiskCount {
        count: r.total,
        prediction,
        modes: r.per_mode,
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = deGennesCurve)]
pub fn de_gennes_curve_js(lo: f64, hi: f64, n: usize) -> Result<String, JsValue> {
    to_js(de_gennes_curve(lo, hi, n))
}

#[wasm_bindgen(js_name = halfCylinderCounts)]
pub fn half_cylinder_counts_js(s_len: f64, field: f64, h: f64, betas: Vec<f64>) -> Result<String, JsValue> {
    to_js(half_cylinder_counts(s_len, field, h, &betas))
}

#[wasm_bindgen(js_name = diskCount)]
pub fn disk_count_js(radius: f64, h: f64, beta: f64, exterior: bool) -> Result<String, JsValue> {
    to_js(disk_count(radius, h, beta, exterior))
}
