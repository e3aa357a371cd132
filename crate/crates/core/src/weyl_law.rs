//! Closed-form leading terms of the eigenvalue counting functions.
//!
//! * boundary term `(2π)⁻¹ ∫ B^{1/2} (ν₊ - ν₋)(b₀/B) ds`, coefficient of
//!   `h^{-1/2}` in `N(hb₀)`;
//! * curvature term `B^{1/4} (π√(3|ξ₀|))⁻¹ ∫ (κ + κ₀)₊^{1/2} ds`,
//!   coefficient of `h^{-1/4}` in `N(hΘ₀B + h^{3/2} C₁ B^{1/2} κ₀)`;
//! * bulk term `(2π)⁻¹ Σₙ ∫_{(2n-1)B < b₀} B dx`, coefficient of `h⁻¹`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::de_gennes::DeGennes;
use crate::error::{Error, Result};
use crate::geometry::{BoundaryCurve, BoundaryField, RadialField};
use crate::numerics::{integrate, par_map, Chebyshev};

/// Leading-order prediction `main_term · h^{h_power}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgePrediction {
    pub main_term: f64,
    pub h_power: f64,
    /// Power of `h` in the relative remainder.
    pub remainder_exponent: f64,
}

impl EdgePrediction {
    pub fn count_at(&self, h: f64) -> f64 {
        self.main_term * h.powf(self.h_power)
    }
}

const QUAD_TOL: f64 = 1e-12;
const ROOT_SAMPLES: usize = 1024;

/// Sign changes of `g` on `[0, len]` located by bisection.
fn split_points<G: Fn(f64) -> f64>(g: &G, len: f64, samples: usize) -> Vec<f64> {
    let xs: Vec<f64> = (0..=samples).map(|j| j as f64 * len / samples as f64).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let mut roots = Vec::new();
    for j in 0..samples {
        if (vals[j] > 0.0) != (vals[j + 1] > 0.0) {
            let (mut a, mut b) = (xs[j], xs[j + 1]);
            let fa_pos = vals[j] > 0.0;
            while b - a > 1e-15 * len.max(1.0) {
                let m = 0.5 * (a + b);
                if (g(m) > 0.0) == fa_pos {
                    a = m;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
    }
    roots
}

/// `∫₀^len f`, split where the `indicator` changes sign so that square-root
/// edges sit at subinterval endpoints.
fn integrate_split<F, G>(f: &F, indicator: &G, len: f64) -> f64
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let mut cuts = vec![0.0];
    cuts.extend(split_points(indicator, len, ROOT_SAMPLES));
    cuts.push(len);
    cuts.windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            if indicator(mid) > 0.0 {
                integrate(f, w[0], w[1], QUAD_TOL)
            } else {
                0.0
            }
        })
        .sum()
}

/// Interpolant of `β ↦ ν₊(β) - ν₋(β)` on `[Θ₀, β_max]`, in the variable
/// `u = (β - Θ₀)^{1/2}` where the width is smooth.
#[derive(Debug, Clone)]
pub struct WidthInterpolant {
    theta0: f64,
    cheb: Chebyshev,
}

impl WidthInterpolant {
    pub fn build(dg: &DeGennes, beta_max: f64, tol: f64) -> Result<Self> {
        let theta0 = dg.theta0();
        if !(beta_max > theta0 && beta_max < 1.0) {
            return Err(Error::Domain(format!(
                "width table needs Θ₀ < β_max < 1, got {beta_max}"
            )));
        }
        let u_max = (beta_max - theta0).sqrt();
        let mut n = 16;
        loop {
            let nodes = Chebyshev::nodes(0.0, u_max, n);
            let vals = par_map(&nodes, |&u| dg.nu_width(theta0 + u * u));
            let vals = vals.into_iter().collect::<Result<Vec<_>>>()?;
            let cheb = Chebyshev::from_values(0.0, u_max, &vals);
            if cheb.tail() < tol || n >= 128 {
                if cheb.tail() >= tol {
                    return Err(Error::Unstable {
                        coarse: cheb.tail(),
                        fine: tol,
                    });
                }
                return Ok(Self { theta0, cheb });
            }
            n *= 2;
        }
    }

    pub fn width(&self, beta: f64) -> f64 {
        if beta <= self.theta0 {
            return 0.0;
        }
        self.cheb.eval((beta - self.theta0).sqrt()).max(0.0)
    }
}

/// Coefficient of `h^{-1/2}` in `N(hb₀)` for the boundary field `field` on
/// `curve`.
pub fn edge_weyl_term(dg: &DeGennes, curve: &BoundaryCurve, field: &BoundaryField, b0: f64) -> Result<EdgePrediction> {
    let theta0 = dg.theta0();
    if !(theta0 * field.b_prime() < b0 && b0 < field.b()) {
        return Err(Error::Precondition(format!(
            "need Θ₀ b' < b0 < b, got Θ₀ b' = {}, b0 = {b0}, b = {}",
            theta0 * field.b_prime(),
            field.b()
        )));
    }
    let len = curve.length;
    let main_term = if field.is_constant() {
        let b = field.b_prime();
        b.sqrt() * len / (2.0 * PI) * dg.nu_width(b0 / b)?
    } else {
        let table = WidthInterpolant::build(dg, b0 / field.b_prime(), 1e-10)?;
        let bs = |s: f64| field.at_fraction(s / len);
        let f = |s: f64| {
            let b = bs(s);
            b.sqrt() * table.width(b0 / b)
        };
        // the width vanishes where b0/B(s) ≤ Θ₀
        let indicator = |s: f64| b0 / bs(s) - theta0;
        integrate_split(&f, &indicator, len) / (2.0 * PI)
    };
    Ok(EdgePrediction {
        main_term,
        h_power: -0.5,
        remainder_exponent: 1.0 / 16.0,
    })
}

/// Coefficient of `h^{-1/4}` in `N(hΘ₀B + h^{3/2} C₁ B^{1/2} κ₀)` for a
/// constant field `b`.
pub fn curvature_term(dg: &DeGennes, curve: &BoundaryCurve, kappa0: f64, b: f64) -> Result<EdgePrediction> {
    if !(b > 0.0) || !b.is_finite() || !kappa0.is_finite() {
        return Err(Error::InvalidInput(format!(
            "need B > 0 and finite κ₀, got {b}, {kappa0}"
        )));
    }
    let g = |s: f64| curve.kappa(s) + kappa0;
    let f = |s: f64| g(s).max(0.0).sqrt();
    let integral = integrate_split(&f, &g, curve.length);
    Ok(EdgePrediction {
        main_term: b.powf(0.25) * integral / (PI * (3.0 * dg.xi0().abs()).sqrt()),
        h_power: -0.25,
        remainder_exponent: 1.0 / 16.0,
    })
}

/// Domain data for the bulk term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BulkDomain {
    /// Constant field on a domain of the given area.
    Constant { field: f64, area: f64 },
    /// Radial field on the disk of radius `radius`.
    Disk { field: RadialField, radius: f64 },
}

/// Coefficient of `h⁻¹` in the bulk Landau-level count at `hb₀`.
pub fn bulk_weyl_term(domain: &BulkDomain, b0: f64) -> Result<f64> {
    if !(b0 > 0.0) || !b0.is_finite() {
        return Err(Error::InvalidInput(format!("b0 = {b0}")));
    }
    match *domain {
        BulkDomain::Constant { field, area } => {
            if !(field > 0.0 && area >= 0.0) {
                return Err(Error::InvalidInput("need B > 0 and area >= 0".into()));
            }
            // #{n ≥ 1 : (2n - 1) B < b0}
            let levels = ((b0 / field + 1.0) / 2.0).ceil() as i64 - 1;
            Ok(field * area / (2.0 * PI) * levels.max(0) as f64)
        }
        BulkDomain::Disk { field, radius } => {
            field.validate()?;
            if !(radius > 0.0) {
                return Err(Error::InvalidInput(format!("radius {radius}")));
            }
            let b_min = (0..=ROOT_SAMPLES)
                .map(|j| field.value(j as f64 * radius / ROOT_SAMPLES as f64))
                .fold(f64::INFINITY, f64::min);
            let mut total = 0.0;
            let mut n = 1;
            while ((2 * n - 1) as f64) * b_min < b0 {
                let level = (2 * n - 1) as f64;
                let indicator = |r: f64| b0 - level * field.value(r);
                // (2π)⁻¹ ∫ B dx = ∫ B(r) r dr over the sublevel set
                total += integrate_split(&|r: f64| field.value(r) * r, &indicator, radius);
                n += 1;
            }
            Ok(total)
        }
    }
}
