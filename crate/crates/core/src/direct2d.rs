//! Eigenvalue counts of the Neumann magnetic Laplacian on a disk or on the
//! exterior of a disk, by angular-momentum decomposition.
//!
//! In the symmetric gauge `A = A_θ(r) e_θ` the sector `e^{imθ}` reduces to
//! the radial form `∫ (h²|u'|² + (hm/r - A_θ)² |u|²) r dr`. It is discretized
//! by a cell-centred three-point scheme in the `r dr` inner product and
//! symmetrized by the square root of the diagonal mass, which gives one
//! [`SymTridiag`] per sector; counts are Sturm counts.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::band_eig::{sturm_count, SymTridiag};
use crate::de_gennes::{BoundaryCondition, DeGennes};
use crate::error::{Error, Result};
use crate::geometry::{circle, BoundaryField, RadialField, Side};
use crate::numerics::par_map;
use crate::weyl_law::{curvature_term, edge_weyl_term};

/// Minimum grid points per magnetic length `√(h/B)`.
pub const MIN_POINTS_PER_LENGTH: f64 = 8.0;
/// Extra sectors scanned on each side of the classically allowed window.
pub const WINDOW_PAD: i64 = 10;

/// Radial resolution in points per magnetic length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub points_per_length: f64,
}

impl Default for RadialGrid {
    fn default() -> Self {
        Self {
            points_per_length: 40.0,
        }
    }
}

impl RadialGrid {
    pub fn refined(self, k: u32) -> Self {
        Self {
            points_per_length: self.points_per_length * f64::from(1u32 << k),
        }
    }
}

/// A disk or disk exterior with a radial field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialProblem {
    pub side: Side,
    /// Boundary radius `R`.
    pub radius: f64,
    /// Dirichlet truncation radius for exterior problems; `None` picks
    /// `R + max(12√(h/B), 0.5)`.
    pub r_out: Option<f64>,
    pub field: RadialField,
    pub h: f64,
    pub grid: RadialGrid,
    /// Condition at `r = R` for interior problems; Neumann except for
    /// sanity checks against the whole-plane Landau levels.
    pub boundary: BoundaryCondition,
    /// Extra circulation through the obstacle of exterior problems, in flux
    /// quanta `2πh`. Integer values are a gauge change.
    #[serde(default)]
    pub extra_flux: f64,
}

impl RadialProblem {
    pub fn disk(radius: f64, field: RadialField, h: f64) -> Self {
        Self {
            side: Side::Interior,
            radius,
            r_out: None,
            field,
            h,
            grid: RadialGrid::default(),
            boundary: BoundaryCondition::Neumann,
            extra_flux: 0.0,
        }
    }

    pub fn exterior(radius: f64, field: RadialField, h: f64) -> Self {
        Self {
            side: Side::Exterior,
            ..Self::disk(radius, field, h)
        }
    }

    pub fn with_grid(mut self, grid: RadialGrid) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_extra_flux(mut self, quanta: f64) -> Self {
        self.extra_flux = quanta;
        self
    }

    pub fn with_h(mut self, h: f64) -> Self {
        self.h = h;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.field.validate()?;
        if !(self.radius > 0.0) || !self.radius.is_finite() || !(self.h > 0.0) || !self.h.is_finite() {
            return Err(Error::InvalidInput(format!(
                "need R > 0 and h > 0, got R = {}, h = {}",
                self.radius, self.h
            )));
        }
        if self.side == Side::Exterior {
            if let Some(r_out) = self.r_out {
                if !(r_out > self.radius) {
                    return Err(Error::InvalidInput(format!("R_out = {r_out} must exceed R")));
                }
            }
        }
        if !self.extra_flux.is_finite() || (self.side == Side::Interior && self.extra_flux != 0.0) {
            return Err(Error::InvalidInput(format!(
                "extra flux {} needs an exterior problem",
                self.extra_flux
            )));
        }
        if self.grid.points_per_length < MIN_POINTS_PER_LENGTH {
            return Err(Error::GridTooCoarse {
                points_per_length: self.grid.points_per_length,
                min: MIN_POINTS_PER_LENGTH,
            });
        }
        Ok(())
    }

    /// Radial interval `[r_lo, r_hi]` of the computational domain.
    fn extent(&self) -> (f64, f64) {
        match self.side {
            Side::Interior => (0.0, self.radius),
            Side::Exterior => (self.radius, self.truncation_radius()),
        }
    }

    /// Largest field value on the domain (sets the magnetic length).
    fn b_ref(&self) -> f64 {
        let (lo, hi) = self.extent();
        self.field.sup_on(lo, hi)
    }

    /// Infimum `b` of the field over the (untruncated) domain.
    pub fn b_inf(&self) -> f64 {
        match self.side {
            Side::Interior => self.field.inf_on(0.0, self.radius),
            Side::Exterior => self.field.inf_on(self.radius, f64::INFINITY),
        }
    }

    /// Field on the boundary circle.
    pub fn b_boundary(&self) -> f64 {
        self.field.value(self.radius)
    }

    pub fn truncation_radius(&self) -> f64 {
        self.r_out.unwrap_or_else(|| {
            let b = self.field.value(self.radius);
            self.radius + (12.0 * (self.h / b).sqrt()).max(0.5)
        })
    }

    /// Number of radial unknowns.
    pub fn n_nodes(&self) -> usize {
        let (lo, hi) = self.extent();
        let ell = (self.h / self.b_ref()).sqrt();
        ((hi - lo) / ell * self.grid.points_per_length).ceil().max(16.0) as usize
    }

    fn nodes(&self) -> RadialNodes {
        let n = self.n_nodes();
        match (self.side, self.boundary) {
            (Side::Interior, BoundaryCondition::Neumann) => {
                // r_i = (i + 1/2) dr, the last node sits on r = R with a half cell
                let dr = self.radius / (n as f64 - 0.5);
                let r: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * dr).collect();
                let mass = (0..n)
                    .map(|i| {
                        let lo = i as f64 * dr;
                        let hi = if i + 1 == n { self.radius } else { lo + dr };
                        0.5 * (hi * hi - lo * lo)
                    })
                    .collect();
                let faces = (0..n).map(|i| (i as f64 + 1.0) * dr).collect();
                RadialNodes {
                    r,
                    mass,
                    faces,
                    dr,
                    dirichlet_end: false,
                }
            }
            (Side::Interior, BoundaryCondition::Dirichlet) => {
                // the Dirichlet node r = R is (n + 1/2) dr
                let dr = self.radius / (n as f64 + 0.5);
                let r: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * dr).collect();
                let mass = r.iter().map(|ri| ri * dr).collect();
                let faces = (0..n).map(|i| (i as f64 + 1.0) * dr).collect();
                RadialNodes {
                    r,
                    mass,
                    faces,
                    dr,
                    dirichlet_end: true,
                }
            }
            (Side::Exterior, _) => {
                // r_i = R + i dr, half cell at the Neumann circle, Dirichlet at R_out
                let r_out = self.truncation_radius();
                let dr = (r_out - self.radius) / n as f64;
                let r: Vec<f64> = (0..n).map(|i| self.radius + i as f64 * dr).collect();
                let mass = (0..n)
                    .map(|i| {
                        let lo = if i == 0 { self.radius } else { r[i] - 0.5 * dr };
                        let hi = r[i] + 0.5 * dr;
                        0.5 * (hi * hi - lo * lo)
                    })
                    .collect();
                let faces = r.iter().map(|ri| ri + 0.5 * dr).collect();
                RadialNodes {
                    r,
                    mass,
                    faces,
                    dr,
                    dirichlet_end: true,
                }
            }
        }
    }

    /// Sector potential `(h(m - φ)/r - A_θ(r))²`, `φ` the extra flux.
    pub fn potential(&self, m: i64, r: f64) -> f64 {
        let v = self.h * (m as f64 - self.extra_flux) / r - self.field.vector_potential(r);
        v * v
    }
}

struct RadialNodes {
    r: Vec<f64>,
    mass: Vec<f64>,
    /// `faces[i]` is the radius of the face between node `i` and `i + 1`
    /// (or the Dirichlet node after the last one).
    faces: Vec<f64>,
    dr: f64,
    dirichlet_end: bool,
}

impl RadialNodes {
    fn operator(&self, p: &RadialProblem, m: i64) -> Result<SymTridiag> {
        let n = self.r.len();
        let h2 = p.h * p.h;
        let link: Vec<f64> = self.faces.iter().map(|f| h2 * f / self.dr).collect();
        let diag = (0..n)
            .map(|i| {
                let mut stiff = if i > 0 { link[i - 1] } else { 0.0 };
                if i + 1 < n || self.dirichlet_end {
                    stiff += link[i];
                }
                stiff / self.mass[i] + p.potential(m, self.r[i])
            })
            .collect();
        let off = (0..n - 1)
            .map(|i| -link[i] / (self.mass[i] * self.mass[i + 1]).sqrt())
            .collect();
        SymTridiag::new(diag, off)
    }

    fn min_potential(&self, p: &RadialProblem, m: i64) -> f64 {
        self.r.iter().map(|&r| p.potential(m, r)).fold(f64::INFINITY, f64::min)
    }

    /// Sectors whose potential dips below `lambda` at some node lie in
    /// the union of `((A - √λ) r/h + φ, (A + √λ) r/h + φ)`.
    fn allowed_window(&self, p: &RadialProblem, lambda: f64) -> (i64, i64) {
        let s = lambda.max(0.0).sqrt();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &r in &self.r {
            let a = p.field.vector_potential(r);
            lo = lo.min((a - s) * r / p.h + p.extra_flux);
            hi = hi.max((a + s) * r / p.h + p.extra_flux);
        }
        (lo.floor() as i64, hi.ceil() as i64)
    }
}

/// Discretized radial operator of sector `m`.
pub fn sector_operator(p: &RadialProblem, m: i64) -> Result<SymTridiag> {
    p.validate()?;
    p.nodes().operator(p, m)
}

/// Result of a certified count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub lambda: f64,
    pub total: u64,
    /// `(m, count)` for sectors with a nonzero count, increasing in `m`.
    pub per_mode: Vec<(i64, u64)>,
    pub window: (i64, i64),
    pub certified: bool,
    pub prediction: Option<f64>,
    pub rel_err: Option<f64>,
}

fn count_once(p: &RadialProblem, lambda: f64) -> Result<CountReport> {
    let nodes = p.nodes();
    let (lo, hi) = nodes.allowed_window(p, lambda);
    let window = (lo - WINDOW_PAD, hi + WINDOW_PAD);
    // the operator dominates its diagonal potential, so sectors outside the
    // window have no eigenvalue below lambda; recheck at the edges
    let certified = nodes.min_potential(p, window.0) >= lambda && nodes.min_potential(p, window.1) >= lambda;
    if !certified {
        return Err(Error::Uncertified(format!(
            "sector window [{}, {}] not certified at lambda = {lambda}",
            window.0, window.1
        )));
    }
    let ms: Vec<i64> = (window.0..=window.1).collect();
    let counts = par_map(&ms, |&m| -> Result<u64> {
        if nodes.min_potential(p, m) >= lambda {
            return Ok(0);
        }
        Ok(sturm_count(&nodes.operator(p, m)?, lambda) as u64)
    });
    let mut per_mode = Vec::new();
    for (m, c) in ms.iter().zip(counts) {
        let c = c?;
        if c > 0 {
            per_mode.push((*m, c));
        }
    }
    Ok(CountReport {
        lambda,
        total: per_mode.iter().map(|(_, c)| c).sum(),
        per_mode,
        window,
        certified,
        prediction: None,
        rel_err: None,
    })
}

/// Number of eigenvalues below `lambda`, requiring `lambda < h b`.
///
/// Exterior counts are repeated with the truncation distance doubled and
/// must agree.
pub fn count_edge_states(p: &RadialProblem, lambda: f64) -> Result<CountReport> {
    p.validate()?;
    let threshold = p.h * p.b_inf();
    if !(lambda < threshold) {
        return Err(Error::Precondition(format!(
            "lambda = {lambda} must lie below h b = {threshold}"
        )));
    }
    let report = count_once(p, lambda)?;
    if p.side == Side::Exterior {
        let r_out = p.truncation_radius();
        let doubled = RadialProblem {
            r_out: Some(p.radius + 2.0 * (r_out - p.radius)),
            ..*p
        };
        let check = count_once(&doubled, lambda)?;
        if check.total != report.total {
            return Err(Error::TruncationUnstable {
                r_out,
                first: report.total,
                second: check.total,
            });
        }
    }
    Ok(report)
}

/// One row of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub h: f64,
    pub count: u64,
    /// `h^{-h_power} N`.
    pub scaled: f64,
    pub prediction: f64,
    /// Relative error for boundary studies, absolute deviation for
    /// curvature studies.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyTable {
    pub rows: Vec<StudyRow>,
    /// Whether `error` is nonincreasing along decreasing `h`.
    pub error_nonincreasing: bool,
}

fn finish_table(mut rows: Vec<StudyRow>) -> StudyTable {
    rows.sort_by(|a, b| b.h.total_cmp(&a.h));
    let error_nonincreasing = rows.windows(2).all(|w| w[1].error <= w[0].error);
    StudyTable {
        rows,
        error_nonincreasing,
    }
}

fn boundary_field(p: &RadialProblem) -> Result<BoundaryField> {
    let b_edge = p.b_boundary();
    BoundaryField::new(vec![b_edge], p.b_inf().min(b_edge))
}

/// `h^{1/2} N(hb₀)` against the boundary prediction for each `h`.
pub fn convergence_study(dg: &DeGennes, p: &RadialProblem, b0: f64, h_list: &[f64]) -> Result<StudyTable> {
    p.validate()?;
    let curve = circle(p.radius, p.side)?;
    let prediction = edge_weyl_term(dg, &curve, &boundary_field(p)?, b0)?.main_term;
    let rows = h_list
        .iter()
        .map(|&h| {
            let q = p.with_h(h);
            let r = count_edge_states(&q, h * b0)?;
            let scaled = h.sqrt() * r.total as f64;
            Ok(StudyRow {
                h,
                count: r.total,
                scaled,
                prediction,
                error: (scaled - prediction).abs() / prediction,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish_table(rows))
}

/// The curvature cutoff `hΘ₀B + h^{3/2} C₁ B^{1/2} κ₀`.
pub fn curvature_cutoff(dg: &DeGennes, b: f64, h: f64, kappa0: f64) -> f64 {
    h * dg.theta0() * b + h.powf(1.5) * dg.c1() * b.sqrt() * kappa0
}

/// `h^{1/4} N` at the curvature cutoff against the curvature prediction.
pub fn theorem2_study(dg: &DeGennes, p: &RadialProblem, kappa0: f64, h_list: &[f64]) -> Result<StudyTable> {
    p.validate()?;
    let b = match p.field {
        RadialField::Constant { b } => b,
        _ => return Err(Error::Precondition("the curvature study needs a constant field".into())),
    };
    let curve = circle(p.radius, p.side)?;
    let prediction = curvature_term(dg, &curve, kappa0, b)?.main_term;
    let rows = h_list
        .iter()
        .map(|&h| {
            let q = p.with_h(h);
            let r = count_edge_states(&q, curvature_cutoff(dg, b, h, kappa0))?;
            let scaled = h.powf(0.25) * r.total as f64;
            Ok(StudyRow {
                h,
                count: r.total,
                scaled,
                prediction,
                error: (scaled - prediction).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish_table(rows))
}

/// Area of the computational disk (interior problems).
pub fn disk_area(radius: f64) -> f64 {
    PI * radius * radius
}
