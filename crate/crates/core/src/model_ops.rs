//! Constant-field model operators near a straight or uniformly curved edge.
//!
//! * the half-cylinder `(hD - B A₀)²` on `ℝ/Sℤ × ℝ₊`, `A₀ = (-t, 0)`, Neumann
//!   at `t = 0`, whose counting function is an exact lattice count;
//! * the Dirichlet strip on `(0, S) × (0, T)`, discretized on a tensor grid;
//! * the curved one-dimensional family `M(ξ, α, L)` with weight
//!   `a_α(τ) = 1 - ατ`, and the curved half-cylinder that decomposes into it.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::band_eig::{banded_inertia, bisect_eigenvalue, sturm_count, BandedHermitian, SymTridiag};
use crate::de_gennes::DeGennes;
use crate::error::{Error, Result};

/// Minimum grid points per magnetic length `√(h/B)`.
pub const MIN_POINTS_PER_LENGTH: f64 = 8.0;

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be positive, got {v}")))
    }
}

/// Half-cylinder `ℝ/Sℤ × ℝ₊` with constant field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfCylinderSpec {
    /// Circumference `S`.
    pub s_len: f64,
    pub field: f64,
    pub h: f64,
}

impl HalfCylinderSpec {
    pub fn new(s_len: f64, field: f64, h: f64) -> Result<Self> {
        let spec = Self { s_len, field, h };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        check_positive("S", self.s_len)?;
        check_positive("B", self.field)?;
        check_positive("h", self.h)
    }

    /// `λ / (hB)`, rejecting `λ ≥ hB` where the count is infinite.
    fn reduced_level(&self, lambda: f64) -> Result<f64> {
        self.validate()?;
        let threshold = self.h * self.field;
        if !(lambda < threshold) {
            return Err(Error::InfiniteCount { lambda, threshold });
        }
        Ok(lambda / threshold)
    }

    /// Spacing of the Fourier parameters `ξ_n = 2π n h^{1/2} B^{-1/2} / S`.
    pub fn mode_spacing(&self) -> f64 {
        2.0 * PI * (self.h / self.field).sqrt() / self.s_len
    }
}

/// Number of integers in the open interval `(a, b)`.
fn integers_in_open(a: f64, b: f64) -> u64 {
    if !(b > a) {
        return 0;
    }
    let lo = a.floor() as i64 + 1;
    let hi = b.ceil() as i64 - 1;
    (hi - lo + 1).max(0) as u64
}

/// Exact eigenvalue count of the half-cylinder below `lambda` as a lattice
/// count in the scaled interval `(ν₋(β), ν₊(β))`, `β = λ/(hB)`.
pub fn count_half_cylinder_exact(dg: &DeGennes, spec: &HalfCylinderSpec, lambda: f64) -> Result<u64> {
    let beta = spec.reduced_level(lambda)?;
    if beta <= dg.theta0() {
        return Ok(0);
    }
    let scale = 1.0 / spec.mode_spacing();
    let lo = scale * dg.nu(crate::de_gennes::Branch::Minus, beta)?;
    let hi = scale * dg.nu(crate::de_gennes::Branch::Plus, beta)?;
    Ok(integers_in_open(lo, hi))
}

/// The same count by separation of variables: one de Gennes problem per
/// Fourier mode, scanning outward from `ξ₀` until the indicator fails on the
/// monotone side of `μ`.
pub fn count_half_cylinder_oracle(dg: &DeGennes, spec: &HalfCylinderSpec, lambda: f64) -> Result<u64> {
    let beta = spec.reduced_level(lambda)?;
    let q = spec.mode_spacing();
    let xi0 = dg.xi0();
    let n0 = (xi0 / q).round() as i64;
    let below = |n: i64| -> Result<bool> { Ok(dg.mu(n as f64 * q)? < beta) };
    let mut count = 0u64;
    for dir in [1i64, -1] {
        let mut n = if dir == 1 { n0 } else { n0 - 1 };
        loop {
            if below(n)? {
                count += 1;
            } else if dir as f64 * (n as f64 * q - xi0) >= 0.0 {
                // monotone side: one padded mode must also fail
                if below(n + dir)? {
                    return Err(Error::Uncertified(format!(
                        "mode {} below level {beta} beyond a failing mode",
                        n + dir
                    )));
                }
                break;
            }
            n += dir;
            if (n - n0).unsigned_abs() > 50_000_000 {
                return Err(Error::Uncertified("mode scan did not terminate".into()));
            }
        }
    }
    Ok(count)
}

/// `(B^{1/2} S / 2π)(ν₊(b₀/B) - ν₋(b₀/B))`, the main term of the
/// half-cylinder count at level `h b₀`.
pub fn half_cylinder_main_term(dg: &DeGennes, spec: &HalfCylinderSpec, b0: f64) -> Result<f64> {
    spec.validate()?;
    let beta = b0 / spec.field;
    if beta >= 1.0 {
        return Err(Error::InfiniteCount {
            lambda: spec.h * b0,
            threshold: spec.h * spec.field,
        });
    }
    Ok(spec.field.sqrt() * spec.s_len / (2.0 * PI) * dg.nu_width(beta)?)
}

/// Boundary condition on the edges `s ∈ {0, S}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SBoundary {
    Dirichlet,
    Periodic,
}

/// Rectangle `(0, S) × (0, T)` with Neumann at `t = 0`, Dirichlet at `t = T`.
///
/// The form is `∫∫ (a⁻¹ |(hD_s + f) u|² + a |hD_t u|²) ds dt` with
/// `f(t) = B (t - κ t²/2)` and weight `a(t) = 1 - κt`; `κ = 0` gives the
/// flat constant-field strip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripSpec {
    pub s_len: f64,
    pub t_len: f64,
    pub field: f64,
    pub h: f64,
    pub kappa: f64,
    pub bc_s: SBoundary,
}

/// Tensor grid resolution in points per magnetic length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripGrid {
    pub points_per_length: f64,
}

impl Default for StripGrid {
    fn default() -> Self {
        Self {
            points_per_length: 10.0,
        }
    }
}

impl StripGrid {
    pub fn refined(self) -> Self {
        Self {
            points_per_length: 2.0 * self.points_per_length,
        }
    }
}

struct TensorGrid {
    ns: usize,
    nt: usize,
    ds: f64,
    dt: f64,
}

impl StripSpec {
    fn validate(&self) -> Result<()> {
        check_positive("S", self.s_len)?;
        check_positive("T", self.t_len)?;
        check_positive("B", self.field)?;
        check_positive("h", self.h)?;
        if !self.kappa.is_finite() || 2.0 * self.kappa.abs() * self.t_len > 1.0 {
            return Err(Error::Precondition(format!(
                "need 2|kappa| T <= 1, got kappa = {}, T = {}",
                self.kappa, self.t_len
            )));
        }
        Ok(())
    }

    pub fn magnetic_length(&self) -> f64 {
        (self.h / self.field).sqrt()
    }

    fn weight(&self, t: f64) -> f64 {
        1.0 - self.kappa * t
    }

    fn potential(&self, t: f64) -> f64 {
        self.field * (t - 0.5 * self.kappa * t * t)
    }

    fn grid(&self, grid: StripGrid) -> Result<TensorGrid> {
        self.validate()?;
        if grid.points_per_length < MIN_POINTS_PER_LENGTH {
            return Err(Error::GridTooCoarse {
                points_per_length: grid.points_per_length,
                min: MIN_POINTS_PER_LENGTH,
            });
        }
        let ell = self.magnetic_length();
        let ns = ((self.s_len / ell) * grid.points_per_length).ceil().max(2.0) as usize;
        let nt = ((self.t_len / ell) * grid.points_per_length).ceil().max(2.0) as usize;
        Ok(TensorGrid {
            ns,
            nt,
            ds: self.s_len / ns as f64,
            dt: self.t_len / nt as f64,
        })
    }

    /// Per-row data in `t`: mass, s-link weight, Peierls phase, and the
    /// t-link weights (the last one couples to the Dirichlet node at `T`).
    fn t_profile(&self, g: &TensorGrid) -> TProfile {
        let h2 = self.h * self.h;
        let mut mass = Vec::with_capacity(g.nt);
        let mut s_link = Vec::with_capacity(g.nt);
        let mut phase = Vec::with_capacity(g.nt);
        let mut t_link = Vec::with_capacity(g.nt);
        for i in 0..g.nt {
            let t = i as f64 * g.dt;
            // half cell at the Neumann edge
            let cell = if i == 0 { 0.5 } else { 1.0 };
            let a = self.weight(t);
            mass.push(cell * a * g.ds * g.dt);
            s_link.push(cell * g.dt * h2 / (a * g.ds));
            phase.push(self.potential(t) * g.ds / self.h);
            t_link.push(g.ds * self.weight(t + 0.5 * g.dt) * h2 / g.dt);
        }
        TProfile {
            mass,
            s_link,
            phase,
            t_link,
        }
    }
}

struct TProfile {
    mass: Vec<f64>,
    s_link: Vec<f64>,
    phase: Vec<f64>,
    t_link: Vec<f64>,
}

/// Discretized Dirichlet strip (`bc_s = Dirichlet`) as a banded Hermitian
/// matrix, symmetrized by the square root of the diagonal mass matrix.
///
/// Unknowns are ordered `k = j * nt + i` (`j` along `s`, `i` along `t`), so
/// the half bandwidth is `nt`. The magnetic term uses Peierls phases
/// `exp(i f(t) ds / h)` on the `s`-links.
pub fn assemble_strip(spec: &StripSpec, grid: StripGrid) -> Result<BandedHermitian> {
    if spec.bc_s != SBoundary::Dirichlet {
        return Err(Error::InvalidInput(
            "periodic strips are counted mode by mode (count_strip); they have no banded form".into(),
        ));
    }
    let g = spec.grid(grid)?;
    let p = spec.t_profile(&g);
    let (ns_in, nt) = (g.ns - 1, g.nt);
    let n = ns_in * nt;
    let mut a = BandedHermitian::zeros(n, nt.min(n - 1).max(1))?;
    let idx = |j: usize, i: usize| j * nt + i;
    let inv_sqrt_mass: Vec<f64> = p.mass.iter().map(|m| 1.0 / m.sqrt()).collect();
    for j in 0..ns_in {
        for i in 0..nt {
            let k = idx(j, i);
            // both s-neighbours exist or are Dirichlet zeros: each link adds
            // its weight to the diagonal
            let mut diag = 2.0 * p.s_link[i] + p.t_link[i];
            if i > 0 {
                diag += p.t_link[i - 1];
            }
            let m = p.mass[i];
            a.set_lower(k, k, Complex64::new(diag / m, 0.0))?;
            if i + 1 < nt {
                let v = -p.t_link[i] * inv_sqrt_mass[i] * inv_sqrt_mass[i + 1];
                a.set_lower(idx(j, i + 1), k, Complex64::new(v, 0.0))?;
            }
            if j + 1 < ns_in {
                // K[j+1][j] = -w e^{-iθ}
                let v = Complex64::from_polar(p.s_link[i] / m, -p.phase[i]);
                a.set_lower(idx(j + 1, i), k, -v)?;
            }
        }
    }
    Ok(a)
}

/// Eigenvalue count of the discretized strip below `lambda`.
///
/// Dirichlet strips go through [`banded_inertia`]. Periodic strips are
/// translation invariant in `s`, so the discrete operator splits exactly into
/// `ns` tridiagonal problems, one per discrete Fourier mode.
pub fn count_strip(spec: &StripSpec, grid: StripGrid, lambda: f64) -> Result<u64> {
    match spec.bc_s {
        SBoundary::Dirichlet => {
            let a = assemble_strip(spec, grid)?;
            Ok(banded_inertia(&a, lambda)?.inertia.n_neg as u64)
        }
        SBoundary::Periodic => {
            let g = spec.grid(grid)?;
            let p = spec.t_profile(&g);
            let mut total = 0u64;
            for k in 0..g.ns {
                let phi = 2.0 * PI * k as f64 / g.ns as f64;
                let diag: Vec<f64> = (0..g.nt)
                    .map(|i| {
                        let s_part = p.s_link[i] * (2.0 - 2.0 * (p.phase[i] + phi).cos());
                        let t_part = p.t_link[i] + if i > 0 { p.t_link[i - 1] } else { 0.0 };
                        (s_part + t_part) / p.mass[i]
                    })
                    .collect();
                let off: Vec<f64> = (0..g.nt - 1)
                    .map(|i| -p.t_link[i] / (p.mass[i] * p.mass[i + 1]).sqrt())
                    .collect();
                total += sturm_count(&SymTridiag::new(diag, off)?, lambda) as u64;
            }
            Ok(total)
        }
    }
}

/// Parameters of `M(ξ, α, L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvedModelSpec {
    pub xi: f64,
    pub alpha: f64,
    pub l: f64,
}

/// Default resolution of the curved model: `max(4000, 400 L)` intervals.
pub fn curved_model_grid(l: f64) -> usize {
    (400.0 * l).ceil().max(4000.0) as usize
}

impl CurvedModelSpec {
    fn validate(&self) -> Result<()> {
        if !self.xi.is_finite() {
            return Err(Error::InvalidInput("xi must be finite".into()));
        }
        if !(-1.0..=1.0).contains(&self.alpha) {
            return Err(Error::Precondition(format!("alpha = {} outside [-1, 1]", self.alpha)));
        }
        if !(self.l >= 1.0) || !self.l.is_finite() {
            return Err(Error::Precondition(format!("L = {} must be >= 1", self.l)));
        }
        if 2.0 * self.alpha.abs() * self.l > 1.0 {
            return Err(Error::Precondition(format!(
                "need 2|alpha| L <= 1, got alpha = {}, L = {}",
                self.alpha, self.l
            )));
        }
        Ok(())
    }

    /// Symmetric tridiagonal discretization of the form
    /// `∫₀ᴸ (|f'|² + a⁻²(ξ + τ - ατ²/2)² |f|²) a dτ`, `f(L) = 0`, in
    /// `L²((0, L), a dτ)`. The natural condition at `τ = 0` comes from the
    /// half cell there.
    pub fn operator(&self, n_grid: usize) -> Result<SymTridiag> {
        self.validate()?;
        if n_grid < 16 {
            return Err(Error::InvalidInput("curved model needs at least 16 intervals".into()));
        }
        let d = self.l / n_grid as f64;
        let a = |tau: f64| 1.0 - self.alpha * tau;
        let mass: Vec<f64> = (0..n_grid)
            .map(|i| {
                let cell = if i == 0 { 0.5 } else { 1.0 };
                cell * a(i as f64 * d) * d
            })
            .collect();
        let link: Vec<f64> = (0..n_grid).map(|i| a((i as f64 + 0.5) * d) / d).collect();
        let diag: Vec<f64> = (0..n_grid)
            .map(|i| {
                let tau = i as f64 * d;
                let w = a(tau);
                let v = self.xi + tau - 0.5 * self.alpha * tau * tau;
                let stiff = link[i] + if i > 0 { link[i - 1] } else { 0.0 };
                stiff / mass[i] + v * v / (w * w)
            })
            .collect();
        let off: Vec<f64> = (0..n_grid - 1)
            .map(|i| -link[i] / (mass[i] * mass[i + 1]).sqrt())
            .collect();
        SymTridiag::new(diag, off)
    }
}

/// `j`-th eigenvalue (0-based) of `M(ξ, α, L)` on `n_grid` intervals.
pub fn curved_model_eig(spec: &CurvedModelSpec, j: usize, n_grid: usize) -> Result<f64> {
    let t = spec.operator(n_grid)?;
    bisect_eigenvalue(&t, j, 1e-12 * (1.0 + spec.xi * spec.xi))
}

/// Number of eigenvalues of `M(ξ, α, L)` below `level`.
pub fn curved_model_count(spec: &CurvedModelSpec, level: f64, n_grid: usize) -> Result<u64> {
    Ok(sturm_count(&spec.operator(n_grid)?, level) as u64)
}

/// Per-mode breakdown of a curved half-cylinder count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvedCylinderCount {
    pub total: u64,
    /// `(n, count)` for every mode with a nonzero count.
    pub per_mode: Vec<(i64, u64)>,
    /// Scanned modes `[n_min, n_max]`.
    pub window: (i64, i64),
    /// Number of window widenings needed for certification.
    pub widenings: u32,
}

/// Margin above the reduced level that every excluded mode must clear.
pub const CERTIFY_MARGIN: f64 = 1e-3;
const CERTIFY_PAD: i64 = 2;
const MAX_WIDENINGS: u32 = 3;

/// Count of the curved half-cylinder `M̃` (periodic in `s`, Dirichlet at `T`)
/// below `lambda`, through the decomposition
/// `M̃ ≅ hB ⊕ₙ M(2πn h^{1/2} B^{-1/2} / S, κ (h/B)^{1/2}, T (B/h)^{1/2})`.
pub fn count_curved_cylinder(
    dg: &DeGennes,
    spec: &StripSpec,
    lambda: f64,
    n_grid: Option<usize>,
) -> Result<CurvedCylinderCount> {
    spec.validate()?;
    if spec.bc_s != SBoundary::Periodic {
        return Err(Error::InvalidInput("curved cylinder needs periodic s".into()));
    }
    let hb = spec.h * spec.field;
    let level = lambda / hb;
    let q = 2.0 * PI * (spec.h / spec.field).sqrt() / spec.s_len;
    let alpha = spec.kappa * (spec.h / spec.field).sqrt();
    let l = spec.t_len * (spec.field / spec.h).sqrt();
    let n_grid = n_grid.unwrap_or_else(|| curved_model_grid(l));
    let model = |n: i64| CurvedModelSpec {
        xi: n as f64 * q,
        alpha,
        l,
    };
    let tri = |n: i64| model(n).operator(n_grid);

    let xi0 = dg.xi0();
    let n0 = (xi0 / q).round() as i64;
    let mut per_mode = Vec::new();
    let mut window = (n0, n0);
    let mut widenings = 0;
    for dir in [1i64, -1] {
        let mut n = if dir == 1 { n0 } else { n0 - 1 };
        loop {
            let t = tri(n)?;
            let c = sturm_count(&t, level) as u64;
            if c > 0 {
                per_mode.push((n, c));
            }
            let outer_side = dir as f64 * (n as f64 * q - xi0) >= 0.0;
            if c == 0 && outer_side && sturm_count(&t, level + CERTIFY_MARGIN) == 0 {
                // recheck a pad of modes beyond the edge
                let pad_ok = (1..=CERTIFY_PAD)
                    .map(|p| tri(n + dir * p).map(|t| sturm_count(&t, level + CERTIFY_MARGIN) == 0))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .all(|ok| ok);
                if pad_ok {
                    if dir == 1 {
                        window.1 = n + CERTIFY_PAD;
                    } else {
                        window.0 = n - CERTIFY_PAD;
                    }
                    break;
                }
                widenings += 1;
                if widenings > MAX_WIDENINGS {
                    return Err(Error::Uncertified(format!(
                        "modes beyond n = {n} still reach level {level}"
                    )));
                }
            }
            n += dir;
            if (n - n0).unsigned_abs() > 10_000_000 {
                return Err(Error::Uncertified("curved mode scan did not terminate".into()));
            }
        }
    }
    per_mode.sort_unstable();
    Ok(CurvedCylinderCount {
        total: per_mode.iter().map(|(_, c)| c).sum(),
        per_mode,
        window,
        widenings,
    })
}

/// Main term `h^{-1/4} S (κ + κ₀)₊^{1/2} / (π √(3|ξ₀|))` of the curved
/// half-cylinder at the level `hΘ₀ + h^{3/2} C₁ κ₀` (unit field).
pub fn curved_cylinder_main_term(dg: &DeGennes, s_len: f64, h: f64, kappa: f64, kappa0: f64) -> f64 {
    h.powf(-0.25) * s_len * (kappa + kappa0).max(0.0).sqrt() / (PI * (3.0 * dg.xi0().abs()).sqrt())
}
