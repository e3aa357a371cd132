//! The de Gennes model family `-d²/dt² + (ξ + t)²` on the half-line.
//!
//! `μ(ξ)` is the lowest eigenvalue with a Neumann condition at the origin,
//! `μ₁(ξ)` the second one, and `λ(ξ)` the lowest Dirichlet eigenvalue. The
//! half-line is truncated at `L_tr` (Dirichlet there) and discretized with
//! second-order finite differences; the Neumann end uses a mirrored ghost
//! node, which after diagonal similarity gives a symmetric tridiagonal matrix.
//!
//! `μ` has a unique non-degenerate minimum `Θ₀ = μ(ξ₀) = ξ₀²` with
//! `ξ₀ ∈ (-1, 0)`. The two monotone inverse branches `ν₊`, `ν₋` are extended
//! by the constant `ξ₀` below `Θ₀`.
//!
//! `C₁` is taken as `μ''(ξ₀) / (6 |ξ₀|)`, so that `3 C₁ |ξ₀|` is the Taylor
//! coefficient `μ''(ξ₀) / 2`. (Read literally, the printed grouping
//! `μ''(ξ₀)/6 |ξ₀|` would mean `μ''(ξ₀) |ξ₀| / 6`; that reading is not used.)

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::band_eig::{bisect_eigenvalue_psd, SymTridiag};
use crate::error::{Error, Result};
use crate::numerics::{golden_section_min, solve_bracketed};

pub const DEFAULT_N_GRID: usize = 4000;
pub const MIN_N_GRID: usize = 16;
/// Required gap between the potential at the truncation point and the
/// computed eigenvalue.
pub const TRUNCATION_MARGIN: f64 = 50.0;
const EIG_TOL: f64 = 1e-12;

/// Boundary condition at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Neumann,
    Dirichlet,
}

/// Default truncation `max(12, |ξ| + 10)`.
pub fn default_trunc_length(xi: f64) -> f64 {
    (xi.abs() + 10.0).max(12.0)
}

/// Finite-difference discretization of the model operator for one `ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfLineDisc {
    pub xi: f64,
    pub bc_origin: BoundaryCondition,
    pub trunc_length: f64,
    pub n_grid: usize,
}

impl HalfLineDisc {
    pub fn new(xi: f64, bc_origin: BoundaryCondition) -> Self {
        Self {
            xi,
            bc_origin,
            trunc_length: default_trunc_length(xi),
            n_grid: DEFAULT_N_GRID,
        }
    }

    pub fn neumann(xi: f64) -> Self {
        Self::new(xi, BoundaryCondition::Neumann)
    }

    pub fn with_grid(mut self, n_grid: usize) -> Self {
        self.n_grid = n_grid;
        self
    }

    pub fn with_trunc_length(mut self, trunc_length: f64) -> Self {
        self.trunc_length = trunc_length;
        self
    }

    pub fn spacing(&self) -> f64 {
        self.trunc_length / self.n_grid as f64
    }

    fn validate(&self) -> Result<()> {
        if !self.xi.is_finite() {
            return Err(Error::InvalidInput("xi must be finite".into()));
        }
        if !(self.trunc_length > 0.0) || !self.trunc_length.is_finite() {
            return Err(Error::InvalidInput("truncation length must be positive".into()));
        }
        if self.n_grid < MIN_N_GRID {
            return Err(Error::InvalidInput(format!("n_grid must be at least {MIN_N_GRID}")));
        }
        Ok(())
    }

    /// The symmetric tridiagonal matrix of the discretized operator.
    pub fn operator(&self) -> Result<SymTridiag> {
        self.validate()?;
        let d = self.spacing();
        let inv = 1.0 / (d * d);
        let pot = |i: usize| {
            let s = self.xi + i as f64 * d;
            s * s
        };
        let (diag, off) = match self.bc_origin {
            BoundaryCondition::Neumann => {
                let n = self.n_grid;
                let diag: Vec<f64> = (0..n).map(|i| 2.0 * inv + pot(i)).collect();
                let mut off = vec![-inv; n - 1];
                off[0] = -std::f64::consts::SQRT_2 * inv;
                (diag, off)
            }
            BoundaryCondition::Dirichlet => {
                let n = self.n_grid - 1;
                let diag: Vec<f64> = (1..=n).map(|i| 2.0 * inv + pot(i)).collect();
                (diag, vec![-inv; n - 1])
            }
        };
        SymTridiag::new(diag, off)
    }
}

/// Value with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
}

/// The `j`-th eigenvalue (`j = 0` lowest) of the discretization `disc`.
pub fn mu(disc: &HalfLineDisc, j: usize) -> Result<f64> {
    let t = disc.operator()?;
    let e = bisect_eigenvalue_psd(&t, j, EIG_TOL * (1.0 + disc.xi * disc.xi))?;
    let cut = disc.xi + disc.trunc_length;
    let potential = cut * cut;
    if potential - e < TRUNCATION_MARGIN {
        return Err(Error::TruncationMargin {
            trunc_length: disc.trunc_length,
            potential,
            eigenvalue: e,
        });
    }
    Ok(e)
}

/// One Richardson step on grids `n` and `2n` (the scheme is `O(d²)`).
pub fn mu_extrapolated(disc: &HalfLineDisc, j: usize) -> Result<Estimate> {
    let coarse = mu(disc, j)?;
    let fine = mu(&disc.with_grid(2 * disc.n_grid), j)?;
    let value = (4.0 * fine - coarse) / 3.0;
    Ok(Estimate {
        value,
        err: (value - fine).abs(),
    })
}

/// Grid policy for constant extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionPolicy {
    pub n_grid: usize,
    /// Number of grid doublings applied on top of `n_grid`.
    pub refine: u32,
}

impl Default for ResolutionPolicy {
    fn default() -> Self {
        Self {
            n_grid: DEFAULT_N_GRID,
            refine: 0,
        }
    }
}

impl ResolutionPolicy {
    pub fn grid(&self) -> usize {
        self.n_grid << self.refine
    }

    fn disc(&self, xi: f64, bc: BoundaryCondition) -> HalfLineDisc {
        HalfLineDisc::new(xi, bc).with_grid(self.grid())
    }

    /// Extrapolated `j`-th eigenvalue at `ξ`.
    pub fn eval(&self, xi: f64, bc: BoundaryCondition, j: usize) -> Result<Estimate> {
        mu_extrapolated(&self.disc(xi, bc), j)
    }

    /// Extrapolated de Gennes value `μ(ξ)`.
    pub fn mu(&self, xi: f64) -> Result<f64> {
        Ok(self.eval(xi, BoundaryCondition::Neumann, 0)?.value)
    }
}

/// Spectral constants of the de Gennes family with error estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeGennesConstants {
    pub theta0: f64,
    pub xi0: f64,
    /// `μ''(ξ₀)`.
    pub mu_second: f64,
    pub c1: f64,
    pub theta1: f64,
    /// Minimizer of `μ₁`.
    pub xi1: f64,
    pub err: ConstantErrors,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantErrors {
    pub theta0: f64,
    pub xi0: f64,
    pub mu_second: f64,
    pub c1: f64,
    pub theta1: f64,
}

const XI0_BRACKET: (f64, f64) = (-1.0, 0.0);
const XI1_BRACKET: (f64, f64) = (-3.0, 0.0);
const FIRST_DIFF_STEP: f64 = 0.02;
const SECOND_DIFF_STEP: f64 = 0.04;

/// Computes `Θ₀, ξ₀, μ''(ξ₀), C₁, Θ₁`.
///
/// `ξ₀` is located by golden-section search on `(-1, 0)` and then polished as
/// the zero of the central-difference derivative, which is far better
/// conditioned than the flat minimum itself.
pub fn find_constants(policy: ResolutionPolicy) -> Result<DeGennesConstants> {
    let mu0 = |xi: f64| policy.mu(xi);
    let (xi_g, _) = golden_section_min(&mu0, XI0_BRACKET.0, XI0_BRACKET.1, 1e-5)?;

    let central = |xi: f64, step: f64| -> Result<f64> { Ok((mu0(xi + step)? - mu0(xi - step)?) / (2.0 * step)) };
    // Richardson-corrected central difference, O(step⁴)
    let root_of_derivative = |step: f64| -> Result<f64> {
        let deriv = |xi: f64| -> Result<f64> { Ok((4.0 * central(xi, 0.5 * step)? - central(xi, step)?) / 3.0) };
        solve_bracketed(&deriv, xi_g - 2e-3, xi_g + 2e-3, 1e-12)
    };
    let xi0 = root_of_derivative(FIRST_DIFF_STEP)?;
    let xi0_alt = root_of_derivative(2.0 * FIRST_DIFF_STEP)?;

    let at_min = policy.eval(xi0, BoundaryCondition::Neumann, 0)?;
    let theta0 = at_min.value;

    let second_diff =
        |step: f64| -> Result<f64> { Ok((mu0(xi0 + step)? - 2.0 * theta0 + mu0(xi0 - step)?) / (step * step)) };
    let coarse = second_diff(SECOND_DIFF_STEP)?;
    let fine = second_diff(0.5 * SECOND_DIFF_STEP)?;
    if (coarse - fine).abs() > 1e-2 * fine.abs() {
        return Err(Error::Unstable { coarse, fine });
    }
    let mu_second = (4.0 * fine - coarse) / 3.0;
    let mu_second_err = (mu_second - fine).abs() + 1e-7;

    let c1 = mu_second / (6.0 * xi0.abs());
    let xi0_err = (xi0 - xi0_alt).abs() + 1e-10;
    let c1_err = c1 * (mu_second_err / mu_second.abs() + xi0_err / xi0.abs());

    let mu1 = |xi: f64| Ok(policy.eval(xi, BoundaryCondition::Neumann, 1)?.value);
    let (xi1, theta1) = golden_section_min(&mu1, XI1_BRACKET.0, XI1_BRACKET.1, 1e-6)?;
    let theta1_err = policy.eval(xi1, BoundaryCondition::Neumann, 1)?.err;

    Ok(DeGennesConstants {
        theta0,
        xi0,
        mu_second,
        c1,
        theta1,
        xi1,
        err: ConstantErrors {
            theta0: at_min.err,
            xi0: xi0_err,
            mu_second: mu_second_err,
            c1: c1_err,
            theta1: theta1_err,
        },
    })
}

/// Which inverse of `μ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `ν₊ : [Θ₀, ∞) → [ξ₀, ∞)`
    Plus,
    /// `ν₋ : [Θ₀, 1) → (-∞, ξ₀]`
    Minus,
}

/// Sampled monotone inverse branch of `μ`.
///
/// Samples are `(β, ξ)` pairs with `μ(ξ) = β`, ordered by increasing `β`.
/// They bracket the root search in [`nu`]; the returned values are always
/// obtained by inverting the `μ` solver itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseBranch {
    pub branch: Branch,
    pub theta0: f64,
    pub xi0: f64,
    pub policy: ResolutionPolicy,
    pub samples: Vec<(f64, f64)>,
}

const BRANCH_SPAN_PLUS: f64 = 4.0;
const BRANCH_SPAN_MINUS: f64 = 6.0;
const BRANCH_SAMPLES: usize = 48;

impl InverseBranch {
    pub fn build(branch: Branch, constants: &DeGennesConstants, policy: ResolutionPolicy) -> Result<Self> {
        let (theta0, xi0) = (constants.theta0, constants.xi0);
        let mut samples = vec![(theta0, xi0)];
        // quadratic spacing in ξ resolves the square-root behaviour at Θ₀
        for k in 1..=BRANCH_SAMPLES {
            let r = (k as f64 / BRANCH_SAMPLES as f64).powi(2);
            let xi = match branch {
                Branch::Plus => xi0 + BRANCH_SPAN_PLUS * r,
                Branch::Minus => xi0 - BRANCH_SPAN_MINUS * r,
            };
            let beta = policy.mu(xi)?;
            if beta > samples.last().map_or(f64::NEG_INFINITY, |s| s.0) {
                samples.push((beta, xi));
            }
        }
        Ok(Self {
            branch,
            theta0,
            xi0,
            policy,
            samples,
        })
    }

    /// Largest tabulated `β`.
    pub fn beta_max(&self) -> f64 {
        self.samples.last().map_or(self.theta0, |s| s.0)
    }
}

/// Inverse branch value `ν±(β)`, extended by `ξ₀` for `β ≤ Θ₀`.
pub fn nu(table: &InverseBranch, beta: f64) -> Result<f64> {
    if !beta.is_finite() {
        return Err(Error::Domain(format!("beta = {beta}")));
    }
    match table.branch {
        Branch::Plus if beta < 0.0 => return Err(Error::Domain(format!("nu_plus needs beta >= 0, got {beta}"))),
        Branch::Minus if !(0.0..1.0).contains(&beta) => {
            return Err(Error::Domain(format!("nu_minus is defined on [0, 1), got {beta}")))
        }
        _ => {}
    }
    if beta <= table.theta0 {
        return Ok(table.xi0);
    }
    let policy = table.policy;
    let f = |xi: f64| -> Result<f64> { Ok(policy.mu(xi)? - beta) };
    let idx = table.samples.partition_point(|s| s.0 < beta);
    let (a, b) = if idx < table.samples.len() {
        (table.samples[idx - 1].1, table.samples[idx].1)
    } else {
        // beyond the table: march outward until μ exceeds β
        let mut outer = table.samples[idx - 1].1;
        let mut inner;
        let step = match table.branch {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        };
        loop {
            inner = outer;
            outer += step;
            if outer.abs() > 60.0 {
                return Err(Error::Domain(format!(
                    "beta = {beta} cannot be separated from the branch limit"
                )));
            }
            if f(outer)? > 0.0 {
                break;
            }
        }
        (inner, outer)
    };
    solve_bracketed(&f, a, b, 1e-12)
}

/// Constants plus both inverse branches, computed once and shared read-only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeGennes {
    pub constants: DeGennesConstants,
    pub plus: InverseBranch,
    pub minus: InverseBranch,
}

impl DeGennes {
    pub fn compute(policy: ResolutionPolicy) -> Result<Self> {
        let constants = find_constants(policy)?;
        Ok(Self {
            plus: InverseBranch::build(Branch::Plus, &constants, policy)?,
            minus: InverseBranch::build(Branch::Minus, &constants, policy)?,
            constants,
        })
    }

    /// Process-wide instance at the default resolution.
    pub fn shared() -> &'static DeGennes {
        static SHARED: OnceLock<DeGennes> = OnceLock::new();
        SHARED.get_or_init(|| {
            DeGennes::compute(ResolutionPolicy::default()).expect("de Gennes constants at the default resolution")
        })
    }

    pub fn policy(&self) -> ResolutionPolicy {
        self.plus.policy
    }

    pub fn theta0(&self) -> f64 {
        self.constants.theta0
    }

    pub fn xi0(&self) -> f64 {
        self.constants.xi0
    }

    pub fn c1(&self) -> f64 {
        self.constants.c1
    }

    /// `μ(ξ)` at the table resolution.
    pub fn mu(&self, xi: f64) -> Result<f64> {
        self.policy().mu(xi)
    }

    pub fn nu(&self, branch: Branch, beta: f64) -> Result<f64> {
        match branch {
            Branch::Plus => nu(&self.plus, beta),
            Branch::Minus => nu(&self.minus, beta),
        }
    }

    /// Width `ν₊(β) - ν₋(β)` of the sublevel set `{μ < β}`, for `β < 1`.
    pub fn nu_width(&self, beta: f64) -> Result<f64> {
        if beta <= self.theta0() {
            return Ok(0.0);
        }
        Ok(self.nu(Branch::Plus, beta)? - self.nu(Branch::Minus, beta)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dg() -> &'static DeGennes {
        DeGennes::shared()
    }

    #[test]
    fn mu_at_zero_is_oscillator_ground_state() {
        // even extension of the whole-line oscillator
        let e = mu_extrapolated(&HalfLineDisc::neumann(0.0), 0).unwrap();
        assert!((e.value - 1.0).abs() < 1e-8, "{e:?}");
        let raw = mu(&HalfLineDisc::neumann(0.0).with_grid(400), 0).unwrap();
        assert!((raw - 1.0).abs() < 1e-3);
    }

    #[test]
    fn mu_far_left_tends_to_one() {
        let v = dg().mu(-8.0).unwrap();
        assert!((v - 1.0).abs() < 1e-3, "{v}");
    }

    #[test]
    fn dirichlet_value_at_least_one() {
        for &xi in &[-6.0, -2.0, -0.77, 0.0, 1.5] {
            let l = ResolutionPolicy::default()
                .eval(xi, BoundaryCondition::Dirichlet, 0)
                .unwrap()
                .value;
            assert!(l >= 1.0 - 1e-9, "xi={xi}: {l}");
        }
    }

    #[test]
    fn truncation_margin_is_enforced() {
        let disc = HalfLineDisc::neumann(0.0).with_trunc_length(3.0);
        assert!(matches!(mu(&disc, 0), Err(Error::TruncationMargin { .. })));
    }

    #[test]
    fn constants_in_range() {
        let c = dg().constants;
        assert!((0.585..=0.595).contains(&c.theta0), "{c:?}");
        assert!((2.625..=2.635).contains(&c.theta1), "{c:?}");
        assert!((c.theta0 - c.xi0 * c.xi0).abs() <= 1e-6, "{c:?}");
        assert!(c.xi0 > -1.0 && c.xi0 < 0.0);
        assert!(c.c1 > 0.0 && c.theta1 > 1.0);
    }

    #[test]
    fn extension_and_minimum() {
        let d = dg();
        assert_eq!(d.nu(Branch::Plus, d.theta0()).unwrap(), d.xi0());
        assert_eq!(d.nu(Branch::Minus, d.theta0()).unwrap(), d.xi0());
        assert_eq!(d.nu(Branch::Plus, 0.3).unwrap(), d.xi0());
        assert_eq!(d.nu(Branch::Minus, 0.0).unwrap(), d.xi0());
        assert!(matches!(d.nu(Branch::Minus, 1.0), Err(Error::Domain(_))));
        assert!(matches!(d.nu(Branch::Plus, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn nu_round_trip_at_point_eight() {
        let d = dg();
        for b in [Branch::Plus, Branch::Minus] {
            let xi = d.nu(b, 0.8).unwrap();
            assert!((d.mu(xi).unwrap() - 0.8).abs() < 1e-6);
        }
        assert!(d.nu(Branch::Plus, 0.8).unwrap() > d.xi0());
        assert!(d.nu(Branch::Minus, 0.8).unwrap() < d.xi0());
    }

    #[test]
    fn nu_beyond_table() {
        let d = dg();
        let beta = d.plus.beta_max() + 10.0;
        let xi = d.nu(Branch::Plus, beta).unwrap();
        assert!((d.mu(xi).unwrap() - beta).abs() < 1e-8);
    }

    #[test]
    fn json_round_trip() {
        let d = dg();
        let back = DeGennes::from_json(&d.to_json().unwrap()).unwrap();
        assert_eq!(&back, d);
    }
}
