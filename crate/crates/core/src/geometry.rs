//! Closed boundary curves in arclength parametrization and boundary data of
//! the magnetic field.
//!
//! A curve is stored as the Fourier coefficients of `z(s) = γ₁(s) + iγ₂(s)`,
//! `z(s) = Σ c_k exp(2πi k s / ℒ)`, traversed counterclockwise. Derivatives
//! are spectral. The interior normal is `iγ'`; exterior curves keep the same
//! parametrization and flip the normal, hence also the sign of `κ = ⟨γ'', ν⟩`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::integrate;

/// Which side of the closed curve the domain lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Interior,
    Exterior,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Interior => 1.0,
            Side::Exterior => -1.0,
        }
    }
}

/// Tolerance of the unit-speed invariant.
pub const SPEED_TOL: f64 = 1e-8;
/// Largest aspect ratio accepted by [`ellipse`].
pub const MAX_ASPECT: f64 = 100.0;
const TAIL_TOL: f64 = 1e-14;
const MAX_FFT_LEN: usize = 1 << 17;

/// Closed curve with unit-speed parametrization on `[0, ℒ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub length: f64,
    pub side: Side,
    /// `(k, c_k)` pairs, only non-negligible modes.
    pub coeffs: Vec<(i64, Complex64)>,
}

impl BoundaryCurve {
    /// Builds a curve from Fourier data and checks the invariants.
    pub fn from_fourier(length: f64, side: Side, coeffs: Vec<(i64, Complex64)>) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidInput(format!("curve length {length}")));
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("curve has no Fourier modes".into()));
        }
        let c = Self { length, side, coeffs };
        c.check_invariants(1024)?;
        Ok(c)
    }

    fn omega(&self, k: i64) -> f64 {
        2.0 * PI * k as f64 / self.length
    }

    /// `d`-th derivative of `z` at `s`.
    fn z_deriv(&self, s: f64, d: u32) -> Complex64 {
        self.coeffs
            .iter()
            .map(|&(k, c)| {
                let w = self.omega(k);
                c * Complex64::new(0.0, w).powu(d) * Complex64::from_polar(1.0, w * s)
            })
            .sum()
    }

    pub fn gamma(&self, s: f64) -> [f64; 2] {
        let z = self.z_deriv(s, 0);
        [z.re, z.im]
    }

    pub fn tangent(&self, s: f64) -> [f64; 2] {
        let z = self.z_deriv(s, 1);
        [z.re, z.im]
    }

    /// Unit normal pointing into the domain.
    pub fn normal(&self, s: f64) -> [f64; 2] {
        let t = self.z_deriv(s, 1) * Complex64::i() * self.side.sign();
        [t.re, t.im]
    }

    /// Curvature `⟨γ'', ν⟩`; positive where the domain is locally convex.
    pub fn kappa(&self, s: f64) -> f64 {
        let g2 = self.z_deriv(s, 2);
        let n = self.normal(s);
        g2.re * n[0] + g2.im * n[1]
    }

    /// `κ` at `n` equally spaced arclength points.
    pub fn kappa_samples(&self, n: usize) -> Vec<f64> {
        (0..n).map(|j| self.kappa(j as f64 * self.length / n as f64)).collect()
    }

    /// Highest Fourier mode present.
    pub fn max_mode(&self) -> u64 {
        self.coeffs.iter().map(|(k, _)| k.unsigned_abs()).max().unwrap_or(0)
    }

    /// Checks unit speed, the orientation of `(γ', ν)` and closedness at `n`
    /// sample points.
    pub fn check_invariants(&self, n: usize) -> Result<()> {
        let want_det = self.side.sign();
        for j in 0..n {
            let s = j as f64 * self.length / n as f64;
            let t = self.tangent(s);
            let nu = self.normal(s);
            let speed = t[0].hypot(t[1]);
            if (speed - 1.0).abs() > SPEED_TOL {
                return Err(Error::InvalidInput(format!("|γ'({s})| = {speed}")));
            }
            let det = t[0] * nu[1] - t[1] * nu[0];
            if (det - want_det).abs() > 2.0 * SPEED_TOL {
                return Err(Error::InvalidInput(format!("det(γ', ν)({s}) = {det}")));
            }
        }
        let (a, b) = (self.gamma(0.0), self.gamma(self.length));
        if (a[0] - b[0]).hypot(a[1] - b[1]) > SPEED_TOL * self.length {
            return Err(Error::InvalidInput("curve is not closed".into()));
        }
        Ok(())
    }

    /// `∫ κ ds` by the periodic trapezoid rule.
    pub fn total_curvature(&self) -> f64 {
        let n = (8 * self.max_mode() as usize).max(64);
        self.kappa_samples(n).iter().sum::<f64>() * self.length / n as f64
    }

    pub fn with_side(mut self, side: Side) -> Self {
        self.side = side;
        self
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: Self = serde_json::from_str(s)?;
        Self::from_fourier(raw.length, raw.side, raw.coeffs)
    }
}

/// Circle of radius `r` around the origin.
pub fn circle(r: f64, side: Side) -> Result<BoundaryCurve> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidInput(format!("radius {r}")));
    }
    BoundaryCurve::from_fourier(2.0 * PI * r, side, vec![(1, Complex64::new(r, 0.0))])
}

fn fft_forward(data: &mut [Complex64]) {
    FftPlanner::<f64>::new().plan_fft_forward(data.len()).process(data);
}

/// Fourier coefficients `(k, c_k)` of equally spaced periodic samples,
/// `k` in the symmetric range.
fn fourier_coeffs(samples: &[Complex64]) -> Vec<(i64, Complex64)> {
    let n = samples.len();
    let mut buf = samples.to_vec();
    fft_forward(&mut buf);
    buf.iter()
        .enumerate()
        .map(|(j, &c)| {
            let k = if j <= n / 2 { j as i64 } else { j as i64 - n as i64 };
            (k, c / n as f64)
        })
        .collect()
}

fn tail_ratio(coeffs: &[(i64, Complex64)], n: usize) -> f64 {
    let head = coeffs.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max);
    let tail = coeffs
        .iter()
        .filter(|(k, _)| k.unsigned_abs() as usize > 3 * n / 8)
        .map(|(_, c)| c.norm())
        .fold(0.0, f64::max);
    tail / head
}

/// Ellipse `x²/a² + y²/b² = 1` reparametrized by arclength.
///
/// The arclength map comes from the Fourier series of the speed, integrated
/// termwise, and is inverted by Newton's method; the sample count doubles
/// until the coefficients of `z(s)` decay below `1e-14`.
pub fn ellipse(a: f64, b: f64, side: Side) -> Result<BoundaryCurve> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInput(format!("semi-axes {a}, {b}")));
    }
    if a.max(b) / a.min(b) > MAX_ASPECT {
        return Err(Error::InvalidInput(format!(
            "aspect ratio {} exceeds {MAX_ASPECT}",
            a.max(b) / a.min(b)
        )));
    }
    let speed = |th: f64| (a * th.sin()).hypot(b * th.cos());
    let mut n = 64usize;
    loop {
        // speed series on the same resolution
        let v: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new(speed(2.0 * PI * j as f64 / n as f64), 0.0))
            .collect();
        let vc = fourier_coeffs(&v);
        let v0 = vc[0].1.re;
        let length = 2.0 * PI * v0;
        let vc: Vec<(i64, Complex64)> = vc
            .into_iter()
            .filter(|(k, c)| *k != 0 && c.norm() > 1e-17 * v0)
            .collect();
        let arc = |th: f64| -> f64 {
            v0 * th
                + vc.iter()
                    .map(|&(k, c)| (c * Complex64::from_polar(1.0, k as f64 * th) / Complex64::new(0.0, k as f64)).re)
                    .sum::<f64>()
        };
        let z: Vec<Complex64> = (0..n)
            .map(|j| {
                let target = j as f64 * length / n as f64;
                let mut th = 2.0 * PI * j as f64 / n as f64;
                for _ in 0..50 {
                    let step = (arc(th) - target) / speed(th);
                    th -= step;
                    if step.abs() < 1e-15 {
                        break;
                    }
                }
                Complex64::new(a * th.cos(), b * th.sin())
            })
            .collect();
        let coeffs = fourier_coeffs(&z);
        if tail_ratio(&coeffs, n) < TAIL_TOL {
            let scale = a.max(b);
            let kept = coeffs.into_iter().filter(|(_, c)| c.norm() > 1e-17 * scale).collect();
            return BoundaryCurve::from_fourier(length, side, kept);
        }
        n *= 2;
        if n > MAX_FFT_LEN {
            return Err(Error::InvalidInput(format!(
                "ellipse {a} x {b}: Fourier series did not converge"
            )));
        }
    }
}

/// Perimeter of an ellipse by adaptive quadrature of the speed, an
/// independent length check.
pub fn ellipse_perimeter(a: f64, b: f64) -> f64 {
    4.0 * integrate(|th: f64| (a * th.sin()).hypot(b * th.cos()), 0.0, 0.5 * PI, 1e-15)
}

/// Samples of the field strength on the boundary.
///
/// `samples[j]` is `B(γ(jℒ/n))`; values in between come from the
/// trigonometric interpolant. `b` is the infimum over the whole domain and
/// is supplied by the caller; `b_prime` is the boundary infimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldData", into = "FieldData")]
pub struct BoundaryField {
    samples: Vec<f64>,
    b: f64,
    b_prime: f64,
    coeffs: Vec<(i64, Complex64)>,
}

#[derive(Serialize, Deserialize)]
struct FieldData {
    samples: Vec<f64>,
    b: f64,
}

impl TryFrom<FieldData> for BoundaryField {
    type Error = Error;
    fn try_from(d: FieldData) -> Result<Self> {
        BoundaryField::new(d.samples, d.b)
    }
}

impl From<BoundaryField> for FieldData {
    fn from(f: BoundaryField) -> Self {
        Self {
            samples: f.samples,
            b: f.b,
        }
    }
}

impl BoundaryField {
    pub fn new(samples: Vec<f64>, b: f64) -> Result<Self> {
        if samples.is_empty() || samples.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidInput("field samples must be positive".into()));
        }
        let b_prime = samples.iter().copied().fold(f64::INFINITY, f64::min);
        if !(b > 0.0) || b > b_prime * (1.0 + 1e-12) {
            return Err(Error::InvalidInput(format!(
                "interior infimum b = {b} must lie in (0, b' = {b_prime}]"
            )));
        }
        let z: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let coeffs = fourier_coeffs(&z);
        Ok(Self {
            samples,
            b,
            b_prime,
            coeffs,
        })
    }

    /// Constant field `B` (then `b = b' = B`).
    pub fn constant(value: f64) -> Result<Self> {
        Self::new(vec![value], value)
    }

    /// Samples `field` at `n` points of `curve`.
    pub fn sample<F: Fn([f64; 2]) -> f64>(curve: &BoundaryCurve, field: F, n: usize, b: f64) -> Result<Self> {
        let samples = (0..n)
            .map(|j| field(curve.gamma(j as f64 * curve.length / n as f64)))
            .collect();
        Self::new(samples, b)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn b_prime(&self) -> f64 {
        self.b_prime
    }

    pub fn b_max(&self) -> f64 {
        self.samples.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_constant(&self) -> bool {
        self.b_max() - self.b_prime <= 1e-14 * self.b_max()
    }

    /// Field value at the fraction `u = s/ℒ` of the boundary.
    pub fn at_fraction(&self, u: f64) -> f64 {
        let n = self.samples.len();
        if n == 1 {
            return self.samples[0];
        }
        self.coeffs
            .iter()
            .map(|&(k, c)| {
                // split the Nyquist mode evenly between ±n/2
                let w = if n.is_multiple_of(2) && k.unsigned_abs() as usize == n / 2 {
                    0.5
                } else {
                    1.0
                };
                let e = Complex64::from_polar(1.0, 2.0 * PI * k as f64 * u);
                let mut v = (c * e).re * w;
                if w < 1.0 {
                    v += (c * e.conj()).re * w;
                }
                v
            })
            .sum()
    }

    /// The standing assumption `0 < Θ₀ b' < b`.
    pub fn assumption_check(&self, theta0: f64) -> bool {
        0.0 < theta0 * self.b_prime && theta0 * self.b_prime < self.b
    }
}

/// Rotationally symmetric field strength `B(r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RadialField {
    Constant {
        b: f64,
    },
    /// `B(r) = b0 + b2 r²`.
    Quadratic {
        b0: f64,
        b2: f64,
    },
}

impl RadialField {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            RadialField::Constant { b } => b > 0.0 && b.is_finite(),
            RadialField::Quadratic { b0, b2 } => b0 > 0.0 && b2 >= 0.0 && b0.is_finite() && b2.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("field {self:?} must be positive")))
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        match *self {
            RadialField::Constant { b } => b,
            RadialField::Quadratic { b0, b2 } => b0 + b2 * r * r,
        }
    }

    /// `∫₀ʳ B(ρ) ρ dρ`.
    pub fn flux_integral(&self, r: f64) -> f64 {
        match *self {
            RadialField::Constant { b } => 0.5 * b * r * r,
            RadialField::Quadratic { b0, b2 } => 0.5 * b0 * r * r + 0.25 * b2 * r.powi(4),
        }
    }

    /// Angular component of the symmetric gauge, `A_θ(r) = r⁻¹ ∫₀ʳ Bρ dρ`.
    pub fn vector_potential(&self, r: f64) -> f64 {
        match *self {
            RadialField::Constant { b } => 0.5 * b * r,
            RadialField::Quadratic { b0, b2 } => 0.5 * b0 * r + 0.25 * b2 * r.powi(3),
        }
    }

    /// Infimum of `B` over `[r0, r1]` (both profiles are nondecreasing in r).
    pub fn inf_on(&self, r0: f64, _r1: f64) -> f64 {
        self.value(r0)
    }

    /// Supremum of `B` over `[r0, r1]`.
    pub fn sup_on(&self, _r0: f64, r1: f64) -> f64 {
        self.value(r1)
    }

    pub fn is_constant(&self) -> bool {
        matches!(
            self,
            RadialField::Constant { .. } | RadialField::Quadratic { b2: 0.0, .. }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_circle() {
        let c = circle(1.0, Side::Interior).unwrap();
        assert!((c.length - 2.0 * PI).abs() < 1e-15);
        for k in c.kappa_samples(64) {
            assert!((k - 1.0).abs() < 1e-14);
        }
        assert!((c.total_curvature() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn exterior_circle_flips_curvature() {
        let c = circle(2.0, Side::Exterior).unwrap();
        for k in c.kappa_samples(64) {
            assert!((k + 0.5).abs() < 1e-14);
        }
        // normal points away from the obstacle
        let g = c.gamma(0.3);
        let n = c.normal(0.3);
        assert!(g[0] * n[0] + g[1] * n[1] > 0.0);
    }

    #[test]
    fn round_ellipse_is_circle() {
        let e = ellipse(1.5, 1.5, Side::Interior).unwrap();
        let c = circle(1.5, Side::Interior).unwrap();
        assert!((e.length - c.length).abs() < 1e-8);
        for j in 0..50 {
            let s = j as f64 * 0.17;
            let (p, q) = (e.gamma(s), c.gamma(s));
            assert!((p[0] - q[0]).hypot(p[1] - q[1]) < 1e-8);
        }
    }

    #[test]
    fn ellipse_vertex_curvatures() {
        let (a, b) = (2.0, 1.0);
        let e = ellipse(a, b, Side::Interior).unwrap();
        // s = 0 is the vertex (a, 0), s = ℒ/4 the vertex (0, b)
        assert!((e.kappa(0.0) - a / (b * b)).abs() < 1e-9);
        assert!((e.kappa(0.25 * e.length) - b / (a * a)).abs() < 1e-9);
        assert!((e.length - ellipse_perimeter(a, b)).abs() < 1e-8);
        assert!((e.total_curvature() - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn aspect_limit() {
        assert!(ellipse(101.0, 1.0, Side::Interior).is_err());
        assert!(circle(0.0, Side::Interior).is_err());
    }

    #[test]
    fn curve_json_round_trip() {
        let e = ellipse(1.3, 0.8, Side::Exterior).unwrap();
        let back = BoundaryCurve::from_json(&e.to_json().unwrap()).unwrap();
        assert_eq!(e, back);
    }

    #[test]
    fn field_interpolates_and_checks_assumption() {
        let c = circle(1.0, Side::Interior).unwrap();
        let f = BoundaryField::sample(&c, |p| 2.0 + p[0], 32, 1.0).unwrap();
        for j in 0..20 {
            let u = j as f64 / 20.0 + 0.013;
            let expect = 2.0 + (2.0 * PI * u).cos();
            assert!((f.at_fraction(u) - expect).abs() < 1e-12);
        }
        assert!((f.b_prime() - 1.0).abs() < 1e-12);
        assert!(f.assumption_check(0.59));
        let k = BoundaryField::constant(1.0).unwrap();
        assert!(k.assumption_check(0.59));
        assert!(BoundaryField::new(vec![1.0, 2.0], 1.5).is_err());
        let json = serde_json::to_string(&f).unwrap();
        let back: BoundaryField = serde_json::from_str(&json).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn radial_gauge_matches_flux() {
        let f = RadialField::Quadratic { b0: 1.0, b2: 1.0 };
        for &r in &[0.1, 0.5, 1.0, 2.0] {
            let flux = integrate(|p| f.value(p) * p, 0.0, r, 1e-14);
            assert!((flux - f.flux_integral(r)).abs() < 1e-12 * flux);
            assert!((f.vector_potential(r) * r - flux).abs() < 1e-12 * flux);
        }
    }
}
