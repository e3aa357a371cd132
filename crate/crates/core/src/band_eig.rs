//! Eigenvalue counting for symmetric tridiagonal and banded Hermitian matrices.
//!
//! Every spectral count in the crate goes through this module. Tridiagonal
//! problems use the Sturm sequence (shifted LDLᵀ) recurrence; banded Hermitian
//! problems are realified to a real symmetric band matrix and factored without
//! pivoting, reading the inertia off the signs of the pivots (Sylvester).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative pivot floor used by the Sturm recurrence.
const STURM_FLOOR: f64 = 8.881_784_197_001_252e-16; // 2^-50

/// Relative shift applied when the banded factorization meets a tiny pivot.
pub const EPS_SHIFT: f64 = 1e-10;
/// Maximum number of shifted retries in [`banded_inertia`].
pub const MAX_SHIFT_RETRIES: u32 = 3;
const BAND_PIVOT_TOL: f64 = 1e-13;

/// Largest dimension accepted by [`dense_eigs_oracle`].
pub const DENSE_ORACLE_MAX_DIM: usize = 200;

/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymTridiag {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidInput("tridiagonal matrix must have n >= 1".into()));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::InvalidInput(format!(
                "off-diagonal has length {}, expected {}",
                offdiag.len(),
                diag.len() - 1
            )));
        }
        if diag.iter().chain(offdiag.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Gershgorin enclosure `[lo, hi]` of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.offdiag[i - 1].abs();
            }
            if i + 1 < n {
                r += self.offdiag[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    fn scale(&self) -> f64 {
        self.diag
            .iter()
            .chain(self.offdiag.iter())
            .fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn to_dense(&self) -> DenseHermitian {
        let n = self.dim();
        let mut a = DenseHermitian::zeros(n);
        for i in 0..n {
            a.set(i, i, Complex64::new(self.diag[i], 0.0));
            if i + 1 < n {
                a.set(i + 1, i, Complex64::new(self.offdiag[i], 0.0));
            }
        }
        a
    }
}

/// Number of eigenvalues of `t` strictly below `lambda`.
pub fn sturm_count(t: &SymTridiag, lambda: f64) -> usize {
    let floor = STURM_FLOOR * t.scale().max(lambda.abs()).max(f64::MIN_POSITIVE);
    let guard = |q: f64| {
        if q.abs() < floor {
            if q < 0.0 {
                -floor
            } else {
                floor
            }
        } else {
            q
        }
    };
    let mut count = 0;
    let mut q = guard(t.diag[0] - lambda);
    if q < 0.0 {
        count += 1;
    }
    for i in 1..t.dim() {
        let e = t.offdiag[i - 1];
        q = guard(t.diag[i] - lambda - e * e / q);
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `k`-th smallest eigenvalue (0-based) of `t`, to within `tol`.
pub fn bisect_eigenvalue(t: &SymTridiag, k: usize, tol: f64) -> Result<f64> {
    if k >= t.dim() {
        return Err(Error::InvalidInput(format!(
            "eigenvalue index {k} out of range for dimension {}",
            t.dim()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("bisection tolerance must be positive".into()));
    }
    let (lo, hi) = t.gershgorin();
    let pad = 1e-12 * (lo.abs() + hi.abs()).max(1.0);
    Ok(bisect_in(t, k, lo - pad, hi + pad, tol))
}

/// Like [`bisect_eigenvalue`] for a matrix known to be positive
/// semidefinite: the search starts from `[0, hi]`, with `hi` found by
/// doubling, which saves most of the iterations spent shrinking the
/// Gershgorin interval.
pub fn bisect_eigenvalue_psd(t: &SymTridiag, k: usize, tol: f64) -> Result<f64> {
    if k >= t.dim() {
        return Err(Error::InvalidInput(format!(
            "eigenvalue index {k} out of range for dimension {}",
            t.dim()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("bisection tolerance must be positive".into()));
    }
    let (_, gmax) = t.gershgorin();
    let mut hi = 1.0_f64;
    while sturm_count(t, hi) <= k {
        if hi > gmax {
            break;
        }
        hi *= 2.0;
    }
    let mut lo = if hi > 1.0 { 0.5 * hi } else { 0.0 };
    let mut hi = hi.min(gmax + 1.0);
    // coarse isolation, then Rayleigh-quotient polish checked by Sturm counts
    let coarse = 1e-4 * hi.max(1.0);
    while hi - lo > coarse {
        let mid = 0.5 * (lo + hi);
        if sturm_count(t, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if let Some(e) = rayleigh_polish(t, 0.5 * (lo + hi), lo, hi, tol) {
        let check = tol.max(64.0 * f64::EPSILON * t.scale());
        if sturm_count(t, e - check) <= k && sturm_count(t, e + check) > k {
            return Ok(e);
        }
    }
    Ok(bisect_in(t, k, lo, hi, tol))
}

/// Rayleigh quotient iteration from `sigma`, abandoned if it leaves `[lo, hi]`.
fn rayleigh_polish(t: &SymTridiag, mut sigma: f64, lo: f64, hi: f64, tol: f64) -> Option<f64> {
    let n = t.dim();
    let (d, e) = (t.diag(), t.offdiag());
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut c = vec![0.0; n];
    let mut y = vec![0.0; n];
    let tiny = f64::EPSILON * t.scale().max(f64::MIN_POSITIVE);
    for _ in 0..8 {
        // Thomas algorithm for (T - sigma I) y = x
        let mut piv = d[0] - sigma;
        if piv.abs() < tiny {
            piv = tiny;
        }
        y[0] = x[0] / piv;
        for i in 1..n {
            c[i - 1] = e[i - 1] / piv;
            piv = d[i] - sigma - e[i - 1] * c[i - 1];
            if piv.abs() < tiny {
                piv = tiny;
            }
            y[i] = (x[i] - e[i - 1] * y[i - 1]) / piv;
        }
        for i in (0..n - 1).rev() {
            y[i] -= c[i] * y[i + 1];
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return None;
        }
        for v in y.iter_mut() {
            *v /= norm;
        }
        let mut rq = 0.0;
        for i in 0..n {
            let mut ty = d[i] * y[i];
            if i > 0 {
                ty += e[i - 1] * y[i - 1];
            }
            if i + 1 < n {
                ty += e[i] * y[i + 1];
            }
            rq += y[i] * ty;
        }
        if !(lo..=hi).contains(&rq) {
            return None;
        }
        let done = (rq - sigma).abs() <= tol;
        sigma = rq;
        if done {
            return Some(sigma);
        }
        std::mem::swap(&mut x, &mut y);
    }
    None
}

fn bisect_in(t: &SymTridiag, k: usize, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    for _ in 0..300 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(t, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Signature of a Hermitian matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inertia {
    pub n_neg: usize,
    pub n_zero: usize,
    pub n_pos: usize,
}

/// Inertia of `A - lambda I` together with the shift actually applied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InertiaReport {
    pub inertia: Inertia,
    /// Shift added to `lambda` after pivot breakdown (0 when none was needed).
    pub shift: f64,
    pub retries: u32,
}

/// Banded Hermitian matrix holding the diagonal and the lower bands.
///
/// `bands[d][i]` is the entry `A[i + d][i]`; the upper triangle is implied by
/// Hermitian symmetry. The diagonal must be real.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedHermitian {
    n: usize,
    half_bandwidth: usize,
    bands: Vec<Vec<Complex64>>,
}

impl BandedHermitian {
    pub fn zeros(n: usize, half_bandwidth: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("banded matrix must have n >= 1".into()));
        }
        if half_bandwidth >= n.max(2) {
            return Err(Error::InvalidInput(format!(
                "half bandwidth {half_bandwidth} must be below dimension {n}"
            )));
        }
        let bands = (0..=half_bandwidth)
            .map(|d| vec![Complex64::new(0.0, 0.0); n - d])
            .collect();
        Ok(Self {
            n,
            half_bandwidth,
            bands,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn half_bandwidth(&self) -> usize {
        self.half_bandwidth
    }

    /// Entry `A[i][j]` (any triangle).
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if i >= j {
            let d = i - j;
            if d > self.half_bandwidth {
                Complex64::new(0.0, 0.0)
            } else {
                self.bands[d][j]
            }
        } else {
            self.get(j, i).conj()
        }
    }

    /// Sets `A[i][j]` for `i >= j` (and implicitly `A[j][i]`).
    pub fn set_lower(&mut self, i: usize, j: usize, value: Complex64) -> Result<()> {
        if i < j || i >= self.n {
            return Err(Error::InvalidInput(format!("({i},{j}) is not a lower entry")));
        }
        let d = i - j;
        if d > self.half_bandwidth {
            return Err(Error::InvalidInput(format!(
                "({i},{j}) lies outside half bandwidth {}",
                self.half_bandwidth
            )));
        }
        if d == 0 && value.im != 0.0 {
            return Err(Error::InvalidInput("diagonal entries must be real".into()));
        }
        self.bands[d][j] = value;
        Ok(())
    }

    pub fn add_lower(&mut self, i: usize, j: usize, value: Complex64) -> Result<()> {
        let cur = self.get(i, j);
        self.set_lower(i, j, cur + value)
    }

    pub fn to_dense(&self) -> DenseHermitian {
        let mut a = DenseHermitian::zeros(self.n);
        for (d, band) in self.bands.iter().enumerate() {
            for (j, &v) in band.iter().enumerate() {
                a.set(j + d, j, v);
            }
        }
        a
    }

    /// Lower Gershgorin bound of the spectrum.
    pub fn gershgorin_lower(&self) -> f64 {
        let mut radius = vec![0.0; self.n];
        for (d, band) in self.bands.iter().enumerate().skip(1) {
            for (j, v) in band.iter().enumerate() {
                let a = v.norm();
                radius[j] += a;
                radius[j + d] += a;
            }
        }
        (0..self.n)
            .map(|i| self.bands[0][i].re - radius[i])
            .fold(f64::INFINITY, f64::min)
    }

    /// Realification: the `2n x 2n` real symmetric band matrix acting on
    /// interleaved (real, imaginary) parts.
    fn realify(&self, lambda: f64) -> RealBand {
        let n = 2 * self.n;
        let bw = 2 * self.half_bandwidth + 1;
        let mut band = RealBand::zeros(n, bw);
        for (d, b) in self.bands.iter().enumerate() {
            for (j, v) in b.iter().enumerate() {
                let i = j + d;
                let (x, y) = (v.re, v.im);
                if d == 0 {
                    band.set(2 * i, 2 * i, x - lambda);
                    band.set(2 * i + 1, 2 * i + 1, x - lambda);
                    band.set(2 * i + 1, 2 * i, 0.0);
                } else {
                    // [[X, -Y], [Y, X]] interleaved, lower triangle only
                    band.set(2 * i, 2 * j, x);
                    band.set(2 * i + 1, 2 * j + 1, x);
                    band.set(2 * i + 1, 2 * j, y);
                    band.set(2 * i, 2 * j + 1, -y);
                }
            }
        }
        band
    }
}

struct RealBand {
    n: usize,
    bw: usize,
    // row-major; row i stores A[i][i-bw..=i] at offsets 0..=bw
    data: Vec<f64>,
}

impl RealBand {
    fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i >= j && i - j <= self.bw);
        self.data[i * (self.bw + 1) + self.bw - (i - j)] = v;
    }

    fn scale(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Counts negative pivots of the unpivoted LDLᵀ factorization, or `None`
    /// when a pivot falls below the breakdown threshold.
    fn negative_pivots(&self) -> Option<usize> {
        let (n, bw) = (self.n, self.bw);
        let w = bw + 1;
        let thresh = BAND_PIVOT_TOL * self.scale().max(f64::MIN_POSITIVE);
        // l[i*w + off] = L[i][i-bw+off]; ld = l * d
        let mut l = vec![0.0; n * w];
        let mut ld = vec![0.0; n * w];
        let mut d = vec![0.0; n];
        let mut neg = 0;
        for i in 0..n {
            let first = i.saturating_sub(bw);
            for k in first..i {
                let mut s = self.data[i * w + bw - (i - k)];
                let m0 = first.max(k.saturating_sub(bw));
                if m0 < k {
                    let ri = &l[i * w + bw + m0 - i..i * w + bw + k - i];
                    let rk = &ld[k * w + bw + m0 - k..k * w + bw];
                    s -= ri.iter().zip(rk).map(|(a, b)| a * b).sum::<f64>();
                }
                let lik = s / d[k];
                l[i * w + bw - (i - k)] = lik;
                ld[i * w + bw - (i - k)] = lik * d[k];
            }
            let mut di = self.data[i * w + bw];
            for k in first..i {
                let off = i * w + bw - (i - k);
                di -= l[off] * ld[off];
            }
            if !di.is_finite() || di.abs() < thresh {
                return None;
            }
            d[i] = di;
            if di < 0.0 {
                neg += 1;
            }
        }
        Some(neg)
    }
}

/// Inertia of `a - lambda I`.
///
/// On a pivot breakdown the shift is moved by `EPS_SHIFT` relative to the
/// matrix scale, up to [`MAX_SHIFT_RETRIES`] times.
pub fn banded_inertia(a: &BandedHermitian, lambda: f64) -> Result<InertiaReport> {
    let n = a.dim();
    let base = a.realify(0.0).scale().max(lambda.abs()).max(f64::MIN_POSITIVE);
    for retry in 0..=MAX_SHIFT_RETRIES {
        let shift = if retry == 0 {
            0.0
        } else {
            EPS_SHIFT * base * f64::from(retry)
        };
        let real = a.realify(lambda + shift);
        match real.negative_pivots() {
            Some(neg) if neg % 2 == 0 => {
                let n_neg = neg / 2;
                return Ok(InertiaReport {
                    inertia: Inertia {
                        n_neg,
                        n_zero: 0,
                        n_pos: n - n_neg,
                    },
                    shift,
                    retries: retry,
                });
            }
            _ => continue,
        }
    }
    Err(Error::FactorizationBreakdown {
        lambda,
        retries: MAX_SHIFT_RETRIES,
    })
}

/// Dense Hermitian matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseHermitian {
    n: usize,
    data: Vec<Complex64>,
}

impl DenseHermitian {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = Self::zeros(n);
        for i in 0..n {
            a.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        a
    }

    /// Builds from row-major entries, checking Hermitian symmetry.
    pub fn from_rows(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::InvalidInput("dense matrix has wrong size".into()));
        }
        let a = Self { n, data };
        for i in 0..n {
            for j in 0..=i {
                let (x, y) = (a.get(i, j), a.get(j, i).conj());
                if (x - y).norm() > 1e-12 * (1.0 + x.norm()) {
                    return Err(Error::InvalidInput(format!("matrix not Hermitian at ({i},{j})")));
                }
            }
        }
        Ok(a)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    /// Sets `A[i][j]` and `A[j][i] = conj`.
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v.conj();
    }

    fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// All eigenvalues of a dense Hermitian matrix (ascending) by cyclic Jacobi.
///
/// Test oracle only; dimensions above [`DENSE_ORACLE_MAX_DIM`] are rejected.
pub fn dense_eigs_oracle(a: &DenseHermitian) -> Result<Vec<f64>> {
    let n = a.dim();
    if n > DENSE_ORACLE_MAX_DIM {
        return Err(Error::TooLarge {
            dim: n,
            max: DENSE_ORACLE_MAX_DIM,
        });
    }
    let mut m = a.data.clone();
    let norm = a.frobenius().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * norm {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let c = m[p * n + q];
                let cabs = c.norm();
                if cabs <= 1e-300 {
                    continue;
                }
                let w = c / cabs;
                let (app, aqq) = (m[p * n + p].re, m[q * n + q].re);
                let tau = (aqq - app) / (2.0 * cabs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                let wc = w.conj();
                // A <- A U
                for k in 0..n {
                    let (akp, akq) = (m[k * n + p], m[k * n + q]);
                    m[k * n + p] = akp * cs - akq * wc * sn;
                    m[k * n + q] = akp * sn + akq * wc * cs;
                }
                // A <- U^H A
                for k in 0..n {
                    let (apk, aqk) = (m[p * n + k], m[q * n + k]);
                    m[p * n + k] = apk * cs - aqk * w * sn;
                    m[q * n + k] = apk * sn + aqk * w * cs;
                }
                m[p * n + q] = Complex64::new(0.0, 0.0);
                m[q * n + p] = Complex64::new(0.0, 0.0);
                m[p * n + p].im = 0.0;
                m[q * n + q].im = 0.0;
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[i * n + i].re).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tri(d: &[f64], e: &[f64]) -> SymTridiag {
        SymTridiag::new(d.to_vec(), e.to_vec()).unwrap()
    }

    #[test]
    fn sturm_counts_small_cases() {
        assert_eq!(sturm_count(&tri(&[1.0, 2.0, 3.0], &[0.0, 0.0]), 2.5), 2);
        assert_eq!(sturm_count(&tri(&[2.0, 2.0], &[-1.0]), 2.0), 1);
        let t = tri(&[0.3, -1.0, 4.0, 2.0], &[0.5, -2.0, 1.0]);
        let (lo, _) = t.gershgorin();
        assert_eq!(sturm_count(&t, lo - 1e-9), 0);
    }

    #[test]
    fn bisection_small_cases() {
        let t = tri(&[1.0, 2.0, 3.0], &[0.0, 0.0]);
        assert!((bisect_eigenvalue(&t, 0, 1e-12).unwrap() - 1.0).abs() < 1e-12);
        let t = tri(&[2.0, 2.0], &[-1.0]);
        assert!((bisect_eigenvalue(&t, 1, 1e-12).unwrap() - 3.0).abs() < 1e-12);
        assert!(bisect_eigenvalue(&t, 2, 1e-12).is_err());
    }

    #[test]
    fn harmonic_oscillator_ground_state() {
        // -u'' + t^2 u on [-10, 10], Dirichlet; ground state -> 1
        let mut prev_err = f64::INFINITY;
        for &n in &[400usize, 800, 1600] {
            let d = 20.0 / n as f64;
            let diag: Vec<f64> = (1..n)
                .map(|i| {
                    let t = -10.0 + i as f64 * d;
                    2.0 / (d * d) + t * t
                })
                .collect();
            let off = vec![-1.0 / (d * d); n - 2];
            let e0 = bisect_eigenvalue(&tri(&diag, &off), 0, 1e-13).unwrap();
            let err = (e0 - 1.0).abs();
            assert!(err < prev_err / 3.5, "no second-order convergence: {err}");
            prev_err = err;
        }
        assert!(prev_err < 1e-5);
    }

    #[test]
    fn dense_oracle_small_cases() {
        assert_eq!(dense_eigs_oracle(&DenseHermitian::identity(3)).unwrap(), vec![1.0; 3]);
        let e = dense_eigs_oracle(&tri(&[2.0, 2.0], &[-1.0]).to_dense()).unwrap();
        assert!((e[0] - 1.0).abs() < 1e-14 && (e[1] - 3.0).abs() < 1e-14);
        let z = Complex64::new(0.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let a = DenseHermitian::from_rows(2, vec![z, i, -i, z]).unwrap();
        let e = dense_eigs_oracle(&a).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
        assert!(matches!(
            dense_eigs_oracle(&DenseHermitian::zeros(201)),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn banded_diagonal_case() {
        let mut a = BandedHermitian::zeros(3, 1).unwrap();
        for (k, v) in [1.0, 2.0, 3.0].into_iter().enumerate() {
            a.set_lower(k, k, Complex64::new(v, 0.0)).unwrap();
        }
        assert_eq!(banded_inertia(&a, 2.5).unwrap().inertia.n_neg, 2);
        assert_eq!(banded_inertia(&a, 0.9).unwrap().inertia.n_neg, 0);
    }

    fn random_banded(rng: &mut ChaCha8Rng, n: usize, b: usize) -> BandedHermitian {
        let mut a = BandedHermitian::zeros(n, b).unwrap();
        for j in 0..n {
            a.set_lower(j, j, Complex64::new(rng.gen_range(-2.0..2.0), 0.0))
                .unwrap();
            for d in 1..=b {
                if j + d < n {
                    let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    a.set_lower(j + d, j, v).unwrap();
                }
            }
        }
        a
    }

    #[test]
    fn banded_matches_dense_oracle_seeded() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = random_banded(&mut rng, 12, 3);
        let eig = dense_eigs_oracle(&a.to_dense()).unwrap();
        for k in 0..40 {
            let lambda = -6.0 + 0.3 * k as f64;
            let expect = eig.iter().filter(|&&e| e < lambda).count();
            let rep = banded_inertia(&a, lambda).unwrap();
            assert_eq!(rep.inertia.n_neg, expect, "lambda={lambda}");
            assert_eq!(rep.inertia.n_neg + rep.inertia.n_zero + rep.inertia.n_pos, 12);
        }
        assert_eq!(
            banded_inertia(&a, a.gershgorin_lower() - 1e-6).unwrap().inertia.n_neg,
            0
        );
    }

    #[test]
    fn breakdown_is_retried_with_shift() {
        // lambda exactly at an eigenvalue of the leading 1x1 block
        let mut a = BandedHermitian::zeros(2, 1).unwrap();
        a.set_lower(0, 0, Complex64::new(1.0, 0.0)).unwrap();
        a.set_lower(1, 1, Complex64::new(1.0, 0.0)).unwrap();
        a.set_lower(1, 0, Complex64::new(0.0, 1.0)).unwrap();
        let rep = banded_inertia(&a, 1.0).unwrap();
        assert!(rep.retries >= 1 && rep.shift > 0.0);
        assert_eq!(rep.inertia.n_neg, 1); // eigenvalues 0 and 2
    }

    #[test]
    fn realification_doubles_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_banded(&mut rng, 9, 2);
        let complex = dense_eigs_oracle(&a.to_dense()).unwrap();
        let real = a.realify(0.0);
        let mut dense = DenseHermitian::zeros(18);
        for i in 0..18usize {
            for j in i.saturating_sub(real.bw)..=i {
                let v = real.data[i * (real.bw + 1) + real.bw - (i - j)];
                dense.set(i, j, Complex64::new(v, 0.0));
            }
        }
        let doubled = dense_eigs_oracle(&dense).unwrap();
        for (k, e) in complex.iter().enumerate() {
            assert!((doubled[2 * k] - e).abs() < 1e-10);
            assert!((doubled[2 * k + 1] - e).abs() < 1e-10);
        }
    }
}
