//! The bilinear Poisson kernel `K_t(x, y; q) = α^{-2} Σ tⁿ ψ_n(x) ψ_n(y)` and its
//! boundary member `K_i`, the kernel of the q-Fourier transform.
//!
//! With `x = cos θ`, `y = cos φ` and Rogers' summation,
//!
//! ```text
//! K_t = (q, t²; q)_∞ ρ^{1/2}(x) ρ^{1/2}(y)
//!       / [2π (t e^{±i(θ+φ)}, t e^{±i(θ−φ)}; q)_∞]
//! ```
//!
//! Each conjugate pair in the denominator is a function of one cosine only:
//! `(t e^{iA}, t e^{−iA}; q)_∞ = ∏_k (1 − 2t qᵏ cos A + t² q^{2k})`.

use std::f64::consts::PI;

use num_complex::Complex64;
use twofloat::TwoFloat;

use crate::error::{domain, QoscError, Result};
use crate::qhermite::{sqrt_rho, ThetaPoint};
use crate::quadrature::graded_rule;
use crate::qseries::{qpoch_inf, qpoch_multi, qpoch_real, truncation_len, DEFAULT_TOL};

/// Threshold on `|1 − 2t cos A + t²|` below which a closed-form kernel is declared singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-12;

/// Selects one member of the Poisson-kernel family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub t: Complex64,
    pub q: f64,
    pub series_cutoff: usize,
    pub tol: f64,
}

impl KernelSpec {
    pub fn new(t: Complex64, q: f64) -> Result<Self> {
        let spec = Self {
            t,
            q,
            series_cutoff: 5000,
            tol: DEFAULT_TOL,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_series_cutoff(mut self, cutoff: usize) -> Self {
        self.series_cutoff = cutoff;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.q) {
            return domain(format!("q must lie in [0, 1), got {}", self.q));
        }
        if self.t.norm() > 1.0 + 1e-15 {
            return domain(format!("|t| must not exceed 1, got {}", self.t.norm()));
        }
        if !(self.tol > 0.0) {
            return domain("tolerance must be positive");
        }
        Ok(())
    }
}

/// Partial sum of `(q;q)_∞/(2π) ρ^{1/2}(x) ρ^{1/2}(y) Σ tⁿ H_n(x) H_n(y)/(q;q)_n`.
///
/// With `|H_n(cos θ | q)| ≤ (n+1)/(q;q)_∞` the tail from `n` on is at most
/// `|t|ⁿ (n+1)² · 8/((q;q)_∞³ (1−|t|)³)`. Summation stops once that falls below `tol`
/// times the partial sum, and runs in double-double arithmetic: near the interval ends
/// the terms exceed the sum by up to ten orders of magnitude.
pub fn poisson_series(spec: &KernelSpec, x: &ThetaPoint, y: &ThetaPoint) -> Result<Complex64> {
    spec.validate()?;
    let q = spec.q;
    let tn = spec.t.norm();
    if tn >= 1.0 {
        return domain(format!("series form needs |t| < 1, got |t| = {tn}"));
    }
    let qq = qpoch_real(q, q, spec.tol)?;
    let pref = qq / (2.0 * PI) * sqrt_rho(x, q, spec.tol) * sqrt_rho(y, q, spec.tol);
    if pref == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let majorant = 8.0 / (qq * qq * qq * (1.0 - tn).powi(3));
    let t = spec.t;
    let zero = TwoFloat::from(0.0);
    let one = TwoFloat::from(1.0);
    let (x2, y2) = (TwoFloat::from(2.0 * x.x()), TwoFloat::from(2.0 * y.x()));
    let (mut hx0, mut hx1) = (one, x2);
    let (mut hy0, mut hy1) = (one, y2);
    let (mut tr, mut ti) = (one, zero);
    let (mut sr, mut si) = (zero, zero);
    let mut qqn = one;
    let mut qk = TwoFloat::from(q);
    let mut tpow = 1.0;
    let mut bound = f64::INFINITY;
    for n in 0..spec.series_cutoff {
        let c = div_dd(hx0 * hy0, qqn);
        sr += tr * c;
        si += ti * c;
        (tr, ti) = (tr * t.re - ti * t.im, tr * t.im + ti * t.re);
        tpow *= tn;
        bound = tpow * ((n + 2) * (n + 2)) as f64 * majorant;
        if bound < spec.tol * sr.hi().hypot(si.hi()) || tpow == 0.0 {
            return Ok(Complex64::new(sr.hi() + sr.lo(), si.hi() + si.lo()) * pref);
        }
        // qk = q^{n+1}: H_{n+2} = 2x H_{n+1} − (1 − q^{n+1}) H_n
        let nx = x2 * hx1 - (one - qk) * hx0;
        let ny = y2 * hy1 - (one - qk) * hy0;
        (hx0, hx1) = (hx1, nx);
        (hy0, hy1) = (hy1, ny);
        qqn *= one - qk;
        qk *= q;
    }
    Err(QoscError::Numerical(format!(
        "series cutoff {} reached with relative tail bound {:e}",
        spec.series_cutoff,
        bound / sr.hi().hypot(si.hi())
    )))
}

/// `a/b` to double-double accuracy by two Newton corrections of the double quotient.
fn div_dd(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let r = 1.0 / b.hi();
    let mut x = a * r;
    for _ in 0..2 {
        x += (a - b * x) * r;
    }
    x
}

/// Precomputed closed form of `K_t`, cheap to evaluate at many point pairs.
#[derive(Debug, Clone)]
pub(crate) struct ClosedKernel {
    t: Complex64,
    t2: Complex64,
    q: f64,
    tol: f64,
    pref: Complex64,
    qpows: Vec<f64>,
}

impl ClosedKernel {
    pub(crate) fn new(t: Complex64, q: f64, tol: f64) -> Result<Self> {
        KernelSpec::new(t, q)?.with_tol(tol).validate()?;
        let qq = qpoch_real(q, q, tol)?;
        let t2 = t * t;
        let pref = qpoch_inf(t2, q, tol)? * qq / (2.0 * PI);
        // 1 − 2t qᵏ c + t² q^{2k} differs from 1 by at most 3|t| qᵏ
        let len = truncation_len(3.0 * t.norm(), q, tol).max(1);
        let mut qpows = Vec::with_capacity(len);
        let mut qk = 1.0;
        for _ in 0..len {
            qpows.push(qk);
            qk *= q;
        }
        Ok(Self {
            t,
            t2,
            q,
            tol,
            pref,
            qpows,
        })
    }

    /// `(1 − 2t c + t²)`, the factor that can vanish.
    pub(crate) fn leading_factor(&self, c: f64) -> Complex64 {
        Complex64::new(1.0, 0.0) - self.t * (2.0 * c) + self.t2
    }

    /// `∏_{k ≥ start} (1 − 2t qᵏ c + t² q^{2k})`.
    pub(crate) fn pair_product(&self, c: f64, start: usize) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let tc2 = self.t * (2.0 * c);
        self.qpows[start.min(self.qpows.len())..]
            .iter()
            .fold(one, |acc, &qk| acc * (one - tc2 * qk + self.t2 * (qk * qk)))
    }

    /// Kernel value given the two angles and the precomputed `ρ^{1/2}` at both points.
    pub(crate) fn eval_parts(&self, theta: f64, phi: f64, srx: f64, sry: f64) -> Result<Complex64> {
        let ca = (theta + phi).cos();
        let cb = (theta - phi).cos();
        for c in [ca, cb] {
            let f = self.leading_factor(c);
            if f.norm() < SINGULAR_THRESHOLD {
                return Err(QoscError::Singular {
                    location: format!("theta = {theta}, phi = {phi}"),
                    magnitude: f.norm(),
                });
            }
        }
        let den = self.pair_product(ca, 0) * self.pair_product(cb, 0);
        Ok(self.pref * (srx * sry) / den)
    }

    pub(crate) fn eval(&self, x: &ThetaPoint, y: &ThetaPoint) -> Result<Complex64> {
        let srx = sqrt_rho(x, self.q, self.tol);
        let sry = sqrt_rho(y, self.q, self.tol);
        self.eval_parts(x.theta(), y.theta(), srx, sry)
    }

    pub(crate) fn prefactor(&self) -> Complex64 {
        self.pref
    }
}

/// Rogers' closed form of the Poisson kernel.
pub fn poisson_closed(spec: &KernelSpec, x: &ThetaPoint, y: &ThetaPoint) -> Result<Complex64> {
    spec.validate()?;
    ClosedKernel::new(spec.t, spec.q, spec.tol)?.eval(x, y)
}

/// Which of the two singular lines `y = ±√(1 − x²)` a point pair sits on.
fn singular_line(y: &ThetaPoint) -> &'static str {
    if y.x() >= 0.0 {
        "y = +sqrt(1 - x^2)"
    } else {
        "y = -sqrt(1 - x^2)"
    }
}

/// The q-Fourier kernel `K_i(x, y; q)` written with the `(q²;q²)_∞` prefactor:
///
/// `(4/π)(q²;q²)_∞ [sin θ sin φ (q e^{±2iθ}, q e^{±2iφ}; q)_∞]^{1/2} / (i e^{±i(θ+φ)}, i e^{±i(θ−φ)}; q)_∞`.
///
/// `q = 0` is accepted and reproduces [`singular_part`].
pub fn qfourier_kernel(x: &ThetaPoint, y: &ThetaPoint, q: f64, tol: f64) -> Result<Complex64> {
    if !(0.0..1.0).contains(&q) {
        return domain(format!("q must lie in [0, 1), got {q}"));
    }
    let (th, ph) = (x.theta(), y.theta());
    for c in [(th + ph).cos(), (th - ph).cos()] {
        if c.abs() < SINGULAR_THRESHOLD {
            return Err(QoscError::Singular {
                location: format!("x = {}, y = {} on {}", x.x(), y.x(), singular_line(y)),
                magnitude: c.abs(),
            });
        }
    }
    let i = Complex64::i();
    let q2q2 = if q == 0.0 { 1.0 } else { qpoch_real(q * q, q * q, tol)? };
    let wx = Complex64::from_polar(q, 2.0 * th);
    let wy = Complex64::from_polar(q, 2.0 * ph);
    let weights = qpoch_multi(&[wx, wx.conj(), wy, wy.conj()], q, tol)?;
    let bracket = (x.sin_theta() * y.sin_theta() * weights.re).max(0.0);
    let a = Complex64::from_polar(1.0, th + ph);
    let b = Complex64::from_polar(1.0, th - ph);
    let den = qpoch_multi(&[i * a, i * a.conj(), i * b, i * b.conj()], q, tol)?;
    Ok(4.0 / PI * q2q2 * bracket.sqrt() / den)
}

/// `K_i(x, y; 0) = −(sin θ sin φ)^{1/2} / (π cos(θ+φ) cos(θ−φ))`, the singular part of `K_i`.
pub fn singular_part(x: &ThetaPoint, y: &ThetaPoint) -> Result<f64> {
    let (th, ph) = (x.theta(), y.theta());
    let ca = (th + ph).cos();
    let cb = (th - ph).cos();
    if ca.abs() < SINGULAR_THRESHOLD || cb.abs() < SINGULAR_THRESHOLD {
        return Err(QoscError::Singular {
            location: format!("x = {}, y = {} on {}", x.x(), y.x(), singular_line(y)),
            magnitude: ca.abs().min(cb.abs()),
        });
    }
    Ok(-(x.sin_theta() * y.sin_theta()).sqrt() / (PI * ca * cb))
}

/// The boundary function of the principal-value form of the transform,
///
/// `k(x) = x (x²(1−x²))^{−1/4} (∏_{k≥1} (1 + 4ix√(1−x²) qᵏ − q^{2k}) / (1 − 4ix√(1−x²) qᵏ − q^{2k}))^{1/2}`.
///
/// Numerator and denominator factors are complex conjugates, so the square root is
/// taken factor by factor as `u_k/|u_k|`; this branch is continuous in `x` and equals 1 at `q = 0`.
pub fn boundary_k(x: &ThetaPoint, q: f64, tol: f64) -> Result<Complex64> {
    let xv = x.x();
    let s = x.sin_theta();
    if xv == 0.0 || s == 0.0 {
        return domain(format!("k(x) is undefined at x = {xv}"));
    }
    if !(0.0..1.0).contains(&q) {
        return domain(format!("q must lie in [0, 1), got {q}"));
    }
    let lead = xv / (xv * xv * s * s).sqrt().sqrt();
    let g = 4.0 * xv * s;
    let len = truncation_len(3.0 * q, q, tol);
    let mut phase = Complex64::new(1.0, 0.0);
    let mut qk = q;
    for _ in 0..len {
        let u = Complex64::new(1.0 - qk * qk, g * qk);
        phase *= u / u.norm();
        qk *= q;
    }
    Ok(phase * lead)
}

/// A pole of `φ ↦ K_i(cos θ, cos φ; q)` on `(0, π)`.
#[derive(Debug, Clone, Copy)]
pub struct KernelPole {
    /// Angle `φ₀` of the pole.
    pub phi: f64,
    /// `y₀ = cos φ₀ = ±√(1 − x²)`.
    pub y: f64,
    /// Residue of the kernel in the variable `φ`: `K_i ≈ residue / (φ − φ₀)`.
    pub residue: Complex64,
    /// Sign of `d cos(·)/dφ` for the vanishing cosine; fixes the side the `K_{ir}` pole
    /// approaches from as `r → 1⁻`.
    pub slope_sign: f64,
}

/// Both poles of `K_i(x, ·)` together with their analytic residues.
///
/// Along `cos(θ+φ) = 0` the kernel is `K̃/(−2i cos(θ+φ))` with `K̃` regular, and similarly
/// along `cos(θ−φ) = 0`; the residue is `K̃(φ₀)/(−2i · d cos/dφ)`.
pub fn qfourier_poles(x: &ThetaPoint, q: f64, tol: f64) -> Result<[KernelPole; 2]> {
    if x.sin_theta() == 0.0 {
        return Err(QoscError::DegenerateGeometry {
            x: x.x(),
            reason: "the two poles coincide at y = 0".into(),
        });
    }
    let kernel = ClosedKernel::new(Complex64::i(), q, tol)?;
    let srx = sqrt_rho(x, q, tol);
    let geometry = pole_geometry(x.theta());
    let mut out = Vec::with_capacity(2);
    for pole in geometry {
        let y = ThetaPoint::from_theta(pole.phi.clamp(0.0, PI))?;
        let sry = sqrt_rho(&y, q, tol);
        out.push(KernelPole {
            phi: pole.phi,
            y: y.x(),
            residue: kernel.prefactor() * (srx * sry) * kernel.pole_factor(x.theta(), &pole),
            slope_sign: pole.slope,
        });
    }
    Ok([out[0], out[1]])
}

/// Where `cos(θ+φ)` or `cos(θ−φ)` vanishes for `φ ∈ [0, π]`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PoleGeometry {
    pub(crate) phi: f64,
    pub(crate) slope: f64,
    /// True when the vanishing cosine is `cos(θ+φ)`.
    pub(crate) sum_angle: bool,
}

pub(crate) fn pole_geometry(theta: f64) -> [PoleGeometry; 2] {
    let low = theta <= 0.5 * PI;
    // cos(θ+φ) = 0 at θ+φ = π/2 (slope −1) or 3π/2 (slope +1)
    let a = PoleGeometry {
        phi: if low { 0.5 * PI - theta } else { 1.5 * PI - theta },
        slope: if low { -1.0 } else { 1.0 },
        sum_angle: true,
    };
    // cos(θ−φ) = 0 at φ = θ + π/2 (slope −1) or θ − π/2 (slope +1)
    let b = PoleGeometry {
        phi: if low { theta + 0.5 * PI } else { theta - 0.5 * PI },
        slope: if low { -1.0 } else { 1.0 },
        sum_angle: false,
    };
    [a, b]
}

impl ClosedKernel {
    /// `1/(K̃ · (−2i) · slope)` where `K̃` is the denominator with its vanishing factor removed;
    /// multiplied by the prefactor and both `ρ^{1/2}` it gives the residue in `φ`.
    /// Meaningful for `t = i` only.
    pub(crate) fn pole_factor(&self, theta: f64, pole: &PoleGeometry) -> Complex64 {
        let ca = (theta + pole.phi).cos();
        let cb = (theta - pole.phi).cos();
        let regular = if pole.sum_angle {
            self.pair_product(ca, 1) * self.pair_product(cb, 0)
        } else {
            self.pair_product(cb, 1) * self.pair_product(ca, 0)
        };
        Complex64::new(1.0, 0.0) / (regular * Complex64::new(0.0, -2.0) * pole.slope)
    }
}

/// Nodes `y = cos φ` with weights for `dy`, graded toward the near-poles of each
/// `φ ↦ K_t(cos θ, cos φ)` in `sources`: real parts where `θ ± φ ≡ ± arg t`, depth `−ln|t|`.
pub fn kernel_nodes(sources: &[(f64, Complex64)], panel_order: usize) -> Result<Vec<(ThetaPoint, f64)>> {
    let mut centers = Vec::new();
    let mut width: f64 = 1.0;
    for &(theta, t) in sources {
        if !(t.norm() < 1.0) {
            return domain(format!("|t| must be below 1, got {}", t.norm()));
        }
        let a = t.arg();
        for base in [theta - a, theta + a, a - theta, -a - theta] {
            for shift in [-2.0 * PI, 0.0, 2.0 * PI] {
                let c = base + shift;
                if (0.0..=PI).contains(&c) {
                    centers.push(c);
                }
            }
        }
        width = width.min(-t.norm().ln());
    }
    graded_rule(0.0, PI, &centers, width, 0.25, panel_order)
        .into_iter()
        .map(|(phi, w)| Ok((ThetaPoint::from_theta(phi)?, w * phi.sin())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-15;

    fn pt(x: f64) -> ThetaPoint {
        ThetaPoint::from_x(x).unwrap()
    }

    fn th(t: f64) -> ThetaPoint {
        ThetaPoint::from_theta(t).unwrap()
    }

    #[test]
    fn series_trivial_cases() {
        let spec = KernelSpec::new(Complex64::new(0.0, 0.0), 0.5).unwrap();
        let (x, y) = (pt(0.3), pt(-0.2));
        let v = poisson_series(&spec, &x, &y).unwrap();
        let expect = qpoch_real(0.5, 0.5, TOL).unwrap() * sqrt_rho(&x, 0.5, TOL) * sqrt_rho(&y, 0.5, TOL)
            / (2.0 * PI);
        assert_relative_eq!(v.re, expect, max_relative = 1e-14);
        let spec = KernelSpec::new(Complex64::new(0.5, 0.0), 0.5).unwrap();
        assert_eq!(poisson_series(&spec, &pt(1.0), &y).unwrap(), Complex64::new(0.0, 0.0));
        let unit = KernelSpec::new(Complex64::i(), 0.5).unwrap();
        assert!(poisson_series(&unit, &x, &y).is_err());
        assert!(KernelSpec::new(Complex64::new(1.5, 0.0), 0.5).is_err());
    }

    #[test]
    fn series_matches_closed_form_at_reference_point() {
        let spec = KernelSpec::new(Complex64::new(0.5, 0.0), 0.5).unwrap();
        let (x, y) = (pt(0.3), pt(-0.2));
        let s = poisson_series(&spec, &x, &y).unwrap();
        let c = poisson_closed(&spec, &x, &y).unwrap();
        assert!((s - c).norm() < 1e-10 * c.norm());
    }

    #[test]
    fn closed_form_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let t: f64 = rng.gen_range(0.01..0.95);
            let q: f64 = rng.gen_range(0.05..0.9);
            let spec = KernelSpec::new(Complex64::new(t, 0.0), q).unwrap();
            let x = pt(rng.gen_range(-0.99..0.99));
            let y = pt(rng.gen_range(-0.99..0.99));
            let a = poisson_closed(&spec, &x, &y).unwrap();
            let b = poisson_closed(&spec, &y, &x).unwrap();
            assert_eq!(a, b);
            assert!(a.re > 0.0 && a.im.abs() < 1e-14 * a.re);
        }
    }

    #[test]
    fn unit_kernel_forms_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for &q in &[0.0, 0.2, 0.5, 0.8] {
            let kernel = ClosedKernel::new(Complex64::i(), q, TOL).unwrap();
            for _ in 0..50 {
                let x = th(rng.gen_range(0.01..3.13));
                let y = th(rng.gen_range(0.01..3.13));
                let a = qfourier_kernel(&x, &y, q, TOL).unwrap();
                let b = kernel.eval(&x, &y).unwrap();
                assert!((a - b).norm() < 1e-12 * a.norm(), "q={q}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn singular_part_values() {
        let p = th(PI / 3.0);
        let v = singular_part(&p, &p).unwrap();
        assert_relative_eq!(v, 3f64.sqrt() / PI, max_relative = 1e-14);
        assert_relative_eq!(v, 0.551_328_895_421_792, max_relative = 1e-12);
        assert_eq!(singular_part(&th(0.0), &th(1.0)).unwrap(), 0.0);
        let k0 = qfourier_kernel(&p, &p, 0.0, TOL).unwrap();
        assert_relative_eq!(k0.re, v, max_relative = 1e-14);
        assert!(k0.im.abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..50 {
            let (a, b) = (rng.gen_range(0.05..3.1), rng.gen_range(0.05..3.1));
            let s = singular_part(&th(a), &th(b)).unwrap();
            let r = singular_part(&th(PI - a), &th(PI - b)).unwrap();
            assert_relative_eq!(s, r, max_relative = 1e-9);
        }
    }

    #[test]
    fn singular_lines_are_reported() {
        let x = th(0.4);
        let y = th(0.5 * PI - 0.4);
        let e = qfourier_kernel(&x, &y, 0.5, TOL).unwrap_err();
        match e {
            QoscError::Singular { location, .. } => assert!(location.contains("+sqrt")),
            other => panic!("unexpected {other:?}"),
        }
        let y = th(0.5 * PI + 0.4);
        let e = qfourier_kernel(&x, &y, 0.5, TOL).unwrap_err();
        match e {
            QoscError::Singular { location, .. } => assert!(location.contains("-sqrt")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(singular_part(&x, &y).is_err());
    }

    #[test]
    fn kernel_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let r: f64 = rng.gen_range(0.05..0.99);
            let q: f64 = rng.gen_range(0.1..0.9);
            let (x, y) = (th(rng.gen_range(0.0..PI)), th(rng.gen_range(0.0..PI)));
            let kp = ClosedKernel::new(Complex64::new(0.0, r), q, TOL).unwrap().eval(&x, &y).unwrap();
            let km = ClosedKernel::new(Complex64::new(0.0, -r), q, TOL).unwrap().eval(&y, &x).unwrap();
            assert!((kp.conj() - km).norm() <= 4.0 * f64::EPSILON * kp.norm());
        }
    }

    #[test]
    fn boundary_k_properties() {
        assert!(boundary_k(&pt(0.0), 0.5, TOL).is_err());
        assert!(boundary_k(&pt(1.0), 0.5, TOL).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let x: f64 = rng.gen_range(-0.99..0.99);
            let p = pt(x);
            let k0 = boundary_k(&p, 0.0, TOL).unwrap();
            let plain = x / (x * x * (1.0 - x * x)).powf(0.25);
            assert_relative_eq!(k0.re, plain, max_relative = 1e-14);
            let k = boundary_k(&p, 0.5, TOL).unwrap();
            assert_relative_eq!(k.norm(), plain.abs(), max_relative = 1e-13);
            // x → −x conjugates every factor of the product and flips the leading sign
            let km = boundary_k(&pt(-x), 0.5, TOL).unwrap();
            assert!((km + k.conj()).norm() < 1e-13 * k.norm());
        }
    }

    #[test]
    fn pole_residues_match_kernel() {
        for &q in &[0.0, 0.3, 0.7] {
            for &theta in &[0.3, 1.1, 2.0, 2.9] {
                let x = th(theta);
                for pole in qfourier_poles(&x, q, TOL).unwrap() {
                    let h = 1e-6;
                    let kp = qfourier_kernel(&x, &th(pole.phi + h), q, TOL).unwrap() * h;
                    let km = qfourier_kernel(&x, &th(pole.phi - h), q, TOL).unwrap() * (-h);
                    let est = (kp + km) * 0.5;
                    assert!((est - pole.residue).norm() < 1e-8 * pole.residue.norm(), "q={q} θ={theta}");
                    assert_relative_eq!(pole.y.abs(), x.sin_theta(), max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn boundary_terms_match_pole_contributions() {
        // −iπ·sign·κ·sin φ₀ for the pole at y = ±√(1−x²) equals (i/2) k(±x)
        for &q in &[0.0, 0.2, 0.5, 0.8] {
            for &theta in &[0.2, 0.7, 1.3, 1.9, 2.6] {
                let x = th(theta);
                let k_plus = boundary_k(&x, q, TOL).unwrap();
                let k_minus = boundary_k(&th(PI - theta), q, TOL).unwrap();
                for pole in qfourier_poles(&x, q, TOL).unwrap() {
                    let sin_phi = pole.phi.sin();
                    let term = Complex64::new(0.0, -PI) * pole.slope_sign * pole.residue * sin_phi;
                    let k = if pole.y > 0.0 { k_plus } else { k_minus };
                    let boundary = Complex64::new(0.0, 0.5) * k;
                    assert!((term - boundary).norm() < 1e-12 * boundary.norm(), "q={q} θ={theta}: {term} vs {boundary}");
                }
            }
        }
    }
}
