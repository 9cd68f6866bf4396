//! Continuous q-Hermite polynomials, their weight and the normalised wave functions
//! `ψ_n(x) = α d_n^{-1} ρ^{1/2}(x) H_n(x|q)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::qseries::{qpoch_multi, qpoch_real, truncation_len, QParam};

/// A point of `[−1, 1]` carried together with its angle `θ = arccos x`.
///
/// Both coordinates are stored so that `sin θ` near `x = ±1` never has to be
/// recovered from `1 − x²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaPoint {
    theta: f64,
    x: f64,
    sin_theta: f64,
}

impl ThetaPoint {
    pub fn from_theta(theta: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return domain(format!("theta must lie in [0, π], got {theta}"));
        }
        Ok(Self {
            theta,
            x: theta.cos(),
            sin_theta: theta.sin(),
        })
    }

    pub fn from_x(x: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&x) {
            return domain(format!("x must lie in [−1, 1], got {x}"));
        }
        let theta = x.acos();
        Ok(Self {
            theta,
            x,
            sin_theta: ((1.0 - x) * (1.0 + x)).sqrt(),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    /// `sin θ = √(1 − x²)`.
    pub fn sin_theta(&self) -> f64 {
        self.sin_theta
    }
}

/// `H_n(x|q)` by the upward three-term recurrence.
pub fn hermite_q(n: usize, x: f64, q: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    let mut qk = q;
    for _ in 1..n {
        let next = 2.0 * x * cur - (1.0 - qk) * prev;
        prev = cur;
        cur = next;
        qk *= q;
    }
    cur
}

/// `[H_0, …, H_{len−1}]` at one point.
pub fn hermite_q_all(len: usize, x: f64, q: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return out;
    }
    out.push(1.0);
    if len == 1 {
        return out;
    }
    out.push(2.0 * x);
    let mut qk = q;
    for k in 1..len - 1 {
        out.push(2.0 * x * out[k] - (1.0 - qk) * out[k - 1]);
        qk *= q;
    }
    out
}

/// The orthogonality weight `ρ(x) = 4 sin θ (q e^{2iθ}, q e^{−2iθ}; q)_∞`.
pub fn weight_rho(p: &ThetaPoint, q: f64, tol: f64) -> Result<f64> {
    let e2 = Complex64::from_polar(q, 2.0 * p.theta());
    let prod = qpoch_multi(&[e2, e2.conj()], q, tol)?;
    // the two factors are complex conjugates, so the product is real and nonnegative
    Ok(4.0 * p.sin_theta() * prod.re.max(0.0))
}

/// `ρ(x)` through the real product `4√(1−x²) ∏_{j≥1} [1 − 2(2x² − 1) q^j + q^{2j}]`.
pub fn weight_rho_real_product(p: &ThetaPoint, q: f64, tol: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&q) {
        return domain(format!("q must lie in [0,1), got {q}"));
    }
    let c2 = 2.0 * p.x() * p.x() - 1.0;
    let len = truncation_len(3.0 * q, q, tol);
    let mut acc = 1.0;
    let mut qj = q;
    for _ in 0..len {
        acc *= 1.0 - 2.0 * c2 * qj + qj * qj;
        qj *= q;
    }
    Ok(4.0 * p.sin_theta() * acc)
}

/// `ρ^{1/2}(x)` from the real product, the nonnegative root.
pub(crate) fn sqrt_rho(p: &ThetaPoint, q: f64, tol: f64) -> f64 {
    let c2 = (2.0 * p.theta()).cos();
    let len = truncation_len(3.0 * q, q, tol);
    let mut acc = 1.0;
    let mut qj = q;
    for _ in 0..len {
        acc *= 1.0 - 2.0 * c2 * qj + qj * qj;
        qj *= q;
    }
    2.0 * (p.sin_theta() * acc).sqrt()
}

/// `d_n = [2π / (q^{n+1}; q)_∞]^{1/2}`.
pub fn norm_dn(n: usize, q: f64, tol: f64) -> Result<f64> {
    let tail = qpoch_real(q.powi(n as i32 + 1), q, tol)?;
    Ok((2.0 * PI / tail).sqrt())
}

/// `[d_0^{-1}, …, d_{len−1}^{-1}]`, built from `(q^{n+1};q)_∞ = (q;q)_∞ / (q;q)_n`.
pub(crate) fn inv_norms(len: usize, q: f64, tol: f64) -> Result<Vec<f64>> {
    let mut tail = qpoch_real(q, q, tol)?;
    let mut qn1 = q;
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((tail / (2.0 * PI)).sqrt());
        // (q^{n+1};q)_∞ -> (q^{n+2};q)_∞
        tail /= 1.0 - qn1;
        qn1 *= q;
    }
    Ok(out)
}

/// `e_n = (1 − qⁿ)/(1 − q)`.
pub fn e_n(n: usize, q: f64) -> f64 {
    (1.0 - q.powi(n as i32)) / (1.0 - q)
}

/// `ẽ_n = (1 − q^{−n})/(1 − q^{−1}) = q^{1−n} e_n`.
pub fn e_tilde(n: usize, q: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    q.powi(1 - n as i32) * e_n(n, q)
}

/// `ψ_n(x)`.
pub fn wavefunction(n: usize, p: &ThetaPoint, q: f64, tol: f64) -> Result<f64> {
    let qp = QParam::new(q)?;
    let dn = norm_dn(n, q, tol)?;
    Ok(qp.alpha() / dn * sqrt_rho(p, q, tol) * hermite_q(n, p.x(), q))
}

/// `[ψ_0(x), …, ψ_{len−1}(x)]` at a single point.
pub fn wavefunctions(len: usize, p: &ThetaPoint, q: f64, tol: f64) -> Result<Vec<f64>> {
    let qp = QParam::new(q)?;
    let inv = inv_norms(len, q, tol)?;
    let pref = qp.alpha() * sqrt_rho(p, q, tol);
    Ok(hermite_q_all(len, p.x(), q)
        .into_iter()
        .zip(inv)
        .map(|(h, di)| pref * di * h)
        .collect())
}

/// Precomputed constants for repeated wave-function evaluation at fixed `q`.
#[derive(Debug, Clone)]
pub struct WaveBasis {
    q: f64,
    tol: f64,
    alpha: f64,
    inv_norms: Vec<f64>,
}

impl WaveBasis {
    pub fn new(len: usize, q: f64, tol: f64) -> Result<Self> {
        let qp = QParam::new(q)?;
        Ok(Self {
            q,
            tol,
            alpha: qp.alpha(),
            inv_norms: inv_norms(len, q, tol)?,
        })
    }

    pub fn len(&self) -> usize {
        self.inv_norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_norms.is_empty()
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// All basis functions at `p`, written into `out` (resized to `len`).
    pub fn eval_into(&self, p: &ThetaPoint, out: &mut Vec<f64>) {
        let len = self.len();
        out.clear();
        if len == 0 {
            return;
        }
        let pref = self.alpha * sqrt_rho(p, self.q, self.tol);
        let x = p.x();
        let (mut h0, mut h1) = (1.0, 2.0 * x);
        out.push(pref * self.inv_norms[0] * h0);
        let mut qk = self.q;
        for n in 1..len {
            out.push(pref * self.inv_norms[n] * h1);
            let h2 = 2.0 * x * h1 - (1.0 - qk) * h0;
            h0 = h1;
            h1 = h2;
            qk *= self.q;
        }
    }

    pub fn eval(&self, p: &ThetaPoint) -> Vec<f64> {
        let mut out = Vec::new();
        self.eval_into(p, &mut out);
        out
    }
}
