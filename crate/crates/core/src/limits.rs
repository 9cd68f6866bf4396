//! Classical reference objects for `q → 1⁻`: Hermite functions `Ψ_n`, the Mehler kernel,
//! and studies of how the q-objects approach them under `x = α² ξ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, QoscError, Result};
use crate::kernels::{poisson_closed, KernelSpec};
use crate::qhermite::{wavefunction, ThetaPoint};
use crate::qseries::{QParam, DEFAULT_TOL};
use crate::report::VerificationReport;

pub const DEFAULT_Q_SEQUENCE: [f64; 3] = [0.5, 0.9, 0.99];

/// `Ψ_n(ξ) = (2ⁿ n! √π)^{−1/2} H_n(ξ) e^{−ξ²/2}`.
pub fn hermite_classical(n: usize, xi: f64) -> f64 {
    hermite_classical_all(n + 1, xi)[n]
}

/// `[Ψ_0(ξ), …, Ψ_{len−1}(ξ)]` from `Ψ_{n+1} = ξ √(2/(n+1)) Ψ_n − √(n/(n+1)) Ψ_{n−1}`.
pub fn hermite_classical_all(len: usize, xi: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return out;
    }
    out.push(PI.powf(-0.25) * (-0.5 * xi * xi).exp());
    if len > 1 {
        out.push(2f64.sqrt() * xi * out[0]);
    }
    for n in 1..len.saturating_sub(1) {
        let k = n as f64;
        let next = xi * (2.0 / (k + 1.0)).sqrt() * out[n] - (k / (k + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

/// Mehler's closed form `[π(1−t²)]^{−1/2} exp[(4ξηt − (ξ²+η²)(1+t²)) / (2(1−t²))]`.
pub fn mehler_kernel(xi: f64, eta: f64, t: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let d = one - t * t;
    if d.norm() < 1e-14 {
        return domain(format!("Mehler kernel is singular at t = {t}"));
    }
    let expo = (t * (4.0 * xi * eta) - (one + t * t) * (xi * xi + eta * eta)) / (d * 2.0);
    Ok(expo.exp() / (d * PI).sqrt())
}

/// `Σ_{n<terms} tⁿ Ψ_n(ξ) Ψ_n(η)`.
pub fn mehler_series(xi: f64, eta: f64, t: Complex64, terms: usize) -> Complex64 {
    let a = hermite_classical_all(terms, xi);
    let b = hermite_classical_all(terms, eta);
    let mut tn = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for (u, v) in a.iter().zip(&b) {
        sum += tn * (u * v);
        tn *= t;
    }
    sum
}

/// Errors of a q-quantity against its classical limit along a sequence of `q`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitStudy {
    pub quantity: String,
    pub q_sequence: Vec<f64>,
    pub errors: Vec<f64>,
}

impl LimitStudy {
    pub fn is_strictly_decreasing(&self) -> bool {
        self.errors.windows(2).all(|w| w[1] < w[0])
    }

    /// Largest ratio of consecutive errors; below 1 exactly when the errors decrease.
    pub fn worst_ratio(&self) -> f64 {
        self.errors
            .windows(2)
            .map(|w| w[1] / w[0])
            .fold(0.0, |a: f64, r| if r.is_nan() { f64::NAN } else { a.max(r) })
    }

    pub fn to_report(&self) -> VerificationReport {
        let mut report = VerificationReport::new(format!("limit_{}", self.quantity), self.worst_ratio(), 1.0);
        for (q, e) in self.q_sequence.iter().zip(&self.errors) {
            report = report.with_param(format!("error_q{q}"), format!("{e:e}"));
        }
        report
    }
}

fn check_sequence(q_sequence: &[f64]) -> Result<Vec<QParam>> {
    if q_sequence.is_empty() {
        return domain("empty q sequence");
    }
    if q_sequence.windows(2).any(|w| w[1] <= w[0]) {
        return domain("q sequence must increase");
    }
    q_sequence.iter().map(|&q| QParam::new(q)).collect()
}

fn scaled_point(qp: &QParam, xi: f64) -> Result<ThetaPoint> {
    let x = qp.alpha2() * xi;
    if !(-1.0..=1.0).contains(&x) {
        return domain(format!("α² ξ = {x} leaves [−1, 1] at q = {}", qp.q()));
    }
    ThetaPoint::from_x(x)
}

/// `|α² K_t(α²ξ, α²η; q) − K_t(ξ, η)|` along `q_sequence`.
pub fn classical_limit_study(t: Complex64, xi: f64, eta: f64, q_sequence: &[f64]) -> Result<LimitStudy> {
    if t.norm() > 1.0 + 1e-15 {
        return domain(format!("|t| must not exceed 1, got {}", t.norm()));
    }
    let target = mehler_kernel(xi, eta, t)?;
    let params = check_sequence(q_sequence)?;
    let errors = params
        .iter()
        .map(|qp| {
            let (x, y) = (scaled_point(qp, xi)?, scaled_point(qp, eta)?);
            let k = poisson_closed(&KernelSpec::new(t, qp.q())?, &x, &y)?;
            finite((k * qp.alpha2() - target).norm(), qp.q())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(LimitStudy {
        quantity: format!("kernel_t{t}_xi{xi}_eta{eta}"),
        q_sequence: q_sequence.to_vec(),
        errors,
    })
}

/// `ψ_n(α² ξ)`, which has unit `L²(dξ)` norm because `∫ψ_n² dx = α²`.
pub fn scaled_wavefunction(n: usize, xi: f64, q: f64) -> Result<f64> {
    let qp = QParam::new(q)?;
    finite(wavefunction(n, &scaled_point(&qp, xi)?, q, DEFAULT_TOL)?, q)
}

// (−q;q)_∞ and (q;q)_∞ leave the double range once 1/(1 − q) passes about 800
fn finite(v: f64, q: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(QoscError::Numerical(format!("products overflow at q = {q}")))
    }
}

/// `max_{|ξ| ≤ window} |ψ_n(α²ξ) − Ψ_n(ξ)|` on `points` equispaced abscissae, along `q_sequence`.
pub fn wavefunction_limit_study(n: usize, window: f64, points: usize, q_sequence: &[f64]) -> Result<LimitStudy> {
    if points < 2 || !(window > 0.0) {
        return domain("need a positive window and at least two points");
    }
    let params = check_sequence(q_sequence)?;
    let grid: Vec<f64> = (0..points)
        .map(|k| -window + 2.0 * window * k as f64 / (points - 1) as f64)
        .collect();
    let errors = params
        .iter()
        .map(|qp| {
            grid.iter().try_fold(0.0f64, |m, &xi| {
                let v = scaled_wavefunction(n, xi, qp.q())?;
                Ok(m.max((v - hermite_classical(n, xi)).abs()))
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(LimitStudy {
        quantity: format!("wavefunction_n{n}"),
        q_sequence: q_sequence.to_vec(),
        errors,
    })
}

/// `ψ_0(0)/Ψ_0(0)` along `q_sequence`: the pointwise normalization of the wave-function limit.
pub fn ground_state_ratio(q_sequence: &[f64]) -> Result<Vec<f64>> {
    q_sequence
        .iter()
        .map(|&q| Ok(scaled_wavefunction(0, 0.0, q)? / hermite_classical(0, 0.0)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hermite_function_values() {
        assert_relative_eq!(hermite_classical(0, 0.0), 0.7511255444649425, max_relative = 1e-15);
        assert_eq!(hermite_classical(1, 0.0), 0.0);
        // Ψ_3 from the explicit polynomial H_3 = 8ξ³ − 12ξ
        let xi: f64 = 0.7;
        let explicit = (8.0 * xi.powi(3) - 12.0 * xi) * (-0.5 * xi * xi).exp() / (48.0 * PI.sqrt()).sqrt();
        assert_relative_eq!(hermite_classical(3, xi), explicit, max_relative = 1e-14);
        assert!(hermite_classical_all(0, 1.0).is_empty());
        assert_eq!(hermite_classical_all(1, 0.0).len(), 1);
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        let nodes = crate::quadrature::gauss_legendre(200).unwrap();
        let window = 12.0;
        let mut gram = [[0.0; 6]; 6];
        for &(s, w) in nodes.iter() {
            let v = hermite_classical_all(6, window * s);
            for n in 0..6 {
                for m in 0..6 {
                    gram[n][m] += w * window * v[n] * v[m];
                }
            }
        }
        for (n, row) in gram.iter().enumerate() {
            for (m, g) in row.iter().enumerate() {
                let expect = if n == m { 1.0 } else { 0.0 };
                assert!((g - expect).abs() < 1e-12, "{n},{m}: {g}");
            }
        }
    }

    #[test]
    fn mehler_special_values() {
        let (xi, eta) = (0.4, -1.1);
        let k0 = mehler_kernel(xi, eta, Complex64::new(0.0, 0.0)).unwrap();
        assert_relative_eq!(k0.re, hermite_classical(0, xi) * hermite_classical(0, eta), max_relative = 1e-14);
        let ki = mehler_kernel(xi, eta, Complex64::i()).unwrap();
        let expect = Complex64::new(0.0, xi * eta).exp() / (2.0 * PI).sqrt();
        assert!((ki - expect).norm() < 1e-15);
        for t in [1.0, -1.0] {
            assert!(mehler_kernel(xi, eta, Complex64::new(t, 0.0)).is_err());
        }
    }

    #[test]
    fn mehler_series_matches_closed_form() {
        let t = Complex64::new(0.5, 0.0);
        let s = mehler_series(0.3, -0.7, t, 41);
        let c = mehler_kernel(0.3, -0.7, t).unwrap();
        assert!((s - c).norm() < 1e-10);
    }

    #[test]
    fn limit_study_rejects_bad_input() {
        let t = Complex64::new(0.5, 0.0);
        assert!(classical_limit_study(t, 2.5, 0.0, &[0.5]).is_err());
        assert!(classical_limit_study(t, 0.0, 0.0, &[0.9, 0.5]).is_err());
        assert!(classical_limit_study(t, 0.0, 0.0, &[]).is_err());
        assert!(classical_limit_study(Complex64::new(1.0, 0.0), 0.0, 0.0, &[0.5]).is_err());
    }

    #[test]
    fn ground_state_normalization_tends_to_one() {
        let ratios = ground_state_ratio(&[0.5, 0.9, 0.99]).unwrap();
        let dev: Vec<f64> = ratios.iter().map(|r| (r - 1.0).abs()).collect();
        assert!(dev.windows(2).all(|w| w[1] < w[0]) && dev[2] < 1e-3, "{ratios:?}");
        assert!(matches!(scaled_wavefunction(0, 0.0, 0.9995), Err(QoscError::Numerical(_))));
    }

    #[test]
    fn study_report_passes_on_decrease() {
        let s = LimitStudy {
            quantity: "x".into(),
            q_sequence: vec![0.5, 0.9],
            errors: vec![1e-2, 1e-3],
        };
        assert!(s.is_strictly_decreasing() && s.to_report().passed());
        let flat = LimitStudy { errors: vec![1e-3, 1e-3], ..s };
        assert!(!flat.is_strictly_decreasing() && !flat.to_report().passed());
    }
}
