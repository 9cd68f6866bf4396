//! Infinite q-Pochhammer products `(a;q)_∞ = ∏_{n≥0} (1 − a qⁿ)`.
//!
//! Every product is truncated at the first index `N` with `|a| q^N ≤ tol·(1 − q)`.
//! The neglected tail `∏_{n≥N}(1 − a qⁿ)` then differs from 1 by at most
//! `exp(|a| q^N / (1 − q)) − 1`, which is the bound reported by [`tail_bound`].

use num_complex::Complex64;

use crate::error::{domain, Result};

/// Default truncation tolerance for all products.
pub const DEFAULT_TOL: f64 = 1e-15;

/// The deformation parameter together with the scale constants of the oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QParam {
    q: f64,
    alpha2: f64,
    alpha: f64,
}

impl QParam {
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return domain(format!("q must lie in (0,1), got {q}"));
        }
        let alpha2 = ((1.0 - q) / 2.0).sqrt();
        Ok(Self {
            q,
            alpha2,
            alpha: alpha2.sqrt(),
        })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `α² = ((1 − q)/2)^{1/2}`, the coordinate scale of the classical limit.
    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }

    /// `α = ((1 − q)/2)^{1/4}`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

fn check_q(q: f64, tol: f64) -> Result<()> {
    if !(0.0..1.0).contains(&q) {
        return domain(format!("product does not converge for q = {q}"));
    }
    if !(tol > 0.0) {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    Ok(())
}

/// Number of factors kept for `(a;q)_∞` with `|a| = a_abs`.
pub fn truncation_len(a_abs: f64, q: f64, tol: f64) -> usize {
    let threshold = tol * (1.0 - q);
    if a_abs <= threshold {
        return 0;
    }
    if q == 0.0 {
        return 1;
    }
    // smallest N with a_abs q^N <= threshold, guarded against rounding in the log
    let mut n = ((threshold / a_abs).ln() / q.ln()).ceil().max(0.0) as usize;
    while n > 0 && a_abs * q.powi(n as i32 - 1) <= threshold {
        n -= 1;
    }
    while a_abs * q.powi(n as i32) > threshold {
        n += 1;
    }
    n
}

/// Multiplicative tail bound `exp(|a| q^N/(1−q)) − 1` for a product truncated after `n` factors.
pub fn tail_bound(a_abs: f64, q: f64, n: usize) -> f64 {
    (a_abs * q.powi(n as i32) / (1.0 - q)).exp_m1()
}

/// `(a;q)_∞`, truncated as described in the module docs.
pub fn qpoch_inf(a: Complex64, q: f64, tol: f64) -> Result<Complex64> {
    check_q(q, tol)?;
    Ok(qpoch_truncated(a, q, truncation_len(a.norm(), q, tol)))
}

/// `(a_1, …, a_k; q)_∞ = ∏_j (a_j; q)_∞`.
pub fn qpoch_multi(args: &[Complex64], q: f64, tol: f64) -> Result<Complex64> {
    check_q(q, tol)?;
    Ok(args
        .iter()
        .map(|&a| qpoch_truncated(a, q, truncation_len(a.norm(), q, tol)))
        .product())
}

/// `∏_{n<len} (1 − a qⁿ)`.
pub fn qpoch_truncated(a: Complex64, q: f64, len: usize) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    let mut aqn = a;
    for _ in 0..len {
        acc *= Complex64::new(1.0, 0.0) - aqn;
        aqn *= q;
    }
    acc
}

/// Real-argument `(a;q)_∞` for `a ∈ [−1, 1]`; avoids complex arithmetic in normalisations.
pub fn qpoch_real(a: f64, q: f64, tol: f64) -> Result<f64> {
    check_q(q, tol)?;
    let len = truncation_len(a.abs(), q, tol);
    let mut acc = 1.0;
    let mut aqn = a;
    for _ in 0..len {
        acc *= 1.0 - aqn;
        aqn *= q;
    }
    Ok(acc)
}
