//! Integration over `[−1, 1]` carried out in the angle `θ = arccos x`.
//!
//! `∫_{−1}^{1} f(x) dx = ∫_0^π f(cos θ) sin θ dθ`; the oscillator weight has a
//! `√(1 − x²)` factor at the endpoints which becomes smooth in `θ`, so Gauss–Legendre
//! in `θ` converges spectrally for every integrand met in this crate.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

use crate::error::{domain, QoscError, Result};
use crate::qhermite::ThetaPoint;

/// Gauss–Legendre nodes and weights on `[−1, 1]`, ascending, cached per order.
pub(crate) fn legendre(order: usize) -> Arc<Vec<(f64, f64)>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(order)
        .or_insert_with(|| {
            let n = NonZeroUsize::new(order).expect("order >= 1");
            let mut pairs = GaussLegendre::new(n).as_node_weight_pairs().to_vec();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            Arc::new(pairs)
        })
        .clone()
}

/// Gauss–Legendre nodes and weights in `x ∈ [−1, 1]`, ascending.
pub fn gauss_legendre(order: usize) -> Result<Arc<Vec<(f64, f64)>>> {
    if order == 0 {
        return domain("quadrature order must be at least 1");
    }
    Ok(legendre(order))
}

/// Gauss–Legendre rule in `θ ∈ [0, π]`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    nodes: Vec<ThetaPoint>,
    theta_weights: Vec<f64>,
    weights: Vec<f64>,
    bary: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[ThetaPoint] {
        &self.nodes
    }

    /// Weights in `θ`; they sum to `π`.
    pub fn theta_weights(&self) -> &[f64] {
        &self.theta_weights
    }

    /// Weights for `dx`, i.e. `w_θ sin θ`; they sum to 2 up to quadrature error.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫_{−1}^{1} f(x) dx`.
    pub fn integrate_fn<F>(&self, mut f: F) -> Complex64
    where
        F: FnMut(&ThetaPoint) -> Complex64,
    {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| f(p) * *w)
            .sum()
    }

    /// Barycentric weights of the nodes, in the Legendre variable.
    pub(crate) fn bary(&self) -> &[f64] {
        &self.bary
    }

    /// Structural equality: same order means same nodes.
    pub fn same_as(&self, other: &QuadratureRule) -> bool {
        self.order() == other.order()
    }
}

/// Gauss–Legendre nodes in `θ ∈ [0, π]`, stored in increasing `θ` (decreasing `x`).
pub fn gauss_theta_rule(order: usize) -> Result<Arc<QuadratureRule>> {
    if order == 0 {
        return domain("quadrature order must be at least 1");
    }
    let base = legendre(order);
    let mut nodes = Vec::with_capacity(order);
    let mut theta_weights = Vec::with_capacity(order);
    let mut weights = Vec::with_capacity(order);
    let mut bary = Vec::with_capacity(order);
    for (j, &(t, w)) in base.iter().enumerate() {
        let theta = 0.5 * PI * (t + 1.0);
        let p = ThetaPoint::from_theta(theta)?;
        let wt = 0.5 * PI * w;
        nodes.push(p);
        theta_weights.push(wt);
        weights.push(wt * p.sin_theta());
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        bary.push(sign * ((1.0 - t * t) * w).sqrt());
    }
    Ok(Arc::new(QuadratureRule {
        nodes,
        theta_weights,
        weights,
        bary,
    }))
}

/// Complex samples of a function at the nodes of a rule.
///
/// `envelope` is the exponent `β` of the `sin^β θ` factor the function carries at
/// the endpoints. Interpolation divides it out first, so that the remaining factor
/// is smooth in `θ`. Oscillator wave functions and their combinations have `β = 1/2`.
#[derive(Debug, Clone)]
pub struct GridFunction {
    rule: Arc<QuadratureRule>,
    values: Vec<Complex64>,
    envelope: f64,
}

pub const DEFAULT_ENVELOPE: f64 = 0.5;

impl GridFunction {
    pub fn new(rule: Arc<QuadratureRule>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != rule.order() {
            return domain(format!(
                "grid function has {} values for a rule of order {}",
                values.len(),
                rule.order()
            ));
        }
        Ok(Self {
            rule,
            values,
            envelope: DEFAULT_ENVELOPE,
        })
    }

    pub fn from_fn<F>(rule: &Arc<QuadratureRule>, mut f: F) -> Self
    where
        F: FnMut(&ThetaPoint) -> Complex64,
    {
        let values = rule.nodes().iter().map(&mut f).collect();
        Self {
            rule: rule.clone(),
            values,
            envelope: DEFAULT_ENVELOPE,
        }
    }

    pub fn zeros(rule: &Arc<QuadratureRule>) -> Self {
        Self::from_fn(rule, |_| Complex64::new(0.0, 0.0))
    }

    pub fn with_envelope(mut self, envelope: f64) -> Self {
        self.envelope = envelope;
        self
    }

    pub fn rule(&self) -> &Arc<QuadratureRule> {
        &self.rule
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn envelope(&self) -> f64 {
        self.envelope
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn check_same_rule(&self, other: &GridFunction) -> Result<()> {
        if !self.rule.same_as(&other.rule) {
            return domain("grid functions live on different rules; resample first");
        }
        Ok(())
    }

    pub fn map<F: FnMut(Complex64) -> Complex64>(&self, f: F) -> Self {
        Self {
            rule: self.rule.clone(),
            values: self.values.iter().copied().map(f).collect(),
            envelope: self.envelope,
        }
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|v| v * s)
    }

    /// `a·self + b·other`.
    pub fn axpby(&self, a: Complex64, other: &GridFunction, b: Complex64) -> Result<Self> {
        self.check_same_rule(other)?;
        Ok(Self {
            rule: self.rule.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(u, v)| a * u + b * v)
                .collect(),
            envelope: self.envelope.min(other.envelope),
        })
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.axpby(Complex64::new(1.0, 0.0), other, Complex64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.axpby(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    /// Pointwise product; envelopes add.
    pub fn mul(&self, other: &GridFunction) -> Result<Self> {
        self.check_same_rule(other)?;
        Ok(Self {
            rule: self.rule.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(u, v)| u * v)
                .collect(),
            envelope: self.envelope + other.envelope,
        })
    }

    /// `∫ conj(self) · other dx`.
    pub fn inner(&self, other: &GridFunction) -> Result<Complex64> {
        self.check_same_rule(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .zip(self.rule.weights())
            .map(|((u, v), w)| u.conj() * v * *w)
            .sum())
    }

    /// `‖f‖ = (∫ |f|² dx)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_masked(None)
    }

    /// L² norm restricted to nodes where `mask` is false (masked nodes are skipped).
    pub fn l2_norm_masked(&self, mask: Option<&[bool]>) -> f64 {
        self.values
            .iter()
            .zip(self.rule.weights())
            .enumerate()
            .filter(|(j, _)| mask.is_none_or(|m| !m[*j]))
            .map(|(_, (v, w))| v.norm_sqr() * w)
            .sum::<f64>()
            .sqrt()
    }

    pub fn l2_distance(&self, other: &GridFunction) -> Result<f64> {
        Ok(self.sub(other)?.l2_norm())
    }

    pub fn l2_distance_masked(&self, other: &GridFunction, mask: Option<&[bool]>) -> Result<f64> {
        Ok(self.sub(other)?.l2_norm_masked(mask))
    }

    pub fn interpolant(&self) -> Interpolant {
        let nodes = self.rule.nodes();
        let scaled = self
            .values
            .iter()
            .zip(nodes)
            .map(|(v, p)| v / p.sin_theta().powf(self.envelope))
            .collect();
        Interpolant {
            rule: self.rule.clone(),
            scaled,
            envelope: self.envelope,
        }
    }

    /// Value at an arbitrary angle by barycentric interpolation in `θ`.
    pub fn eval_at(&self, theta: f64) -> Complex64 {
        self.interpolant().eval(theta)
    }

    /// Samples on another rule.
    pub fn resample(&self, rule: &Arc<QuadratureRule>) -> Self {
        if rule.same_as(&self.rule) {
            return self.clone();
        }
        let interp = self.interpolant();
        Self::from_fn(rule, |p| interp.eval(p.theta())).with_envelope(self.envelope)
    }
}

/// `∫_{−1}^{1} f(x) dx` for sampled `f`.
pub fn integrate(f: &GridFunction) -> Complex64 {
    f.values
        .iter()
        .zip(f.rule.weights())
        .map(|(v, w)| v * *w)
        .sum()
}

/// Barycentric Lagrange interpolant over the nodes of a θ-rule.
#[derive(Debug, Clone)]
pub struct Interpolant {
    rule: Arc<QuadratureRule>,
    scaled: Vec<Complex64>,
    envelope: f64,
}

impl Interpolant {
    pub fn eval(&self, theta: f64) -> Complex64 {
        let nodes = self.rule.nodes();
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        for ((p, w), g) in nodes.iter().zip(&self.rule.bary).zip(&self.scaled) {
            let d = theta - p.theta();
            if d == 0.0 {
                return g * p.sin_theta().powf(self.envelope);
            }
            let c = w / d;
            num += g * c;
            den += c;
        }
        num / den * theta.sin().max(0.0).powf(self.envelope)
    }
}

/// Composite Gauss–Legendre nodes on `[a, b]`, graded geometrically toward `centers`.
///
/// Panels adjacent to a center have length `width/2`, doubling outward; no panel is
/// longer than `max_panel`. Suited to integrands with near-poles at `center ± i·width`.
pub fn graded_rule(
    a: f64,
    b: f64,
    centers: &[f64],
    width: f64,
    max_panel: f64,
    panel_order: usize,
) -> Vec<(f64, f64)> {
    let mut breaks = vec![a, b];
    for &c in centers {
        if c < a || c > b {
            continue;
        }
        breaks.push(c);
        let mut d = 0.5 * width;
        while d < b - a {
            for p in [c - d, c + d] {
                if p > a && p < b {
                    breaks.push(p);
                }
            }
            d *= 2.0;
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * (b - a));
    let base = legendre(panel_order);
    let mut out = Vec::with_capacity(breaks.len() * panel_order * 2);
    for win in breaks.windows(2) {
        let (lo, hi) = (win[0], win[1]);
        let pieces = ((hi - lo) / max_panel).ceil().max(1.0) as usize;
        let step = (hi - lo) / pieces as f64;
        for k in 0..pieces {
            let l = lo + k as f64 * step;
            let half = 0.5 * step;
            let mid = l + half;
            out.extend(base.iter().map(|&(t, w)| (mid + half * t, half * w)));
        }
    }
    out
}

/// `Σ_j w_j (F_j − Σ_k R_k/(s_j − s_k)) + Σ_k R_k ln|(b − s_k)/(a − s_k)|`:
/// principal value over `[a, b]` of samples `F_j` having simple poles `(s_k, R_k)`.
pub(crate) fn subtracted_pv_sum(
    nodes: &[f64],
    weights: &[f64],
    values: &[Complex64],
    poles: &[(f64, Complex64)],
    a: f64,
    b: f64,
) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for ((&s, &w), &f) in nodes.iter().zip(weights).zip(values) {
        let mut g = f;
        for &(sk, rk) in poles {
            g -= rk / (s - sk);
        }
        sum += g * w;
    }
    for &(sk, rk) in poles {
        sum += rk * ((b - sk) / (a - sk)).abs().ln();
    }
    sum
}

/// Cauchy principal value `Pv ∫_{−1}^{1} f(y) dy` for `f` with simple poles at `poles`.
///
/// Residues are estimated by Richardson extrapolation of the symmetric difference
/// `h (f(y₀ + h) − f(y₀ − h))/2`.
pub fn principal_value<F>(f: F, poles: &[f64], order: usize) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let mut located = Vec::with_capacity(poles.len());
    for &y0 in poles {
        located.push((y0, estimate_residue(&f, y0)?));
    }
    principal_value_with_residues(f, &located, order)
}

/// As [`principal_value`], with the residues supplied by the caller.
pub fn principal_value_with_residues<F>(
    f: F,
    poles: &[(f64, Complex64)],
    order: usize,
) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if order == 0 {
        return domain("quadrature order must be at least 1");
    }
    for &(y0, _) in poles {
        if !(y0 > -1.0 && y0 < 1.0) {
            return domain(format!("pole {y0} is not strictly inside (−1, 1)"));
        }
    }
    // keep nodes away from the poles so the subtraction never divides by zero
    let mut order = order;
    let base = loop {
        let base = legendre(order);
        let clash = base
            .iter()
            .any(|&(t, _)| poles.iter().any(|&(y0, _)| (t - y0).abs() < 1e-9));
        if !clash {
            break base;
        }
        order += 1;
    };
    let nodes: Vec<f64> = base.iter().map(|p| p.0).collect();
    let weights: Vec<f64> = base.iter().map(|p| p.1).collect();
    let values: Vec<Complex64> = nodes.iter().map(|&y| f(y)).collect();
    Ok(subtracted_pv_sum(&nodes, &weights, &values, poles, -1.0, 1.0))
}

fn estimate_residue<F: Fn(f64) -> Complex64>(f: &F, y0: f64) -> Result<Complex64> {
    if !(y0 > -1.0 && y0 < 1.0) {
        return domain(format!("pole {y0} is not strictly inside (−1, 1)"));
    }
    let h0 = (0.25 * (1.0 - y0.abs())).min(1e-2);
    let sym = |h: f64| (f(y0 + h) - f(y0 - h)) * (0.5 * h);
    let one_sided = |h: f64| f(y0 + h) * h;
    let g0 = one_sided(h0).norm();
    let g2 = one_sided(0.25 * h0).norm();
    if g2 > 2.5 * g0 && g2 > 1e-12 {
        return Err(QoscError::Numerical(format!(
            "residue estimate at {y0} diverges; pole is not simple"
        )));
    }
    let a = [sym(h0), sym(0.5 * h0), sym(0.25 * h0)];
    let r1 = [(a[1] * 4.0 - a[0]) / 3.0, (a[2] * 4.0 - a[1]) / 3.0];
    Ok((r1[1] * 16.0 - r1[0]) / 15.0)
}
