//! Verification suites: each numerical identity of the library evaluated on fixed inputs and
//! returned as a [`VerificationReport`].

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{domain, QoscError, Result};
use crate::fock::{
    build_qp, commutator_check, deformed_commutator_check, hamiltonian_check, kernel_eigen_check,
    unit_kernel_coefficient_check, FockVector,
};
use crate::kernels::{kernel_nodes, poisson_closed, poisson_series, qfourier_kernel, singular_part, KernelSpec};
use crate::limits::{
    classical_limit_study, ground_state_ratio, mehler_kernel, mehler_series, wavefunction_limit_study,
    DEFAULT_Q_SEQUENCE,
};
use crate::qhermite::{weight_rho, ThetaPoint, WaveBasis};
use crate::qseries::{QParam, DEFAULT_TOL};
use crate::quadrature::{gauss_theta_rule, GridFunction, QuadratureRule};
use crate::report::VerificationReport;
use crate::transform::{
    convolution, convolution_fixed_r, operator_property_check, qfourier, qfourier_inverse_with, qfourier_many,
    TransformMethod, TransformOptions,
};

pub const DEFAULT_Q_LIST: [f64; 3] = [0.2, 0.5, 0.8];
pub const ORTHOGONALITY_ORDER: usize = 200;
pub const TRANSFORM_ORDER: usize = 120;
/// Convolutions are only finitely smooth at `x = 0`; associativity needs a long rule.
pub const CONVOLUTION_ORDER: usize = 560;
pub const HERMITE_NMAX: usize = 12;
pub const FIXED_R: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Orthogonality,
    Kernel,
    Transform,
    Operators,
    Limits,
    All,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Orthogonality => "orthogonality",
            Suite::Kernel => "kernel",
            Suite::Transform => "transform",
            Suite::Operators => "operators",
            Suite::Limits => "limits",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = QoscError;

    fn from_str(s: &str) -> Result<Self> {
        [
            Suite::Orthogonality,
            Suite::Kernel,
            Suite::Transform,
            Suite::Operators,
            Suite::Limits,
            Suite::All,
        ]
        .into_iter()
        .find(|v| v.name() == s)
        .ok_or_else(|| QoscError::Domain(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub q_list: Vec<f64>,
    /// Quadrature order for the orthogonality and transform suites; each suite has its own default.
    pub order: Option<usize>,
    pub nmax: usize,
    /// Overrides every report's tolerance.
    pub tol: Option<f64>,
    pub timings: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            q_list: DEFAULT_Q_LIST.to_vec(),
            order: None,
            nmax: 64,
            tol: None,
            timings: false,
        }
    }
}

impl VerifyConfig {
    fn validate(&self) -> Result<()> {
        if self.q_list.is_empty() {
            return domain("empty q list");
        }
        for &q in &self.q_list {
            QParam::new(q)?;
        }
        if self.nmax < 3 {
            return domain(format!("nmax must be at least 3, got {}", self.nmax));
        }
        if self.order == Some(0) {
            return domain("quadrature order must be positive");
        }
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return domain(format!("tolerance must be positive, got {t}"));
            }
        }
        Ok(())
    }
}

/// Runs `suite` and returns its reports in a fixed order.
pub fn run(suite: Suite, cfg: &VerifyConfig) -> Result<Vec<VerificationReport>> {
    cfg.validate()?;
    let reports = match suite {
        Suite::Orthogonality => orthogonality(cfg)?,
        Suite::Kernel => kernel(cfg)?,
        Suite::Transform => transform(cfg)?,
        Suite::Operators => operators(cfg)?,
        Suite::Limits => limits(cfg)?,
        Suite::All => {
            let mut all = orthogonality(cfg)?;
            all.extend(kernel(cfg)?);
            all.extend(transform(cfg)?);
            all.extend(operators(cfg)?);
            all.extend(limits(cfg)?);
            all
        }
    };
    Ok(match cfg.tol {
        Some(t) => reports.into_iter().map(|r| r.with_tolerance(t)).collect(),
        None => reports,
    })
}

fn timed<F>(cfg: &VerifyConfig, f: F) -> Result<Vec<VerificationReport>>
where
    F: FnOnce() -> Result<Vec<VerificationReport>>,
{
    let start = Instant::now();
    let reports = f()?;
    if !cfg.timings {
        return Ok(reports);
    }
    let ms = start.elapsed().as_secs_f64() * 1e3 / reports.len().max(1) as f64;
    Ok(reports.into_iter().map(|r| r.with_runtime_ms(ms)).collect())
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `max_{n,m ≤ nmax} |∫ψ_n ψ_m dx − α² δ_nm|` on the θ-rule of the given order.
pub fn orthonormality_residual(q: f64, nmax: usize, order: usize) -> Result<f64> {
    let qp = QParam::new(q)?;
    let rule = gauss_theta_rule(order)?;
    let basis = WaveBasis::new(nmax + 1, q, DEFAULT_TOL)?;
    let len = nmax + 1;
    let mut gram = vec![0.0; len * len];
    let mut psi = Vec::with_capacity(len);
    for (p, w) in rule.nodes().iter().zip(rule.weights()) {
        basis.eval_into(p, &mut psi);
        for n in 0..len {
            for m in 0..len {
                gram[n * len + m] += w * psi[n] * psi[m];
            }
        }
    }
    let mut residual: f64 = 0.0;
    for n in 0..len {
        for m in 0..len {
            let expect = if n == m { qp.alpha2() } else { 0.0 };
            residual = residual.max((gram[n * len + m] - expect).abs());
        }
    }
    Ok(residual)
}

pub fn orthogonality(cfg: &VerifyConfig) -> Result<Vec<VerificationReport>> {
    let order = cfg.order.unwrap_or(ORTHOGONALITY_ORDER);
    cfg.q_list
        .iter()
        .map(|&q| {
            timed(cfg, || {
                Ok(vec![VerificationReport::new(
                    "orthonormality",
                    orthonormality_residual(q, HERMITE_NMAX, order)?,
                    1e-8,
                )
                .with_param("q", q)
                .with_param("nmax", HERMITE_NMAX)
                .with_param("order", order)])
            })
        })
        .collect::<Result<Vec<_>>>()
        .map(|v| v.concat())
}

/// Largest relative gap between the Poisson series and the closed form over `samples`
/// seeded random `(t, x, y)` with `|t| < 0.9`.
pub fn rogers_residual(q: f64, samples: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let t = Complex64::from_polar(rng.gen_range(0.0..0.9), rng.gen_range(-PI..PI));
        let spec = KernelSpec::new(t, q)?;
        let x = ThetaPoint::from_theta(rng.gen_range(0.0..PI))?;
        let y = ThetaPoint::from_theta(rng.gen_range(0.0..PI))?;
        let s = poisson_series(&spec, &x, &y)?;
        let k = poisson_closed(&spec, &x, &y)?;
        worst = worst.max((s - k).norm() / k.norm());
    }
    Ok(worst)
}

/// `max |∫ K_t(x, y) ψ_n(y) dy − tⁿ ψ_n(x)|` over `n ≤ nmax` and a fixed set of `x`.
pub fn reproducing_residual(q: f64, t: Complex64, nmax: usize) -> Result<f64> {
    let spec = KernelSpec::new(t, q)?;
    let basis = WaveBasis::new(nmax + 1, q, DEFAULT_TOL)?;
    let mut worst: f64 = 0.0;
    for &x in &[-0.93, -0.4, 0.05, 0.61, 0.97] {
        let xp = ThetaPoint::from_x(x)?;
        let mut got = vec![c(0.0); nmax + 1];
        for (y, w) in kernel_nodes(&[(xp.theta(), t)], 20)? {
            let kw = poisson_closed(&spec, &xp, &y)? * w;
            for (g, p) in got.iter_mut().zip(basis.eval(&y)) {
                *g += kw * p;
            }
        }
        let at_x = basis.eval(&xp);
        let mut tn = c(1.0);
        for (g, p) in got.iter().zip(at_x) {
            worst = worst.max((g - tn * p).norm());
            tn *= t;
        }
    }
    Ok(worst)
}

/// `max |∫ K_t(x, y) K_τ(y, x') dy − K_{tτ}(x, x')|` over a fixed set of pairs `(x, x')`.
pub fn semigroup_residual(q: f64, t: Complex64, tau: Complex64) -> Result<f64> {
    let (st, stau) = (KernelSpec::new(t, q)?, KernelSpec::new(tau, q)?);
    let prod = KernelSpec::new(t * tau, q)?;
    let mut worst: f64 = 0.0;
    for &(x, xp) in &[(0.3, -0.6), (-0.85, -0.1), (0.9, 0.95)] {
        let (x, xp) = (ThetaPoint::from_x(x)?, ThetaPoint::from_x(xp)?);
        let mut got = c(0.0);
        for (y, w) in kernel_nodes(&[(x.theta(), t), (xp.theta(), tau)], 20)? {
            got += poisson_closed(&st, &x, &y)? * poisson_closed(&stau, &y, &xp)? * w;
        }
        worst = worst.max((got - poisson_closed(&prod, &x, &xp)?).norm());
    }
    Ok(worst)
}

/// `|∫ K_t(x, y) f(y) dy − f(x)|` for `f(y) = cos(1.5y) + y²`, maximized over a few `x`.
pub fn delta_family_error(q: f64, t: f64) -> Result<f64> {
    let f = |y: f64| (1.5 * y).cos() + y * y;
    let t = c(t);
    let spec = KernelSpec::new(t, q)?;
    let mut worst: f64 = 0.0;
    for &x in &[-0.7, 0.1, 0.45] {
        let xp = ThetaPoint::from_x(x)?;
        let mut got = c(0.0);
        for (y, w) in kernel_nodes(&[(xp.theta(), t)], 20)? {
            got += poisson_closed(&spec, &xp, &y)? * (f(y.x()) * w);
        }
        worst = worst.max((got - f(x)).norm());
    }
    Ok(worst)
}

/// Relative gap between `K_i(x, y; 0)` and the closed singular part over an off-singular
/// grid of `points` pairs, and the hand value `√3/π` at `θ = φ = π/3`.
pub fn singular_part_residual(points: usize) -> Result<(f64, f64)> {
    let mut worst: f64 = 0.0;
    let mut used = 0;
    let mut k = 0u64;
    while used < points {
        // golden-ratio sequence: deterministic and evenly spread over the square
        k += 1;
        let th = PI * (k as f64 * 0.618_033_988_749_894_9).fract();
        let ph = PI * (k as f64 * 0.754_877_666_246_692_7).fract();
        if (th + ph).cos().abs() < 0.05 || (th - ph).cos().abs() < 0.05 || th == 0.0 || ph == 0.0 {
            continue;
        }
        let (x, y) = (ThetaPoint::from_theta(th)?, ThetaPoint::from_theta(ph)?);
        let a = qfourier_kernel(&x, &y, 0.0, DEFAULT_TOL)?;
        let b = singular_part(&x, &y)?;
        worst = worst.max((a - b).norm() / b.abs().max(1.0));
        used += 1;
    }
    let p = ThetaPoint::from_theta(PI / 3.0)?;
    let hand = (singular_part(&p, &p)? - 3f64.sqrt() / PI)
        .abs()
        .max((qfourier_kernel(&p, &p, 0.0, DEFAULT_TOL)? - 3f64.sqrt() / PI).norm());
    Ok((worst, hand))
}

pub const REPRODUCING_TS: [(f64, f64); 4] = [(0.3, 0.0), (0.7, 0.0), (0.0, 0.9), (0.0, 0.891)];
pub const SEMIGROUP_PAIRS: [((f64, f64), (f64, f64)); 3] =
    [((0.5, 0.0), (0.8, 0.0)), ((0.0, 0.8), (0.0, 0.8)), ((0.0, 0.7), (-0.3, 0.4))];

pub fn kernel(cfg: &VerifyConfig) -> Result<Vec<VerificationReport>> {
    let mut out = timed(cfg, || {
        let (worst, hand) = singular_part_residual(100)?;
        Ok(vec![VerificationReport::new("singular_part", worst.max(hand), 1e-12)
            .with_param("points", 100)
            .with_param("grid_residual", format!("{worst:e}"))
            .with_param("hand_value_residual", format!("{hand:e}"))])
    })?;
    for (k, &q) in cfg.q_list.iter().enumerate() {
        out.extend(timed(cfg, || {
            let mut reports = vec![VerificationReport::new("rogers_bilinear", rogers_residual(q, 200, 20 + k as u64)?, 1e-10)
                .with_param("q", q)
                .with_param("samples", 200)];
            for &(re, im) in &REPRODUCING_TS {
                let t = Complex64::new(re, im);
                reports.push(
                    VerificationReport::new("reproducing", reproducing_residual(q, t, 8)?, 1e-8)
                        .with_param("q", q)
                        .with_param("t", t)
                        .with_param("nmax", 8),
                );
            }
            for &((a, b), (c2, d)) in &SEMIGROUP_PAIRS {
                let (t, tau) = (Complex64::new(a, b), Complex64::new(c2, d));
                reports.push(
                    VerificationReport::new("semigroup", semigroup_residual(q, t, tau)?, 1e-8)
                        .with_param("q", q)
                        .with_param("t", t)
                        .with_param("tau", tau),
                );
            }
            let errs = [0.9, 0.99, 0.999]
                .iter()
                .map(|&t| delta_family_error(q, t))
                .collect::<Result<Vec<f64>>>()?;
            let ratio = errs.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
            reports.push(
                VerificationReport::new("delta_family", ratio, 1.0)
                    .with_param("q", q)
                    .with_param("error_t0.9", format!("{:e}", errs[0]))
                    .with_param("error_t0.99", format!("{:e}", errs[1]))
                    .with_param("error_t0.999", format!("{:e}", errs[2])),
            );
            Ok(reports)
        })?);
    }
    Ok(out)
}

/// `ρ^{1/2}(x) g(x)` for five analytic `g`: the smooth test set of the transform suite.
pub fn smooth_test_set(rule: &Arc<QuadratureRule>, q: f64) -> Result<Vec<GridFunction>> {
    let gs: [fn(f64) -> Complex64; 5] = [
        |_| c(1.0),
        |x| c(x.exp()),
        |x| c(1.0 / (2.0 - x)),
        |x| c((-4.0 * x * x).exp()),
        |x| Complex64::new((3.0 * x).cos(), 0.5 * x),
    ];
    let sr = rule
        .nodes()
        .iter()
        .map(|p| Ok(weight_rho(p, q, DEFAULT_TOL)?.sqrt()))
        .collect::<Result<Vec<f64>>>()?;
    gs.iter()
        .map(|g| {
            let values = rule.nodes().iter().zip(&sr).map(|(p, s)| g(p.x()) * *s).collect();
            GridFunction::new(rule.clone(), values)
        })
        .collect()
}

/// `∫ dx conj K_{ir}(x, z) ∫ K_{ir}(x, y) f(y) dy ∫ K_{ir}(x, y') g(y') dy'` as a plain
/// triple sum on the rule of `f`.
pub fn brute_force_convolution(f: &GridFunction, g: &GridFunction, q: f64, r: f64) -> Result<GridFunction> {
    let rule = f.rule();
    let g = g.resample(rule);
    let spec = KernelSpec::new(Complex64::new(0.0, r), q)?;
    let nodes = rule.nodes();
    let w = rule.weights();
    let k = nodes
        .iter()
        .map(|x| nodes.iter().map(|y| poisson_closed(&spec, x, y)).collect())
        .collect::<Result<Vec<Vec<Complex64>>>>()?;
    let apply = |v: &[Complex64]| -> Vec<Complex64> {
        k.iter()
            .map(|row| row.iter().zip(v).zip(w).map(|((kv, fv), wv)| kv * fv * *wv).sum())
            .collect()
    };
    let (ff, fg) = (apply(f.values()), apply(g.values()));
    let values = (0..nodes.len())
        .map(|z| (0..nodes.len()).map(|x| k[x][z].conj() * ff[x] * fg[x] * w[x]).sum())
        .collect();
    GridFunction::new(rule.clone(), values)
}

fn psi_grid(basis: &WaveBasis, rule: &Arc<QuadratureRule>) -> Result<Vec<GridFunction>> {
    let rows: Vec<Vec<f64>> = rule.nodes().iter().map(|p| basis.eval(p)).collect();
    (0..basis.len())
        .map(|n| GridFunction::new(rule.clone(), rows.iter().map(|row| c(row[n])).collect()))
        .collect()
}

pub fn transform(cfg: &VerifyConfig) -> Result<Vec<VerificationReport>> {
    let order = cfg.order.unwrap_or(TRANSFORM_ORDER);
    let rule = gauss_theta_rule(order)?;
    let plain = TransformOptions {
        cross_check: false,
        ..TransformOptions::default()
    };
    let mut out = Vec::new();
    for &q in &cfg.q_list {
        out.extend(timed(cfg, || eigen_reports(&rule, q, &plain))?);
        out.extend(timed(cfg, || smooth_set_reports(&rule, q, &plain))?);
        out.extend(timed(cfg, || convolution_reports(cfg, q, &plain))?);
    }
    Ok(out)
}

fn eigen_reports(rule: &Arc<QuadratureRule>, q: f64, opts: &TransformOptions) -> Result<Vec<VerificationReport>> {
    let order = rule.order();
    let inputs = psi_grid(&WaveBasis::new(7, q, DEFAULT_TOL)?, rule)?;
    let refs: Vec<&GridFunction> = inputs.iter().collect();
    let pv = qfourier_many(&refs, q, TransformMethod::PvDirect, opts)?;
    let rx = qfourier_many(&refs, q, TransformMethod::RExtrapolated, opts)?;
    let (mut e_pv, mut e_rx, mut cross, mut e_inv): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for (n, f) in inputs.iter().enumerate() {
        let expect = f.scale(Complex64::i().powu(n as u32));
        e_pv = e_pv.max(pv[n].values().l2_distance(&expect)?);
        e_rx = e_rx.max(rx[n].values().l2_distance(&expect)?);
        cross = cross.max(pv[n].values().l2_distance(rx[n].values())?);
        let inv = qfourier_inverse_with(f, q, TransformMethod::PvDirect, opts)?;
        e_inv = e_inv.max(inv.values().l2_distance(&expect.conj())?);
    }
    let tag = |r: VerificationReport| r.with_param("q", q).with_param("order", order).with_param("nmax", 6);
    Ok(vec![
        tag(VerificationReport::new("eigen_pv", e_pv, 1e-6)),
        tag(VerificationReport::new("eigen_r_extrapolated", e_rx, 1e-6)),
        tag(VerificationReport::new("eigen_cross_method", cross, 1e-5)),
        tag(VerificationReport::new("inverse_eigen_pv", e_inv, 1e-6)),
    ])
}

fn smooth_set_reports(rule: &Arc<QuadratureRule>, q: f64, opts: &TransformOptions) -> Result<Vec<VerificationReport>> {
    let set = smooth_test_set(rule, q)?;
    let refs: Vec<&GridFunction> = set.iter().collect();
    let checked = TransformOptions {
        cross_check: true,
        ..opts.clone()
    };
    let fwd = qfourier_many(&refs, q, TransformMethod::PvDirect, &checked)?;
    let spectral = TransformOptions {
        spectral_nmax: Some(rule.order() / 2),
        ..opts.clone()
    };
    let (mut agree, mut rt, mut pars, mut f4, mut spec): (f64, f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (f, res) in set.iter().zip(&fwd) {
        agree = agree.max(res.residual_estimate());
        let back = qfourier_inverse_with(res.values(), q, TransformMethod::PvDirect, opts)?;
        rt = rt.max(back.values().l2_distance(f)?);
        pars = pars.max((res.values().l2_norm() - f.l2_norm()).abs());
        let sp = qfourier(f, q, TransformMethod::Spectral, &spectral)?;
        spec = spec.max(res.values().l2_distance(sp.values())?);
        let mut h = res.values().clone();
        for _ in 0..3 {
            h = qfourier(&h, q, TransformMethod::PvDirect, opts)?.into_values();
        }
        f4 = f4.max(h.l2_distance(f)?);
    }
    let tag = |r: VerificationReport| {
        r.with_param("q", q)
            .with_param("order", rule.order())
            .with_param("functions", set.len())
    };
    Ok(vec![
        tag(VerificationReport::new("pv_vs_r_extrapolated", agree, 1e-5)),
        tag(VerificationReport::new("round_trip", rt, 1e-5)),
        tag(VerificationReport::new("parseval", pars, 1e-6)),
        tag(VerificationReport::new("fourth_power", f4, 1e-4)),
        tag(VerificationReport::new("grid_vs_spectral", spec, 1e-8)),
    ])
}

fn convolution_reports(cfg: &VerifyConfig, q: f64, opts: &TransformOptions) -> Result<Vec<VerificationReport>> {
    let long = gauss_theta_rule(CONVOLUTION_ORDER.max(cfg.order.unwrap_or(0)))?;
    let set = smooth_test_set(&long, q)?;
    let (f, g, h) = (&set[1], &set[3], &set[4]);
    let m = TransformMethod::PvDirect;
    let fg = convolution(f, g, q, m, opts)?;
    // swapped order through the other route, so the comparison is not a pointwise identity
    let gf = convolution(g, f, q, TransformMethod::RExtrapolated, opts)?;
    let comm = fg.l2_distance(&gf)?;
    let left = convolution(&fg, h, q, m, opts)?;
    let right = convolution(f, &convolution(g, h, q, m, opts)?, q, m, opts)?;
    let assoc = left.l2_distance(&right)?;

    let coarse = gauss_theta_rule(ORTHOGONALITY_ORDER)?;
    let cset = smooth_test_set(&coarse, q)?;
    let brute = brute_force_convolution(&cset[1], &cset[3], q, FIXED_R)?;
    let fine = gauss_theta_rule(cfg.order.unwrap_or(TRANSFORM_ORDER))?;
    let fset = smooth_test_set(&fine, q)?;
    let ours = convolution_fixed_r(&fset[1], &fset[3], q, FIXED_R, &TransformOptions::default())?.resample(&coarse);
    let rel = ours.l2_distance(&brute)? / brute.l2_norm();
    Ok(vec![
        VerificationReport::new("convolution_commutative", comm, 1e-5)
            .with_param("q", q)
            .with_param("order", long.order()),
        VerificationReport::new("convolution_associative", assoc, 1e-5)
            .with_param("q", q)
            .with_param("order", long.order()),
        VerificationReport::new("convolution_fixed_r_direct", rel, 1e-3)
            .with_param("q", q)
            .with_param("r", FIXED_R)
            .with_param("order", fine.order())
            .with_param("reference_order", coarse.order()),
    ])
}

/// `max |(Q v)(x) − x v(x)|` at a few points for `v_n = 0.6ⁿ` on the safe block.
pub fn position_multiplication_residual(q: f64, nmax: usize) -> Result<f64> {
    let (qo, _) = build_qp(q, nmax)?;
    let coeffs = (0..nmax).map(|n| if n + 1 < nmax { c(0.6f64.powi(n as i32)) } else { c(0.0) }).collect();
    let v = FockVector::new(coeffs, q)?;
    let qv = qo.apply(&v)?;
    let points = [-0.9, -0.35, 0.1, 0.5, 0.99]
        .iter()
        .map(|&x| ThetaPoint::from_x(x))
        .collect::<Result<Vec<_>>>()?;
    let lhs = qv.synthesize(&points)?;
    let rhs = v.synthesize(&points)?;
    Ok(lhs
        .iter()
        .zip(&rhs)
        .zip(&points)
        .map(|((a, b), p)| (a - b * p.x()).norm())
        .fold(0.0, f64::max))
}

pub fn operators(cfg: &VerifyConfig) -> Result<Vec<VerificationReport>> {
    let nmax = cfg.nmax;
    let mut out = Vec::new();
    for &q in &cfg.q_list {
        out.extend(timed(cfg, || {
            let mut r = vec![
                commutator_check(q, nmax)?,
                deformed_commutator_check(q, nmax)?,
                hamiltonian_check(q, nmax)?,
                VerificationReport::new("position_multiplication", position_multiplication_residual(q, nmax)?, 1e-12)
                    .with_param("q", q)
                    .with_param("nmax", nmax),
            ];
            let (x, y) = (ThetaPoint::from_x(0.3)?, ThetaPoint::from_x(-0.4)?);
            for t in [c(0.5), Complex64::new(0.0, 0.6), Complex64::new(-0.3, 0.4)] {
                r.push(kernel_eigen_check(&x, &y, q, t, nmax)?);
            }
            for yv in [0.3, -0.7] {
                r.push(unit_kernel_coefficient_check(&ThetaPoint::from_x(yv)?, q, nmax)?);
            }
            let z = Complex64::new(0.5, 0.3);
            let coeffs = (0..nmax).map(|n| z.powu(n as u32)).collect();
            r.push(operator_property_check(&FockVector::new(coeffs, q)?)?);
            Ok(r)
        })?);
    }
    Ok(out)
}

pub const LIMIT_KERNEL_CASES: [((f64, f64), f64, f64); 5] = [
    ((0.5, 0.0), 0.0, 0.0),
    ((0.0, 0.0), 0.7, -0.3),
    ((0.5, 0.0), 0.8, 1.2),
    ((0.0, 0.9), 0.4, -0.6),
    ((-0.6, 0.3), -1.0, 0.5),
];

/// `max |Σ_{n<200} tⁿ Ψ_n(ξ) Ψ_n(η) − Mehler(ξ, η, t)|` over `|ξ|, |η| ≤ 2` and several `|t| ≤ 0.8`.
pub fn mehler_residual() -> Result<f64> {
    let ts = [
        c(-0.8),
        c(-0.3),
        c(0.0),
        c(0.5),
        c(0.8),
        Complex64::new(0.0, 0.8),
        Complex64::new(0.3, -0.4),
    ];
    let grid = [-2.0, -1.1, 0.0, 0.6, 2.0];
    let mut worst: f64 = 0.0;
    for &t in &ts {
        for &xi in &grid {
            for &eta in &grid {
                let s = mehler_series(xi, eta, t, 200);
                worst = worst.max((s - mehler_kernel(xi, eta, t)?).norm());
            }
        }
    }
    Ok(worst)
}

pub fn limits(cfg: &VerifyConfig) -> Result<Vec<VerificationReport>> {
    timed(cfg, || {
        let mut out = vec![VerificationReport::new("mehler_series", mehler_residual()?, 1e-10)];
        for &((re, im), xi, eta) in &LIMIT_KERNEL_CASES {
            let study = classical_limit_study(Complex64::new(re, im), xi, eta, &DEFAULT_Q_SEQUENCE)?;
            out.push(study.to_report());
        }
        let ratios = ground_state_ratio(&DEFAULT_Q_SEQUENCE)?;
        for n in 0..=4 {
            let mut r = wavefunction_limit_study(n, 2.0, 81, &DEFAULT_Q_SEQUENCE)?.to_report();
            if n == 0 {
                for (q, ratio) in DEFAULT_Q_SEQUENCE.iter().zip(&ratios) {
                    r = r.with_param(format!("normalization_q{q}"), format!("{ratio:e}"));
                }
            }
            out.push(r);
        }
        Ok(out)
    })
}
