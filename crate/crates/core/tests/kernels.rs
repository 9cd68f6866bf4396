use std::f64::consts::PI;

use num_complex::Complex64;
use qosc::kernels::{poisson_closed, poisson_series, KernelSpec};
use qosc::qhermite::{wavefunction, ThetaPoint};
use qosc::quadrature::graded_rule;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-15;

fn th(t: f64) -> ThetaPoint {
    ThetaPoint::from_theta(t).unwrap()
}

/// Nodes in `φ` with weights for `dy = sin φ dφ`, graded toward the near-poles of each
/// `K_t(cos θ, cos φ)`: real parts where `θ ± φ ≡ ± arg t`, depth `−ln|t|`.
fn y_rule_multi(sources: &[(f64, Complex64)]) -> Vec<(ThetaPoint, f64)> {
    let mut centers = Vec::new();
    let mut width: f64 = 1.0;
    for &(theta, t) in sources {
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
    graded_rule(0.0, PI, &centers, width, 0.25, 20)
        .into_iter()
        .map(|(phi, w)| (th(phi), w * phi.sin()))
        .collect()
}

fn y_rule(theta: f64, t: Complex64) -> Vec<(ThetaPoint, f64)> {
    y_rule_multi(&[(theta, t)])
}

#[test]
fn series_and_closed_forms_agree_on_random_sample() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for &q in &[0.2, 0.5, 0.8] {
        for _ in 0..200 {
            let t = Complex64::from_polar(rng.gen_range(0.0..0.9), rng.gen_range(-PI..PI));
            let spec = KernelSpec::new(t, q).unwrap();
            let x = th(rng.gen_range(0.0..PI));
            let y = th(rng.gen_range(0.0..PI));
            let s = poisson_series(&spec, &x, &y).unwrap();
            let c = poisson_closed(&spec, &x, &y).unwrap();
            assert!((s - c).norm() < 1e-10 * c.norm(), "q={q} t={t}: {s} vs {c}");
        }
    }
}

#[test]
fn kernel_reproduces_wavefunctions() {
    let ts = [
        Complex64::new(0.3, 0.0),
        Complex64::new(0.7, 0.0),
        Complex64::new(0.0, 0.9 * 0.99),
    ];
    for &q in &[0.2, 0.5, 0.8] {
        for &t in &ts {
            let spec = KernelSpec::new(t, q).unwrap();
            for &x in &[-0.93, -0.4, 0.05, 0.61, 0.97] {
                let xp = ThetaPoint::from_x(x).unwrap();
                let rule = y_rule(xp.theta(), t);
                let k: Vec<Complex64> = rule
                    .iter()
                    .map(|(y, _)| poisson_closed(&spec, &xp, y).unwrap())
                    .collect();
                for n in 0..=8 {
                    let got: Complex64 = rule
                        .iter()
                        .zip(&k)
                        .map(|((y, w), kv)| kv * (wavefunction(n, y, q, TOL).unwrap() * w))
                        .sum();
                    let expect = t.powu(n as u32) * wavefunction(n, &xp, q, TOL).unwrap();
                    assert!((got - expect).norm() < 1e-8, "q={q} t={t} x={x} n={n}: {got} vs {expect}");
                }
            }
        }
    }
}

#[test]
fn kernels_compose_as_a_semigroup() {
    let pairs = [
        (Complex64::new(0.5, 0.0), Complex64::new(0.8, 0.0)),
        (Complex64::new(0.0, 0.8), Complex64::new(0.0, 0.8)),
        (Complex64::new(0.0, 0.7), Complex64::new(-0.3, 0.4)),
    ];
    for &q in &[0.2, 0.5, 0.8] {
        for &(t, tau) in &pairs {
            let (st, stau) = (KernelSpec::new(t, q).unwrap(), KernelSpec::new(tau, q).unwrap());
            let prod = KernelSpec::new(t * tau, q).unwrap();
            for &(x, xp) in &[(0.3, -0.6), (-0.85, -0.1), (0.9, 0.95)] {
                let (x, xp) = (ThetaPoint::from_x(x).unwrap(), ThetaPoint::from_x(xp).unwrap());
                let got: Complex64 = y_rule_multi(&[(x.theta(), t), (xp.theta(), tau)])
                    .iter()
                    .map(|(y, w)| poisson_closed(&st, &x, y).unwrap() * poisson_closed(&stau, y, &xp).unwrap() * w)
                    .sum();
                let expect = poisson_closed(&prod, &x, &xp).unwrap();
                assert!((got - expect).norm() < 1e-8, "q={q} t={t} tau={tau}: {got} vs {expect}");
            }
        }
    }
}

#[test]
fn poisson_kernel_is_a_delta_family() {
    let f = |y: f64| (1.5 * y).cos() + y * y;
    for &q in &[0.2, 0.5, 0.8] {
        for &x in &[-0.7, 0.1, 0.45] {
            let xp = ThetaPoint::from_x(x).unwrap();
            let mut errs = Vec::new();
            for &t in &[0.9, 0.99, 0.999] {
                let t = Complex64::new(t, 0.0);
                let spec = KernelSpec::new(t, q).unwrap();
                let got: Complex64 = y_rule(xp.theta(), t)
                    .iter()
                    .map(|(y, w)| poisson_closed(&spec, &xp, y).unwrap() * (f(y.x()) * w))
                    .sum();
                errs.push((got - f(x)).norm());
            }
            assert!(errs.windows(2).all(|w| w[1] < w[0]), "q={q} x={x}: {errs:?}");
            assert!(errs[2] < 1e-2, "q={q} x={x}: {errs:?}");
        }
    }
}
