//! Truncated Fock-space representation: coefficient vectors over `ψ_0, …, ψ_{nmax−1}`
//! and the tridiagonal operators acting on them.
//!
//! Truncation breaks identities only at the last index, so operator identities are
//! asserted on the truncation-safe block `0..nmax−1`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::kernels::ClosedKernel;
use crate::qhermite::{e_n, e_tilde, ThetaPoint, WaveBasis};
use crate::qseries::{QParam, DEFAULT_TOL};
use crate::report::VerificationReport;

/// Coefficients below this size in the top two slots count as converged.
pub const TRUNCATION_TOL: f64 = 1e-10;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn check_q(q: f64) -> Result<()> {
    QParam::new(q).map(|_| ())
}

/// Coefficients `a_0, …, a_{nmax−1}` of `Σ a_n ψ_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    coeffs: DVector<Complex64>,
    q: f64,
}

impl FockVector {
    pub fn new(coeffs: Vec<Complex64>, q: f64) -> Result<Self> {
        check_q(q)?;
        if coeffs.is_empty() {
            return domain("a Fock vector needs at least one coefficient");
        }
        Ok(Self {
            coeffs: DVector::from_vec(coeffs),
            q,
        })
    }

    pub fn zeros(nmax: usize, q: f64) -> Result<Self> {
        Self::new(vec![c(0.0); nmax], q)
    }

    /// The basis vector `e_n`.
    pub fn basis(n: usize, nmax: usize, q: f64) -> Result<Self> {
        if n >= nmax {
            return domain(format!("basis index {n} outside nmax = {nmax}"));
        }
        let mut v = Self::zeros(nmax, q)?;
        v.coeffs[n] = c(1.0);
        Ok(v)
    }

    pub(crate) fn from_dvector(coeffs: DVector<Complex64>, q: f64) -> Self {
        Self { coeffs, q }
    }

    pub fn coeffs(&self) -> &DVector<Complex64> {
        &self.coeffs
    }

    pub fn nmax(&self) -> usize {
        self.coeffs.len()
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `Σ conj(a_n) b_n`.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.coeffs.dotc(&other.coeffs)
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_dvector(&self.coeffs * s, self.q)
    }

    /// Largest modulus among the top `k` coefficients.
    pub fn tail_magnitude(&self, k: usize) -> f64 {
        let n = self.nmax();
        self.coeffs
            .iter()
            .skip(n.saturating_sub(k))
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest coefficient difference over indices `0..len`.
    pub fn max_diff_on(&self, other: &FockVector, len: usize) -> f64 {
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .take(len)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `Σ a_n ψ_n(x)` at each point.
    pub fn synthesize(&self, points: &[ThetaPoint]) -> Result<Vec<Complex64>> {
        let basis = WaveBasis::new(self.nmax(), self.q, DEFAULT_TOL)?;
        let mut psi = Vec::with_capacity(self.nmax());
        Ok(points
            .iter()
            .map(|p| {
                basis.eval_into(p, &mut psi);
                psi.iter().zip(self.coeffs.iter()).map(|(f, a)| a * *f).sum()
            })
            .collect())
    }
}

/// A linear map on the truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    matrix: DMatrix<Complex64>,
    q: f64,
}

impl FockOperator {
    pub fn new(matrix: DMatrix<Complex64>, q: f64) -> Result<Self> {
        check_q(q)?;
        if !matrix.is_square() || matrix.nrows() == 0 {
            return domain(format!(
                "operator matrix must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            ));
        }
        Ok(Self { matrix, q })
    }

    fn wrap(&self, matrix: DMatrix<Complex64>) -> Self {
        Self { matrix, q: self.q }
    }

    /// Diagonal operator with the given entries.
    pub fn diagonal(entries: &[Complex64], q: f64) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(entries)), q)
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn nmax(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn apply(&self, v: &FockVector) -> Result<FockVector> {
        if v.nmax() != self.nmax() {
            return domain(format!("vector of size {} for operator of size {}", v.nmax(), self.nmax()));
        }
        Ok(FockVector::from_dvector(&self.matrix * &v.coeffs, self.q))
    }

    /// `self · other`.
    pub fn compose(&self, other: &FockOperator) -> Self {
        self.wrap(&self.matrix * &other.matrix)
    }

    /// `self · other − other · self`.
    pub fn commutator(&self, other: &FockOperator) -> Self {
        self.wrap(&self.matrix * &other.matrix - &other.matrix * &self.matrix)
    }

    pub fn adjoint(&self) -> Self {
        self.wrap(self.matrix.adjoint())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.wrap(&self.matrix * s)
    }

    pub fn sub(&self, other: &FockOperator) -> Self {
        self.wrap(&self.matrix - &other.matrix)
    }

    /// Largest entry modulus of `self − other` on the leading `len × len` block.
    pub fn max_diff_on(&self, other: &FockOperator, len: usize) -> f64 {
        let len = len.min(self.nmax());
        let d = &self.matrix - &other.matrix;
        d.view((0, 0), (len, len))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Raised when the raising operator pushes weight past the last retained level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationWarning {
    /// Modulus of the coefficient that fell off the top.
    pub dropped: f64,
}

impl fmt::Display for TruncationWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "truncation leak: coefficient of size {:e} dropped past nmax", self.dropped)
    }
}

/// Annihilation operator `b`: `b ψ_n = ẽ_n^{1/2} ψ_{n−1}`.
pub fn lower_operator(q: f64, nmax: usize) -> Result<FockOperator> {
    check_q(q)?;
    let mut m = DMatrix::zeros(nmax, nmax);
    for n in 1..nmax {
        m[(n - 1, n)] = c(e_tilde(n, q).sqrt());
    }
    FockOperator::new(m, q)
}

/// Creation operator `b⁺`: `b⁺ ψ_n = ẽ_{n+1}^{1/2} ψ_{n+1}`.
pub fn raise_operator(q: f64, nmax: usize) -> Result<FockOperator> {
    Ok(lower_operator(q, nmax)?.adjoint())
}

/// `q^{pN} = diag(q^{pn})`.
pub fn q_power_n(q: f64, nmax: usize, p: f64) -> Result<FockOperator> {
    let d: Vec<Complex64> = (0..nmax).map(|n| c(q.powf(p * n as f64))).collect();
    FockOperator::diagonal(&d, q)
}

pub fn ladder_lower(v: &FockVector) -> FockVector {
    let n = v.nmax();
    let mut out = DVector::zeros(n);
    for k in 1..n {
        out[k - 1] = v.coeffs[k] * e_tilde(k, v.q).sqrt();
    }
    FockVector::from_dvector(out, v.q)
}

/// `b⁺ v`, reporting the coefficient that would have landed on level `nmax`.
pub fn ladder_raise(v: &FockVector) -> (FockVector, Option<TruncationWarning>) {
    let n = v.nmax();
    let mut out = DVector::zeros(n);
    for k in 0..n.saturating_sub(1) {
        out[k + 1] = v.coeffs[k] * e_tilde(k + 1, v.q).sqrt();
    }
    let dropped = (v.coeffs[n - 1] * e_tilde(n, v.q).sqrt()).norm();
    let warning = (dropped > TRUNCATION_TOL).then_some(TruncationWarning { dropped });
    (FockVector::from_dvector(out, v.q), warning)
}

/// Position and momentum operators
/// `Q = (√(1−q)/2)(q^{N/2} b + b⁺ q^{N/2})`, `P = (√(1−q)/2i)(q^{N/2} b − b⁺ q^{N/2})`.
///
/// Both are tridiagonal with off-diagonal moduli `(√(1−q)/2) e_n^{1/2}`.
pub fn build_qp(q: f64, nmax: usize) -> Result<(FockOperator, FockOperator)> {
    check_q(q)?;
    if nmax < 2 {
        return domain(format!("Q and P need nmax >= 2, got {nmax}"));
    }
    let s = (1.0 - q).sqrt() / 2.0;
    let mut qm = DMatrix::zeros(nmax, nmax);
    let mut pm = DMatrix::zeros(nmax, nmax);
    for n in 1..nmax {
        let a = s * e_n(n, q).sqrt();
        qm[(n - 1, n)] = c(a);
        qm[(n, n - 1)] = c(a);
        pm[(n - 1, n)] = Complex64::new(0.0, -a);
        pm[(n, n - 1)] = Complex64::new(0.0, a);
    }
    Ok((FockOperator::new(qm, q)?, FockOperator::new(pm, q)?))
}

/// `[Q, P] = i (1−q)/2 · q^N` on the truncation-safe block.
pub fn commutator_check(q: f64, nmax: usize) -> Result<VerificationReport> {
    let (qo, po) = build_qp(q, nmax)?;
    let expected = q_power_n(q, nmax, 1.0)?.scale(Complex64::new(0.0, 0.5 * (1.0 - q)));
    let residual = qo.commutator(&po).max_diff_on(&expected, nmax - 1);
    Ok(VerificationReport::new("commutator_qp", residual, 1e-12)
        .with_param("q", q)
        .with_param("nmax", nmax))
}

/// `b b⁺ − q^{−1} b⁺ b = 1` on the truncation-safe block.
///
/// The two products grow like `q^{−n}`, so each entry's residual is measured relative to
/// `1 + |b b⁺|`, the size of the terms that cancel.
pub fn deformed_commutator_check(q: f64, nmax: usize) -> Result<VerificationReport> {
    let b = lower_operator(q, nmax)?;
    let bp = b.adjoint();
    let bbp = b.compose(&bp);
    let lhs = bbp.sub(&bp.compose(&b).scale(c(1.0 / q)));
    let safe = nmax.saturating_sub(1);
    let mut residual: f64 = 0.0;
    for i in 0..safe {
        for j in 0..safe {
            let target = if i == j { c(1.0) } else { c(0.0) };
            let scale = 1.0 + bbp.matrix()[(i, j)].norm();
            residual = residual.max((lhs.matrix()[(i, j)] - target).norm() / scale);
        }
    }
    Ok(VerificationReport::new("deformed_commutator", residual, 1e-12)
        .with_param("q", q)
        .with_param("nmax", nmax))
}

/// `H̃ = b⁺ b = diag(ẽ_n)`.
pub fn hamiltonian(q: f64, nmax: usize) -> Result<FockOperator> {
    check_q(q)?;
    if nmax == 0 {
        return domain("nmax must be positive");
    }
    let d: Vec<Complex64> = (0..nmax).map(|n| c(e_tilde(n, q))).collect();
    FockOperator::diagonal(&d, q)
}

/// `H̃ = (i − 2(1−q)^{−1} C) / (2 q^{−1} C)` for a diagonal commutator operator `C`,
/// taken entry by entry.
pub fn hamiltonian_from_commutator(comm: &FockOperator) -> Result<FockOperator> {
    let q = comm.q();
    let m = comm.matrix();
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let off = (0..comm.nmax())
        .flat_map(|i| (0..comm.nmax()).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|ij| m[ij].norm())
        .fold(0.0, f64::max);
    if off > 1e-12 * scale.max(1.0) {
        return domain(format!("commutator is not diagonal: off-diagonal entry {off:e}"));
    }
    let i = Complex64::i();
    let d: Vec<Complex64> = (0..comm.nmax())
        .map(|n| {
            let cn = m[(n, n)];
            (i - cn * (2.0 / (1.0 - q))) / (cn * (2.0 / q))
        })
        .collect();
    FockOperator::diagonal(&d, q)
}

/// `[Q, P]` as computed from the truncated matrices, restricted to the truncation-safe block.
pub fn commutator_safe_block(q: f64, nmax: usize) -> Result<FockOperator> {
    let (qo, po) = build_qp(q, nmax)?;
    let full = qo.commutator(&po);
    FockOperator::new(full.matrix().view((0, 0), (nmax - 1, nmax - 1)).into_owned(), q)
}

/// Feeds the commutator `i (1−q)/2 · q^N` into the quotient form of the Hamiltonian and
/// compares with `diag(ẽ_n)` entry by entry (relative error).
///
/// The commutator recomputed from the matrices agrees with this operator to rounding (see
/// [`commutator_check`]), but its small entries `q^n` arise by cancellation, which costs
/// `log10 q^{−n}` digits in the quotient.
pub fn hamiltonian_check(q: f64, nmax: usize) -> Result<VerificationReport> {
    let direct = hamiltonian(q, nmax)?;
    let comm = q_power_n(q, nmax, 1.0)?.scale(Complex64::new(0.0, 0.5 * (1.0 - q)));
    let via = hamiltonian_from_commutator(&comm)?;
    let mut residual: f64 = 0.0;
    for n in 0..nmax {
        let a = direct.matrix()[(n, n)];
        let b = via.matrix()[(n, n)];
        residual = residual.max((a - b).norm() / a.norm().max(1.0));
    }
    Ok(VerificationReport::new("hamiltonian_forms", residual, 1e-12)
        .with_param("q", q)
        .with_param("nmax", nmax))
}

/// Checks `Q_x K_t = x K_t` and `P_x K_t = λ K_t`, `λ = (2ty − (1+t²)x)/(i(1−t²))`, by acting with the matrices on the coefficients
/// `tⁿ ψ_n(y)/α²` of `K_t(·, y)` and resynthesizing at `x`.
pub fn kernel_eigen_check(
    x: &ThetaPoint,
    y: &ThetaPoint,
    q: f64,
    t: Complex64,
    nmax: usize,
) -> Result<VerificationReport> {
    if t.norm() >= 1.0 {
        return domain(format!("synthesis needs |t| < 1, got {}", t.norm()));
    }
    let qp = QParam::new(q)?;
    let basis = WaveBasis::new(nmax, q, DEFAULT_TOL)?;
    let psi_y = basis.eval(y);
    let mut tn = c(1.0 / qp.alpha2());
    let coeffs: Vec<Complex64> = psi_y
        .iter()
        .map(|&p| {
            let v = tn * p;
            tn *= t;
            v
        })
        .collect();
    let v = FockVector::new(coeffs, q)?;
    let (qo, po) = build_qp(q, nmax)?;
    let qv = qo.apply(&v)?;
    let pv = po.apply(&v)?;
    let at = |w: &FockVector| -> Result<Complex64> { Ok(w.synthesize(std::slice::from_ref(x))?[0]) };
    let kernel = ClosedKernel::new(t, q, DEFAULT_TOL)?.eval(x, y)?;
    let lambda = (t * (2.0 * y.x()) - (c(1.0) + t * t) * x.x()) / (Complex64::i() * (c(1.0) - t * t));
    let q_res = (at(&qv)? - kernel * x.x()).norm();
    let p_res = (at(&pv)? - kernel * lambda).norm();
    let mut report = VerificationReport::new("kernel_eigen", q_res.max(p_res), 1e-8)
        .with_param("q", q)
        .with_param("t", t)
        .with_param("x", x.x())
        .with_param("y", y.x())
        .with_param("nmax", nmax)
        .with_param("q_residual", format!("{q_res:e}"))
        .with_param("p_residual", format!("{p_res:e}"));
    if v.tail_magnitude(3) > TRUNCATION_TOL {
        report = report.with_warning(format!(
            "coefficients not converged: tail {:e}",
            v.tail_magnitude(3)
        ));
    }
    Ok(report)
}

/// The unit-circle case `t = i` in coefficient form: with `u_n = iⁿ ψ_n(y)` the coefficients
/// of `α² K_i(·, y)`, checks `Q u' = y u'` for `u'_n = ψ_n(y)`, `P u = y u` and `P² u = y² u`
/// on the indices untouched by truncation.
pub fn unit_kernel_coefficient_check(y: &ThetaPoint, q: f64, nmax: usize) -> Result<VerificationReport> {
    if nmax < 3 {
        return domain(format!("need nmax >= 3, got {nmax}"));
    }
    let psi = WaveBasis::new(nmax, q, DEFAULT_TOL)?.eval(y);
    let plain = FockVector::new(psi.iter().map(|&p| c(p)).collect(), q)?;
    let mut ipow = c(1.0);
    let rotated = FockVector::new(
        psi.iter()
            .map(|&p| {
                let v = ipow * p;
                ipow *= Complex64::i();
                v
            })
            .collect(),
        q,
    )?;
    let (qo, po) = build_qp(q, nmax)?;
    let yv = y.x();
    let q_res = qo.apply(&plain)?.max_diff_on(&plain.scale(c(yv)), nmax - 1);
    let pu = po.apply(&rotated)?;
    let p_res = pu.max_diff_on(&rotated.scale(c(yv)), nmax - 1);
    let p2_res = po.apply(&pu)?.max_diff_on(&rotated.scale(c(yv * yv)), nmax - 2);
    Ok(VerificationReport::new("unit_kernel_coefficients", q_res.max(p_res).max(p2_res), 1e-12)
        .with_param("q", q)
        .with_param("y", yv)
        .with_param("nmax", nmax)
        .with_param("q_residual", format!("{q_res:e}"))
        .with_param("p_residual", format!("{p_res:e}"))
        .with_param("p2_residual", format!("{p2_res:e}")))
}

/// `i^n` as a diagonal operator: the q-Fourier transform in the Fock basis.
pub fn fourier_operator(q: f64, nmax: usize) -> Result<FockOperator> {
    let d: Vec<Complex64> = (0..nmax).map(|n| Complex64::i().powu(n as u32)).collect();
    FockOperator::diagonal(&d, q)
}
