//! Symbol-level objects of the shell transmission problem: the matrices Λ±,
//! the decaying-solution vectors h, the transmission matrices a±, and the
//! Lopatinsky–Shapiro matrix ℒ together with the local, uniform and
//! parameter-dependent checks built on |det ℒ|.
//!
//! Conventions:
//! - `InteractionMatrix::half()` is the matrix ½Γ that enters
//!   a± = ½Γ ∓ i α·ν. `DiagonalPair(γ, ε)` stores the halved entries, so its
//!   `half()` is diag(γI₂, εI₂). `ElectrostaticLorentz(η, τ)` stands for
//!   Γ = ηI₄ + τα₀, whose degenerate locus is η² − τ² = 4.
//! - Columns of ℒ are ordered (a₊h₋,₁, a₊h₋,₂, a₋h₊,₁, a₋h₊,₂). All pass/fail
//!   decisions use |det ℒ|, which is independent of that order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{
    alpha_dot, diag4, dirac_alpha, is_hermitian, pauli, CMat2, CMat4, CVec4, Vec3, C64, I, ONE,
};
use crate::error::{Error, Result};
use crate::linalg::orthonormal_column_pair;
use crate::surfaces::{SurfaceModel, SurfaceSample};

/// Default cutoff on |det ℒ| (with ρ = 1) below which a check fails.
pub const DEFAULT_LS_THRESHOLD: f64 = 1e-8;
const FRAME_TOL: f64 = 1e-10;
const PIVOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Shell coupling Γ(s) at one surface point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum InteractionMatrix {
    /// Full Γ; a± = ½Γ ∓ iα·ν.
    General { gamma: CMat4 },
    /// Halved diagonal entries: ½Γ = diag(γI₂, εI₂).
    DiagonalPair { gamma: f64, epsilon: f64 },
    /// Γ = ηI₄ + τα₀ = diag((η+τ)I₂, (η−τ)I₂).
    ElectrostaticLorentz { eta: f64, tau: f64 },
}

impl InteractionMatrix {
    pub fn zero() -> Self {
        InteractionMatrix::DiagonalPair { gamma: 0.0, epsilon: 0.0 }
    }

    /// The full coupling matrix Γ.
    pub fn full(&self) -> CMat4 {
        match *self {
            InteractionMatrix::General { gamma } => gamma,
            InteractionMatrix::DiagonalPair { gamma, epsilon } => {
                diag4([2.0 * gamma, 2.0 * gamma, 2.0 * epsilon, 2.0 * epsilon])
            }
            InteractionMatrix::ElectrostaticLorentz { eta, tau } => {
                CMat4::identity() * C64::from(eta) + dirac_alpha(0).unwrap() * C64::from(tau)
            }
        }
    }

    /// ½Γ, the part entering the transmission matrices.
    pub fn half(&self) -> CMat4 {
        match *self {
            InteractionMatrix::DiagonalPair { gamma, epsilon } => {
                diag4([gamma, gamma, epsilon, epsilon])
            }
            _ => self.full() * C64::from(0.5),
        }
    }

    /// Halved diagonal pair (γ, ε) when Γ is block-scalar diagonal.
    pub fn diagonal_pair(&self) -> Option<(f64, f64)> {
        match *self {
            InteractionMatrix::DiagonalPair { gamma, epsilon } => Some((gamma, epsilon)),
            InteractionMatrix::ElectrostaticLorentz { eta, tau } => {
                Some((0.5 * (eta + tau), 0.5 * (eta - tau)))
            }
            InteractionMatrix::General { .. } => None,
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        is_hermitian(&self.full(), tol)
    }

    pub fn is_zero(&self) -> bool {
        self.full().iter().all(|z| *z == C64::from(0.0))
    }
}

/// Orthonormal right-handed frame (t₁, t₂, ν) at a surface point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub t1: Vec3,
    pub t2: Vec3,
    pub nu: Vec3,
}

impl Frame {
    pub fn new(t1: Vec3, t2: Vec3, nu: Vec3) -> Result<Self> {
        let frame = Frame { t1, t2, nu };
        let deviation = frame.deviation();
        if deviation > FRAME_TOL || !deviation.is_finite() {
            return Err(Error::NonOrthonormalFrame { deviation });
        }
        Ok(frame)
    }

    pub fn standard() -> Self {
        Frame { t1: Vec3::x(), t2: Vec3::y(), nu: Vec3::z() }
    }

    /// Frame with the given unit normal; t₁ is the tangent closest to the
    /// coordinate axis least aligned with ν.
    pub fn from_normal(nu: Vec3) -> Result<Self> {
        check_unit(&nu)?;
        let axis = [Vec3::x(), Vec3::y(), Vec3::z()]
            .into_iter()
            .min_by(|a, b| a.dot(&nu).abs().total_cmp(&b.dot(&nu).abs()))
            .unwrap();
        Self::from_normal_and_tangent(nu, axis)
    }

    /// Frame with normal ν and t₁ obtained by projecting `tangent` onto ν⊥.
    pub fn from_normal_and_tangent(nu: Vec3, tangent: Vec3) -> Result<Self> {
        check_unit(&nu)?;
        let t1 = tangent - nu * nu.dot(&tangent);
        let n = t1.norm();
        if !(n > 1e-12) {
            return Err(Error::NonOrthonormalFrame { deviation: 1.0 });
        }
        let t1 = t1 / n;
        let t2 = nu.cross(&t1);
        Frame::new(t1, t2, nu)
    }

    /// Rotates the tangent pair about ν by `angle`.
    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Frame { t1: self.t1 * c + self.t2 * s, t2: self.t2 * c - self.t1 * s, nu: self.nu }
    }

    /// Frame with ν reversed (t₁ and t₂ swapped to stay right-handed).
    pub fn flipped(&self) -> Self {
        Frame { t1: self.t2, t2: self.t1, nu: -self.nu }
    }

    pub fn deviation(&self) -> f64 {
        let v = [self.t1, self.t2, self.nu];
        let mut dev: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((v[i].dot(&v[j]) - target).abs());
            }
        }
        dev.max((self.t1.cross(&self.t2) - self.nu).norm())
    }

    fn is_standard(&self) -> bool {
        (self.t1 - Vec3::x()).norm() < 1e-14
            && (self.t2 - Vec3::y()).norm() < 1e-14
            && (self.nu - Vec3::z()).norm() < 1e-14
    }
}

fn check_unit(nu: &Vec3) -> Result<()> {
    let norm = nu.norm();
    if (norm - 1.0).abs() > FRAME_TOL || !norm.is_finite() {
        return Err(Error::NonUnitNormal { norm });
    }
    Ok(())
}

/// Tangential frequency ξ′ and spectral parameter μ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CotangentPoint {
    pub xi: [f64; 2],
    pub mu: f64,
}

impl CotangentPoint {
    pub fn rho(&self) -> f64 {
        rho(self.xi, self.mu)
    }
}

fn rho(xi: [f64; 2], mu: f64) -> f64 {
    (xi[0] * xi[0] + xi[1] * xi[1] + mu * mu).sqrt()
}

fn checked_rho(xi: [f64; 2], mu: f64) -> Result<f64> {
    let r = rho(xi, mu);
    if r > 0.0 && r.is_finite() {
        Ok(r)
    } else {
        Err(Error::DegenerateSymbol)
    }
}

/// Λ±(ξ′, μ) = σ₁ξ₁ + σ₂ξ₂ ± iρσ₃.
pub fn lambda_pm(xi: [f64; 2], mu: f64, sign: Sign) -> Result<CMat2> {
    let r = checked_rho(xi, mu)?;
    let s = C64::new(xi[0], xi[1]);
    let d = I * (sign.value() * r);
    Ok(CMat2::new(d, s.conj(), s, -d))
}

/// Decaying-solution vectors in the standard frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HBasis {
    pub plus: [CVec4; 2],
    pub minus: [CVec4; 2],
}

fn stack(top: nalgebra::Vector2<C64>, bottom: nalgebra::Vector2<C64>) -> CVec4 {
    CVec4::new(top[0], top[1], bottom[0], bottom[1])
}

/// Vectors h₁,±, h₂,± spanning ker(α′·ξ′ ± iρα₃ − iμI₄). For μ = 0 these are
/// (Λ±e₁, 0) and (0, Λ±e₁); otherwise (iμe₁, Λ±e₁) and (Λ±e₂, iμe₂).
pub fn h_basis(xi: [f64; 2], mu: f64) -> Result<HBasis> {
    checked_rho(xi, mu)?;
    let e1 = nalgebra::Vector2::new(ONE, C64::from(0.0));
    let e2 = nalgebra::Vector2::new(C64::from(0.0), ONE);
    let zero = nalgebra::Vector2::zeros();
    let pair = |sign| -> Result<[CVec4; 2]> {
        let lam = lambda_pm(xi, mu, sign)?;
        if mu == 0.0 {
            Ok([stack(lam * e1, zero), stack(zero, lam * e1)])
        } else {
            let imu = I * mu;
            Ok([stack(e1 * imu, lam * e1), stack(lam * e2, e2 * imu)])
        }
    };
    Ok(HBasis { plus: pair(Sign::Plus)?, minus: pair(Sign::Minus)? })
}

/// Symbol α′·ξ′ ± iρα₃ expressed in the generators adapted to `frame`.
pub fn tangential_symbol(frame: &Frame, xi: [f64; 2], mu: f64, sign: Sign) -> Result<CMat4> {
    let r = checked_rho(xi, mu)?;
    let b1 = alpha_dot(&frame.t1);
    let b2 = alpha_dot(&frame.t2);
    let b3 = alpha_dot(&frame.nu);
    Ok(b1 * C64::from(xi[0]) + b2 * C64::from(xi[1]) + b3 * (I * (sign.value() * r)))
}

/// Orthogonal pair spanning the kernel of (M± − iμI₄) in an arbitrary frame,
/// each scaled to ‖h‖² = 2ρ² to match the standard-frame vectors.
pub fn frame_kernel_pair(frame: &Frame, xi: [f64; 2], mu: f64, sign: Sign) -> Result<[CVec4; 2]> {
    let r = checked_rho(xi, mu)?;
    let m = tangential_symbol(frame, xi, mu, sign)? + CMat4::identity() * (I * mu);
    let [a, b] = orthonormal_column_pair(&m, PIVOT_TOL)?;
    let scale = C64::from(std::f64::consts::SQRT_2 * r);
    Ok([a * scale, b * scale])
}

/// a± = ½Γ ∓ i α·ν.
pub fn transmission_pair(gamma: &InteractionMatrix, nu: &Vec3) -> Result<(CMat4, CMat4)> {
    check_unit(nu)?;
    let half = gamma.half();
    let an = alpha_dot(nu) * I;
    Ok((half - an, half + an))
}

/// The 4×4 Lopatinsky–Shapiro matrix ℒ(s, ξ′, μ).
pub fn ls_matrix(gamma: &InteractionMatrix, frame: &Frame, xi: [f64; 2], mu: f64) -> Result<CMat4> {
    let deviation = frame.deviation();
    if deviation > FRAME_TOL || !deviation.is_finite() {
        return Err(Error::NonOrthonormalFrame { deviation });
    }
    checked_rho(xi, mu)?;
    let (a_plus, a_minus) = transmission_pair(gamma, &frame.nu)?;
    let (hp, hm) = if frame.is_standard() {
        let h = h_basis(xi, mu)?;
        (h.plus, h.minus)
    } else {
        (
            frame_kernel_pair(frame, xi, mu, Sign::Plus)?,
            frame_kernel_pair(frame, xi, mu, Sign::Minus)?,
        )
    };
    Ok(CMat4::from_columns(&[a_plus * hm[0], a_plus * hm[1], a_minus * hp[0], a_minus * hp[1]]))
}

pub fn ls_abs_det(gamma: &InteractionMatrix, frame: &Frame, xi: [f64; 2], mu: f64) -> Result<f64> {
    Ok(ls_matrix(gamma, frame, xi, mu)?.determinant().norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LsPoint {
    pub sample_id: usize,
    pub xi: [f64; 2],
    pub mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LsEvaluation {
    pub point: LsPoint,
    pub abs_det: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsReport {
    pub min_abs_det: f64,
    pub argmin: LsPoint,
    pub samples: Vec<LsEvaluation>,
    pub pass: bool,
    pub threshold: f64,
    /// Largest |ρ-normalized |det(ξ′, μ)| − |det(ξ′, −μ)|| seen on the
    /// parameter grid; `None` for checks without a μ direction.
    pub mirror_asymmetry: Option<f64>,
}

impl LsReport {
    fn from_samples(samples: Vec<LsEvaluation>, threshold: f64, mirror_asymmetry: Option<f64>) -> Result<Self> {
        let first = samples.first().ok_or(Error::EmptySamples)?;
        let mut best = *first;
        for s in &samples[1..] {
            // strict comparison keeps the first index on ties
            if s.abs_det < best.abs_det {
                best = *s;
            }
        }
        Ok(LsReport {
            min_abs_det: best.abs_det,
            argmin: best.point,
            pass: best.abs_det > threshold,
            samples,
            threshold,
            mirror_asymmetry,
        })
    }
}

/// ξ′ on the unit circle, uniform angles.
pub fn unit_circle(n: usize) -> Vec<[f64; 2]> {
    (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            [t.cos(), t.sin()]
        })
        .collect()
}

/// (ξ′, μ) on the closed upper hemisphere of ρ = 1: a Fibonacci grid with
/// μ > 0 plus an equatorial ring at μ = 0.
pub fn parameter_hemisphere(n_grid: usize) -> Vec<CotangentPoint> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let ring = (2.0 * (n_grid as f64).sqrt()).ceil().max(8.0) as usize;
    let mut out: Vec<CotangentPoint> =
        unit_circle(ring).into_iter().map(|xi| CotangentPoint { xi, mu: 0.0 }).collect();
    for k in 0..n_grid {
        let mu = (k as f64 + 0.5) / n_grid as f64;
        let r = (1.0 - mu * mu).sqrt();
        let phi = golden * k as f64;
        out.push(CotangentPoint { xi: [r * phi.cos(), r * phi.sin()], mu });
    }
    out
}

/// Local condition at one point: |det ℒ| over |ξ′| = 1 with μ = 0.
pub fn ls_check_local(gamma: &InteractionMatrix, frame: &Frame, n_xi: usize, threshold: f64) -> Result<LsReport> {
    if n_xi < 4 {
        return Err(Error::InvalidArgument(format!("n_xi = {n_xi} < 4")));
    }
    let samples = unit_circle(n_xi)
        .into_par_iter()
        .map(|xi| {
            Ok(LsEvaluation {
                point: LsPoint { sample_id: 0, xi, mu: 0.0 },
                abs_det: ls_abs_det(gamma, frame, xi, 0.0)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    LsReport::from_samples(samples, threshold, None)
}

/// Uniform condition over sampled surface points.
pub fn ls_check_uniform<F>(
    surface: &SurfaceModel,
    gamma_field: F,
    n_s: usize,
    n_xi: usize,
    threshold: f64,
) -> Result<LsReport>
where
    F: Fn(&SurfaceSample) -> InteractionMatrix + Sync,
{
    if n_xi < 4 {
        return Err(Error::InvalidArgument(format!("n_xi = {n_xi} < 4")));
    }
    let points = surface.sample(n_s)?;
    if points.is_empty() {
        return Err(Error::EmptySamples);
    }
    let circle = unit_circle(n_xi);
    let samples = points
        .par_iter()
        .map(|p| {
            let gamma = gamma_field(p);
            circle
                .iter()
                .map(|&xi| {
                    Ok(LsEvaluation {
                        point: LsPoint { sample_id: p.id, xi, mu: 0.0 },
                        abs_det: ls_abs_det(&gamma, &p.frame, xi, 0.0)?,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    LsReport::from_samples(samples, threshold, None)
}

/// Parameter-dependent condition on the sphere |ξ′|² + μ² = 1. The lower
/// hemisphere is evaluated as well and its deviation from the mirrored upper
/// value is reported.
pub fn ls_check_param(gamma: &InteractionMatrix, frame: &Frame, n_grid: usize, threshold: f64) -> Result<LsReport> {
    if n_grid < 8 {
        return Err(Error::InvalidArgument(format!("n_grid = {n_grid} < 8")));
    }
    let grid = parameter_hemisphere(n_grid);
    let evaluated = grid
        .par_iter()
        .map(|p| {
            let up = ls_abs_det(gamma, frame, p.xi, p.mu)?;
            let down = if p.mu > 0.0 { ls_abs_det(gamma, frame, p.xi, -p.mu)? } else { up };
            Ok((up, down))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut samples = Vec::with_capacity(2 * grid.len());
    let mut asym: f64 = 0.0;
    for (i, (p, (up, down))) in grid.iter().zip(evaluated).enumerate() {
        asym = asym.max((up - down).abs());
        samples.push(LsEvaluation { point: LsPoint { sample_id: 0, xi: p.xi, mu: p.mu }, abs_det: up });
        if p.mu > 0.0 {
            let _ = i;
            samples.push(LsEvaluation { point: LsPoint { sample_id: 0, xi: p.xi, mu: -p.mu }, abs_det: down });
        }
    }
    LsReport::from_samples(samples, threshold, Some(asym))
}

/// Which published closed form for the block-diagonal coupling a numeric
/// |det ℒ|² agrees with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedFormKind {
    /// 16|ξ′|⁸(1 − γε)²
    Quadratic,
    /// 16ρ⁸(1 − γε)⁴
    Quartic,
}

impl ClosedFormKind {
    pub fn formula(self) -> &'static str {
        match self {
            ClosedFormKind::Quadratic => "16|xi'|^8 (1 - gamma*epsilon)^2",
            ClosedFormKind::Quartic => "16 rho^8 (1 - gamma*epsilon)^4",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedForms {
    pub quadratic: f64,
    pub quartic: f64,
}

impl ClosedForms {
    pub fn get(&self, kind: ClosedFormKind) -> f64 {
        match kind {
            ClosedFormKind::Quadratic => self.quadratic,
            ClosedFormKind::Quartic => self.quartic,
        }
    }

    /// Forms that agree with `value` to relative tolerance `rel_tol`.
    pub fn matching(&self, value: f64, rel_tol: f64) -> Vec<ClosedFormKind> {
        [ClosedFormKind::Quadratic, ClosedFormKind::Quartic]
            .into_iter()
            .filter(|&k| rel_close(self.get(k), value, rel_tol))
            .collect()
    }
}

fn rel_close(a: f64, b: f64, rel_tol: f64) -> bool {
    (a - b).abs() <= rel_tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Both published closed forms for |det ℒ|² of the coupling diag(γI₂, εI₂).
pub fn closed_form_diag_det(gamma: f64, epsilon: f64, xi_norm: f64, mu: f64) -> ClosedForms {
    let q = 1.0 - gamma * epsilon;
    let rho2 = xi_norm * xi_norm + mu * mu;
    ClosedForms { quadratic: 16.0 * xi_norm.powi(8) * q * q, quartic: 16.0 * rho2.powi(4) * q.powi(4) }
}

/// |det ℒ|² for diag(γI₂, εI₂) valid for every μ:
/// 16ρ⁴[ρ²(1 − γε)² + μ²(γ + ε)²]². Coincides with the quartic form at μ = 0.
pub fn diag_det_squared(gamma: f64, epsilon: f64, xi_norm: f64, mu: f64) -> f64 {
    let rho2 = xi_norm * xi_norm + mu * mu;
    let q = 1.0 - gamma * epsilon;
    let s = gamma + epsilon;
    16.0 * rho2 * rho2 * (rho2 * q * q + mu * mu * s * s).powi(2)
}

/// |η² − τ² − 4|.
pub fn electrostatic_lorentz_margin(eta: f64, tau: f64) -> f64 {
    (eta * eta - tau * tau - 4.0).abs()
}

/// True iff Γ(s) is Hermitian (to 1e-10) at every sampled surface point.
pub fn hermitian_check<F>(gamma_field: F, surface: &SurfaceModel, n_s: usize) -> Result<bool>
where
    F: Fn(&SurfaceSample) -> InteractionMatrix,
{
    let points = surface.sample(n_s)?;
    Ok(points.iter().all(|p| gamma_field(p).is_hermitian(1e-10)))
}

/// The Pauli matrices are needed by callers that assemble Λ± by hand.
pub fn sigma_dot(xi: [f64; 2], third: C64) -> CMat2 {
    pauli(1).unwrap() * C64::from(xi[0]) + pauli(2).unwrap() * C64::from(xi[1]) + pauli(3).unwrap() * third
}
