//! Algebraic identity battery and the closed-form comparison for the
//! block-diagonal coupling.

use deltashell::clifford::{anticommutator, max_abs_diff, pauli, CMat2, CMat4, DiracGenerators, C64, I};
use deltashell::shell_symbol::{
    closed_form_diag_det, diag_det_squared, h_basis, lambda_pm, ls_abs_det, ClosedFormKind, Frame, InteractionMatrix,
    Sign,
};
use nalgebra::Vector2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const IDENTITY_TOL: f64 = 1e-12;
pub const CLOSED_FORM_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityResult {
    pub name: String,
    pub statement: String,
    pub samples: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormCount {
    pub form: ClosedFormKind,
    pub formula: String,
    pub matches: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormComparison {
    pub samples: usize,
    pub rel_tol: f64,
    pub counts: Vec<FormCount>,
    /// The single published form that matches every sample, if any.
    pub uniform_match: Option<ClosedFormKind>,
    pub exact_formula: String,
    pub exact_max_rel_error: f64,
    /// |det| at points with γε = 1, μ = 0.
    pub zero_locus_points: usize,
    pub zero_locus_max_abs_det: f64,
    /// Smallest |det| at the same points moved off the locus.
    pub off_locus_min_abs_det: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyResult {
    pub seed: u64,
    pub identities: Vec<IdentityResult>,
    pub closed_forms: ClosedFormComparison,
}

impl VerifyResult {
    pub fn failures(&self) -> Vec<&IdentityResult> {
        self.identities.iter().filter(|i| !i.pass).collect()
    }
}

/// Standard generators with one entry of α₂ negated.
pub fn tampered_generators() -> DiracGenerators {
    let mut g = DiracGenerators::standard();
    g.alpha[2][(0, 3)] = -g.alpha[2][(0, 3)];
    g
}

fn identity(name: &str, statement: &str, samples: usize, max_error: f64, tolerance: f64) -> IdentityResult {
    IdentityResult {
        name: name.into(),
        statement: statement.into(),
        samples,
        max_error,
        tolerance,
        pass: max_error <= tolerance,
    }
}

fn unit_cotangent(rng: &mut ChaCha8Rng) -> ([f64; 2], f64) {
    let mu: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - mu * mu).sqrt();
    ([r * phi.cos(), r * phi.sin()], mu)
}

fn cvec2(rng: &mut ChaCha8Rng) -> Vector2<C64> {
    Vector2::new(
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
    )
}

pub fn run_identities(gens: &DiracGenerators, n_samples: usize, seed: u64) -> Vec<IdentityResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();

    let mut err: f64 = 0.0;
    for j in 1..=3 {
        for k in 1..=3 {
            let target = if j == k { CMat2::identity() * C64::from(2.0) } else { CMat2::zeros() };
            err = err.max(max_abs_diff(&anticommutator(&pauli(j).unwrap(), &pauli(k).unwrap()), &target));
        }
    }
    out.push(identity("pauli_anticommutation", "s_j s_k + s_k s_j = 2 delta_jk I2", 9, err, 0.0));

    let mut err: f64 = 0.0;
    for j in 0..4 {
        for k in 0..4 {
            let target = if j == k { CMat4::identity() * C64::from(2.0) } else { CMat4::zeros() };
            err = err.max(max_abs_diff(&anticommutator(&gens.alpha[j], &gens.alpha[k]), &target));
        }
    }
    out.push(identity("dirac_anticommutation", "a_j a_k + a_k a_j = 2 delta_jk I4, j,k = 0..3", 16, err, 0.0));

    let err = gens.alpha.iter().map(|a| max_abs_diff(a, &a.adjoint())).fold(0.0, f64::max);
    out.push(identity("dirac_hermitian", "a_j* = a_j", 4, err, 0.0));

    let mut err: f64 = 0.0;
    for _ in 0..n_samples {
        let r: f64 = rng.random_range(0.1..5.0);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let xi = [r * phi.cos(), r * phi.sin()];
        let p = lambda_pm(xi, 0.0, Sign::Plus).unwrap() * cvec2(&mut rng);
        let m = lambda_pm(xi, 0.0, Sign::Minus).unwrap() * cvec2(&mut rng);
        err = err.max(m.dotc(&p).norm() / (r * r));
    }
    out.push(identity(
        "lambda_range_orthogonality",
        "<L-(xi,0) f2, L+(xi,0) f1> = 0",
        n_samples,
        err,
        IDENTITY_TOL,
    ));

    let mut err: f64 = 0.0;
    for _ in 0..n_samples {
        let (xi, mu) = unit_cotangent(&mut rng);
        let p = lambda_pm(xi, mu, Sign::Plus).unwrap();
        let m = lambda_pm(xi, mu, Sign::Minus).unwrap();
        let target = CMat2::identity() * C64::from(-mu * mu);
        err = err
            .max(max_abs_diff(&p.adjoint(), &m))
            .max(max_abs_diff(&(p * p), &target))
            .max(max_abs_diff(&(m * m), &target));
    }
    out.push(identity(
        "lambda_square_and_adjoint",
        "L+^2 = L-^2 = -mu^2 I2, L+* = L- on rho = 1",
        n_samples,
        err,
        IDENTITY_TOL,
    ));

    let mut err: f64 = 0.0;
    for _ in 0..n_samples {
        let (xi, mu) = unit_cotangent(&mut rng);
        let h = h_basis(xi, mu).unwrap();
        let sym = |sign: f64| {
            gens.alpha[1] * C64::from(xi[0]) + gens.alpha[2] * C64::from(xi[1]) + gens.alpha[3] * (I * sign)
                - CMat4::identity() * (I * mu)
        };
        for v in h.plus {
            err = err.max((sym(1.0) * v).norm());
        }
        for v in h.minus {
            err = err.max((sym(-1.0) * v).norm());
        }
    }
    out.push(identity(
        "decaying_kernel",
        "(a'.xi +/- i rho a3 - i mu I4) h+/- = 0 on rho = 1",
        n_samples,
        err,
        IDENTITY_TOL,
    ));
    out
}

pub fn compare_closed_forms(n_samples: usize, n_locus: usize, seed: u64) -> ClosedFormComparison {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_c105_ed00);
    let mut counts = [0usize; 2];
    let mut exact_err: f64 = 0.0;
    for _ in 0..n_samples {
        let gamma: f64 = rng.random_range(-2.0..2.0);
        let epsilon: f64 = rng.random_range(-2.0..2.0);
        let r: f64 = rng.random_range(0.1..2.0);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let mu: f64 = rng.random_range(-2.0..2.0);
        let xi = [r * phi.cos(), r * phi.sin()];
        let g = InteractionMatrix::DiagonalPair { gamma, epsilon };
        let numeric = ls_abs_det(&g, &Frame::standard(), xi, mu).unwrap().powi(2);
        let forms = closed_form_diag_det(gamma, epsilon, r, mu);
        for kind in forms.matching(numeric, CLOSED_FORM_REL_TOL) {
            counts[kind as usize] += 1;
        }
        let exact = diag_det_squared(gamma, epsilon, r, mu);
        exact_err = exact_err.max((numeric - exact).abs() / exact.abs().max(f64::MIN_POSITIVE));
    }
    let kinds = [ClosedFormKind::Quadratic, ClosedFormKind::Quartic];
    let uniform: Vec<ClosedFormKind> = kinds.into_iter().filter(|k| counts[*k as usize] == n_samples).collect();

    let mut on: f64 = 0.0;
    let mut off = f64::INFINITY;
    for _ in 0..n_locus {
        let t: f64 = rng.random_range(0.2..5.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let xi = [phi.cos(), phi.sin()];
        let at = |eps: f64| {
            ls_abs_det(&InteractionMatrix::DiagonalPair { gamma: t, epsilon: eps }, &Frame::standard(), xi, 0.0)
                .unwrap()
        };
        on = on.max(at(1.0 / t));
        off = off.min(at(1.1 / t));
    }

    ClosedFormComparison {
        samples: n_samples,
        rel_tol: CLOSED_FORM_REL_TOL,
        counts: kinds
            .into_iter()
            .map(|k| FormCount { form: k, formula: k.formula().into(), matches: counts[k as usize] })
            .collect(),
        uniform_match: if uniform.len() == 1 { Some(uniform[0]) } else { None },
        exact_formula: "16 rho^4 [rho^2 (1 - gamma*epsilon)^2 + mu^2 (gamma + epsilon)^2]^2".into(),
        exact_max_rel_error: exact_err,
        zero_locus_points: n_locus,
        zero_locus_max_abs_det: on,
        off_locus_min_abs_det: off,
    }
}

pub fn verify(gens: &DiracGenerators, seed: u64) -> VerifyResult {
    VerifyResult { seed, identities: run_identities(gens, 1000, seed), closed_forms: compare_closed_forms(200, 20, seed) }
}
