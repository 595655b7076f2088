//! Pauli and Dirac matrices in the standard representation, plus the small
//! fixed-size complex linear algebra shared by the rest of the crate.
//!
//! All generators have entries in {0, ±1, ±i}, so products and
//! anticommutators of generators are computed exactly in floating point.

use nalgebra::{Matrix2, Matrix4, Vector3, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat2 = Matrix2<C64>;
pub type CMat4 = Matrix4<C64>;
pub type CVec4 = Vector4<C64>;
pub type Vec3 = Vector3<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Checked complex scalar constructor; rejects NaN and infinities.
pub fn scalar(re: f64, im: f64) -> Result<C64> {
    if re.is_finite() && im.is_finite() {
        Ok(C64::new(re, im))
    } else {
        Err(Error::NonFinite("complex scalar"))
    }
}

/// Checked real 3-vector constructor.
pub fn vec3(x: f64, y: f64, z: f64) -> Result<Vec3> {
    if x.is_finite() && y.is_finite() && z.is_finite() {
        Ok(Vec3::new(x, y, z))
    } else {
        Err(Error::NonFinite("3-vector"))
    }
}

/// Pauli matrix σ_j for j ∈ {1, 2, 3}.
pub fn pauli(j: usize) -> Result<CMat2> {
    match j {
        1 => Ok(CMat2::new(ZERO, ONE, ONE, ZERO)),
        2 => Ok(CMat2::new(ZERO, -I, I, ZERO)),
        3 => Ok(CMat2::new(ONE, ZERO, ZERO, -ONE)),
        _ => Err(Error::IndexOutOfRange { what: "Pauli", index: j }),
    }
}

/// 4×4 matrix with 2×2 blocks `[[a, b], [c, d]]`.
pub fn from_blocks(a: &CMat2, b: &CMat2, c: &CMat2, d: &CMat2) -> CMat4 {
    let mut m = CMat4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(a);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(b);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(c);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(d);
    m
}

/// Dirac matrix α_j for j ∈ {0, 1, 2, 3}: α₀ = diag(I₂, −I₂) and
/// α_j = [[0, σ_j], [σ_j, 0]].
pub fn dirac_alpha(j: usize) -> Result<CMat4> {
    let zero = CMat2::zeros();
    match j {
        0 => {
            let id = CMat2::identity();
            Ok(from_blocks(&id, &zero, &zero, &(-id)))
        }
        1..=3 => {
            let s = pauli(j)?;
            Ok(from_blocks(&zero, &s, &s, &zero))
        }
        _ => Err(Error::IndexOutOfRange { what: "Dirac", index: j }),
    }
}

/// The four Dirac generators as a value, so that identity checks can be run
/// against a deliberately perturbed set.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracGenerators {
    pub alpha: [CMat4; 4],
}

impl DiracGenerators {
    pub fn standard() -> Self {
        let alpha = [0, 1, 2, 3].map(|j| dirac_alpha(j).expect("index in range"));
        Self { alpha }
    }

    /// Σ_j v_j α_j over the spatial generators.
    pub fn dot(&self, v: &Vec3) -> CMat4 {
        self.alpha[1] * C64::from(v.x) + self.alpha[2] * C64::from(v.y) + self.alpha[3] * C64::from(v.z)
    }
}

impl Default for DiracGenerators {
    fn default() -> Self {
        Self::standard()
    }
}

/// α·v = v₁α₁ + v₂α₂ + v₃α₃.
pub fn alpha_dot(v: &Vec3) -> CMat4 {
    let zero = CMat2::zeros();
    let s = pauli(1).unwrap() * C64::from(v.x)
        + pauli(2).unwrap() * C64::from(v.y)
        + pauli(3).unwrap() * C64::from(v.z);
    from_blocks(&zero, &s, &s, &zero)
}

pub fn anticommutator<const N: usize>(
    a: &nalgebra::SMatrix<C64, N, N>,
    b: &nalgebra::SMatrix<C64, N, N>,
) -> nalgebra::SMatrix<C64, N, N> {
    a * b + b * a
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff<const R: usize, const C: usize>(
    a: &nalgebra::SMatrix<C64, R, C>,
    b: &nalgebra::SMatrix<C64, R, C>,
) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn is_hermitian<const N: usize>(m: &nalgebra::SMatrix<C64, N, N>, tol: f64) -> bool {
    max_abs_diff(m, &m.adjoint()) <= tol
}

/// Real diagonal 4×4 matrix.
pub fn diag4(d: [f64; 4]) -> CMat4 {
    CMat4::from_diagonal(&CVec4::new(d[0].into(), d[1].into(), d[2].into(), d[3].into()))
}

/// Hermitian inner product ⟨a, b⟩ = Σ conj(a_i) b_i.
pub fn inner(a: &CVec4, b: &CVec4) -> C64 {
    a.dotc(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn pauli_one_matches_display() {
        assert_eq!(pauli(1).unwrap(), CMat2::new(ZERO, ONE, ONE, ZERO));
        assert!(pauli(0).is_err());
        assert!(pauli(4).is_err());
    }

    #[test]
    fn pauli_relations_are_exact() {
        let id = CMat2::identity();
        for j in 1..=3 {
            for k in 1..=3 {
                let sj = pauli(j).unwrap();
                let sk = pauli(k).unwrap();
                let expected = if j == k { id * c(2.0, 0.0) } else { CMat2::zeros() };
                assert_eq!(anticommutator(&sj, &sk), expected, "j={j} k={k}");
            }
        }
        assert_eq!(pauli(3).unwrap() * pauli(3).unwrap(), id);
    }

    #[test]
    fn dirac_alpha_zero_is_diagonal() {
        assert_eq!(dirac_alpha(0).unwrap(), diag4([1.0, 1.0, -1.0, -1.0]));
        assert!(dirac_alpha(4).is_err());
    }

    #[test]
    fn dirac_anticommutation_is_exact() {
        for j in 0..4 {
            for k in 0..4 {
                let aj = dirac_alpha(j).unwrap();
                let ak = dirac_alpha(k).unwrap();
                let expected = if j == k { CMat4::identity() * c(2.0, 0.0) } else { CMat4::zeros() };
                assert_eq!(anticommutator(&aj, &ak), expected, "j={j} k={k}");
            }
        }
    }

    #[test]
    fn alpha_dot_examples() {
        assert_eq!(alpha_dot(&Vec3::new(0.0, 0.0, 1.0)), dirac_alpha(3).unwrap());
        let a = alpha_dot(&Vec3::new(1.0, 1.0, 0.0));
        assert_eq!(a * a, CMat4::identity() * c(2.0, 0.0));
        let b = alpha_dot(&Vec3::new(3.0, 4.0, 0.0));
        assert_eq!(b * b, CMat4::identity() * c(25.0, 0.0));
        assert_eq!(DiracGenerators::standard().dot(&Vec3::new(3.0, 4.0, 0.0)), b);
    }

    #[test]
    fn unit_alpha_dot_is_hermitian_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let v = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let v = v.normalize();
            let a = alpha_dot(&v);
            assert!(is_hermitian(&a, 1e-15));
            assert!(max_abs_diff(&(a * a), &CMat4::identity()) < 1e-14);
        }
    }

    #[test]
    fn determinant_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut random_unit = || {
            let m = CMat4::from_fn(|_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            m / C64::from(m.norm())
        };
        for _ in 0..100 {
            let a = random_unit();
            let b = random_unit();
            let lhs = (a * b).determinant();
            let rhs = a.determinant() * b.determinant();
            assert!((lhs - rhs).norm() < 1e-12);
            assert!((a.adjoint().determinant() - a.determinant().conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn scalar_rejects_non_finite() {
        assert!(scalar(f64::NAN, 0.0).is_err());
        assert!(scalar(0.0, f64::INFINITY).is_err());
        assert_eq!(scalar(1.0, -2.0).unwrap(), c(1.0, -2.0));
        assert!(vec3(1.0, f64::NAN, 0.0).is_err());
    }
}
