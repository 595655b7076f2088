//! Interaction-surface models and their deterministic sampling.
//!
//! Normals point outward from Ω₊ (out of the ball for a sphere, away from
//! the axis for a cone, along the stored normal for a plane). Reversing ν
//! swaps a₊ and a₋ and leaves |det ℒ| unchanged.

use serde::{Deserialize, Serialize};

use crate::clifford::Vec3;
use crate::error::{Error, Result};
use crate::shell_symbol::Frame;

/// Geometric radii used for unbounded surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialSampling {
    pub r_min: f64,
    pub r_max: f64,
    pub n_radii: usize,
}

impl Default for RadialSampling {
    fn default() -> Self {
        RadialSampling { r_min: 1.0, r_max: 1e3, n_radii: 12 }
    }
}

impl RadialSampling {
    pub fn radii(&self) -> Vec<f64> {
        if self.n_radii == 1 {
            return vec![self.r_max];
        }
        let ratio = (self.r_max / self.r_min).powf(1.0 / (self.n_radii - 1) as f64);
        (0..self.n_radii)
            .map(|k| if k + 1 == self.n_radii { self.r_max } else { self.r_min * ratio.powi(k as i32) })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if !(self.r_min > 0.0 && self.r_max >= self.r_min && self.r_max.is_finite() && self.n_radii >= 1) {
            return Err(Error::InvalidSurface(format!("bad radial sampling {self:?}")));
        }
        Ok(())
    }
}

/// Intrinsic coordinate of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceCoord {
    /// Polar angle from +z and azimuth.
    Spherical { theta: f64, phi: f64 },
    /// Distance from the surface origin (apex / foot point) and azimuth.
    Radial { radius: f64, phi: f64 },
    Index { index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSample {
    pub id: usize,
    pub point: Vec3,
    pub frame: Frame,
    pub coord: SurfaceCoord,
}

impl SurfaceSample {
    /// Distance of the sample from the origin of the surface coordinates.
    pub fn radius(&self) -> f64 {
        match self.coord {
            SurfaceCoord::Radial { radius, .. } => radius,
            _ => self.point.norm(),
        }
    }
}

/// A direction ω on the sphere at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfinityDirection {
    pub omega: Vec3,
    pub on_sigma_infinity: bool,
    pub normal_at_infinity: Option<Vec3>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceModel {
    Sphere {
        radius: f64,
    },
    Plane {
        normal: Vec3,
        offset: f64,
        #[serde(default)]
        sampling: RadialSampling,
    },
    /// Exactly conic beyond `apex_radius`; only that part is sampled.
    Cone {
        axis: Vec3,
        half_angle: f64,
        apex_radius: f64,
        #[serde(default)]
        sampling: RadialSampling,
    },
    /// User-supplied samples. Uniform regularity cannot be checked from
    /// finite data, so it is carried as an assertion.
    ParametricGrid {
        samples: Vec<SurfaceSample>,
        uniformly_regular: bool,
        infinity: Vec<InfinityDirection>,
    },
}

fn unit(v: &Vec3, what: &str) -> Result<Vec3> {
    let n = v.norm();
    if !(n.is_finite() && (n - 1.0).abs() <= 1e-10) {
        return Err(Error::InvalidSurface(format!("{what} must be a unit vector (|v| = {n})")));
    }
    Ok(*v)
}

/// Orthonormal pair (e₁, e₂) completing `axis` to a right-handed basis.
fn complete_basis(axis: &Vec3) -> (Vec3, Vec3) {
    let f = Frame::from_normal(*axis).expect("unit axis");
    (f.t1, f.t2)
}

/// Fibonacci points on the unit sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<Vec3> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            Vec3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

impl SurfaceModel {
    pub fn sphere(radius: f64) -> Self {
        SurfaceModel::Sphere { radius }
    }

    pub fn plane(normal: Vec3, offset: f64) -> Self {
        SurfaceModel::Plane { normal, offset, sampling: RadialSampling::default() }
    }

    pub fn cone(axis: Vec3, half_angle: f64, apex_radius: f64) -> Self {
        SurfaceModel::Cone { axis, half_angle, apex_radius, sampling: RadialSampling::default() }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SurfaceModel::Sphere { radius } => {
                if !(*radius > 0.0 && radius.is_finite()) {
                    return Err(Error::InvalidSurface(format!("sphere radius {radius} must be positive")));
                }
            }
            SurfaceModel::Plane { normal, offset, sampling } => {
                unit(normal, "plane normal")?;
                if !offset.is_finite() {
                    return Err(Error::InvalidSurface("plane offset must be finite".into()));
                }
                sampling.validate()?;
            }
            SurfaceModel::Cone { axis, half_angle, apex_radius, sampling } => {
                unit(axis, "cone axis")?;
                if !(*half_angle > 0.0 && *half_angle < std::f64::consts::FRAC_PI_2) {
                    return Err(Error::InvalidSurface(format!("cone half-angle {half_angle} outside (0, pi/2)")));
                }
                if !(*apex_radius >= 0.0 && apex_radius.is_finite()) {
                    return Err(Error::InvalidSurface(format!("cone apex radius {apex_radius} must be >= 0")));
                }
                sampling.validate()?;
            }
            SurfaceModel::ParametricGrid { samples, .. } => {
                for s in samples {
                    if s.frame.deviation() > 1e-10 {
                        return Err(Error::InvalidSurface(format!("sample {} has a non-orthonormal frame", s.id)));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_compact(&self) -> bool {
        matches!(self, SurfaceModel::Sphere { .. })
    }

    pub fn is_conic_at_infinity(&self) -> bool {
        match self {
            SurfaceModel::Sphere { .. } => false,
            SurfaceModel::Plane { .. } | SurfaceModel::Cone { .. } => true,
            SurfaceModel::ParametricGrid { infinity, .. } => infinity.iter().any(|d| d.on_sigma_infinity),
        }
    }

    /// Deterministic samples with frames. Unbounded surfaces are sampled on
    /// whole rings at geometrically growing radii, `ceil(n / n_radii)` points
    /// per ring, so the result may hold more than `n` samples.
    pub fn sample(&self, n: usize) -> Result<Vec<SurfaceSample>> {
        if n == 0 {
            return Err(Error::InvalidArgument("sample count must be >= 1".into()));
        }
        self.validate()?;
        match self {
            SurfaceModel::Sphere { radius } => fibonacci_sphere(n)
                .into_iter()
                .enumerate()
                .map(|(id, dir)| {
                    let frame = Frame::from_normal(dir)?;
                    let theta = dir.z.clamp(-1.0, 1.0).acos();
                    let phi = dir.y.atan2(dir.x);
                    Ok(SurfaceSample { id, point: dir * *radius, frame, coord: SurfaceCoord::Spherical { theta, phi } })
                })
                .collect(),
            SurfaceModel::Plane { normal, offset, sampling } => {
                let (e1, e2) = complete_basis(normal);
                let foot = normal * *offset;
                let mut out = Vec::new();
                let per_ring = n.div_ceil(sampling.n_radii);
                for radius in sampling.radii() {
                    for k in 0..per_ring {
                        let phi = std::f64::consts::TAU * k as f64 / per_ring as f64;
                        let dir = e1 * phi.cos() + e2 * phi.sin();
                        let frame = Frame::from_normal_and_tangent(*normal, dir)?;
                        out.push(SurfaceSample {
                            id: out.len(),
                            point: foot + dir * radius,
                            frame,
                            coord: SurfaceCoord::Radial { radius, phi },
                        });
                    }
                }
                Ok(out)
            }
            SurfaceModel::Cone { axis, half_angle, apex_radius, sampling } => {
                let (e1, e2) = complete_basis(axis);
                let (s, c) = half_angle.sin_cos();
                let start = sampling.r_min.max(*apex_radius);
                let radial = RadialSampling { r_min: start, r_max: sampling.r_max.max(start), n_radii: sampling.n_radii };
                let per_ring = n.div_ceil(sampling.n_radii);
                let mut out = Vec::new();
                for radius in radial.radii() {
                    for k in 0..per_ring {
                        let phi = std::f64::consts::TAU * k as f64 / per_ring as f64;
                        let (omega, nu) = cone_direction(&e1, &e2, axis, s, c, phi);
                        let frame = Frame::from_normal_and_tangent(nu, omega)?;
                        out.push(SurfaceSample {
                            id: out.len(),
                            point: omega * radius,
                            frame,
                            coord: SurfaceCoord::Radial { radius, phi },
                        });
                    }
                }
                Ok(out)
            }
            SurfaceModel::ParametricGrid { samples, .. } => {
                if samples.is_empty() {
                    return Err(Error::EmptySamples);
                }
                Ok(samples.iter().take(n).copied().collect())
            }
        }
    }

    /// Directions at infinity. For a sphere all `n` Fibonacci directions lie
    /// off Σ∞. For a plane or cone, `n` directions on Σ∞ (carrying the
    /// limiting normal) are followed by the Fibonacci directions that are
    /// not on Σ∞.
    pub fn infinity_directions(&self, n: usize) -> Result<Vec<InfinityDirection>> {
        self.validate()?;
        let off = |pred: &dyn Fn(&Vec3) -> bool| -> Vec<InfinityDirection> {
            fibonacci_sphere(n)
                .into_iter()
                .filter(|w| !pred(w))
                .map(|omega| InfinityDirection { omega, on_sigma_infinity: false, normal_at_infinity: None })
                .collect()
        };
        match self {
            SurfaceModel::Sphere { .. } => Ok(off(&|_| false)),
            SurfaceModel::Plane { normal, .. } => {
                let (e1, e2) = complete_basis(normal);
                let mut out: Vec<InfinityDirection> = (0..n)
                    .map(|k| {
                        let phi = std::f64::consts::TAU * k as f64 / n as f64;
                        InfinityDirection {
                            omega: e1 * phi.cos() + e2 * phi.sin(),
                            on_sigma_infinity: true,
                            normal_at_infinity: Some(*normal),
                        }
                    })
                    .collect();
                out.extend(off(&|w: &Vec3| w.dot(normal).abs() < 1e-9));
                Ok(out)
            }
            SurfaceModel::Cone { axis, half_angle, .. } => {
                let (e1, e2) = complete_basis(axis);
                let (s, c) = half_angle.sin_cos();
                let mut out: Vec<InfinityDirection> = (0..n)
                    .map(|k| {
                        let phi = std::f64::consts::TAU * k as f64 / n as f64;
                        let (omega, nu) = cone_direction(&e1, &e2, axis, s, c, phi);
                        InfinityDirection { omega, on_sigma_infinity: true, normal_at_infinity: Some(nu) }
                    })
                    .collect();
                out.extend(off(&|w: &Vec3| (w.dot(axis) - c).abs() < 1e-9));
                Ok(out)
            }
            SurfaceModel::ParametricGrid { infinity, .. } => Ok(infinity.clone()),
        }
    }
}

/// Generator direction ω at azimuth φ and the outward normal along it.
fn cone_direction(e1: &Vec3, e2: &Vec3, axis: &Vec3, s: f64, c: f64, phi: f64) -> (Vec3, Vec3) {
    let radial = e1 * phi.cos() + e2 * phi.sin();
    let omega = radial * s + axis * c;
    let nu = radial * c - axis * s;
    (omega, nu)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_samples_have_outward_normals() {
        let samples = SurfaceModel::sphere(1.0).sample(6).unwrap();
        assert_eq!(samples.len(), 6);
        for s in &samples {
            assert!((s.point.norm() - 1.0).abs() < 1e-14);
            assert!((s.frame.nu - s.point).norm() < 1e-14);
            assert!(s.frame.deviation() < 1e-10);
        }
        let big = SurfaceModel::sphere(3.0).sample(50).unwrap();
        for s in &big {
            assert!((s.frame.nu - s.point / 3.0).norm() < 1e-14);
        }
    }

    #[test]
    fn plane_frames_share_normal() {
        let samples = SurfaceModel::plane(Vec3::z(), 0.0).sample(24).unwrap();
        assert_eq!(samples.len(), 24);
        for s in &samples {
            assert_eq!(s.frame.nu, Vec3::z());
            assert!(s.point.z.abs() < 1e-12);
            assert!(s.frame.deviation() < 1e-10);
        }
        let max_r = samples.iter().map(|s| s.radius()).fold(0.0, f64::max);
        assert_eq!(max_r, 1e3);
    }

    #[test]
    fn cone_normals_are_orthogonal_to_position() {
        let cone = SurfaceModel::cone(Vec3::z(), std::f64::consts::FRAC_PI_4, 0.0);
        let samples = cone.sample(36).unwrap();
        for s in &samples {
            assert!(s.frame.nu.dot(&s.point).abs() < 1e-9 * s.point.norm());
            assert!(s.frame.deviation() < 1e-10);
            let angle = (s.point.z / s.point.norm()).acos();
            assert!((angle - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
            // outward: away from the axis
            assert!(s.frame.nu.x * s.point.x + s.frame.nu.y * s.point.y > 0.0);
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(SurfaceModel::sphere(0.0).sample(4).is_err());
        assert!(SurfaceModel::plane(Vec3::new(1.0, 1.0, 0.0), 0.0).sample(4).is_err());
        assert!(SurfaceModel::cone(Vec3::z(), 1.7, 0.0).sample(4).is_err());
        assert!(SurfaceModel::sphere(1.0).sample(0).is_err());
    }

    #[test]
    fn sphere_has_empty_sigma_infinity() {
        let dirs = SurfaceModel::sphere(1.0).infinity_directions(32).unwrap();
        assert_eq!(dirs.len(), 32);
        assert!(dirs.iter().all(|d| !d.on_sigma_infinity));
    }

    #[test]
    fn plane_sigma_infinity_is_equator() {
        let dirs = SurfaceModel::plane(Vec3::z(), 2.0).infinity_directions(16).unwrap();
        let on: Vec<_> = dirs.iter().filter(|d| d.on_sigma_infinity).collect();
        assert_eq!(on.len(), 16);
        for d in on {
            assert!(d.omega.z.abs() < 1e-14);
            assert_eq!(d.normal_at_infinity, Some(Vec3::z()));
        }
    }

    #[test]
    fn cone_sigma_infinity_at_half_angle() {
        let a = std::f64::consts::FRAC_PI_4;
        let dirs = SurfaceModel::cone(Vec3::z(), a, 0.5).infinity_directions(16).unwrap();
        for d in dirs.iter().filter(|d| d.on_sigma_infinity) {
            assert!((d.omega.z.acos() - a).abs() < 1e-12);
            let nu = d.normal_at_infinity.unwrap();
            assert!(nu.dot(&d.omega).abs() < 1e-14);
            assert!((nu.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn sampled_normals_converge_to_normal_at_infinity() {
        let cone = SurfaceModel::cone(Vec3::new(0.0, 0.6, 0.8), 0.5, 2.0);
        let samples = cone.sample(12 * 8).unwrap();
        let dirs = cone.infinity_directions(8).unwrap();
        for d in dirs.iter().filter(|d| d.on_sigma_infinity) {
            let far: Vec<_> = samples
                .iter()
                .filter(|s| (s.point.normalize() - d.omega).norm() < 1e-9)
                .collect();
            assert_eq!(far.len(), 12);
            for s in far {
                assert!((s.frame.nu - d.normal_at_infinity.unwrap()).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let cone = SurfaceModel::cone(Vec3::z(), 0.3, 1.0);
        assert_eq!(cone.sample(40).unwrap(), cone.sample(40).unwrap());
    }

    #[test]
    fn radii_are_geometric_up_to_cutoff() {
        let r = RadialSampling::default().radii();
        assert_eq!(r.len(), 12);
        assert_eq!(r[0], 1.0);
        assert_eq!(r[11], 1e3);
        for w in r.windows(2) {
            assert!(w[1] > w[0]);
        }
    }
}
