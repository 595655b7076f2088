//! Slowly oscillating potentials, limit operators at infinity, and the
//! essential spectrum assembled from them.
//!
//! Off the set Σ∞ of shell directions the limit operators are free Dirac
//! operators shifted by a limit value Φ^h of the potential; on Σ∞ they are
//! half-space transmission problems whose tangential Fourier reduction is the
//! one-dimensional problem of [`crate::transmission1d`].

use serde::{Deserialize, Serialize};

use crate::clifford::{from_blocks, pauli, CMat2, CMat4, Vec3, C64, I};
use crate::error::{Error, Result};
use crate::shell_symbol::InteractionMatrix;
use crate::spectrum::{Interval, SpectrumSet};
use crate::surfaces::{InfinityDirection, SurfaceModel};
use crate::transmission1d::{dispersion_curve, DispersionTable, GapSearch};

/// Radial profiles with known partial limits at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialProfile {
    /// sin(log(1 + r)); partial limits fill [−1, 1].
    SinLog,
}

impl RadialProfile {
    pub fn eval(self, r: f64) -> f64 {
        match self {
            RadialProfile::SinLog => r.ln_1p().sin(),
        }
    }

    /// (liminf, limsup) as r → ∞.
    pub fn limit_range(self) -> (f64, f64) {
        match self {
            RadialProfile::SinLog => (-1.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionalLimit {
    pub direction: Vec3,
    pub value: f64,
}

/// Scalar potential Φ (or one component of A).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum PotentialModel {
    Constant { value: f64 },
    RadialSo { base: f64, amplitude: f64, profile: RadialProfile },
    /// Limit function ω ↦ Φ∞(ω) taking the value of the nearest declared
    /// direction.
    DirectionalSo { limits: Vec<DirectionalLimit> },
}

/// Vector potential; it does not enter any spectral formula implemented here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorPotential {
    pub components: [PotentialModel; 3],
}

impl Default for VectorPotential {
    fn default() -> Self {
        let zero = PotentialModel::Constant { value: 0.0 };
        VectorPotential { components: [zero.clone(), zero.clone(), zero] }
    }
}

impl PotentialModel {
    pub fn eval(&self, x: &Vec3) -> f64 {
        match self {
            PotentialModel::Constant { value } => *value,
            PotentialModel::RadialSo { base, amplitude, profile } => base + amplitude * profile.eval(x.norm()),
            PotentialModel::DirectionalSo { limits } => {
                let r = x.norm();
                if r == 0.0 || limits.is_empty() {
                    return limits.first().map_or(0.0, |l| l.value);
                }
                self.limit_along(&(x / r)).unwrap_or(0.0)
            }
        }
    }

    /// Limit values of Φ(tω) as t → ∞ (a single value or the whole range).
    pub fn limit_along(&self, omega: &Vec3) -> Option<f64> {
        match self {
            PotentialModel::Constant { value } => Some(*value),
            PotentialModel::RadialSo { .. } => None,
            PotentialModel::DirectionalSo { limits } => limits
                .iter()
                .max_by(|a, b| a.direction.dot(omega).total_cmp(&b.direction.dot(omega)))
                .map(|l| l.value),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PotentialModel::Constant { value } if !value.is_finite() => Err(Error::NonFinite("potential value")),
            PotentialModel::RadialSo { base, amplitude, .. } if !(base.is_finite() && amplitude.is_finite()) => {
                Err(Error::NonFinite("potential coefficients"))
            }
            PotentialModel::DirectionalSo { limits } => {
                if limits.is_empty() {
                    return Err(Error::EmptyLimitSet);
                }
                for l in limits {
                    let n = l.direction.norm();
                    if !((n - 1.0).abs() <= 1e-10) {
                        return Err(Error::InvalidArgument(format!("limit direction has norm {n}")));
                    }
                    if !l.value.is_finite() {
                        return Err(Error::NonFinite("directional limit"));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Declared set of partial limits at infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LimitSet {
    Interval { lo: f64, hi: f64 },
    Finite { values: Vec<f64> },
}

impl LimitSet {
    pub fn bounds(&self) -> (f64, f64) {
        match self {
            LimitSet::Interval { lo, hi } => (*lo, *hi),
            LimitSet::Finite { values } => values
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v))),
        }
    }

    /// `n` evenly spaced values of an interval (endpoints included), or
    /// every value of a finite set; sorted and deduplicated.
    pub fn samples(&self, n: usize) -> Vec<f64> {
        let mut out = match self {
            LimitSet::Interval { lo, hi } => {
                let n = n.max(2);
                (0..n).map(|k| if k + 1 == n { *hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 }).collect()
            }
            LimitSet::Finite { values } => values.clone(),
        };
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialLimits {
    pub m_inf: f64,
    pub m_sup: f64,
    pub limit_set: LimitSet,
    /// (min, max) of Φ sampled on rays far out; a diagnostic only.
    pub empirical: (f64, f64),
    /// Whether `empirical` brackets (m_inf, m_sup) to within 1e−2.
    pub empirical_matches: bool,
}

const RAY_R_MAX: f64 = 1e8;
const RAY_SAMPLES: usize = 4096;

/// Samples Φ on rays over one full log-period below `RAY_R_MAX`.
pub fn estimate_limits_on_rays(phi: &PotentialModel, directions: &[Vec3]) -> (f64, f64) {
    let r_min = RAY_R_MAX * (-std::f64::consts::TAU).exp();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for w in directions {
        for k in 0..RAY_SAMPLES {
            let r = r_min * (RAY_R_MAX / r_min).powf(k as f64 / (RAY_SAMPLES - 1) as f64);
            let v = phi.eval(&(w * r));
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    (lo, hi)
}

pub fn partial_limits(phi: &PotentialModel) -> Result<PartialLimits> {
    phi.validate()?;
    let (limit_set, rays): (LimitSet, Vec<Vec3>) = match phi {
        PotentialModel::Constant { value } => (LimitSet::Finite { values: vec![*value] }, vec![Vec3::z()]),
        PotentialModel::RadialSo { base, amplitude, profile } => {
            let (a, b) = profile.limit_range();
            let (x, y) = (base + amplitude * a, base + amplitude * b);
            (LimitSet::Interval { lo: x.min(y), hi: x.max(y) }, vec![Vec3::x(), Vec3::z()])
        }
        PotentialModel::DirectionalSo { limits } => (
            LimitSet::Finite { values: limits.iter().map(|l| l.value).collect() },
            limits.iter().map(|l| l.direction).collect(),
        ),
    };
    let (m_inf, m_sup) = limit_set.bounds();
    let empirical = estimate_limits_on_rays(phi, &rays);
    let empirical_matches = (empirical.0 - m_inf).abs() <= 1e-2 && (empirical.1 - m_sup).abs() <= 1e-2;
    Ok(PartialLimits { m_inf, m_sup, limit_set, empirical, empirical_matches })
}

/// (−∞, Φ^h − |m|] ∪ [Φ^h + |m|, ∞).
pub fn free_spectrum(m: f64, phi_h: f64) -> SpectrumSet {
    SpectrumSet::rays(phi_h - m.abs(), phi_h + m.abs())
}

pub fn spectrum_union(a: &SpectrumSet, b: &SpectrumSet) -> SpectrumSet {
    a.union(b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LimitOperatorDescriptor {
    NonShell { phi_h: f64 },
    Shell { omega: Vec3, phi_h: f64, gamma_limit: InteractionMatrix, nu: Vec3 },
}

impl LimitOperatorDescriptor {
    pub fn phi_h(&self) -> f64 {
        match self {
            LimitOperatorDescriptor::NonShell { phi_h } | LimitOperatorDescriptor::Shell { phi_h, .. } => *phi_h,
        }
    }
}

/// Γ at infinity along shell directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GammaAtInfinity {
    Vanishing,
    Constant { gamma: InteractionMatrix },
    /// Declared limits listed in the order of the Σ∞ directions.
    PerDirection { limits: Vec<InteractionMatrix> },
}

impl GammaAtInfinity {
    fn limit(&self, index: usize) -> Result<InteractionMatrix> {
        match self {
            GammaAtInfinity::Vanishing => Ok(InteractionMatrix::zero()),
            GammaAtInfinity::Constant { gamma } => Ok(gamma.clone()),
            GammaAtInfinity::PerDirection { limits } => {
                limits.get(index).cloned().ok_or(Error::MissingGammaLimit { index })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitResolution {
    pub n_dirs: usize,
    /// Samples across an interval limit set, extremes included.
    pub n_phi: usize,
}

impl Default for LimitResolution {
    fn default() -> Self {
        LimitResolution { n_dirs: 64, n_phi: 9 }
    }
}

/// Limit operators of the shell problem at infinity.
pub fn enumerate_limits(
    surface: &SurfaceModel,
    phi: &PotentialModel,
    gamma: &GammaAtInfinity,
    resolution: &LimitResolution,
) -> Result<Vec<LimitOperatorDescriptor>> {
    let limits = partial_limits(phi)?;
    let directions = if surface.is_compact() { Vec::new() } else { surface.infinity_directions(resolution.n_dirs)? };

    let mut out: Vec<LimitOperatorDescriptor> = limits
        .limit_set
        .samples(resolution.n_phi)
        .into_iter()
        .map(|phi_h| LimitOperatorDescriptor::NonShell { phi_h })
        .collect();

    let shell: Vec<&InfinityDirection> = directions.iter().filter(|d| d.on_sigma_infinity).collect();
    for (index, d) in shell.into_iter().enumerate() {
        let nu = d.normal_at_infinity.ok_or_else(|| {
            Error::InvalidSurface(format!("shell direction {index} has no limiting normal"))
        })?;
        let gamma_limit = gamma.limit(index)?;
        let values = match phi.limit_along(&d.omega) {
            Some(v) => vec![v],
            None => limits.limit_set.samples(resolution.n_phi),
        };
        for phi_h in values {
            out.push(LimitOperatorDescriptor::Shell { omega: d.omega, phi_h, gamma_limit: gamma_limit.clone(), nu });
        }
    }
    Ok(out)
}

/// Spin rotation U with U(α·ν)U* = α₃ and Uα₀U* = α₀.
pub fn spin_rotation_to_normal_axis(nu: &Vec3) -> CMat4 {
    let c = nu.z.clamp(-1.0, 1.0);
    let axis = nu.cross(&Vec3::z());
    let s = axis.norm();
    let n = if s > 1e-14 { axis / s } else { Vec3::x() };
    let theta = c.acos();
    let spin: CMat2 = pauli(1).unwrap() * C64::from(n.x)
        + pauli(2).unwrap() * C64::from(n.y)
        + pauli(3).unwrap() * C64::from(n.z);
    let zero = CMat2::zeros();
    let sigma = from_blocks(&spin, &zero, &zero, &spin);
    CMat4::identity() * C64::from((theta / 2.0).cos()) - sigma * (I * (theta / 2.0).sin())
}

/// Coupling expressed in coordinates where ν is the z axis.
pub fn localize_coupling(gamma: &InteractionMatrix, nu: &Vec3) -> InteractionMatrix {
    match gamma {
        // block-scalar couplings commute with spin rotations
        InteractionMatrix::DiagonalPair { .. } | InteractionMatrix::ElectrostaticLorentz { .. } => gamma.clone(),
        InteractionMatrix::General { gamma } => {
            let u = spin_rotation_to_normal_axis(nu);
            InteractionMatrix::General { gamma: u * gamma * u.adjoint() }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchHull {
    pub branch_id: usize,
    pub lo: f64,
    pub hi: f64,
    pub n_points: usize,
}

/// Gap eigenvalue data of one distinct shell limit problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellContribution {
    /// Indices of all descriptors sharing this reduced problem.
    pub descriptors: Vec<usize>,
    pub gamma_local: InteractionMatrix,
    pub phi_h: f64,
    pub table: DispersionTable,
    pub points: Vec<f64>,
    pub hulls: Vec<BranchHull>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProvenanceEntry {
    pub component: String,
    pub descriptors: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EssentialSpectrum {
    /// Rays united with the interval hull of every shell eigenvalue branch.
    pub spectrum: SpectrumSet,
    /// Rays united with the sampled shell eigenvalues only.
    pub sampled: SpectrumSet,
    /// True when hulls add points that sampling alone does not contain.
    pub closure_differs: bool,
    pub shell: Vec<ShellContribution>,
    pub provenance: Vec<ProvenanceEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOptions {
    pub xi_grid: Vec<f64>,
    pub search: GapSearch,
    /// Largest energy jump linking eigenvalues of adjacent ξ rows.
    pub branch_threshold: f64,
}

impl SpectrumOptions {
    /// 33 points on [0, 3(|m| + 1)], branch threshold 10 grid steps.
    pub fn default_for_mass(m: f64) -> Self {
        let top = 3.0 * (m.abs() + 1.0);
        let n = 33;
        let xi_grid: Vec<f64> = (0..n).map(|k| top * k as f64 / (n - 1) as f64).collect();
        SpectrumOptions { branch_threshold: 10.0 * top / (n - 1) as f64, xi_grid, search: GapSearch::default() }
    }
}

fn shell_key(gamma: &InteractionMatrix, phi_h: f64) -> String {
    format!("{}|{}", serde_json::to_string(gamma).expect("serializable coupling"), phi_h.to_bits())
}

pub fn essential_spectrum(
    descriptors: &[LimitOperatorDescriptor],
    m: f64,
    opts: &SpectrumOptions,
) -> Result<EssentialSpectrum> {
    if descriptors.is_empty() {
        return Err(Error::InvalidArgument("no limit operators".into()));
    }
    let mut rays = SpectrumSet::empty();
    for d in descriptors {
        rays = rays.union(&free_spectrum(m, d.phi_h()));
    }

    // one reduced problem per distinct (local coupling, Φ^h)
    let mut shell: Vec<ShellContribution> = Vec::new();
    let mut keys: Vec<String> = Vec::new();
    for (i, d) in descriptors.iter().enumerate() {
        if let LimitOperatorDescriptor::Shell { phi_h, gamma_limit, nu, .. } = d {
            let local = localize_coupling(gamma_limit, nu);
            let key = shell_key(&local, *phi_h);
            match keys.iter().position(|k| *k == key) {
                Some(p) => shell[p].descriptors.push(i),
                None => {
                    keys.push(key);
                    shell.push(ShellContribution {
                        descriptors: vec![i],
                        gamma_local: local,
                        phi_h: *phi_h,
                        table: DispersionTable { m, phi: *phi_h, rows: Vec::new() },
                        points: Vec::new(),
                        hulls: Vec::new(),
                    });
                }
            }
        }
    }
    for c in shell.iter_mut() {
        if c.gamma_local.is_zero() {
            // free transmission: the reduced problem has no gap eigenvalues
            continue;
        }
        c.table = dispersion_curve(&c.gamma_local, m, c.phi_h, &opts.xi_grid, &opts.search)?;
        let mut pts: Vec<f64> = c.table.rows.iter().flat_map(|r| r.eigenvalues.iter().map(|e| e.energy)).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        c.points = pts;
        c.hulls = c
            .table
            .branches(opts.branch_threshold)
            .into_iter()
            .map(|b| {
                let (lo, hi) = b.energy_range();
                BranchHull { branch_id: b.id, lo, hi, n_points: b.points.len() }
            })
            .collect();
    }

    let mut sampled = rays.clone();
    let mut spectrum = rays.clone();
    for c in &shell {
        sampled = sampled.union(&SpectrumSet::points(c.points.iter().copied()));
        let hulls: Vec<Interval> = c.hulls.iter().map(|h| Interval::new(h.lo, h.hi)).collect();
        spectrum = spectrum.union(&SpectrumSet::from_parts(hulls, c.points.clone()));
    }
    let closure_differs = spectrum != sampled;

    let provenance = provenance_log(&spectrum, descriptors, m, &shell);
    Ok(EssentialSpectrum { spectrum, sampled, closure_differs, shell, provenance })
}

fn provenance_log(
    spectrum: &SpectrumSet,
    descriptors: &[LimitOperatorDescriptor],
    m: f64,
    shell: &[ShellContribution],
) -> Vec<ProvenanceEntry> {
    let mut contributions: Vec<SpectrumSet> = descriptors.iter().map(|d| free_spectrum(m, d.phi_h())).collect();
    for c in shell {
        let hulls: Vec<Interval> = c.hulls.iter().map(|h| Interval::new(h.lo, h.hi)).collect();
        let own = SpectrumSet::from_parts(hulls, c.points.clone());
        for &i in &c.descriptors {
            contributions[i] = contributions[i].union(&own);
        }
    }
    let meets = |set: &SpectrumSet, lo: f64, hi: f64| {
        set.intervals().iter().any(|iv| iv.lo <= hi && lo <= iv.hi)
            || set.isolated_points().iter().any(|p| lo <= *p && *p <= hi)
    };
    let mut out = Vec::new();
    for iv in spectrum.intervals() {
        let single = SpectrumSet::from_parts(vec![*iv], vec![]);
        out.push(ProvenanceEntry {
            component: single.to_string(),
            descriptors: (0..descriptors.len()).filter(|&i| meets(&contributions[i], iv.lo, iv.hi)).collect(),
        });
    }
    for p in spectrum.isolated_points() {
        out.push(ProvenanceEntry {
            component: format!("{{{p}}}"),
            descriptors: (0..descriptors.len()).filter(|&i| meets(&contributions[i], *p, *p)).collect(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{alpha_dot, dirac_alpha, max_abs_diff};

    #[test]
    fn free_spectrum_examples() {
        assert_eq!(free_spectrum(1.0, 0.0), SpectrumSet::rays(-1.0, 1.0));
        assert_eq!(free_spectrum(0.0, 5.0), SpectrumSet::real_line());
        assert_eq!(free_spectrum(2.0, 1.0), SpectrumSet::rays(-1.0, 3.0));
        assert_eq!(free_spectrum(-2.0, 1.0), SpectrumSet::rays(-1.0, 3.0));
    }

    #[test]
    fn union_examples() {
        let s = spectrum_union(&SpectrumSet::rays(-1.0, 1.0), &SpectrumSet::point(0.0));
        assert_eq!(s.intervals().len(), 2);
        assert_eq!(s.isolated_points(), &[0.0]);
        assert_eq!(
            spectrum_union(&SpectrumSet::interval(0.0, 2.0), &SpectrumSet::interval(1.0, 3.0)),
            SpectrumSet::interval(0.0, 3.0)
        );
    }

    #[test]
    fn partial_limit_examples() {
        let c = partial_limits(&PotentialModel::Constant { value: 0.0 }).unwrap();
        assert_eq!((c.m_inf, c.m_sup), (0.0, 0.0));
        assert!(c.empirical_matches);

        let r = partial_limits(&PotentialModel::RadialSo { base: 0.0, amplitude: 1.0, profile: RadialProfile::SinLog })
            .unwrap();
        assert_eq!((r.m_inf, r.m_sup), (-1.0, 1.0));
        assert!(r.empirical_matches, "{:?}", r.empirical);

        let d = partial_limits(&PotentialModel::DirectionalSo {
            limits: vec![
                DirectionalLimit { direction: Vec3::z(), value: -0.5 },
                DirectionalLimit { direction: -Vec3::z(), value: 0.25 },
            ],
        })
        .unwrap();
        assert_eq!((d.m_inf, d.m_sup), (-0.5, 0.25));
        assert!(d.empirical_matches);

        assert_eq!(partial_limits(&PotentialModel::DirectionalSo { limits: vec![] }), Err(Error::EmptyLimitSet));
    }

    #[test]
    fn limit_set_samples_include_extremes() {
        let s = LimitSet::Interval { lo: -1.0, hi: 1.0 }.samples(9);
        assert_eq!(s.len(), 9);
        assert_eq!((s[0], s[8]), (-1.0, 1.0));
        assert_eq!(LimitSet::Finite { values: vec![0.3, -0.1, 0.3] }.samples(9), vec![-0.1, 0.3]);
    }

    #[test]
    fn spin_rotation_maps_normal_to_axis() {
        for nu in [Vec3::new(0.3, -0.5, 0.8).normalize(), Vec3::z(), -Vec3::z(), Vec3::x(), Vec3::new(0.0, 1.0, 1e-9).normalize()] {
            let u = spin_rotation_to_normal_axis(&nu);
            assert!(max_abs_diff(&(u * u.adjoint()), &CMat4::identity()) < 1e-12);
            assert!(max_abs_diff(&(u * alpha_dot(&nu) * u.adjoint()), &dirac_alpha(3).unwrap()) < 1e-12, "{nu:?}");
            let a0 = dirac_alpha(0).unwrap();
            assert!(max_abs_diff(&(u * a0 * u.adjoint()), &a0) < 1e-12);
        }
    }

    #[test]
    fn compact_surface_gives_only_rays() {
        let phi = PotentialModel::RadialSo { base: 0.0, amplitude: 1.0, profile: RadialProfile::SinLog };
        let d = enumerate_limits(&SurfaceModel::sphere(1.0), &phi, &GammaAtInfinity::Vanishing, &LimitResolution::default())
            .unwrap();
        assert!(d.iter().all(|x| matches!(x, LimitOperatorDescriptor::NonShell { .. })));
        let es = essential_spectrum(&d, 2.0, &SpectrumOptions::default_for_mass(2.0)).unwrap();
        assert_eq!(es.spectrum, SpectrumSet::rays(-1.0, 1.0));
        assert!(es.spectrum.intervals_meeting(-1.0, 1.0).is_empty());
        assert!(!es.closure_differs);
    }

    #[test]
    fn vanishing_shell_coupling_adds_nothing() {
        let phi = PotentialModel::Constant { value: 0.0 };
        let d = enumerate_limits(
            &SurfaceModel::plane(Vec3::z(), 0.0),
            &phi,
            &GammaAtInfinity::Vanishing,
            &LimitResolution { n_dirs: 16, n_phi: 9 },
        )
        .unwrap();
        assert!(d.iter().any(|x| matches!(x, LimitOperatorDescriptor::Shell { .. })));
        let es = essential_spectrum(&d, 1.0, &SpectrumOptions::default_for_mass(1.0)).unwrap();
        assert_eq!(es.spectrum, SpectrumSet::rays(-1.0, 1.0));
        assert!(es.shell.iter().all(|c| c.points.is_empty() && c.hulls.is_empty()));
    }

    #[test]
    fn missing_gamma_limit_is_an_error() {
        let err = enumerate_limits(
            &SurfaceModel::plane(Vec3::z(), 0.0),
            &PotentialModel::Constant { value: 0.0 },
            &GammaAtInfinity::PerDirection { limits: vec![InteractionMatrix::zero(); 3] },
            &LimitResolution { n_dirs: 8, n_phi: 9 },
        );
        assert_eq!(err, Err(Error::MissingGammaLimit { index: 3 }));
    }

    #[test]
    fn electrostatic_plane_adds_branch_hull() {
        let d = enumerate_limits(
            &SurfaceModel::plane(Vec3::z(), 0.0),
            &PotentialModel::Constant { value: 0.0 },
            &GammaAtInfinity::Constant { gamma: InteractionMatrix::ElectrostaticLorentz { eta: 1.0, tau: 0.0 } },
            &LimitResolution { n_dirs: 8, n_phi: 9 },
        )
        .unwrap();
        let es = essential_spectrum(&d, 1.0, &SpectrumOptions::default_for_mass(1.0)).unwrap();
        assert_eq!(es.shell.len(), 1);
        assert_eq!(es.shell[0].descriptors.len(), 8);
        // the η = 1 branch is 0.6·√(ξ² + 1) and starts at E = 0.6 inside the gap
        let hull = es.shell[0].hulls[0];
        assert!((hull.lo - 0.6).abs() < 1e-8);
        assert!(es.spectrum.contains(0.8) && !es.spectrum.contains(0.5));
        assert!(es.closure_differs);
        assert!(!es.sampled.contains(0.6001));
        // provenance lists intervals first, in order; the second starts inside the gap
        assert_eq!(es.spectrum.intervals().len(), 2);
        let gap_entry = &es.provenance[1];
        assert!(gap_entry.component.starts_with("[0.") && gap_entry.component.ends_with("+inf)"));
        assert!(gap_entry.descriptors.iter().any(|&i| matches!(d[i], LimitOperatorDescriptor::Shell { .. })));
    }
}
