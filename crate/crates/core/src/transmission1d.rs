//! Reduced one-dimensional transmission problem
//!
//!   (α₁ξ₁ + α₂ξ₂ + iα₃ d/dz + mα₀ + Φ) u = E u,   z ≠ 0,
//!   a₊ u(0+) + a₋ u(0−) = 0,
//!
//! whose essential spectrum is the pair of rays |E − Φ| ≥ √(|ξ′|² + m²) and
//! whose gap eigenvalues are the zeros of a 4×4 dispersion determinant
//! built from the exponentially decaying solutions on each half-line.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{dirac_alpha, CMat4, CVec4, C64, I};
use crate::error::{Error, Result};
use crate::linalg::{null_vector, orthonormal_column_pair, singular_values};
use crate::shell_symbol::{transmission_pair, InteractionMatrix};
use crate::spectrum::SpectrumSet;

const PIVOT_TOL: f64 = 1e-10;

/// Data of the reduced operator at one tangential frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedSymbol1D {
    pub xi: [f64; 2],
    pub m: f64,
    pub phi: f64,
    pub a_plus: CMat4,
    pub a_minus: CMat4,
}

impl ReducedSymbol1D {
    /// Symbol in local coordinates where the normal is the z axis.
    pub fn from_interaction(gamma: &InteractionMatrix, xi: [f64; 2], m: f64, phi: f64) -> Self {
        let (a_plus, a_minus) =
            transmission_pair(gamma, &crate::clifford::Vec3::z()).expect("unit normal");
        ReducedSymbol1D { xi, m, phi, a_plus, a_minus }
    }

    pub fn xi_norm(&self) -> f64 {
        self.xi[0].hypot(self.xi[1])
    }

    /// √(|ξ′|² + m²).
    pub fn gap_halfwidth(&self) -> f64 {
        self.xi_norm().hypot(self.m)
    }

    /// α₁ξ₁ + α₂ξ₂ + mα₀.
    pub fn transverse_part(&self) -> CMat4 {
        dirac_alpha(1).unwrap() * C64::from(self.xi[0])
            + dirac_alpha(2).unwrap() * C64::from(self.xi[1])
            + dirac_alpha(0).unwrap() * C64::from(self.m)
    }

    /// Decay rate κ(E) = √(|ξ′|² + m² − (E − Φ)²) inside the open gap.
    pub fn decay_rate(&self, energy: f64) -> Result<f64> {
        let g = self.gap_halfwidth();
        let d = energy - self.phi;
        if !(d.abs() < g) {
            return Err(Error::OutsideGap { energy, lower: self.phi - g, upper: self.phi + g });
        }
        let kappa = ((g - d.abs()) * (g + d.abs())).sqrt();
        if kappa == 0.0 {
            return Err(Error::GapEdge { energy });
        }
        Ok(kappa)
    }

    /// M = α′·ξ′ + s·iκα₃ + mα₀ with s = −1 for the z > 0 side, +1 for z < 0.
    fn decay_symbol(&self, kappa: C64, side: f64) -> CMat4 {
        self.transverse_part() + dirac_alpha(3).unwrap() * (I * kappa * side)
    }
}

/// (−∞, Φ − √(|ξ′|²+m²)] ∪ [Φ + √(|ξ′|²+m²), ∞).
pub fn essential_rays(sym: &ReducedSymbol1D) -> SpectrumSet {
    let g = sym.gap_halfwidth();
    SpectrumSet::rays(sym.phi - g, sym.phi + g)
}

/// Orthonormal decaying-solution amplitudes at energy E.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayingBasis {
    pub kappa: f64,
    /// Amplitudes of solutions ∝ e^{−κz} on z > 0.
    pub right: [CVec4; 2],
    /// Amplitudes of solutions ∝ e^{κz} on z < 0.
    pub left: [CVec4; 2],
}

pub fn decaying_basis(sym: &ReducedSymbol1D, energy: f64) -> Result<DecayingBasis> {
    let kappa = sym.decay_rate(energy)?;
    let shift = CMat4::identity() * C64::from(energy - sym.phi);
    let right = orthonormal_column_pair(&(sym.decay_symbol(kappa.into(), -1.0) + shift), PIVOT_TOL)?;
    let left = orthonormal_column_pair(&(sym.decay_symbol(kappa.into(), 1.0) + shift), PIVOT_TOL)?;
    Ok(DecayingBasis { kappa, right, left })
}

/// Matrix with columns (a₊w₋¹, a₊w₋², a₋w₊¹, a₋w₊²) from orthonormal bases.
pub fn dispersion_matrix(sym: &ReducedSymbol1D, energy: f64) -> Result<CMat4> {
    let b = decaying_basis(sym, energy)?;
    Ok(assemble(sym, &b.right, &b.left))
}

fn assemble(sym: &ReducedSymbol1D, right: &[CVec4; 2], left: &[CVec4; 2]) -> CMat4 {
    CMat4::from_columns(&[
        sym.a_plus * right[0],
        sym.a_plus * right[1],
        sym.a_minus * left[0],
        sym.a_minus * left[1],
    ])
}

/// Dispersion determinant with orthonormalized decaying bases.
pub fn dispersion_det(sym: &ReducedSymbol1D, energy: f64) -> Result<C64> {
    Ok(dispersion_matrix(sym, energy)?.determinant())
}

/// Column indices of (M∓ + (E−Φ)I) used by the holomorphic variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColumnChoice {
    pub right: [usize; 2],
    pub left: [usize; 2],
}

fn pivot_pair(m: &CMat4) -> Result<[usize; 2]> {
    let mut best = None;
    let mut best_score = 0.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            let a = m.column(i);
            let b = m.column(j);
            // |a ∧ b|² = |a|²|b|² − |⟨a,b⟩|²
            let score = a.norm_squared() * b.norm_squared() - a.dotc(&b).norm_sqr();
            if score > best_score {
                best_score = score;
                best = Some([i, j]);
            }
        }
    }
    best.ok_or_else(|| Error::EigenSolver("decay matrix has rank < 2".into()))
}

/// Pivot columns chosen at a real energy; fixed thereafter so that the
/// holomorphic determinant can be differentiated in E.
pub fn column_choice(sym: &ReducedSymbol1D, energy: f64) -> Result<ColumnChoice> {
    let kappa = C64::from(sym.decay_rate(energy)?);
    let shift = CMat4::identity() * C64::from(energy - sym.phi);
    Ok(ColumnChoice {
        right: pivot_pair(&(sym.decay_symbol(kappa, -1.0) + shift))?,
        left: pivot_pair(&(sym.decay_symbol(kappa, 1.0) + shift))?,
    })
}

/// Dispersion determinant from unnormalized fixed columns; holomorphic in a
/// complex neighbourhood of the open gap. Its zeros coincide with those of
/// [`dispersion_det`] wherever the chosen columns are independent.
pub fn dispersion_det_holomorphic(sym: &ReducedSymbol1D, energy: C64, choice: ColumnChoice) -> C64 {
    let g = sym.gap_halfwidth();
    let d = energy - sym.phi;
    let kappa = (C64::from(g * g) - d * d).sqrt();
    let shift = CMat4::identity() * d;
    let mr = sym.decay_symbol(kappa, -1.0) + shift;
    let ml = sym.decay_symbol(kappa, 1.0) + shift;
    let right = [mr.column(choice.right[0]).into_owned(), mr.column(choice.right[1]).into_owned()];
    let left = [ml.column(choice.left[0]).into_owned(), ml.column(choice.left[1]).into_owned()];
    assemble(sym, &right, &left).determinant()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapEigenvalue {
    pub energy: f64,
    pub xi_norm: f64,
    /// σ_min / σ_max of the dispersion matrix at `energy`.
    pub residual: f64,
    pub min_singular_value: f64,
    /// Number of relative singular values below the acceptance level; an
    /// estimate, not a proven multiplicity.
    pub multiplicity: usize,
    /// |Im E| of the root that Newton's method finds for the holomorphic
    /// determinant when started at `energy`.
    pub imag_diagnostic: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapSearch {
    pub n_scan: usize,
    /// Final bracket width of the refinement.
    pub tol: f64,
    /// Relative smallest-singular-value level that certifies an eigenvalue.
    pub accept_rel: f64,
    /// Search restricted to |E − Φ| ≤ (1 − edge_margin)·halfwidth.
    pub edge_margin: f64,
}

impl Default for GapSearch {
    fn default() -> Self {
        GapSearch { n_scan: 512, tol: 1e-10, accept_rel: 1e-6, edge_margin: 1e-6 }
    }
}

fn relative_sigma_min(sym: &ReducedSymbol1D, energy: f64) -> Result<(f64, [f64; 4])> {
    let sv = singular_values(&dispersion_matrix(sym, energy)?);
    Ok((sv[0] / sv[3], sv))
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Continues a real eigenvalue into the complex plane by multiplicity-aware
/// Newton steps on the holomorphic determinant and returns |Im E|.
pub fn imaginary_diagnostic(sym: &ReducedSymbol1D, energy: f64, multiplicity: usize) -> Result<f64> {
    let choice = column_choice(sym, energy)?;
    let f = |e: C64| dispersion_det_holomorphic(sym, e, choice);
    let step = 1e-6 * sym.gap_halfwidth().max(1e-300);
    let mut e = C64::from(energy);
    for _ in 0..50 {
        let value = f(e);
        let slope = (f(e + step) - f(e - step)) / C64::from(2.0 * step);
        if value.norm() == 0.0 || slope.norm() == 0.0 {
            break;
        }
        let delta = value / slope * C64::from(multiplicity.max(1) as f64);
        e -= delta;
        if delta.norm() < 1e-14 * (1.0 + e.norm()) {
            break;
        }
    }
    Ok(e.im.abs())
}

/// Gap eigenvalues of the reduced problem, sorted and deduplicated.
pub fn gap_eigenvalues(sym: &ReducedSymbol1D, search: &GapSearch) -> Result<Vec<GapEigenvalue>> {
    if search.n_scan < 16 {
        return Err(Error::InvalidArgument(format!("n_scan = {} < 16", search.n_scan)));
    }
    if !(search.tol > 0.0) {
        return Err(Error::InvalidArgument("refinement tolerance must be positive".into()));
    }
    let g = sym.gap_halfwidth();
    if g == 0.0 {
        return Ok(Vec::new());
    }
    let half = (1.0 - search.edge_margin) * g;
    let (lo, hi) = (sym.phi - half, sym.phi + half);
    let n = search.n_scan;
    let grid: Vec<f64> = (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect();
    let values = grid
        .iter()
        .map(|&e| Ok(dispersion_det(sym, e)?.norm()))
        .collect::<Result<Vec<f64>>>()?;

    let objective = |e: f64| relative_sigma_min(sym, e).map(|r| r.0).unwrap_or(f64::INFINITY);
    let mut found: Vec<GapEigenvalue> = Vec::new();
    for i in 0..n {
        let left = if i == 0 { f64::INFINITY } else { values[i - 1] };
        let right = if i + 1 == n { f64::INFINITY } else { values[i + 1] };
        if !(values[i] <= left && values[i] <= right) {
            continue;
        }
        let a = grid[i.saturating_sub(1)];
        let b = grid[(i + 1).min(n - 1)];
        let e = golden_section(objective, a, b, search.tol);
        let (rel, sv) = relative_sigma_min(sym, e)?;
        if rel < search.accept_rel {
            let multiplicity = sv.iter().filter(|s| **s < search.accept_rel * sv[3]).count();
            let imag_diagnostic = imaginary_diagnostic(sym, e, multiplicity)?;
            found.push(GapEigenvalue {
                energy: e,
                xi_norm: sym.xi_norm(),
                residual: rel,
                min_singular_value: sv[0],
                multiplicity,
                imag_diagnostic,
            });
        }
    }
    found.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    found.dedup_by(|b, a| (a.energy - b.energy).abs() < 1e3 * search.tol.max(1e-12));
    Ok(found)
}

/// Two-sided decaying solution attached to an accepted eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundState {
    pub energy: f64,
    pub kappa: f64,
    pub right: CVec4,
    pub left: CVec4,
}

impl BoundState {
    pub fn from_eigenvalue(sym: &ReducedSymbol1D, energy: f64) -> Result<Self> {
        let b = decaying_basis(sym, energy)?;
        let c = null_vector(&assemble(sym, &b.right, &b.left));
        Ok(BoundState {
            energy,
            kappa: b.kappa,
            right: b.right[0] * c[0] + b.right[1] * c[1],
            left: b.left[0] * c[2] + b.left[1] * c[3],
        })
    }

    pub fn value(&self, z: f64) -> CVec4 {
        if z >= 0.0 {
            self.right * C64::from((-self.kappa * z).exp())
        } else {
            self.left * C64::from((self.kappa * z).exp())
        }
    }

    pub fn derivative(&self, z: f64) -> CVec4 {
        let k = if z >= 0.0 { -self.kappa } else { self.kappa };
        self.value(z) * C64::from(k)
    }

    /// ‖a₊u(0+) + a₋u(0−)‖ / ‖u(0±)‖.
    pub fn transmission_residual(&self, sym: &ReducedSymbol1D) -> f64 {
        let r = sym.a_plus * self.right + sym.a_minus * self.left;
        r.norm() / (self.right.norm_squared() + self.left.norm_squared()).sqrt()
    }

    /// ‖(H − E)u(z)‖ / ‖u(z)‖ with the exact derivative.
    pub fn ode_residual(&self, sym: &ReducedSymbol1D, z: f64) -> f64 {
        let u = self.value(z);
        let lhs = (sym.transverse_part() + CMat4::identity() * C64::from(sym.phi - self.energy)) * u
            + dirac_alpha(3).unwrap() * (self.derivative(z) * I);
        lhs.norm() / u.norm()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionRow {
    pub xi_norm: f64,
    pub halfwidth: f64,
    pub eigenvalues: Vec<GapEigenvalue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionTable {
    pub m: f64,
    pub phi: f64,
    pub rows: Vec<DispersionRow>,
}

/// Gap eigenvalues for ξ′ = (|ξ′|, 0) at each grid value; rows keep the
/// input order.
pub fn dispersion_curve(
    gamma: &InteractionMatrix,
    m: f64,
    phi: f64,
    xi_grid: &[f64],
    search: &GapSearch,
) -> Result<DispersionTable> {
    if xi_grid.is_empty() {
        return Err(Error::InvalidArgument("empty xi grid".into()));
    }
    if let Some(bad) = xi_grid.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
        return Err(Error::InvalidArgument(format!("xi grid value {bad} must be finite and >= 0")));
    }
    let rows = xi_grid
        .par_iter()
        .map(|&x| {
            let sym = ReducedSymbol1D::from_interaction(gamma, [x, 0.0], m, phi);
            Ok(DispersionRow { xi_norm: x, halfwidth: sym.gap_halfwidth(), eigenvalues: gap_eigenvalues(&sym, search)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DispersionTable { m, phi, rows })
}

/// A connected eigenvalue branch across adjacent grid rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub id: usize,
    /// (|ξ′|, E) pairs in grid order.
    pub points: Vec<(f64, f64)>,
}

impl Branch {
    pub fn energy_range(&self) -> (f64, f64) {
        self.points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.1), hi.max(p.1)))
    }
}

impl DispersionTable {
    /// Links eigenvalues of consecutive rows whose energies differ by at
    /// most `threshold`, nearest first.
    pub fn branches(&self, threshold: f64) -> Vec<Branch> {
        let mut branches: Vec<Branch> = Vec::new();
        let mut open: Vec<(usize, f64)> = Vec::new();
        for row in &self.rows {
            let mut next_open = Vec::new();
            let mut taken = vec![false; open.len()];
            for ev in &row.eigenvalues {
                let best = open
                    .iter()
                    .enumerate()
                    .filter(|(k, (_, e))| !taken[*k] && (e - ev.energy).abs() <= threshold)
                    .min_by(|a, b| (a.1 .1 - ev.energy).abs().total_cmp(&(b.1 .1 - ev.energy).abs()));
                let id = match best {
                    Some((k, &(id, _))) => {
                        taken[k] = true;
                        id
                    }
                    None => {
                        branches.push(Branch { id: branches.len(), points: Vec::new() });
                        branches.len() - 1
                    }
                };
                branches[id].points.push((row.xi_norm, ev.energy));
                next_open.push((id, ev.energy));
            }
            open = next_open;
        }
        branches
    }

    /// CSV with header `xi_norm,branch_id,energy`.
    pub fn to_csv(&self, threshold: f64) -> String {
        let mut rows: Vec<(usize, f64, usize, f64)> = Vec::new();
        for b in self.branches(threshold) {
            for (i, (x, e)) in b.points.iter().enumerate() {
                let row = self.rows.iter().position(|r| r.xi_norm == *x).unwrap_or(i);
                rows.push((row, *x, b.id, *e));
            }
        }
        rows.sort_by(|a, b| a.0.cmp(&b.0).then(a.3.total_cmp(&b.3)));
        let mut out = String::from("xi_norm,branch_id,energy\n");
        for (_, x, id, e) in rows {
            out.push_str(&format!("{x},{id},{e}\n"));
        }
        out
    }
}
