//! Finite-difference discretization of the reduced transmission problem on
//! [−L, L], used as a brute-force check of the dispersion-determinant
//! eigenvalues.
//!
//! Each half-line carries nodes z = ±jh, j = 0..N, where j = 0 holds the
//! one-sided boundary value. d/dz uses 4th-order central differences with
//! one-sided closures at the two nodes next to the interface and zero
//! truncation at ±L. A 6th-difference term r·α₀·h⁵∂⁶ removes the grid
//! doublers that central differences create for first-order systems; it is
//! O(h⁵) on smooth modes. The transmission condition a₊u(0+) + a₋u(0−) = 0
//! is imposed by restricting both boundary values to the null space of
//! [a₊ a₋], which keeps the problem square.

pub mod banded;

use nalgebra::{DMatrix, Matrix4, SMatrix, SVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{dirac_alpha, CMat4, C64, I};
use crate::error::{Error, Result};
use crate::shell_symbol::InteractionMatrix;
use crate::transmission1d::ReducedSymbol1D;
use banded::{BandLu, BandMatrix};

const CENTRAL: [f64; 5] = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
const CLOSURE0: [f64; 5] = [-25.0 / 12.0, 4.0, -3.0, 4.0 / 3.0, -0.25];
const CLOSURE1: [f64; 5] = [-0.25, -5.0 / 6.0, 1.5, -0.5, 1.0 / 12.0];
const SIXTH: [f64; 7] = [-1.0, 6.0, -15.0, 20.0, -15.0, 6.0, -1.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdGrid {
    pub half_length: f64,
    pub points_per_side: usize,
}

impl FdGrid {
    pub fn new(half_length: f64, points_per_side: usize) -> Result<Self> {
        let g = FdGrid { half_length, points_per_side };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_length > 0.0 && self.half_length.is_finite()) {
            return Err(Error::InvalidArgument(format!("half length {} must be positive", self.half_length)));
        }
        if self.points_per_side < 100 {
            return Err(Error::InvalidArgument(format!("{} points per side < 100", self.points_per_side)));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        self.half_length / self.points_per_side as f64
    }

    pub fn refined(&self) -> FdGrid {
        FdGrid { half_length: self.half_length, points_per_side: 2 * self.points_per_side }
    }

    /// Same spacing on a longer interval.
    pub fn with_half_length(&self, half_length: f64) -> FdGrid {
        let n = (half_length / self.h()).ceil() as usize;
        FdGrid { half_length: n as f64 * self.h(), points_per_side: n.max(100) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdOptions {
    /// Coefficient of the 6th-difference stabilization.
    pub dissipation: f64,
    /// Minimum eigenvector mass inside |z| ≤ L/2.
    pub localization: f64,
    /// Maximum eigenvalue change when N doubles.
    pub refinement_tol: f64,
    /// Eigenvalues are sought in |E − Φ| < window·halfwidth.
    pub window: f64,
    pub n_shifts: usize,
    pub krylov_dim: usize,
    /// Relative residual ‖Ax − λx‖ / ‖A‖ for a converged pair.
    pub residual_tol: f64,
    /// Largest accepted |Im λ| relative to the halfwidth.
    pub imag_tol: f64,
    /// Grow L to 20/κ(E) when a candidate decays slower than that.
    pub auto_length: bool,
    pub max_half_length: f64,
}

impl Default for FdOptions {
    fn default() -> Self {
        FdOptions {
            dissipation: 0.25,
            localization: 0.99,
            refinement_tol: 1e-3,
            window: 0.999,
            n_shifts: 10,
            krylov_dim: 30,
            residual_tol: 1e-8,
            imag_tol: 1e-4,
            auto_length: true,
            max_half_length: 400.0,
        }
    }
}

/// Projected operator in band form. Unknowns are ordered as the z < 0 nodes
/// from −L inwards, the four interface coordinates, then the z > 0 nodes
/// outwards.
#[derive(Debug, Clone)]
pub struct FdOperator {
    pub grid: FdGrid,
    pub matrix: BandMatrix,
    /// Position of each unknown; interface coordinates sit at 0.
    pub z: Vec<f64>,
    /// Condition number of [a₊ a₋] restricted to its row space.
    pub constraint_condition: f64,
}

impl FdOperator {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        self.matrix.to_dense()
    }
}

/// Orthonormal basis of ker [a₊ a₋] as an 8×4 block, plus the condition
/// number of the constraint.
fn constraint_null_space(sym: &ReducedSymbol1D) -> Result<(SMatrix<C64, 8, 4>, f64)> {
    let mut ct = SMatrix::<C64, 8, 4>::zeros();
    ct.fixed_view_mut::<4, 4>(0, 0).copy_from(&sym.a_plus.adjoint());
    ct.fixed_view_mut::<4, 4>(4, 0).copy_from(&sym.a_minus.adjoint());
    let svd = ct.svd(true, false);
    let sv = svd.singular_values;
    let (smin, smax) = (sv.min(), sv.max());
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition < 1e12) {
        return Err(Error::IllConditioned { condition });
    }
    let u = svd.u.expect("requested U");
    // complement of the row space by pivoted Gram–Schmidt on I − UU*
    let mut cols: Vec<SVector<C64, 8>> = (0..8)
        .map(|j| {
            let mut e = SVector::<C64, 8>::zeros();
            e[j] = C64::new(1.0, 0.0);
            e - u * (u.adjoint() * e)
        })
        .collect();
    let mut q = SMatrix::<C64, 8, 4>::zeros();
    for k in 0..4 {
        let (best, _) = cols
            .iter()
            .enumerate()
            .map(|(j, c)| (j, c.norm()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        let v = cols.swap_remove(best).normalize();
        for c in cols.iter_mut() {
            let p = v.dotc(c);
            *c -= v * p;
        }
        q.set_column(k, &v);
    }
    Ok((q, condition))
}

/// Weights of row j of the derivative (in units of 1/h), as (column, weight).
fn derivative_row(j: usize, n_nodes: usize) -> Vec<(usize, f64)> {
    let (start, w): (isize, &[f64; 5]) = match j {
        0 => (0, &CLOSURE0),
        1 => (0, &CLOSURE1),
        _ => (j as isize - 2, &CENTRAL),
    };
    w.iter()
        .enumerate()
        .map(|(k, &c)| (start + k as isize, c))
        .filter(|&(col, c)| c != 0.0 && col >= 0 && (col as usize) < n_nodes)
        .map(|(col, c)| (col as usize, c))
        .collect()
}

fn dissipation_row(j: usize, n_nodes: usize) -> Vec<(usize, f64)> {
    let start = j.saturating_sub(3);
    SIXTH
        .iter()
        .enumerate()
        .map(|(k, &c)| (start + k, c))
        .filter(|&(col, _)| col < n_nodes)
        .collect()
}

/// Assembles the projected operator.
pub fn assemble(sym: &ReducedSymbol1D, grid: &FdGrid, dissipation: f64) -> Result<FdOperator> {
    grid.validate()?;
    let n = grid.points_per_side;
    let h = grid.h();
    let (q, constraint_condition) = constraint_null_space(sym)?;
    let k_block: CMat4 = sym.transverse_part() + CMat4::identity() * C64::from(sym.phi);
    let ia3: CMat4 = dirac_alpha(3)? * I;
    let a0: CMat4 = dirac_alpha(0)?;

    let dim = 8 * n + 4;
    let iface = 4 * n;
    // side 0: z > 0, side 1: z < 0; node j ≥ 1 → global block start
    let node_start = |side: usize, j: usize| -> usize {
        if side == 0 {
            iface + 4 + 4 * (j - 1)
        } else {
            4 * (n - j)
        }
    };
    // rows of q belonging to each side's boundary value
    let q_side = |side: usize| -> Matrix4<C64> { q.fixed_view::<4, 4>(4 * side, 0).into_owned() };

    let mut triplets: Vec<(usize, usize, C64)> = Vec::with_capacity(dim * 40);
    for side in 0..2 {
        let sign = if side == 0 { 1.0 } else { -1.0 };
        let qs = q_side(side);
        for j in 0..=n {
            // block coefficients of row-node j: (column node, 4×4 block)
            let mut blocks: Vec<(usize, CMat4)> = vec![(j, k_block)];
            for (col, w) in derivative_row(j, n + 1) {
                blocks.push((col, ia3 * C64::from(sign * w / h)));
            }
            for (col, w) in dissipation_row(j, n + 1) {
                blocks.push((col, a0 * C64::from(dissipation * w / h)));
            }
            for (col, block) in blocks {
                // map the column node; node 0 expands through the null-space basis
                let (col_start, block) = if col == 0 { (iface, block * qs) } else { (node_start(side, col), block) };
                let (row_start, block) = if j == 0 { (iface, qs.adjoint() * block) } else { (node_start(side, j), block) };
                for a in 0..4 {
                    for b in 0..4 {
                        let v = block[(a, b)];
                        if v != C64::new(0.0, 0.0) {
                            triplets.push((row_start + a, col_start + b, v));
                        }
                    }
                }
            }
        }
    }
    let mut z = vec![0.0; dim];
    for j in 1..=n {
        for a in 0..4 {
            z[node_start(0, j) + a] = j as f64 * h;
            z[node_start(1, j) + a] = -(j as f64) * h;
        }
    }
    Ok(FdOperator { grid: *grid, matrix: BandMatrix::from_triplets(dim, &triplets), z, constraint_condition })
}

/// One converged eigenpair diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdEigenvalue {
    pub energy: f64,
    pub imag: f64,
    /// Fraction of eigenvector mass inside |z| ≤ L/2.
    pub localization: f64,
    pub residual: f64,
}

fn start_vector(n: usize) -> Vec<C64> {
    (0..n).map(|i| C64::new((0.7 * i as f64 + 0.3).sin(), (1.3 * i as f64 + 0.1).cos())).collect()
}

fn normalize(v: &mut [C64]) -> f64 {
    let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= nrm;
    }
    nrm
}

fn dotc(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Ritz values of (A − σ)⁻¹ mapped back to eigenvalue estimates of A.
fn shift_invert_ritz(lu: &BandLu, shift: C64, n: usize, k: usize) -> Vec<C64> {
    let k = k.min(n);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(k + 1);
    let mut hess = DMatrix::<C64>::zeros(k + 1, k);
    let mut v = start_vector(n);
    normalize(&mut v);
    basis.push(v);
    let mut steps = k;
    for j in 0..k {
        let mut w = lu.solve(&basis[j]);
        for _ in 0..2 {
            for (i, b) in basis.iter().enumerate() {
                let c = dotc(b, &w);
                hess[(i, j)] += c;
                for (x, y) in w.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let beta = normalize(&mut w);
        hess[(j + 1, j)] = C64::from(beta);
        if !(beta > 1e-14 * hess.column(j).norm()) {
            steps = j + 1;
            break;
        }
        basis.push(w);
    }
    let square = hess.view((0, 0), (steps, steps)).into_owned();
    let (_, t) = square.schur().unpack();
    t.diagonal()
        .iter()
        .filter(|theta| theta.norm() > 0.0)
        .map(|theta| shift + C64::new(1.0, 0.0) / theta)
        .collect()
}

/// Inverse iteration at a Ritz estimate; returns the refined pair.
fn refine_pair(op: &FdOperator, estimate: C64) -> Result<(C64, Vec<C64>, f64)> {
    // nudge off the estimate so the factorization stays regular
    let shift = estimate + C64::new(1e-10, 1e-10) * (1.0 + estimate.norm());
    let lu = op.matrix.factor_shifted(shift)?;
    let mut x = start_vector(op.dim());
    normalize(&mut x);
    for _ in 0..4 {
        x = lu.solve(&x);
        normalize(&mut x);
    }
    let ax = op.matrix.mul_vec(&x);
    let lambda = dotc(&x, &ax);
    let res = ax.iter().zip(&x).map(|(a, b)| (a - lambda * b).norm_sqr()).sum::<f64>().sqrt();
    Ok((lambda, x, res / op.matrix.max_abs()))
}

/// Converged eigenvalues of one discretization inside the gap window, before
/// the refinement filter.
pub fn eigenpairs_in_gap(sym: &ReducedSymbol1D, grid: &FdGrid, opts: &FdOptions) -> Result<Vec<FdEigenvalue>> {
    let op = assemble(sym, grid, opts.dissipation)?;
    let g = sym.gap_halfwidth();
    if g == 0.0 {
        return Ok(Vec::new());
    }
    let n_shifts = opts.n_shifts.max(1);
    let shifts: Vec<f64> = (0..n_shifts)
        .map(|k| {
            let t = if n_shifts == 1 { 0.0 } else { -0.95 + 1.9 * k as f64 / (n_shifts - 1) as f64 };
            sym.phi + t * g
        })
        .collect();
    let candidates: Vec<Vec<C64>> = shifts
        .par_iter()
        .map(|&s| {
            let shift = C64::new(s, 1e-7 * g);
            let lu = op.matrix.factor_shifted(shift)?;
            Ok(shift_invert_ritz(&lu, shift, op.dim(), opts.krylov_dim))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut ritz: Vec<C64> = candidates
        .into_iter()
        .flatten()
        .filter(|e| (e.re - sym.phi).abs() < opts.window * g && e.im.abs() < 1e-2 * g)
        .collect();
    ritz.sort_by(|a, b| a.re.total_cmp(&b.re));
    ritz.dedup_by(|b, a| (*a - *b).norm() < 1e-6 * g);

    let refined: Vec<Option<FdEigenvalue>> = ritz
        .par_iter()
        .map(|&est| {
            let (lambda, x, residual) = refine_pair(&op, est)?;
            if residual > opts.residual_tol || lambda.im.abs() > opts.imag_tol * g {
                return Ok(None);
            }
            if !((lambda.re - sym.phi).abs() < opts.window * g) {
                return Ok(None);
            }
            let total: f64 = x.iter().map(|v| v.norm_sqr()).sum();
            let inner: f64 = x
                .iter()
                .zip(&op.z)
                .filter(|(_, z)| z.abs() <= 0.5 * grid.half_length)
                .map(|(v, _)| v.norm_sqr())
                .sum();
            Ok(Some(FdEigenvalue { energy: lambda.re, imag: lambda.im, localization: inner / total, residual }))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out: Vec<FdEigenvalue> = refined.into_iter().flatten().collect();
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    out.dedup_by(|b, a| (a.energy - b.energy).abs() < 1e-8 * g);
    Ok(out)
}

/// Accepted eigenvalue with the grid it was computed on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdAccepted {
    pub energy: f64,
    pub imag: f64,
    pub localization: f64,
    /// |E(2N) − E(N)|.
    pub refinement_shift: f64,
    pub grid: FdGrid,
}

/// Gap eigenvalues that are localized and stable under doubling N; values
/// are taken from the refined grid.
pub fn gap_eigenvalues_fd_detailed(sym: &ReducedSymbol1D, grid: &FdGrid, opts: &FdOptions) -> Result<Vec<FdAccepted>> {
    grid.validate()?;
    let mut grid = *grid;
    loop {
        let coarse = eigenpairs_in_gap(sym, &grid, opts)?;
        let fine_grid = grid.refined();
        let fine = eigenpairs_in_gap(sym, &fine_grid, opts)?;
        let mut accepted = Vec::new();
        for c in &coarse {
            let Some(f) = fine.iter().min_by(|a, b| (a.energy - c.energy).abs().total_cmp(&(b.energy - c.energy).abs()))
            else {
                continue;
            };
            let shift = (f.energy - c.energy).abs();
            if shift < opts.refinement_tol && c.localization >= opts.localization && f.localization >= opts.localization {
                accepted.push(FdAccepted {
                    energy: f.energy,
                    imag: f.imag,
                    localization: f.localization,
                    refinement_shift: shift,
                    grid: fine_grid,
                });
            }
        }
        accepted.dedup_by(|b, a| (a.energy - b.energy).abs() < 1e-8);
        if opts.auto_length {
            let needed = accepted
                .iter()
                .filter_map(|a| sym.decay_rate(a.energy).ok())
                .map(|k| 20.0 / k)
                .fold(0.0, f64::max)
                .min(opts.max_half_length);
            if needed > grid.half_length * 1.001 {
                grid = grid.with_half_length(needed);
                continue;
            }
        }
        return Ok(accepted);
    }
}

pub fn gap_eigenvalues_fd(sym: &ReducedSymbol1D, grid: &FdGrid) -> Result<Vec<f64>> {
    Ok(gap_eigenvalues_fd_detailed(sym, grid, &FdOptions::default())?.into_iter().map(|a| a.energy).collect())
}

/// One oracle comparison case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdCase {
    pub label: String,
    pub coupling: InteractionMatrix,
    pub xi: [f64; 2],
    pub m: f64,
    pub phi: f64,
}

impl FdCase {
    pub fn symbol(&self) -> ReducedSymbol1D {
        ReducedSymbol1D::from_interaction(&self.coupling, self.xi, self.m, self.phi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdCaseResult {
    pub case: FdCase,
    pub grid: FdGrid,
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdBattery {
    pub base_grid: FdGrid,
    pub options: FdOptions,
    pub results: Vec<FdCaseResult>,
}

pub fn standard_battery() -> Vec<FdCase> {
    let el = |eta: f64, tau: f64| InteractionMatrix::ElectrostaticLorentz { eta, tau };
    let dp = |gamma: f64, epsilon: f64| InteractionMatrix::DiagonalPair { gamma, epsilon };
    let case = |label: &str, coupling: InteractionMatrix, xi: f64, m: f64| FdCase {
        label: label.to_string(),
        coupling,
        xi: [xi, 0.0],
        m,
        phi: 0.0,
    };
    vec![
        case("electrostatic eta=1 xi=0 m=1", el(1.0, 0.0), 0.0, 1.0),
        case("electrostatic eta=1 xi=0.5 m=1", el(1.0, 0.0), 0.5, 1.0),
        case("electrostatic-lorentz eta=1 tau=0.5 xi=1 m=1", el(1.0, 0.5), 1.0, 1.0),
        case("electrostatic eta=3 xi=2 m=1", el(3.0, 0.0), 2.0, 1.0),
        case("electrostatic-lorentz eta=0.5 tau=0.2 xi=0.5 m=0.5", el(0.5, 0.2), 0.5, 0.5),
        case("diagonal gamma=0.4 eps=-0.9 xi=1 m=1", dp(0.4, -0.9), 1.0, 1.0),
        case("diagonal gamma=0.5 eps=0.5 xi=2 m=0.5", dp(0.5, 0.5), 2.0, 0.5),
        case("diagonal gamma=0.8 eps=-0.5 xi=0 m=0.5", dp(0.8, -0.5), 0.0, 0.5),
        case("diagonal gamma=-0.3 eps=0.6 xi=0.5 m=1", dp(-0.3, 0.6), 0.5, 1.0),
        case("free xi=0 m=1", InteractionMatrix::zero(), 0.0, 1.0),
        case("free xi=1 m=0.5", InteractionMatrix::zero(), 1.0, 0.5),
    ]
}

/// Runs every case (in parallel, results in input order).
pub fn run_battery(cases: &[FdCase], grid: &FdGrid, opts: &FdOptions) -> Result<FdBattery> {
    let results = cases
        .par_iter()
        .map(|case| {
            let accepted = gap_eigenvalues_fd_detailed(&case.symbol(), grid, opts)?;
            let used = accepted.first().map(|a| a.grid).unwrap_or(grid.refined());
            Ok(FdCaseResult { case: case.clone(), grid: used, eigenvalues: accepted.iter().map(|a| a.energy).collect() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FdBattery { base_grid: *grid, options: *opts, results })
}

impl FdBattery {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("battery serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("battery file: {e}")))
    }
}

/// Grid used for the committed battery.
pub fn standard_grid() -> FdGrid {
    FdGrid { half_length: 20.0, points_per_side: 200 }
}

/// Largest eigenvalue discrepancy between two batteries over the same cases,
/// or `None` if the cases or eigenvalue counts differ.
pub fn battery_drift(a: &FdBattery, b: &FdBattery) -> Option<f64> {
    if a.results.len() != b.results.len() {
        return None;
    }
    let mut worst: f64 = 0.0;
    for (x, y) in a.results.iter().zip(&b.results) {
        if x.case != y.case || x.eigenvalues.len() != y.eigenvalues.len() {
            return None;
        }
        for (e, f) in x.eigenvalues.iter().zip(&y.eigenvalues) {
            worst = worst.max((e - f).abs());
        }
    }
    Some(worst)
}

/// Matches two sorted eigenvalue lists within a relative tolerance; returns
/// the unmatched values of each side.
pub fn symmetric_difference(a: &[f64], b: &[f64], rel_tol: f64, scale: f64) -> (Vec<f64>, Vec<f64>) {
    let close = |x: f64, y: f64| (x - y).abs() <= rel_tol * x.abs().max(y.abs()).max(scale);
    let only_a = a.iter().copied().filter(|&x| !b.iter().any(|&y| close(x, y))).collect();
    let only_b = b.iter().copied().filter(|&y| !a.iter().any(|&x| close(x, y))).collect();
    (only_a, only_b)
}
