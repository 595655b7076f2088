//! Small dense helpers on 4×4 complex matrices.

use crate::clifford::{CMat4, CVec4, C64};
use crate::error::{Error, Result};

/// Two orthonormal vectors spanning the range of a rank-2 matrix, chosen by
/// column-pivoted modified Gram–Schmidt. `pivot_tol` is relative to the
/// largest column norm.
pub fn orthonormal_column_pair(m: &CMat4, pivot_tol: f64) -> Result<[CVec4; 2]> {
    let mut cols: Vec<CVec4> = (0..4).map(|j| m.column(j).into_owned()).collect();
    let scale = cols.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if !(scale > 0.0) {
        return Err(Error::EigenSolver("zero matrix has no column span".into()));
    }
    let mut out = [CVec4::zeros(); 2];
    for slot in out.iter_mut() {
        let (best, norm) = cols
            .iter()
            .enumerate()
            .map(|(j, c)| (j, c.norm()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if norm <= pivot_tol * scale {
            return Err(Error::EigenSolver(format!(
                "column span has rank < 2 (pivot {norm:e}, scale {scale:e})"
            )));
        }
        let q = cols[best] / C64::from(norm);
        cols.swap_remove(best);
        for c in cols.iter_mut() {
            let proj = q.dotc(c);
            *c -= q * proj;
        }
        *slot = q;
    }
    Ok(out)
}

/// Singular values in ascending order.
pub fn singular_values(m: &CMat4) -> [f64; 4] {
    let sv = m.singular_values();
    let mut out = [sv[0], sv[1], sv[2], sv[3]];
    out.sort_by(|a, b| a.total_cmp(b));
    out
}

/// Right singular vector belonging to the smallest singular value.
pub fn null_vector(m: &CMat4) -> CVec4 {
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    v_t.row(idx).adjoint()
}

/// Gram matrix G_ij = ⟨c_i, c_j⟩ of the columns of `m`.
pub fn column_gram(m: &CMat4) -> CMat4 {
    m.adjoint() * m
}
