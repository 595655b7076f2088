//! Complex band matrices with partially pivoted LU.

use nalgebra::DMatrix;

use crate::clifford::C64;
use crate::error::{Error, Result};

/// Square band matrix stored row-wise; entry (i, j) lives at
/// `i * width + (j + kl - i)` with `kl` extra upper diagonals kept for
/// pivoting fill.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<C64>,
}

impl BandMatrix {
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, C64)]) -> Self {
        let (mut kl, mut ku) = (0, 0);
        for &(i, j, _) in triplets {
            if i > j {
                kl = kl.max(i - j);
            } else {
                ku = ku.max(j - i);
            }
        }
        let mut m = BandMatrix { n, kl, ku, data: vec![C64::new(0.0, 0.0); n * (2 * kl + ku + 1)] };
        for &(i, j, v) in triplets {
            let k = m.index(i, j);
            m.data[k] += v;
        }
        m
    }

    fn width(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    fn index(&self, i: usize, j: usize) -> usize {
        i * self.width() + (j + self.kl - i)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// (lower, upper) bandwidth of the stored matrix.
    pub fn bandwidth(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        if j + self.kl < i || j > i + self.ku {
            C64::new(0.0, 0.0)
        } else {
            self.data[self.index(i, j)]
        }
    }

    fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.kl)..(i + self.ku + 1).min(self.n)
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        (0..self.n)
            .map(|i| self.row_range(i).map(|j| self.data[self.index(i, j)] * x[j]).sum())
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// LU factorization of `self − shift·I`.
    pub fn factor_shifted(&self, shift: C64) -> Result<BandLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let mut a = self.data.clone();
        for i in 0..n {
            let k = self.index(i, i);
            a[k] -= shift;
        }
        let mut lower = vec![C64::new(0.0, 0.0); n * kl.max(1)];
        let mut piv = vec![0usize; n];
        let scale = self.max_abs().max(shift.norm()).max(f64::MIN_POSITIVE);
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let p = (k..=last)
                .max_by(|&x, &y| a[self.index(x, k)].norm().total_cmp(&a[self.index(y, k)].norm()))
                .unwrap();
            piv[k] = p;
            let jmax = (k + kl + ku).min(n - 1);
            if p != k {
                for j in k..=jmax {
                    let (ip, ik) = (self.index(p, j), self.index(k, j));
                    a.swap(ip, ik);
                }
            }
            let pivot = a[self.index(k, k)];
            if pivot.norm() <= 1e-300 * scale {
                return Err(Error::EigenSolver(format!("singular band matrix at row {k}")));
            }
            for i in (k + 1)..=last {
                let l = a[self.index(i, k)] / pivot;
                lower[k * kl + (i - k - 1)] = l;
                if l == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in (k + 1)..=jmax {
                    let akj = a[self.index(k, j)];
                    let ij = self.index(i, j);
                    a[ij] -= l * akj;
                }
            }
        }
        Ok(BandLu { n, kl, ku, width: self.width(), upper: a, lower, piv })
    }
}

#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    upper: Vec<C64>,
    lower: Vec<C64>,
    piv: Vec<usize>,
}

impl BandLu {
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.piv[k]);
            let xk = x[k];
            for i in (k + 1)..=(k + kl).min(n - 1) {
                x[i] -= self.lower[k * kl + (i - k - 1)] * xk;
            }
        }
        for i in (0..n).rev() {
            let row = i * self.width + kl - i;
            let mut s = x[i];
            for j in (i + 1)..=(i + kl + ku).min(n - 1) {
                s -= self.upper[row + j] * x[j];
            }
            x[i] = s / self.upper[row + i];
        }
        x
    }
}
