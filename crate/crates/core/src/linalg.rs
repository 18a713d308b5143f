//! Small dense helpers on top of `nalgebra`, plus a banded LU used by the
//! CMC solver and the harmonic-extension initial guess.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Inverse and determinant of a symmetric positive definite `n×n` matrix
/// given row-major. `None` when the matrix is not positive definite.
pub fn spd_inverse(m: &[f64], n: usize) -> Option<(Vec<f64>, f64)> {
    match n {
        1 => (m[0] > 0.0).then(|| (vec![1.0 / m[0]], m[0])),
        2 => {
            let det = m[0] * m[3] - m[1] * m[2];
            (m[0] > 0.0 && det > 0.0).then(|| (vec![m[3] / det, -m[1] / det, -m[2] / det, m[0] / det], det))
        }
        _ => {
            let chol = DMatrix::from_row_slice(n, n, m).cholesky()?;
            let l = chol.l_dirty();
            let det = (0..n).map(|i| l[(i, i)]).product::<f64>();
            let det = det * det;
            let inv = chol.inverse();
            Some(((0..n * n).map(|k| inv[(k / n, k % n)]).collect(), det))
        }
    }
}

/// Eigenvalues of `g⁻¹ b` for symmetric `g` (positive definite) and `b`,
/// computed from the symmetric matrix `L⁻¹ b L⁻ᵀ` where `g = L Lᵀ`, sorted
/// ascending.
pub fn generalized_eigenvalues(g: &[f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    let chol = DMatrix::from_row_slice(n, n, g).cholesky()?;
    let l = chol.l();
    let bm = DMatrix::from_row_slice(n, n, b);
    // X = L⁻¹ B, then S = L⁻¹ Xᵀ = L⁻¹ B L⁻ᵀ.
    let x = l.clone().solve_lower_triangular(&bm)?;
    let mut s = l.solve_lower_triangular(&x.transpose())?;
    // Symmetrize away rounding so the eigen solver sees an exact symmetric matrix.
    for i in 0..n {
        for j in i + 1..n {
            let avg = 0.5 * (s[(i, j)] + s[(j, i)]);
            s[(i, j)] = avg;
            s[(j, i)] = avg;
        }
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    Some(ev)
}

/// Square matrix with `lower` sub-diagonals and `upper` super-diagonals,
/// stored row-wise with room for the fill-in of partial pivoting.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    lower: usize,
    upper: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        let width = 2 * lower + upper + 1;
        Self { n, lower, upper, width, data: vec![0.0; n * width] }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        // Row i keeps columns i-lower ..= i+lower+upper.
        if j + self.lower < i || j > i + self.lower + self.upper {
            None
        } else {
            Some(i * self.width + (j + self.lower - i))
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Panics when `(i, j)` lies outside the declared band.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(j + self.lower >= i && j <= i + self.upper, "entry ({i},{j}) outside band");
        let s = self.slot(i, j).unwrap();
        self.data[s] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let cur = self.get(i, j);
        self.set(i, j, cur + v);
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.lower);
                let hi = (i + self.upper).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Solves `A x = rhs` by Gaussian elimination with partial pivoting,
    /// consuming the matrix.
    pub fn solve(mut self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        let mut b = rhs.to_vec();
        let reach = self.lower + self.upper;
        for k in 0..n {
            let last_row = (k + self.lower).min(n - 1);
            let mut piv = k;
            let mut best = self.get(k, k).abs();
            for i in k + 1..=last_row {
                let v = self.get(i, k).abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if !(best > 0.0) || !best.is_finite() {
                return Err(Error::Singular { row: k });
            }
            let last_col = (k + reach).min(n - 1);
            if piv != k {
                for j in k..=last_col {
                    let a = self.get(k, j);
                    let c = self.get(piv, j);
                    let sk = self.slot(k, j).unwrap();
                    self.data[sk] = c;
                    if let Some(sp) = self.slot(piv, j) {
                        self.data[sp] = a;
                    }
                }
                b.swap(k, piv);
            }
            let pivot = self.get(k, k);
            for i in k + 1..=last_row {
                let factor = self.get(i, k) / pivot;
                if factor == 0.0 {
                    continue;
                }
                for j in k..=last_col {
                    let akj = self.get(k, j);
                    if akj != 0.0 {
                        let s = self.slot(i, j).unwrap();
                        self.data[s] -= factor * akj;
                    }
                }
                b[i] -= factor * b[k];
            }
        }
        let mut x = vec![0.0; n];
        for k in (0..n).rev() {
            let last_col = (k + reach).min(n - 1);
            let mut acc = b[k];
            for j in k + 1..=last_col {
                acc -= self.get(k, j) * x[j];
            }
            x[k] = acc / self.get(k, k);
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spd_inverse_matches_identity() {
        for n in 1..=4 {
            let mut m = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    m[i * n + j] = if i == j { 3.0 + i as f64 } else { 0.5 / (1.0 + (i + j) as f64) };
                }
            }
            let (inv, det) = spd_inverse(&m, n).unwrap();
            assert!(det > 0.0);
            for i in 0..n {
                for j in 0..n {
                    let e: f64 = (0..n).map(|k| m[i * n + k] * inv[k * n + j]).sum();
                    assert!((e - if i == j { 1.0 } else { 0.0 }).abs() < 1e-13);
                }
            }
        }
        assert!(spd_inverse(&[1.0, 2.0, 2.0, 1.0], 2).is_none());
        assert!(spd_inverse(&[1.0, 0.0, 0.0, 0.0, 1.0, 3.0, 0.0, 3.0, 1.0], 3).is_none());
    }

    #[test]
    fn generalized_eigenvalues_of_scaled_identity() {
        let g = [4.0, 0.0, 0.0, 4.0];
        let b = [2.0, 0.0, 0.0, -8.0];
        let ev = generalized_eigenvalues(&g, &b, 2).unwrap();
        assert!((ev[0] + 2.0).abs() < 1e-14 && (ev[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn band_solve_matches_dense_product() {
        let n = 40;
        let (lo, up) = (3, 2);
        let mut a = BandMatrix::zeros(n, lo, up);
        for i in 0..n {
            for j in i.saturating_sub(lo)..=(i + up).min(n - 1) {
                // Weak diagonal forces pivoting on some rows.
                let v = if i == j { 0.1 * ((i % 3) as f64) } else { 1.0 + ((i * 7 + j * 3) % 5) as f64 };
                a.set(i, j, v);
            }
        }
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let rhs = a.mul_vec(&x_true);
        let x = a.solve(&rhs).unwrap();
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-9, "{u} vs {v}");
        }
    }

    #[test]
    fn singular_band_is_reported() {
        let a = BandMatrix::zeros(4, 1, 1);
        assert!(matches!(a.solve(&[1.0; 4]), Err(Error::Singular { row: 0 })));
    }
}
