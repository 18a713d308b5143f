use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::grid::Grid;
use crate::error::{Error, Result};

/// Real samples on a [`Grid`]. All samples are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(p) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index: grid.multi_index(p) });
        }
        Ok(Self { grid, values })
    }

    /// Caller guarantees length; finiteness is checked.
    pub(crate) fn from_vec(grid: &Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        debug_assert_eq!(values.len(), grid.len());
        Self::new(grid.clone(), values)
    }

    pub fn constant(grid: Arc<Grid>, value: f64) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, alloc::vec![value; n])
    }

    /// Samples `f(x)` at the grid coordinates.
    pub fn from_fn(grid: Arc<Grid>, mut f: impl FnMut(&[f64]) -> f64) -> Result<Self> {
        let dim = grid.dim();
        let mut x = alloc::vec![0.0; dim];
        let values = (0..grid.len())
            .map(|p| {
                for (a, xa) in x.iter_mut().enumerate() {
                    *xa = grid.coordinate(p, a);
                }
                f(&x)
            })
            .collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, flat: usize) -> f64 {
        self.values[flat]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_vec(&self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_grid(other)?;
        Self::from_vec(&self.grid, self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect())
    }

    /// `a·self + b·other`.
    pub fn axpby(&self, a: f64, other: &ScalarField, b: f64) -> Result<Self> {
        self.zip_map(other, |x, y| a * x + b * y)
    }

    pub fn check_same_grid(&self, other: &ScalarField) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || self.grid.same_shape(&other.grid) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch("fields live on different grids".into()))
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|self − other|` over the points where `mask` is set, with the
    /// flat index where it occurs.
    pub fn max_abs_diff_masked(&self, other: &ScalarField, mask: &[bool]) -> (f64, usize) {
        let mut worst = (0.0, 0);
        for (p, (a, b)) in self.values.iter().zip(&other.values).enumerate() {
            if mask[p] {
                let d = (a - b).abs();
                if d > worst.0 {
                    worst = (d, p);
                }
            }
        }
        worst
    }
}

/// `n` scalar components sharing one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    components: Vec<ScalarField>,
}

impl VectorField {
    pub fn new(components: Vec<ScalarField>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::ShapeMismatch("vector field without components".into()));
        }
        for c in &components[1..] {
            components[0].check_same_grid(c)?;
        }
        Ok(Self { components })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.components[i]
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }
}

/// Symmetric `n×n` tensor samples, stored as the `n(n+1)/2` upper-triangle
/// components.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensorField {
    n: usize,
    components: Vec<ScalarField>,
}

impl SymTensorField {
    pub fn new(n: usize, components: Vec<ScalarField>) -> Result<Self> {
        if components.len() != n * (n + 1) / 2 || n == 0 {
            return Err(Error::ShapeMismatch(format!(
                "{} components for a symmetric {n}x{n} tensor",
                components.len()
            )));
        }
        for c in &components[1..] {
            components[0].check_same_grid(c)?;
        }
        Ok(Self { n, components })
    }

    /// Builds the tensor from a pointwise closure writing a full row-major
    /// `n×n` matrix; only the upper triangle is read.
    pub fn from_pointwise(grid: &Arc<Grid>, n: usize, mut f: impl FnMut(usize, &mut [f64])) -> Result<Self> {
        let len = grid.len();
        let mut data = alloc::vec![alloc::vec![0.0; len]; n * (n + 1) / 2];
        let mut m = alloc::vec![0.0; n * n];
        for p in 0..len {
            f(p, &mut m);
            for i in 0..n {
                for j in i..n {
                    data[Self::slot(n, i, j)][p] = m[i * n + j];
                }
            }
        }
        let components = data.into_iter().map(|v| ScalarField::from_vec(grid, v)).collect::<Result<_>>()?;
        Self::new(n, components)
    }

    /// Euclidean metric `δ_ij` on `grid`.
    pub fn identity(grid: &Arc<Grid>, n: usize) -> Result<Self> {
        Self::from_pointwise(grid, n, |_, m| {
            m.fill(0.0);
            for i in 0..n {
                m[i * n + i] = 1.0;
            }
        })
    }

    #[inline]
    fn slot(n: usize, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * (2 * n - i + 1) / 2 + (j - i)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.components[0].grid()
    }

    pub fn component(&self, i: usize, j: usize) -> &ScalarField {
        &self.components[Self::slot(self.n, i, j)]
    }

    /// Writes the full row-major matrix at point `p` into `out`.
    pub fn fill_matrix(&self, p: usize, out: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            for j in i..n {
                let v = self.components[Self::slot(n, i, j)].get(p);
                out[i * n + j] = v;
                out[j * n + i] = v;
            }
        }
    }
}

/// General `n×n` tensor samples (e.g. the shape operator with mixed
/// indices), row-major components.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField {
    n: usize,
    components: Vec<ScalarField>,
}

impl TensorField {
    pub fn from_pointwise(grid: &Arc<Grid>, n: usize, mut f: impl FnMut(usize, &mut [f64])) -> Result<Self> {
        let len = grid.len();
        let mut data = alloc::vec![alloc::vec![0.0; len]; n * n];
        let mut m = alloc::vec![0.0; n * n];
        for p in 0..len {
            f(p, &mut m);
            for (k, v) in m.iter().enumerate() {
                data[k][p] = *v;
            }
        }
        let components = data.into_iter().map(|v| ScalarField::from_vec(grid, v)).collect::<Result<_>>()?;
        Ok(Self { n, components })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn component(&self, i: usize, j: usize) -> &ScalarField {
        &self.components[i * self.n + j]
    }

    pub fn fill_matrix(&self, p: usize, out: &mut [f64]) {
        for (k, c) in self.components.iter().enumerate() {
            out[k] = c.get(p);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::warp::Boundary;

    fn grid() -> Arc<Grid> {
        Arc::new(Grid::uniform(2, 6, 0.5, Boundary::Periodic).unwrap())
    }

    #[test]
    fn rejects_non_finite_and_wrong_length() {
        let g = grid();
        let mut v = alloc::vec![0.0; g.len()];
        v[7] = f64::NAN;
        assert_eq!(ScalarField::new(g.clone(), v), Err(Error::NonFinite { index: alloc::vec![1, 1] }));
        assert!(ScalarField::new(g, alloc::vec![0.0; 3]).is_err());
    }

    #[test]
    fn sym_tensor_slots_cover_upper_triangle() {
        for n in 1..=4 {
            let mut seen = alloc::vec![false; n * (n + 1) / 2];
            for i in 0..n {
                for j in i..n {
                    let s = SymTensorField::slot(n, i, j);
                    assert!(!seen[s]);
                    seen[s] = true;
                    assert_eq!(s, SymTensorField::slot(n, j, i));
                }
            }
            assert!(seen.iter().all(|&b| b));
        }
    }

    #[test]
    fn sym_tensor_round_trips_matrix() {
        let g = grid();
        let t = SymTensorField::from_pointwise(&g, 3, |p, m| {
            for i in 0..3 {
                for j in 0..3 {
                    m[i * 3 + j] = (p + i + j) as f64 + if i == j { 10.0 } else { 0.0 };
                }
            }
        })
        .unwrap();
        let mut m = [0.0; 9];
        t.fill_matrix(5, &mut m);
        assert_eq!(m[1], 6.0);
        assert_eq!(m[3], 6.0);
        assert_eq!(m[8], 19.0);
    }
}
