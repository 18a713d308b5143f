use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Minimum number of samples per axis (one-sided second derivative stencil).
pub const MIN_EXTENT: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// Samples at `k·Δx`, `k = 0..e`, with period `e·Δx`.
    Periodic,
    /// Samples at `k·Δx`, `k = 0..e`, endpoints included.
    Dirichlet,
}

impl Boundary {
    pub fn code(self) -> char {
        match self {
            Boundary::Periodic => 'P',
            Boundary::Dirichlet => 'D',
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "P" | "p" | "periodic" => Some(Boundary::Periodic),
            "D" | "d" | "dirichlet" => Some(Boundary::Dirichlet),
            _ => None,
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Periodic => f.write_str("periodic"),
            Boundary::Dirichlet => f.write_str("dirichlet"),
        }
    }
}

/// Uniform rectangular sampling of the fiber `ℝⁿ`, stored row-major (last
/// axis fastest). Coordinates start at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    extents: Vec<usize>,
    spacing: Vec<f64>,
    strides: Vec<usize>,
    boundary: Boundary,
}

impl Grid {
    pub fn new(extents: Vec<usize>, spacing: Vec<f64>, boundary: Boundary) -> Result<Self> {
        if extents.is_empty() {
            return Err(Error::InvalidGrid("grid needs at least one axis".into()));
        }
        if extents.len() != spacing.len() {
            return Err(Error::InvalidGrid(format!(
                "{} extents but {} spacings",
                extents.len(),
                spacing.len()
            )));
        }
        for (axis, (&e, &h)) in extents.iter().zip(&spacing).enumerate() {
            if e < MIN_EXTENT {
                return Err(Error::GridTooSmall { axis, extent: e, required: MIN_EXTENT });
            }
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidGrid(format!("spacing {h} on axis {axis} must be positive")));
            }
        }
        let mut strides = alloc::vec![1; extents.len()];
        for axis in (0..extents.len() - 1).rev() {
            strides[axis] = strides[axis + 1] * extents[axis + 1];
        }
        Ok(Self { extents, spacing, strides, boundary })
    }

    /// Same extent and spacing on every axis.
    pub fn uniform(dim: usize, extent: usize, spacing: f64, boundary: Boundary) -> Result<Self> {
        Self::new(alloc::vec![extent; dim], alloc::vec![spacing; dim], boundary)
    }

    /// Periodic grid with `extent` samples per axis covering `[0, length)`.
    pub fn periodic_box(dim: usize, extent: usize, length: f64) -> Result<Self> {
        Self::uniform(dim, extent, length / extent as f64, Boundary::Periodic)
    }

    /// Dirichlet grid with `extent` samples per axis covering `[0, length]`.
    pub fn dirichlet_box(dim: usize, extent: usize, length: f64) -> Result<Self> {
        Self::uniform(dim, extent, length / (extent - 1) as f64, Boundary::Dirichlet)
    }

    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn len(&self) -> usize {
        self.extents.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    pub fn max_spacing(&self) -> f64 {
        self.spacing.iter().copied().fold(0.0, f64::max)
    }

    /// Sample index along `axis` of flat point `flat`.
    #[inline]
    pub fn axis_index(&self, flat: usize, axis: usize) -> usize {
        (flat / self.strides[axis]) % self.extents[axis]
    }

    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        (0..self.dim()).map(|a| self.axis_index(flat, a)).collect()
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    #[inline]
    pub fn coordinate(&self, flat: usize, axis: usize) -> f64 {
        self.axis_index(flat, axis) as f64 * self.spacing[axis]
    }

    /// Flat index of the neighbour `offset` samples away along `axis`,
    /// wrapping on periodic grids and `None` outside a Dirichlet grid.
    #[inline]
    pub fn neighbor(&self, flat: usize, axis: usize, offset: isize) -> Option<usize> {
        let e = self.extents[axis] as isize;
        let k = self.axis_index(flat, axis) as isize;
        let mut j = k + offset;
        match self.boundary {
            Boundary::Periodic => j = j.rem_euclid(e),
            Boundary::Dirichlet => {
                if j < 0 || j >= e {
                    return None;
                }
            }
        }
        Some((flat as isize + (j - k) * self.strides[axis] as isize) as usize)
    }

    /// True when the point lies at least `margin` samples away from every
    /// Dirichlet boundary. Always true on periodic grids.
    pub fn is_interior(&self, flat: usize, margin: usize) -> bool {
        match self.boundary {
            Boundary::Periodic => true,
            Boundary::Dirichlet => (0..self.dim()).all(|a| {
                let k = self.axis_index(flat, a);
                k >= margin && k + margin < self.extents[a]
            }),
        }
    }

    /// Points used in oracle comparisons: everything on periodic grids, the
    /// points two or more samples inside the boundary on Dirichlet grids.
    pub fn comparison_mask(&self) -> Vec<bool> {
        (0..self.len()).map(|p| self.is_interior(p, 2)).collect()
    }

    /// Same domain at half the spacing.
    pub fn refined(&self) -> Self {
        let extents = match self.boundary {
            Boundary::Periodic => self.extents.iter().map(|e| 2 * e).collect(),
            Boundary::Dirichlet => self.extents.iter().map(|e| 2 * (e - 1) + 1).collect(),
        };
        let spacing = self.spacing.iter().map(|h| h / 2.0).collect();
        Self::new(extents, spacing, self.boundary).expect("refinement keeps a valid grid")
    }

    pub fn same_shape(&self, other: &Grid) -> bool {
        self.extents == other.extents && self.boundary == other.boundary && self.spacing == other.spacing
    }
}
