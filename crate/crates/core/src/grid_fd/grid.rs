use super::GridError;
use crate::vec3::{self, Vec3};

/// Boundary treatment of a structured grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// Nodes `0..n` with node `n` identified with node `0`.
    Periodic,
    /// Nodes `0..n` including both end points. The outer ring of nodes is
    /// held fixed by every solver and operators leave it untouched.
    DirichletFrozen,
}

/// Uniform structured grid in one to three dimensions.
///
/// Nodes sit at `origin + i * spacing` per axis. Linear indices run with
/// axis 0 fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    dim: usize,
    counts: [usize; 3],
    spacing: [f64; 3],
    origin: [f64; 3],
    boundary: Boundary,
}

impl Grid {
    pub fn new(
        dim: usize,
        counts: &[usize],
        spacing: &[f64],
        origin: &[f64],
        boundary: Boundary,
    ) -> Result<Self, GridError> {
        if !(1..=3).contains(&dim) {
            return Err(GridError::InvalidGrid(format!(
                "dimension {dim} not in 1..=3"
            )));
        }
        if counts.len() != dim || spacing.len() != dim || origin.len() != dim {
            return Err(GridError::InvalidGrid(format!(
                "expected {dim} entries per axis, got counts={} spacing={} origin={}",
                counts.len(),
                spacing.len(),
                origin.len()
            )));
        }
        let mut c = [1usize; 3];
        let mut h = [1.0f64; 3];
        let mut o = [0.0f64; 3];
        for axis in 0..dim {
            if counts[axis] == 0 {
                return Err(GridError::InvalidGrid(format!("axis {axis} has no nodes")));
            }
            if !(spacing[axis] > 0.0) || !spacing[axis].is_finite() {
                return Err(GridError::InvalidGrid(format!(
                    "spacing {} on axis {axis} must be positive",
                    spacing[axis]
                )));
            }
            c[axis] = counts[axis];
            h[axis] = spacing[axis];
            o[axis] = origin[axis];
        }
        Ok(Self {
            dim,
            counts: c,
            spacing: h,
            origin: o,
            boundary,
        })
    }

    /// Periodic grid on `[0, extent)^dim` with `n` nodes per axis.
    pub fn periodic(dim: usize, n: usize, extent: f64) -> Result<Self, GridError> {
        let h = extent / n as f64;
        Self::new(
            dim,
            &vec![n; dim],
            &vec![h; dim],
            &vec![0.0; dim],
            Boundary::Periodic,
        )
    }

    /// Periodic unit cube with `n` nodes per axis.
    pub fn periodic_unit(dim: usize, n: usize) -> Result<Self, GridError> {
        Self::periodic(dim, n, 1.0)
    }

    /// Dirichlet box centred at the origin with nodes `-half..=half` times
    /// `spacing` on every axis.
    pub fn centered_box(dim: usize, half: usize, spacing: f64) -> Result<Self, GridError> {
        let n = 2 * half + 1;
        let o = -(half as f64) * spacing;
        Self::new(
            dim,
            &vec![n; dim],
            &vec![spacing; dim],
            &vec![o; dim],
            Boundary::DirichletFrozen,
        )
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    #[inline]
    pub fn count(&self, axis: usize) -> usize {
        self.counts[axis]
    }

    #[inline]
    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }

    #[inline]
    pub fn spacing(&self, axis: usize) -> f64 {
        self.spacing[axis]
    }

    #[inline]
    pub fn origin(&self, axis: usize) -> f64 {
        self.origin[axis]
    }

    /// Physical length covered along `axis`.
    pub fn extent(&self, axis: usize) -> f64 {
        match self.boundary {
            Boundary::Periodic => self.spacing[axis] * self.counts[axis] as f64,
            Boundary::DirichletFrozen => self.spacing[axis] * (self.counts[axis] - 1) as f64,
        }
    }

    /// Volume element `prod(spacing)`.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing[a]).product()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.counts[0] * self.counts[1] * self.counts[2]
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Distance between neighbouring linear indices along `axis`.
    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        match axis {
            0 => 1,
            1 => self.counts[0],
            _ => self.counts[0] * self.counts[1],
        }
    }

    #[inline]
    pub fn index(&self, multi: [usize; 3]) -> usize {
        multi[0] + self.counts[0] * (multi[1] + self.counts[1] * multi[2])
    }

    #[inline]
    pub fn multi_index(&self, idx: usize) -> [usize; 3] {
        let i0 = idx % self.counts[0];
        let rest = idx / self.counts[0];
        [i0, rest % self.counts[1], rest / self.counts[1]]
    }

    /// Coordinates of node `idx`; unused axes are zero.
    #[inline]
    pub fn coords(&self, idx: usize) -> [f64; 3] {
        let m = self.multi_index(idx);
        let mut x = [0.0; 3];
        for axis in 0..self.dim {
            x[axis] = self.origin[axis] + m[axis] as f64 * self.spacing[axis];
        }
        x
    }

    /// Neighbour of `idx` shifted by `offset` along `axis`; periodic grids
    /// wrap, Dirichlet grids return `None` outside the box.
    pub fn neighbor(&self, idx: usize, axis: usize, offset: isize) -> Option<usize> {
        let m = self.multi_index(idx);
        let n = self.counts[axis] as isize;
        let j = m[axis] as isize + offset;
        let j = match self.boundary {
            Boundary::Periodic => j.rem_euclid(n),
            Boundary::DirichletFrozen => {
                if j < 0 || j >= n {
                    return None;
                }
                j
            }
        };
        let mut mm = m;
        mm[axis] = j as usize;
        Some(self.index(mm))
    }

    /// Whether node `idx` lies at least `radius` nodes away from every
    /// Dirichlet face. Always true on periodic grids.
    pub fn is_interior(&self, idx: usize, radius: usize) -> bool {
        if self.boundary == Boundary::Periodic {
            return true;
        }
        let m = self.multi_index(idx);
        (0..self.dim).all(|a| m[a] >= radius && m[a] + radius < self.counts[a])
    }

    /// Same node layout with a different boundary mode.
    pub fn with_boundary(&self, boundary: Boundary) -> Self {
        let mut g = self.clone();
        g.boundary = boundary;
        g
    }
}

/// Values of type `T` attached to every node of a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T> {
    grid: Grid,
    values: Vec<T>,
}

pub type ScalarField = Field<f64>;
pub type VectorField = Field<Vec3>;
/// A vector field whose node values are unit vectors.
pub type MagnetizationField = VectorField;

impl<T: Clone> Field<T> {
    pub fn filled(grid: Grid, value: T) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![value; n],
        }
    }
}

impl<T> Field<T> {
    pub fn from_values(grid: Grid, values: Vec<T>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::ShapeMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(&[f64; 3]) -> T) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.coords(i))).collect();
        Self { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Field<U> {
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }

    pub fn same_shape<U>(&self, other: &Field<U>) -> bool {
        self.grid.counts == other.grid.counts && self.grid.dim == other.grid.dim
    }
}

impl VectorField {
    /// Largest `| |m_i| - 1 |` over all nodes.
    pub fn max_norm_deviation(&self) -> f64 {
        self.values
            .iter()
            .map(|v| (vec3::norm(*v) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Projects every node vector onto the unit sphere.
    pub fn normalize(&mut self) -> Result<(), GridError> {
        for (i, v) in self.values.iter_mut().enumerate() {
            let n = vec3::norm(*v);
            if !(n >= 1e-8) {
                return Err(GridError::ZeroNorm { node: i, norm: n });
            }
            *v = vec3::scale(1.0 / n, *v);
        }
        Ok(())
    }

    /// Largest nodewise Euclidean distance to `other`.
    pub fn max_distance(&self, other: &VectorField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| vec3::norm(vec3::sub(*a, *b)))
            .fold(0.0, f64::max)
    }

    /// Componentwise mean over all nodes.
    pub fn mean(&self) -> Vec3 {
        let mut s = [0.0; 3];
        for v in &self.values {
            s = vec3::add(s, *v);
        }
        vec3::scale(1.0 / self.values.len() as f64, s)
    }
}
