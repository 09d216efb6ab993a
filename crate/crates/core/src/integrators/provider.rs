use super::IntegratorError;
use crate::grid_fd::{div_a_grad_into, div_grad_ah, FaceCoefficients, Field, Grid, Mat3};
use crate::vec3::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProviderTag {
    MicroExchange,
    HomogenizedExchange,
    HmmUpscaled,
    Constant,
}

/// Maps a magnetization lattice to its effective field `H(m)`.
pub trait FieldProvider: Sync {
    /// Number of lattice nodes the provider expects.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Writes `H(m)` at time `t` into `out`.
    fn field(&self, m: &[Vec3], t: f64, out: &mut [Vec3]) -> Result<(), IntegratorError>;

    fn tag(&self) -> ProviderTag;
}

/// `∇·(a∇m)` with the conservative second-order stencil.
#[derive(Clone, Debug)]
pub struct MicroExchange {
    faces: FaceCoefficients,
}

impl MicroExchange {
    pub fn new(faces: FaceCoefficients) -> Self {
        Self { faces }
    }

    pub fn faces(&self) -> &FaceCoefficients {
        &self.faces
    }
}

impl FieldProvider for MicroExchange {
    fn len(&self) -> usize {
        self.faces.grid().len()
    }

    fn field(&self, m: &[Vec3], _t: f64, out: &mut [Vec3]) -> Result<(), IntegratorError> {
        if m.len() != self.len() || out.len() != self.len() {
            return Err(IntegratorError::ShapeMismatch {
                expected: self.len(),
                found: m.len(),
            });
        }
        div_a_grad_into(&self.faces, m, out);
        Ok(())
    }

    fn tag(&self) -> ProviderTag {
        ProviderTag::MicroExchange
    }
}

/// `Σ A_rs ∂_r∂_s m` with central stencils of a fixed order on a periodic grid.
#[derive(Clone, Debug)]
pub struct HomogenizedExchange {
    grid: Grid,
    ah: Mat3,
    order: usize,
}

impl HomogenizedExchange {
    pub fn new(grid: Grid, ah: Mat3, order: usize) -> Result<Self, IntegratorError> {
        // Validate matrix and stencil once up front.
        let probe = Field::filled(grid.clone(), [0.0, 0.0, 1.0]);
        div_grad_ah(&probe, &ah, order)?;
        Ok(Self { grid, ah, order })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.ah
    }

    pub fn order(&self) -> usize {
        self.order
    }
}

impl FieldProvider for HomogenizedExchange {
    fn len(&self) -> usize {
        self.grid.len()
    }

    fn field(&self, m: &[Vec3], _t: f64, out: &mut [Vec3]) -> Result<(), IntegratorError> {
        let f = Field::from_values(self.grid.clone(), m.to_vec())?;
        let h = div_grad_ah(&f, &self.ah, self.order)?;
        if out.len() != h.len() {
            return Err(IntegratorError::ShapeMismatch {
                expected: h.len(),
                found: out.len(),
            });
        }
        out.copy_from_slice(h.values());
        Ok(())
    }

    fn tag(&self) -> ProviderTag {
        ProviderTag::HomogenizedExchange
    }
}

/// The same field vector at every node.
#[derive(Clone, Debug)]
pub struct ConstantField {
    pub value: Vec3,
    pub nodes: usize,
}

impl FieldProvider for ConstantField {
    fn len(&self) -> usize {
        self.nodes
    }

    fn field(&self, _m: &[Vec3], _t: f64, out: &mut [Vec3]) -> Result<(), IntegratorError> {
        out.iter_mut().for_each(|o| *o = self.value);
        Ok(())
    }

    fn tag(&self) -> ProviderTag {
        ProviderTag::Constant
    }
}
