use super::{HmmConfig, HmmError};
use crate::coefficients::Coefficient;
use crate::grid_fd::Grid;
use crate::integrators::{FieldProvider, IntegratorError, ProviderTag};
use crate::micro::{
    micro_grid, micro_initial_data, solve_micro, MicroError, MicroSetup, StencilInterpolant,
};
use crate::vec3::Vec3;
use rayon::prelude::*;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

/// Effective field from one micro problem per macro node.
pub struct HmmProvider {
    grid: Grid,
    coefficient: Coefficient,
    setup: MicroSetup,
    micro_grid: Grid,
    pool: Option<rayon::ThreadPool>,
    solves: AtomicUsize,
    /// Bit pattern of the largest micro norm drift seen.
    drift: AtomicU64,
}

impl HmmProvider {
    pub fn new(config: &HmmConfig) -> Result<Self, HmmError> {
        config.validate()?;
        let disc = config.micro.resolve(&config.coefficient)?;
        let pool = match config.workers {
            Some(n) => Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n.max(1))
                    .build()
                    .map_err(|e| HmmError::InvalidConfig(format!("worker pool: {e}")))?,
            ),
            None => None,
        };
        Ok(Self {
            grid: config.macro_grid.clone(),
            coefficient: config.coefficient.clone(),
            setup: config.micro.clone(),
            micro_grid: micro_grid(&disc)?,
            pool,
            solves: AtomicUsize::new(0),
            drift: AtomicU64::new(0),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn micro_solves(&self) -> usize {
        self.solves.load(Ordering::Relaxed)
    }

    pub fn max_micro_drift(&self) -> f64 {
        f64::from_bits(self.drift.load(Ordering::Relaxed))
    }

    /// Stencil values around `node` with periodic wrap, axis 0 fastest.
    fn stencil(&self, m: &[Vec3], node: usize) -> Vec<Vec3> {
        let g = &self.grid;
        let d = g.dim();
        let k = self.setup.stencil_half() as isize;
        let width = (2 * k + 1) as usize;
        let center = g.multi_index(node);
        (0..width.pow(d as u32))
            .map(|idx| {
                let mut mi = [0usize; 3];
                let mut rest = idx;
                for a in 0..d {
                    let off = (rest % width) as isize - k;
                    rest /= width;
                    let n = g.count(a) as isize;
                    mi[a] = (center[a] as isize + off).rem_euclid(n) as usize;
                }
                m[g.index(mi)]
            })
            .collect()
    }

    /// Upscaled field at one macro node.
    pub fn node_field(&self, m: &[Vec3], node: usize) -> Result<Vec3, MicroError> {
        let g = &self.grid;
        let interp = StencilInterpolant::new(
            g.dim(),
            self.setup.stencil_half(),
            g.spacing(0),
            self.stencil(m, node),
        )?;
        let initial = micro_initial_data(&interp, &self.micro_grid)?;
        let r = solve_micro(&initial, &self.coefficient, &g.coords(node), &self.setup)?;
        self.solves.fetch_add(1, Ordering::Relaxed);
        self.drift
            .fetch_max(r.norm_drift.to_bits(), Ordering::Relaxed);
        Ok(r.h_avg)
    }

    fn batch(&self, m: &[Vec3]) -> Vec<Result<Vec3, MicroError>> {
        (0..m.len())
            .into_par_iter()
            .map(|i| self.node_field(m, i))
            .collect()
    }
}

impl FieldProvider for HmmProvider {
    fn len(&self) -> usize {
        self.grid.len()
    }

    fn field(&self, m: &[Vec3], _t: f64, out: &mut [Vec3]) -> Result<(), IntegratorError> {
        if m.len() != self.len() || out.len() != self.len() {
            return Err(IntegratorError::ShapeMismatch {
                expected: self.len(),
                found: m.len(),
            });
        }
        let results = match &self.pool {
            Some(pool) => pool.install(|| self.batch(m)),
            None => self.batch(m),
        };
        for (node, (r, o)) in results.into_iter().zip(out.iter_mut()).enumerate() {
            *o = r.map_err(|e| IntegratorError::Provider {
                node: Some(node),
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    fn tag(&self) -> ProviderTag {
        ProviderTag::HmmUpscaled
    }
}
