//! Compactly supported polynomial averaging kernels and space-time upscaling.

mod average;
mod kernel;
mod quadrature;

pub use average::{space_time_average, spatial_weights, temporal_weights, SampledTrajectory};
pub use kernel::{construct_kernel, Kernel};
pub use quadrature::{composite_simpson, gauss_legendre};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("kernel parameters p={p}, q={q} outside 0..=12")]
    InvalidParameters { p: usize, q: usize },
    #[error("moment system condition estimate {condition:e} exceeds 1e12")]
    IllConditionedSystem { condition: f64 },
    #[error("averaging box exceeds the sampled data: {0}")]
    AveragingBoxExceedsData(String),
    #[error("cannot read kernel dump: {0}")]
    Parse(String),
}
