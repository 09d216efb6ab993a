//! Heterogeneous multiscale solver for the Landau–Lifshitz equation with a
//! rapidly oscillating exchange coefficient.

pub mod coefficients;
pub mod experiments;
pub mod grid_fd;
pub mod integrators;
pub mod kernels;
pub mod macro_hmm;
pub mod micro;
pub mod reference_solvers;
pub mod vec3;
