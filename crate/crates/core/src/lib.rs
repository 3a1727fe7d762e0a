//! Discontinuous Galerkin time stepping for the fractional subdiffusion
//! problem `u' + B_alpha A u = f`, `-1 < alpha < 0`, with graded (h-version)
//! and geometric (hp-version) time meshes.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod kernel;
pub mod mesh;
pub mod problems;
pub mod spatial;
pub mod stepper;
pub mod timefn;

pub use error::{Error, Result};
pub use kernel::{FractionalOrder, KernelConfig, MemoryBlock};
pub use mesh::{MeshFamily, TimeMesh};
