//! Unfitted multi-level *hp* finite elements.
//!
//! A discretization is a stack of axis-aligned Cartesian meshes. Level 0
//! covers the analysis domain; every further level is an overlay placed
//! anywhere inside it, carrying its own integrated Legendre basis. Overlay
//! functions that do not vanish on the overlay boundary inside the domain are
//! constrained to zero, and the remaining functions of all levels are summed.
//! Coupling between levels is realized purely in assembly, over integration
//! regions that cross no element boundary of any contributing mesh.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod assembly;
pub mod basis;
mod error;
pub mod math;
pub mod mesh;
pub mod postproc;
pub mod quadrature;
pub mod regions;
pub mod solvers;
pub mod space;
pub mod sparse;
pub mod transient;

pub use error::{Error, Result};
pub use mesh::{Aabb, CartesianMesh};
