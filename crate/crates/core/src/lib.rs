//! Contracted generalized polarization tensors (CGPTs) of three-dimensional
//! inclusions.
//!
//! The crate covers the whole pipeline: surface meshes, a Nyström
//! discretization of the Neumann–Poincaré operator, CGPT computation and
//! its closed-form behaviour under translation, rotation and scaling,
//! multistatic response (MSR) simulation and inversion, and shape
//! descriptors that are invariant under all three transformations.

pub mod cgpt;
pub mod descriptors;
pub mod error;
pub mod harmonics;
pub mod mesh;
pub mod msr;
pub mod np_solver;

pub use error::{Error, MeshInvariant, Result};
