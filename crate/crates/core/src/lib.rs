//! Landscape analysis for symmetric order-3 tensor decomposition.
//!
//! The crate evaluates the kernel form of the decomposition loss against the
//! diagonal target `T_e`, its gradient and Hessian, and builds on that a catalog
//! of symmetric critical families, exact polynomial restrictions to fixed-point
//! spaces, Puiseux expansions in the dimension `d`, Hessian spectra, and radial
//! curve / sphere-minimization saddle certificates.

pub mod calculus;
pub mod error;
pub mod families;
pub mod puiseux;
pub mod radial;
pub mod spectra;
pub mod symbolic;
pub mod symmetry;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::{KernelSpec, WeightMatrix};
