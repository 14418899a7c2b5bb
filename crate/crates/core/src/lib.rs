//! Explicit BGG resolutions for simple complex Lie algebras.
//!
//! The crate builds the Bruhat graph of a Weyl group, computes every Verma
//! module map of the BGG resolution of `L(λ)` as an element of `U(n)` in a
//! fixed PBW basis, signs the maps so that `d² = 0`, and uses the resulting
//! complex to compute the cohomology of homogeneous vector bundles on flag
//! varieties `G/B` and `G/P`.
//!
//! All arithmetic is exact: structure constants, PBW coefficients and the
//! differentials are arbitrary precision integers.
//!
//! ```
//! use std::sync::Arc;
//! use bgg_core::{BggSetup, CohomologyEngine, WeightModule};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let setup = Arc::new(BggSetup::new("G2".parse()?, 1_000_000, 0)?);
//! let spec = "wedge(u,2)".parse()?;
//! let module = WeightModule::build(&setup.rs, &setup.consts, &spec, &[])?;
//! let result = CohomologyEngine::new(setup, Arc::new(module), vec![]).full_cohomology()?;
//! assert_eq!(result.dims_by_degree[0], 98);
//! # Ok(())
//! # }
//! ```

pub mod cohomology;
pub mod complex;
pub mod linalg;
pub mod modules;
pub mod pbw;
pub mod report;
pub mod root_system;
pub mod weyl;

pub use cohomology::{weyl_dimension, CohomologyEngine, CohomologyResult, LambdaCohomology};
pub use complex::{BggComplex, BggSetup, VermaMap};
pub use linalg::SparseIntMatrix;
pub use modules::{ActionCache, BaseModule, ModuleSpec, WeightModule};
pub use report::Format;
pub use pbw::{Monomial, PbwAlgebra, PbwElement};
pub use root_system::{CartanType, ChevalleyConstants, RootSystem, Weight};
pub use weyl::{BruhatGraph, WeylElement, WeylGroup};

/// Arbitrary precision integer used for every coefficient in the crate.
pub type Int = dashu_int::IBig;
