//! Local spectral theory for operators on `ℂⁿ`.
//!
//! Exact computation runs over the Gaussian rationals `ℚ(i)`: analytic cores,
//! Jordan products, rank-one operators and the constructive witnesses built
//! on top of them. A floating-point backend (`local`) computes local spectra
//! and local spectral radii and is used to cross-check the exact results.

pub mod certificate;
pub mod error;
pub mod lemma;
pub mod linalg;
pub mod local;
pub mod preserver;
pub mod sample;
pub mod scalar;
pub mod spectral;
pub mod subspace;

pub use error::{Error, Result};
pub use linalg::{Functional, Matrix, Vector};
pub use scalar::GaussianRational;
pub use subspace::Subspace;
