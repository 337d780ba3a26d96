//! Static impurities in a Raman-coupled two-component 1D Bose gas.
//!
//! The impurities sit in a deep optical lattice and deform the two condensate
//! components linearly. The deformations decouple into two normal modes with
//! inverse healing lengths η±, so profiles and energies reduce to closed forms
//! built from error functions. The [`oracle`] module solves the same problems
//! by finite differences and adaptive quadrature, independently of the closed
//! forms.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// tabulated coefficients keep the digits of their source
#![allow(clippy::excessive_precision)]

pub mod config;
pub mod density;
pub mod energy;
pub mod error;
pub mod modes;
pub mod oracle;
pub mod profiles;
pub mod specfun;
pub mod sweep;
pub mod units;
pub mod verification;

pub use error::{Error, ErrorKind, Result};
pub use modes::{Branch, CouplingMatrix, EffectiveModes};
pub use profiles::{DeformationProfile, ImpurityDensity};
pub use units::{reference_params, DensityConvention, MixtureParams, RamanDrive};
