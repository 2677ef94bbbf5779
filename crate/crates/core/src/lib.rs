//! Spectral pricing of double-barrier knock-out options under
//! one-dimensional time-homogeneous diffusions.
//!
//! The pricing equation on `[L, U]` is recast as a regular Sturm-Liouville
//! problem. Its eigenfunctions are represented by a Neumann series of
//! spherical Bessel functions whose coefficients come from a
//! quadrature-driven recurrence. Eigenvalues are roots of the series
//! evaluated at the upper barrier.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod fd;
pub mod mesh;
pub mod model;
pub mod nsbf;
pub mod pipeline;
pub mod pricing;
pub mod spectrum;
pub mod spps;

pub use config::{RunConfig, PRESETS};
pub use error::{Error, Result};
pub use fd::{solve_pde, FdGrid};
pub use mesh::{inner_product, GridFunction, Mesh};
pub use model::{calibrate_delta, drift_of, DiffusionSpec, EjdcevParams, SlCoefficients};
pub use nsbf::{NsbfCoefficients, NsbfSettings};
pub use pipeline::SpectralModel;
pub use pricing::{OptionContract, OptionStyle, PricingResult};
pub use spectrum::{EigenPair, RootGrid};
pub use spps::{solve_particular, ParticularSolution, SppsSettings};
