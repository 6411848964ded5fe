//! Numerics for subordinate Brownian motions `X_t = B(S_t)`.
//!
//! - [`bernstein`]: Laplace exponents and grid certificates of their scaling.
//! - [`densities`]: Lévy and potential densities by Laplace inversion.
//! - [`kernels`]: jump and Green kernels by subordination quadrature.
//! - [`simulate`]: subordinator / SBM paths and exit-problem Monte Carlo.
//! - [`harnack`]: Harnack, Poisson-kernel and Green-sandwich experiments.

pub mod bernstein;
pub mod closed_form;
pub mod densities;
pub mod error;
pub mod grid;
pub mod harnack;
pub mod inversion;
pub mod kernels;
pub mod quadrature;
pub mod simulate;
pub mod stats;

pub use bernstein::{Family, LaplaceExponent, ScalingCertificate};
pub use densities::{DensityKind, DensityTable, InversionTarget};
pub use error::{Error, Result};
pub use simulate::{Ball, ExitSample, PathSpec, Region, Simulator};
pub use stats::Estimate;
