//! Moments and Fourier-Jacobi reconstruction of the SINR meta distribution
//! for downlink Poisson cellular networks, with a Monte Carlo reference
//! simulator and the second-moment power scaling law.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Quadrature nodes and Lanczos coefficients are kept as published.
#![allow(clippy::excessive_precision)]

pub mod error;
pub mod jacobi;
pub mod moments;
pub mod quadrature;
pub mod scaling;
pub mod sim;
pub mod specfun;

pub use error::{Error, Result};
pub use jacobi::{JacobiBasis, ReconstructedDistribution};
pub use moments::{IntegralCoeffs, MomentMethod, MomentSequence, SystemParams};
pub use scaling::{MinPower, QosSpec};
pub use sim::{EmpiricalMeta, FadingMode, SimConfig};
