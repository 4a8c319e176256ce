//! Phase estimation and a probabilistic Deutsch-Jozsa decision on a single
//! continuous-variable register prepared in a semi-Gaussian state.
//!
//! The register is Fourier transformed, hit with the black box
//! `U_f(φ) = exp(-2iφ f(x̂))`, transformed back and projected onto the input
//! Gaussian. With `φ` unknown the outcome statistics estimate `φ` at the
//! Heisenberg limit; with `φ = π/2` they decide whether the binary function `f`
//! is constant or balanced.
//!
//! Three independent engines compute the same outcome probability:
//!
//! - [`analytic`]: closed forms in terms of `erf`,
//! - [`quadrature`]: adaptive Gauss-Kronrod evaluation of the overlap integral,
//! - [`grid`]: the circuit itself on a discretized wavefunction.
//!
//! [`experiments`] adds seeded Monte-Carlo trials on top, and [`sweep`] builds the
//! tables the `cvdj` binary prints.
//!
//! Units follow `ħ = 1/2`, so the Fourier kernel is `e^{2ixy}/√π`.

pub mod analytic;
pub mod error;
pub mod experiments;
pub mod function;
pub mod grid;
pub mod params;
pub mod quadrature;
pub mod special;
pub mod sweep;
pub mod table;

pub use analytic::{FisherReport, FisherValue, GeneratorMoments, MeasurementDistribution};
pub use error::{Error, Result};
pub use function::PiecewiseBinaryFunction;
pub use params::{NormalizationConstants, ProcedureParams, Severity, ValidationReport};
