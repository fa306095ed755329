//! Finite-dimensional functional calculus for pairs of non-commuting
//! self-adjoint matrices: double and triple operator integrals, divided
//! differences, sinc-lattice expansions, a dyadic Besov-norm estimator and a
//! trace-formula experiment on truncated shifts.

pub mod besov;
pub mod divdiff;
pub mod doi;
pub mod error;
pub mod expr;
pub mod family;
pub mod function;
pub mod helton_howe;
pub mod linalg;
pub mod quadrature;
pub mod random;
pub mod sinc;
pub mod trials;
pub mod trioi;

pub use error::{Error, Result};
pub use function::{BandLimit, FourierMeasure, Function2D};
pub use linalg::{ComplexMatrix, HermitianMatrix, SpectralResolution, C64};
