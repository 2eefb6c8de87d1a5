//! Exact harmonic analysis on `F_p^D` for weighted polynomial progressions:
//! directional Fourier coefficients, `u^s` and box norms, the weighted
//! averaging and counting operators, and prime-ladder experiments that
//! measure how their discrepancies decay with `p`.

pub mod error;
pub mod experiments;
pub mod field;
pub mod fit;
pub mod fourier;
pub mod grid;
pub mod operators;
pub mod report;
pub mod weights;

pub use error::{Error, Result};
pub use field::{ConfigurationSystem, IntPolynomial, PrimeContext, RationalFunction};
pub use grid::{GridFunction, WeightFunction};
