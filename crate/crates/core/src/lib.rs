//! Numerical workbench for resonance scattering off a spherical shell.
//!
//! * [`scatter`]: closed-form radial solutions, Jost function, S-matrix,
//!   continued kets and certified resonance-pole search.
//! * [`hardy`]: half-line test functions, Fourier transforms and sampled
//!   Hardy-class diagnostics.
//! * [`spectral`]: the unitary position ↔ energy maps and Møller operators.
//! * [`evolution`]: semigroup evolution, Gamow functionals and decay laws.
//! * [`bounds`]: measurement of kernel and wavefunction growth against
//!   the classical analytic upper bounds.

pub mod bounds;
pub mod error;
pub mod evolution;
pub mod hardy;
pub mod quadrature;
pub mod scatter;
pub mod spectral;
pub mod suites;

pub use error::{Error, Result};
pub use num_complex::Complex64;
