//! Half-line test functions, their Fourier transforms and sampled
//! Hardy-class diagnostics.
//!
//! Transform convention: f̂(z) = (1/√2π) ∫ f(t) e^{−izt} dt, so support in
//! ℝ⁻ gives a function analytic in the upper half-plane and support in ℝ⁺
//! one analytic in the lower half-plane.

mod bump;
mod continuation;
mod diagnostics;
mod sampled;

pub use bump::{make_bump, uniform_grid, Bump, BumpSpec, Side};
pub use continuation::{Continuation, LineNorm, LineWindow, Term, TermKind, TAIL_TOL};
pub use diagnostics::{
    continuation_of, evaluate_halfplane, fourier_transform, fourier_transform_on, hardy_norm_on_line, is_hardy,
    negative_part, pole_function, restrict_positive, HalfPlane, HardyReport, LineReport, LineStatus, Verdict,
    DEFAULT_HARDY_TOL, DEFAULT_Y_SAMPLES,
};
pub use sampled::{fmt_f64, DomainTag, SampledFunction, TailModel, MIN_SAMPLES};
