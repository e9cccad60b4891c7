use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("momentum k = 0 is the degenerate threshold point")]
    ThresholdMomentum,

    #[error("matching system is singular at k = {k}")]
    SingularMatching { k: Complex64 },

    #[error("S-matrix pole: Jost function vanishes at k = {k}")]
    Pole { k: Complex64 },

    #[error("Jost zero on the search contour; {attempts} perturbed contours also failed")]
    ZeroOnContour { attempts: usize },

    #[error(
        "Newton refinement did not converge from {start} after {iterations} steps \
         (last iterate {last}, |J| = {residual:e})"
    )]
    NewtonFailed {
        start: Complex64,
        last: Complex64,
        residual: f64,
        iterations: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(
        "integrand grows on the support [{t_min}, {t_max}] for Im z = {im_z}: \
         wrong half-plane (growth factor {growth:e})"
    )]
    WrongHalfPlane {
        t_min: f64,
        t_max: f64,
        im_z: f64,
        growth: f64,
    },

    #[error("tail contribution {tail:e} exceeds tolerance relative to total {total:e}")]
    TailDominated { tail: f64, total: f64 },

    #[error("truncation: {fraction:e} of the norm lies beyond the cutoff")]
    Truncation { fraction: f64 },

    #[error("no analytic continuation is attached to this sampled function")]
    NoContinuation,

    #[error("precondition failed: input is not Hardy class on the {half_plane} half-plane")]
    NotHardy { half_plane: &'static str },

    #[error("negative time {0} is outside the semigroup domain")]
    NegativeTime(f64),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
