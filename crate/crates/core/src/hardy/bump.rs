use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::continuation::{Continuation, Term};
use super::sampled::{DomainTag, SampledFunction, TailModel};
use crate::error::{Error, Result};
use crate::quadrature::{composite, uniform_breaks};

/// Half-line carrying the support of a test function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// ℝ⁺
    Positive,
    /// ℝ⁻
    Negative,
}

/// Smooth compactly supported test function
/// ((t−t0)/(t1−t0))^degree · e^{iωt} · exp(−1/((t−t0)(t1−t))).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BumpSpec {
    pub t0: f64,
    pub t1: f64,
    pub side: Side,
    pub degree: u32,
    pub frequency: f64,
}

impl BumpSpec {
    pub fn new(t0: f64, t1: f64, side: Side) -> Self {
        Self {
            t0,
            t1,
            side,
            degree: 0,
            frequency: 0.0,
        }
    }

    pub fn with_modulation(mut self, degree: u32, frequency: f64) -> Self {
        self.degree = degree;
        self.frequency = frequency;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t0.is_finite() && self.t1.is_finite() && self.frequency.is_finite()) {
            return Err(Error::InvalidInput("non-finite bump parameter".into()));
        }
        if !(self.t0 < self.t1) {
            return Err(Error::InvalidInput(format!(
                "bump support ({}, {}) is empty",
                self.t0, self.t1
            )));
        }
        let inside = match self.side {
            Side::Negative => self.t1 <= 0.0,
            Side::Positive => self.t0 >= 0.0,
        };
        if !inside {
            return Err(Error::InvalidInput(format!(
                "support ({}, {}) is not inside the {:?} half-line",
                self.t0, self.t1, self.side
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.t1 - self.t0
    }
}

/// A validated bump with its unit-L² normalization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub spec: BumpSpec,
    norm: f64,
}

const NORM_PANELS: usize = 64;
const PANEL_ORDER: usize = 16;

impl Bump {
    pub fn new(spec: BumpSpec) -> Result<Self> {
        spec.validate()?;
        let mut bump = Bump { spec, norm: 1.0 };
        let grid = composite(&uniform_breaks(spec.t0, spec.t1, NORM_PANELS), PANEL_ORDER);
        let n2 = grid.integrate(|t| bump.value(t).norm_sqr());
        bump.norm = 1.0 / n2.sqrt();
        Ok(bump)
    }

    /// Real envelope, scaled so the plain core peaks at 1.
    fn envelope(&self, t: f64) -> f64 {
        let BumpSpec { t0, t1, degree, .. } = self.spec;
        if t <= t0 || t >= t1 {
            return 0.0;
        }
        let w = t1 - t0;
        let core = (4.0 / (w * w) - 1.0 / ((t - t0) * (t1 - t))).exp();
        core * ((t - t0) / w).powi(degree as i32)
    }

    pub fn value(&self, t: f64) -> Complex64 {
        let env = self.envelope(t);
        if env == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.norm * env, self.spec.frequency * t)
    }

    /// Gauss–Legendre nodes on the support with panels at most a quarter
    /// period of e^{−i x t} wide for |x| ≤ `max_freq`.
    pub fn nodes(&self, max_freq: f64) -> Vec<(f64, Complex64)> {
        let spec = &self.spec;
        let freq = max_freq + spec.frequency.abs();
        let panels = ((spec.width() * freq / std::f64::consts::FRAC_PI_2).ceil() as usize).max(32);
        let grid = composite(&uniform_breaks(spec.t0, spec.t1, panels), PANEL_ORDER);
        grid.nodes
            .iter()
            .zip(&grid.weights)
            .map(|(&t, &w)| (t, self.value(t) * w))
            .collect()
    }
}

/// Samples a unit-norm bump on `grid`; the result carries its exact
/// continuation.
pub fn make_bump(spec: BumpSpec, grid: &[f64]) -> Result<SampledFunction> {
    let bump = Bump::new(spec)?;
    let inside = grid.iter().filter(|&&t| t > spec.t0 && t < spec.t1).count();
    if inside < 64 {
        return Err(Error::InvalidInput(format!(
            "grid has {inside} points inside the support, need 64"
        )));
    }
    let f = SampledFunction::from_fn(grid.to_vec(), DomainTag::TimeLine, |t| bump.value(t))?;
    Ok(f.with_tail(TailModel::Compact)
        .with_continuation(Continuation::single(Term::bump(bump))))
}

/// Uniform grid of `n` points on [lo, hi].
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    uniform_breaks(lo, hi, n.max(2) - 1)
}
