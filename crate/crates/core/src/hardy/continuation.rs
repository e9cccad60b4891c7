use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use super::bump::Bump;
use super::sampled::{SampledFunction, TailModel};
use crate::error::{Error, Result};

const CHUNK: usize = 512;

#[derive(Clone, Debug)]
pub enum TermKind {
    Bump(Bump),
    /// Trapezoid-weighted time samples (t, w·f(t)).
    Samples(Vec<(f64, Complex64)>),
    /// 1/(z − z0).
    Pole(Complex64),
}

/// coef · e^{izτ} · F(z), where F is the Fourier transform of a time-side
/// function or a simple pole.
#[derive(Clone, Debug)]
pub struct Term {
    pub kind: TermKind,
    pub coef: Complex64,
    pub phase_time: f64,
}

impl Term {
    pub fn bump(bump: Bump) -> Self {
        Self::plain(TermKind::Bump(bump))
    }

    pub fn pole(z0: Complex64) -> Result<Self> {
        if z0.im == 0.0 || !z0.re.is_finite() || !z0.im.is_finite() {
            return Err(Error::InvalidInput(format!("pole {z0} must lie off the real axis")));
        }
        Ok(Self::plain(TermKind::Pole(z0)))
    }

    /// Trapezoid transform of time-line samples.
    pub fn samples(f: &SampledFunction) -> Self {
        let n = f.len();
        let nodes = (0..n)
            .filter(|&i| f.values[i].norm_sqr() > 0.0)
            .map(|i| {
                let left = if i > 0 { f.grid[i] - f.grid[i - 1] } else { 0.0 };
                let right = if i + 1 < n { f.grid[i + 1] - f.grid[i] } else { 0.0 };
                (f.grid[i], f.values[i] * (0.5 * (left + right)))
            })
            .collect();
        Self::plain(TermKind::Samples(nodes))
    }

    fn plain(kind: TermKind) -> Self {
        Self {
            kind,
            coef: Complex64::new(1.0, 0.0),
            phase_time: 0.0,
        }
    }

    /// Support of the time-side function, infinite ends allowed.
    pub fn time_support(&self) -> (f64, f64) {
        let tau = self.phase_time;
        match &self.kind {
            TermKind::Bump(b) => (b.spec.t0 - tau, b.spec.t1 - tau),
            TermKind::Samples(nodes) => match (nodes.first(), nodes.last()) {
                (Some(a), Some(b)) => (a.0 - tau, b.0 - tau),
                _ => (0.0, 0.0),
            },
            TermKind::Pole(z0) if z0.im > 0.0 => (-tau, f64::INFINITY),
            TermKind::Pole(_) => (f64::NEG_INFINITY, -tau),
        }
    }

    fn is_zero(&self) -> bool {
        self.coef == Complex64::new(0.0, 0.0) || matches!(&self.kind, TermKind::Samples(n) if n.is_empty())
    }

    fn nodes(&self, max_freq: f64) -> Option<Vec<(f64, Complex64)>> {
        match &self.kind {
            TermKind::Bump(b) => Some(b.nodes(max_freq)),
            TermKind::Samples(nodes) => Some(nodes.clone()),
            TermKind::Pole(_) => None,
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let tau = self.phase_time;
        match self.nodes(z.re.abs() + z.im.abs()) {
            Some(nodes) => {
                let sum: Complex64 = nodes
                    .iter()
                    .map(|&(t, c)| c * (-Complex64::i() * z * (t - tau)).exp())
                    .sum();
                self.coef * sum / (2.0 * PI).sqrt()
            }
            None => {
                let TermKind::Pole(z0) = self.kind else { unreachable!() };
                self.coef * (Complex64::i() * z * tau).exp() / (z - z0)
            }
        }
    }

    /// Values on x_m = x0 + m·dx, m < n, along Im z = y.
    fn line_values(&self, y: f64, x0: f64, dx: f64, n: usize) -> Vec<Complex64> {
        if self.is_zero() {
            return vec![Complex64::new(0.0, 0.0); n];
        }
        let tau = self.phase_time;
        let x_max = x0.abs().max((x0 + dx * (n as f64 - 1.0)).abs());
        match self.nodes(x_max + y.abs()) {
            Some(nodes) => {
                let scale = self.coef / (2.0 * PI).sqrt();
                let amps: Vec<(f64, Complex64, Complex64)> = nodes
                    .iter()
                    .map(|&(t, c)| {
                        let s = t - tau;
                        (s, c * scale * (y * s).exp(), Complex64::from_polar(1.0, -dx * s))
                    })
                    .collect();
                let mut out = vec![Complex64::new(0.0, 0.0); n];
                out.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, chunk)| {
                    let xs = x0 + dx * (ci * CHUNK) as f64;
                    let mut phase: Vec<Complex64> = amps
                        .iter()
                        .map(|&(s, a, _)| a * Complex64::from_polar(1.0, -xs * s))
                        .collect();
                    for v in chunk.iter_mut() {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (p, &(_, _, step)) in phase.iter_mut().zip(&amps) {
                            acc += *p;
                            *p *= step;
                        }
                        *v = acc;
                    }
                });
                out
            }
            None => (0..n)
                .map(|m| self.eval(Complex64::new(x0 + dx * m as f64, y)))
                .collect(),
        }
    }
}

/// Finite sum of closed-form terms; the analytic energy-side function.
#[derive(Clone, Debug, Default)]
pub struct Continuation {
    pub terms: Vec<Term>,
}

/// Window on a horizontal line; `None` fields are chosen automatically.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LineWindow {
    pub half_width: Option<f64>,
    pub step: Option<f64>,
}

impl LineWindow {
    pub fn fixed(half_width: f64) -> Self {
        Self {
            half_width: Some(half_width),
            step: None,
        }
    }
}

/// ∫|F(x+iy)|² dx over [−X, X] plus the estimated tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineNorm {
    pub y: f64,
    pub norm_sq: f64,
    /// Tail mass included in `norm_sq` (power-law tails only).
    pub tail: f64,
    /// Bound on the error from truncating the window.
    pub uncertainty: f64,
    pub half_width: f64,
    pub step: f64,
    pub points: usize,
}

const AUTO_TAIL_TOL: f64 = 1e-7;
pub const TAIL_TOL: f64 = 1e-6;
const MAX_DOUBLINGS: usize = 12;
const MAX_POINTS: usize = 1 << 24;

impl Continuation {
    pub fn single(term: Term) -> Self {
        Self { terms: vec![term] }
    }

    pub fn pole(z0: Complex64) -> Result<Self> {
        Ok(Self::single(Term::pole(z0)?))
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coef *= alpha;
        }
        out
    }

    pub fn plus(&self, other: &Continuation) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self { terms }
    }

    /// Multiplies the energy-side function by e^{iz·dt}.
    pub fn shifted(&self, dt: f64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.phase_time += dt;
        }
        out
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.terms.iter().map(|t| t.eval(z)).sum()
    }

    fn active(&self) -> impl Iterator<Item = &Term> {
        self.terms.iter().filter(|t| !t.is_zero())
    }

    /// Union of the time-side supports; `None` for the zero function.
    pub fn time_support(&self) -> Option<(f64, f64)> {
        self.active()
            .map(Term::time_support)
            .reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
    }

    /// sup over the time support of |e^{−izt}| = e^{t·Im z}.
    pub fn growth_factor(&self, z: Complex64) -> f64 {
        let Some((lo, hi)) = self.time_support() else {
            return 1.0;
        };
        if z.im == 0.0 {
            return 1.0;
        }
        (z.im * lo).max(z.im * hi).exp()
    }

    pub fn tail_model(&self) -> TailModel {
        if self.active().any(|t| matches!(t.kind, TermKind::Pole(_))) {
            TailModel::PowerLaw { exponent: 1.0 }
        } else {
            TailModel::Compact
        }
    }

    fn poles(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.active().filter_map(|t| match t.kind {
            TermKind::Pole(z0) => Some(z0),
            _ => None,
        })
    }

    fn compact_span(&self) -> Option<f64> {
        self.active()
            .filter(|t| !matches!(t.kind, TermKind::Pole(_)))
            .map(Term::time_support)
            .reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
            .map(|(lo, hi)| (hi - lo).max(1e-3))
    }

    fn centre_scale(&self) -> f64 {
        self.active()
            .map(|t| match t.kind {
                TermKind::Bump(b) => b.spec.frequency.abs(),
                TermKind::Pole(z0) => z0.re.abs(),
                TermKind::Samples(_) => 0.0,
            })
            .fold(0.0, f64::max)
    }

    pub fn values_on(&self, y: f64, x0: f64, dx: f64, n: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for t in self.active() {
            for (o, v) in out.iter_mut().zip(t.line_values(y, x0, dx, n)) {
                *o += v;
            }
        }
        out
    }

    /// Trapezoid step that integrates |F|² along the line to near machine
    /// precision: below the aliasing limit 2π/span for compact parts and
    /// a quarter of the distance to the nearest pole.
    pub fn natural_step(&self, y: f64) -> f64 {
        let mut step = self.compact_span().map_or(1.0, |span| FRAC_PI_2 / span);
        for z0 in self.poles() {
            step = step.min((z0.im - y).abs() / 4.0);
        }
        step
    }

    fn pole_on_line(&self, y: f64) -> bool {
        self.poles().any(|z0| (z0.im - y).abs() <= 1e-12 * z0.norm().max(1.0))
    }

    /// ∫ |F(x+iy)|² dx with tail accounting; infinite when a pole lies on
    /// the line.
    pub fn line_norm(&self, y: f64, window: LineWindow) -> Result<LineNorm> {
        if self.pole_on_line(y) {
            return Ok(LineNorm {
                y,
                norm_sq: f64::INFINITY,
                tail: 0.0,
                uncertainty: 0.0,
                half_width: 0.0,
                step: 0.0,
                points: 0,
            });
        }
        let step = window.step.unwrap_or_else(|| self.natural_step(y));
        let power_law = matches!(self.tail_model(), TailModel::PowerLaw { .. });
        let pole_scale = self
            .poles()
            .map(|z0| z0.re.abs() + (z0.im - y).abs())
            .fold(1.0, f64::max);
        if let Some(x) = window.half_width {
            let norm = self.window_norm(y, x, step, pole_scale)?;
            if norm.uncertainty > TAIL_TOL * norm.norm_sq {
                return Err(Error::TailDominated {
                    tail: norm.uncertainty,
                    total: norm.norm_sq,
                });
            }
            return Ok(norm);
        }
        let mut x = if power_law {
            1e3 * pole_scale
        } else {
            32.0 + 2.0 * self.centre_scale()
        };
        let mut last = None;
        for _ in 0..=MAX_DOUBLINGS {
            let norm = self.window_norm(y, x, step, pole_scale)?;
            if norm.uncertainty <= AUTO_TAIL_TOL * norm.norm_sq {
                return Ok(norm);
            }
            last = Some(norm);
            x *= 2.0;
        }
        let last = last.expect("at least one window");
        Err(Error::TailDominated {
            tail: last.uncertainty,
            total: last.norm_sq,
        })
    }

    fn window_norm(&self, y: f64, x: f64, step: f64, pole_scale: f64) -> Result<LineNorm> {
        let half = (x / step).ceil() as usize;
        let n = 2 * half + 1;
        if n > MAX_POINTS {
            return Err(Error::InvalidInput(format!(
                "line window needs {n} points; step {step:e} too small for half-width {x}"
            )));
        }
        let x_max = step * half as f64;
        let vals = self.values_on(y, -x_max, step, n);
        let sq: Vec<f64> = vals.iter().map(|v| v.norm_sqr()).collect();
        let mut body = step * (sq.iter().sum::<f64>() - 0.5 * (sq[0] + sq[n - 1]));
        let (tail, uncertainty) = match self.tail_model() {
            TailModel::PowerLaw { exponent } => {
                let tail = (sq[0] + sq[n - 1]) * x_max / (2.0 * exponent - 1.0);
                (tail, tail * pole_scale / x_max)
            }
            _ => {
                let c4 = (0..n)
                    .filter(|&m| (m as f64 - half as f64).abs() * step >= 0.5 * x_max)
                    .map(|m| {
                        let x = (m as f64 - half as f64).abs() * step;
                        sq[m] * (1.0 + x).powi(4)
                    })
                    .fold(0.0, f64::max);
                (0.0, 2.0 * c4 / (3.0 * (1.0 + x_max).powi(3)))
            }
        };
        body += tail;
        if !body.is_finite() {
            body = f64::INFINITY;
        }
        Ok(LineNorm {
            y,
            norm_sq: body,
            tail,
            uncertainty,
            half_width: x_max,
            step,
            points: n,
        })
    }
}
