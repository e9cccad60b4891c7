use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::continuation::{Continuation, LineNorm, LineWindow, Term};
use super::sampled::{DomainTag, SampledFunction, TailModel};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HalfPlane {
    /// ℂ⁺
    Upper,
    /// ℂ⁻
    Lower,
}

impl HalfPlane {
    pub fn sign(self) -> f64 {
        match self {
            HalfPlane::Upper => 1.0,
            HalfPlane::Lower => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            HalfPlane::Upper => "upper",
            HalfPlane::Lower => "lower",
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            HalfPlane::Upper => HalfPlane::Lower,
            HalfPlane::Lower => HalfPlane::Upper,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LineStatus {
    Ok,
    Divergent,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LineReport {
    pub y: f64,
    pub norm_sq: Option<f64>,
    pub ratio: Option<f64>,
    pub uncertainty: f64,
    pub status: LineStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HardyReport {
    pub half_plane: HalfPlane,
    pub verdict: Verdict,
    pub tol: f64,
    pub boundary_norm_sq: Option<f64>,
    pub monotone: bool,
    /// Largest line norm over the boundary norm; `None` when some line diverges.
    pub max_ratio: Option<f64>,
    pub lines: Vec<LineReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl HardyReport {
    /// Ratio on the line at distance `offset` from the real axis.
    pub fn ratio_at(&self, offset: f64) -> Option<f64> {
        self.lines
            .iter()
            .find(|l| (l.y.abs() - offset).abs() < 1e-12)
            .and_then(|l| match l.status {
                LineStatus::Divergent => Some(f64::INFINITY),
                _ => l.ratio,
            })
    }

    fn inconclusive(half_plane: HalfPlane, tol: f64, note: String) -> Self {
        Self {
            half_plane,
            verdict: Verdict::Inconclusive,
            tol,
            boundary_norm_sq: None,
            monotone: false,
            max_ratio: None,
            lines: Vec::new(),
            note: Some(note),
        }
    }
}

/// Energy-side continuation of `f`: the attached closed form, or the
/// trapezoid transform of time-line samples.
pub fn continuation_of(f: &SampledFunction) -> Result<Continuation> {
    if let Some(c) = &f.continuation {
        return Ok(c.clone());
    }
    if f.domain != DomainTag::TimeLine {
        return Err(Error::NoContinuation);
    }
    let peak = f.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let edge = f.values[0].norm().max(f.values[f.len() - 1].norm());
    let controlled = matches!(f.tail, TailModel::Compact | TailModel::Schwartz);
    if peak > 0.0 && edge > 1e-8 * peak && !controlled {
        return Err(Error::Truncation { fraction: edge / peak });
    }
    Ok(Continuation::single(Term::samples(f)))
}

/// f̂(E) = (1/√2π) ∫ f(t) e^{−iEt} dt on an automatically chosen uniform
/// energy grid wide enough that the neglected tail is below 1e−7 of ‖f̂‖².
pub fn fourier_transform(f: &SampledFunction) -> Result<SampledFunction> {
    require_time(f)?;
    let c = continuation_of(f)?;
    let line = c.line_norm(0.0, LineWindow::default())?;
    let half = (line.half_width / line.step).round() as usize;
    let n = (2 * half + 1).max(super::sampled::MIN_SAMPLES);
    let step = 2.0 * line.half_width / (n - 1) as f64;
    let x0 = -line.half_width;
    let values = c.values_on(0.0, x0, step, n);
    let grid = (0..n).map(|m| x0 + step * m as f64).collect();
    Ok(SampledFunction::new(grid, values, DomainTag::EnergyLine)?
        .with_tail(TailModel::Schwartz)
        .with_continuation(c))
}

/// The transform evaluated on a caller-supplied energy grid.
pub fn fourier_transform_on(f: &SampledFunction, grid: &[f64]) -> Result<SampledFunction> {
    require_time(f)?;
    let c = continuation_of(f)?;
    let values = grid.par_iter().map(|&e| c.eval(Complex64::new(e, 0.0))).collect();
    Ok(SampledFunction::new(grid.to_vec(), values, DomainTag::EnergyLine)?
        .with_tail(TailModel::Schwartz)
        .with_continuation(c))
}

fn require_time(f: &SampledFunction) -> Result<()> {
    if f.domain != DomainTag::TimeLine {
        return Err(Error::InvalidInput(format!(
            "expected a time-line function, got {}",
            f.domain.as_str()
        )));
    }
    Ok(())
}

/// f̂(z), refusing points where e^{−izt} grows on the time support.
pub fn evaluate_halfplane(f: &SampledFunction, z: Complex64) -> Result<Complex64> {
    let c = continuation_of(f)?;
    let growth = c.growth_factor(z);
    if growth > 1.0 + 1e-12 {
        let (t_min, t_max) = c.time_support().unwrap_or((0.0, 0.0));
        return Err(Error::WrongHalfPlane {
            t_min,
            t_max,
            im_z: z.im,
            growth,
        });
    }
    Ok(c.eval(z))
}

/// ∫ |f̂(x+iy)|² dx; y = 0 gives the boundary norm.
pub fn hardy_norm_on_line(f: &SampledFunction, y: f64, window: LineWindow) -> Result<LineNorm> {
    continuation_of(f)?.line_norm(y, window)
}

/// Distances from the real axis probed by default.
pub const DEFAULT_Y_SAMPLES: [f64; 9] = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0];

/// Default relative slack on line norms.
pub const DEFAULT_HARDY_TOL: f64 = 1e-6;

/// Sampled Hardy-class diagnostic: PASS when every sampled line norm stays
/// within (1+tol) of the boundary norm and the norms do not increase with
/// distance from the axis; FAIL on any violation.
pub fn is_hardy(f: &SampledFunction, half_plane: HalfPlane, y_samples: &[f64], tol: f64) -> HardyReport {
    let c = match continuation_of(f) {
        Ok(c) => c,
        Err(e) => return HardyReport::inconclusive(half_plane, tol, e.to_string()),
    };
    let boundary = match c.line_norm(0.0, LineWindow::default()) {
        Ok(n) if n.norm_sq.is_finite() => n.norm_sq,
        Ok(_) => return HardyReport::inconclusive(half_plane, tol, "boundary norm diverges".into()),
        Err(e) => return HardyReport::inconclusive(half_plane, tol, e.to_string()),
    };
    let mut offsets: Vec<f64> = y_samples.iter().map(|y| y.abs()).filter(|y| *y > 0.0).collect();
    offsets.sort_by(f64::total_cmp);
    offsets.dedup();

    let lines: Vec<LineReport> = offsets
        .par_iter()
        .map(|&off| {
            let y = half_plane.sign() * off;
            match c.line_norm(y, LineWindow::default()) {
                Ok(n) if n.norm_sq.is_finite() => LineReport {
                    y,
                    norm_sq: Some(n.norm_sq),
                    ratio: Some(ratio(n.norm_sq, boundary)),
                    uncertainty: n.uncertainty,
                    status: LineStatus::Ok,
                    message: None,
                },
                Ok(_) => LineReport {
                    y,
                    norm_sq: None,
                    ratio: None,
                    uncertainty: 0.0,
                    status: LineStatus::Divergent,
                    message: Some("singularity on the line".into()),
                },
                Err(e) => LineReport {
                    y,
                    norm_sq: None,
                    ratio: None,
                    uncertainty: 0.0,
                    status: LineStatus::Inconclusive,
                    message: Some(e.to_string()),
                },
            }
        })
        .collect();

    let diverges = lines.iter().any(|l| l.status == LineStatus::Divergent);
    let unsure = lines.iter().any(|l| l.status == LineStatus::Inconclusive);
    let bounded = lines.iter().filter_map(|l| l.ratio).all(|r| r <= 1.0 + tol);
    let mut monotone = !diverges;
    let mut prev = boundary;
    for n in lines.iter().filter_map(|l| l.norm_sq) {
        if n > prev * (1.0 + tol) {
            monotone = false;
        }
        prev = n;
    }
    let max_ratio = if diverges {
        None
    } else {
        Some(lines.iter().filter_map(|l| l.ratio).fold(1.0, f64::max))
    };
    let verdict = if diverges || !bounded || !monotone {
        Verdict::Fail
    } else if unsure || offsets.is_empty() {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    HardyReport {
        half_plane,
        verdict,
        tol,
        boundary_norm_sq: Some(boundary),
        monotone,
        max_ratio,
        lines,
        note: offsets.is_empty().then(|| "no line offsets sampled".into()),
    }
}

fn ratio(n: f64, boundary: f64) -> f64 {
    if boundary == 0.0 {
        if n == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        n / boundary
    }
}

/// Samples on E ≥ 0. A node is inserted at E = 0 (linear interpolation)
/// when the grid straddles zero without containing it. The continuation
/// is kept, so the discarded part stays recoverable in principle.
pub fn restrict_positive(f: &SampledFunction) -> Result<SampledFunction> {
    let (grid, values) = split(f, true);
    let mut out = SampledFunction::new(grid, values, DomainTag::PositiveEnergyHalfline)?;
    out.tail = f.tail;
    out.continuation = f.continuation.clone();
    out.negative_axis_dropped = f.grid[0] < 0.0;
    Ok(out)
}

/// Samples on E ≤ 0, the complement of [`restrict_positive`].
pub fn negative_part(f: &SampledFunction) -> Result<SampledFunction> {
    let (grid, values) = split(f, false);
    let mut out = SampledFunction::new(grid, values, DomainTag::EnergyLine)?;
    out.tail = f.tail;
    out.continuation = f.continuation.clone();
    Ok(out)
}

fn split(f: &SampledFunction, positive: bool) -> (Vec<f64>, Vec<Complex64>) {
    let keep = |x: f64| if positive { x >= 0.0 } else { x <= 0.0 };
    let mut pts: Vec<(f64, Complex64)> = f
        .grid
        .iter()
        .zip(&f.values)
        .filter(|(x, _)| keep(**x))
        .map(|(x, v)| (*x, *v))
        .collect();
    let has_zero = f.grid.contains(&0.0);
    let straddles = f.grid[0] < 0.0 && f.grid[f.len() - 1] > 0.0;
    if straddles && !has_zero {
        let i = f.grid.partition_point(|&x| x < 0.0);
        let (x0, x1) = (f.grid[i - 1], f.grid[i]);
        let w = -x0 / (x1 - x0);
        let v = f.values[i - 1] * (1.0 - w) + f.values[i] * w;
        if positive {
            pts.insert(0, (0.0, v));
        } else {
            pts.push((0.0, v));
        }
    }
    pts.into_iter().unzip()
}

/// Samples of the single-pole model 1/(E − z0) with its continuation.
pub fn pole_function(z0: Complex64, grid: &[f64]) -> Result<SampledFunction> {
    let c = Continuation::pole(z0)?;
    let values = grid.iter().map(|&e| c.eval(Complex64::new(e, 0.0))).collect();
    Ok(SampledFunction::new(grid.to_vec(), values, DomainTag::EnergyLine)?
        .with_tail(TailModel::PowerLaw { exponent: 1.0 })
        .with_continuation(c))
}
