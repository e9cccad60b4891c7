use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::continuation::Continuation;
use crate::error::{Error, Result};
use crate::quadrature::trapezoid;

pub const MIN_SAMPLES: usize = 16;

/// Which real line a sampled function lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainTag {
    TimeLine,
    EnergyLine,
    PositiveEnergyHalfline,
    RadialHalfline,
}

impl DomainTag {
    pub fn as_str(self) -> &'static str {
        match self {
            DomainTag::TimeLine => "time-line",
            DomainTag::EnergyLine => "energy-line",
            DomainTag::PositiveEnergyHalfline => "positive-energy-halfline",
            DomainTag::RadialHalfline => "radial-halfline",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "time-line" => Ok(DomainTag::TimeLine),
            "energy-line" => Ok(DomainTag::EnergyLine),
            "positive-energy-halfline" => Ok(DomainTag::PositiveEnergyHalfline),
            "radial-halfline" => Ok(DomainTag::RadialHalfline),
            other => Err(Error::Parse(format!("unknown domain tag '{other}'"))),
        }
    }
}

/// Decay model used to account for what lies beyond the sampled window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum TailModel {
    /// Identically zero outside the grid.
    Compact,
    /// Faster than any power.
    Schwartz,
    /// |f(x)| ~ c |x|^(-exponent).
    PowerLaw {
        exponent: f64,
    },
    Unknown,
}

#[derive(Clone, Debug)]
pub struct SampledFunction {
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub domain: DomainTag,
    pub tail: TailModel,
    /// Closed-form energy-side continuation, when the samples came from one.
    pub continuation: Option<Continuation>,
    /// Set once the E < 0 part has been cut away.
    pub negative_axis_dropped: bool,
}

impl SampledFunction {
    pub fn new(grid: Vec<f64>, values: Vec<Complex64>, domain: DomainTag) -> Result<Self> {
        let f = Self {
            grid,
            values,
            domain,
            tail: TailModel::Unknown,
            continuation: None,
            negative_axis_dropped: false,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn from_fn<F: FnMut(f64) -> Complex64>(grid: Vec<f64>, domain: DomainTag, f: F) -> Result<Self> {
        let values = grid.iter().copied().map(f).collect();
        Self::new(grid, values, domain)
    }

    pub fn with_tail(mut self, tail: TailModel) -> Self {
        self.tail = tail;
        self
    }

    pub fn with_continuation(mut self, c: Continuation) -> Self {
        self.continuation = Some(c);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.len() != self.values.len() {
            return Err(Error::GridMismatch(format!(
                "{} abscissae but {} values",
                self.grid.len(),
                self.values.len()
            )));
        }
        if self.grid.len() < MIN_SAMPLES {
            return Err(Error::InvalidInput(format!(
                "need at least {MIN_SAMPLES} samples, got {}",
                self.grid.len()
            )));
        }
        if self.grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("grid must be strictly increasing".into()));
        }
        if self.grid.iter().any(|x| !x.is_finite())
            || self.values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::InvalidInput("non-finite sample".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Trapezoid ∫|f|² on the sample grid.
    pub fn norm_sq(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        trapezoid(&self.grid, &sq)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// |T(h) − T(2h)| / 3 for the squared norm, a Richardson error estimate.
    pub fn norm_sq_richardson(&self) -> f64 {
        let coarse_x: Vec<f64> = self.grid.iter().step_by(2).copied().collect();
        let coarse_y: Vec<f64> = self.values.iter().step_by(2).map(|v| v.norm_sqr()).collect();
        let mut coarse = trapezoid(&coarse_x, &coarse_y);
        if self.len().is_multiple_of(2) {
            let n = self.len();
            coarse += 0.5
                * (self.grid[n - 1] - self.grid[n - 2])
                * (self.values[n - 1].norm_sqr() + self.values[n - 2].norm_sqr());
        }
        (self.norm_sq() - coarse).abs() / 3.0
    }

    /// Trapezoid ⟨self, other⟩ = ∫ conj(self)·other on a shared grid.
    pub fn inner(&self, other: &SampledFunction) -> Result<Complex64> {
        self.check_same_grid(other)?;
        let prod: Vec<Complex64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .collect();
        Ok(crate::quadrature::trapezoid_complex(&self.grid, &prod))
    }

    pub fn check_same_grid(&self, other: &SampledFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("functions live on different grids".into()));
        }
        Ok(())
    }

    pub fn scaled(&self, alpha: Complex64) -> SampledFunction {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= alpha;
        }
        out.continuation = self.continuation.as_ref().map(|c| c.scaled(alpha));
        out
    }

    /// α·self + β·other on a shared grid; continuations combine when both exist.
    pub fn combine(&self, alpha: Complex64, other: &SampledFunction, beta: Complex64) -> Result<SampledFunction> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        let continuation = match (&self.continuation, &other.continuation) {
            (Some(a), Some(b)) => Some(a.scaled(alpha).plus(&b.scaled(beta))),
            _ => None,
        };
        let tail = if self.tail == other.tail {
            self.tail
        } else {
            TailModel::Unknown
        };
        Ok(SampledFunction {
            grid: self.grid.clone(),
            values,
            domain: self.domain,
            tail,
            continuation,
            negative_axis_dropped: self.negative_axis_dropped || other.negative_axis_dropped,
        })
    }

    /// Four-point Lagrange interpolation; zero outside the grid.
    pub fn interpolate(&self, x: f64) -> Complex64 {
        let n = self.len();
        if x < self.grid[0] || x > self.grid[n - 1] {
            return Complex64::new(0.0, 0.0);
        }
        let i = self.grid.partition_point(|&g| g <= x).clamp(1, n - 1) - 1;
        let start = i.saturating_sub(1).min(n - 4);
        let idx = start..start + 4;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in idx.clone() {
            let mut l = 1.0;
            for m in idx.clone() {
                if m != j {
                    l *= (x - self.grid[m]) / (self.grid[j] - self.grid[m]);
                }
            }
            acc += self.values[j] * l;
        }
        acc
    }

    /// Smallest interval outside of which every sample vanishes.
    pub fn nonzero_range(&self) -> Option<(f64, f64)> {
        let first = self.values.iter().position(|v| v.norm_sqr() > 0.0)?;
        let last = self.values.iter().rposition(|v| v.norm_sqr() > 0.0)?;
        Some((
            self.grid[first.saturating_sub(1)],
            self.grid[(last + 1).min(self.len() - 1)],
        ))
    }

    pub fn write_csv<W: Write>(&self, w: W, header: &[String]) -> Result<()> {
        let mut w = w;
        for line in header {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "# domainTag: {}", self.domain.as_str())?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["abscissa", "re", "im"])
            .map_err(|e| Error::Parse(e.to_string()))?;
        for (x, v) in self.grid.iter().zip(&self.values) {
            out.write_record([fmt_f64(*x), fmt_f64(v.re), fmt_f64(v.im)])
                .map_err(|e| Error::Parse(e.to_string()))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<SampledFunction> {
        let mut text = String::new();
        let mut r = r;
        r.read_to_string(&mut text)?;
        let domain = text
            .lines()
            .filter_map(|l| l.strip_prefix('#'))
            .find_map(|l| l.trim().strip_prefix("domainTag:").map(str::to_owned))
            .map(|s| DomainTag::parse(&s))
            .transpose()?
            .unwrap_or(DomainTag::EnergyLine);
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader.headers().map_err(|e| Error::Parse(e.to_string()))?;
        if headers.iter().collect::<Vec<_>>() != ["abscissa", "re", "im"] {
            return Err(Error::Parse(format!("unexpected CSV header {headers:?}")));
        }
        let (mut grid, mut values) = (Vec::new(), Vec::new());
        for rec in reader.records() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            let num = |i: usize| -> Result<f64> {
                rec.get(i)
                    .ok_or_else(|| Error::Parse("short CSV row".into()))?
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(e.to_string()))
            };
            grid.push(num(0)?);
            values.push(Complex64::new(num(1)?, num(2)?));
        }
        SampledFunction::new(grid, values, domain)
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = SampledJson {
            grid: self.grid.clone(),
            re: self.values.iter().map(|v| v.re).collect(),
            im: self.values.iter().map(|v| v.im).collect(),
            domain_tag: self.domain,
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(s: &str) -> Result<SampledFunction> {
        let doc: SampledJson = serde_json::from_str(s)?;
        if doc.re.len() != doc.im.len() {
            return Err(Error::GridMismatch("re and im lengths differ".into()));
        }
        let values = doc
            .re
            .iter()
            .zip(&doc.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        SampledFunction::new(doc.grid, values, doc.domain_tag)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct SampledJson {
    grid: Vec<f64>,
    re: Vec<f64>,
    im: Vec<f64>,
    domain_tag: DomainTag,
}

/// 17 significant digits, enough for an exact round trip.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
