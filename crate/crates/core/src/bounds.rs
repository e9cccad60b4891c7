//! Measurement of continued kernels and continued energy wavefunctions
//! against the classical analytic upper bounds.
//!
//! The bound is `|z|^{1/4} r/(1+|z|^{1/2} r)·e^{|Im √z| r}` with unit
//! constant. Reports record what the kernel and the wavefunctions actually
//! do next to it; no growth verdict is inferred from the bound.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hardy::fmt_f64;
use crate::quadrature::{breaks_with_fixed, composite};
use crate::scatter::{jost_function, ComplexMomentum, Ket, PotentialSpec, Sheet, Sign};
use crate::{Error, Result};

pub const BOUNDS_SCHEMA_VERSION: u32 = 1;

/// Floor for denominators when one side of a ratio vanishes.
pub const RATIO_FLOOR: f64 = 1e-300;

/// Samples with a Jost value below this are skipped.
pub const POLE_PROXIMITY: f64 = 1e-8;

const QUAD_ORDER: usize = 16;
const QUAD_REL_TOL: f64 = 1e-12;
const MAX_DOUBLINGS: usize = 8;
const DIVERGENCE_JUMP: f64 = 0.1;

/// The comparison function with constant 1.
pub fn kernel_bound(z: Complex64, r: f64) -> f64 {
    let m = z.norm();
    m.powf(0.25) * r / (1.0 + m.sqrt() * r) * (z.sqrt().im.abs() * r).exp()
}

/// Kernel ⟨z⁺|r⟩: the continuation of conj⟨r|E+⟩ off the positive axis,
/// taken on the second sheet.
pub fn kernel(pot: &PotentialSpec, z: Complex64) -> Result<Ket> {
    let k = ComplexMomentum::from_energy(z, Sheet::Second);
    Ket::new(pot, k.k, Sign::Minus)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundSample {
    pub re_z: f64,
    pub im_z: f64,
    pub r: f64,
    pub actual: f64,
    pub bound: f64,
    pub ratio: f64,
    /// Both the value and the bound vanish (r = 0).
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SkippedSample {
    pub re_z: f64,
    pub im_z: f64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundReport {
    pub schema_version: u32,
    pub potential: PotentialSpec,
    pub c_empirical: f64,
    /// True iff `c_empirical` is finite.
    pub bound_respected: bool,
    pub samples: Vec<BoundSample>,
    pub skipped: Vec<SkippedSample>,
}

impl BoundReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Columns re_z, im_z, r, actual, bound, ratio; `header` lines are
    /// written first as `#` comments.
    pub fn write_csv<W: Write>(&self, w: W, header: &[String]) -> Result<()> {
        write_table(
            w,
            header,
            "r",
            self.samples
                .iter()
                .map(|s| [s.re_z, s.im_z, s.r, s.actual, s.bound, s.ratio]),
        )
    }
}

fn write_table<W: Write>(mut w: W, header: &[String], param: &str, rows: impl Iterator<Item = [f64; 6]>) -> Result<()> {
    for line in header {
        writeln!(w, "# {line}")?;
    }
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["re_z", "im_z", param, "actual", "bound", "ratio"])
        .map_err(csv_error)?;
    for row in rows {
        out.write_record(row.iter().map(|&x| fmt_f64(x))).map_err(csv_error)?;
    }
    out.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn ratio(actual: f64, bound: f64) -> f64 {
    actual / bound.max(RATIO_FLOOR)
}

/// |⟨z⁺|r⟩| against the bound at every (z, r). Energies where a Jost value
/// in play falls below [`POLE_PROXIMITY`] are skipped and annotated.
pub fn kernel_bound_audit(pot: &PotentialSpec, z_grid: &[Complex64], r_list: &[f64]) -> Result<BoundReport> {
    pot.validate()?;
    if let Some(&r) = r_list.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
        return Err(Error::InvalidInput(format!("radius must be non-negative, got {r}")));
    }
    let per_z: Vec<std::result::Result<Vec<BoundSample>, SkippedSample>> =
        z_grid.par_iter().map(|&z| audit_energy(pot, z, r_list)).collect();
    let mut samples = Vec::new();
    let mut skipped = Vec::new();
    for item in per_z {
        match item {
            Ok(rows) => samples.extend(rows),
            Err(s) => skipped.push(s),
        }
    }
    let c_empirical = samples.iter().map(|s| s.ratio).fold(0.0, f64::max);
    Ok(BoundReport {
        schema_version: BOUNDS_SCHEMA_VERSION,
        potential: *pot,
        c_empirical,
        bound_respected: c_empirical.is_finite(),
        samples,
        skipped,
    })
}

fn audit_energy(
    pot: &PotentialSpec,
    z: Complex64,
    r_list: &[f64],
) -> std::result::Result<Vec<BoundSample>, SkippedSample> {
    let skip = |reason: String| SkippedSample {
        re_z: z.re,
        im_z: z.im,
        reason,
    };
    if z.norm() == 0.0 || !z.is_finite() {
        return Err(skip("threshold or non-finite energy".into()));
    }
    let k = ComplexMomentum::from_energy(z, Sheet::Second);
    let jost = jost_function(pot, k).map_err(|e| skip(e.to_string()))?;
    let smallest = jost.j_minus.norm().min(jost.j_plus.norm());
    if smallest < POLE_PROXIMITY {
        return Err(skip(format!("Jost value {smallest:e} within pole proximity")));
    }
    let ket = Ket::new(pot, k.k, Sign::Minus).map_err(|e| skip(e.to_string()))?;
    Ok(r_list
        .iter()
        .map(|&r| {
            let actual = ket.at(r).norm();
            let bound = kernel_bound(z, r);
            BoundSample {
                re_z: z.re,
                im_z: z.im,
                r,
                actual,
                bound,
                ratio: ratio(actual, bound),
                degenerate: actual == 0.0 && bound == 0.0,
            }
        })
        .collect())
}

/// Inputs of a kernel audit run, kept as data so that a frozen config
/// regenerates the same report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct AuditConfig {
    pub potential: PotentialSpec,
    pub moduli: Vec<f64>,
    pub angles: Vec<f64>,
    pub radii: Vec<f64>,
}

impl AuditConfig {
    pub fn run(&self) -> Result<BoundReport> {
        kernel_bound_audit(&self.potential, &polar_grid(&self.moduli, &self.angles), &self.radii)
    }
}

/// Inputs of a growth-profile run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct GrowthConfig {
    pub potential: PotentialSpec,
    pub profile: Profile,
    pub ray: Ray,
    pub s_values: Vec<f64>,
}

impl GrowthConfig {
    pub fn run(&self) -> Result<GrowthProfile> {
        wavefunction_growth_profile(&self.potential, &self.profile, self.ray, &self.s_values)
    }
}

/// `moduli × angles` polar grid in the closed lower half-plane; angles in
/// [−π, 0] with −π meaning the negative real axis.
pub fn polar_grid(moduli: &[f64], angles: &[f64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(moduli.len() * angles.len());
    for &m in moduli {
        for &th in angles {
            out.push(if th == -std::f64::consts::PI {
                Complex64::new(-m, 0.0)
            } else {
                Complex64::from_polar(m, th)
            });
        }
    }
    out
}

/// Path z(s) into the lower half-plane on the second sheet.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Ray {
    /// z = −s.
    NegativeAxis,
    /// z = s·e^{iθ} with θ ∈ [−π, 0].
    Direction { angle: f64 },
}

impl Ray {
    pub fn at(&self, s: f64) -> Complex64 {
        match *self {
            Ray::NegativeAxis => Complex64::new(-s, 0.0),
            Ray::Direction { angle } => Complex64::from_polar(s, angle),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Ray::Direction { angle } if !(-std::f64::consts::PI..=0.0).contains(&angle) => {
                Err(Error::InvalidInput(format!("ray angle {angle} outside [-pi, 0]")))
            }
            _ => Ok(()),
        }
    }
}

/// Smooth radial profiles vanishing at the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Profile {
    Zero,
    /// exp(4 − 1/(x(1−x))) with x = (r−lo)/(hi−lo), support [lo, hi].
    Bump {
        lo: f64,
        hi: f64,
    },
    /// r·exp(−r²/a).
    Gaussian {
        a: f64,
    },
}

impl Profile {
    pub fn value(&self, r: f64) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Bump { lo, hi } => {
                if r <= lo || r >= hi {
                    0.0
                } else {
                    let x = (r - lo) / (hi - lo);
                    (4.0 - 1.0 / (x * (1.0 - x))).exp()
                }
            }
            Profile::Gaussian { a } => r * (-r * r / a).exp(),
        }
    }

    /// Radius A entering the bound: the support end for a bump, and for a
    /// Gaussian the radius where exp(−r²/a) drops below machine epsilon.
    pub fn extent(&self) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Bump { hi, .. } => hi,
            Profile::Gaussian { a } => (a * -f64::EPSILON.ln()).sqrt(),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Profile::Zero => true,
            Profile::Bump { lo, hi } => lo >= 0.0 && lo < hi && hi.is_finite(),
            Profile::Gaussian { a } => a > 0.0 && a.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid profile {self:?}")))
        }
    }

    /// Integration interval for a kernel growing like e^{κr}.
    fn interval(&self, kappa: f64) -> (f64, f64) {
        match *self {
            Profile::Zero => (0.0, 0.0),
            Profile::Bump { lo, hi } => (lo, hi),
            Profile::Gaussian { a } => (0.0, 0.5 * a * kappa + self.extent() + 1.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GrowthRow {
    pub s: f64,
    pub re_z: f64,
    pub im_z: f64,
    pub actual: f64,
    pub bound: f64,
    pub ratio: f64,
    /// bound / max(actual, ε).
    pub gap: f64,
    pub panels: usize,
    pub certified: bool,
    pub divergent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GrowthProfile {
    pub schema_version: u32,
    pub potential: PotentialSpec,
    pub profile: Profile,
    pub ray: Ray,
    pub extent: f64,
    pub rows: Vec<GrowthRow>,
    /// Some sample's value kept growing by more than 10% over two
    /// consecutive grid doublings.
    pub divergent: bool,
}

impl GrowthProfile {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Columns re_z, im_z, s, actual, bound, ratio.
    pub fn write_csv<W: Write>(&self, w: W, header: &[String]) -> Result<()> {
        write_table(
            w,
            header,
            "s",
            self.rows
                .iter()
                .map(|r| [r.re_z, r.im_z, r.s, r.actual, r.bound, r.ratio]),
        )
    }
}

/// φ⁺(z(s)) = ∫ φ(r)⟨z⁺|r⟩ dr along the ray, by composite Gauss–Legendre
/// quadrature refined by panel doubling until successive values agree.
pub fn wavefunction_growth_profile(
    pot: &PotentialSpec,
    phi: &Profile,
    ray: Ray,
    s_values: &[f64],
) -> Result<GrowthProfile> {
    pot.validate()?;
    phi.validate()?;
    ray.validate()?;
    if let Some(&s) = s_values.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
        return Err(Error::InvalidInput(format!("ray parameter must be positive, got {s}")));
    }
    let extent = phi.extent();
    let rows = s_values
        .par_iter()
        .map(|&s| growth_row(pot, phi, ray, s, extent))
        .collect::<Result<Vec<_>>>()?;
    Ok(GrowthProfile {
        schema_version: BOUNDS_SCHEMA_VERSION,
        potential: *pot,
        profile: *phi,
        ray,
        extent,
        divergent: rows.iter().any(|r| r.divergent),
        rows,
    })
}

fn growth_row(pot: &PotentialSpec, phi: &Profile, ray: Ray, s: f64, extent: f64) -> Result<GrowthRow> {
    let z = ray.at(s);
    let ket = kernel(pot, z)?;
    let k = ket.k();
    let (lo, hi) = phi.interval(k.im.abs());
    let bound = kernel_bound(z, extent);
    let row = |actual: f64, panels: usize, certified: bool, divergent: bool| GrowthRow {
        s,
        re_z: z.re,
        im_z: z.im,
        actual,
        bound,
        ratio: ratio(actual, bound),
        gap: bound / actual.max(RATIO_FLOOR),
        panels,
        certified,
        divergent,
    };
    if hi <= lo {
        return Ok(row(0.0, 0, true, false));
    }
    let scale = (k.norm() + 1.0) * (hi - lo);
    let mut panels = (scale / 2.0).ceil().max(8.0) as usize;
    let mut prev = quad(pot, phi, &ket, lo, hi, panels);
    let mut jumps = 0;
    for _ in 0..MAX_DOUBLINGS {
        panels *= 2;
        let next = quad(pot, phi, &ket, lo, hi, panels);
        let change = (next - prev).norm();
        if change <= QUAD_REL_TOL * next.norm() || next.norm() == 0.0 {
            return Ok(row(next.norm(), panels, true, false));
        }
        jumps = if next.norm() > (1.0 + DIVERGENCE_JUMP) * prev.norm() {
            jumps + 1
        } else {
            0
        };
        if jumps >= 2 {
            return Ok(row(next.norm(), panels, false, true));
        }
        prev = next;
    }
    Ok(row(prev.norm(), panels, false, false))
}

fn quad(pot: &PotentialSpec, phi: &Profile, ket: &Ket, lo: f64, hi: f64, panels: usize) -> Complex64 {
    let width = (hi - lo) / panels as f64;
    let grid = composite(&breaks_with_fixed(lo, hi, width, &[pot.a, pot.b]), QUAD_ORDER);
    grid.integrate_complex(|r| phi.value(r) * ket.at(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bound_vanishes_at_origin_and_has_no_growth_on_the_positive_axis() {
        assert_eq!(kernel_bound(c(3.0, -1.0), 0.0), 0.0);
        let z = c(4.0, 0.0);
        let expected = 4f64.powf(0.25) * 1.5 / (1.0 + 2.0 * 1.5);
        assert!((kernel_bound(z, 1.5) - expected).abs() < 1e-15);
    }

    #[test]
    fn origin_rows_are_degenerate() {
        let rep = kernel_bound_audit(&PotentialSpec::unit_shell(), &[c(2.0, -0.5)], &[0.0, 1.0]).unwrap();
        assert!(rep.samples[0].degenerate);
        assert_eq!(rep.samples[0].ratio, 0.0);
        assert!(!rep.samples[1].degenerate);
    }

    #[test]
    fn kernel_is_conjugate_ket_on_the_positive_axis() {
        let pot = PotentialSpec::unit_shell();
        let k = kernel(&pot, c(3.0, 0.0)).unwrap();
        for r in [0.5, 1.5, 4.0] {
            let plus = crate::scatter::ls_ket(&pot, 3.0, r, Sign::Plus).unwrap();
            assert!((k.at(r) - plus.conj()).norm() < 1e-13);
        }
    }

    #[test]
    fn zero_profile_gives_zero_rows() {
        let p = wavefunction_growth_profile(
            &PotentialSpec::unit_shell(),
            &Profile::Zero,
            Ray::NegativeAxis,
            &[1.0, 5.0],
        )
        .unwrap();
        assert!(p.rows.iter().all(|r| r.actual == 0.0 && r.ratio == 0.0 && r.certified));
    }

    #[test]
    fn rejects_bad_rays() {
        let err = wavefunction_growth_profile(
            &PotentialSpec::unit_shell(),
            &Profile::Gaussian { a: 1.0 },
            Ray::Direction { angle: 0.5 },
            &[1.0],
        );
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }
}
