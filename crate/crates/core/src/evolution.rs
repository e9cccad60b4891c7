//! Time evolution of energy wavefunctions, Gamow functionals and the
//! exponential decay law.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hardy::{
    evaluate_halfplane, is_hardy, HalfPlane, HardyReport, SampledFunction, Verdict, DEFAULT_HARDY_TOL,
    DEFAULT_Y_SAMPLES,
};
use crate::scatter::{GamowPole, Sign};
use crate::{Error, Result};

pub const EVOLUTION_SCHEMA_VERSION: u32 = 1;

/// Half-plane whose Hardy class is preserved by `evolve(·, t, sign)` for t ≥ 0.
pub fn matching_half_plane(sign: Sign) -> HalfPlane {
    match sign {
        Sign::Plus => HalfPlane::Upper,
        Sign::Minus => HalfPlane::Lower,
    }
}

fn sign_value(sign: Sign) -> f64 {
    match sign {
        Sign::Plus => 1.0,
        Sign::Minus => -1.0,
    }
}

/// Multiplies f̂ by e^{±iEt} at every sample. An attached continuation is
/// carried along, so the result can still be probed off the real axis.
pub fn evolve(f: &SampledFunction, t: f64, sign: Sign) -> SampledFunction {
    let s = sign_value(sign) * t;
    let mut out = f.clone();
    for (v, &e) in out.values.iter_mut().zip(&f.grid) {
        *v *= Complex64::from_polar(1.0, e * s);
    }
    out.continuation = f.continuation.as_ref().map(|c| c.shifted(s));
    out
}

/// Hardy membership of the evolved function at each requested time.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EvolutionReport {
    pub schema_version: u32,
    pub sign: Sign,
    pub half_plane: HalfPlane,
    pub y_samples: Vec<f64>,
    pub t_values: Vec<f64>,
    /// Per t: boundary norm followed by the norm on each sampled line.
    pub line_norms: Vec<Vec<Option<f64>>>,
    pub max_ratios: Vec<Option<f64>>,
    pub verdicts: Vec<Verdict>,
    pub reports: Vec<HardyReport>,
}

impl EvolutionReport {
    pub fn verdict_at(&self, t: f64) -> Option<Verdict> {
        self.t_values.iter().position(|&s| s == t).map(|i| self.verdicts[i])
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// [`semigroup_asymmetry_with`] at the default probe lines and tolerance.
pub fn semigroup_asymmetry(f: &SampledFunction, sign: Sign, t_list: &[f64]) -> Result<EvolutionReport> {
    semigroup_asymmetry_with(f, sign, t_list, &DEFAULT_Y_SAMPLES, DEFAULT_HARDY_TOL)
}

/// Runs the Hardy diagnostic on `evolve(f, t, sign)` for each t. The input
/// itself must pass the diagnostic for the half-plane matching `sign`.
pub fn semigroup_asymmetry_with(
    f: &SampledFunction,
    sign: Sign,
    t_list: &[f64],
    y_samples: &[f64],
    tol: f64,
) -> Result<EvolutionReport> {
    if let Some(&t) = t_list.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite time {t}")));
    }
    let plane = matching_half_plane(sign);
    let initial = is_hardy(f, plane, y_samples, tol);
    if initial.verdict != Verdict::Pass {
        return Err(Error::NotHardy {
            half_plane: plane.name(),
        });
    }
    let reports: Vec<HardyReport> = t_list
        .par_iter()
        .map(|&t| is_hardy(&evolve(f, t, sign), plane, y_samples, tol))
        .collect();
    let line_norms = reports
        .iter()
        .map(|r| {
            std::iter::once(r.boundary_norm_sq)
                .chain(r.lines.iter().map(|l| l.norm_sq))
                .collect()
        })
        .collect();
    Ok(EvolutionReport {
        schema_version: EVOLUTION_SCHEMA_VERSION,
        sign,
        half_plane: plane,
        y_samples: initial.lines.iter().map(|l| l.y).collect(),
        t_values: t_list.to_vec(),
        line_norms,
        max_ratios: reports.iter().map(|r| r.max_ratio).collect(),
        verdicts: reports.iter().map(|r| r.verdict).collect(),
        reports,
    })
}

/// ⟨z_R⁻|ψ⟩ up to normalization: the continuation of ψ̂ evaluated at the
/// resonance energy z_R in the lower half-plane.
pub fn gamow_functional(pole: &GamowPole, psi: &SampledFunction) -> Result<Complex64> {
    evaluate_halfplane(psi, pole.z_r)
}

/// Gamow-functional amplitudes of the forward-evolved state ψ̂(t).
pub fn decay_law(pole: &GamowPole, psi: &SampledFunction, t_list: &[f64]) -> Result<Vec<Complex64>> {
    if let Some(&t) = t_list.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(Error::NegativeTime(t));
    }
    t_list
        .par_iter()
        .map(|&t| gamow_functional(pole, &evolve(psi, t, Sign::Minus)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::{fourier_transform, make_bump, uniform_grid, BumpSpec, Side};

    fn bump_ft(t0: f64, t1: f64, side: Side) -> SampledFunction {
        let f = make_bump(BumpSpec::new(t0, t1, side), &uniform_grid(t0 - 1.0, t1 + 1.0, 801)).unwrap();
        fourier_transform(&f).unwrap()
    }

    #[test]
    fn evolution_is_unimodular_and_trivial_at_zero() {
        let g = bump_ft(0.5, 1.5, Side::Positive);
        let same = evolve(&g, 0.0, Sign::Minus);
        assert_eq!(same.values, g.values);
        for t in [-2.0, 0.7, 3.0] {
            let e = evolve(&g, t, Sign::Plus);
            for (a, b) in e.values.iter().zip(&g.values) {
                assert!((a.norm() - b.norm()).abs() <= 1e-15 * b.norm().max(1e-300));
            }
        }
    }

    #[test]
    fn evolved_continuation_matches_samples() {
        let g = bump_ft(0.5, 1.5, Side::Positive);
        let e = evolve(&g, 0.8, Sign::Minus);
        let c = e.continuation.as_ref().unwrap();
        for i in (0..e.grid.len()).step_by(53) {
            let z = Complex64::new(e.grid[i], 0.0);
            assert!((c.eval(z) - e.values[i]).norm() < 1e-10);
        }
    }

    #[test]
    fn precondition_rejects_wrong_class() {
        let g = bump_ft(0.5, 1.5, Side::Positive);
        assert!(matches!(
            semigroup_asymmetry(&g, Sign::Plus, &[0.0]),
            Err(Error::NotHardy { .. })
        ));
        let rep = semigroup_asymmetry(&g, Sign::Minus, &[0.0]).unwrap();
        assert_eq!(rep.verdicts, vec![Verdict::Pass]);
    }

    #[test]
    fn decay_law_rejects_negative_times() {
        let g = bump_ft(0.5, 1.5, Side::Positive);
        let pole = GamowPole::from_zero(&crate::scatter::PotentialSpec::unit_shell(), Complex64::new(1.5, -0.4));
        assert!(matches!(decay_law(&pole, &g, &[0.0, -1.0]), Err(Error::NegativeTime(t)) if t == -1.0));
    }
}
