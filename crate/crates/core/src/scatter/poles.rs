//! Resonance poles: zeros of the Jost function in the lower half k-plane,
//! counted by the argument principle and refined by Newton's method.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::potential::{ComplexMomentum, PotentialSpec};
use super::regular;
use crate::error::{Error, Result};

/// Axis-aligned rectangle in the complex k-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KRect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl KRect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Self {
            re_min,
            re_max,
            im_min,
            im_max,
        }
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }

    fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    fn diameter(&self) -> f64 {
        (self.re_max - self.re_min).hypot(self.im_max - self.im_min)
    }

    fn contains(&self, k: Complex64, slack: f64) -> bool {
        k.re >= self.re_min - slack
            && k.re <= self.re_max + slack
            && k.im >= self.im_min - slack
            && k.im <= self.im_max + slack
    }

    fn grown(&self, by: f64) -> Self {
        Self::new(self.re_min - by, self.re_max + by, self.im_min - by, self.im_max + by)
    }

    fn split(&self, fraction: f64) -> (Self, Self) {
        if self.re_max - self.re_min >= self.im_max - self.im_min {
            let cut = self.re_min + fraction * (self.re_max - self.re_min);
            (
                Self::new(self.re_min, cut, self.im_min, self.im_max),
                Self::new(cut, self.re_max, self.im_min, self.im_max),
            )
        } else {
            let cut = self.im_min + fraction * (self.im_max - self.im_min);
            (
                Self::new(self.re_min, self.re_max, self.im_min, cut),
                Self::new(self.re_min, self.re_max, cut, self.im_max),
            )
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleSearchOptions {
    /// Initial samples per rectangle edge; segments are bisected further
    /// whenever the phase step exceeds π/4.
    pub contour_samples: usize,
    /// Acceptance threshold on |𝒥₋(k)| after refinement.
    pub tol: f64,
    pub max_iterations: usize,
    pub max_depth: usize,
    pub perturbation_retries: usize,
}

impl Default for PoleSearchOptions {
    fn default() -> Self {
        Self {
            contour_samples: 64,
            tol: 1e-10,
            max_iterations: 60,
            max_depth: 14,
            perturbation_retries: 3,
        }
    }
}

/// Resonance datum z_R = E_R − iΓ/2 with its momentum-plane Jost zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GamowPole {
    pub k_pole: ComplexMomentum,
    pub z_r: Complex64,
    pub e_r: f64,
    pub gamma: f64,
    /// |𝒥₋(k_pole)| after refinement.
    pub residual: f64,
}

impl GamowPole {
    /// Builds the decaying representative of the pair (k, −k̄).
    pub fn from_zero(pot: &PotentialSpec, k: Complex64) -> Self {
        let k = if k.re < 0.0 { -k.conj() } else { k };
        let z = k * k;
        Self {
            k_pole: ComplexMomentum::new(k),
            z_r: z,
            e_r: z.re,
            gamma: -2.0 * z.im,
            residual: regular::jost(pot, k).norm(),
        }
    }

    /// The mirror zero −k̄ (pole at z̄_R).
    pub fn companion(&self) -> Complex64 {
        -self.k_pole.k.conj()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleSearch {
    pub region: KRect,
    /// Argument-principle zero count on the (possibly perturbed) boundary.
    pub winding: i64,
    /// Every refined zero inside the region, sorted by real then imaginary part.
    pub zeros: Vec<Complex64>,
    /// Decaying resonances (Re k > 0), one per mirror pair.
    pub poles: Vec<GamowPole>,
    /// Zeros on the negative imaginary k axis.
    pub virtual_states: Vec<Complex64>,
}

pub fn find_poles(pot: &PotentialSpec, region: KRect, opts: &PoleSearchOptions) -> Result<PoleSearch> {
    pot.validate()?;
    if !(region.re_min < region.re_max && region.im_min < region.im_max) {
        return Err(Error::InvalidInput("empty search rectangle".into()));
    }
    if region.im_max > 0.0 {
        return Err(Error::InvalidInput(
            "search rectangle must lie in the closed lower half k-plane".into(),
        ));
    }

    let jost = |k: Complex64| regular::jost(pot, k);

    let mut rect = region;
    let mut winding = None;
    for attempt in 0..=opts.perturbation_retries {
        if let Some(w) = winding_number(&jost, &rect, opts.contour_samples) {
            winding = Some(w);
            break;
        }
        // Nudge the boundary outward; keep the top edge on or below the axis.
        let nudge = 1e-3 * region.diameter() * (attempt + 1) as f64;
        rect = region.grown(nudge);
        rect.im_max = region.im_max.min(0.0);
    }
    let winding = winding.ok_or(Error::ZeroOnContour {
        attempts: opts.perturbation_retries,
    })?;

    let mut zeros = Vec::new();
    if winding > 0 {
        resolve_cell(pot, &jost, rect, winding, 0, opts, &mut zeros)?;
    }
    zeros.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    zeros.dedup_by(|a, b| (*a - *b).norm() < 1e-8);
    if zeros.len() as i64 != winding {
        return Err(Error::InvalidInput(format!(
            "refined {} zeros but the winding number is {winding}",
            zeros.len()
        )));
    }

    let mut poles: Vec<GamowPole> = Vec::new();
    let mut virtual_states = Vec::new();
    for &z in &zeros {
        if z.re.abs() <= 1e-12 * z.norm().max(1.0) {
            virtual_states.push(z);
            continue;
        }
        let pole = GamowPole::from_zero(pot, z);
        if !poles.iter().any(|p| (p.k_pole.k - pole.k_pole.k).norm() < 1e-8) {
            poles.push(pole);
        }
    }
    poles.sort_by(|a, b| a.k_pole.k.re.total_cmp(&b.k_pole.k.re));

    Ok(PoleSearch {
        region: rect,
        winding,
        zeros,
        poles,
        virtual_states,
    })
}

/// Winding number of `f` around the rectangle, or `None` when the phase
/// cannot be tracked (a zero on or extremely close to the boundary).
pub(crate) fn winding_number<F>(f: &F, rect: &KRect, samples: usize) -> Option<i64>
where
    F: Fn(Complex64) -> Complex64,
{
    let corners = rect.corners();
    let mut total = 0.0;
    for i in 0..4 {
        total += phase_change(f, corners[i], corners[(i + 1) % 4], samples.max(4))?;
    }
    let w = total / (2.0 * PI);
    let rounded = w.round();
    if (w - rounded).abs() > 1e-3 {
        return None;
    }
    Some(rounded as i64)
}

fn phase_change<F>(f: &F, from: Complex64, to: Complex64, samples: usize) -> Option<f64>
where
    F: Fn(Complex64) -> Complex64,
{
    let mut total = 0.0;
    let mut prev_point = from;
    let mut prev_value = f(from);
    for i in 1..=samples {
        let t = i as f64 / samples as f64;
        let point = from + (to - from) * t;
        let value = f(point);
        total += refined_step(f, prev_point, prev_value, point, value, 0)?;
        prev_point = point;
        prev_value = value;
    }
    Some(total)
}

fn refined_step<F>(f: &F, p0: Complex64, v0: Complex64, p1: Complex64, v1: Complex64, depth: usize) -> Option<f64>
where
    F: Fn(Complex64) -> Complex64,
{
    const TINY: f64 = 1e-12;
    if v0.norm() < TINY || v1.norm() < TINY || !v0.is_finite() || !v1.is_finite() {
        return None;
    }
    let step = (v1 / v0).arg();
    if step.abs() <= PI / 4.0 {
        return Some(step);
    }
    if depth >= 40 {
        return None;
    }
    let mid = 0.5 * (p0 + p1);
    let vm = f(mid);
    Some(refined_step(f, p0, v0, mid, vm, depth + 1)? + refined_step(f, mid, vm, p1, v1, depth + 1)?)
}

fn resolve_cell<F>(
    pot: &PotentialSpec,
    f: &F,
    cell: KRect,
    count: i64,
    depth: usize,
    opts: &PoleSearchOptions,
    out: &mut Vec<Complex64>,
) -> Result<()>
where
    F: Fn(Complex64) -> Complex64,
{
    if count <= 0 {
        return Ok(());
    }
    if count == 1 {
        let slack = 1e-9 * cell.diameter();
        let c = cell.center();
        let w = cell.re_max - cell.re_min;
        let h = cell.im_max - cell.im_min;
        let starts = [
            c,
            c + Complex64::new(0.25 * w, 0.25 * h),
            c + Complex64::new(-0.25 * w, 0.25 * h),
            c + Complex64::new(-0.25 * w, -0.25 * h),
            c + Complex64::new(0.25 * w, -0.25 * h),
        ];
        let mut last_err = None;
        for start in starts {
            match newton(pot, start, opts) {
                Ok(root) if cell.contains(root, slack) => {
                    out.push(root);
                    return Ok(());
                }
                Ok(_) => {}
                Err(e) => last_err = Some(e),
            }
        }
        if depth >= opts.max_depth {
            return Err(last_err.unwrap_or(Error::NewtonFailed {
                start: c,
                last: c,
                residual: f(c).norm(),
                iterations: opts.max_iterations,
            }));
        }
    }
    if depth >= opts.max_depth {
        return Err(Error::InvalidInput(format!(
            "cell around {} still holds {count} zeros at depth {depth}",
            cell.center()
        )));
    }

    // Shift the cut off any zero sitting on it.
    for j in 0..8 {
        let fraction = 0.5 + 0.0173 * j as f64;
        let (lo, hi) = cell.split(fraction);
        let (Some(n_lo), Some(n_hi)) = (
            winding_number(f, &lo, opts.contour_samples),
            winding_number(f, &hi, opts.contour_samples),
        ) else {
            continue;
        };
        if n_lo + n_hi != count {
            continue;
        }
        resolve_cell(pot, f, lo, n_lo, depth + 1, opts, out)?;
        resolve_cell(pot, f, hi, n_hi, depth + 1, opts, out)?;
        return Ok(());
    }
    Err(Error::ZeroOnContour { attempts: 8 })
}

/// Newton iteration on 𝒥₋ with the closed-form derivative. Iterates until
/// the step stalls at round-off after the residual drops below `tol`.
pub fn newton(pot: &PotentialSpec, start: Complex64, opts: &PoleSearchOptions) -> Result<Complex64> {
    let mut k = start;
    let mut below_tol = 0;
    for _ in 0..opts.max_iterations {
        let (j, dj) = regular::jost_with_derivative(pot, k);
        if !j.is_finite() || !dj.is_finite() || dj.norm() == 0.0 {
            break;
        }
        let step = j / dj;
        k -= step;
        if j.norm() < opts.tol {
            below_tol += 1;
            if below_tol >= 2 || step.norm() <= 4.0 * f64::EPSILON * k.norm() {
                let residual = regular::jost(pot, k).norm();
                if residual < opts.tol {
                    return Ok(k);
                }
            }
        }
    }
    Err(Error::NewtonFailed {
        start,
        last: k,
        residual: regular::jost(pot, k).norm(),
        iterations: opts.max_iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_potential_has_no_poles() {
        let pot = PotentialSpec::free(1.0, 2.0);
        let res = find_poles(&pot, KRect::new(0.0, 6.0, -3.0, 0.0), &Default::default()).unwrap();
        assert_eq!(res.winding, 0);
        assert!(res.poles.is_empty());
    }

    #[test]
    fn upper_half_plane_rectangle_is_rejected() {
        let pot = PotentialSpec::unit_shell();
        assert!(find_poles(&pot, KRect::new(0.0, 1.0, -1.0, 0.5), &Default::default()).is_err());
    }

    #[test]
    fn symmetric_rectangle_is_deduplicated() {
        let pot = PotentialSpec::unit_shell();
        let res = find_poles(&pot, KRect::new(-2.0, 2.0, -1.0, 0.0), &Default::default()).unwrap();
        assert_eq!(res.winding, 2);
        assert_eq!(res.zeros.len(), 2);
        assert_eq!(res.poles.len(), 1);
        let p = res.poles[0];
        assert!((p.companion() - res.zeros[0]).norm() < 1e-10);
    }
}
