//! Position ↔ energy spectral transforms U± of the shell Hamiltonian and
//! Møller operators built from them.
//!
//! (U± f)(E) = ∫₀^∞ f(r) K±(r, E) dr and (U±⁻¹ g)(r) = ∫₀^∞ g(E) conj K±(r, E) dE,
//! with K±(r, E) = c·⟨r|E±⟩/√k. The factor 1/√k converts the momentum
//! normalization of the kets to energy normalization; the constant c is
//! calibrated once from Parseval's identity for the free kernel.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardy::{DomainTag, SampledFunction, TailModel};
use crate::quadrature::{breaks_with_fixed, composite, QuadGrid};
use crate::scatter::{jost_entire, PotentialSpec, Sign};

pub const DEFAULT_R_CUTOFF: f64 = 40.0;
pub const DEFAULT_E_CUTOFF: f64 = 400.0;
const DEFAULT_ORDER: usize = 4;
const TAIL_TOL: f64 = 1e-8;
const TAIL_BAND: f64 = 0.05;

/// Real regular solution χ(r, k) for one real momentum, with the complex
/// prefactor that turns it into the kernel K±(r, E).
#[derive(Clone, Copy, Debug)]
struct Column {
    k: f64,
    sin_ka: f64,
    cos_ka: f64,
    w: f64,
    jost_mod: f64,
    jost_arg: f64,
    prefactor: Complex64,
}

impl Column {
    fn new(pot: &PotentialSpec, k: f64, sign: Sign, c: f64) -> Self {
        let j = jost_entire(pot, Complex64::new(k, 0.0));
        let scale = match sign {
            Sign::Plus => Complex64::new(0.0, -2.0) / j,
            Sign::Minus => Complex64::new(0.0, 2.0) / j.conj(),
        };
        Self {
            k,
            sin_ka: (k * pot.a).sin(),
            cos_ka: (k * pot.a).cos(),
            w: k * k - pot.v0,
            jost_mod: j.norm(),
            jost_arg: j.arg(),
            prefactor: scale * (c / k.sqrt()),
        }
    }

    fn chi(&self, pot: &PotentialSpec, r: f64) -> f64 {
        let k = self.k;
        if r <= pot.a {
            (k * r).sin()
        } else if r <= pot.b {
            let rho = r - pot.a;
            let (c, s) = if self.w > 0.0 {
                let q = self.w.sqrt();
                ((q * rho).cos(), (q * rho).sin() / q)
            } else if self.w < 0.0 {
                let q = (-self.w).sqrt();
                ((q * rho).cosh(), (q * rho).sinh() / q)
            } else {
                (1.0, rho)
            };
            self.sin_ka * c + k * self.cos_ka * s
        } else {
            self.jost_mod * (k * r - self.jost_arg).sin()
        }
    }
}

/// Builder for [`TransformPlan`].
#[derive(Clone, Debug)]
pub struct TransformPlanBuilder {
    pot: PotentialSpec,
    sign: Sign,
    r_cutoff: f64,
    e_cutoff: f64,
    order: usize,
    refinement: f64,
    norm_constant: Option<f64>,
}

impl TransformPlanBuilder {
    pub fn sign(mut self, sign: Sign) -> Self {
        self.sign = sign;
        self
    }

    pub fn r_cutoff(mut self, r: f64) -> Self {
        self.r_cutoff = r;
        self
    }

    pub fn e_cutoff(mut self, e: f64) -> Self {
        self.e_cutoff = e;
        self
    }

    /// Gauss–Legendre order per panel.
    pub fn order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }

    /// Divides every panel width; 2.0 is one grid doubling.
    pub fn refinement(mut self, factor: f64) -> Self {
        self.refinement = factor;
        self
    }

    /// Skips calibration and uses the given constant.
    pub fn norm_constant(mut self, c: f64) -> Self {
        self.norm_constant = Some(c);
        self
    }

    pub fn build(self) -> Result<TransformPlan> {
        self.pot.validate()?;
        for (name, v) in [
            ("rCutoff", self.r_cutoff),
            ("eCutoff", self.e_cutoff),
            ("refinement", self.refinement),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        if self.r_cutoff <= self.pot.b {
            return Err(Error::InvalidInput("rCutoff must lie beyond the shell".into()));
        }
        if self.order < 2 {
            return Err(Error::InvalidInput("panel order must be at least 2".into()));
        }
        let k_max = self.e_cutoff.sqrt();
        let r_grid = composite(
            &breaks_with_fixed(
                0.0,
                self.r_cutoff,
                FRAC_PI_2 / k_max / self.refinement,
                &[self.pot.a, self.pot.b],
            ),
            self.order,
        );
        let threshold = self.pot.v0.sqrt();
        let k_grid = composite(
            &breaks_with_fixed(0.0, k_max, FRAC_PI_2 / self.r_cutoff / self.refinement, &[threshold]),
            self.order,
        );
        let mut plan = TransformPlan {
            pot: self.pot,
            sign: self.sign,
            r_grid,
            e_nodes: k_grid.nodes.iter().map(|k| k * k).collect(),
            e_weights: k_grid
                .nodes
                .iter()
                .zip(&k_grid.weights)
                .map(|(k, w)| 2.0 * k * w)
                .collect(),
            k_nodes: k_grid.nodes,
            r_cutoff: self.r_cutoff,
            e_cutoff: self.e_cutoff,
            norm_constant: 1.0,
            columns: Vec::new(),
        };
        plan.norm_constant = match self.norm_constant {
            Some(c) => c,
            None => plan.calibrate(),
        };
        plan.columns = plan.make_columns(&plan.pot, plan.sign, plan.norm_constant);
        Ok(plan)
    }
}

/// Quadrature grids and calibrated kernel for U±. Immutable once built.
#[derive(Clone, Debug)]
pub struct TransformPlan {
    pub pot: PotentialSpec,
    pub sign: Sign,
    pub r_grid: QuadGrid,
    pub k_nodes: Vec<f64>,
    pub e_nodes: Vec<f64>,
    pub e_weights: Vec<f64>,
    pub r_cutoff: f64,
    pub e_cutoff: f64,
    pub norm_constant: f64,
    columns: Vec<Column>,
}

/// Output of a transform with its norm bookkeeping.
#[derive(Clone, Debug)]
pub struct Transformed {
    pub function: SampledFunction,
    pub input_norm: f64,
    pub output_norm: f64,
    /// |‖out‖ − ‖in‖| / ‖in‖
    pub parseval_defect: f64,
}

fn calibration_probe(r: f64) -> Complex64 {
    Complex64::new(r * (-r * r).exp(), 0.0)
}

impl TransformPlan {
    pub fn builder(pot: PotentialSpec) -> TransformPlanBuilder {
        TransformPlanBuilder {
            pot,
            sign: Sign::Plus,
            r_cutoff: DEFAULT_R_CUTOFF,
            e_cutoff: DEFAULT_E_CUTOFF,
            order: DEFAULT_ORDER,
            refinement: 1.0,
            norm_constant: None,
        }
    }

    fn make_columns(&self, pot: &PotentialSpec, sign: Sign, c: f64) -> Vec<Column> {
        self.k_nodes.iter().map(|&k| Column::new(pot, k, sign, c)).collect()
    }

    /// Constant c making the free transform norm-preserving on the probe.
    fn calibrate(&self) -> f64 {
        let free = PotentialSpec::free(self.pot.a, self.pot.b);
        let cols = self.make_columns(&free, Sign::Plus, 1.0);
        let f: Vec<Complex64> = self.r_grid.nodes.iter().map(|&r| calibration_probe(r)).collect();
        let g = forward_with(&free, &self.r_grid, &cols, &f);
        let out = weighted_norm(&self.e_weights, &g);
        let inp = self.r_grid.norm_sq(&f).sqrt();
        inp / out
    }

    /// Same grids and constant with the barrier switched off.
    pub fn free_variant(&self) -> TransformPlan {
        let mut plan = self.clone();
        plan.pot = PotentialSpec::free(self.pot.a, self.pot.b);
        plan.columns = plan.make_columns(&plan.pot, plan.sign, plan.norm_constant);
        plan
    }

    pub fn with_sign(&self, sign: Sign) -> TransformPlan {
        let mut plan = self.clone();
        plan.sign = sign;
        plan.columns = plan.make_columns(&plan.pot, sign, plan.norm_constant);
        plan
    }

    pub fn r_nodes(&self) -> &[f64] {
        &self.r_grid.nodes
    }

    /// K±(r, E_j) at the j-th energy node.
    pub fn kernel(&self, r: f64, j: usize) -> Complex64 {
        let col = &self.columns[j];
        col.prefactor * col.chi(&self.pot, r)
    }

    pub fn position_norm(&self, values: &[Complex64]) -> f64 {
        self.r_grid.norm_sq(values).sqrt()
    }

    pub fn energy_norm(&self, values: &[Complex64]) -> f64 {
        weighted_norm(&self.e_weights, values)
    }

    /// Samples `f` at the radial nodes.
    pub fn sample_position<F: Fn(f64) -> Complex64>(&self, f: F) -> Vec<Complex64> {
        self.r_grid.nodes.iter().map(|&r| f(r)).collect()
    }

    /// Samples `g` at the energy nodes.
    pub fn sample_energy<F: Fn(f64) -> Complex64>(&self, g: F) -> Vec<Complex64> {
        self.e_nodes.iter().map(|&e| g(e)).collect()
    }

    pub fn position_function(&self, values: Vec<Complex64>) -> Result<SampledFunction> {
        Ok(
            SampledFunction::new(self.r_grid.nodes.clone(), values, DomainTag::RadialHalfline)?
                .with_tail(TailModel::Unknown),
        )
    }

    pub fn energy_function(&self, values: Vec<Complex64>) -> Result<SampledFunction> {
        Ok(
            SampledFunction::new(self.e_nodes.clone(), values, DomainTag::PositiveEnergyHalfline)?
                .with_tail(TailModel::Unknown),
        )
    }

    fn resample_position(&self, f: &SampledFunction) -> Result<Vec<Complex64>> {
        if !matches!(f.domain, DomainTag::RadialHalfline) {
            return Err(Error::InvalidInput(format!(
                "expected a radial function, got {}",
                f.domain.as_str()
            )));
        }
        if f.grid == self.r_grid.nodes {
            return Ok(f.values.clone());
        }
        let beyond: Vec<f64> = f.grid.iter().copied().filter(|&r| r > self.r_cutoff).collect();
        if !beyond.is_empty() {
            let total = f.norm_sq();
            let outside: f64 = f
                .grid
                .windows(2)
                .zip(f.values.windows(2))
                .filter(|(g, _)| g[0] >= self.r_cutoff)
                .map(|(g, v)| 0.5 * (g[1] - g[0]) * (v[0].norm_sqr() + v[1].norm_sqr()))
                .sum();
            if total > 0.0 && outside > TAIL_TOL * total {
                return Err(Error::Truncation {
                    fraction: outside / total,
                });
            }
        }
        Ok(self.r_grid.nodes.iter().map(|&r| f.interpolate(r)).collect())
    }

    fn resample_energy(&self, g: &SampledFunction) -> Result<Vec<Complex64>> {
        if !matches!(g.domain, DomainTag::PositiveEnergyHalfline | DomainTag::EnergyLine) {
            return Err(Error::InvalidInput(format!(
                "expected an energy function, got {}",
                g.domain.as_str()
            )));
        }
        if g.grid == self.e_nodes {
            return Ok(g.values.clone());
        }
        if let Some(c) = &g.continuation {
            return Ok(self.e_nodes.iter().map(|&e| c.eval(Complex64::new(e, 0.0))).collect());
        }
        Ok(self.e_nodes.iter().map(|&e| g.interpolate(e)).collect())
    }

    fn check_position_tail(&self, f: &[Complex64]) -> Result<()> {
        let edge = self.r_cutoff * (1.0 - TAIL_BAND);
        tail_check(&self.r_grid.nodes, &self.r_grid.weights, f, edge)
    }

    fn check_energy_tail(&self, g: &[Complex64]) -> Result<()> {
        let edge = self.e_cutoff * (1.0 - TAIL_BAND);
        tail_check(&self.e_nodes, &self.e_weights, g, edge)
    }

    /// f̂±(E_j) for values sampled at the radial nodes.
    pub fn forward_values(&self, f: &[Complex64]) -> Result<Vec<Complex64>> {
        self.expect_len(f.len(), self.r_grid.len())?;
        self.check_position_tail(f)?;
        Ok(forward_with(&self.pot, &self.r_grid, &self.columns, f))
    }

    /// (U±⁻¹ g)(r_i) for values sampled at the energy nodes.
    pub fn inverse_values(&self, g: &[Complex64]) -> Result<Vec<Complex64>> {
        self.expect_len(g.len(), self.e_nodes.len())?;
        self.check_energy_tail(g)?;
        Ok(self.r_grid.nodes.par_iter().map(|&r| self.inverse_at(g, r)).collect())
    }

    fn inverse_at(&self, g: &[Complex64], r: f64) -> Complex64 {
        self.columns
            .iter()
            .zip(g)
            .zip(&self.e_weights)
            .map(|((col, gv), w)| col.prefactor.conj() * gv * (w * col.chi(&self.pot, r)))
            .sum()
    }

    fn expect_len(&self, got: usize, want: usize) -> Result<()> {
        if got != want {
            return Err(Error::GridMismatch(format!("{got} samples for {want} nodes")));
        }
        Ok(())
    }

    pub fn to_energy(&self, f: &SampledFunction) -> Result<Transformed> {
        let fv = self.resample_position(f)?;
        let g = self.forward_values(&fv)?;
        let (input_norm, output_norm) = (self.position_norm(&fv), self.energy_norm(&g));
        Ok(Transformed {
            function: self.energy_function(g)?,
            input_norm,
            output_norm,
            parseval_defect: relative_gap(output_norm, input_norm),
        })
    }

    pub fn to_position(&self, g: &SampledFunction) -> Result<Transformed> {
        let gv = self.resample_energy(g)?;
        let f = self.inverse_values(&gv)?;
        let (input_norm, output_norm) = (self.energy_norm(&gv), self.position_norm(&f));
        Ok(Transformed {
            function: self.position_function(f)?,
            input_norm,
            output_norm,
            parseval_defect: relative_gap(output_norm, input_norm),
        })
    }

    /// U±⁻¹ g at an arbitrary radius.
    pub fn position_at(&self, g: &SampledFunction, r: f64) -> Result<Complex64> {
        if !(r >= 0.0) {
            return Err(Error::InvalidInput(format!("radius must be non-negative, got {r}")));
        }
        let gv = self.resample_energy(g)?;
        Ok(self.inverse_at(&gv, r))
    }
}

fn forward_with(pot: &PotentialSpec, r_grid: &QuadGrid, cols: &[Column], f: &[Complex64]) -> Vec<Complex64> {
    let wf: Vec<(f64, Complex64)> = r_grid
        .nodes
        .iter()
        .zip(&r_grid.weights)
        .zip(f)
        .filter(|(_, v)| v.norm_sqr() > 0.0)
        .map(|((&r, &w), &v)| (r, v * w))
        .collect();
    cols.par_iter()
        .map(|col| {
            let s: Complex64 = wf.iter().map(|&(r, v)| v * col.chi(pot, r)).sum();
            col.prefactor * s
        })
        .collect()
}

fn weighted_norm(weights: &[f64], values: &[Complex64]) -> f64 {
    weights
        .iter()
        .zip(values)
        .map(|(w, v)| w * v.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn tail_check(nodes: &[f64], weights: &[f64], v: &[Complex64], edge: f64) -> Result<()> {
    let (mut total, mut tail) = (0.0, 0.0);
    for ((x, w), v) in nodes.iter().zip(weights).zip(v) {
        let m = w * v.norm_sqr();
        total += m;
        if *x > edge {
            tail += m;
        }
    }
    if total > 0.0 && tail > TAIL_TOL * total {
        return Err(Error::Truncation { fraction: tail / total });
    }
    Ok(())
}

fn relative_gap(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a
    } else {
        (a - b).abs() / b
    }
}

/// Result of comparing U(Hf) with E·(Uf).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IntertwiningReport {
    pub step: f64,
    /// ‖U(Hf) − E·Uf‖ / ‖Hf‖ at the given step.
    pub defect: f64,
    /// Same at half the step.
    pub defect_half_step: f64,
    /// log2(defect / defect_half_step).
    pub observed_order: f64,
    pub warnings: Vec<String>,
}

/// −f'' + V f at `r` by finite differences with step `h`, switching to a
/// one-sided second-order stencil whenever the central one would straddle
/// the origin or a barrier edge.
pub fn apply_hamiltonian<F: Fn(f64) -> Complex64>(pot: &PotentialSpec, f: &F, r: f64, h: f64) -> Complex64 {
    let crosses = |p: f64| r - h < p && p < r + h && r != p;
    let second = if r - h < 0.0 {
        one_sided(f, r, h)
    } else if let Some(&p) = [pot.a, pot.b].iter().find(|&&p| crosses(p)) {
        one_sided(f, r, if r < p { -h } else { h })
    } else {
        (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h)
    };
    -second + pot.value(r) * f(r)
}

fn one_sided<F: Fn(f64) -> Complex64>(f: &F, r: f64, h: f64) -> Complex64 {
    (2.0 * f(r) - 5.0 * f(r + h) + 4.0 * f(r + 2.0 * h) - f(r + 3.0 * h)) / (h * h)
}

/// ‖U(Hf) − E·(Uf)‖ / ‖Hf‖ at steps h and h/2 for a smooth f with f(0) = 0.
pub fn intertwining_check<F: Fn(f64) -> Complex64 + Sync>(
    plan: &TransformPlan,
    f: F,
    h: f64,
) -> Result<IntertwiningReport> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidInput(format!("step must be positive, got {h}")));
    }
    let mut warnings = Vec::new();
    let resolve = 0.1 * plan.pot.a.min(plan.pot.width());
    if h > resolve {
        warnings.push(format!(
            "step {h} does not resolve the shell (needs < {resolve}); edge stencils are coarse"
        ));
    }
    if f(0.0).norm() > 1e-12 {
        warnings.push("f(0) != 0: f is outside the Hamiltonian's domain".into());
    }
    let fv = plan.sample_position(&f);
    let uf = plan.forward_values(&fv)?;
    let target: Vec<Complex64> = uf.iter().zip(&plan.e_nodes).map(|(g, e)| g * e).collect();
    let defect_at = |step: f64| -> Result<f64> {
        let hf: Vec<Complex64> = plan
            .r_grid
            .nodes
            .par_iter()
            .map(|&r| apply_hamiltonian(&plan.pot, &f, r, step))
            .collect();
        let hf_norm = plan.position_norm(&hf);
        if hf_norm == 0.0 {
            return Ok(0.0);
        }
        let uhf = plan.forward_values(&hf)?;
        let diff: Vec<Complex64> = uhf.iter().zip(&target).map(|(a, b)| a - b).collect();
        Ok(plan.energy_norm(&diff) / hf_norm)
    };
    let defect = defect_at(h)?;
    let defect_half_step = defect_at(h / 2.0)?;
    Ok(IntertwiningReport {
        step: h,
        defect,
        defect_half_step,
        observed_order: (defect / defect_half_step).log2(),
        warnings,
    })
}

/// Ω± f = U±⁻¹ U_free f, on the plan's radial nodes.
pub fn moller_apply(plan: &TransformPlan, f_free: &SampledFunction) -> Result<Transformed> {
    let free = plan.free_variant();
    let energy = free.to_energy(f_free)?;
    let out = plan.to_position(&energy.function)?;
    Ok(Transformed {
        parseval_defect: relative_gap(out.output_norm, energy.input_norm),
        input_norm: energy.input_norm,
        ..out
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scatter::{ls_ket, Sign};

    #[test]
    fn real_kernel_matches_complex_ket() {
        let pot = PotentialSpec::new(1.0, 2.0, 3.0).unwrap();
        let c = 0.3;
        for sign in [Sign::Plus, Sign::Minus] {
            for k in [0.4, 3f64.sqrt(), 2.5, 7.0] {
                let col = Column::new(&pot, k, sign, c);
                for r in [0.3, 1.0, 1.5, 2.0, 2.7, 15.0] {
                    let direct = ls_ket(&pot, k * k, r, sign).unwrap() * (c / k.sqrt());
                    let got = col.prefactor * col.chi(&pot, r);
                    assert!((got - direct).norm() < 1e-12 * direct.norm().max(1.0), "k={k} r={r}");
                }
            }
        }
    }

    #[test]
    fn hamiltonian_stencil_is_exact_on_quadratics() {
        let pot = PotentialSpec::unit_shell();
        let f = |r: f64| Complex64::new(r * r - 3.0 * r, 0.0);
        for r in [0.0005, 0.5, 0.9995, 1.0005, 1.5, 1.9995, 2.0005, 3.0] {
            let got = apply_hamiltonian(&pot, &f, r, 1e-3);
            let expect = -2.0 + pot.value(r) * f(r).re;
            assert!((got.re - expect).abs() < 1e-6, "r = {r}: {got}");
        }
    }
}
