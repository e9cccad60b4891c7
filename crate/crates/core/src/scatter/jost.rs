//! Jost function, S-matrix and Lippmann–Schwinger kets.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::potential::{ComplexMomentum, PotentialSpec, Sheet, Sign};
use super::regular::{self, RegularSolution};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);
/// A Jost value this small relative to its own term scale is treated as an exact zero.
const POLE_EPS: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JostData {
    pub k: ComplexMomentum,
    /// 𝒥₋(k)
    pub j_minus: Complex64,
    /// 𝒥₊(k) = 𝒥₋(−k)
    pub j_plus: Complex64,
}

pub fn jost_function(pot: &PotentialSpec, k: ComplexMomentum) -> Result<JostData> {
    pot.validate()?;
    if k.k == Complex64::new(0.0, 0.0) {
        return Err(Error::ThresholdMomentum);
    }
    Ok(JostData {
        k,
        j_minus: regular::jost(pot, k.k),
        j_plus: regular::jost(pot, -k.k),
    })
}

/// S(k) = 𝒥₋(−k) / 𝒥₋(k).
pub fn s_matrix_at(pot: &PotentialSpec, k: ComplexMomentum) -> Result<Complex64> {
    let data = jost_function(pot, k)?;
    if data.j_minus.norm() <= POLE_EPS * regular::jost_scale(pot, k.k) {
        return Err(Error::Pole { k: k.k });
    }
    Ok(data.j_plus / data.j_minus)
}

/// S(E) on the requested sheet.
pub fn s_matrix(pot: &PotentialSpec, energy: Complex64, sheet: Sheet) -> Result<Complex64> {
    if energy == Complex64::new(0.0, 0.0) {
        return Err(Error::ThresholdMomentum);
    }
    s_matrix_at(pot, ComplexMomentum::from_energy(energy, sheet))
}

/// ⟨r|E±⟩ at a fixed momentum, normalized so that beyond the shell
/// ⟨r|E+⟩ = e^{-ikr} − S e^{ikr} and ⟨r|E−⟩ = e^{ikr} − S⁻¹ e^{-ikr}.
/// For real k the two are complex conjugates.
#[derive(Clone, Copy, Debug)]
pub struct Ket {
    solution: RegularSolution,
    sign: Sign,
    scale: Complex64,
}

impl Ket {
    pub fn new(pot: &PotentialSpec, k: Complex64, sign: Sign) -> Result<Self> {
        pot.validate()?;
        let solution = RegularSolution::new(pot, k);
        let (denom, kd, prefactor) = match sign {
            Sign::Plus => (solution.jost(), k, -2.0 * I),
            Sign::Minus => (solution.jost_reflected(), -k, 2.0 * I),
        };
        if denom.norm() <= POLE_EPS * regular::jost_scale(pot, kd) {
            return Err(Error::Pole {
                k: match sign {
                    Sign::Plus => k,
                    Sign::Minus => -k,
                },
            });
        }
        Ok(Self {
            solution,
            sign,
            scale: prefactor / denom,
        })
    }

    pub fn k(&self) -> Complex64 {
        self.solution.k()
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// Value of the Jost function in the normalizing denominator.
    pub fn normalizing_jost(&self) -> Complex64 {
        match self.sign {
            Sign::Plus => self.solution.jost(),
            Sign::Minus => self.solution.jost_reflected(),
        }
    }

    pub fn at(&self, r: f64) -> Complex64 {
        self.scale * self.solution.value(r)
    }

    pub fn solution(&self) -> &RegularSolution {
        &self.solution
    }
}

/// ⟨r|E±⟩ for real E > 0.
pub fn ls_ket(pot: &PotentialSpec, energy: f64, r: f64, sign: Sign) -> Result<Complex64> {
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(Error::InvalidInput(format!("energy must be positive, got {energy}")));
    }
    if !(r >= 0.0) {
        return Err(Error::InvalidInput(format!("radius must be non-negative, got {r}")));
    }
    Ok(Ket::new(pot, Complex64::new(energy.sqrt(), 0.0), sign)?.at(r))
}

/// Analytic continuation of E ↦ ⟨r|E±⟩ to complex z on the given sheet.
/// The minus branch continued into the lower half-plane is the kernel
/// ⟨z⁺|r⟩ that defines continued energy wavefunctions.
pub fn continued_ket(pot: &PotentialSpec, z: Complex64, sheet: Sheet, sign: Sign, r: f64) -> Result<Complex64> {
    if !(r >= 0.0) {
        return Err(Error::InvalidInput(format!("radius must be non-negative, got {r}")));
    }
    let k = ComplexMomentum::from_energy(z, sheet);
    Ok(Ket::new(pot, k.k, sign)?.at(r))
}
