use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spherical shell barrier of height `v0` on `[a, b]` behind a hard wall at
/// the origin. Units are ħ = 2m = 1, so E = k².
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub a: f64,
    pub b: f64,
    pub v0: f64,
}

impl PotentialSpec {
    pub fn new(a: f64, b: f64, v0: f64) -> Result<Self> {
        let spec = Self { a, b, v0 };
        spec.validate()?;
        Ok(spec)
    }

    /// a = 1, b = 2, v0 = 1.
    pub fn unit_shell() -> Self {
        Self {
            a: 1.0,
            b: 2.0,
            v0: 1.0,
        }
    }

    pub fn free(a: f64, b: f64) -> Self {
        Self { a, b, v0: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite() && self.v0.is_finite()) {
            return Err(Error::InvalidPotential("non-finite parameter".into()));
        }
        if !(self.a > 0.0 && self.a < self.b) {
            return Err(Error::InvalidPotential(format!(
                "need 0 < a < b, got a = {}, b = {}",
                self.a, self.b
            )));
        }
        if self.v0 < 0.0 {
            return Err(Error::InvalidPotential(format!(
                "v0 must be non-negative, got {}",
                self.v0
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn is_free(&self) -> bool {
        self.v0 == 0.0
    }

    /// V(r) for r >= 0; the barrier owns the closed interval [a, b].
    pub fn value(&self, r: f64) -> f64 {
        if r >= self.a && r <= self.b {
            self.v0
        } else {
            0.0
        }
    }

    pub fn with_v0(&self, v0: f64) -> Self {
        Self { v0, ..*self }
    }
}

/// The ± label shared by Lippmann–Schwinger kets, transforms and semigroups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

/// Sheet of the two-sheeted energy surface z = k².
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sheet {
    /// Im k >= 0.
    First,
    /// Im k < 0, reached by continuing through the cut on the positive axis.
    Second,
}

/// Complex momentum; the sheet of z = k² is read off the sign of Im k.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexMomentum {
    pub k: Complex64,
}

impl ComplexMomentum {
    pub fn new(k: Complex64) -> Self {
        Self { k }
    }

    pub fn real(k: f64) -> Self {
        Self::new(Complex64::new(k, 0.0))
    }

    /// k(z) on the requested sheet. On the positive real axis both sheets
    /// meet and k = +√E.
    pub fn from_energy(z: Complex64, sheet: Sheet) -> Self {
        let p = z.sqrt();
        let k = match sheet {
            Sheet::First => {
                if p.im < 0.0 {
                    -p
                } else {
                    p
                }
            }
            Sheet::Second => {
                if p.im > 0.0 || (p.im == 0.0 && z.re < 0.0) {
                    -p
                } else {
                    p
                }
            }
        };
        Self { k }
    }

    pub fn energy(&self) -> Complex64 {
        self.k * self.k
    }

    pub fn sheet(&self) -> Sheet {
        if self.k.im < 0.0 {
            Sheet::Second
        } else {
            Sheet::First
        }
    }

    pub fn neg(&self) -> Self {
        Self { k: -self.k }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_geometry() {
        assert!(PotentialSpec::new(2.0, 1.0, 1.0).is_err());
        assert!(PotentialSpec::new(0.0, 1.0, 1.0).is_err());
        assert!(PotentialSpec::new(1.0, 2.0, -0.5).is_err());
        assert!(PotentialSpec::new(1.0, 2.0, 0.0).is_ok());
    }

    #[test]
    fn sheet_assignment_follows_quadrants() {
        let c = Complex64::new;
        let pos = ComplexMomentum::from_energy(c(4.0, 0.0), Sheet::Second);
        assert_eq!(pos.k, c(2.0, 0.0));
        let pos = ComplexMomentum::from_energy(c(4.0, 0.0), Sheet::First);
        assert_eq!(pos.k, c(2.0, 0.0));

        let lower2 = ComplexMomentum::from_energy(c(2.0, -1.0), Sheet::Second);
        assert!(lower2.k.re > 0.0 && lower2.k.im < 0.0);
        let upper2 = ComplexMomentum::from_energy(c(2.0, 1.0), Sheet::Second);
        assert!(upper2.k.re < 0.0 && upper2.k.im < 0.0);
        let lower1 = ComplexMomentum::from_energy(c(2.0, -1.0), Sheet::First);
        assert!(lower1.k.re < 0.0 && lower1.k.im > 0.0);
        let neg2 = ComplexMomentum::from_energy(c(-9.0, 0.0), Sheet::Second);
        assert!((neg2.k - c(0.0, -3.0)).norm() < 1e-15);
        assert_eq!(neg2.sheet(), Sheet::Second);
        for m in [lower2, upper2, lower1, neg2] {
            let z = m.energy();
            assert!((m.k * m.k - z).norm() < 1e-14);
        }
    }
}
