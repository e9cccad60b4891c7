//! Piecewise solution obtained from the 4×4 continuity system.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::potential::{ComplexMomentum, PotentialSpec};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which square root of k² − v0 is used for the barrier wavenumber.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum KappaBranch {
    /// Principal root; continuous along the real-k sweep.
    #[default]
    Principal,
    /// The negated root. The region-II span is the same, only the labels of
    /// the two amplitudes swap.
    Flipped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    Inner,
    Barrier,
    Outer,
}

/// χ(r) = alpha sin(kr) on [0, a], a_ii e^{iκr} + b_ii e^{-iκr} on [a, b],
/// c_in e^{-ikr} + c_out e^{ikr} beyond b.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionSolution {
    pub pot: PotentialSpec,
    pub k: ComplexMomentum,
    pub kappa: Complex64,
    pub alpha: Complex64,
    pub a_ii: Complex64,
    pub b_ii: Complex64,
    pub c_in: Complex64,
    pub c_out: Complex64,
}

pub fn match_coefficients(pot: &PotentialSpec, k: ComplexMomentum) -> Result<RegionSolution> {
    match_coefficients_on_branch(pot, k, KappaBranch::Principal)
}

pub fn match_coefficients_on_branch(
    pot: &PotentialSpec,
    k: ComplexMomentum,
    branch: KappaBranch,
) -> Result<RegionSolution> {
    pot.validate()?;
    let kv = k.k;
    if kv == Complex64::new(0.0, 0.0) {
        return Err(Error::ThresholdMomentum);
    }
    let mut kappa = (kv * kv - pot.v0).sqrt();
    if branch == KappaBranch::Flipped {
        kappa = -kappa;
    }
    let (a, b) = (pot.a, pot.b);
    let ea = (I * kappa * a).exp();
    let eb = (I * kappa * b).exp();
    let ein = (-I * kv * b).exp();
    let eout = (I * kv * b).exp();
    let zero = Complex64::new(0.0, 0.0);

    let matrix = [
        [ea, ea.inv(), zero, zero],
        [I * kappa * ea, -I * kappa * ea.inv(), zero, zero],
        [eb, eb.inv(), -ein, -eout],
        [I * kappa * eb, -I * kappa * eb.inv(), I * kv * ein, -I * kv * eout],
    ];
    let rhs = [(kv * a).sin(), kv * (kv * a).cos(), zero, zero];
    let x = solve4(matrix, rhs).ok_or(Error::SingularMatching { k: kv })?;

    Ok(RegionSolution {
        pot: *pot,
        k,
        kappa,
        alpha: Complex64::new(1.0, 0.0),
        a_ii: x[0],
        b_ii: x[1],
        c_in: x[2],
        c_out: x[3],
    })
}

impl RegionSolution {
    pub fn region_of(&self, r: f64) -> Region {
        if r <= self.pot.a {
            Region::Inner
        } else if r <= self.pot.b {
            Region::Barrier
        } else {
            Region::Outer
        }
    }

    /// Value and derivative of one region's expression, evaluated at any r.
    /// Used to compare the two one-sided limits at a matching point.
    pub fn evaluate_in(&self, region: Region, r: f64) -> (Complex64, Complex64) {
        let k = self.k.k;
        match region {
            Region::Inner => {
                let kr = k * r;
                (self.alpha * kr.sin(), self.alpha * k * kr.cos())
            }
            Region::Barrier => {
                let ep = (I * self.kappa * r).exp();
                let em = (-I * self.kappa * r).exp();
                (
                    self.a_ii * ep + self.b_ii * em,
                    I * self.kappa * (self.a_ii * ep - self.b_ii * em),
                )
            }
            Region::Outer => {
                let ein = (-I * k * r).exp();
                let eout = (I * k * r).exp();
                (
                    self.c_in * ein + self.c_out * eout,
                    I * k * (self.c_out * eout - self.c_in * ein),
                )
            }
        }
    }

    pub fn value(&self, r: f64) -> Complex64 {
        self.evaluate_in(self.region_of(r), r).0
    }

    pub fn derivative(&self, r: f64) -> Complex64 {
        self.evaluate_in(self.region_of(r), r).1
    }

    /// Jost value −2i·c_in, normalized to 1 for the free problem.
    pub fn jost(&self) -> Complex64 {
        -2.0 * I * self.c_in
    }

    /// Largest scale-relative continuity defect of value and derivative at
    /// a and b. Each defect is divided by max(1, |left-hand limit|).
    pub fn continuity_defect(&self) -> f64 {
        let pairs = [
            (Region::Inner, Region::Barrier, self.pot.a),
            (Region::Barrier, Region::Outer, self.pot.b),
        ];
        pairs
            .iter()
            .flat_map(|&(left, right, x)| {
                let (v0, d0) = self.evaluate_in(left, x);
                let (v1, d1) = self.evaluate_in(right, x);
                [
                    (v0 - v1).norm() / v0.norm().max(1.0),
                    (d0 - d1).norm() / d0.norm().max(1.0),
                ]
            })
            .fold(0.0, f64::max)
    }
}

/// Gaussian elimination with scaled partial pivoting. Returns `None` when a
/// pivot vanishes or the solution is not finite.
fn solve4(mut m: [[Complex64; 4]; 4], mut rhs: [Complex64; 4]) -> Option<[Complex64; 4]> {
    const N: usize = 4;
    let scale: Vec<f64> = m
        .iter()
        .map(|row| row.iter().map(|v| v.norm()).fold(0.0, f64::max))
        .collect();
    if scale.iter().any(|&s| s == 0.0 || !s.is_finite()) {
        return None;
    }
    let mut perm = [0usize, 1, 2, 3];
    for col in 0..N {
        let (piv, best) = (col..N)
            .map(|row| (row, m[row][col].norm() / scale[perm[row]]))
            .max_by(|x, y| x.1.total_cmp(&y.1))?;
        if best == 0.0 || !best.is_finite() {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        perm.swap(col, piv);
        for row in col + 1..N {
            let factor = m[row][col] / m[col][col];
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            let pivot_row = m[col];
            for (dst, src) in m[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *dst -= factor * src;
            }
            let sub = factor * rhs[col];
            rhs[row] -= sub;
        }
    }
    let mut x = [Complex64::new(0.0, 0.0); N];
    for row in (0..N).rev() {
        let mut acc = rhs[row];
        for c in row + 1..N {
            acc -= m[row][c] * x[c];
        }
        x[row] = acc / m[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scatter::regular::RegularSolution;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn free_problem_is_pure_sine() {
        let pot = PotentialSpec::free(1.0, 2.0);
        let sol = match_coefficients(&pot, ComplexMomentum::real(1.0)).unwrap();
        assert!((sol.c_out + sol.c_in).norm() < 1e-15);
        for r in [0.3, 1.5, 2.5, 7.0] {
            assert!((sol.value(r) - r.sin()).norm() < 1e-14);
        }
    }

    #[test]
    fn matching_is_exact_at_both_edges() {
        let pot = PotentialSpec::unit_shell();
        let sol = match_coefficients(&pot, ComplexMomentum::real(0.5)).unwrap();
        let (va, _) = sol.evaluate_in(Region::Inner, pot.a);
        let (vb, _) = sol.evaluate_in(Region::Barrier, pot.a);
        assert!((va - vb).norm() < 1e-12);
        let (_, db) = sol.evaluate_in(Region::Barrier, pot.b);
        let (_, dc) = sol.evaluate_in(Region::Outer, pot.b);
        assert!((db - dc).norm() < 1e-12);
        assert!(sol.value(0.0).norm() == 0.0);
    }

    #[test]
    fn flipped_branch_gives_the_same_function() {
        let pot = PotentialSpec::unit_shell();
        for k in [c(0.5, 0.0), c(2.0, 0.0), c(1.3, -0.6), c(-0.4, 2.0)] {
            let p = match_coefficients(&pot, ComplexMomentum::new(k)).unwrap();
            let f = match_coefficients_on_branch(&pot, ComplexMomentum::new(k), KappaBranch::Flipped).unwrap();
            assert!((p.a_ii - f.b_ii).norm() < 1e-12 * (1.0 + p.a_ii.norm()));
            for r in [0.4, 1.2, 1.7, 2.6] {
                assert!((p.value(r) - f.value(r)).norm() < 1e-12 * (1.0 + p.value(r).norm()));
            }
        }
    }

    #[test]
    fn agrees_with_entire_closed_form() {
        let pot = PotentialSpec::unit_shell();
        for k in [c(0.5, 0.0), c(1.7, -0.2), c(3.0, 1.0)] {
            let sol = match_coefficients(&pot, ComplexMomentum::new(k)).unwrap();
            let reg = RegularSolution::new(&pot, k);
            assert!((sol.jost() - reg.jost()).norm() < 1e-12 * reg.jost().norm().max(1.0));
            for r in [0.5, 1.5, 3.0] {
                assert!((sol.value(r) - reg.value(r)).norm() < 1e-12 * reg.value(r).norm().max(1.0));
            }
        }
    }

    #[test]
    fn degenerate_inputs_are_typed_errors() {
        let pot = PotentialSpec::unit_shell();
        assert!(matches!(
            match_coefficients(&pot, ComplexMomentum::real(0.0)),
            Err(Error::ThresholdMomentum)
        ));
        // k² = v0 collapses the barrier exponentials onto one function.
        assert!(matches!(
            match_coefficients(&pot, ComplexMomentum::real(1.0)),
            Err(Error::SingularMatching { .. })
        ));
    }
}
