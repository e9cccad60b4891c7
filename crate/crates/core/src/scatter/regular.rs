//! Branch-free closed form of the regular solution and the Jost function.
//!
//! Everything is written through the entire functions `C(u) = cos √u`,
//! `S(u) = sin √u / √u` and `S'(u)`, so no square root of k² − v0 is ever
//! taken and the expressions stay analytic through k = 0 and k² = v0.

use num_complex::Complex64;

use super::potential::PotentialSpec;

const I: Complex64 = Complex64::new(0.0, 1.0);
const SERIES_RADIUS: f64 = 1.0;
const SERIES_TERMS: usize = 16;

/// cos √u
pub(crate) fn cos_sqrt(u: Complex64) -> Complex64 {
    if u.norm() < SERIES_RADIUS {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for n in 1..SERIES_TERMS {
            term *= -u / ((2 * n - 1) as f64 * (2 * n) as f64);
            sum += term;
        }
        sum
    } else {
        u.sqrt().cos()
    }
}

/// sin √u / √u
pub(crate) fn sinc_sqrt(u: Complex64) -> Complex64 {
    if u.norm() < SERIES_RADIUS {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for n in 1..SERIES_TERMS {
            term *= -u / ((2 * n) as f64 * (2 * n + 1) as f64);
            sum += term;
        }
        sum
    } else {
        let s = u.sqrt();
        s.sin() / s
    }
}

/// d/du [sin √u / √u]
pub(crate) fn sinc_sqrt_prime(u: Complex64) -> Complex64 {
    if u.norm() < SERIES_RADIUS {
        // sum_{n>=1} (-1)^n n u^{n-1} / (2n+1)!
        let mut coeff = Complex64::new(-1.0 / 6.0, 0.0);
        let mut sum = coeff;
        for n in 2..SERIES_TERMS {
            coeff *= -u / ((2 * n) as f64 * (2 * n + 1) as f64);
            sum += coeff * (n as f64);
        }
        sum
    } else {
        (cos_sqrt(u) - sinc_sqrt(u)) / (2.0 * u)
    }
}

/// Region-I and barrier quantities shared by value and derivative.
struct ShellTerms {
    ca: Complex64,
    sa: Complex64,
    cd: Complex64,
    sd: Complex64,
    w: Complex64,
}

impl ShellTerms {
    fn new(pot: &PotentialSpec, k: Complex64) -> Self {
        let d = pot.width();
        let w = k * k - pot.v0;
        let ua = k * k * (pot.a * pot.a);
        let ud = w * (d * d);
        Self {
            ca: cos_sqrt(ua),
            sa: sinc_sqrt(ua),
            cd: cos_sqrt(ud),
            sd: sinc_sqrt(ud),
            w,
        }
    }

    /// P = u'(b)/k and Q = u(b)/k for the regular solution with sin(kr)
    /// in region I.
    fn pq(&self, pot: &PotentialSpec) -> (Complex64, Complex64) {
        let (a, d) = (pot.a, pot.width());
        let p = self.ca * self.cd - self.w * (a * d) * self.sa * self.sd;
        let q = self.sa * self.cd * a + self.ca * self.sd * d;
        (p, q)
    }
}

/// Jost function: normalized coefficient of e^{-ikr} beyond the shell,
/// equal to 1 for the free problem. Entire in k.
pub(crate) fn jost(pot: &PotentialSpec, k: Complex64) -> Complex64 {
    if k.im < DEEP_LOWER {
        return jost_exponential(pot, k);
    }
    let t = ShellTerms::new(pot, k);
    let (p, q) = t.pq(pot);
    (I * k * pot.b).exp() * (p - I * k * q)
}

/// Below this Im k the entire form loses digits: e^{ikb} grows like
/// e^{|Im k| b} while P − ikQ shrinks by the same factor.
const DEEP_LOWER: f64 = -1.0;

/// 𝒥₋ through the barrier wave number κ, taken on the branch nearest k.
/// Every term carrying the barrier is a product with κ − k = −v0/(k + κ),
/// so the free value 1 is reproduced exactly. Valid away from k = 0 and
/// κ = 0, which the caller guarantees by staying below [`DEEP_LOWER`].
fn jost_exponential(pot: &PotentialSpec, k: Complex64) -> Complex64 {
    let (a, d) = (pot.a, pot.width());
    let mut kappa = (k * k - pot.v0).sqrt();
    if (kappa - k).norm() > (kappa + k).norm() {
        kappa = -kappa;
    }
    let diff = -pot.v0 / (k + kappa);
    let delta = -diff / kappa;
    let ea = (I * k * a).exp();
    let ca = (k * a).cos();
    let incoming = (k + kappa) / (2.0 * k) * (-I * diff * d).exp() * (1.0 + delta * ea * ca);
    let outgoing = diff / (2.0 * k) * (I * (k + kappa) * d).exp() * ea * (ea + delta * ca);
    incoming + outgoing
}

/// Sum of the moduli of the terms making up 𝒥₋(k); a Jost value far below
/// this is a zero up to rounding.
pub(crate) fn jost_scale(pot: &PotentialSpec, k: Complex64) -> f64 {
    let t = ShellTerms::new(pot, k);
    let (a, d) = (pot.a, pot.width());
    let p = (t.ca * t.cd).norm() + (t.w * (a * d) * t.sa * t.sd).norm();
    let q = (t.sa * t.cd).norm() * a + (t.ca * t.sd).norm() * d;
    (I * k * pot.b).exp().norm() * (p + k.norm() * q)
}

/// Jost function together with its k-derivative.
pub(crate) fn jost_with_derivative(pot: &PotentialSpec, k: Complex64) -> (Complex64, Complex64) {
    let (a, b, d) = (pot.a, pot.b, pot.width());
    let t = ShellTerms::new(pot, k);
    let ua = k * k * (a * a);
    let ud = t.w * (d * d);

    let dca = -t.sa * k * (a * a);
    let dsa = sinc_sqrt_prime(ua) * k * (2.0 * a * a);
    let dcd = -t.sd * k * (d * d);
    let dsd = sinc_sqrt_prime(ud) * k * (2.0 * d * d);

    let (p, q) = t.pq(pot);
    let dp = dca * t.cd + t.ca * dcd - k * (2.0 * a * d) * t.sa * t.sd - t.w * (a * d) * (dsa * t.sd + t.sa * dsd);
    let dq = (dsa * t.cd + t.sa * dcd) * a + (dca * t.sd + t.ca * dsd) * d;

    let g = p - I * k * q;
    let dg = dp - I * q - I * k * dq;
    let phase = (I * k * b).exp();
    (phase * g, phase * (I * b * g + dg))
}

/// Regular solution χ(r, k) with χ = sin(kr) for r <= a, written in a form
/// that is analytic in k everywhere.
#[derive(Clone, Copy, Debug)]
pub struct RegularSolution {
    pot: PotentialSpec,
    k: Complex64,
    sin_ka: Complex64,
    cos_ka: Complex64,
    jost_k: Complex64,
    jost_minus_k: Complex64,
}

impl RegularSolution {
    pub fn new(pot: &PotentialSpec, k: Complex64) -> Self {
        let ua = k * k * (pot.a * pot.a);
        Self {
            pot: *pot,
            k,
            sin_ka: k * pot.a * sinc_sqrt(ua),
            cos_ka: cos_sqrt(ua),
            jost_k: jost(pot, k),
            jost_minus_k: jost(pot, -k),
        }
    }

    pub fn k(&self) -> Complex64 {
        self.k
    }

    /// 𝒥₋(k)
    pub fn jost(&self) -> Complex64 {
        self.jost_k
    }

    /// 𝒥₋(−k)
    pub fn jost_reflected(&self) -> Complex64 {
        self.jost_minus_k
    }

    /// Coefficients (c_in, c_out) of e^{-ikr} and e^{+ikr} beyond the shell.
    pub fn outer_coefficients(&self) -> (Complex64, Complex64) {
        (0.5 * I * self.jost_k, -0.5 * I * self.jost_minus_k)
    }

    pub fn value(&self, r: f64) -> Complex64 {
        self.value_and_derivative(r).0
    }

    pub fn value_and_derivative(&self, r: f64) -> (Complex64, Complex64) {
        let k = self.k;
        let pot = &self.pot;
        if r <= pot.a {
            let kr = k * r;
            (kr.sin(), k * kr.cos())
        } else if r <= pot.b {
            let rho = r - pot.a;
            let w = k * k - pot.v0;
            let u = w * (rho * rho);
            let c = cos_sqrt(u);
            let s = sinc_sqrt(u);
            let val = self.sin_ka * c + k * self.cos_ka * s * rho;
            let der = -self.sin_ka * w * s * rho + k * self.cos_ka * c;
            (val, der)
        } else {
            let e_in = (-I * k * r).exp();
            let e_out = (I * k * r).exp();
            let val = 0.5 * I * (self.jost_k * e_in - self.jost_minus_k * e_out);
            let der = 0.5 * k * (self.jost_k * e_in + self.jost_minus_k * e_out);
            (val, der)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn entire_helpers_agree_across_series_boundary() {
        for u in [c(0.99, 0.0), c(1.01, 0.0), c(0.0, 0.999), c(-0.7, 0.7), c(0.3, -0.95)] {
            let s = u.sqrt();
            assert!((cos_sqrt(u) - s.cos()).norm() < 1e-14);
            assert!((sinc_sqrt(u) - s.sin() / s).norm() < 1e-14);
            let closed = (s.cos() - s.sin() / s) / (2.0 * u);
            assert!((sinc_sqrt_prime(u) - closed).norm() < 1e-12, "{u}");
        }
    }

    #[test]
    fn free_jost_is_identically_one() {
        let pot = PotentialSpec::free(1.0, 2.0);
        for k in [c(0.0, 0.0), c(0.3, 0.0), c(2.0, -1.0), c(-5.0, 3.0)] {
            assert!((jost(&pot, k) - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn free_jost_is_exact_deep_in_the_lower_half_plane() {
        let pot = PotentialSpec::free(1.0, 2.0);
        for k in [c(0.0, -1.5), c(3.0, -10.0), c(-9.0, -4.0), c(0.1, -20.0)] {
            assert!((jost(&pot, k) - 1.0).norm() < 1e-15, "{k}");
        }
    }

    #[test]
    fn exponential_form_agrees_with_entire_form() {
        for v0 in [1e-3, 1.0, 25.0] {
            let pot = PotentialSpec::new(1.0, 2.0, v0).unwrap();
            for k in [c(1.3, -0.9), c(4.0, -0.5), c(-3.0, -1.2), c(0.4, -2.0), c(6.0, 1.0)] {
                let t = ShellTerms::new(&pot, k);
                let (p, q) = t.pq(&pot);
                let entire = (I * k * pot.b).exp() * (p - I * k * q);
                let expo = jost_exponential(&pot, k);
                assert!((entire - expo).norm() < 1e-12 * (1.0 + entire.norm()), "v0 {v0}, k {k}");
            }
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let pot = PotentialSpec::unit_shell();
        for k in [c(0.2, -0.1), c(1.0, 0.0), c(1.5, -0.4), c(3.0, -0.9), c(0.0, 0.0)] {
            let (_, dj) = jost_with_derivative(&pot, k);
            let h = 1e-5;
            let fd = (jost(&pot, k + h) - jost(&pot, k - h)) / (2.0 * h);
            assert!((dj - fd).norm() < 1e-8 * (1.0 + dj.norm()), "{k}: {dj} vs {fd}");
        }
    }

    #[test]
    fn regular_solution_is_continuous_at_both_edges() {
        let pot = PotentialSpec::unit_shell();
        let sol = RegularSolution::new(&pot, c(0.7, -0.3));
        for edge in [pot.a, pot.b] {
            let (v0, d0) = sol.value_and_derivative(edge - 1e-12);
            let (v1, d1) = sol.value_and_derivative(edge + 1e-12);
            assert!((v0 - v1).norm() < 1e-10);
            assert!((d0 - d1).norm() < 1e-10);
        }
    }
}
