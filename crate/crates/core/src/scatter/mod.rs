//! Closed-form scattering off a spherical shell barrier.

mod jost;
mod matching;
mod poles;
mod potential;
mod regular;

pub use jost::{continued_ket, jost_function, ls_ket, s_matrix, s_matrix_at, JostData, Ket};
pub use matching::{match_coefficients, match_coefficients_on_branch, KappaBranch, Region, RegionSolution};
pub use poles::{find_poles, newton, GamowPole, KRect, PoleSearch, PoleSearchOptions};
pub use potential::{ComplexMomentum, PotentialSpec, Sheet, Sign};
pub use regular::RegularSolution;

/// 𝒥₋(k) without the k ≠ 0 guard; entire in k.
pub fn jost_entire(pot: &PotentialSpec, k: num_complex::Complex64) -> num_complex::Complex64 {
    regular::jost(pot, k)
}

/// 𝒥₋(k) and d𝒥₋/dk.
pub fn jost_derivative(
    pot: &PotentialSpec,
    k: num_complex::Complex64,
) -> (num_complex::Complex64, num_complex::Complex64) {
    regular::jost_with_derivative(pot, k)
}
