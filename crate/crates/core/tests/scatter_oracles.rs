//! Independent oracles for the closed-form shell solution.

use num_complex::Complex64;
use proptest::prelude::*;
use shell_rhs::scatter::*;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Propagates (χ, χ') from the wall with 2×2 region propagators and reads
/// off the barrier and outer amplitudes.
struct TransferOracle {
    a_ii: Complex64,
    b_ii: Complex64,
    c_in: Complex64,
    c_out: Complex64,
}

fn propagate(q: Complex64, len: f64, state: (Complex64, Complex64)) -> (Complex64, Complex64) {
    let (u, du) = state;
    let (cs, sn) = ((q * len).cos(), (q * len).sin());
    (u * cs + du * sn / q, -u * q * sn + du * cs)
}

fn transfer_oracle(pot: &PotentialSpec, k: Complex64, kappa: Complex64) -> TransferOracle {
    let at_a = propagate(k, pot.a, (c(0.0, 0.0), k));
    let at_b = propagate(kappa, pot.b - pot.a, at_a);
    let a_ii = 0.5 * (at_a.0 + at_a.1 / (I * kappa)) * (-I * kappa * pot.a).exp();
    let b_ii = 0.5 * (at_a.0 - at_a.1 / (I * kappa)) * (I * kappa * pot.a).exp();
    let c_out = 0.5 * (at_b.0 + at_b.1 / (I * k)) * (-I * k * pot.b).exp();
    let c_in = 0.5 * (at_b.0 - at_b.1 / (I * k)) * (I * k * pot.b).exp();
    TransferOracle {
        a_ii,
        b_ii,
        c_in,
        c_out,
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

#[test]
fn coefficients_match_transfer_matrix_oracle() {
    let pot = PotentialSpec::unit_shell();
    for k in [c(2.0, 0.0), c(0.5, 0.0), c(1.3, -0.7), c(4.0, 0.5)] {
        let sol = match_coefficients(&pot, ComplexMomentum::new(k)).unwrap();
        let oracle = transfer_oracle(&pot, k, sol.kappa);
        assert!(rel(sol.a_ii, oracle.a_ii) < 1e-12, "a_ii at {k}");
        assert!(rel(sol.b_ii, oracle.b_ii) < 1e-12, "b_ii at {k}");
        assert!(rel(sol.c_in, oracle.c_in) < 1e-12, "c_in at {k}");
        assert!(rel(sol.c_out, oracle.c_out) < 1e-12, "c_out at {k}");
    }
}

/// Nyström trapezoid solution of
/// χ(r) = sin kr + ∫₀^r sin(k(r−s))/k V(s) χ(s) ds, then
/// 𝒥 = 1 + (1/k) ∫ e^{iks} V(s) χ(s) ds, Richardson-extrapolated.
fn volterra_jost(pot: &PotentialSpec, k: Complex64, n: usize) -> Complex64 {
    let h = (pot.b - pot.a) / n as f64;
    let nodes: Vec<f64> = (0..=n).map(|i| pot.a + h * i as f64).collect();
    let mut chi = vec![c(0.0, 0.0); n + 1];
    for i in 0..=n {
        let r = nodes[i];
        let mut acc = c(0.0, 0.0);
        for j in 0..i {
            let w = if j == 0 { 0.5 * h } else { h };
            acc += w * (k * (r - nodes[j])).sin() / k * pot.v0 * chi[j];
        }
        chi[i] = (k * r).sin() + acc;
    }
    let mut integral = c(0.0, 0.0);
    for i in 0..=n {
        let w = if i == 0 || i == n { 0.5 * h } else { h };
        integral += w * (I * k * nodes[i]).exp() * pot.v0 * chi[i];
    }
    1.0 + integral / k
}

#[test]
fn jost_matches_volterra_integral_oracle() {
    let pot = PotentialSpec::unit_shell();
    let k = c(1.0, -0.3);
    let coarse = volterra_jost(&pot, k, 1000);
    let fine = volterra_jost(&pot, k, 2000);
    let oracle = (4.0 * fine - coarse) / 3.0;
    let value = jost_function(&pot, ComplexMomentum::new(k)).unwrap().j_minus;
    assert!((value - oracle).norm() < 1e-8, "{value} vs {oracle}");
    let from_matching = match_coefficients(&pot, ComplexMomentum::new(k)).unwrap().jost();
    assert!((from_matching - value).norm() < 1e-12);
}

#[test]
fn jost_reality_symmetry_on_real_axis() {
    let pot = PotentialSpec::unit_shell();
    for i in 1..=200 {
        let k = 0.05 * i as f64;
        let d = jost_function(&pot, ComplexMomentum::real(k)).unwrap();
        assert!((d.j_minus.conj() - d.j_plus).norm() < 1e-12, "k = {k}");
    }
}

#[test]
fn ode_residual_is_second_order() {
    let pot = PotentialSpec::unit_shell();
    for k in [0.5, 1.4, 2.0] {
        let sol = match_coefficients(&pot, ComplexMomentum::real(k)).unwrap();
        let e = k * k;
        let residual = |h: f64| {
            [0.3, 0.7, 1.3, 1.6, 1.85, 2.5, 4.0]
                .iter()
                .map(|&r| {
                    let fd = -(sol.value(r + h) - 2.0 * sol.value(r) + sol.value(r - h)) / (h * h);
                    (fd + (pot.value(r) - e) * sol.value(r)).norm()
                })
                .fold(0.0, f64::max)
        };
        let r1 = residual(1e-3);
        assert!(r1 < 1e-5, "k = {k}: residual {r1}");
        let ratio = residual(1e-2) / residual(5e-3);
        assert!((3.5..4.5).contains(&ratio), "k = {k}: ratio {ratio}");
    }
}

fn scan_minima(pot: &PotentialSpec, rect: KRect, step: f64) -> Vec<Complex64> {
    let nx = ((rect.re_max - rect.re_min) / step).round() as usize;
    let ny = ((rect.im_max - rect.im_min) / step).round() as usize;
    let at = |i: usize, j: usize| c(rect.re_min + step * i as f64, rect.im_min + step * j as f64);
    let grid: Vec<Vec<f64>> = (0..=nx)
        .map(|i| (0..=ny).map(|j| jost_entire(pot, at(i, j)).norm()).collect())
        .collect();
    let mut roots: Vec<Complex64> = Vec::new();
    for i in 1..nx {
        for j in 1..ny {
            let v = grid[i][j];
            let is_min = (-1i64..=1).all(|di| {
                (-1i64..=1)
                    .all(|dj| (di == 0 && dj == 0) || grid[(i as i64 + di) as usize][(j as i64 + dj) as usize] > v)
            });
            if !is_min {
                continue;
            }
            // Secant refinement; uses no derivative information.
            let mut x0 = at(i, j);
            let mut x1 = x0 + c(step * 0.5, 0.0);
            let (mut f0, mut f1) = (jost_entire(pot, x0), jost_entire(pot, x1));
            for _ in 0..100 {
                if f1 == f0 {
                    break;
                }
                let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
                x0 = x1;
                f0 = f1;
                x1 = x2;
                f1 = jost_entire(pot, x1);
                if f1.norm() < 1e-13 {
                    break;
                }
            }
            let inside = x1.re > rect.re_min && x1.re < rect.re_max && x1.im > rect.im_min && x1.im < rect.im_max;
            if f1.norm() < 1e-10 && inside && !roots.iter().any(|r| (r - x1).norm() < 1e-6) {
                roots.push(x1);
            }
        }
    }
    roots
}

fn dense_winding(pot: &PotentialSpec, rect: KRect, per_edge: usize) -> f64 {
    let corners = [
        c(rect.re_min, rect.im_min),
        c(rect.re_max, rect.im_min),
        c(rect.re_max, rect.im_max),
        c(rect.re_min, rect.im_max),
    ];
    let mut total = 0.0;
    for e in 0..4 {
        let (p, q) = (corners[e], corners[(e + 1) % 4]);
        let mut prev = jost_entire(pot, p);
        for s in 1..=per_edge {
            let cur = jost_entire(pot, p + (q - p) * (s as f64 / per_edge as f64));
            total += (cur / prev).arg();
            prev = cur;
        }
    }
    total / (2.0 * std::f64::consts::PI)
}

/// Frozen from the certified run on [0,4]×[−1,0] (default options).
const GOLDEN_POLES: [(u64, u64); 2] = [
    (0x3ff867a25565b833, 0xbfdaef4f1f230b13),
    (0x4008a2be058e7b3e, 0xbfedbfd116dbe3c5),
];

#[test]
fn pole_search_matches_scan_and_winding_oracles() {
    let pot = PotentialSpec::unit_shell();
    let rect = KRect::new(0.0, 4.0, -1.0, 0.0);
    let res = find_poles(&pot, rect, &PoleSearchOptions::default()).unwrap();

    let scanned = scan_minima(&pot, rect, 0.01);
    let winding = dense_winding(&pot, rect, 20_000);
    assert!((winding - winding.round()).abs() < 1e-6);
    assert_eq!(res.winding, winding.round() as i64);
    assert_eq!(res.poles.len(), scanned.len());
    assert_eq!(res.poles.len() as i64, res.winding);

    for (pole, &(re, im)) in res.poles.iter().zip(GOLDEN_POLES.iter()) {
        assert_eq!(pole.k_pole.k.re.to_bits(), re);
        assert_eq!(pole.k_pole.k.im.to_bits(), im);
        assert!(pole.residual < 1e-10);
        assert!(pole.gamma > 0.0);
        assert!(scanned.iter().any(|s| (s - pole.k_pole.k).norm() < 1e-9));
        // Mirror zero of a real potential.
        assert!(jost_entire(&pot, pole.companion()).norm() < 1e-10);
        // Pole of S next to the Jost zero.
        let near = ComplexMomentum::new(pole.k_pole.k + c(1e-8, 0.0));
        assert!(s_matrix_at(&pot, near).unwrap().norm() > 1e6);
    }
}

#[test]
fn s_matrix_phase_winds_across_a_narrow_resonance() {
    // A tall barrier isolates a narrow resonance; the pole factor
    // (E − z̄_R)/(E − z_R) advances by 4·atan(10) over E_R ± 5Γ.
    let pot = PotentialSpec::new(1.0, 2.0, 25.0).unwrap();
    let res = find_poles(&pot, KRect::new(0.5, 4.0, -1.0, 0.0), &PoleSearchOptions::default()).unwrap();
    let pole = res
        .poles
        .iter()
        .min_by(|a, b| a.gamma.total_cmp(&b.gamma))
        .copied()
        .unwrap();
    assert!(pole.e_r - 5.0 * pole.gamma > 0.0);
    let n = 4000;
    let mut phase = 0.0;
    let mut prev: Option<Complex64> = None;
    for i in 0..=n {
        let e = pole.e_r - 5.0 * pole.gamma + 10.0 * pole.gamma * i as f64 / n as f64;
        let s = s_matrix(&pot, c(e, 0.0), Sheet::First).unwrap();
        if let Some(p) = prev {
            phase += (s / p).arg();
        }
        prev = Some(s);
    }
    let expected = 4.0 * 10f64.atan();
    assert!((phase - expected).abs() < 0.1, "phase advance {phase}");
}

#[test]
fn free_limit_is_exact() {
    let pot = PotentialSpec::free(1.0, 2.0);
    for i in 1..100 {
        let e = 0.1 * i as f64;
        let s = s_matrix(&pot, c(e, 0.0), Sheet::First).unwrap();
        assert!((s - 1.0).norm() < 1e-12);
    }
}

proptest! {
    #[test]
    fn s_matrix_is_unimodular(e in 1e-2f64..1e2) {
        let pot = PotentialSpec::unit_shell();
        let s = s_matrix(&pot, c(e, 0.0), Sheet::First).unwrap();
        prop_assert!((s.norm() - 1.0).abs() < 1e-10);
        let k = e.sqrt();
        let s_minus = s_matrix_at(&pot, ComplexMomentum::real(-k)).unwrap();
        prop_assert!((s * s_minus - 1.0).norm() < 1e-10);
    }

    #[test]
    fn matching_is_continuous_for_complex_k(re in -10f64..10.0, im in -10f64..10.0) {
        prop_assume!(re.hypot(im) <= 10.0 && re.hypot(im) > 1e-3);
        let pot = PotentialSpec::unit_shell();
        let sol = match_coefficients(&pot, ComplexMomentum::new(c(re, im))).unwrap();
        prop_assert!(sol.continuity_defect() < 1e-12, "defect {}", sol.continuity_defect());
    }
}
