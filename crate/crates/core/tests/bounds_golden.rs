use std::path::PathBuf;

use num_complex::Complex64;
use shell_rhs::bounds::*;
use shell_rhs::scatter::{ls_ket, PotentialSpec, Sign};

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

/// Compares with the frozen file, or rewrites it when SHELL_RHS_BLESS is set.
fn check_golden(name: &str, actual: &str) {
    let path = golden(name);
    if std::env::var_os("SHELL_RHS_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let frozen = std::fs::read_to_string(&path).unwrap();
    assert!(frozen == actual, "{name} differs from the frozen report");
}

fn audit_config() -> AuditConfig {
    serde_json::from_str(&std::fs::read_to_string(golden("bound_audit_config.json")).unwrap()).unwrap()
}

fn growth_config() -> GrowthConfig {
    serde_json::from_str(&std::fs::read_to_string(golden("growth_config.json")).unwrap()).unwrap()
}

fn simpson<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, n: usize) -> Complex64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + h * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * (h / 3.0)
}

#[test]
fn kernel_audit_matches_frozen_report() {
    let rep = audit_config().run().unwrap();
    assert!(rep.bound_respected && rep.c_empirical.is_finite() && rep.c_empirical > 0.0);
    check_golden("bound_audit_report.json", &rep.to_json().unwrap());
}

#[test]
fn kernel_audit_is_internally_consistent() {
    let rep = audit_config().run().unwrap();
    let max = rep.samples.iter().map(|s| s.ratio).fold(0.0, f64::max);
    assert_eq!(max, rep.c_empirical);
    for s in &rep.samples {
        assert!(s.ratio.is_finite());
        assert!(s.actual <= rep.c_empirical * s.bound || s.degenerate);
        if s.r == 0.0 {
            assert!(s.degenerate && s.actual == 0.0 && s.bound == 0.0);
        } else {
            assert_eq!(s.ratio, s.actual / s.bound);
        }
        if s.im_z == 0.0 && s.re_z > 0.0 && s.r > 0.0 {
            let m = s.re_z;
            let algebraic = m.powf(0.25) * s.r / (1.0 + m.sqrt() * s.r);
            assert!((s.bound - algebraic).abs() <= 1e-15 * algebraic);
            let direct = ls_ket(&rep.potential, m, s.r, Sign::Plus).unwrap().norm();
            assert!((s.actual - direct).abs() <= 1e-13 * direct.max(1.0));
        }
    }
}

#[test]
fn kernel_audit_is_deterministic() {
    let a = audit_config().run().unwrap().to_json().unwrap();
    let b = audit_config().run().unwrap().to_json().unwrap();
    assert_eq!(a, b);
}

#[test]
fn pole_proximity_is_skipped_with_annotation() {
    let pot = PotentialSpec::unit_shell();
    let k = Complex64::new(f64::from_bits(0x3ff867a25565b833), f64::from_bits(0xbfdaef4f1f230b13));
    let rep = kernel_bound_audit(&pot, &[k * k, Complex64::new(3.0, -1.0)], &[1.0]).unwrap();
    assert_eq!(rep.skipped.len(), 1);
    assert!(rep.skipped[0].reason.contains("pole"));
    assert_eq!(rep.samples.len(), 1);
}

#[test]
fn growth_profile_matches_frozen_table() {
    let prof = growth_config().run().unwrap();
    assert!(prof.rows.iter().all(|r| r.certified));
    check_golden("growth_profile.json", &prof.to_json().unwrap());
    let mut csv = Vec::new();
    prof.write_csv(&mut csv, &[]).unwrap();
    let again = growth_config().run().unwrap();
    let mut csv2 = Vec::new();
    again.write_csv(&mut csv2, &[]).unwrap();
    assert_eq!(csv, csv2);
}

#[test]
fn growth_profile_agrees_with_independent_quadrature() {
    let cfg = growth_config();
    let prof = cfg.run().unwrap();
    for row in prof.rows.iter().step_by(3) {
        let ket = kernel(&cfg.potential, Complex64::new(row.re_z, row.im_z)).unwrap();
        let oracle = simpson(|r| cfg.profile.value(r) * ket.at(r), 0.0, 3.0, 60_000).norm();
        assert!(
            (row.actual - oracle).abs() <= 1e-8 * oracle,
            "s = {}: {} vs {oracle}",
            row.s,
            row.actual
        );
        assert_eq!(row.ratio, row.actual / row.bound);
        assert_eq!(row.gap, row.bound / row.actual);
    }
}

#[test]
fn direction_rays_and_gaussian_profiles() {
    let pot = PotentialSpec::unit_shell();
    let s = [1.0, 4.0, 16.0, 64.0];
    for ray in [
        Ray::Direction { angle: 0.0 },
        Ray::Direction { angle: -1.0 },
        Ray::NegativeAxis,
    ] {
        let prof = wavefunction_growth_profile(&pot, &Profile::Gaussian { a: 1.0 }, ray, &s).unwrap();
        for row in &prof.rows {
            assert!(
                row.certified && row.actual.is_finite() && row.actual > 0.0,
                "{ray:?} {row:?}"
            );
        }
    }
}
