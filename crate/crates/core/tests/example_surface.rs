use std::f64::consts::PI;

use dirac_tori::lattice::fundamental_grid;
use dirac_tori::pipeline::{example_immersion, example_spinor};
use dirac_tori::surface::{periodicity_defect, sample_geometry, willmore_energy};
use dirac_tori::{verify, Tolerances};
use num_complex::Complex64;

#[test]
fn example_passes_verification_on_128_grid() {
    let (spinor, f) = example_immersion().unwrap();
    let report = verify(&f, Some(&spinor), 128, &Tolerances::default());
    println!(
        "period {:e} conformal {:e} pde {:e} half-density {:e} closedness {:e}",
        report.max_period_defect,
        report.max_conformal_defect,
        report.max_pde_residual.unwrap(),
        report.max_half_density_error,
        report.max_closedness_residual.unwrap()
    );
    assert!(report.passed, "{:?}", report.failures);
    assert!(report.max_period_defect <= 1e-9);
    assert!(report.max_conformal_defect <= 1e-8);
    assert!(report.max_pde_residual.unwrap() <= 1e-10);
    assert!(report.degenerate_points.is_empty());
    let spread = (report.half_density_max - report.half_density_min) / 5f64.sqrt();
    assert!(spread <= 1e-6, "{}", spread);
    assert!(report.closing_residuals.unwrap().iter().all(|r| *r < 1e-12));
}

#[test]
fn half_density_equals_mu_pointwise() {
    let (spinor, f) = example_immersion().unwrap();
    let eps = dirac_tori::surface::degeneracy_epsilon(&f, 32);
    for z in fundamental_grid(&f.lattice, 32) {
        let s = sample_geometry(&f, Some(&spinor), z, eps).unwrap();
        assert!((s.half_density - 5f64.sqrt()).abs() < 1e-9 * 5f64.sqrt(), "{:?}", s);
        // |df(∂x)| = |λ|²
        assert!((s.e.sqrt() - s.lambda_norm_sq).abs() < 1e-10 * s.lambda_norm_sq);
    }
}

#[test]
fn willmore_matches_mu_squared_volume() {
    let (_, f) = example_immersion().unwrap();
    let vol = 4.0 * PI * PI;
    let w128 = willmore_energy(&f, 128).unwrap();
    let w256 = willmore_energy(&f, 256).unwrap();
    let expected = 5.0 * vol;
    println!("W(128) = {:.15}, W(256) = {:.15}, mu^2 vol = {:.15}, mu vol = {:.15}", w128, w256, expected, 5f64.sqrt() * vol);
    assert!((w128 - expected).abs() <= 1e-6 * expected);
    assert!((w256 - expected).abs() <= 1e-6 * expected);
    assert!((w128 - w256).abs() <= 1e-9 * expected);
    assert!((w128 - 5f64.sqrt() * vol).abs() > 0.5 * expected);
}

#[test]
fn period_defect_vanishes_for_example() {
    let (_, f) = example_immersion().unwrap();
    assert!(periodicity_defect(&f, 64) < 1e-10);
}

#[test]
fn spinor_is_antiperiodic_or_periodic_on_gamma() {
    let s = example_spinor();
    let g = [Complex64::new(2.0 * PI, 0.0), Complex64::new(0.0, 2.0 * PI)];
    let z = Complex64::new(0.37, 1.21);
    let base = s.quaternion(z);
    for gamma in g {
        let shifted = s.quaternion(z + gamma);
        assert!((shifted - base).norm() < 1e-12 || (shifted + base).norm() < 1e-12);
    }
}

#[test]
fn stored_immersion_checked_against_spinor() {
    use dirac_tori::pipeline::{example_coefficients, example_spectral_set};
    use dirac_tori::surface::verify_against_spinor;
    use dirac_tori::SpinorField;

    let (spinor, f) = example_immersion().unwrap();
    let ok = verify_against_spinor(&f, &spinor, 32, &Tolerances::default());
    assert!(ok.passed, "{:?}", ok.failures);
    assert!(ok.max_spinor_mismatch.unwrap() < 1e-12);

    let mut a = example_coefficients();
    a.set((2, 1), a.get((2, 1)) * 1.5);
    let broken = SpinorField::new(example_spectral_set(), a).unwrap();
    let bad = verify_against_spinor(&f, &broken, 32, &Tolerances::default());
    assert!(!bad.passed);
    assert!(bad.max_period_defect > 1e-3, "{}", bad.max_period_defect);
}
