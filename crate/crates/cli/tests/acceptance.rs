//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use dirac_tori::closing::nontrivial_solution_space_dim;
use dirac_tori::lattice::{enumerate_disk, fundamental_grid};
use dirac_tori::pipeline::{example_coefficients, example_immersion, example_spectral_set};
use dirac_tori::spectral::DEFAULT_TOL;
use dirac_tori::surface::willmore_energy;
use dirac_tori::{
    classify, classify_rectangular, closing_residuals, construct_coefficients, min_torus_eigenvalue, spectral_set, spectrum_search, verify,
    DualBasis, Eigenvalue, ExactLatticeBasis, PickPolicy, QuadScalar, Quaternion, SpectralSet, SpinStructure, Tolerances, VerdictKind,
};
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GRID: usize = 128;
const PERIOD_TOL: f64 = 1e-9;
const CONFORMAL_TOL: f64 = 1e-8;
const PDE_TOL: f64 = 1e-10;
const RUNTIME_LIMIT: Duration = Duration::from_secs(5);
const CLOSING_TOL: f64 = 1e-12;
const HALF_DENSITY_SPREAD_TOL: f64 = 1e-6;
const WILLMORE_REL_TOL: f64 = 1e-6;
const FD_STEP: f64 = 1e-5;
const FD_TOL: f64 = 1e-7;
const SPECTRAL_AGREEMENT_TOL: f64 = 1e-12;
const ROUND_TRIP_TOL: f64 = 1e-12;
const TRIVIALITY_SAMPLES: usize = 400;

fn outcome(id: u8, name: &str, ok: bool, detail: String) {
    println!("acceptance {} [{}]: {} ({})", id, name, if ok { "PASS" } else { "FAIL" }, detail);
    assert!(ok, "criterion {} failed: {}", id, detail);
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn criterion_1_example_reproduction() {
    let start = Instant::now();
    let (spinor, f) = example_immersion().unwrap();
    let report = verify(&f, Some(&spinor), GRID, &Tolerances::default());
    let elapsed = start.elapsed();
    let pde = report.max_pde_residual.unwrap_or(f64::INFINITY);
    let ok = report.max_period_defect <= PERIOD_TOL
        && report.max_conformal_defect <= CONFORMAL_TOL
        && pde <= PDE_TOL
        && report.degenerate_points.is_empty()
        && elapsed <= RUNTIME_LIMIT;
    outcome(
        1,
        "square lattice, mu = sqrt5",
        ok,
        format!(
            "period {:.2e} <= {:.0e}, conformal {:.2e} <= {:.0e}, pde {:.2e} <= {:.0e}, {} grid in {:.2?}",
            report.max_period_defect, PERIOD_TOL, report.max_conformal_defect, CONFORMAL_TOL, pde, PDE_TOL, GRID, elapsed
        ),
    );
}

#[test]
fn criterion_2_spectral_set() {
    let set = example_spectral_set();
    let mut got: Vec<(i64, i64)> = set.elements().iter().map(|p| p.coords).collect();
    got.sort();
    let mut expected = vec![(2, 1), (2, -1), (-2, 1), (-2, -1), (1, 2), (1, -2), (-1, 2), (-1, -2)];
    expected.sort();
    let square = DualBasis::new(c(1.0, 0.0), c(0.0, 1.0)).unwrap();
    let rows = spectrum_search(set.dual(), SpinStructure::TRIVIAL, 3.0, 6).unwrap();
    let first = rows.first().cloned();
    let smallest_is_sqrt5 = first
        .as_ref()
        .map(|r| r.mu_sq_exact == Some(BigRational::from_integer(5.into())) && r.cardinality == 8)
        .unwrap_or(false);
    let below = min_torus_eigenvalue(&square, SpinStructure::TRIVIAL, 2.2).unwrap();
    let ok = got == expected && smallest_is_sqrt5 && below.is_none();
    outcome(
        2,
        "spectral set",
        ok,
        format!("Γ' = {:?}; smallest mu with #Γ' >= 6: {:?}; none below 2.2: {}", got, first.map(|r| (r.mu, r.cardinality)), below.is_none()),
    );
}

type Gauss = (i64, i64);

fn gmul(a: Gauss, b: Gauss) -> Gauss {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn gsum(v: &[Gauss]) -> Gauss {
    v.iter().fold((0, 0), |acc, x| (acc.0 + x.0, acc.1 + x.1))
}

#[test]
fn criterion_3_closing_conditions() {
    let set = example_spectral_set();
    let r = closing_residuals(&set, &example_coefficients()).unwrap();

    // exact Gaussian-integer evaluation: r2 = 2i·Σa², r3 = 2i·Σa²·conj(ν)²
    let squares: [Gauss; 3] = [(0, 3), (-4, -3), (4, 0)];
    let weights: [Gauss; 3] = [(3, -4), (3, 4), (-3, 4)];
    let two_i = (0, 2);
    let r2_exact = gmul(two_i, gsum(&squares));
    let products: Vec<Gauss> = squares.iter().zip(weights.iter()).map(|(a, w)| gmul(*a, *w)).collect();
    let r3_exact = gmul(two_i, gsum(&products));
    let hand_ok = products == vec![(12, 9), (0, -25), (-12, 16)] && r2_exact == (0, 0) && r3_exact == (0, 0);

    let seed = c(1.0, 0.0) / c(0.0, 2.0);
    let a = construct_coefficients(&set, [(2, 1), (2, -1), (1, -2)], seed, PickPolicy::default()).unwrap();
    let sq_err = [((2, 1), c(0.0, 3.0)), ((2, -1), c(-4.0, -3.0)), ((1, -2), c(4.0, 0.0))]
        .iter()
        .map(|&(k, s)| (a.get(k) * a.get(k) - s).norm())
        .fold(0.0, f64::max);
    let ok = r.max_norm() <= CLOSING_TOL && hand_ok && sq_err <= CLOSING_TOL;
    outcome(
        3,
        "closing conditions",
        ok,
        format!(
            "residuals {:.2e} {:.2e} {:.2e}; exact r2 = {:?}, r3 = {:?}; recipe squares error {:.2e}",
            r.r1.norm(),
            r.r2.norm(),
            r.r3.norm(),
            r2_exact,
            r3_exact,
            sq_err
        ),
    );
}

#[test]
fn criterion_4_half_density_constancy() {
    let (spinor, f) = example_immersion().unwrap();
    let report = verify(&f, Some(&spinor), GRID, &Tolerances::default());
    let mu = 5f64.sqrt();
    let spread = (report.half_density_max - report.half_density_min) / mu;
    let ok = spread <= HALF_DENSITY_SPREAD_TOL && report.max_half_density_error <= HALF_DENSITY_SPREAD_TOL && report.degenerate_points.is_empty();
    outcome(
        4,
        "half-density |H|·sqrt(E) = sqrt5",
        ok,
        format!(
            "range [{:.15}, {:.15}], relative spread {:.2e} <= {:.0e}",
            report.half_density_min, report.half_density_max, spread, HALF_DENSITY_SPREAD_TOL
        ),
    );
}

#[test]
fn criterion_5_willmore_energy() {
    let (spinor, f) = example_immersion().unwrap();
    let w = willmore_energy(&f, GRID).unwrap();
    let report = verify(&f, Some(&spinor), GRID, &Tolerances::default());
    let vol = f.lattice.covolume();
    let half_density = 0.5 * (report.half_density_min + report.half_density_max);
    let from_density = half_density * half_density * vol;
    let mu_vol = 5f64.sqrt() * vol;
    let mu2_vol = 5.0 * vol;
    // the quadrature decides which candidate is consistent
    let consistent = if (w - mu2_vol).abs() < (w - mu_vol).abs() { mu2_vol } else { mu_vol };
    let ok = (w - from_density).abs() <= WILLMORE_REL_TOL * from_density
        && consistent == mu2_vol
        && (w - consistent).abs() <= WILLMORE_REL_TOL * consistent
        && (vol - 4.0 * PI * PI).abs() < 1e-12
        && (report.willmore_mu_vol - mu_vol).abs() <= 1e-14 * mu_vol
        && (report.willmore_mu2_vol - mu2_vol).abs() <= 1e-14 * mu2_vol
        && report.willmore_numeric.map(|x| (x - w).abs() <= 1e-12 * w) == Some(true)
        && !report.willmore_note.is_empty();
    outcome(
        5,
        "Willmore energy",
        ok,
        format!(
            "quadrature {:.9}, (H|df|)²·vol {:.9}, mu²·vol {:.9}, mu·vol {:.9}; consistent candidate mu²·vol",
            w, from_density, mu2_vol, mu_vol
        ),
    );
}

/// Closed solutions on a set with at most two involution orbits.
fn admits_nonzero_solution(set: &SpectralSet) -> bool {
    let mut orbits = Vec::new();
    for p in set.elements() {
        let partner = set.partner_coords(p.coords);
        if p.coords <= partner {
            orbits.push((p.coords, partner));
        }
    }
    let w: Vec<Complex64> = orbits
        .iter()
        .map(|(a, _)| {
            let nu = set.shifted(*a).conj();
            nu * nu
        })
        .collect();
    // Σx = 0, Σx·w = 0 in the orbit products x
    match w.len() {
        0 | 1 => {}
        2 if (w[1] - w[0]).norm() > 1e-9 * w[0].norm() => {}
        _ => return true,
    }
    // each orbit keeps at most one nonzero coefficient; Σ|a|²ν = 0 then
    // needs two survivors pointing in opposite directions
    if orbits.len() < 2 {
        return false;
    }
    let (a, b) = (orbits[0], orbits[1]);
    for u in [a.0, a.1].map(|k| set.shifted(k)) {
        for v in [b.0, b.1].map(|k| set.shifted(k)) {
            let cross = u.re * v.im - u.im * v.re;
            if cross.abs() < 1e-9 * u.norm() * v.norm() && u.re * v.re + u.im * v.im < 0.0 {
                return true;
            }
        }
    }
    false
}

#[test]
fn criterion_6_triviality_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut tested = [0usize; 2];
    let mut failures = 0usize;
    let mut attempts = 0usize;
    while tested[0] + tested[1] < TRIVIALITY_SAMPLES && attempts < 100 * TRIVIALITY_SAMPLES {
        attempts += 1;
        let tau = if rng.gen_bool(0.3) {
            c([0.0, 0.5][rng.gen_range(0..2)], [1.0, 0.75f64.sqrt(), 2.0][rng.gen_range(0..3)])
        } else {
            c(rng.gen_range(-0.5..0.5), rng.gen_range(0.7..2.0))
        };
        let dual = DualBasis::new(c(1.0, 0.0), tau).unwrap();
        let spin = SpinStructure::from_twice(rng.gen_range(0..2), rng.gen_range(0..2)).unwrap();
        let omega0 = spin.omega0(&dual);
        let pts = enumerate_disk(&dual, -omega0, 3.0);
        let p = pts[rng.gen_range(0..pts.len())];
        let mu = (p.value + omega0).norm();
        if mu < 1e-6 {
            continue;
        }
        let set = spectral_set(&dual, spin, &Eigenvalue::from_f64(mu), DEFAULT_TOL).unwrap();
        let slot = match set.len() {
            2 => 0,
            4 => 1,
            _ => continue,
        };
        tested[slot] += 1;
        let a: dirac_tori::CoefficientVector =
            set.elements().iter().map(|p| (p.coords, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))).collect();
        let mag: f64 = a.iter().map(|(_, v)| v.norm_sqr()).sum();
        let residual = closing_residuals(&set, &a).unwrap().max_norm();
        if admits_nonzero_solution(&set) || nontrivial_solution_space_dim(&set) != 0 || residual <= 1e-9 * mag {
            failures += 1;
        }
    }
    let ok = failures == 0 && tested[0] > 0 && tested[1] > 0;
    outcome(
        6,
        "triviality for #Γ' in {2, 4}",
        ok,
        format!("{} sets with #Γ' = 2, {} with #Γ' = 4, {} admitting a nonzero solution", tested[0], tested[1], failures),
    );
}

#[test]
fn criterion_7_classification() {
    let yes = ["1", "2", "3", "5", "1/2", "4/9"];
    let no = ["sqrt(2)", "sqrt(3)", "1+sqrt(2)"];
    let mut problems = Vec::new();
    for s in yes {
        let t2: QuadScalar = s.parse().unwrap();
        let v = classify_rectangular(&t2).unwrap();
        let r = t2.as_rational().unwrap().clone();
        let p = BigRational::from_integer(r.numer().clone());
        let q = BigRational::from_integer(r.denom().clone());
        let four = BigRational::from_integer(4.into());
        let identity = (&p - &q) * (&p - &q) + &four * &q * &q * &r == (&p + &q) * (&p + &q);
        let six_ok = v.six_vectors.as_ref().map(|six| six.iter().all(|x| x.norm_sqr() == six[0].norm_sqr()) && six.len() == 6);
        if !(v.exists() && identity && six_ok == Some(true) && v.witness.as_ref().map(|w| w.verify()) == Some(true)) {
            problems.push(format!("tau^2 = {}", s));
        }
    }
    for s in no {
        let v = classify_rectangular(&s.parse().unwrap()).unwrap();
        if v.kind != VerdictKind::NoRectangularCase {
            problems.push(format!("tau^2 = {} not NO", s));
        }
    }
    let hex = ExactLatticeBasis::new("1,0".parse().unwrap(), "1/2,1/2*sqrt(3)".parse().unwrap()).unwrap();
    let v = classify(&hex, 2).unwrap();
    let b = v.witness.as_ref().map(|w| w.b.clone());
    if b != Some(BigRational::new(1.into(), 3.into())) || !v.witness.as_ref().map(|w| w.verify()).unwrap_or(false) {
        problems.push(format!("hexagonal ratio {:?}", b));
    }
    outcome(
        7,
        "classification",
        problems.is_empty(),
        format!("YES on {:?}, NO on {:?}, hexagonal b = {}; problems: {:?}", yes, no, b.map(|x| x.to_string()).unwrap_or_default(), problems),
    );
}

fn sub(a: [f64; 3], b: [f64; 3], s: f64) -> [f64; 3] {
    [(a[0] - b[0]) * s, (a[1] - b[1]) * s, (a[2] - b[2]) * s]
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

#[test]
fn criterion_8_numerical_self_consistency() {
    let (spinor, f) = example_immersion().unwrap();
    let h = FD_STEP;
    let (dx, dy) = (c(h, 0.0), c(0.0, h));
    let mut fd: f64 = 0.0;
    for z in fundamental_grid(&f.lattice, 24) {
        let jet = f.jet(z);
        fd = fd
            .max(dist(jet.f_x, sub(f.position(z + dx), f.position(z - dx), 0.5 / h)))
            .max(dist(jet.f_y, sub(f.position(z + dy), f.position(z - dy), 0.5 / h)))
            .max(dist(jet.f_xx, sub(f.jet(z + dx).f_x, f.jet(z - dx).f_x, 0.5 / h)))
            .max(dist(jet.f_xy, sub(f.jet(z + dy).f_x, f.jet(z - dy).f_x, 0.5 / h)))
            .max(dist(jet.f_yy, sub(f.jet(z + dy).f_y, f.jet(z - dy).f_y, 0.5 / h)));
    }

    let form = spinor.differential_modes();
    let mut agree: f64 = 0.0;
    for z in fundamental_grid(&f.lattice, 16) {
        for x in [c(1.0, 0.0), c(0.0, 1.0), c(0.6, -0.8)] {
            let lam = spinor.quaternion(z);
            let sandwich = lam.conj() * Quaternion::j_times(x.conj()) * lam;
            agree = agree.max((form.eval(z, x) - spinor.differential_at(z, x)).norm()).max((form.eval(z, x) - sandwich).norm());
        }
    }

    let back = f.differential().unwrap();
    let again = dirac_tori::integrate(&back, &f.lattice, f.mu, false).unwrap();
    let mut round: f64 = 0.0;
    for (k, m) in &form.modes {
        let n = back.modes.get(k).copied().unwrap_or_default();
        round = round.max([m.p - n.p, m.q - n.q, m.r - n.r, m.s - n.s].iter().map(|d| d.norm()).fold(0.0, f64::max));
    }
    for z in fundamental_grid(&f.lattice, 16) {
        round = round.max((again.eval(z) - f.eval(z)).norm());
    }
    let ok = fd <= FD_TOL && agree <= SPECTRAL_AGREEMENT_TOL && round <= ROUND_TRIP_TOL;
    outcome(
        8,
        "numerical self-consistency",
        ok,
        format!(
            "finite differences {:.2e} <= {:.0e}, Fourier vs pointwise {:.2e} <= {:.0e}, round trip {:.2e} <= {:.0e}",
            fd, FD_TOL, agree, SPECTRAL_AGREEMENT_TOL, round, ROUND_TRIP_TOL
        ),
    );
}

fn synth_into(dir: &Path) -> bool {
    Command::new(env!("CARGO_BIN_EXE_dirac-tori"))
        .args(["synth", "--example-paper", "--out-dir"])
        .arg(dir)
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

#[test]
fn criterion_9_determinism() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ran = synth_into(a.path()) && synth_into(b.path());
    let mut identical = Vec::new();
    for name in ["torus.obj", "torus.json", "report.json"] {
        let x = std::fs::read(a.path().join(name)).unwrap_or_default();
        let y = std::fs::read(b.path().join(name)).unwrap_or_default();
        identical.push((name, !x.is_empty() && x == y));
    }
    let ok = ran && identical.iter().all(|(_, same)| *same);
    outcome(9, "determinism", ok, format!("both runs succeeded: {}; byte-identical: {:?}", ran, identical));
}
