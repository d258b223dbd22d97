//! Differential geometry of synthesized immersions, Willmore energy,
//! verification reports and OBJ export.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closing::closing_residuals;
use crate::error::{Error, Result};
use crate::lattice::fundamental_grid;
use crate::spinor::{check_closedness, integrate, SpinorField, SurfaceImmersion};

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Pointwise geometry of an immersion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometrySample {
    pub z: [f64; 2],
    pub position: [f64; 3],
    pub f_x: [f64; 3],
    pub f_y: [f64; 3],
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "G")]
    pub g: f64,
    /// Mean curvature `H` for the normal `f_x × f_y / |f_x × f_y|`.
    #[serde(rename = "H")]
    pub mean_curvature: f64,
    /// `|H|·√E`.
    pub half_density: f64,
    /// `(|E − G| + 2|F|)/(E + G)`.
    pub conformal_defect: f64,
    /// `|λ₁|² + |λ₂|²` from the spinor, or `|f_x|` without one.
    pub lambda_norm_sq: f64,
}

impl GeometrySample {
    pub fn area_element(&self) -> f64 {
        (self.e * self.g - self.f * self.f).max(0.0).sqrt()
    }
}

/// Computes the sample without rejecting degenerate points; curvature
/// quantities come out non-finite there.
fn raw_sample(f: &SurfaceImmersion, spinor: Option<&SpinorField>, z: Complex64) -> GeometrySample {
    let jet = f.jet(z);
    let e = dot(jet.f_x, jet.f_x);
    let ff = dot(jet.f_x, jet.f_y);
    let g = dot(jet.f_y, jet.f_y);
    let n = cross(jet.f_x, jet.f_y);
    let n_len = dot(n, n).sqrt();
    let normal = [n[0] / n_len, n[1] / n_len, n[2] / n_len];
    let l = dot(normal, jet.f_xx);
    let m = dot(normal, jet.f_xy);
    let nn = dot(normal, jet.f_yy);
    let h = (l * g - 2.0 * m * ff + nn * e) / (2.0 * (e * g - ff * ff));
    let lambda_norm_sq = match spinor {
        Some(s) => {
            let (l1, l2) = s.eval(z);
            l1.norm_sqr() + l2.norm_sqr()
        }
        None => e.sqrt(),
    };
    GeometrySample {
        z: [z.re, z.im],
        position: f.position(z),
        f_x: jet.f_x,
        f_y: jet.f_y,
        e,
        f: ff,
        g,
        mean_curvature: h,
        half_density: h.abs() * e.sqrt(),
        conformal_defect: ((e - g).abs() + 2.0 * ff.abs()) / (e + g),
        lambda_norm_sq,
    }
}

fn is_degenerate(s: &GeometrySample, eps: f64) -> bool {
    !(s.area_element() > eps) || !s.mean_curvature.is_finite()
}

/// Degeneracy threshold `ε = 1e−8 · mean(E)` over the `n × n` grid.
pub fn degeneracy_epsilon(f: &SurfaceImmersion, n: usize) -> f64 {
    let pts = fundamental_grid(&f.lattice, n);
    // collect before summing so the result does not depend on thread scheduling
    let e: Vec<f64> = pts
        .par_iter()
        .map(|&z| {
            let jet = f.jet(z);
            dot(jet.f_x, jet.f_x)
        })
        .collect();
    let total: f64 = e.iter().sum();
    1e-8 * total / pts.len() as f64
}

/// Geometry at `z`; fails where `√(EG − F²) ≤ eps`.
pub fn sample_geometry(
    f: &SurfaceImmersion,
    spinor: Option<&SpinorField>,
    z: Complex64,
    eps: f64,
) -> Result<GeometrySample> {
    let s = raw_sample(f, spinor, z);
    if is_degenerate(&s, eps) {
        return Err(Error::DegeneratePoint { re: z.re, im: z.im });
    }
    Ok(s)
}

fn grid_samples(f: &SurfaceImmersion, spinor: Option<&SpinorField>, n: usize) -> Vec<GeometrySample> {
    fundamental_grid(&f.lattice, n)
        .par_iter()
        .map(|&z| raw_sample(f, spinor, z))
        .collect()
}

fn willmore_from_samples(f: &SurfaceImmersion, samples: &[GeometrySample]) -> f64 {
    let cell = f.lattice.covolume() / samples.len() as f64;
    samples
        .iter()
        .map(|s| s.mean_curvature * s.mean_curvature * s.area_element())
        .sum::<f64>()
        * cell
}

/// `∫ H² dA` by a uniform Riemann sum over the `n × n` lattice grid.
pub fn willmore_energy(f: &SurfaceImmersion, n: usize) -> Result<f64> {
    if n < 16 {
        return Err(Error::InvalidArgument(format!("quadrature needs n >= 16, got {}", n)));
    }
    let eps = degeneracy_epsilon(f, n);
    let samples = grid_samples(f, None, n);
    let bad = samples.iter().filter(|s| is_degenerate(s, eps)).count();
    if bad > 0 {
        return Err(Error::DegenerateSurface(bad));
    }
    Ok(willmore_from_samples(f, &samples))
}

/// `max |f(z + γ) − f(z)|` over the grid and `γ ∈ {γ₁, γ₂}`.
pub fn periodicity_defect(f: &SurfaceImmersion, n: usize) -> f64 {
    f.period_defect_at(&fundamental_grid(&f.lattice, n.max(1)))
}

/// A torus-periodic quad mesh of an immersion.
#[derive(Clone, Debug)]
pub struct SurfaceMesh {
    pub n: usize,
    pub vertices: Vec<[f64; 3]>,
    /// Zero-based vertex indices.
    pub faces: Vec<[usize; 4]>,
    pub samples: Vec<GeometrySample>,
}

impl SurfaceMesh {
    pub fn build(f: &SurfaceImmersion, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidArgument(format!("mesh resolution must be >= 3, got {}", n)));
        }
        let samples = grid_samples(f, None, n);
        let vertices = samples.iter().map(|s| s.position).collect();
        let idx = |i: usize, j: usize| (i % n) * n + (j % n);
        let mut faces = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                faces.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            }
        }
        Ok(SurfaceMesh { n, vertices, faces, samples })
    }

    pub fn edge_count(&self) -> usize {
        let mut edges: Vec<(usize, usize)> = self
            .faces
            .iter()
            .flat_map(|f| (0..4).map(move |k| (f[k], f[(k + 1) % 4])))
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_count() as i64 + self.faces.len() as i64
    }

    pub fn write_obj<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# torus mesh {}x{}", self.n, self.n)?;
        for v in &self.vertices {
            writeln!(out, "v {} {} {}", format_sig(v[0], 9), format_sig(v[1], 9), format_sig(v[2], 9))?;
        }
        for f in &self.faces {
            writeln!(out, "f {} {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1, f[3] + 1)?;
        }
        Ok(())
    }
}

/// `%.{digits}g`-style formatting.
pub fn format_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format!("{}", x);
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}{:02}", trim(mant), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, x))
    }
}

/// Writes the mesh as Wavefront OBJ. Refuses degenerate surfaces unless `force`.
pub fn export_mesh(f: &SurfaceImmersion, n: usize, path: &Path, force: bool) -> Result<SurfaceMesh> {
    let mesh = SurfaceMesh::build(f, n)?;
    if !force {
        let eps = degeneracy_epsilon(f, n);
        let bad = mesh.samples.iter().filter(|s| is_degenerate(s, eps)).count();
        if bad > 0 {
            return Err(Error::DegenerateSurface(bad));
        }
    }
    let mut w = BufWriter::new(File::create(path)?);
    mesh.write_obj(&mut w)?;
    w.flush()?;
    Ok(mesh)
}

/// Pass/fail thresholds for [`verify`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub pde: f64,
    pub closedness: f64,
    pub period: f64,
    pub conformal: f64,
    /// Relative to `μ`.
    pub half_density: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { pde: 1e-10, closedness: 1e-10, period: 1e-9, conformal: 1e-8, half_density: 1e-6 }
    }
}

/// Outcome of checking every defining property of a Dirac torus on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub grid_n: usize,
    pub mu: f64,
    pub covolume: f64,
    pub max_pde_residual: Option<f64>,
    pub max_closedness_residual: Option<f64>,
    pub closing_residuals: Option<[f64; 3]>,
    pub max_period_defect: f64,
    pub max_conformal_defect: f64,
    pub max_half_density_error: f64,
    pub half_density_min: f64,
    pub half_density_max: f64,
    pub max_lambda_mismatch: f64,
    /// `max |f(z) − f_λ(z)|` against the immersion rebuilt from the spinor.
    pub max_spinor_mismatch: Option<f64>,
    pub willmore_numeric: Option<f64>,
    pub willmore_mu2_vol: f64,
    pub willmore_mu_vol: f64,
    pub willmore_note: String,
    pub degenerate_points: Vec<[f64; 2]>,
    pub tolerances: Tolerances,
    pub failures: Vec<String>,
    pub passed: bool,
}

/// Runs every check on the `n × n` grid. Failures are recorded, not raised.
pub fn verify(
    f: &SurfaceImmersion,
    spinor: Option<&SpinorField>,
    n: usize,
    tol: &Tolerances,
) -> VerificationReport {
    let n = n.max(1);
    let mu = f.mu;
    let pts = fundamental_grid(&f.lattice, n);
    let samples = grid_samples(f, spinor, n);
    let eps = 1e-8 * samples.iter().map(|s| s.e).sum::<f64>() / samples.len() as f64;

    let degenerate_points: Vec<[f64; 2]> = samples
        .iter()
        .filter(|s| is_degenerate(s, eps))
        .map(|s| s.z)
        .collect();
    let good: Vec<&GeometrySample> = samples.iter().filter(|s| !is_degenerate(s, eps)).collect();

    let max_conformal_defect = good.iter().map(|s| s.conformal_defect).fold(0.0, f64::max);
    let half_density_min = good.iter().map(|s| s.half_density).fold(f64::INFINITY, f64::min);
    let half_density_max = good.iter().map(|s| s.half_density).fold(0.0, f64::max);
    let max_half_density_error = good
        .iter()
        .map(|s| (s.half_density - mu).abs() / mu)
        .fold(0.0, f64::max);
    let max_lambda_mismatch = good
        .iter()
        .map(|s| (s.e.sqrt() - s.lambda_norm_sq).abs() / s.lambda_norm_sq.max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);

    let max_period_defect = f.period_defect_at(&pts);

    let (max_pde_residual, max_closedness_residual, closing) = match spinor {
        Some(s) => {
            let pde = pts.par_iter().map(|&z| s.pde_residual(z)).reduce(|| 0.0, f64::max);
            let closed = check_closedness(&s.differential_modes());
            let closing = closing_residuals(s.set(), s.coefficients()).ok().map(|r| r.norms());
            (Some(pde), Some(closed), closing)
        }
        None => (None, None, None),
    };

    let covolume = f.lattice.covolume();
    let willmore_numeric = if degenerate_points.is_empty() && !samples.is_empty() {
        Some(willmore_from_samples(f, &samples))
    } else {
        None
    };
    let willmore_mu2_vol = mu * mu * covolume;
    let willmore_mu_vol = mu * covolume;
    let willmore_note = match willmore_numeric {
        Some(w) => {
            let rel2 = (w - willmore_mu2_vol).abs() / willmore_mu2_vol;
            let rel1 = (w - willmore_mu_vol).abs() / willmore_mu_vol;
            let closer = if rel2 <= rel1 { "mu^2*vol, as forced by |H|*|df(d/dx)| = mu" } else { "mu*vol" };
            format!(
                "quadrature {:.12} vs mu^2*vol {:.12} (rel {:.2e}) and mu*vol {:.12} (rel {:.2e}); closer to {}",
                w, willmore_mu2_vol, rel2, willmore_mu_vol, rel1, closer
            )
        }
        None => "quadrature skipped: surface has degenerate points".to_string(),
    };

    let mut failures = Vec::new();
    let mut check = |name: &str, value: f64, limit: f64| {
        if !(value <= limit) {
            failures.push(format!("{} {:e} exceeds {:e}", name, value, limit));
        }
    };
    if let Some(v) = max_pde_residual {
        check("pde residual", v, tol.pde);
    }
    if let Some(v) = max_closedness_residual {
        check("closedness residual", v, tol.closedness);
    }
    check("period defect", max_period_defect, tol.period);
    check("conformal defect", max_conformal_defect, tol.conformal);
    check("half-density error", max_half_density_error, tol.half_density);
    if !degenerate_points.is_empty() {
        failures.push(format!("{} degenerate grid points", degenerate_points.len()));
    }
    let passed = failures.is_empty();

    VerificationReport {
        grid_n: n,
        mu,
        covolume,
        max_pde_residual,
        max_closedness_residual,
        closing_residuals: closing,
        max_period_defect,
        max_conformal_defect,
        max_half_density_error,
        half_density_min: if good.is_empty() { f64::NAN } else { half_density_min },
        half_density_max: if good.is_empty() { f64::NAN } else { half_density_max },
        max_lambda_mismatch,
        max_spinor_mismatch: None,
        willmore_numeric,
        willmore_mu2_vol,
        willmore_mu_vol,
        willmore_note,
        degenerate_points,
        tolerances: *tol,
        failures,
        passed,
    }
}

/// [`verify`] for a stored immersion that claims to come from `spinor`.
///
/// The immersion is rebuilt from the spinor, keeping any linear part, so
/// coefficients that violate the closing conditions surface as a period
/// defect, and a stored surface that differs from the rebuilt one is flagged.
pub fn verify_against_spinor(
    f: &SurfaceImmersion,
    spinor: &SpinorField,
    n: usize,
    tol: &Tolerances,
) -> VerificationReport {
    let mut report = verify(f, Some(spinor), n, tol);
    let rebuilt = match integrate(&spinor.differential_modes(), &f.lattice, spinor.mu(), true) {
        Ok(g) => g,
        Err(e) => {
            report.failures.push(format!("spinor does not integrate: {}", e));
            report.passed = false;
            return report;
        }
    };
    let pts = fundamental_grid(&f.lattice, n.max(1));
    let rebuilt_defect = rebuilt.period_defect_at(&pts);
    if rebuilt_defect > report.max_period_defect {
        report.max_period_defect = rebuilt_defect;
        if !(rebuilt_defect <= tol.period) {
            report.failures.push(format!(
                "period defect {:e} of the spinor's immersion exceeds {:e}",
                rebuilt_defect, tol.period
            ));
        }
    }
    let mismatch = pts
        .par_iter()
        .map(|&z| (rebuilt.eval(z) - f.eval(z)).norm())
        .reduce(|| 0.0, f64::max);
    let scale = pts.iter().map(|&z| rebuilt.eval(z).norm()).fold(1.0, f64::max);
    if !(mismatch <= tol.period * scale) {
        report.failures.push(format!("stored immersion differs from the spinor's by {:e}", mismatch));
    }
    if (spinor.mu() - f.mu).abs() > 1e-12 * f.mu {
        report.failures.push(format!("immersion mu {} differs from spinor mu {}", f.mu, spinor.mu()));
    }
    report.max_spinor_mismatch = Some(mismatch);
    report.passed = report.failures.is_empty();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeBasis;
    use crate::quatalg::Quaternion;
    use crate::spinor::ImmersionMode;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plane(scale: f64) -> SurfaceImmersion {
        let lattice = LatticeBasis::new(c(2.0 * PI, 0.0), c(0.0, 2.0 * PI)).unwrap();
        let mut f = SurfaceImmersion::zero(lattice, 1.0);
        // f = j·c·z
        f.linear[0] = Quaternion::j_times(c(scale, 0.0));
        f
    }

    #[test]
    fn flat_plane_geometry() {
        let f = plane(3.0);
        let s = sample_geometry(&f, None, c(0.4, 1.2), 1e-12).unwrap();
        assert!(s.mean_curvature.abs() < 1e-15);
        assert!((s.e - 9.0).abs() < 1e-12);
        assert!((s.g - 9.0).abs() < 1e-12);
        assert!(s.conformal_defect < 1e-15);
        assert_eq!(willmore_energy(&f, 16).unwrap(), 0.0);
    }

    #[test]
    fn linear_part_period_defect() {
        let f = plane(0.5);
        let d = periodicity_defect(&f, 4);
        assert!((d - 0.5 * 2.0 * PI).abs() < 1e-12);
        let lattice = LatticeBasis::new(c(1.0, 0.0), c(0.0, 1.0)).unwrap();
        let mut constant = SurfaceImmersion::zero(lattice, 1.0);
        constant.constant = Quaternion::from_r3([1.0, 2.0, 3.0]);
        assert_eq!(periodicity_defect(&constant, 8), 0.0);
    }

    #[test]
    fn degenerate_surface_detection() {
        let lattice = LatticeBasis::new(c(1.0, 0.0), c(0.0, 1.0)).unwrap();
        let f = SurfaceImmersion::zero(lattice, 1.0);
        assert!(matches!(sample_geometry(&f, None, c(0.0, 0.0), 0.0), Err(Error::DegeneratePoint { .. })));
        assert!(matches!(willmore_energy(&f, 16), Err(Error::DegenerateSurface(256))));
        assert!(willmore_energy(&f, 8).is_err());
        let report = verify(&f, None, 8, &Tolerances::default());
        assert_eq!(report.degenerate_points.len(), 64);
        assert!(!report.passed);
    }

    #[test]
    fn small_mesh_is_a_torus() {
        let lattice = LatticeBasis::new(c(2.0 * PI, 0.0), c(0.0, 2.0 * PI)).unwrap();
        let mut f = SurfaceImmersion::zero(lattice, 1.0);
        f.modes.push(ImmersionMode { coords: (1, 0), nu: c(1.0, 0.0), c: Quaternion::J });
        let mesh = SurfaceMesh::build(&f, 3).unwrap();
        assert_eq!(mesh.vertices.len(), 9);
        assert_eq!(mesh.faces.len(), 9);
        assert_eq!(mesh.euler_characteristic(), 0);
        assert!(SurfaceMesh::build(&f, 2).is_err());
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(0.0, 9), "0");
        assert_eq!(format_sig(1.0, 9), "1");
        assert_eq!(format_sig(-2.5, 9), "-2.5");
        assert_eq!(format_sig(PI, 9), "3.14159265");
        assert_eq!(format_sig(123456789.4, 9), "123456789");
        assert_eq!(format_sig(1234567890.0, 9), "1.23456789e+09");
        assert_eq!(format_sig(1.5e-7, 9), "1.5e-07");
        assert_eq!(format_sig(0.000123, 9), "0.000123");
    }
}
