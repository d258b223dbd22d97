//! Period lattices, their duals, spin structures and lattice point enumeration.
//!
//! Throughout, the pairing on C is `⟨ω, z⟩ = Re(conj(ω)·z)`, and the dual of
//! `Γ` is `Γ* = {ω : ⟨ω, γ⟩ ∈ 2πZ for all γ ∈ Γ}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn pairing(omega: Complex64, z: Complex64) -> f64 {
    omega.re * z.re + omega.im * z.im
}

/// `Im(conj(a)·b)`, the signed area spanned by `a` and `b`.
fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn check_nondegenerate(a: Complex64, b: Complex64) -> Result<f64> {
    let det = cross(a, b);
    let scale = a.norm() * b.norm();
    if !det.is_finite() || !(scale > 0.0) || det.abs() < 1e-14 * scale {
        return Err(Error::DegenerateLattice);
    }
    Ok(det)
}

/// Exact Gram matrix `[[g11, g12], [g12, g22]]` of a dual basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactGram {
    pub g11: BigRational,
    pub g12: BigRational,
    pub g22: BigRational,
}

impl ExactGram {
    /// `g11 x² + 2 g12 x y + g22 y²`.
    pub fn norm(&self, x: &BigRational, y: &BigRational) -> BigRational {
        let two = BigRational::from_integer(2.into());
        &self.g11 * x * x + two * &self.g12 * x * y + &self.g22 * y * y
    }
}

/// Generators `(γ₁, γ₂)` of the period lattice `Γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeBasis {
    gamma1: Complex64,
    gamma2: Complex64,
    /// Exact `τ` when the lattice was given as `2π(1, τ)` with rational `τ`.
    tau: Option<(BigRational, BigRational)>,
}

impl LatticeBasis {
    /// Builds a basis, flipping `γ₂` if needed so that `Im(conj(γ₁)γ₂) > 0`.
    pub fn new(gamma1: Complex64, gamma2: Complex64) -> Result<Self> {
        let det = check_nondegenerate(gamma1, gamma2)?;
        let gamma2 = if det < 0.0 { -gamma2 } else { gamma2 };
        Ok(LatticeBasis { gamma1, gamma2, tau: None })
    }

    /// `Γ = 2π·(1, τ)`.
    pub fn from_tau(tau: Complex64) -> Result<Self> {
        Self::new(Complex64::new(2.0 * PI, 0.0), tau * (2.0 * PI))
    }

    /// `Γ = 2π·(1, τ)` with `τ = re + i·im` exact; the dual Gram matrix is then exact.
    pub fn from_tau_exact(re: BigRational, im: BigRational) -> Result<Self> {
        let to_f = |r: &BigRational| num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN);
        let tau = Complex64::new(to_f(&re), to_f(&im));
        let mut basis = Self::from_tau(tau)?;
        if im.is_zero() {
            return Err(Error::DegenerateLattice);
        }
        // orientation normalization negates γ₂ when Im τ < 0
        basis.tau = if im.is_negative() { Some((-re, -im)) } else { Some((re, im)) };
        Ok(basis)
    }

    pub fn gamma1(&self) -> Complex64 {
        self.gamma1
    }

    pub fn gamma2(&self) -> Complex64 {
        self.gamma2
    }

    pub fn exact_tau(&self) -> Option<&(BigRational, BigRational)> {
        self.tau.as_ref()
    }

    /// Area of the fundamental domain, `vol(C/Γ) = Im(conj(γ₁)γ₂)`.
    pub fn covolume(&self) -> f64 {
        cross(self.gamma1, self.gamma2)
    }

    pub fn point(&self, m: f64, n: f64) -> Complex64 {
        self.gamma1 * m + self.gamma2 * n
    }
}

/// Generators `(ω₁, ω₂)` of `Γ*` with `⟨ωᵢ, γⱼ⟩ = 2πδᵢⱼ`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualBasis {
    omega1: Complex64,
    omega2: Complex64,
    exact_gram: Option<ExactGram>,
}

impl DualBasis {
    /// A dual basis given directly by its generators.
    pub fn new(omega1: Complex64, omega2: Complex64) -> Result<Self> {
        let det = check_nondegenerate(omega1, omega2)?;
        let omega2 = if det < 0.0 { -omega2 } else { omega2 };
        Ok(DualBasis { omega1, omega2, exact_gram: None })
    }

    pub fn with_exact_gram(mut self, gram: ExactGram) -> Self {
        self.exact_gram = Some(gram);
        self
    }

    pub fn omega1(&self) -> Complex64 {
        self.omega1
    }

    pub fn omega2(&self) -> Complex64 {
        self.omega2
    }

    pub fn exact_gram(&self) -> Option<&ExactGram> {
        self.exact_gram.as_ref()
    }

    pub fn point(&self, m: f64, n: f64) -> Complex64 {
        self.omega1 * m + self.omega2 * n
    }

    /// Gram matrix `(g11, g12, g22)` in floating point.
    pub fn gram(&self) -> (f64, f64, f64) {
        (
            self.omega1.norm_sqr(),
            pairing(self.omega1, self.omega2),
            self.omega2.norm_sqr(),
        )
    }

    /// Lattice coordinates `(x, y)` with `x ω₁ + y ω₂ = z`.
    pub fn coordinates(&self, z: Complex64) -> (f64, f64) {
        let det = cross(self.omega1, self.omega2);
        (cross(z, self.omega2) / det, cross(self.omega1, z) / det)
    }

    /// Reinterprets the dual generators as a period lattice.
    pub fn as_lattice(&self) -> LatticeBasis {
        LatticeBasis { gamma1: self.omega1, gamma2: self.omega2, tau: None }
    }
}

/// Computes `Γ*` as `2π` times the inverse transpose of the generator matrix.
pub fn dual_basis(basis: &LatticeBasis) -> Result<DualBasis> {
    let (g1, g2) = (basis.gamma1, basis.gamma2);
    let det = check_nondegenerate(g1, g2)?;
    // columns of M are γ₁, γ₂; W = 2π M^{-T}
    let s = 2.0 * PI / det;
    let omega1 = Complex64::new(g2.im, -g2.re) * s;
    let omega2 = Complex64::new(-g1.im, g1.re) * s;
    let mut dual = DualBasis { omega1, omega2, exact_gram: None };
    if let Some((re, im)) = &basis.tau {
        // ω₁ = 1 − i·re/im, ω₂ = i/im
        let one = BigRational::from_integer(1.into());
        let im2 = im * im;
        dual.exact_gram = Some(ExactGram {
            g11: &one + re * re / &im2,
            g12: -re / &im2,
            g22: one / im2,
        });
    }
    Ok(dual)
}

/// Spin structure `ω₀ = s₁ω₁ + s₂ω₂` with `sᵢ ∈ {0, ½}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinStructure {
    /// `(2s₁, 2s₂)`, each 0 or 1.
    twice: (u8, u8),
}

impl SpinStructure {
    pub const TRIVIAL: SpinStructure = SpinStructure { twice: (0, 0) };

    /// From doubled components `(2s₁, 2s₂)`; each must be 0 or 1.
    pub fn from_twice(t1: u8, t2: u8) -> Result<Self> {
        if t1 > 1 || t2 > 1 {
            return Err(Error::InvalidArgument(format!(
                "spin structure components must be 0 or 1/2, got ({}/2, {}/2)",
                t1, t2
            )));
        }
        Ok(SpinStructure { twice: (t1, t2) })
    }

    /// From `(s₁, s₂)` given as reals in `{0, 0.5}`.
    pub fn from_halves(s1: f64, s2: f64) -> Result<Self> {
        let conv = |s: f64| -> Result<u8> {
            if s == 0.0 {
                Ok(0)
            } else if s == 0.5 {
                Ok(1)
            } else {
                Err(Error::InvalidArgument(format!("spin component {} is not 0 or 1/2", s)))
            }
        };
        Self::from_twice(conv(s1)?, conv(s2)?)
    }

    pub fn twice(&self) -> (i64, i64) {
        (self.twice.0 as i64, self.twice.1 as i64)
    }

    pub fn halves(&self) -> (f64, f64) {
        (self.twice.0 as f64 * 0.5, self.twice.1 as f64 * 0.5)
    }

    pub fn omega0(&self, dual: &DualBasis) -> Complex64 {
        let (s1, s2) = self.halves();
        dual.point(s1, s2)
    }
}

/// A dual lattice point with its integer coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticePoint {
    pub coords: (i64, i64),
    pub value: Complex64,
}

/// Integer coordinate ranges guaranteed to contain every lattice point in the disk.
pub(crate) fn coordinate_box(
    dual: &DualBasis,
    center: Complex64,
    radius: f64,
) -> ((i64, i64), (i64, i64)) {
    // |x − x_c| ≤ r·|ω₁*| where ω₁* is the Euclidean dual vector; |ω₁*|² = (G⁻¹)₁₁
    let (g11, g12, g22) = dual.gram();
    let det = g11 * g22 - g12 * g12;
    let r1 = radius * (g22 / det).sqrt();
    let r2 = radius * (g11 / det).sqrt();
    let (xc, yc) = dual.coordinates(center);
    let lo = |c: f64, r: f64| (c - r).floor() as i64 - 1;
    let hi = |c: f64, r: f64| (c + r).ceil() as i64 + 1;
    ((lo(xc, r1), hi(xc, r1)), (lo(yc, r2), hi(yc, r2)))
}

/// All points `ω ∈ Γ*` with `|ω − center| ≤ radius + 1e−12`, sorted by coordinates.
pub fn enumerate_disk(dual: &DualBasis, center: Complex64, radius: f64) -> Vec<LatticePoint> {
    let radius = radius.max(0.0);
    let ((m0, m1), (n0, n1)) = coordinate_box(dual, center, radius);
    let bound = radius + 1e-12;
    let mut out = Vec::new();
    for m in m0..=m1 {
        for n in n0..=n1 {
            let value = dual.point(m as f64, n as f64);
            if (value - center).norm() <= bound {
                out.push(LatticePoint { coords: (m, n), value });
            }
        }
    }
    out
}

/// The `n × n` grid `{(p/n)γ₁ + (q/n)γ₂}`, `p` outer and `q` inner.
pub fn fundamental_grid(basis: &LatticeBasis, n: usize) -> Vec<Complex64> {
    let n = n.max(1);
    let mut out = Vec::with_capacity(n * n);
    for p in 0..n {
        for q in 0..n {
            out.push(basis.point(p as f64 / n as f64, q as f64 / n as f64));
        }
    }
    out
}
