//! Eigen-spinors of the plane Dirac operator, the quaternionic differential
//! they generate, and its analytic primitive.
//!
//! For `ν = ω + ω₀` and `e_ν(z) = exp(i⟨ν, z⟩)`,
//!
//! ```text
//! λ₁ =  Σ a_ω e_ν
//! λ₂ = −Σ (1/μ) a_ω conj(ν) e_ν
//! ```
//!
//! which solves `2i∂λ₁ = μλ₂`, `2i∂̄λ₂ = μλ₁` because `|ν| = μ`. The spin
//! transform of the reference plane `j·z̄` is then
//!
//! ```text
//! df = conj(λ)·j dz̄·λ = (jλ₂² − conj(λ₁)λ₂) dz + (jλ₁² + λ₁conj(λ₂)) dz̄
//! ```
//!
//! which is closed for this pair of equations.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::closing::CoefficientVector;
use crate::error::{Error, Result};
use crate::lattice::{DualBasis, LatticeBasis};
use crate::quatalg::Quaternion;
use crate::spectral::SpectralSet;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `exp(i⟨ν, z⟩)` with `⟨ν, z⟩ = Re(conj(ν) z)`.
pub fn plane_wave(nu: Complex64, z: Complex64) -> Complex64 {
    Complex64::from_polar(1.0, nu.re * z.re + nu.im * z.im)
}

#[derive(Clone, Copy, Debug)]
struct SpinorMode {
    /// Doubled lattice coordinates of `ν = ω + ω₀`.
    twice: (i64, i64),
    nu: Complex64,
    a: Complex64,
    /// `λ₂` coefficient, `−a·conj(ν)/μ`.
    b: Complex64,
}

/// An eigen-spinor `λ = λ₁ + jλ₂` built on a spectral set.
#[derive(Clone, Debug)]
pub struct SpinorField {
    set: SpectralSet,
    coeffs: CoefficientVector,
    modes: Vec<SpinorMode>,
}

impl SpinorField {
    pub fn new(set: SpectralSet, coeffs: CoefficientVector) -> Result<Self> {
        coeffs.check_keys(&set)?;
        let mu = set.mu();
        let (t1, t2) = set.spin().twice();
        let modes = coeffs
            .iter()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(k, a)| {
                let nu = set.shifted(k);
                SpinorMode { twice: (2 * k.0 + t1, 2 * k.1 + t2), nu, a, b: -a * nu.conj() / mu }
            })
            .collect();
        Ok(SpinorField { set, coeffs, modes })
    }

    pub fn set(&self) -> &SpectralSet {
        &self.set
    }

    pub fn coefficients(&self) -> &CoefficientVector {
        &self.coeffs
    }

    pub fn mu(&self) -> f64 {
        self.set.mu()
    }

    /// `(λ₁(z), λ₂(z))`.
    pub fn eval(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut l1 = Complex64::new(0.0, 0.0);
        let mut l2 = Complex64::new(0.0, 0.0);
        for m in &self.modes {
            let e = plane_wave(m.nu, z);
            l1 += m.a * e;
            l2 += m.b * e;
        }
        (l1, l2)
    }

    pub fn quaternion(&self, z: Complex64) -> Quaternion {
        let (l1, l2) = self.eval(z);
        Quaternion::new(l1, l2)
    }

    /// `|2i∂λ₁ − μλ₂| + |2i∂̄λ₂ − μλ₁|`, from the Fourier representation.
    pub fn pde_residual(&self, z: Complex64) -> f64 {
        let mu = self.mu();
        let mut first = Complex64::new(0.0, 0.0);
        let mut second = Complex64::new(0.0, 0.0);
        for m in &self.modes {
            let e = plane_wave(m.nu, z);
            // ∂e = (i·conj(ν)/2)e, ∂̄e = (i·ν/2)e
            let d1 = 2.0 * I * (I * m.nu.conj() / 2.0) * m.a;
            let d2 = 2.0 * I * (I * m.nu / 2.0) * m.b;
            first += (d1 - mu * m.b) * e;
            second += (d2 - mu * m.a) * e;
        }
        first.norm() + second.norm()
    }

    /// Evaluates `df(X)` for a tangent vector `X ∈ C` directly from `λ(z)`.
    pub fn differential_at(&self, z: Complex64, x: Complex64) -> Quaternion {
        let (l1, l2) = self.eval(z);
        let dz = Quaternion::j_times(l2 * l2) - Quaternion::from_complex(l1.conj() * l2);
        let dzbar = Quaternion::j_times(l1 * l1) + Quaternion::from_complex(l1 * l2.conj());
        dz * x + dzbar * x.conj()
    }

    /// Expands `df` into Fourier modes by convolving the spinor modes.
    pub fn differential_modes(&self) -> FourierForm {
        let dual = self.set.dual().clone();
        let mut acc: BTreeMap<(i64, i64), [Complex64; 4]> = BTreeMap::new();
        let mut add = |twice: (i64, i64), slot: usize, v: Complex64| {
            debug_assert!(twice.0 % 2 == 0 && twice.1 % 2 == 0);
            acc.entry((twice.0 / 2, twice.1 / 2)).or_default()[slot] += v;
        };
        for u in &self.modes {
            for v in &self.modes {
                let sum = (u.twice.0 + v.twice.0, u.twice.1 + v.twice.1);
                let diff = (v.twice.0 - u.twice.0, v.twice.1 - u.twice.1);
                // P: −conj(λ₁)λ₂ at ν_v − ν_u
                add(diff, 0, -u.a.conj() * v.b);
                // Q: λ₁conj(λ₂) at ν_u − ν_v
                add((-diff.0, -diff.1), 1, u.a * v.b.conj());
                // R: λ₂² at ν_u + ν_v
                add(sum, 2, u.b * v.b);
                // S: λ₁² at ν_u + ν_v
                add(sum, 3, u.a * v.a);
            }
        }
        let modes = acc
            .into_iter()
            .map(|(k, [p, q, r, s])| {
                let nu = dual.point(k.0 as f64, k.1 as f64);
                (k, FormMode { nu, p, q, r, s })
            })
            .collect();
        FourierForm { dual, modes }
    }
}

/// One frequency of a quaternionic 1-form: `[(P + jR)dz + (Q + jS)dz̄]·e_ν`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FormMode {
    pub nu: Complex64,
    pub p: Complex64,
    pub q: Complex64,
    pub r: Complex64,
    pub s: Complex64,
}

impl FormMode {
    pub fn dz(&self) -> Quaternion {
        Quaternion::new(self.p, self.r)
    }

    pub fn dzbar(&self) -> Quaternion {
        Quaternion::new(self.q, self.s)
    }

    fn closedness(&self) -> f64 {
        (self.p * self.nu - self.q * self.nu.conj()).norm()
            + (self.r * self.nu - self.s * self.nu.conj()).norm()
    }

    fn magnitude(&self) -> f64 {
        self.p.norm() + self.q.norm() + self.r.norm() + self.s.norm()
    }
}

/// A quaternionic 1-form on `C/Γ` as finitely many Fourier modes, keyed by
/// the integer coordinates of `ν` in `Γ*`.
#[derive(Clone, Debug)]
pub struct FourierForm {
    pub dual: DualBasis,
    pub modes: BTreeMap<(i64, i64), FormMode>,
}

impl FourierForm {
    pub fn empty(dual: DualBasis) -> Self {
        FourierForm { dual, modes: BTreeMap::new() }
    }

    pub fn insert(&mut self, coords: (i64, i64), mut mode: FormMode) {
        mode.nu = self.dual.point(coords.0 as f64, coords.1 as f64);
        self.modes.insert(coords, mode);
    }

    pub fn zero_mode(&self) -> FormMode {
        self.modes.get(&(0, 0)).copied().unwrap_or_default()
    }

    /// `df(X)` at `z`.
    pub fn eval(&self, z: Complex64, x: Complex64) -> Quaternion {
        let mut out = Quaternion::ZERO;
        for m in self.modes.values() {
            let e = plane_wave(m.nu, z);
            out += (m.dz() * x + m.dzbar() * x.conj()) * e;
        }
        out
    }

    fn scale(&self) -> f64 {
        self.modes
            .values()
            .map(|m| m.magnitude() * m.nu.norm().max(1.0))
            .fold(0.0, f64::max)
    }
}

/// `max_ν |P_ν ν − Q_ν conj(ν)| + |R_ν ν − S_ν conj(ν)|`.
pub fn check_closedness(form: &FourierForm) -> f64 {
    form.modes.values().map(FormMode::closedness).fold(0.0, f64::max)
}

/// A single Fourier term `C_ν e_ν` of an immersion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImmersionMode {
    pub coords: (i64, i64),
    pub nu: Complex64,
    pub c: Quaternion,
}

/// `f(z) = constant + Σ C_ν e_ν(z) + A·z + B·z̄`, with `(A, B) = linear`.
#[derive(Clone, Debug)]
pub struct SurfaceImmersion {
    pub lattice: LatticeBasis,
    pub mu: f64,
    pub constant: Quaternion,
    pub modes: Vec<ImmersionMode>,
    pub linear: [Quaternion; 2],
}

/// Derivatives of an immersion at one point, as vectors in R³.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub f_x: [f64; 3],
    pub f_y: [f64; 3],
    pub f_xx: [f64; 3],
    pub f_xy: [f64; 3],
    pub f_yy: [f64; 3],
}

impl SurfaceImmersion {
    /// The constant immersion `f ≡ 0` on the given lattice.
    pub fn zero(lattice: LatticeBasis, mu: f64) -> Self {
        SurfaceImmersion {
            lattice,
            mu,
            constant: Quaternion::ZERO,
            modes: Vec::new(),
            linear: [Quaternion::ZERO; 2],
        }
    }

    pub fn has_linear_part(&self) -> bool {
        self.linear.iter().any(|q| q.norm_sqr() > 0.0)
    }

    pub fn eval(&self, z: Complex64) -> Quaternion {
        let mut out = self.constant + self.linear[0] * z + self.linear[1] * z.conj();
        for m in &self.modes {
            out += m.c * plane_wave(m.nu, z);
        }
        out
    }

    pub fn position(&self, z: Complex64) -> [f64; 3] {
        self.eval(z).vector_part()
    }

    /// Analytic first and second derivatives along `x = Re z` and `y = Im z`.
    pub fn jet(&self, z: Complex64) -> Jet {
        let mut fx = self.linear[0] + self.linear[1];
        let mut fy = (self.linear[0] - self.linear[1]) * I;
        let mut fxx = Quaternion::ZERO;
        let mut fxy = Quaternion::ZERO;
        let mut fyy = Quaternion::ZERO;
        for m in &self.modes {
            let ce = m.c * plane_wave(m.nu, z);
            let (kx, ky) = (m.nu.re, m.nu.im);
            fx += ce * Complex64::new(0.0, kx);
            fy += ce * Complex64::new(0.0, ky);
            fxx += ce * (-kx * kx);
            fxy += ce * (-kx * ky);
            fyy += ce * (-ky * ky);
        }
        Jet {
            f_x: fx.vector_part(),
            f_y: fy.vector_part(),
            f_xx: fxx.vector_part(),
            f_xy: fxy.vector_part(),
            f_yy: fyy.vector_part(),
        }
    }

    /// Differentiates back into a [`FourierForm`].
    pub fn differential(&self) -> Result<FourierForm> {
        let dual = crate::lattice::dual_basis(&self.lattice)?;
        let mut form = FourierForm::empty(dual);
        for m in &self.modes {
            // d e_ν = (i conj(ν)/2) e_ν dz + (i ν/2) e_ν dz̄
            let a = m.c * (I * m.nu.conj() / 2.0);
            let b = m.c * (I * m.nu / 2.0);
            let mode = FormMode { nu: m.nu, p: a.p, r: a.q, q: b.p, s: b.q };
            form.modes.insert(m.coords, mode);
        }
        if self.has_linear_part() {
            let [a, b] = self.linear;
            let mode = FormMode { nu: Complex64::new(0.0, 0.0), p: a.p, r: a.q, q: b.p, s: b.q };
            form.modes.insert((0, 0), mode);
        }
        Ok(form)
    }

    /// `max_{z, γ} |f(z + γ) − f(z)|` over the given sample points.
    pub fn period_defect_at(&self, points: &[Complex64]) -> f64 {
        let periods = [self.lattice.gamma1(), self.lattice.gamma2()];
        points
            .par_iter()
            .map(|&z| {
                let fz = self.eval(z);
                periods
                    .iter()
                    .map(|&g| (self.eval(z + g) - fz).norm())
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }
}

/// Integrates a closed form mode by mode.
///
/// `C_ν = (P_ν + jR_ν)·2/(i·conj(ν))` for `ν ≠ 0`; the zero mode becomes the
/// linear part, which is rejected unless `allow_linear`. The constant is
/// chosen so that `f(0) = 0` with vanishing real part.
pub fn integrate(form: &FourierForm, lattice: &LatticeBasis, mu: f64, allow_linear: bool) -> Result<SurfaceImmersion> {
    let scale = form.scale().max(1.0);
    let residual = check_closedness(form);
    if residual > 1e-9 * scale {
        return Err(Error::NotClosedForm(residual));
    }
    let zero = form.zero_mode();
    let zero_mag = zero.magnitude();
    let zero_scale = form.modes.values().map(FormMode::magnitude).fold(1.0, f64::max);
    let linear = if zero_mag > 1e-10 * zero_scale {
        if !allow_linear {
            return Err(Error::NonPeriodic(zero_mag));
        }
        [zero.dz(), zero.dzbar()]
    } else if allow_linear {
        [zero.dz(), zero.dzbar()]
    } else {
        [Quaternion::ZERO; 2]
    };

    let mut modes = Vec::with_capacity(form.modes.len());
    let mut sum = Quaternion::ZERO;
    for (&coords, m) in &form.modes {
        if coords == (0, 0) {
            continue;
        }
        let c = m.dz() * (Complex64::new(2.0, 0.0) / (I * m.nu.conj()));
        sum += c;
        modes.push(ImmersionMode { coords, nu: m.nu, c });
    }
    let mut f = SurfaceImmersion {
        lattice: lattice.clone(),
        mu,
        constant: -sum,
        modes,
        linear,
    };
    let re = f.eval(Complex64::new(0.0, 0.0)).real();
    f.constant.p.re -= re;
    Ok(f)
}
