//! End-to-end assembly: spinor → closed form → immersion, and the worked
//! square-lattice example at `μ = √5`.

use num_complex::Complex64;
use num_rational::BigRational;

use crate::closing::CoefficientVector;
use crate::error::Result;
use crate::lattice::{dual_basis, LatticeBasis, SpinStructure};
use crate::spectral::{spectral_set, Eigenvalue, SpectralSet, DEFAULT_TOL};
use crate::spinor::{integrate, SpinorField, SurfaceImmersion};

/// Integrates the differential generated by `spinor` on `lattice`.
///
/// With `allow_linear` a non-closing spinor still yields an immersion, whose
/// linear part then shows up as a period defect.
pub fn synthesize(spinor: &SpinorField, lattice: &LatticeBasis, allow_linear: bool) -> Result<SurfaceImmersion> {
    integrate(&spinor.differential_modes(), lattice, spinor.mu(), allow_linear)
}

/// The square lattice `2π(Z + iZ)`, trivial spin structure.
pub fn example_lattice() -> LatticeBasis {
    LatticeBasis::from_tau_exact(BigRational::from_integer(0.into()), BigRational::from_integer(1.into()))
        .expect("square lattice")
}

pub fn example_eigenvalue() -> Eigenvalue {
    Eigenvalue::sqrt_of(BigRational::from_integer(5.into()))
}

pub fn example_spectral_set() -> SpectralSet {
    let dual = dual_basis(&example_lattice()).expect("square lattice");
    spectral_set(&dual, SpinStructure::TRIVIAL, &example_eigenvalue(), DEFAULT_TOL).expect("valid eigenvalue")
}

/// The Example's coefficients, with zeros at `±(1, 2)`.
pub fn example_coefficients() -> CoefficientVector {
    let i = Complex64::new(0.0, 1.0);
    let a1 = Complex64::new(1.0, 1.0) * 1.5f64.sqrt();
    let a2 = Complex64::new(1.0, -3.0) / 2f64.sqrt();
    let a3 = Complex64::new(2.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    [
        ((2, 1), a1),
        ((-2, -1), i * a1),
        ((2, -1), a2),
        ((-2, 1), i * a2),
        ((1, -2), a3),
        ((-1, 2), i * a3),
        ((1, 2), zero),
        ((-1, -2), zero),
    ]
    .into_iter()
    .collect()
}

pub fn example_spinor() -> SpinorField {
    SpinorField::new(example_spectral_set(), example_coefficients()).expect("keys lie in the spectral set")
}

pub fn example_immersion() -> Result<(SpinorField, SurfaceImmersion)> {
    let spinor = example_spinor();
    let f = synthesize(&spinor, &example_lattice(), false)?;
    Ok((spinor, f))
}
