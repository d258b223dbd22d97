//! Dirac tori: conformal immersions of flat tori into R³ whose mean curvature
//! half-density `H|df|` is constant.
//!
//! The construction starts from an eigen-spinor of the plane Dirac operator
//! supported on a circle of dual-lattice frequencies, imposes the closing
//! conditions on its coefficients, and integrates the resulting quaternionic
//! 1-form in closed form.

pub mod classify;
pub mod closing;
pub mod error;
pub mod exact;
pub mod io;
pub mod lattice;
pub mod pipeline;
pub mod quatalg;
pub mod spectral;
pub mod spinor;
pub mod surface;

pub use classify::{classify, classify_rectangular, min_torus_eigenvalue, rectangular_witness, ExactLatticeBasis, Verdict, VerdictKind};
pub use closing::{auto_picks, closing_residuals, construct_coefficients, CoefficientVector, ClosingResiduals, PickPolicy};
pub use error::{Error, Result};
pub use exact::{ExactComplex, QuadScalar};
pub use lattice::{dual_basis, DualBasis, LatticeBasis, SpinStructure};
pub use quatalg::Quaternion;
pub use spectral::{spectral_set, spectrum_search, Eigenvalue, SpectralSet};
pub use spinor::{integrate, FourierForm, SpinorField, SurfaceImmersion};
pub use surface::{verify, SurfaceMesh, Tolerances, VerificationReport};
