//! JSON formats for lattices, spectral sets, coefficient vectors and immersions.
//!
//! Floats are written by `serde_json`, which emits the shortest decimal that
//! round-trips to the same `f64`.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::closing::CoefficientVector;
use crate::error::{Error, Result};
use crate::exact::QuadScalar;
use crate::lattice::{dual_basis, LatticeBasis, SpinStructure};
use crate::quatalg::Quaternion;
use crate::spectral::{parse_rational, spectral_set, Eigenvalue, SpectralSet, DEFAULT_TOL};
use crate::spinor::{ImmersionMode, SpinorField, SurfaceImmersion};

/// A number given either as a JSON number or as an exact scalar string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Num(serde_json::Number),
    Str(String),
}

impl Scalar {
    /// Exact rational value, if the literal is one.
    pub fn rational(&self) -> Option<BigRational> {
        match self {
            Scalar::Num(n) => parse_rational(&n.to_string()).ok(),
            Scalar::Str(s) => parse_rational(s).ok(),
        }
    }

    pub fn value(&self) -> Result<f64> {
        if let Some(r) = self.rational() {
            return Ok(r.to_f64().unwrap_or(f64::NAN));
        }
        match self {
            Scalar::Num(n) => n.as_f64().ok_or_else(|| Error::Parse(format!("bad number {}", n))),
            Scalar::Str(s) => Ok(s.parse::<QuadScalar>()?.to_f64()),
        }
    }
}

/// `{"gamma1": [re, im], "gamma2": [re, im]}` or `{"tau": [re, im]}` for `Γ = 2π(1, τ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum LatticeSpec {
    Generators { gamma1: [f64; 2], gamma2: [f64; 2] },
    Tau { tau: [Scalar; 2] },
}

impl LatticeSpec {
    pub fn to_basis(&self) -> Result<LatticeBasis> {
        match self {
            LatticeSpec::Generators { gamma1, gamma2 } => {
                LatticeBasis::new(Complex64::new(gamma1[0], gamma1[1]), Complex64::new(gamma2[0], gamma2[1]))
            }
            LatticeSpec::Tau { tau } => match (tau[0].rational(), tau[1].rational()) {
                (Some(re), Some(im)) => LatticeBasis::from_tau_exact(re, im),
                _ => LatticeBasis::from_tau(Complex64::new(tau[0].value()?, tau[1].value()?)),
            },
        }
    }

    pub fn from_basis(basis: &LatticeBasis) -> Self {
        let g1 = basis.gamma1();
        let g2 = basis.gamma2();
        LatticeSpec::Generators { gamma1: [g1.re, g1.im], gamma2: [g2.re, g2.im] }
    }
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn quat4(q: Quaternion) -> [f64; 4] {
    [q.p.re, q.p.im, q.q.re, q.q.im]
}

fn from_quat4(c: [f64; 4]) -> Quaternion {
    Quaternion::new(Complex64::new(c[0], c[1]), Complex64::new(c[2], c[3]))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointJson {
    pub coords: [i64; 2],
    pub value: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralSetJson {
    pub mu: f64,
    pub mu_exact: String,
    pub omega0: [f64; 2],
    pub elements: Vec<PointJson>,
}

impl From<&SpectralSet> for SpectralSetJson {
    fn from(set: &SpectralSet) -> Self {
        SpectralSetJson {
            mu: set.mu(),
            mu_exact: set.eigenvalue().to_string(),
            omega0: pair(set.omega0()),
            elements: set
                .elements()
                .iter()
                .map(|p| PointJson { coords: [p.coords.0, p.coords.1], value: pair(p.value) })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientJson {
    pub coords: [i64; 2],
    pub a: [f64; 2],
}

pub fn coefficients_to_json(a: &CoefficientVector) -> Vec<CoefficientJson> {
    a.iter().map(|(k, v)| CoefficientJson { coords: [k.0, k.1], a: pair(v) }).collect()
}

pub fn coefficients_from_json(list: &[CoefficientJson]) -> CoefficientVector {
    list.iter()
        .map(|c| ((c.coords[0], c.coords[1]), Complex64::new(c.a[0], c.a[1])))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinorJson {
    /// `(2s₁, 2s₂)`.
    pub spin: [u8; 2],
    /// Eigenvalue literal as accepted by [`Eigenvalue`]'s parser.
    pub mu: String,
    pub coefficients: Vec<CoefficientJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeJson {
    pub coords: [i64; 2],
    pub nu: [f64; 2],
    #[serde(rename = "C")]
    pub c: [f64; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImmersionJson {
    pub mu: f64,
    pub lattice: LatticeSpec,
    pub constant: [f64; 4],
    #[serde(default)]
    pub linear: [[f64; 4]; 2],
    pub modes: Vec<ModeJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spinor: Option<SpinorJson>,
}

impl ImmersionJson {
    pub fn new(f: &SurfaceImmersion, spinor: Option<&SpinorField>) -> Self {
        ImmersionJson {
            mu: f.mu,
            lattice: LatticeSpec::from_basis(&f.lattice),
            constant: quat4(f.constant),
            linear: f.linear.map(quat4),
            modes: f
                .modes
                .iter()
                .map(|m| ModeJson { coords: [m.coords.0, m.coords.1], nu: pair(m.nu), c: quat4(m.c) })
                .collect(),
            spinor: spinor.map(|s| {
                let (t1, t2) = s.set().spin().twice();
                SpinorJson {
                    spin: [t1 as u8, t2 as u8],
                    mu: s.set().eigenvalue().to_string(),
                    coefficients: coefficients_to_json(s.coefficients()),
                }
            }),
        }
    }

    pub fn immersion(&self) -> Result<SurfaceImmersion> {
        let lattice = self.lattice.to_basis()?;
        if !(self.mu > 0.0) {
            return Err(Error::InvalidArgument(format!("mu must be positive, got {}", self.mu)));
        }
        Ok(SurfaceImmersion {
            lattice,
            mu: self.mu,
            constant: from_quat4(self.constant),
            modes: self
                .modes
                .iter()
                .map(|m| ImmersionMode {
                    coords: (m.coords[0], m.coords[1]),
                    nu: Complex64::new(m.nu[0], m.nu[1]),
                    c: from_quat4(m.c),
                })
                .collect(),
            linear: self.linear.map(from_quat4),
        })
    }

    /// Rebuilds the spinor, if present, on the recomputed `Γ′`.
    pub fn spinor_field(&self) -> Result<Option<SpinorField>> {
        let Some(s) = &self.spinor else {
            return Ok(None);
        };
        let lattice = self.lattice.to_basis()?;
        let dual = dual_basis(&lattice)?;
        let spin = SpinStructure::from_twice(s.spin[0], s.spin[1])?;
        let mu: Eigenvalue = s.mu.parse()?;
        let set = spectral_set(&dual, spin, &mu, DEFAULT_TOL)?;
        SpinorField::new(set, coefficients_from_json(&s.coefficients)).map(Some)
    }
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}
