//! Existence of Dirac tori per conformal class.
//!
//! A class admits a Dirac torus iff `Γ*` contains an orthogonal pair
//! `ω₁, ω₂` with `|ω₁|² = b·|ω₂|²` and `b ∈ Q`. Everything here is exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{ExactComplex, QuadScalar};
use crate::lattice::{DualBasis, SpinStructure};
use crate::spectral::spectrum_search;

impl Serialize for QuadScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Serialize for ExactComplex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ExactComplex", 2)?;
        st.serialize_field("re", &self.re)?;
        st.serialize_field("im", &self.im)?;
        st.end()
    }
}

fn ser_rational<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&QuadScalar::rational(r.clone()).to_string())
}

/// Two generators with components in a single `Q(√d)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactLatticeBasis {
    omega1: ExactComplex,
    omega2: ExactComplex,
}

fn field_of(values: &[&QuadScalar]) -> Result<u64> {
    let mut d = 1;
    for v in values {
        match (d, v.field()) {
            (_, 1) => {}
            (1, e) => d = e,
            (a, e) if a == e => {}
            (a, e) => {
                return Err(Error::InvalidArgument(format!(
                    "generators mix Q(sqrt({})) and Q(sqrt({}))",
                    a, e
                )))
            }
        }
    }
    Ok(d)
}

impl ExactLatticeBasis {
    pub fn new(omega1: ExactComplex, omega2: ExactComplex) -> Result<Self> {
        field_of(&[&omega1.re, &omega1.im, &omega2.re, &omega2.im])?;
        if omega1.cross(&omega2).is_zero() {
            return Err(Error::DegenerateLattice);
        }
        Ok(ExactLatticeBasis { omega1, omega2 })
    }

    /// The lattice `Z + τZ`.
    pub fn from_tau(tau: ExactComplex) -> Result<Self> {
        Self::new(ExactComplex::real(QuadScalar::one()), tau)
    }

    pub fn omega1(&self) -> &ExactComplex {
        &self.omega1
    }

    pub fn omega2(&self) -> &ExactComplex {
        &self.omega2
    }

    pub fn field(&self) -> u64 {
        field_of(&[&self.omega1.re, &self.omega1.im, &self.omega2.re, &self.omega2.im]).unwrap_or(1)
    }

    /// Dual basis without the `2π` factor, which does not affect the class.
    pub fn dual(&self) -> Self {
        let inv = self.omega1.cross(&self.omega2).inv().expect("non-degenerate");
        // ω₁* = −i·γ₂/c, ω₂* = i·γ₁/c with c = Im(conj(γ₁)γ₂)
        let rot = |v: &ExactComplex, sign: i64| {
            let s = QuadScalar::from_int(sign);
            ExactComplex::new(&(&(-&v.im) * &s) * &inv, &(&v.re * &s) * &inv)
        };
        ExactLatticeBasis { omega1: rot(&self.omega2, -1), omega2: rot(&self.omega1, 1) }
    }

    pub fn point(&self, m: i64, n: i64) -> ExactComplex {
        self.omega1.scale_int(m).add(&self.omega2.scale_int(n))
    }

    /// Floating-point copy for the spectral routines.
    pub fn to_dual_basis(&self) -> Result<DualBasis> {
        DualBasis::new(self.omega1.to_c64(), self.omega2.to_c64())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VerdictKind {
    ExistsWitness,
    NotFoundUpToBound,
    NoRectangularCase,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub omega1: ExactComplex,
    pub omega2: ExactComplex,
    /// `|ω₁|² / |ω₂|²`.
    #[serde(serialize_with = "ser_rational")]
    pub b: BigRational,
    /// Integer coordinates in the searched basis, when found by search.
    pub coords: Option<[(i64, i64); 2]>,
}

impl Witness {
    /// Exact re-check of orthogonality and `|ω₁|²·den(b) = num(b)·|ω₂|²`.
    pub fn verify(&self) -> bool {
        let num = QuadScalar::rational(BigRational::from_integer(self.b.numer().clone()));
        let den = QuadScalar::rational(BigRational::from_integer(self.b.denom().clone()));
        self.omega1.dot(&self.omega2).is_zero()
            && !self.omega2.is_zero()
            && &self.omega1.norm_sqr() * &den == &num * &self.omega2.norm_sqr()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub witness: Option<Witness>,
    /// `None` when the decision is exact and unbounded.
    pub search_bound: Option<u64>,
    /// `τ²` of the rectangular case, when that path decided.
    pub tau_sq: Option<QuadScalar>,
    /// Six vectors of equal norm in the rectangular sublattice.
    pub six_vectors: Option<Vec<ExactComplex>>,
}

impl Verdict {
    pub fn exists(&self) -> bool {
        self.kind == VerdictKind::ExistsWitness
    }
}

fn ratio(a: &QuadScalar, b: &QuadScalar) -> Option<BigRational> {
    a.checked_div(b).and_then(|r| r.as_rational().cloned())
}

/// Bounded exact search over `m·ω₁ + n·ω₂` with `|m|, |n| ≤ coeff_bound`.
///
/// A lattice with `⟨ω₁, ω₂⟩ = 0` is decided exactly by [`classify_rectangular`].
/// Otherwise candidates are taken up to sign, sorted by
/// `(|v|², |n|, |m|, m)`, and the first pair `i < j` in that order with an
/// orthogonal, rational-ratio match is returned.
pub fn classify(basis: &ExactLatticeBasis, coeff_bound: u64) -> Result<Verdict> {
    if coeff_bound < 1 {
        return Err(Error::PreconditionViolated("coeff_bound must be at least 1".into()));
    }
    let (w1, w2) = (&basis.omega1, &basis.omega2);
    if w1.dot(w2).is_zero() {
        let tau_sq = w2
            .norm_sqr()
            .checked_div(&w1.norm_sqr())
            .ok_or(Error::DegenerateLattice)?;
        let mut v = classify_rectangular(&tau_sq)?;
        if let Some(b) = ratio(&w1.norm_sqr(), &w2.norm_sqr()) {
            v.witness = Some(Witness { omega1: w1.clone(), omega2: w2.clone(), b, coords: Some([(1, 0), (0, 1)]) });
        }
        return Ok(v);
    }

    let k = coeff_bound as i64;
    let mut coords = Vec::new();
    for n in 0..=k {
        for m in -k..=k {
            if n > 0 || m > 0 {
                coords.push((m, n));
            }
        }
    }
    let mut cands: Vec<((i64, i64), ExactComplex, QuadScalar)> = coords
        .into_par_iter()
        .map(|(m, n)| {
            let v = basis.point(m, n);
            let norm = v.norm_sqr();
            ((m, n), v, norm)
        })
        .collect();
    cands.sort_by(|a, b| {
        a.2.cmp(&b.2)
            .then(a.0 .1.abs().cmp(&b.0 .1.abs()))
            .then(a.0 .0.abs().cmp(&b.0 .0.abs()))
            .then(a.0 .0.cmp(&b.0 .0))
    });

    let found = (0..cands.len()).into_par_iter().find_map_first(|i| {
        let (ci, vi, ni) = &cands[i];
        cands[i + 1..].iter().find_map(|(cj, vj, nj)| {
            if !vi.dot(vj).is_zero() {
                return None;
            }
            ratio(ni, nj).map(|b| Witness { omega1: vi.clone(), omega2: vj.clone(), b, coords: Some([*ci, *cj]) })
        })
    });
    Ok(match found {
        Some(w) => Verdict {
            kind: VerdictKind::ExistsWitness,
            witness: Some(w),
            search_bound: Some(coeff_bound),
            tau_sq: None,
            six_vectors: None,
        },
        None => Verdict {
            kind: VerdictKind::NotFoundUpToBound,
            witness: None,
            search_bound: Some(coeff_bound),
            tau_sq: None,
            six_vectors: None,
        },
    })
}

/// Exact and total decision for the rectangular lattice `(1, iτ)`.
pub fn classify_rectangular(tau_sq: &QuadScalar) -> Result<Verdict> {
    if tau_sq.signum() <= 0 {
        return Err(Error::NonRectangularInput);
    }
    let Some(t2) = tau_sq.as_rational() else {
        return Ok(Verdict {
            kind: VerdictKind::NoRectangularCase,
            witness: None,
            search_bound: None,
            tau_sq: Some(tau_sq.clone()),
            six_vectors: None,
        });
    };
    let tau = QuadScalar::sqrt_of_rational(t2)
        .ok_or_else(|| Error::InvalidArgument(format!("τ² = {} too large for exact square root", tau_sq)))?;
    let p = t2.numer().clone();
    let q = t2.denom().clone();
    let six = rectangular_witness_big(&p, &q, t2, &tau)?;
    let witness = Witness {
        omega1: ExactComplex::real(QuadScalar::one()),
        omega2: ExactComplex::imag(tau),
        b: t2.recip(),
        coords: None,
    };
    Ok(Verdict {
        kind: VerdictKind::ExistsWitness,
        witness: Some(witness),
        search_bound: None,
        tau_sq: Some(tau_sq.clone()),
        six_vectors: Some(six),
    })
}

/// Six vectors of squared norm `N` in `Z + iτZ` for `q·τ² = p`.
///
/// For `p ≠ q` these are `±(p−q) ± 2qτi` and `±(p+q)` with `N = (p+q)²`.
/// For `p = q` (square lattice) the first four collapse, so the vectors
/// `±5q` and `±3q ± 4qi` with `N = 25q²` are used.
pub fn rectangular_witness(p: u64, q: u64, tau_sq: &BigRational) -> Result<Vec<ExactComplex>> {
    if p == 0 || q == 0 {
        return Err(Error::PreconditionViolated("p and q must be positive".into()));
    }
    let tau = QuadScalar::sqrt_of_rational(tau_sq)
        .ok_or_else(|| Error::PreconditionViolated(format!("τ² = {} has no exact root", tau_sq)))?;
    rectangular_witness_big(&BigInt::from(p), &BigInt::from(q), tau_sq, &tau)
}

fn rectangular_witness_big(p: &BigInt, q: &BigInt, tau_sq: &BigRational, tau: &QuadScalar) -> Result<Vec<ExactComplex>> {
    if !p.is_positive() || !q.is_positive() {
        return Err(Error::PreconditionViolated("p and q must be positive".into()));
    }
    let pr = BigRational::from_integer(p.clone());
    let qr = BigRational::from_integer(q.clone());
    if &qr * tau_sq != pr {
        return Err(Error::PreconditionViolated(format!("q·τ² ≠ p for p = {}, q = {}, τ² = {}", p, q, tau_sq)));
    }
    let int = |x: BigRational| QuadScalar::rational(x);
    let (a, b, c) = if p == q {
        let three = BigRational::from_integer(3.into());
        let four = BigRational::from_integer(4.into());
        let five = BigRational::from_integer(5.into());
        // τ = 1 here, so 4q·τ is the imaginary part
        (int(&three * &qr), &int(&four * &qr) * tau, int(&five * &qr))
    } else {
        let two = BigRational::from_integer(2.into());
        (int(&pr - &qr), &int(&two * &qr) * tau, int(&pr + &qr))
    };
    let vectors = vec![
        ExactComplex::new(a.clone(), b.clone()),
        ExactComplex::new(a.clone(), -&b),
        ExactComplex::new(-&a, b.clone()),
        ExactComplex::new(-&a, -&b),
        ExactComplex::real(c.clone()),
        ExactComplex::real(-&c),
    ];
    let target = &c * &c;
    if vectors.iter().any(|v| v.norm_sqr() != target) {
        return Err(Error::PreconditionViolated("witness vectors have unequal norms".into()));
    }
    Ok(vectors)
}

/// Smallest `μ ≤ mu_max` carrying `#Γ′ ≥ 6`.
pub fn min_torus_eigenvalue(dual: &DualBasis, spin: SpinStructure, mu_max: f64) -> Result<Option<f64>> {
    if !(mu_max > 0.0) {
        return Err(Error::InvalidArgument(format!("mu_max must be positive, got {}", mu_max)));
    }
    Ok(spectrum_search(dual, spin, mu_max, 6)?.first().map(|r| r.mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn q(s: &str) -> QuadScalar {
        s.parse().unwrap()
    }

    fn cx(s: &str) -> ExactComplex {
        s.parse().unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn square_lattice() {
        let b = ExactLatticeBasis::new(cx("1,0"), cx("0,1")).unwrap();
        let v = classify(&b, 1).unwrap();
        assert!(v.exists());
        let w = v.witness.unwrap();
        assert_eq!(w.omega1, cx("1,0"));
        assert_eq!(w.omega2, cx("0,1"));
        assert_eq!(w.b, rat(1, 1));
        assert!(w.verify());
    }

    #[test]
    fn rectangular_sqrt2() {
        let b = ExactLatticeBasis::new(cx("1,0"), cx("0,sqrt(2)")).unwrap();
        let v = classify(&b, 1).unwrap();
        let w = v.witness.unwrap();
        assert_eq!(w.omega2, cx("0,sqrt(2)"));
        assert_eq!(w.b, rat(1, 2));
        assert!(w.verify());
    }

    #[test]
    fn hexagonal() {
        let b = ExactLatticeBasis::new(cx("1,0"), cx("1/2,1/2*sqrt(3)")).unwrap();
        let v = classify(&b, 2).unwrap();
        assert_eq!(v.kind, VerdictKind::ExistsWitness);
        let w = v.witness.unwrap();
        assert_eq!(w.omega1, cx("1,0"));
        assert_eq!(w.omega2, cx("0,sqrt(3)"));
        assert_eq!(w.coords, Some([(1, 0), (-1, 2)]));
        assert_eq!(w.b, rat(1, 3));
        assert!(w.verify());
    }

    #[test]
    fn not_found_within_small_bound() {
        // τ = 1/3 + i√2: the shortest orthogonal pair needs larger coefficients
        let b = ExactLatticeBasis::new(cx("1,0"), cx("1/3,sqrt(2)")).unwrap();
        let v = classify(&b, 1).unwrap();
        assert_eq!(v.kind, VerdictKind::NotFoundUpToBound);
        let v = classify(&b, 3).unwrap();
        assert!(v.exists());
        assert!(v.witness.unwrap().verify());
    }

    #[test]
    fn irrational_rectangular_lattice_is_no() {
        let b = ExactLatticeBasis::new(cx("1,0"), cx("0,1+sqrt(2)")).unwrap();
        assert_eq!(classify(&b, 4).unwrap().kind, VerdictKind::NoRectangularCase);
    }

    #[test]
    fn degenerate_and_bad_bound() {
        assert!(matches!(ExactLatticeBasis::new(cx("1,0"), cx("2,0")), Err(Error::DegenerateLattice)));
        let b = ExactLatticeBasis::new(cx("1,0"), cx("0,1")).unwrap();
        assert!(matches!(classify(&b, 0), Err(Error::PreconditionViolated(_))));
        assert!(ExactLatticeBasis::new(cx("1,sqrt(2)"), cx("0,sqrt(3)")).is_err());
    }

    #[test]
    fn dual_is_dual() {
        let g = ExactLatticeBasis::new(cx("1,0"), cx("1/2,1/2*sqrt(3)")).unwrap();
        let d = g.dual();
        let one = QuadScalar::one();
        assert_eq!(d.omega1().dot(g.omega1()), one);
        assert!(d.omega1().dot(g.omega2()).is_zero());
        assert!(d.omega2().dot(g.omega1()).is_zero());
        assert_eq!(d.omega2().dot(g.omega2()), one);
        assert_eq!(d.dual(), g);
    }

    #[test]
    fn rectangular_decisions() {
        assert!(classify_rectangular(&q("1")).unwrap().exists());
        let v = classify_rectangular(&q("2")).unwrap();
        let six = v.six_vectors.unwrap();
        let expected = ["1,2*sqrt(2)", "1,-2*sqrt(2)", "-1,2*sqrt(2)", "-1,-2*sqrt(2)", "3,0", "-3,0"];
        assert_eq!(six, expected.iter().map(|s| cx(s)).collect::<Vec<_>>());
        assert_eq!(classify_rectangular(&q("sqrt(2)")).unwrap().kind, VerdictKind::NoRectangularCase);
        assert!(matches!(classify_rectangular(&q("-2")), Err(Error::NonRectangularInput)));
    }

    #[test]
    fn witness_examples() {
        let six = rectangular_witness(5, 1, &rat(5, 1)).unwrap();
        assert!(six.iter().all(|v| v.norm_sqr() == QuadScalar::from_int(36)));
        assert!(six.contains(&cx("4,2*sqrt(5)")));
        let sq = rectangular_witness(1, 1, &rat(1, 1)).unwrap();
        assert_eq!(sq.len(), 6);
        assert!(sq.iter().all(|v| v.norm_sqr() == QuadScalar::from_int(25)));
        for i in 0..6 {
            for j in i + 1..6 {
                assert_ne!(sq[i], sq[j]);
            }
        }
        assert!(matches!(rectangular_witness(3, 1, &rat(2, 1)), Err(Error::PreconditionViolated(_))));
        assert!(matches!(rectangular_witness(0, 1, &rat(0, 1)), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn min_eigenvalue() {
        let sq = DualBasis::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)).unwrap();
        let mu = min_torus_eigenvalue(&sq, SpinStructure::TRIVIAL, 4.0).unwrap().unwrap();
        assert!((mu - 5f64.sqrt()).abs() < 1e-12);
        assert_eq!(min_torus_eigenvalue(&sq, SpinStructure::TRIVIAL, 2.0).unwrap(), None);
        let hex = DualBasis::new(Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.75f64.sqrt())).unwrap();
        let mu = min_torus_eigenvalue(&hex, SpinStructure::TRIVIAL, 3.0).unwrap().unwrap();
        assert!((mu - 1.0).abs() < 1e-12);
    }

    #[test]
    fn verdict_json() {
        let v = classify_rectangular(&q("2")).unwrap();
        let json = serde_json::to_value(&v).unwrap();
        assert_eq!(json["kind"], "ExistsWitness");
        assert_eq!(json["witness"]["b"], "1/2");
        assert_eq!(json["six_vectors"][0]["im"], "2*sqrt(2)");
    }

    proptest! {
        #[test]
        fn search_witnesses_verify(a in -3i64..=3, c in 1i64..4, b in -3i64..=3, d in prop::sample::select(vec![1u64, 2, 3, 5])) {
            let tau_re = QuadScalar::rational(rat(a, c));
            let tau_im = QuadScalar::new(rat(0, 1), rat(b.abs() + 1, c), d);
            let basis = ExactLatticeBasis::new(ExactComplex::real(QuadScalar::one()), ExactComplex::new(tau_re, tau_im)).unwrap();
            let v = classify(&basis, 3).unwrap();
            if let Some(w) = &v.witness {
                prop_assert!(w.verify());
            }
            prop_assert_eq!(v.exists(), v.witness.is_some());
        }
    }
}
