//! The spectral set `Γ′ = {ω ∈ Γ* : |ω + ω₀|² = μ²}` and eigenvalue search.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::{coordinate_box, DualBasis, LatticePoint, SpinStructure};

/// Default relative tolerance for circle membership on the floating-point path.
pub const DEFAULT_TOL: f64 = 1e-9;

/// An eigenvalue `μ > 0`, optionally carrying `μ²` as an exact rational.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigenvalue {
    value: f64,
    exact_sq: Option<BigRational>,
}

impl Eigenvalue {
    pub fn from_f64(mu: f64) -> Self {
        Eigenvalue { value: mu, exact_sq: None }
    }

    /// `μ = √r` for an exact rational `r`.
    pub fn sqrt_of(r: BigRational) -> Self {
        let value = r.to_f64().unwrap_or(f64::NAN).sqrt();
        Eigenvalue { value, exact_sq: Some(r) }
    }

    /// `μ = r` for an exact rational `r ≥ 0`.
    pub fn from_rational(r: BigRational) -> Self {
        let value = r.to_f64().unwrap_or(f64::NAN);
        Eigenvalue { value, exact_sq: Some(&r * &r) }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact_sq(&self) -> Option<&BigRational> {
        self.exact_sq.as_ref()
    }
}

impl fmt::Display for Eigenvalue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact_sq {
            Some(r) if !r.is_integer() || !is_perfect_square(r.numer()) => {
                write!(f, "sqrt({})", r)
            }
            _ => write!(f, "{}", self.value),
        }
    }
}

fn is_perfect_square(n: &BigInt) -> bool {
    if n < &BigInt::zero() {
        return false;
    }
    let r = n.sqrt();
    &(&r * &r) == n
}

/// Parses a decimal or fraction literal (`"3"`, `"-1.25"`, `"2/3"`) exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let err = || Error::Parse(format!("not a rational number: {:?}", s));
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_rational(num)?;
        let d = parse_rational(den)?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(n / d);
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        return Err(err());
    }
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(idx) => (&body[..idx], body[idx + 1..].parse::<i32>().map_err(|_| err())?),
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{}{}", int_part, frac_part);
    let numer = BigInt::from_str(&digits).map_err(|_| err())?;
    let exp10 = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(numer);
    if exp10 >= 0 {
        r *= BigRational::from_integer(ten.pow(exp10 as u32));
    } else {
        r /= BigRational::from_integer(ten.pow((-exp10) as u32));
    }
    Ok(if neg { -r } else { r })
}

impl FromStr for Eigenvalue {
    type Err = Error;

    /// Accepts `sqrtN`, `sqrt(N)` (N rational) or a plain decimal/fraction.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let mu = if let Some(rest) = t.strip_prefix("sqrt") {
            let inner = rest
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .unwrap_or(rest);
            Eigenvalue::sqrt_of(parse_rational(inner)?)
        } else {
            Eigenvalue::from_rational(parse_rational(t)?)
        };
        if !(mu.value > 0.0) {
            return Err(Error::InvalidArgument(format!("eigenvalue must be positive: {}", s)));
        }
        Ok(mu)
    }
}

/// `Γ′` together with the data it was computed from.
#[derive(Clone, Debug)]
pub struct SpectralSet {
    dual: DualBasis,
    spin: SpinStructure,
    mu: Eigenvalue,
    omega0: Complex64,
    elements: Vec<LatticePoint>,
}

impl SpectralSet {
    /// Assembles a set from explicit coordinates without checking circle membership.
    ///
    /// Used for reloading serialized sets and for diagnostics on deliberately
    /// corrupted inputs.
    pub fn from_coords(
        dual: DualBasis,
        spin: SpinStructure,
        mu: Eigenvalue,
        coords: impl IntoIterator<Item = (i64, i64)>,
    ) -> Self {
        let mut elements: Vec<LatticePoint> = coords
            .into_iter()
            .map(|(m, n)| LatticePoint { coords: (m, n), value: dual.point(m as f64, n as f64) })
            .collect();
        elements.sort_by_key(|p| p.coords);
        elements.dedup_by_key(|p| p.coords);
        let omega0 = spin.omega0(&dual);
        SpectralSet { dual, spin, mu, omega0, elements }
    }

    pub fn mu(&self) -> f64 {
        self.mu.value()
    }

    pub fn eigenvalue(&self) -> &Eigenvalue {
        &self.mu
    }

    pub fn omega0(&self) -> Complex64 {
        self.omega0
    }

    pub fn spin(&self) -> SpinStructure {
        self.spin
    }

    pub fn dual(&self) -> &DualBasis {
        &self.dual
    }

    pub fn elements(&self) -> &[LatticePoint] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, coords: (i64, i64)) -> bool {
        self.get(coords).is_some()
    }

    pub fn get(&self, coords: (i64, i64)) -> Option<&LatticePoint> {
        self.elements
            .binary_search_by_key(&coords, |p| p.coords)
            .ok()
            .map(|i| &self.elements[i])
    }

    /// Coordinates of `−ω − 2ω₀`, without membership checks.
    pub fn partner_coords(&self, coords: (i64, i64)) -> (i64, i64) {
        let (t1, t2) = self.spin.twice();
        (-coords.0 - t1, -coords.1 - t2)
    }

    /// `ω + ω₀` for an element given by coordinates.
    pub fn shifted(&self, coords: (i64, i64)) -> Complex64 {
        let (s1, s2) = self.spin.halves();
        self.dual.point(coords.0 as f64 + s1, coords.1 as f64 + s2)
    }
}

/// `|ω + ω₀|²` exactly, when the dual Gram matrix is exact.
fn exact_norm(dual: &DualBasis, spin: SpinStructure, coords: (i64, i64)) -> Option<BigRational> {
    let gram = dual.exact_gram()?;
    let (t1, t2) = spin.twice();
    let two = BigInt::from(2);
    let x = BigRational::new(BigInt::from(2 * coords.0 + t1), two.clone());
    let y = BigRational::new(BigInt::from(2 * coords.1 + t2), two);
    Some(gram.norm(&x, &y))
}

fn candidates(dual: &DualBasis, spin: SpinStructure, radius: f64) -> Vec<(i64, i64)> {
    let center = -spin.omega0(dual);
    let ((m0, m1), (n0, n1)) = coordinate_box(dual, center, radius);
    let mut out = Vec::new();
    for m in m0..=m1 {
        for n in n0..=n1 {
            out.push((m, n));
        }
    }
    out
}

/// Computes `Γ′` for eigenvalue `μ`.
///
/// Membership is decided exactly when both the dual Gram matrix and `μ²` are
/// exact rationals; otherwise `| |ω+ω₀|² − μ² | ≤ tol·μ²`.
pub fn spectral_set(
    dual: &DualBasis,
    spin: SpinStructure,
    mu: &Eigenvalue,
    tol: f64,
) -> Result<SpectralSet> {
    let m = mu.value();
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::InvalidArgument(format!("eigenvalue must be positive, got {}", m)));
    }
    if !(tol >= 0.0) {
        return Err(Error::InvalidArgument("tolerance must be non-negative".into()));
    }
    let exact_target = match (dual.exact_gram(), mu.exact_sq()) {
        (Some(_), Some(sq)) => Some(sq.clone()),
        _ => None,
    };
    let mu_sq = m * m;
    let radius = m * (1.0 + tol).sqrt() + 1e-9;
    let coords = candidates(dual, spin, radius).into_iter().filter(|&c| {
        if let Some(target) = &exact_target {
            exact_norm(dual, spin, c).as_ref() == Some(target)
        } else {
            let (s1, s2) = spin.halves();
            let v = dual.point(c.0 as f64 + s1, c.1 as f64 + s2);
            (v.norm_sqr() - mu_sq).abs() <= tol * mu_sq
        }
    });
    let coords: Vec<_> = coords.collect();
    Ok(SpectralSet::from_coords(dual.clone(), spin, mu.clone(), coords))
}

/// `ω ↦ −ω − 2ω₀`, which maps `Γ′` onto itself.
pub fn involution(set: &SpectralSet, coords: (i64, i64)) -> Result<LatticePoint> {
    if !set.contains(coords) {
        return Err(Error::NotInSet(coords));
    }
    let partner = set.partner_coords(coords);
    set.get(partner).copied().ok_or(Error::NotInSet(partner))
}

/// One row of the eigenvalue table.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumEntry {
    pub mu: f64,
    /// `μ²` as an exact rational when available.
    pub mu_sq_exact: Option<BigRational>,
    pub cardinality: usize,
}

/// All `μ ≤ mu_max` with `#Γ′ ≥ min_card`, ascending.
pub fn spectrum_search(
    dual: &DualBasis,
    spin: SpinStructure,
    mu_max: f64,
    min_card: usize,
) -> Result<Vec<SpectrumEntry>> {
    if !(mu_max > 0.0) || !mu_max.is_finite() {
        return Err(Error::InvalidArgument(format!("mu_max must be positive, got {}", mu_max)));
    }
    if min_card < 2 {
        return Err(Error::InvalidArgument(format!("min_card must be at least 2, got {}", min_card)));
    }
    let radius = mu_max * (1.0 + 1e-9);
    let (s1, s2) = spin.halves();
    let pts = candidates(dual, spin, radius);

    let mut rows = Vec::new();
    if dual.exact_gram().is_some() {
        let limit = BigRational::from_float(radius).expect("finite");
        let limit = &limit * &limit;
        let mut groups: BTreeMap<BigRational, usize> = BTreeMap::new();
        for c in pts {
            let norm = exact_norm(dual, spin, c).expect("exact gram");
            if norm.is_zero() || norm > limit {
                continue;
            }
            *groups.entry(norm).or_default() += 1;
        }
        for (norm, count) in groups {
            if count >= min_card {
                let mu = norm.to_f64().unwrap_or(f64::NAN).sqrt();
                rows.push(SpectrumEntry { mu, mu_sq_exact: Some(norm), cardinality: count });
            }
        }
    } else {
        let mut norms: Vec<f64> = pts
            .into_iter()
            .map(|c| dual.point(c.0 as f64 + s1, c.1 as f64 + s2).norm_sqr())
            .filter(|&n| n > 1e-24 && n <= radius * radius)
            .collect();
        norms.sort_by(f64::total_cmp);
        let mut i = 0;
        while i < norms.len() {
            let start = norms[i];
            let mut j = i;
            while j < norms.len() && norms[j] - start <= 1e-9 * start {
                j += 1;
            }
            let count = j - i;
            let mean = norms[i..j].iter().sum::<f64>() / count as f64;
            if count >= min_card && mean.sqrt() <= mu_max * (1.0 + 1e-9) {
                rows.push(SpectrumEntry { mu: mean.sqrt(), mu_sq_exact: None, cardinality: count });
            }
            i = j;
        }
    }
    Ok(rows)
}
