//! Closing conditions for the eigen-spinor ansatz and the three-pick
//! coefficient construction.
//!
//! With `ν = ω + ω₀` and `ω′ = −ω − 2ω₀` the involution partner of `ω`, the
//! immersion closes to a torus iff
//!
//! ```text
//! r1 = Σ |a_ω|² ν          = 0
//! r2 = Σ a_ω a_ω′          = 0
//! r3 = Σ a_ω a_ω′ conj(ν)² = 0
//! ```

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::SpectralSet;

/// Relative threshold under which two components of `v₂` count as equal.
pub const PICK_DEGENERACY_TOL: f64 = 1e-10;

/// Coefficients `a_ω` keyed by the integer coordinates of `ω`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CoefficientVector {
    entries: BTreeMap<(i64, i64), Complex64>,
}

impl CoefficientVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, coords: (i64, i64), a: Complex64) {
        self.entries.insert(coords, a);
    }

    pub fn get(&self, coords: (i64, i64)) -> Complex64 {
        self.entries.get(&coords).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((i64, i64), Complex64)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(|a| a.norm_sqr() == 0.0)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        CoefficientVector { entries: self.entries.iter().map(|(k, v)| (*k, f(*v))).collect() }
    }

    pub fn check_keys(&self, set: &SpectralSet) -> Result<()> {
        match self.entries.keys().find(|k| !set.contains(**k)) {
            Some(k) => Err(Error::KeyOutsideSpectralSet(*k)),
            None => Ok(()),
        }
    }
}

impl FromIterator<((i64, i64), Complex64)> for CoefficientVector {
    fn from_iter<T: IntoIterator<Item = ((i64, i64), Complex64)>>(iter: T) -> Self {
        CoefficientVector { entries: iter.into_iter().collect() }
    }
}

/// The left-hand sides of the three closing conditions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosingResiduals {
    pub r1: Complex64,
    pub r2: Complex64,
    pub r3: Complex64,
}

impl ClosingResiduals {
    pub fn max_norm(&self) -> f64 {
        self.r1.norm().max(self.r2.norm()).max(self.r3.norm())
    }

    pub fn norms(&self) -> [f64; 3] {
        [self.r1.norm(), self.r2.norm(), self.r3.norm()]
    }
}

pub fn closing_residuals(set: &SpectralSet, a: &CoefficientVector) -> Result<ClosingResiduals> {
    a.check_keys(set)?;
    let zero = Complex64::new(0.0, 0.0);
    let (mut r1, mut r2, mut r3) = (zero, zero, zero);
    for p in set.elements() {
        let aw = a.get(p.coords);
        let partner = a.get(set.partner_coords(p.coords));
        let nu = set.shifted(p.coords);
        r1 += nu * aw.norm_sqr();
        let prod = aw * partner;
        r2 += prod;
        r3 += prod * nu.conj() * nu.conj();
    }
    Ok(ClosingResiduals { r1, r2, r3 })
}

/// Options for [`construct_coefficients`].
#[derive(Clone, Copy, Debug)]
pub struct PickPolicy {
    /// Only accept picks with `Re(ω) ≥ 0`.
    pub right_half_plane: bool,
}

impl Default for PickPolicy {
    fn default() -> Self {
        PickPolicy { right_half_plane: true }
    }
}

fn validate_picks(set: &SpectralSet, picks: &[(i64, i64); 3], policy: PickPolicy) -> Result<()> {
    if set.len() < 6 {
        return Err(Error::TooFewFrequencies(set.len()));
    }
    for &p in picks {
        if !set.contains(p) {
            return Err(Error::NotInSet(p));
        }
        if policy.right_half_plane && set.get(p).map(|e| e.value.re).unwrap_or(0.0) < -1e-12 {
            return Err(Error::DegeneratePicks(format!("pick {:?} has Re(ω) < 0", p)));
        }
    }
    for i in 0..3 {
        for j in 0..3 {
            if i < j && picks[i] == picks[j] {
                return Err(Error::DegeneratePicks(format!("pick {:?} repeated", picks[i])));
            }
            if set.partner_coords(picks[i]) == picks[j] {
                return Err(Error::DegeneratePicks(format!(
                    "picks {:?} and {:?} are involution partners",
                    picks[i], picks[j]
                )));
            }
        }
    }
    Ok(())
}

fn pick_weights(set: &SpectralSet, picks: &[(i64, i64); 3]) -> [Complex64; 3] {
    picks.map(|p| {
        let nu = set.shifted(p).conj();
        nu * nu
    })
}

fn weights_degenerate(w: &[Complex64; 3]) -> bool {
    let scale = w.iter().map(|x| x.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    (0..3).any(|i| (i + 1..3).any(|j| (w[i] - w[j]).norm() < PICK_DEGENERACY_TOL * scale))
}

/// Builds a closed coefficient vector from three picks.
///
/// `v₀ = (1,1,1) × (w₁,w₂,w₃)` with `wᵢ = conj(ωᵢ+ω₀)²`; `aᵢ = √(seed·v₀ᵢ)`
/// on the principal branch, `a_{−ωᵢ−2ω₀} = i·aᵢ`, all other entries zero.
pub fn construct_coefficients(
    set: &SpectralSet,
    picks: [(i64, i64); 3],
    seed_scale: Complex64,
    policy: PickPolicy,
) -> Result<CoefficientVector> {
    validate_picks(set, &picks, policy)?;
    let w = pick_weights(set, &picks);
    if weights_degenerate(&w) {
        return Err(Error::DegeneratePicks("conj(ω+ω₀)² coincide for two picks".into()));
    }
    let v0 = [w[2] - w[1], w[0] - w[2], w[1] - w[0]];
    let mut out = CoefficientVector::new();
    for p in &set.elements().iter().map(|e| e.coords).collect::<Vec<_>>() {
        out.set(*p, Complex64::new(0.0, 0.0));
    }
    let i = Complex64::new(0.0, 1.0);
    for (k, &pick) in picks.iter().enumerate() {
        let a = (seed_scale * v0[k]).sqrt();
        out.set(pick, a);
        out.set(set.partner_coords(pick), i * a);
    }
    Ok(out)
}

/// First admissible pick triple in coordinate order, if any.
pub fn auto_picks(set: &SpectralSet, policy: PickPolicy) -> Option<[(i64, i64); 3]> {
    let pool: Vec<(i64, i64)> = set
        .elements()
        .iter()
        .filter(|e| !policy.right_half_plane || e.value.re >= -1e-12)
        .map(|e| e.coords)
        .collect();
    for a in 0..pool.len() {
        for b in a + 1..pool.len() {
            for c in b + 1..pool.len() {
                let picks = [pool[a], pool[b], pool[c]];
                if validate_picks(set, &picks, policy).is_ok() && !weights_degenerate(&pick_weights(set, &picks)) {
                    return Some(picks);
                }
            }
        }
    }
    None
}

/// Dimension of the space of orbit products `x_O = a_ω a_ω′` solving the
/// `r2 = r3 = 0`: `#orbits − rank [1 … 1; w₁ … w_k]`.
///
/// This is 0 whenever `#Γ′ ≤ 4` and at least 1 once there are three orbits.
pub fn nontrivial_solution_space_dim(set: &SpectralSet) -> usize {
    let mut weights: Vec<Complex64> = Vec::new();
    for p in set.elements() {
        let partner = set.partner_coords(p.coords);
        if p.coords <= partner || !set.contains(partner) {
            let nu = set.shifted(p.coords).conj();
            weights.push(nu * nu);
        }
    }
    let k = weights.len();
    if k == 0 {
        return 0;
    }
    let scale = weights.iter().map(|w| w.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let distinct = weights
        .iter()
        .any(|w| (w - weights[0]).norm() > PICK_DEGENERACY_TOL * scale);
    let rank = if distinct { 2 } else { 1 };
    k.saturating_sub(rank)
}
