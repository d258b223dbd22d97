//! Quaternions in the complex-pair representation `H = C ⊕ jC`.
//!
//! A quaternion is stored as `p + j·q` with `p, q` complex. Complex scalars
//! act from the right, and `j·c = conj(c)·j` for every complex `c`, so
//!
//! ```text
//! (a₁ + j a₂)(b₁ + j b₂) = (a₁b₁ − conj(a₂)b₂) + j(conj(a₁)b₂ + a₂b₁)
//! ```
//!
//! Imaginary quaternions are identified with R³ along `(i, j, k)`:
//! `p = i·x₁`, `q = x₂ + i·x₃` maps to `(x₁, x₂, −x₃)`, because
//! `j(x₂ + i x₃) = x₂ j − x₃ k`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `Re(p)` accepted by [`Quaternion::to_r3`].
pub const IMAGINARY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion {
    pub p: Complex64,
    pub q: Complex64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    pub const ONE: Quaternion = Quaternion::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    pub const I: Quaternion = Quaternion::new(Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0));
    pub const J: Quaternion = Quaternion::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    /// `k = i·j`, which is `j·(−i)` in the pair representation.
    pub const K: Quaternion = Quaternion::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0));

    pub const fn new(p: Complex64, q: Complex64) -> Self {
        Quaternion { p, q }
    }

    pub fn from_complex(c: Complex64) -> Self {
        Quaternion::new(c, Complex64::new(0.0, 0.0))
    }

    /// `j·c`.
    pub fn j_times(c: Complex64) -> Self {
        Quaternion::new(Complex64::new(0.0, 0.0), c)
    }

    /// The imaginary quaternion `x₁ i + x₂ j + x₃ k`.
    pub fn from_r3(x: [f64; 3]) -> Self {
        Quaternion::new(Complex64::new(0.0, x[0]), Complex64::new(x[1], -x[2]))
    }

    pub fn real(&self) -> f64 {
        self.p.re
    }

    /// `conj(p + jq) = conj(p) − jq`.
    pub fn conj(&self) -> Self {
        Quaternion::new(self.p.conj(), -self.q)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.p.norm_sqr() + self.q.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Quaternion::new(self.p * s, self.q * s)
    }

    /// Right multiplication by a complex scalar: `(p + jq)·c = pc + j(qc)`.
    pub fn mul_complex(&self, c: Complex64) -> Self {
        Quaternion::new(self.p * c, self.q * c)
    }

    /// Coordinates along `(i, j, k)` of the imaginary part, ignoring `Re(p)`.
    pub fn vector_part(&self) -> [f64; 3] {
        [self.p.im, self.q.re, -self.q.im]
    }

    /// Coordinates along `(i, j, k)`; fails if the quaternion has a real part.
    pub fn to_r3(&self) -> Result<[f64; 3]> {
        if self.p.re.abs() > IMAGINARY_TOL {
            return Err(Error::NonImaginary(self.p.re));
        }
        Ok(self.vector_part())
    }

    pub fn is_finite(&self) -> bool {
        self.p.is_finite() && self.q.is_finite()
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, rhs: Quaternion) -> Quaternion {
        Quaternion::new(self.p + rhs.p, self.q + rhs.q)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, rhs: Quaternion) {
        self.p += rhs.p;
        self.q += rhs.q;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, rhs: Quaternion) -> Quaternion {
        Quaternion::new(self.p - rhs.p, self.q - rhs.q)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.p, -self.q)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, rhs: Quaternion) -> Quaternion {
        Quaternion::new(
            self.p * rhs.p - self.q.conj() * rhs.q,
            self.p.conj() * rhs.q + self.q * rhs.p,
        )
    }
}

impl Mul<Complex64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, rhs: Complex64) -> Quaternion {
        self.mul_complex(rhs)
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, rhs: f64) -> Quaternion {
        self.scale(rhs)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z] = self.vector_part();
        write!(f, "{} + {}i + {}j + {}k", self.p.re, x, y, z)
    }
}

/// A quaternion with vanishing real part, i.e. a point of R³.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImaginaryQuaternion(Quaternion);

impl ImaginaryQuaternion {
    pub fn new(q: Quaternion) -> Result<Self> {
        if q.p.re.abs() > IMAGINARY_TOL {
            return Err(Error::NonImaginary(q.p.re));
        }
        Ok(ImaginaryQuaternion(Quaternion::new(Complex64::new(0.0, q.p.im), q.q)))
    }

    pub fn from_r3(x: [f64; 3]) -> Self {
        ImaginaryQuaternion(Quaternion::from_r3(x))
    }

    pub fn to_r3(&self) -> [f64; 3] {
        self.0.vector_part()
    }

    pub fn quaternion(&self) -> Quaternion {
        self.0
    }

    /// The stretch rotation `conj(λ)·v·λ`.
    pub fn sandwich(&self, lambda: Quaternion) -> ImaginaryQuaternion {
        let v = lambda.conj() * self.0 * lambda;
        ImaginaryQuaternion(Quaternion::new(Complex64::new(0.0, v.p.im), v.q))
    }
}
