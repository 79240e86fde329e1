//! Scalar quaternions, imaginary units and slice coordinates.
//!
//! A quaternion is written `q = q0 + q1*e1 + q2*e2 + q3*e3` over the basis
//! `{1, e1, e2, e3}` with `e1*e2 = e3`, `e2*e3 = e1`, `e3*e1 = e2` and
//! `ek*ek = -1`.  Every non-real quaternion lies on exactly one *slice*
//! `C_i = { u + i*v : u, v real }` through a unit imaginary `i`, and the
//! upper half `v >= 0` of a fixed slice parametrises quaternions up to the
//! axial symmetry `u + i*v ~ u + i'*v`.

use crate::error::{Error, Result};
use serde::de::{SeqAccess, Visitor};
use serde::ser::SerializeTuple;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// A quaternion with real components along `1, e1, e2, e3`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    /// Real part.
    pub re: f64,
    /// Component along `e1`.
    pub i: f64,
    /// Component along `e2`.
    pub j: f64,
    /// Component along `e3`.
    pub k: f64,
}

impl Quaternion {
    /// The additive identity.
    pub const ZERO: Quaternion = Quaternion { re: 0.0, i: 0.0, j: 0.0, k: 0.0 };
    /// The multiplicative identity.
    pub const ONE: Quaternion = Quaternion { re: 1.0, i: 0.0, j: 0.0, k: 0.0 };
    /// The basis element `e1`.
    pub const E1: Quaternion = Quaternion { re: 0.0, i: 1.0, j: 0.0, k: 0.0 };
    /// The basis element `e2`.
    pub const E2: Quaternion = Quaternion { re: 0.0, i: 0.0, j: 1.0, k: 0.0 };
    /// The basis element `e3`.
    pub const E3: Quaternion = Quaternion { re: 0.0, i: 0.0, j: 0.0, k: 1.0 };

    /// Builds a quaternion from its four components.
    pub const fn new(re: f64, i: f64, j: f64, k: f64) -> Self {
        Quaternion { re, i, j, k }
    }

    /// Embeds a real number.
    pub const fn real(r: f64) -> Self {
        Quaternion { re: r, i: 0.0, j: 0.0, k: 0.0 }
    }

    /// The conjugate `q0 - q1*e1 - q2*e2 - q3*e3`.
    pub fn conj(self) -> Self {
        Quaternion { re: self.re, i: -self.i, j: -self.j, k: -self.k }
    }

    /// Squared Euclidean norm `|q|^2 = q * conj(q)`.
    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.i * self.i + self.j * self.j + self.k * self.k
    }

    /// Euclidean norm `|q|`.
    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Norm of the imaginary part `sqrt(q1^2 + q2^2 + q3^2)`.
    pub fn imag_norm(self) -> f64 {
        (self.i * self.i + self.j * self.j + self.k * self.k).sqrt()
    }

    /// The imaginary part as a quaternion with zero real component.
    pub fn imag(self) -> Self {
        Quaternion { re: 0.0, i: self.i, j: self.j, k: self.k }
    }

    /// Multiplicative inverse `conj(q) / |q|^2`.
    ///
    /// Errors with [`Error::ZeroDivision`] when `|q| = 0`.
    pub fn inverse(self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return Err(Error::ZeroDivision);
        }
        Ok(self.conj() * (1.0 / n2))
    }

    /// Whether all four components are finite.
    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.i.is_finite() && self.j.is_finite() && self.k.is_finite()
    }

    /// Componentwise maximum absolute value.
    pub fn max_abs_component(self) -> f64 {
        self.re.abs().max(self.i.abs()).max(self.j.abs()).max(self.k.abs())
    }

    /// Splits `q = u + i*v` into upper-half-slice coordinates.
    ///
    /// Returns the unique `(u, v, i)` with `v > 0` when `q` is not real; a
    /// real `q` has `v = 0` and inherits the caller's `default_unit` so that
    /// downstream formulas stay well defined.  Re-embedding via
    /// [`SlicePoint::embed`] reproduces `q` up to roundoff.
    pub fn slice_split(self, default_unit: ImaginaryUnit) -> SlicePoint {
        let v = self.imag_norm();
        if v == 0.0 {
            return SlicePoint { u: self.re, v: 0.0, unit: default_unit };
        }
        let unit = ImaginaryUnit(Quaternion {
            re: 0.0,
            i: self.i / v,
            j: self.j / v,
            k: self.k / v,
        });
        SlicePoint { u: self.re, v, unit }
    }

    /// The representative `Re(q) + unit * |Im(q)|` of the sphere through `q`
    /// on the upper half of the slice `C_unit`.
    pub fn sphere_representative(self, unit: ImaginaryUnit) -> Quaternion {
        Quaternion::real(self.re) + unit.as_quaternion() * self.imag_norm()
    }

    /// Componentwise linear interpolation helper used by tests.
    pub fn components(self) -> [f64; 4] {
        [self.re, self.i, self.j, self.k]
    }

    /// Builds a quaternion from a `[1, e1, e2, e3]` component array.
    pub fn from_components(c: [f64; 4]) -> Self {
        Quaternion { re: c[0], i: c[1], j: c[2], k: c[3] }
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}e1{:+}e2{:+}e3", self.re, self.i, self.j, self.k)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, rhs: Quaternion) -> Quaternion {
        Quaternion {
            re: self.re + rhs.re,
            i: self.i + rhs.i,
            j: self.j + rhs.j,
            k: self.k + rhs.k,
        }
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, rhs: Quaternion) {
        *self = *self + rhs;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, rhs: Quaternion) -> Quaternion {
        Quaternion {
            re: self.re - rhs.re,
            i: self.i - rhs.i,
            j: self.j - rhs.j,
            k: self.k - rhs.k,
        }
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, rhs: Quaternion) {
        *self = *self - rhs;
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion { re: -self.re, i: -self.i, j: -self.j, k: -self.k }
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        // Hamilton product in the e1*e2 = e3 orientation.
        Quaternion {
            re: self.re * q.re - self.i * q.i - self.j * q.j - self.k * q.k,
            i: self.re * q.i + self.i * q.re + self.j * q.k - self.k * q.j,
            j: self.re * q.j - self.i * q.k + self.j * q.re + self.k * q.i,
            k: self.re * q.k + self.i * q.j - self.j * q.i + self.k * q.re,
        }
    }
}

impl MulAssign for Quaternion {
    fn mul_assign(&mut self, rhs: Quaternion) {
        *self = *self * rhs;
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, s: f64) -> Quaternion {
        Quaternion { re: self.re * s, i: self.i * s, j: self.j * s, k: self.k * s }
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;
    fn div(self, s: f64) -> Quaternion {
        self * (1.0 / s)
    }
}

// Quaternions serialize as plain `[q0, q1, q2, q3]` arrays.
impl Serialize for Quaternion {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = serializer.serialize_tuple(4)?;
        t.serialize_element(&self.re)?;
        t.serialize_element(&self.i)?;
        t.serialize_element(&self.j)?;
        t.serialize_element(&self.k)?;
        t.end()
    }
}

impl<'de> Deserialize<'de> for Quaternion {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct QVisitor;
        impl<'de> Visitor<'de> for QVisitor {
            type Value = Quaternion;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an array of four real components")
            }
            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<Quaternion, A::Error> {
                let mut c = [0.0; 4];
                for (idx, slot) in c.iter_mut().enumerate() {
                    *slot = seq
                        .next_element()?
                        .ok_or_else(|| serde::de::Error::invalid_length(idx, &self))?;
                }
                if seq.next_element::<f64>()?.is_some() {
                    return Err(serde::de::Error::invalid_length(5, &self));
                }
                Ok(Quaternion::from_components(c))
            }
        }
        deserializer.deserialize_tuple(4, QVisitor)
    }
}

/// A unit quaternion with zero real part, i.e. a point of the imaginary
/// sphere.  Slice units select the half-plane `C_j^+` on which spectra and
/// measures are represented.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ImaginaryUnit(Quaternion);

impl ImaginaryUnit {
    /// The default slice unit `e1`.
    pub const DEFAULT: ImaginaryUnit = ImaginaryUnit(Quaternion::E1);
    /// The unit `e1`.
    pub const E1: ImaginaryUnit = ImaginaryUnit(Quaternion::E1);
    /// The unit `e2`.
    pub const E2: ImaginaryUnit = ImaginaryUnit(Quaternion::E2);
    /// The unit `e3`.
    pub const E3: ImaginaryUnit = ImaginaryUnit(Quaternion::E3);

    /// Validates that `q` is a unit imaginary quaternion within `tol` and
    /// normalizes it exactly onto the imaginary sphere.
    pub fn new(q: Quaternion, tol: f64) -> Result<Self> {
        let norm = q.norm();
        if q.re.abs() > tol || (norm - 1.0).abs() > tol {
            return Err(Error::NotImaginaryUnit { re_abs: q.re.abs(), norm });
        }
        let v = q.imag_norm();
        if v == 0.0 {
            return Err(Error::NotImaginaryUnit { re_abs: q.re.abs(), norm });
        }
        Ok(ImaginaryUnit(Quaternion { re: 0.0, i: q.i / v, j: q.j / v, k: q.k / v }))
    }

    /// The underlying quaternion.
    pub fn as_quaternion(self) -> Quaternion {
        self.0
    }

    /// Embeds slice coordinates `(u, v)` as `u + self * v`.
    pub fn embed(self, u: f64, v: f64) -> Quaternion {
        Quaternion::real(u) + self.0 * v
    }

    /// A unit quaternion `a` with `a^-1 * self * a = target`.
    ///
    /// The rotation follows the geodesic between the two units on the
    /// imaginary sphere and degenerates to the identity when they already
    /// coincide.  For antipodal units the axis is chosen deterministically
    /// among the coordinate directions orthogonal to `self`.
    pub fn rotation_to(self, target: ImaginaryUnit) -> Quaternion {
        let u = self.0;
        let w = target.0;
        let r = Quaternion::ONE - u * w;
        let n = r.norm();
        if n > 1e-8 {
            return r / n;
        }
        // Antipodal: rotate by pi about any unit imaginary orthogonal to u.
        let candidates = [Quaternion::E1, Quaternion::E2, Quaternion::E3];
        let mut best = Quaternion::E1;
        let mut best_dot = f64::INFINITY;
        for c in candidates {
            let dot = (u.i * c.i + u.j * c.j + u.k * c.k).abs();
            if dot < best_dot {
                best_dot = dot;
                best = c;
            }
        }
        let dot = u.i * best.i + u.j * best.j + u.k * best.k;
        let ortho = best - u * dot;
        ortho / ortho.norm()
    }
}

impl<'de> Deserialize<'de> for ImaginaryUnit {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let q = Quaternion::deserialize(deserializer)?;
        ImaginaryUnit::new(q, 1e-12).map_err(serde::de::Error::custom)
    }
}

/// Coordinates `u + unit * v` of a point on the closed upper half of the
/// slice `C_unit`, with `v >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlicePoint {
    /// Real coordinate.
    pub u: f64,
    /// Imaginary coordinate, nonnegative.
    pub v: f64,
    /// The slice unit.
    pub unit: ImaginaryUnit,
}

impl SlicePoint {
    /// Re-embeds the coordinates as a quaternion.
    pub fn embed(self) -> Quaternion {
        self.unit.embed(self.u, self.v)
    }
}
