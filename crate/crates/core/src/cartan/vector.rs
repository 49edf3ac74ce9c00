use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The group SL(n, R); its Cartan subalgebra is the zero-sum hyperplane of R^n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbientGroup {
    n: usize,
}

impl AmbientGroup {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("SL(n) needs n >= 2, got {n}")));
        }
        Ok(AmbientGroup { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.n - 1
    }
}

/// A point of the Cartan subalgebra: a real vector of length n with zero sum.
///
/// Cartan and Jordan projections, cone directions and evaluation points of
/// linear forms are all carried by this type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CartanVector(Vec<f64>);

impl CartanVector {
    /// Checks finiteness and the zero-sum condition (relative to the vector's scale).
    pub fn new(coords: Vec<f64>, tol: f64) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::invalid("Cartan vectors need at least two coordinates"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("non-finite coordinate"));
        }
        let sum: f64 = coords.iter().sum();
        let scale = coords.iter().fold(1.0_f64, |m, c| m.max(c.abs()));
        if sum.abs() > tol * scale {
            return Err(Error::invalid(format!("coordinates sum to {sum}, expected 0")));
        }
        Ok(CartanVector(coords))
    }

    /// Subtracts the mean so the coordinates sum to zero.
    pub fn recentered(mut coords: Vec<f64>) -> Self {
        let mean = coords.iter().sum::<f64>() / coords.len() as f64;
        for c in &mut coords {
            *c -= mean;
        }
        CartanVector(coords)
    }

    /// Wraps coordinates already known to sum to zero.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        CartanVector(coords)
    }

    pub fn zero(n: usize) -> Self {
        CartanVector(vec![0.0; n])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &CartanVector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, s: f64) -> CartanVector {
        CartanVector(self.0.iter().map(|c| c * s).collect())
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<CartanVector> {
        let r = self.norm();
        if r > 0.0 && r.is_finite() {
            Some(self.scaled(1.0 / r))
        } else {
            None
        }
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Whether the coordinates are non-increasing, i.e. the vector lies in the
    /// closed positive Weyl chamber.
    pub fn is_dominant(&self, tol: f64) -> bool {
        self.0.windows(2).all(|w| w[0] >= w[1] - tol)
    }

    pub fn distance(&self, other: &CartanVector) -> f64 {
        (self - other).norm()
    }
}

impl Index<usize> for CartanVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &CartanVector {
    type Output = CartanVector;
    fn add(self, rhs: &CartanVector) -> CartanVector {
        CartanVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &CartanVector {
    type Output = CartanVector;
    fn sub(self, rhs: &CartanVector) -> CartanVector {
        CartanVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &CartanVector {
    type Output = CartanVector;
    fn mul(self, rhs: f64) -> CartanVector {
        self.scaled(rhs)
    }
}

impl fmt::Display for CartanVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c:.6}")?;
        }
        write!(f, ")")
    }
}

/// Angle between two non-zero vectors, accurate for nearly parallel inputs.
pub fn angle_between(u: &CartanVector, v: &CartanVector) -> f64 {
    let (Some(a), Some(b)) = (u.normalized(), v.normalized()) else {
        return std::f64::consts::FRAC_PI_2;
    };
    unit_angle(&a, &b)
}

/// Angle between two unit vectors: `2 asin(|a - b| / 2)`.
pub(crate) fn unit_angle(a: &CartanVector, b: &CartanVector) -> f64 {
    unit_angle_from_sq(chord_sq(a.coords(), b.coords()))
}

pub(crate) fn chord_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn unit_angle_from_sq(chord_sq: f64) -> f64 {
    2.0 * (chord_sq.sqrt() / 2.0).min(1.0).asin()
}
