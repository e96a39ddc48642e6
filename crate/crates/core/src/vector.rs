//! Dense real vectors in the standard basis of `R^n`, plus the orthogonal
//! splitting of a vector against a fixed nonzero anchor.
//!
//! Binary operators on `&Vector` panic on a dimension mismatch, like
//! `ndarray`; the free functions that take user input (`inner`,
//! `ortho_split`, `norm_dir_derivative`) check dimensions and return errors.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite, nonempty vector of `f64` coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector {
    coords: Vec<f64>,
}

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some((index, &value)) = coords.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self { coords })
    }

    /// The origin of `R^dim`.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        Self {
            coords: vec![0.0; dim],
        }
    }

    /// The `k`-th standard basis vector (0-based).
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dimension {dim}");
        let mut v = Self::zeros(dim);
        v.coords[k] = 1.0;
        v
    }

    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty());
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.coords.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0.0)
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        assert_same_dim(self, other);
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    /// Euclidean norm, computed with scaling so that huge or tiny
    /// coordinates do not overflow or underflow.
    pub fn norm(&self) -> f64 {
        let scale = self.norm_inf();
        if scale == 0.0 {
            return 0.0;
        }
        let s: f64 = self.coords.iter().map(|c| (c / scale) * (c / scale)).sum();
        scale * s.sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.coords.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn scale(&self, factor: f64) -> Vector {
        self.map(|c| c * factor)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Vector {
        Vector::from_vec_unchecked(self.coords.iter().map(|&c| f(c)).collect())
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, factor: f64, other: &Vector) -> Vector {
        assert_same_dim(self, other);
        Vector::from_vec_unchecked(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + factor * b)
                .collect(),
        )
    }

    pub fn distance(&self, other: &Vector) -> f64 {
        (self - other).norm()
    }

    /// `DimensionMismatch` unless both vectors have the same length.
    pub fn check_dim(&self, other: &Vector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }
}

fn assert_same_dim(a: &Vector, b: &Vector) {
    assert_eq!(a.dim(), b.dim(), "vector dimension mismatch");
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Vector::new(coords)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.coords
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.coords[i]
    }
}

impl<'a> Add<&'a Vector> for &'a Vector {
    type Output = Vector;

    fn add(self, rhs: &'a Vector) -> Vector {
        self.add_scaled(1.0, rhs)
    }
}

impl<'a> Sub<&'a Vector> for &'a Vector {
    type Output = Vector;

    fn sub(self, rhs: &'a Vector) -> Vector {
        assert_same_dim(self, rhs);
        Vector::from_vec_unchecked(
            self.coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl Mul<&Vector> for f64 {
    type Output = Vector;

    fn mul(self, rhs: &Vector) -> Vector {
        rhs.scale(self)
    }
}

impl Neg for &Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        self.map(|c| -c)
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Inner product `Σ xᵢyᵢ`.
pub fn inner(x: &Vector, y: &Vector) -> Result<f64> {
    x.check_dim(y)?;
    Ok(x.dot(y))
}

/// Decomposition `x = a·anchor + o` with `o ⟂ anchor`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoSplit {
    /// Coefficient of `x` along the anchor, `⟨x, anchor⟩ / ‖anchor‖²`.
    pub a: f64,
    /// Component of `x` orthogonal to the anchor.
    pub o: Vector,
    pub anchor: Vector,
}

impl OrthoSplit {
    /// `a·anchor + o`.
    pub fn reconstruct(&self) -> Vector {
        self.o.add_scaled(self.a, &self.anchor)
    }
}

pub fn ortho_split(anchor: &Vector, x: &Vector) -> Result<OrthoSplit> {
    anchor.check_dim(x)?;
    let len = anchor.norm();
    if len == 0.0 {
        return Err(Error::ZeroVector("anchor"));
    }
    let unit = anchor.map(|c| c / len);
    let along = x.dot(&unit);
    let a = along / len;
    let o = x.add_scaled(-along, &unit);
    Ok(OrthoSplit {
        a,
        o,
        anchor: anchor.clone(),
    })
}

/// One-sided derivative of `t ↦ ‖x + t v‖` at `t = 0⁺`, i.e. `⟨x, v⟩ / ‖x‖`.
pub fn norm_dir_derivative(x: &Vector, v: &Vector) -> Result<f64> {
    x.check_dim(v)?;
    let nx = x.norm();
    if nx == 0.0 {
        return Err(Error::ZeroVector("x"));
    }
    Ok(x.dot(v) / nx)
}
