//! Projection onto a closed ball `B(c, r)` and its derivatives.
//!
//! The derivative structure splits space into three regions:
//!
//! * inside the open ball the projection is the identity near the point, so
//!   its strict Fréchet derivative is `I`;
//! * outside the closed ball it is `x ↦ (r/‖x̄−c‖)·o(x̄−c; x)`, the orthogonal
//!   part of `x` against the radial direction, rescaled;
//! * on the sphere no Fréchet derivative exists, only one-sided directional
//!   derivatives (see [`Ball::gateaux_on_sphere`]).

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::vector::{ortho_split, Vector};

/// Relative slack used to decide sphere membership.
pub const SPHERE_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    center: Vector,
    radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BallRegionTag {
    Interior,
    Exterior,
    Sphere,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallRegion {
    pub tag: BallRegionTag,
    /// `‖x − c‖ − r`.
    pub signed_gap: f64,
}

/// The Fréchet derivative of the ball projection at a point, when it exists.
#[derive(Debug, Clone, PartialEq)]
pub enum BallDeriv {
    Identity,
    /// `x ↦ (radius/‖anchor‖)·o(anchor; x)` with `anchor = x̄ − c`.
    ExteriorRankStructure {
        anchor: Vector,
        radius: f64,
    },
    /// The point lies on the sphere; there is no linear derivative.
    NotFrechet {
        sphere_point: Vector,
    },
}

impl BallDeriv {
    pub fn is_frechet(&self) -> bool {
        !matches!(self, BallDeriv::NotFrechet { .. })
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        match self {
            BallDeriv::Identity => Ok(x.clone()),
            BallDeriv::ExteriorRankStructure { anchor, radius } => {
                let split = ortho_split(anchor, x)?;
                Ok(split.o.scale(radius / anchor.norm()))
            }
            BallDeriv::NotFrechet { .. } => Err(Error::NotFrechetDifferentiable),
        }
    }

    /// Row-major matrix of the derivative in the standard basis.
    pub fn to_dense(&self, dim: usize) -> Result<Vec<Vec<f64>>> {
        if dim == 0 {
            return Err(Error::EmptyVector);
        }
        // column j is apply(e_j)
        let columns = (0..dim)
            .map(|j| self.apply(&Vector::basis(dim, j)))
            .collect::<Result<Vec<_>>>()?;
        Ok((0..dim)
            .map(|i| columns.iter().map(|col| col[i]).collect())
            .collect())
    }
}

impl Ball {
    pub fn new(center: Vector, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(invalid(
                "radius",
                format!("must be finite and > 0, got {radius}"),
            ));
        }
        Ok(Self { center, radius })
    }

    /// The ball `B(θ, r)` in `R^dim`.
    pub fn centered(dim: usize, radius: f64) -> Result<Self> {
        Self::new(Vector::zeros(dim), radius)
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// Classification tolerance `1e-12·(1 + r)`.
    pub fn sphere_tolerance(&self) -> f64 {
        SPHERE_REL_TOL * (1.0 + self.radius)
    }

    pub fn contains(&self, x: &Vector) -> Result<bool> {
        self.center.check_dim(x)?;
        Ok(x.distance(&self.center) <= self.radius)
    }

    pub fn project(&self, x: &Vector) -> Result<Vector> {
        self.center.check_dim(x)?;
        let offset = x - &self.center;
        let dist = offset.norm();
        if dist <= self.radius {
            return Ok(x.clone());
        }
        // divide before scaling so that one-dimensional projections land exactly on c ± r
        let unit = offset.map(|o| o / dist);
        Ok(self.center.add_scaled(self.radius, &unit))
    }

    pub fn classify(&self, x: &Vector) -> Result<BallRegion> {
        self.center.check_dim(x)?;
        let signed_gap = x.distance(&self.center) - self.radius;
        let tol = self.sphere_tolerance();
        let tag = if signed_gap < -tol {
            BallRegionTag::Interior
        } else if signed_gap > tol {
            BallRegionTag::Exterior
        } else {
            BallRegionTag::Sphere
        };
        Ok(BallRegion { tag, signed_gap })
    }

    pub fn frechet_derivative(&self, xbar: &Vector) -> Result<BallDeriv> {
        let region = self.classify(xbar)?;
        Ok(match region.tag {
            BallRegionTag::Interior => BallDeriv::Identity,
            BallRegionTag::Exterior => BallDeriv::ExteriorRankStructure {
                anchor: xbar - &self.center,
                radius: self.radius,
            },
            BallRegionTag::Sphere => BallDeriv::NotFrechet {
                sphere_point: xbar.clone(),
            },
        })
    }

    /// One-sided directional derivative at a sphere point.
    ///
    /// Outward and tangent directions (`⟨x̄−c, w⟩ ≥ 0`) get the tangential
    /// projection `w − ⟨x̄−c, w⟩(x̄−c)/r²`; inward directions pass through.
    pub fn gateaux_on_sphere(&self, xbar: &Vector, w: &Vector) -> Result<Vector> {
        self.center.check_dim(w)?;
        let region = self.classify(xbar)?;
        if region.tag != BallRegionTag::Sphere {
            return Err(Error::NotOnSphere {
                gap: region.signed_gap,
                tolerance: self.sphere_tolerance(),
            });
        }
        if w.is_zero() {
            return Err(Error::ZeroVector("w"));
        }
        let radial = xbar - &self.center;
        let along = radial.dot(w);
        if along >= 0.0 {
            Ok(w.add_scaled(-along / (self.radius * self.radius), &radial))
        } else {
            Ok(w.clone())
        }
    }
}
