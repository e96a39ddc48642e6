//! The nonnegative orthant `K ⊂ R^n`.
//!
//! Indices in this module are 0-based.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::vector::Vector;
use crate::verification::{refute_linearity, LinearityRefutation, DEFAULT_STEPS};

/// Relative width of the band around zero treated as an exact zero.
pub const ZERO_REL_TOL: f64 = 1e-12;

/// Upper bound for finite-difference steps in locally linear regions.
pub const MAX_LOCAL_STEP: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SignPartition {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
    pub zero: Vec<usize>,
}

impl SignPartition {
    pub fn dim(&self) -> usize {
        self.plus.len() + self.minus.len() + self.zero.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConeRegionTag {
    /// All coordinates positive.
    InteriorK,
    /// All coordinates negative.
    InteriorNegK,
    /// No zero coordinate, both signs present.
    Khat,
    /// At least one zero coordinate (includes `∂K` and the origin).
    DeltaRn,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeRegion {
    pub tag: ConeRegionTag,
    pub partition: SignPartition,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConeDeriv {
    Identity,
    Zero,
    /// Keep the coordinates in `plus`, zero the rest.
    Mask {
        plus: Vec<usize>,
    },
    /// The one-sided derivative `d(x; ·)`; positively homogeneous but not
    /// additive, so not a Fréchet derivative.
    DirectionalOnly {
        partition: SignPartition,
    },
}

impl ConeDeriv {
    pub fn is_linear(&self) -> bool {
        !matches!(self, ConeDeriv::DirectionalOnly { .. })
    }

    pub fn apply(&self, w: &Vector) -> Vector {
        match self {
            ConeDeriv::Identity => w.clone(),
            ConeDeriv::Zero => Vector::zeros(w.dim()),
            ConeDeriv::Mask { plus } => {
                let mut out = vec![0.0; w.dim()];
                for &i in plus {
                    out[i] = w[i];
                }
                Vector::from_vec_unchecked(out)
            }
            ConeDeriv::DirectionalOnly { partition } => directional(partition, w),
        }
    }
}

/// `P_K(x)ᵢ = max(xᵢ, 0)`.
pub fn project_cone(x: &Vector) -> Vector {
    x.map(|c| if c > 0.0 { c } else { 0.0 })
}

pub fn in_cone(x: &Vector) -> bool {
    x.iter().all(|&c| c >= 0.0)
}

/// Zero band `1e-12·(1 + ‖x‖_∞)`.
pub fn zero_tolerance(x: &Vector) -> f64 {
    ZERO_REL_TOL * (1.0 + x.norm_inf())
}

pub fn sign_partition(x: &Vector) -> SignPartition {
    let tol = zero_tolerance(x);
    let mut part = SignPartition::default();
    for (i, &c) in x.iter().enumerate() {
        if c.abs() <= tol {
            part.zero.push(i);
        } else if c > 0.0 {
            part.plus.push(i);
        } else {
            part.minus.push(i);
        }
    }
    part
}

pub fn classify_cone(x: &Vector) -> ConeRegion {
    let partition = sign_partition(x);
    let tag = if !partition.zero.is_empty() {
        ConeRegionTag::DeltaRn
    } else if partition.minus.is_empty() {
        ConeRegionTag::InteriorK
    } else if partition.plus.is_empty() {
        ConeRegionTag::InteriorNegK
    } else {
        ConeRegionTag::Khat
    };
    ConeRegion { tag, partition }
}

pub fn cone_frechet_derivative(x: &Vector) -> ConeDeriv {
    let ConeRegion { tag, partition } = classify_cone(x);
    match tag {
        ConeRegionTag::InteriorK => ConeDeriv::Identity,
        ConeRegionTag::InteriorNegK => ConeDeriv::Zero,
        ConeRegionTag::Khat => ConeDeriv::Mask {
            plus: partition.plus,
        },
        ConeRegionTag::DeltaRn => ConeDeriv::DirectionalOnly { partition },
    }
}

fn directional(partition: &SignPartition, w: &Vector) -> Vector {
    let mut out = vec![0.0; w.dim()];
    for &i in &partition.plus {
        out[i] = w[i];
    }
    for &i in &partition.zero {
        if w[i] > 0.0 {
            out[i] = w[i];
        }
    }
    Vector::from_vec_unchecked(out)
}

/// One-sided directional derivative `d(x; w)`.
pub fn cone_gateaux(x: &Vector, w: &Vector) -> Result<Vector> {
    x.check_dim(w)?;
    if w.is_zero() {
        return Err(Error::ZeroVector("w"));
    }
    Ok(directional(&sign_partition(x), w))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeRefutation {
    /// Smallest zero coordinate; the probe direction is `e_index`.
    pub index: usize,
    pub direction: Vector,
    pub forward_limit: Vector,
    pub backward_limit: Vector,
    pub gap: f64,
    /// Noise-derived bound the gap must exceed.
    pub threshold: f64,
    pub certified: bool,
}

/// Probes `±e_k` at the first zero coordinate `k`: the one-sided derivatives
/// are `e_k` and `θ`, which no linear map reproduces.
pub fn cone_refute_frechet(x: &Vector) -> Result<ConeRefutation> {
    let partition = sign_partition(x);
    let Some(&index) = partition.zero.first() else {
        return Err(Error::Precondition(
            "point has no zero coordinate, the projection is Fréchet differentiable there".into(),
        ));
    };
    let direction = Vector::basis(x.dim(), index);
    let LinearityRefutation {
        forward,
        backward,
        gap,
        threshold,
        certified,
        ..
    } = refute_linearity(project_cone, x, &direction, &DEFAULT_STEPS)?;
    Ok(ConeRefutation {
        index,
        direction,
        forward_limit: forward,
        backward_limit: backward,
        gap,
        threshold,
        certified,
    })
}

/// Checks `P_K(λx) = λ·P_K(x)`.
pub fn positive_homogeneity_check(x: &Vector, lambda: f64) -> Result<bool> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(invalid(
            "lambda",
            format!("must be finite and >= 0, got {lambda}"),
        ));
    }
    let lhs = project_cone(&x.scale(lambda));
    let rhs = project_cone(x).scale(lambda);
    let tol = 1e-12 * (1.0 + lambda * x.norm_inf());
    Ok((&lhs - &rhs).norm_inf() <= tol)
}

/// Finite-difference step that keeps `x ± h w` inside the sign pattern of `x`.
///
/// `δ_x = ¼·min{|xᵢ| : xᵢ ≠ 0}` and `h = min(1e-5, δ_x/4) / max(1, ‖w‖_∞)`,
/// rounded down to a power of two so that `x ± h w` stays dyadic-friendly.
pub fn locally_linear_step(x: &Vector, w: &Vector) -> f64 {
    let tol = zero_tolerance(x);
    let min_abs = x
        .iter()
        .map(|c| c.abs())
        .filter(|&a| a > tol)
        .fold(f64::INFINITY, f64::min);
    let delta = 0.25 * min_abs;
    let h = MAX_LOCAL_STEP.min(0.25 * delta) / w.norm_inf().max(1.0);
    2f64.powi(h.log2().floor() as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn projection_examples() {
        let x = v(&[1.0, 0.0, 2.5]);
        assert_eq!(project_cone(&x), x);
        assert_eq!(project_cone(&v(&[-1.0, 0.0, -3.0])), Vector::zeros(3));
        assert_eq!(project_cone(&v(&[3.0, -2.0, 0.0])), v(&[3.0, 0.0, 0.0]));
    }

    #[test]
    fn partition_examples() {
        let p = sign_partition(&v(&[3.0, -2.0, 0.0]));
        assert_eq!((p.plus, p.minus, p.zero), (vec![0], vec![1], vec![2]));
        assert_eq!(sign_partition(&Vector::zeros(4)).zero, vec![0, 1, 2, 3]);
        let p = sign_partition(&v(&[1e-15, 1.0]));
        assert_eq!((p.zero, p.plus), (vec![0], vec![1]));
    }

    #[test]
    fn region_tags() {
        assert_eq!(classify_cone(&v(&[1.0, 2.0])).tag, ConeRegionTag::InteriorK);
        assert_eq!(
            classify_cone(&v(&[-1.0, -2.0])).tag,
            ConeRegionTag::InteriorNegK
        );
        assert_eq!(classify_cone(&v(&[1.0, -2.0])).tag, ConeRegionTag::Khat);
        assert_eq!(classify_cone(&v(&[1.0, 0.0])).tag, ConeRegionTag::DeltaRn);
        assert_eq!(classify_cone(&v(&[-1.0, 0.0])).tag, ConeRegionTag::DeltaRn);
        // n = 1 has no K̂ points
        assert_eq!(classify_cone(&v(&[-4.0])).tag, ConeRegionTag::InteriorNegK);
        assert_eq!(classify_cone(&v(&[4.0])).tag, ConeRegionTag::InteriorK);
    }

    #[test]
    fn derivative_examples() {
        let w = v(&[0.3, -0.7]);
        let d = cone_frechet_derivative(&v(&[1.0, 2.0]));
        assert_eq!(d, ConeDeriv::Identity);
        assert_eq!(d.apply(&w), w);
        let d = cone_frechet_derivative(&v(&[2.0, -3.0]));
        assert_eq!(d, ConeDeriv::Mask { plus: vec![0] });
        assert_eq!(d.apply(&w), v(&[0.3, 0.0]));
        let d = cone_frechet_derivative(&v(&[-1.0, -1.0]));
        assert_eq!(d.apply(&w), Vector::zeros(2));
        assert!(!cone_frechet_derivative(&v(&[0.0, -1.0])).is_linear());
    }

    #[test]
    fn gateaux_examples() {
        let w = v(&[2.0, -1.0, 0.5]);
        assert_eq!(
            cone_gateaux(&Vector::zeros(3), &w).unwrap(),
            project_cone(&w)
        );
        let x = v(&[2.0, -1.0, 0.0]);
        assert_eq!(
            cone_gateaux(&x, &v(&[5.0, 7.0, -3.0])).unwrap(),
            v(&[5.0, 0.0, 0.0])
        );
        assert_eq!(
            cone_gateaux(&x, &v(&[5.0, 7.0, 3.0])).unwrap(),
            v(&[5.0, 0.0, 3.0])
        );
        assert_eq!(
            cone_gateaux(&x, &Vector::zeros(3)),
            Err(Error::ZeroVector("w"))
        );
    }

    #[test]
    fn directional_map_is_not_additive() {
        let d = cone_frechet_derivative(&Vector::zeros(1));
        let e = v(&[1.0]);
        let sum = &d.apply(&e) + &d.apply(&-&e);
        assert_ne!(d.apply(&(&e + &-&e)), sum);
    }

    #[test]
    fn refutation_examples() {
        let r = cone_refute_frechet(&v(&[1.0, 0.0])).unwrap();
        assert_eq!(r.index, 1);
        assert!((r.gap - 1.0).abs() < 1e-12);
        assert!(r.certified);
        let r = cone_refute_frechet(&v(&[0.0])).unwrap();
        assert!((r.gap - 1.0).abs() < 1e-12);
        assert!(matches!(
            cone_refute_frechet(&v(&[1.0, 2.0])),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn homogeneity_examples() {
        let x = v(&[3.0, -2.0]);
        assert!(positive_homogeneity_check(&x, 0.0).unwrap());
        assert!(positive_homogeneity_check(&x, 2.0).unwrap());
        assert_eq!(project_cone(&x.scale(2.0)), v(&[6.0, 0.0]));
        assert!(positive_homogeneity_check(&x, -1.0).is_err());
    }

    #[test]
    fn local_step_respects_guard() {
        let x = v(&[0.08, -2.0, 1.0]);
        let w = v(&[3.0, 1.0, -1.0]);
        let h = locally_linear_step(&x, &w);
        assert!(h <= 0.25 * 0.25 * 0.08 / 3.0);
        assert_eq!(h.log2().fract(), 0.0);
        assert!(h <= MAX_LOCAL_STEP);
    }
}
