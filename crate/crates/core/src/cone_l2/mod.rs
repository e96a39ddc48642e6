//! The positive cone of `l_2`, on sequences with geometric tails.
//!
//! In infinite dimensions the cone has empty interior and its projection is
//! nowhere Fréchet differentiable on `K⁺`, `K⁻` or `K̂`, although it keeps
//! one-sided directional derivatives there. This module computes those
//! derivatives in closed form and builds the explicit witnesses: single
//! coordinate flips far out in the tail whose Fréchet residuals stay at
//! `1/2` and `2/3` no matter how close they are to the base point, and a
//! point outside the cone within any `ε` of a given cone point.

mod seq;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use seq::{SeqVector, SeqVectorRecord, Tail};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum L2RegionTag {
    /// Every coordinate strictly positive.
    Kplus,
    /// Every coordinate strictly negative.
    Kminus,
    /// No zero coordinate, both signs present.
    Khat,
    /// Anything with a zero coordinate.
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct L2Region {
    pub tag: L2RegionTag,
}

pub fn classify_l2(x: &SeqVector) -> L2Region {
    let tag = match x.tail() {
        Tail::Zero => L2RegionTag::Other,
        Tail::Geometric { a, start, .. } => {
            let overrides = x.overrides();
            let below_start_covered = (1..start).all(|i| overrides.contains_key(&i));
            if a == 0.0 || !below_start_covered || overrides.values().any(|&v| v == 0.0) {
                L2RegionTag::Other
            } else {
                let tail_positive = a > 0.0;
                let mixed = overrides.values().any(|&v| (v > 0.0) != tail_positive);
                match (mixed, tail_positive) {
                    (true, _) => L2RegionTag::Khat,
                    (false, true) => L2RegionTag::Kplus,
                    (false, false) => L2RegionTag::Kminus,
                }
            }
        }
    };
    L2Region { tag }
}

/// Whether every coordinate is nonnegative.
pub fn in_cone_l2(x: &SeqVector) -> bool {
    x.tail().sign() >= 0.0 && x.overrides().values().all(|&v| v >= 0.0)
}

/// Coordinatewise `max(xᵢ, 0)`.
pub fn project_cone_l2(x: &SeqVector) -> SeqVector {
    let overrides = x
        .overrides()
        .iter()
        .map(|(&i, &v)| (i, if v > 0.0 { v } else { 0.0 }))
        .collect();
    let tail = if x.tail().sign() > 0.0 {
        x.tail()
    } else {
        Tail::Zero
    };
    SeqVector::new(overrides, tail)
        .expect("clamping preserves validity")
        .canonical()
}

/// `B(x; w)`: keeps `wᵢ` where `xᵢ > 0` and zeroes it elsewhere.
pub fn positive_mask(x: &SeqVector, w: &SeqVector) -> SeqVector {
    let masked = match x.tail() {
        Tail::Geometric { a, start, .. } if a > 0.0 => {
            // w everywhere except the finitely many indices where x ≤ 0
            let mut overrides = w.overrides().clone();
            for i in 1..start {
                if x.coord(i) <= 0.0 {
                    overrides.insert(i, 0.0);
                }
            }
            for (&i, &v) in x.overrides() {
                if v <= 0.0 {
                    overrides.insert(i, 0.0);
                }
            }
            SeqVector::new(overrides, w.tail())
        }
        _ => {
            // only finitely many positive entries survive
            let overrides: BTreeMap<u64, f64> = x
                .overrides()
                .iter()
                .filter(|&(_, &v)| v > 0.0)
                .map(|(&i, _)| (i, w.coord(i)))
                .collect();
            SeqVector::new(overrides, Tail::Zero)
        }
    };
    masked.expect("masking preserves validity").canonical()
}

/// One-sided directional derivative on `K⁺`, `K⁻` and `K̂`.
pub fn l2_gateaux(x: &SeqVector, w: &SeqVector) -> Result<SeqVector> {
    if w.is_zero() {
        return Err(Error::ZeroVector("w"));
    }
    match classify_l2(x).tag {
        L2RegionTag::Kplus => Ok(w.canonical()),
        L2RegionTag::Kminus => Ok(SeqVector::zero()),
        L2RegionTag::Khat => Ok(positive_mask(x, w)),
        L2RegionTag::Other => Err(Error::Precondition(
            "no directional derivative formula for sequences with zero coordinates".into(),
        )),
    }
}

/// The linear map probed by a non-differentiability witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WitnessCandidate {
    Identity,
    Zero,
    Mask,
}

impl WitnessCandidate {
    fn apply(self, x: &SeqVector, w: &SeqVector) -> SeqVector {
        match self {
            WitnessCandidate::Identity => w.clone(),
            WitnessCandidate::Zero => SeqVector::zero(),
            WitnessCandidate::Mask => positive_mask(x, w),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport {
    pub n: u64,
    /// The base point's coordinate at `n`.
    pub x_n: f64,
    /// Fréchet residual at `u(n)`, which flips coordinate `n` to `−x_n`.
    pub residual_u: f64,
    /// Fréchet residual at `v(n)`, which sets coordinate `n` to `−2x_n`.
    pub residual_v: f64,
    pub candidate: WitnessCandidate,
}

/// Smallest admissible witness index plus `offset − 1`: the first index past
/// every explicit entry and inside the tail is returned for `offset = 1`.
pub fn witness_index(x: &SeqVector, offset: u64) -> Result<u64> {
    if offset == 0 {
        return Err(invalid("offset", "must be at least 1"));
    }
    let start = match x.tail() {
        Tail::Geometric { start, .. } => start,
        Tail::Zero => return Err(Error::Precondition("sequence has no tail".into())),
    };
    let base = x.max_override_index().unwrap_or(0).max(start - 1);
    Ok(base + offset)
}

fn frechet_residual(
    x: &SeqVector,
    px: &SeqVector,
    probe: &SeqVector,
    candidate: WitnessCandidate,
) -> Result<f64> {
    let step = probe.sub(x)?;
    let change = project_cone_l2(probe).sub(px)?;
    let remainder = change.sub(&candidate.apply(x, &step))?;
    Ok(remainder.norm() / step.norm())
}

/// Evaluates the Fréchet remainder quotient at `u(n)` and `v(n)` against the
/// only linear candidate compatible with the directional derivative.
///
/// Both residuals are independent of `n`, while `‖u(n) − x‖ → 0` as `n`
/// grows, so the remainder cannot vanish in the limit.
pub fn l2_nonfrechet_witness(x: &SeqVector, n: u64) -> Result<WitnessReport> {
    let candidate = match classify_l2(x).tag {
        L2RegionTag::Kplus => WitnessCandidate::Identity,
        L2RegionTag::Kminus => WitnessCandidate::Zero,
        L2RegionTag::Khat => WitnessCandidate::Mask,
        L2RegionTag::Other => {
            return Err(Error::Precondition(
                "witness requires a sequence in K⁺, K⁻ or K̂".into(),
            ))
        }
    };
    let first = witness_index(x, 1)?;
    if n < first {
        return Err(Error::Precondition(format!(
            "witness index {n} must lie in the pure tail region (>= {first})"
        )));
    }
    let x_n = x.coord(n);
    if x_n.abs() < 1e-150 {
        return Err(Error::Precondition(format!(
            "tail coordinate at index {n} is too small to evaluate ({x_n:e})"
        )));
    }
    let px = project_cone_l2(x);
    let u = x.with_override(n, -x_n)?;
    let v = x.with_override(n, -2.0 * x_n)?;
    Ok(WitnessReport {
        n,
        x_n,
        residual_u: frechet_residual(x, &px, &u, candidate)?,
        residual_v: frechet_residual(x, &px, &v, candidate)?,
        candidate,
    })
}

/// A point outside the cone within distance `eps` of a cone point `x`.
///
/// Keeps `x` up to an index `m` whose remaining mass is below `ε²/4`, puts
/// `−ε/2` at `m + 1`, and zeros everything after.
pub fn interior_escape_witness(x: &SeqVector, eps: f64) -> Result<SeqVector> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(invalid("eps", format!("must be finite and > 0, got {eps}")));
    }
    if !in_cone_l2(x) {
        return Err(Error::Precondition("point is not in the cone".into()));
    }
    let bound = 0.25 * eps * eps;
    let mut m = first_cut(x, bound);
    loop {
        let mut overrides: BTreeMap<u64, f64> = (1..=m).map(|i| (i, x.coord(i))).collect();
        overrides.insert(m + 1, -0.5 * eps);
        let y = SeqVector::new(overrides, Tail::Zero)?.canonical();
        if x.distance(&y) < eps {
            return Ok(y);
        }
        // rounding in the closed-form distance; move the cut further out
        m += 1;
    }
}

/// Smallest `m ≥ 0` with `Σ_{i > m} xᵢ² < bound`.
fn first_cut(x: &SeqVector, bound: f64) -> u64 {
    let mut m = 0;
    let last_explicit = x.max_override_index().unwrap_or(0);
    while m <= last_explicit {
        if x.mass_from(m + 1) < bound {
            return m;
        }
        m += 1;
    }
    // beyond the explicit entries the mass is a·ρ^(j−s)·… and decays geometrically
    if let Tail::Geometric { rho, start, .. } = x.tail() {
        let j = (m + 1).max(start);
        let mass = x.mass_from(j);
        if mass >= bound {
            let steps = ((bound / mass).ln() / (2.0 * rho.ln())).ceil().max(0.0) as u64;
            m = j - 1 + steps;
        } else {
            m = j - 1;
        }
        while x.mass_from(m + 1) >= bound {
            m += 1;
        }
        while m > 0 && x.mass_from(m) < bound {
            m -= 1;
        }
    }
    m
}
