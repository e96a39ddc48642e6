//! Metric projections onto closed balls and positive cones, together with
//! their exact derivative operators and numerical checks of where those
//! derivatives exist.
//!
//! * [`vector`]: dense vectors and the orthogonal split against an anchor.
//! * [`ball`]: projection onto `B(c, r)`, region classification, Fréchet
//!   derivatives off the sphere and one-sided derivatives on it.
//! * [`cone_rn`]: the nonnegative orthant of `R^n`.
//! * [`cone_l2`]: the positive cone of `l_2` on sequences with geometric tails.
//! * [`verification`]: finite differences, residual scans, linearity
//!   refutation and an independent optimization-based projection oracle.

pub mod ball;
pub mod cone_l2;
pub mod cone_rn;
pub mod error;
pub mod vector;
pub mod verification;

pub use ball::{Ball, BallDeriv, BallRegion, BallRegionTag};
pub use cone_l2::{SeqVector, Tail};
pub use cone_rn::{ConeDeriv, ConeRegion, ConeRegionTag, SignPartition};
pub use error::{Error, Result};
pub use vector::{inner, norm_dir_derivative, ortho_split, OrthoSplit, Vector};
