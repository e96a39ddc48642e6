//! Numerical differentiability checks for arbitrary projection maps.
//!
//! Everything here treats the projection and the candidate derivative as
//! opaque callables: one-sided difference quotients, Fréchet and strict
//! Fréchet residual scans, a linearity refutation from a pair of opposite
//! one-sided derivatives, and an independent optimization-based projection
//! oracle for cross-checking closed forms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::ball::Ball;
use crate::error::{invalid, Error, Result};
use crate::vector::Vector;

/// Step sizes used for one-sided limits unless the caller supplies its own.
pub const DEFAULT_STEPS: [f64; 3] = [1e-3, 1e-4, 1e-5];

/// A refutation is certified only when the gap exceeds this multiple of
/// the finite-difference error bound.
pub const REFUTATION_NOISE_FACTOR: f64 = 100.0;

/// Forward difference quotients `(f(x + t w) − f(x)) / t` at several steps.
#[derive(Debug, Clone, PartialEq)]
pub struct FdEstimate {
    /// Quotient at the smallest step.
    pub value: Vector,
    pub steps: Vec<f64>,
    pub quotients: Vec<Vector>,
}

impl FdEstimate {
    /// `‖quotient(t) − claim‖` for every step `t`.
    pub fn errors_vs(&self, claim: &Vector) -> Vec<f64> {
        self.quotients.iter().map(|q| q.distance(claim)).collect()
    }

    /// Ratios `error(tₖ) / error(tₖ₊₁)`; about 10 per decade for a first-order
    /// error. Infinite or NaN where an error vanishes.
    pub fn error_ratios(&self, claim: &Vector) -> Vec<f64> {
        let errs = self.errors_vs(claim);
        errs.windows(2).map(|w| w[0] / w[1]).collect()
    }
}

fn check_steps(steps: &[f64]) -> Result<()> {
    if steps.is_empty() {
        return Err(invalid("steps", "at least one step is required"));
    }
    if steps.iter().any(|&s| !(s.is_finite() && s > 0.0)) {
        return Err(invalid("steps", "steps must be finite and positive"));
    }
    if steps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid("steps", "steps must be strictly decreasing"));
    }
    Ok(())
}

pub fn fd_directional<F>(f: F, x: &Vector, w: &Vector, steps: &[f64]) -> Result<FdEstimate>
where
    F: Fn(&Vector) -> Vector,
{
    x.check_dim(w)?;
    check_steps(steps)?;
    if w.is_zero() {
        return Err(Error::ZeroVector("w"));
    }
    let fx = f(x);
    let quotients: Vec<Vector> = steps
        .iter()
        .map(|&t| (&f(&x.add_scaled(t, w)) - &fx).scale(1.0 / t))
        .collect();
    Ok(FdEstimate {
        value: quotients.last().cloned().expect("steps is nonempty"),
        steps: steps.to_vec(),
        quotients,
    })
}

/// `(f(x + h w) − f(x − h w)) / 2h`.
pub fn central_difference<F>(f: F, x: &Vector, w: &Vector, h: f64) -> Result<Vector>
where
    F: Fn(&Vector) -> Vector,
{
    x.check_dim(w)?;
    if !(h.is_finite() && h > 0.0) {
        return Err(invalid("h", "step must be finite and positive"));
    }
    Ok((&f(&x.add_scaled(h, w)) - &f(&x.add_scaled(-h, w))).scale(0.5 / h))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualMode {
    /// `‖f(u) − f(x̄) − D(u − x̄)‖ / ‖u − x̄‖`.
    Frechet,
    /// `‖f(u) − f(v) − D(u − v)‖ / ‖u − v‖`.
    StrictFrechet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualScan {
    pub radii: Vec<f64>,
    /// Worst residual observed at each radius.
    pub residuals: Vec<f64>,
    pub mode: ResidualMode,
}

impl ResidualScan {
    /// `residual[k+1] / residual[k]`, with `0/0` reported as 0.
    pub fn decay_ratios(&self) -> Vec<f64> {
        self.residuals
            .windows(2)
            .map(|w| {
                if w[0] == 0.0 && w[1] == 0.0 {
                    0.0
                } else {
                    w[1] / w[0]
                }
            })
            .collect()
    }

    /// Whether every consecutive pair satisfies `residual[k+1] ≤ factor·residual[k]`.
    pub fn decays_by(&self, factor: f64) -> bool {
        self.residuals.windows(2).all(|w| w[1] <= factor * w[0])
    }

    pub fn min_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Uniform sample from the closed ball of the given radius around `center`.
///
/// Gaussian direction with radius `ρ·U^(1/n)`.
pub fn sample_in_ball<R: Rng + ?Sized>(rng: &mut R, center: &Vector, radius: f64) -> Vector {
    let n = center.dim();
    loop {
        let dir: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let dir = Vector::from_vec_unchecked(dir);
        let len = dir.norm();
        if len == 0.0 {
            continue;
        }
        let u: f64 = rng.random();
        let r = radius * u.powf(1.0 / n as f64);
        return center.add_scaled(r / len, &dir);
    }
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(invalid("radii", "at least one radius is required"));
    }
    if radii.iter().any(|&r| !(r.is_finite() && r > 0.0)) {
        return Err(invalid("radii", "radii must be finite and positive"));
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid("radii", "radii must be strictly decreasing"));
    }
    Ok(())
}

fn residual(fu: &Vector, fv: &Vector, du: &Vector, diff_norm: f64) -> f64 {
    (&(fu - fv) - du).norm() / diff_norm
}

/// Fréchet residual scan: `u` uniform in `B(x̄, ρ)`, `u ≠ x̄`.
pub fn frechet_residual_scan<F, D>(
    f: F,
    d: D,
    xbar: &Vector,
    radii: &[f64],
    samples_per_radius: usize,
    seed: u64,
) -> Result<ResidualScan>
where
    F: Fn(&Vector) -> Vector + Sync,
    D: Fn(&Vector) -> Vector + Sync,
{
    check_radii(radii)?;
    if samples_per_radius == 0 {
        return Err(invalid("samples_per_radius", "must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fx = f(xbar);
    let mut residuals = Vec::with_capacity(radii.len());
    for &rho in radii {
        let points: Vec<Vector> = (0..samples_per_radius)
            .map(|_| loop {
                let u = sample_in_ball(&mut rng, xbar, rho);
                if u != *xbar {
                    break u;
                }
            })
            .collect();
        let worst = points
            .par_iter()
            .map(|u| {
                let step = u - xbar;
                residual(&f(u), &fx, &d(&step), step.norm())
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(0.0, f64::max);
        residuals.push(worst);
    }
    Ok(ResidualScan {
        radii: radii.to_vec(),
        residuals,
        mode: ResidualMode::Frechet,
    })
}

/// Strict Fréchet residual scan: pairs `u, v` uniform in `B(x̄, ρ)`, `u ≠ v`.
///
/// Samples are drawn sequentially from the seeded generator and evaluated in
/// parallel; the result depends only on the seed.
pub fn strict_residual_scan<F, D>(
    f: F,
    d: D,
    xbar: &Vector,
    radii: &[f64],
    samples_per_radius: usize,
    seed: u64,
) -> Result<ResidualScan>
where
    F: Fn(&Vector) -> Vector + Sync,
    D: Fn(&Vector) -> Vector + Sync,
{
    check_radii(radii)?;
    if samples_per_radius == 0 {
        return Err(invalid("samples_per_radius", "must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut residuals = Vec::with_capacity(radii.len());
    for &rho in radii {
        let pairs: Vec<(Vector, Vector)> = (0..samples_per_radius)
            .map(|_| loop {
                let u = sample_in_ball(&mut rng, xbar, rho);
                let v = sample_in_ball(&mut rng, xbar, rho);
                if u != v {
                    break (u, v);
                }
            })
            .collect();
        let worst = pairs
            .par_iter()
            .map(|(u, v)| {
                let step = u - v;
                residual(&f(u), &f(v), &d(&step), step.norm())
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(0.0, f64::max);
        residuals.push(worst);
    }
    Ok(ResidualScan {
        radii: radii.to_vec(),
        residuals,
        mode: ResidualMode::StrictFrechet,
    })
}

/// Two one-sided derivatives that no linear map can reproduce.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearityRefutation {
    pub direction: Vector,
    /// One-sided derivative along `+d`.
    pub forward: Vector,
    /// One-sided derivative along `−d`.
    pub backward: Vector,
    /// `‖forward + backward‖`; zero for any linear derivative.
    pub gap: f64,
    /// Estimated finite-difference error at the smallest step.
    pub noise_bound: f64,
    pub threshold: f64,
    pub certified: bool,
}

fn fd_error_bound(est: &FdEstimate, fx_scale: f64) -> f64 {
    let n = est.quotients.len();
    let t = est.steps[n - 1];
    let truncation = if n >= 2 {
        est.quotients[n - 1].distance(&est.quotients[n - 2])
    } else {
        0.0
    };
    let rounding = 8.0 * f64::EPSILON * (1.0 + fx_scale) / t;
    truncation + rounding
}

/// Compares the one-sided derivatives along `d` and `−d`.
///
/// A linear derivative `A` would satisfy `A(d) = −A(−d)`, so the gap
/// `‖f′(x̄)(d) + f′(x̄)(−d)‖` measures the violation of linearity.
pub fn refute_linearity<F>(
    f: F,
    xbar: &Vector,
    d: &Vector,
    steps: &[f64],
) -> Result<LinearityRefutation>
where
    F: Fn(&Vector) -> Vector,
{
    let plus = fd_directional(&f, xbar, d, steps)?;
    let minus = fd_directional(&f, xbar, &-d, steps)?;
    let scale = f(xbar).norm_inf() + xbar.norm_inf();
    let noise_bound = fd_error_bound(&plus, scale).max(fd_error_bound(&minus, scale));
    let gap = (&plus.value + &minus.value).norm();
    let threshold = REFUTATION_NOISE_FACTOR * noise_bound;
    Ok(LinearityRefutation {
        direction: d.clone(),
        forward: plus.value,
        backward: minus.value,
        gap,
        noise_bound,
        threshold,
        certified: gap > threshold,
    })
}

/// Target set for [`qp_projection_oracle`].
#[derive(Debug, Clone, Copy)]
pub enum OracleSet<'a> {
    Ball(&'a Ball),
    Orthant,
}

/// Projection by iterative minimization of `½‖z − x‖²` over the set.
///
/// Both sets are handled through projected (scaled) gradient ascent on the
/// Lagrangian dual, which never calls a closed-form projection:
///
/// * ball: one multiplier `λ ≥ 0`, `z(λ) = (x + λc)/(1 + λ)`, Newton-scaled
///   steps on the concave dual;
/// * orthant: multipliers `μ ≥ 0`, `z(μ) = x + μ`, step `μ ← max(0, μ − z/2)`.
///
/// Iteration stops once `‖zₖ₊₁ − zₖ‖ < tol`.
pub fn qp_projection_oracle(
    set: OracleSet<'_>,
    x: &Vector,
    iters: usize,
    tol: f64,
) -> Result<Vector> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(invalid("tol", "must be finite and positive"));
    }
    match set {
        OracleSet::Ball(ball) => ball_dual(ball, x, iters, tol),
        OracleSet::Orthant => orthant_dual(x, iters, tol),
    }
}

fn ball_dual(ball: &Ball, x: &Vector, iters: usize, tol: f64) -> Result<Vector> {
    let c = ball.center();
    c.check_dim(x)?;
    let r = ball.radius();
    let d_sq = (x - c).norm_sq();
    let point = |lambda: f64| x.add_scaled(lambda, c).scale(1.0 / (1.0 + lambda));
    let mut lambda = 0.0_f64;
    let mut z = x.clone();
    let mut last_step = f64::INFINITY;
    for _ in 0..iters {
        let s = 1.0 + lambda;
        let grad = 0.5 * (d_sq / (s * s) - r * r);
        let curvature = d_sq / (s * s * s);
        let next = if curvature > 0.0 {
            (lambda + grad / curvature).max(0.0)
        } else {
            0.0
        };
        let z_next = point(next);
        last_step = z_next.distance(&z);
        lambda = next;
        z = z_next;
        if last_step < tol {
            return Ok(z);
        }
    }
    Err(Error::NonConvergence {
        iters,
        last_step,
        last: z,
    })
}

fn orthant_dual(x: &Vector, iters: usize, tol: f64) -> Result<Vector> {
    const STEP: f64 = 0.5;
    let mut mu = Vector::zeros(x.dim());
    let mut z = x.clone();
    let mut last_step = f64::INFINITY;
    for _ in 0..iters {
        let mu_next = Vector::from_vec_unchecked(
            mu.iter()
                .zip(z.iter())
                .map(|(&m, &zi)| (m - STEP * zi).max(0.0))
                .collect(),
        );
        let z_next = x + &mu_next;
        last_step = z_next.distance(&z);
        mu = mu_next;
        z = z_next;
        if last_step < tol {
            return Ok(z);
        }
    }
    Err(Error::NonConvergence {
        iters,
        last_step,
        last: z,
    })
}
