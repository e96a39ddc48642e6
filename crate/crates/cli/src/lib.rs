//! Job files and report generation for the `metproj` command.
//!
//! A job is a JSON document naming a command, a set, and the inputs. The
//! report is plain text: inputs echoed with 17 significant digits, outputs,
//! and `VERDICT <op> <pass|fail> <measured> <threshold>` lines.

use std::fmt::Write as _;

use metproj::ball::BallDeriv;
use metproj::cone_l2::{
    classify_l2, in_cone_l2, interior_escape_witness, l2_gateaux, l2_nonfrechet_witness,
    project_cone_l2, witness_index,
};
use metproj::cone_rn::{
    classify_cone, cone_frechet_derivative, cone_gateaux, cone_refute_frechet, project_cone,
    ConeDeriv,
};
use metproj::verification::{refute_linearity, strict_residual_scan, DEFAULT_STEPS};
use metproj::{Ball, BallRegionTag, SeqVector, Tail, Vector};
use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid field `{field}`: {message}")]
    Field {
        field: &'static str,
        message: String,
    },
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] metproj::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Project,
    Derive,
    Gateaux,
    Classify,
    Verify,
    Refute,
    Witness,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Project => "project",
            Command::Derive => "derive",
            Command::Gateaux => "gateaux",
            Command::Classify => "classify",
            Command::Verify => "verify",
            Command::Refute => "refute",
            Command::Witness => "witness",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    Ball { center: Vector, radius: f64 },
    ConeRn,
    ConeL2,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_steps")]
    pub steps: Vec<f64>,
    /// Required decay `residual(ρ/10) ≤ factor·residual(ρ)` for `verify`.
    #[serde(default = "default_decay")]
    pub decay_factor: f64,
    /// Lower bound on witness residuals for `witness`.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_radii() -> Vec<f64> {
    vec![1e-2, 1e-3, 1e-4, 1e-5]
}

fn default_samples() -> usize {
    200
}

fn default_steps() -> Vec<f64> {
    DEFAULT_STEPS.to_vec()
}

fn default_decay() -> f64 {
    0.5
}

fn default_tolerance() -> f64 {
    1e-6
}

impl Default for Options {
    fn default() -> Self {
        Self {
            radii: default_radii(),
            samples: default_samples(),
            steps: default_steps(),
            decay_factor: default_decay(),
            tolerance: default_tolerance(),
            seed: 0,
        }
    }
}

/// One job. `x` and `w` are dense arrays for `ball` and `cone_rn`, and
/// sequence objects (`{"overrides": [[i, v], …], "tail": {…}}`) for `cone_l2`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub command: Command,
    pub set: SetSpec,
    pub x: Value,
    #[serde(default)]
    pub w: Option<Value>,
    /// Witness indices (1-based) for `witness` on `cone_l2`.
    #[serde(default)]
    pub n: Option<Vec<u64>>,
    /// Distance bound; switches `witness` to the interior-escape witness.
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub options: Options,
}

impl JobSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub body: String,
    /// False when any verdict failed.
    pub passed: bool,
}

/// Seventeen significant digits; parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_vec(v: &Vector) -> String {
    let parts: Vec<String> = v.iter().map(|&c| fmt_f64(c)).collect();
    format!("[{}]", parts.join(", "))
}

pub fn fmt_seq(x: &SeqVector) -> String {
    let overrides: Vec<String> = x
        .overrides()
        .iter()
        .map(|(i, v)| format!("{i}: {}", fmt_f64(*v)))
        .collect();
    let tail = match x.tail() {
        Tail::Zero => "zero".to_string(),
        Tail::Geometric { a, rho, start } => {
            format!(
                "geometric a={} rho={} start={start}",
                fmt_f64(a),
                fmt_f64(rho)
            )
        }
    };
    format!("{{{}}} tail {tail}", overrides.join(", "))
}

fn fmt_indices(indices: &[usize]) -> String {
    let parts: Vec<String> = indices.iter().map(|i| (i + 1).to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn dense(field: &'static str, value: &Value) -> Result<Vector, CliError> {
    Vector::deserialize(value).map_err(|e| CliError::Field {
        field,
        message: e.to_string(),
    })
}

fn sequence(field: &'static str, value: &Value) -> Result<SeqVector, CliError> {
    SeqVector::deserialize(value).map_err(|e| CliError::Field {
        field,
        message: e.to_string(),
    })
}

struct Writer {
    body: String,
    passed: bool,
}

impl Writer {
    fn line(&mut self, key: &str, value: impl AsRef<str>) {
        let _ = writeln!(self.body, "{key}: {}", value.as_ref());
    }

    fn verdict(&mut self, op: Command, pass: bool, measured: f64, threshold: f64) {
        self.passed &= pass;
        let _ = writeln!(
            self.body,
            "VERDICT {} {} {} {}",
            op.name(),
            if pass { "pass" } else { "fail" },
            fmt_f64(measured),
            fmt_f64(threshold)
        );
    }
}

/// Runs a job; `seed` overrides `options.seed` when given.
pub fn run(job: &JobSpec, seed: Option<u64>) -> Result<Report, CliError> {
    let seed = seed.unwrap_or(job.options.seed);
    let mut out = Writer {
        body: String::new(),
        passed: true,
    };
    out.line("command", job.command.name());
    match &job.set {
        SetSpec::Ball { center, radius } => {
            let ball = Ball::new(center.clone(), *radius)?;
            out.line("set", "ball");
            out.line("center", fmt_vec(center));
            out.line("radius", fmt_f64(*radius));
            let x = dense("x", &job.x)?;
            ball.center().check_dim(&x)?;
            out.line("x", fmt_vec(&x));
            let w = job.w.as_ref().map(|w| dense("w", w)).transpose()?;
            if let Some(w) = &w {
                out.line("w", fmt_vec(w));
            }
            run_ball(job, &ball, &x, w.as_ref(), seed, &mut out)?;
        }
        SetSpec::ConeRn => {
            out.line("set", "cone_rn");
            let x = dense("x", &job.x)?;
            out.line("x", fmt_vec(&x));
            let w = job.w.as_ref().map(|w| dense("w", w)).transpose()?;
            if let Some(w) = &w {
                out.line("w", fmt_vec(w));
            }
            run_cone_rn(job, &x, w.as_ref(), seed, &mut out)?;
        }
        SetSpec::ConeL2 => {
            out.line("set", "cone_l2");
            let x = sequence("x", &job.x)?;
            out.line("x", fmt_seq(&x));
            let w = job.w.as_ref().map(|w| sequence("w", w)).transpose()?;
            if let Some(w) = &w {
                out.line("w", fmt_seq(w));
            }
            run_cone_l2(job, &x, w.as_ref(), &mut out)?;
        }
    }
    Ok(Report {
        body: out.body,
        passed: out.passed,
    })
}

fn require_w<T>(command: Command, w: Option<&T>) -> Result<&T, CliError> {
    w.ok_or_else(|| CliError::Usage(format!("`{}` requires a direction `w`", command.name())))
}

fn echo_scan_options(job: &JobSpec, seed: u64, out: &mut Writer) {
    let radii: Vec<String> = job.options.radii.iter().map(|&r| fmt_f64(r)).collect();
    out.line("radii", format!("[{}]", radii.join(", ")));
    out.line("samples", job.options.samples.to_string());
    out.line("seed", seed.to_string());
}

fn report_scan(job: &JobSpec, scan: &metproj::verification::ResidualScan, out: &mut Writer) {
    for (rho, res) in scan.radii.iter().zip(&scan.residuals) {
        out.line(
            "residual",
            format!("rho={} value={}", fmt_f64(*rho), fmt_f64(*res)),
        );
    }
    let worst = scan.decay_ratios().into_iter().fold(0.0, f64::max);
    out.verdict(
        Command::Verify,
        scan.decays_by(job.options.decay_factor),
        worst,
        job.options.decay_factor,
    );
}

fn run_ball(
    job: &JobSpec,
    ball: &Ball,
    x: &Vector,
    w: Option<&Vector>,
    seed: u64,
    out: &mut Writer,
) -> Result<(), CliError> {
    let region = ball.classify(x)?;
    let tag = match region.tag {
        BallRegionTag::Interior => "interior",
        BallRegionTag::Exterior => "exterior",
        BallRegionTag::Sphere => "sphere",
    };
    let project = |u: &Vector| ball.project(u).expect("dimension checked");
    match job.command {
        Command::Project => out.line("projection", fmt_vec(&ball.project(x)?)),
        Command::Classify => {
            out.line("region", tag);
            out.line("signed_gap", fmt_f64(region.signed_gap));
        }
        Command::Derive => {
            out.line("region", tag);
            let deriv = ball.frechet_derivative(x)?;
            match &deriv {
                BallDeriv::NotFrechet { .. } => {
                    out.line("derivative", "not Fréchet differentiable")
                }
                _ => {
                    out.line(
                        "derivative",
                        if matches!(deriv, BallDeriv::Identity) {
                            "identity"
                        } else {
                            "exterior"
                        },
                    );
                    for row in deriv.to_dense(ball.dim())? {
                        out.line("row", fmt_vec(&Vector::new(row)?));
                    }
                    if let Some(w) = w {
                        out.line("applied", fmt_vec(&deriv.apply(w)?));
                    }
                }
            }
        }
        Command::Gateaux => {
            let w = require_w(job.command, w)?;
            out.line("region", tag);
            let value = match ball.frechet_derivative(x)? {
                BallDeriv::NotFrechet { .. } => ball.gateaux_on_sphere(x, w)?,
                deriv => deriv.apply(w)?,
            };
            out.line("directional_derivative", fmt_vec(&value));
        }
        Command::Verify => {
            out.line("region", tag);
            echo_scan_options(job, seed, out);
            // at sphere points the identity is probed, and the scan shows it fails
            let deriv = ball.frechet_derivative(x)?;
            let candidate = |u: &Vector| match &deriv {
                BallDeriv::NotFrechet { .. } => u.clone(),
                d => d.apply(u).expect("dimension checked"),
            };
            out.line(
                "candidate",
                if deriv.is_frechet() {
                    "frechet derivative"
                } else {
                    "identity"
                },
            );
            let scan = strict_residual_scan(
                project,
                candidate,
                x,
                &job.options.radii,
                job.options.samples,
                seed,
            )?;
            report_scan(job, &scan, out);
        }
        Command::Refute => {
            out.line("region", tag);
            let direction = match w {
                Some(w) => w.clone(),
                None => x - ball.center(),
            };
            let refutation = refute_linearity(project, x, &direction, &job.options.steps)?;
            out.line("direction", fmt_vec(&direction));
            out.line("forward", fmt_vec(&refutation.forward));
            out.line("backward", fmt_vec(&refutation.backward));
            out.line("gap", fmt_f64(refutation.gap));
            out.line("noise_bound", fmt_f64(refutation.noise_bound));
            out.line(
                "conclusion",
                if refutation.certified {
                    "not Fréchet differentiable"
                } else {
                    "no linearity violation detected"
                },
            );
            out.verdict(
                job.command,
                refutation.certified,
                refutation.gap,
                refutation.threshold,
            );
        }
        Command::Witness => {
            return Err(CliError::Usage("`witness` requires the cone_l2 set".into()));
        }
    }
    Ok(())
}

fn cone_tag(x: &Vector) -> &'static str {
    use metproj::ConeRegionTag::*;
    match classify_cone(x).tag {
        InteriorK => "interior_k",
        InteriorNegK => "interior_neg_k",
        Khat => "khat",
        DeltaRn => "delta_rn",
    }
}

fn run_cone_rn(
    job: &JobSpec,
    x: &Vector,
    w: Option<&Vector>,
    seed: u64,
    out: &mut Writer,
) -> Result<(), CliError> {
    match job.command {
        Command::Project => out.line("projection", fmt_vec(&project_cone(x))),
        Command::Classify => {
            let region = classify_cone(x);
            out.line("region", cone_tag(x));
            out.line("plus", fmt_indices(&region.partition.plus));
            out.line("minus", fmt_indices(&region.partition.minus));
            out.line("zero", fmt_indices(&region.partition.zero));
        }
        Command::Derive => {
            out.line("region", cone_tag(x));
            let deriv = cone_frechet_derivative(x);
            let kind = match &deriv {
                ConeDeriv::Identity => "identity".to_string(),
                ConeDeriv::Zero => "zero".to_string(),
                ConeDeriv::Mask { plus } => format!("mask {}", fmt_indices(plus)),
                ConeDeriv::DirectionalOnly { .. } => "not Fréchet differentiable".to_string(),
            };
            out.line("derivative", kind);
            if let (Some(w), true) = (w, deriv.is_linear()) {
                x.check_dim(w)?;
                out.line("applied", fmt_vec(&deriv.apply(w)));
            }
        }
        Command::Gateaux => {
            let w = require_w(job.command, w)?;
            out.line("region", cone_tag(x));
            out.line("directional_derivative", fmt_vec(&cone_gateaux(x, w)?));
        }
        Command::Verify => {
            out.line("region", cone_tag(x));
            echo_scan_options(job, seed, out);
            // with zero coordinates the plus-mask is probed, and the scan shows it fails
            let partition = classify_cone(x).partition;
            let deriv = match cone_frechet_derivative(x) {
                ConeDeriv::DirectionalOnly { .. } => ConeDeriv::Mask {
                    plus: partition.plus,
                },
                d => d,
            };
            let scan = strict_residual_scan(
                project_cone,
                |u| deriv.apply(u),
                x,
                &job.options.radii,
                job.options.samples,
                seed,
            )?;
            report_scan(job, &scan, out);
        }
        Command::Refute => {
            out.line("region", cone_tag(x));
            let refutation = cone_refute_frechet(x)?;
            out.line("index", (refutation.index + 1).to_string());
            out.line("forward", fmt_vec(&refutation.forward_limit));
            out.line("backward", fmt_vec(&refutation.backward_limit));
            out.line("gap", fmt_f64(refutation.gap));
            out.line(
                "conclusion",
                if refutation.certified {
                    "not Fréchet differentiable"
                } else {
                    "no linearity violation detected"
                },
            );
            out.verdict(
                job.command,
                refutation.certified,
                refutation.gap,
                refutation.threshold,
            );
        }
        Command::Witness => {
            return Err(CliError::Usage("`witness` requires the cone_l2 set".into()));
        }
    }
    Ok(())
}

fn l2_tag(x: &SeqVector) -> &'static str {
    use metproj::cone_l2::L2RegionTag::*;
    match classify_l2(x).tag {
        Kplus => "kplus",
        Kminus => "kminus",
        Khat => "khat",
        Other => "other",
    }
}

fn run_cone_l2(
    job: &JobSpec,
    x: &SeqVector,
    w: Option<&SeqVector>,
    out: &mut Writer,
) -> Result<(), CliError> {
    match job.command {
        Command::Project => out.line("projection", fmt_seq(&project_cone_l2(x))),
        Command::Classify => out.line("region", l2_tag(x)),
        Command::Gateaux => {
            let w = require_w(job.command, w)?;
            out.line("region", l2_tag(x));
            out.line("directional_derivative", fmt_seq(&l2_gateaux(x, w)?));
        }
        Command::Witness => {
            out.line("region", l2_tag(x));
            if let Some(eps) = job.eps {
                out.line("eps", fmt_f64(eps));
                let y = interior_escape_witness(x, eps)?;
                let dist = x.distance(&y);
                out.line("y", fmt_seq(&y));
                out.line("in_cone", in_cone_l2(&y).to_string());
                out.line("distance", fmt_f64(dist));
                out.verdict(job.command, !in_cone_l2(&y) && dist < eps, dist, eps);
                return Ok(());
            }
            let indices = match &job.n {
                Some(n) if !n.is_empty() => n.clone(),
                Some(_) => return Err(CliError::Usage("`n` must list at least one index".into())),
                None => vec![witness_index(x, 1)?],
            };
            let mut worst = f64::INFINITY;
            for n in indices {
                let report = l2_nonfrechet_witness(x, n)?;
                out.line(
                    "witness",
                    format!(
                        "n={} x_n={} step={} residual_u={} residual_v={} candidate={:?}",
                        report.n,
                        fmt_f64(report.x_n),
                        fmt_f64(report.x_n.abs() * 2.0),
                        fmt_f64(report.residual_u),
                        fmt_f64(report.residual_v),
                        report.candidate
                    ),
                );
                worst = worst.min(report.residual_u).min(report.residual_v);
            }
            out.line(
                "conclusion",
                if worst > job.options.tolerance {
                    "not Fréchet differentiable"
                } else {
                    "residuals vanish"
                },
            );
            out.verdict(
                job.command,
                worst > job.options.tolerance,
                worst,
                job.options.tolerance,
            );
        }
        Command::Derive | Command::Verify | Command::Refute => {
            return Err(CliError::Usage(format!(
                "`{}` is not available for cone_l2; use `gateaux` or `witness`",
                job.command.name()
            )));
        }
    }
    Ok(())
}
