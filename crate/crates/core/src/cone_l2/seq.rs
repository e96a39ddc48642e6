use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::vector::Vector;

/// Tail of a sequence beyond its explicit entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Tail {
    Zero,
    /// `xᵢ = a·ρ^(i − start)` for `i ≥ start`, zero below `start`.
    Geometric {
        a: f64,
        rho: f64,
        start: u64,
    },
}

impl Tail {
    pub fn value_at(&self, i: u64) -> f64 {
        match *self {
            Tail::Zero => 0.0,
            Tail::Geometric { a, rho, start } => {
                if i < start {
                    0.0
                } else {
                    a * pow(rho, i - start)
                }
            }
        }
    }

    /// Sign of the coefficient; 0 for the zero tail.
    pub fn sign(&self) -> f64 {
        match *self {
            Tail::Zero => 0.0,
            Tail::Geometric { a, .. } => {
                if a > 0.0 {
                    1.0
                } else if a < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }

    fn scaled(&self, factor: f64) -> Tail {
        match *self {
            Tail::Zero => Tail::Zero,
            Tail::Geometric { a, rho, start } => Tail::Geometric {
                a: a * factor,
                rho,
                start,
            },
        }
    }

    fn validate(&self) -> Result<()> {
        if let Tail::Geometric { a, rho, start } = *self {
            if !a.is_finite() {
                return Err(invalid("tail.a", format!("must be finite, got {a}")));
            }
            if !(rho > 0.0 && rho < 1.0) {
                return Err(invalid(
                    "tail.rho",
                    format!("must lie in (0, 1), got {rho}"),
                ));
            }
            if start == 0 {
                return Err(invalid("tail.start", "indices start at 1"));
            }
        }
        Ok(())
    }
}

pub(crate) fn pow(rho: f64, k: u64) -> f64 {
    match i32::try_from(k) {
        Ok(k) => rho.powi(k),
        Err(_) => rho.powf(k as f64),
    }
}

/// An element of `l_2`: finitely many explicit entries on top of a tail.
///
/// Indices are 1-based. An explicit entry takes precedence over the tail at
/// its index. Equality compares canonical forms (see [`SeqVector::canonical`]).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "SeqVectorRecord", into = "SeqVectorRecord")]
pub struct SeqVector {
    overrides: BTreeMap<u64, f64>,
    tail: Tail,
}

/// Wire form: `{"overrides": [[index, value], ...], "tail": {"kind": ...}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeqVectorRecord {
    #[serde(default)]
    pub overrides: Vec<(u64, f64)>,
    pub tail: Tail,
}

impl TryFrom<SeqVectorRecord> for SeqVector {
    type Error = Error;

    fn try_from(rec: SeqVectorRecord) -> Result<Self> {
        let mut overrides = BTreeMap::new();
        for (i, value) in rec.overrides {
            if overrides.insert(i, value).is_some() {
                return Err(invalid("overrides", format!("duplicate index {i}")));
            }
        }
        SeqVector::new(overrides, rec.tail)
    }
}

impl From<SeqVector> for SeqVectorRecord {
    fn from(x: SeqVector) -> Self {
        SeqVectorRecord {
            overrides: x.overrides.into_iter().collect(),
            tail: x.tail,
        }
    }
}

impl PartialEq for SeqVector {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = (self.canonical(), other.canonical());
        a.tail == b.tail && a.overrides == b.overrides
    }
}

impl SeqVector {
    pub fn new(overrides: BTreeMap<u64, f64>, tail: Tail) -> Result<Self> {
        tail.validate()?;
        for (&i, &value) in &overrides {
            if i == 0 {
                return Err(invalid("overrides", "indices start at 1"));
            }
            if !value.is_finite() {
                return Err(invalid("overrides", format!("entry {i} is not finite")));
            }
        }
        Ok(Self { overrides, tail })
    }

    pub fn zero() -> Self {
        Self {
            overrides: BTreeMap::new(),
            tail: Tail::Zero,
        }
    }

    /// `a·ρ^(i−1)` for all `i ≥ 1`.
    pub fn geometric(a: f64, rho: f64) -> Result<Self> {
        Self::new(BTreeMap::new(), Tail::Geometric { a, rho, start: 1 })
    }

    /// Finitely supported sequence with entries `coords[0], coords[1], …` at
    /// indices 1, 2, ….
    pub fn finite(coords: &[f64]) -> Result<Self> {
        let overrides = coords
            .iter()
            .enumerate()
            .map(|(i, &c)| (i as u64 + 1, c))
            .collect();
        Self::new(overrides, Tail::Zero)
    }

    pub fn with_override(&self, index: u64, value: f64) -> Result<Self> {
        let mut overrides = self.overrides.clone();
        overrides.insert(index, value);
        Self::new(overrides, self.tail)
    }

    pub fn overrides(&self) -> &BTreeMap<u64, f64> {
        &self.overrides
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn max_override_index(&self) -> Option<u64> {
        self.overrides.keys().next_back().copied()
    }

    /// `xᵢ` for `i ≥ 1`.
    pub fn coord(&self, i: u64) -> f64 {
        match self.overrides.get(&i) {
            Some(&v) => v,
            None => self.tail.value_at(i),
        }
    }

    /// Same sequence with redundant entries removed: a zero-coefficient tail
    /// becomes [`Tail::Zero`] and entries equal to the tail value are dropped.
    pub fn canonical(&self) -> SeqVector {
        let tail = match self.tail {
            Tail::Geometric { a: 0.0, .. } => Tail::Zero,
            t => t,
        };
        let overrides = self
            .overrides
            .iter()
            .filter(|&(&i, &v)| v != tail.value_at(i))
            .map(|(&i, &v)| (i, v))
            .collect();
        SeqVector { overrides, tail }
    }

    pub fn is_zero(&self) -> bool {
        let c = self.canonical();
        c.overrides.is_empty() && c.tail == Tail::Zero
    }

    /// First `n` coordinates as a dense vector.
    pub fn truncate(&self, n: usize) -> Vector {
        assert!(n >= 1, "truncation length must be positive");
        Vector::from_vec_unchecked((1..=n as u64).map(|i| self.coord(i)).collect())
    }

    pub fn scale(&self, factor: f64) -> SeqVector {
        SeqVector {
            overrides: self
                .overrides
                .iter()
                .map(|(&i, &v)| (i, v * factor))
                .collect(),
            tail: self.tail.scaled(factor),
        }
    }

    /// Rewrites a geometric tail to start at `new_start ≥ start`, moving the
    /// skipped tail entries into explicit overrides.
    fn with_tail_start(&self, new_start: u64) -> SeqVector {
        match self.tail {
            Tail::Geometric { a, rho, start } if new_start > start => {
                let mut overrides = self.overrides.clone();
                for i in start..new_start {
                    overrides.entry(i).or_insert_with(|| self.tail.value_at(i));
                }
                SeqVector {
                    overrides,
                    tail: Tail::Geometric {
                        a: a * pow(rho, new_start - start),
                        rho,
                        start: new_start,
                    },
                }
            }
            _ => self.clone(),
        }
    }

    /// `alpha·x + beta·y`.
    ///
    /// Representable when at most one tail is geometric, or both share the
    /// same ratio `ρ`; otherwise [`Error::IncompatibleTails`].
    pub fn lin_comb(alpha: f64, x: &SeqVector, beta: f64, y: &SeqVector) -> Result<SeqVector> {
        let (x, y, tail) = match (x.tail, y.tail) {
            (Tail::Zero, Tail::Zero) => (x.clone(), y.clone(), Tail::Zero),
            (Tail::Geometric { .. }, Tail::Zero) => (x.clone(), y.clone(), x.tail.scaled(alpha)),
            (Tail::Zero, Tail::Geometric { .. }) => (x.clone(), y.clone(), y.tail.scaled(beta)),
            (
                Tail::Geometric {
                    rho: r1, start: s1, ..
                },
                Tail::Geometric {
                    rho: r2, start: s2, ..
                },
            ) => {
                if r1 != r2 {
                    return Err(Error::IncompatibleTails {
                        left: r1,
                        right: r2,
                    });
                }
                let start = s1.max(s2);
                let x = x.with_tail_start(start);
                let y = y.with_tail_start(start);
                let (Tail::Geometric { a: a1, .. }, Tail::Geometric { a: a2, .. }) =
                    (x.tail, y.tail)
                else {
                    unreachable!("alignment keeps geometric tails")
                };
                let tail = Tail::Geometric {
                    a: alpha * a1 + beta * a2,
                    rho: r1,
                    start,
                };
                (x, y, tail)
            }
        };
        let keys: BTreeSet<u64> = x
            .overrides
            .keys()
            .chain(y.overrides.keys())
            .copied()
            .collect();
        let overrides = keys
            .into_iter()
            .map(|i| (i, alpha * x.coord(i) + beta * y.coord(i)))
            .collect();
        SeqVector::new(overrides, tail).map(|s| s.canonical())
    }

    pub fn sub(&self, other: &SeqVector) -> Result<SeqVector> {
        SeqVector::lin_comb(1.0, self, -1.0, other)
    }

    /// `⟨x, y⟩` in closed form.
    pub fn inner(&self, other: &SeqVector) -> f64 {
        let tails = match (self.tail, other.tail) {
            (
                Tail::Geometric {
                    a: a1,
                    rho: r1,
                    start: s1,
                },
                Tail::Geometric {
                    a: a2,
                    rho: r2,
                    start: s2,
                },
            ) => {
                let m = s1.max(s2);
                a1 * a2 * pow(r1, m - s1) * pow(r2, m - s2) / (1.0 - r1 * r2)
            }
            _ => 0.0,
        };
        let keys: BTreeSet<u64> = self
            .overrides
            .keys()
            .chain(other.overrides.keys())
            .copied()
            .collect();
        let correction: f64 = keys
            .into_iter()
            .map(|i| {
                self.coord(i) * other.coord(i) - self.tail.value_at(i) * other.tail.value_at(i)
            })
            .sum();
        tails + correction
    }

    pub fn norm_sq(&self) -> f64 {
        self.mass_from(1)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().max(0.0).sqrt()
    }

    /// `Σ_{i ≥ j} xᵢ²` in closed form.
    pub fn mass_from(&self, j: u64) -> f64 {
        let j = j.max(1);
        let tail = match self.tail {
            Tail::Zero => 0.0,
            Tail::Geometric { a, rho, start } => {
                let first = j.max(start);
                let lead = a * pow(rho, first - start);
                lead * lead / (1.0 - rho * rho)
            }
        };
        let correction: f64 = self
            .overrides
            .range(j..)
            .map(|(&i, &v)| {
                let t = self.tail.value_at(i);
                v * v - t * t
            })
            .sum();
        (tail + correction).max(0.0)
    }

    /// Distance `‖x − y‖`, via subtraction when the tails combine and via
    /// the polarization identity otherwise.
    pub fn distance(&self, other: &SeqVector) -> f64 {
        match self.sub(other) {
            Ok(d) => d.norm(),
            Err(_) => (self.norm_sq() + other.norm_sq() - 2.0 * self.inner(other))
                .max(0.0)
                .sqrt(),
        }
    }
}
