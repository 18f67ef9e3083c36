//! Measurement records and their text format.
//!
//! ```text
//! # nlinterf record v1
//! scheme = direct
//! epsilon = 0.1
//! g = 0.6 0.3
//! seed = 42
//! stream = 0
//! shots = 3
//! 0 0,0
//! 1.5707963267948966 1,0
//! 0 0,0
//! ```
//!
//! Header lines are `key = value` in the order shown; `g = none` marks a
//! record without a known truth. Each shot line starts with the phase `δ`,
//! followed by
//!
//! | scheme | fields after δ |
//! |--------|----------------|
//! | direct, entangled | outcome label (`0,0`, `1,0`, `0,1` or `y0`..`y4`) |
//! | heterodyne | `Re μ  Im μ  Re ν  Im ν` |
//! | homodyne | `x  y` |
//!
//! Floats are written in shortest round-trip form, so parsing a written
//! record reproduces it exactly.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::povm::{discrete_povm, Scheme};
use crate::rng::StreamId;

const MAGIC: &str = "# nlinterf record v1";

/// Phase applied on each shot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DeltaSchedule {
    Constant(f64),
    /// `δ₁, δ₁ + π/2, δ₁, …`
    Alternating {
        delta1: f64,
    },
    /// Explicit phases; must cover every shot.
    PerShot(Vec<f64>),
}

impl Default for DeltaSchedule {
    fn default() -> Self {
        DeltaSchedule::Alternating { delta1: 0.0 }
    }
}

impl DeltaSchedule {
    pub fn delta(&self, shot: usize) -> f64 {
        match self {
            DeltaSchedule::Constant(d) => *d,
            DeltaSchedule::Alternating { delta1 } => {
                if shot.is_multiple_of(2) {
                    *delta1
                } else {
                    delta1 + FRAC_PI_2
                }
            }
            DeltaSchedule::PerShot(v) => v[shot],
        }
    }

    pub(crate) fn check(&self, shots: usize) -> Result<()> {
        match self {
            DeltaSchedule::PerShot(v) if v.len() < shots => {
                Err(domain(format!("schedule has {} phases for {shots} shots", v.len())))
            }
            DeltaSchedule::PerShot(v) if v.iter().any(|d| !d.is_finite()) => Err(domain("non-finite phase")),
            DeltaSchedule::Constant(d) | DeltaSchedule::Alternating { delta1: d } if !d.is_finite() => {
                Err(domain("non-finite phase"))
            }
            _ => Ok(()),
        }
    }

    /// Distinct phases with the number of shots using each, in order of first
    /// use.
    pub fn multiplicities(&self, shots: usize) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for i in 0..shots {
            let d = self.delta(i);
            match out.iter_mut().find(|(x, _)| x.to_bits() == d.to_bits()) {
                Some((_, n)) => *n += 1,
                None => out.push((d, 1)),
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Outcome {
    /// Index into the scheme's discrete POVM.
    Discrete(usize),
    Heterodyne {
        mu: Complex64,
        nu: Complex64,
    },
    Homodyne {
        x: f64,
        y: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shot {
    pub delta: f64,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub scheme: Scheme,
    pub epsilon: f64,
    /// Generating value when the record is synthetic.
    pub g_truth: Option<Complex64>,
    pub stream: StreamId,
    pub shots: Vec<Shot>,
}

impl MeasurementRecord {
    pub fn len(&self) -> usize {
        self.shots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shots.is_empty()
    }

    /// Checks that every outcome belongs to the scheme's support.
    pub fn validate(&self) -> Result<()> {
        let labels = self.labels()?;
        for (i, s) in self.shots.iter().enumerate() {
            let ok = match (self.scheme, s.outcome) {
                (Scheme::Direct | Scheme::Entangled, Outcome::Discrete(k)) => k < labels.len(),
                (Scheme::Heterodyne, Outcome::Heterodyne { mu, nu }) => {
                    mu.re.is_finite() && mu.im.is_finite() && nu.re.is_finite() && nu.im.is_finite()
                }
                (Scheme::Homodyne, Outcome::Homodyne { x, y }) => x.is_finite() && y.is_finite(),
                _ => false,
            };
            if !ok || !s.delta.is_finite() {
                return Err(domain(format!("shot {i} is outside the {} support", self.scheme)));
            }
        }
        Ok(())
    }

    fn labels(&self) -> Result<Vec<String>> {
        if self.scheme.is_discrete() {
            Ok(discrete_povm(self.scheme, 0.0)?.labels())
        } else {
            Ok(Vec::new())
        }
    }

    /// Serializes to the line format described in the module docs.
    pub fn to_text(&self) -> String {
        let labels = self.labels().unwrap_or_default();
        let mut s = String::with_capacity(32 * self.shots.len() + 128);
        let _ = writeln!(s, "{MAGIC}");
        let _ = writeln!(s, "scheme = {}", self.scheme);
        let _ = writeln!(s, "epsilon = {}", self.epsilon);
        match self.g_truth {
            Some(g) => {
                let _ = writeln!(s, "g = {} {}", g.re, g.im);
            }
            None => {
                let _ = writeln!(s, "g = none");
            }
        }
        let _ = writeln!(s, "seed = {}", self.stream.master_seed);
        let _ = writeln!(s, "stream = {}", self.stream.stream);
        let _ = writeln!(s, "shots = {}", self.shots.len());
        for shot in &self.shots {
            let _ = match shot.outcome {
                Outcome::Discrete(k) => writeln!(s, "{} {}", shot.delta, labels[k]),
                Outcome::Heterodyne { mu, nu } => {
                    writeln!(s, "{} {} {} {} {}", shot.delta, mu.re, mu.im, nu.re, nu.im)
                }
                Outcome::Homodyne { x, y } => writeln!(s, "{} {} {}", shot.delta, x, y),
            };
        }
        s
    }

    /// Parses the line format and validates the result.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let mut next = |what: &str| -> Result<(usize, &str)> {
            lines
                .by_ref()
                .find(|(_, l)| !l.is_empty())
                .ok_or_else(|| Error::Parse { line: 0, message: format!("missing {what}") })
        };

        let (line, magic) = next("header")?;
        if magic != MAGIC {
            return Err(Error::Parse { line, message: format!("expected '{MAGIC}'") });
        }
        let mut header = |key: &str| -> Result<(usize, String)> {
            let (line, l) = next(key)?;
            match l.split_once('=') {
                Some((k, v)) if k.trim() == key => Ok((line, v.trim().to_string())),
                _ => Err(Error::Parse { line, message: format!("expected '{key} = ...'") }),
            }
        };
        let (line, v) = header("scheme")?;
        let scheme: Scheme = v.parse().map_err(|e: Error| Error::Parse { line, message: e.to_string() })?;
        let (line, v) = header("epsilon")?;
        let epsilon = parse_f64(&v, line)?;
        let (line, v) = header("g")?;
        let g_truth = if v == "none" {
            None
        } else {
            let f = parse_fields(&v, line, 2)?;
            Some(Complex64::new(f[0], f[1]))
        };
        let (line, v) = header("seed")?;
        let master_seed = v.parse().map_err(|_| Error::Parse { line, message: format!("bad seed '{v}'") })?;
        let (line, v) = header("stream")?;
        let stream = v.parse().map_err(|_| Error::Parse { line, message: format!("bad stream '{v}'") })?;
        let (line, v) = header("shots")?;
        let count: usize = v.parse().map_err(|_| Error::Parse { line, message: format!("bad shot count '{v}'") })?;

        let mut record = MeasurementRecord {
            scheme,
            epsilon,
            g_truth,
            stream: StreamId::new(master_seed, stream),
            shots: Vec::with_capacity(count),
        };
        let labels = record.labels()?;
        for (line, l) in lines.filter(|(_, l)| !l.is_empty()) {
            let mut parts = l.split_whitespace();
            let delta = parse_f64(parts.next().unwrap_or(""), line)?;
            let rest: Vec<&str> = parts.collect();
            let outcome = match scheme {
                Scheme::Direct | Scheme::Entangled => {
                    let label = rest.first().copied().unwrap_or("");
                    let k = labels
                        .iter()
                        .position(|x| x == label)
                        .ok_or_else(|| Error::Parse { line, message: format!("unknown outcome '{label}'") })?;
                    if rest.len() != 1 {
                        return Err(Error::Parse { line, message: "expected one label".into() });
                    }
                    Outcome::Discrete(k)
                }
                Scheme::Heterodyne => {
                    let f = parse_fields(&rest.join(" "), line, 4)?;
                    Outcome::Heterodyne { mu: Complex64::new(f[0], f[1]), nu: Complex64::new(f[2], f[3]) }
                }
                Scheme::Homodyne => {
                    let f = parse_fields(&rest.join(" "), line, 2)?;
                    Outcome::Homodyne { x: f[0], y: f[1] }
                }
            };
            record.shots.push(Shot { delta, outcome });
        }
        if record.shots.len() != count {
            return Err(Error::Parse {
                line: 0,
                message: format!("header declares {count} shots, found {}", record.shots.len()),
            });
        }
        record.validate()?;
        Ok(record)
    }
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.parse::<f64>().map_err(|_| Error::Parse { line, message: format!("bad number '{s}'") })
}

fn parse_fields(s: &str, line: usize, n: usize) -> Result<Vec<f64>> {
    let v = s.split_whitespace().map(|x| parse_f64(x, line)).collect::<Result<Vec<_>>>()?;
    if v.len() != n {
        return Err(Error::Parse { line, message: format!("expected {n} numbers, found {}", v.len()) });
    }
    Ok(v)
}
