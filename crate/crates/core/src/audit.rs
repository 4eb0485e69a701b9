//! Eavesdropping test for entanglement-based key distribution with a beam of
//! massive particles whose velocities follow a known distribution.
//!
//! Every pair carries one shared velocity, so the measured CHSH value is the
//! weighted average of the per-velocity values. A pure singlet beam can
//! still fall below the alarm threshold, which is what the audit flags.

use std::io::Read;

use serde::ser::Error as _;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::bell::{chsh_value, ChshSettings, TSIRELSON};
use crate::error::{Error, Result};
use crate::kinematics::{BeamVelocity, Vec3};

/// Alarm threshold used when none is given.
pub const DEFAULT_ALARM_THRESHOLD: f64 = 2.7;

pub const CSV_HEADER: [&str; 4] = ["beta_x", "beta_y", "beta_z", "weight"];

const THRESHOLD_NOTE: &str =
    "alarm rule |expected_chsh| < alarm_threshold is an operator choice, not a derived bound";

/// Neumaier-compensated sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<T: IntoIterator<Item = f64>>(iter: T) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocitySample {
    pub beta: BeamVelocity,
    pub weight: f64,
}

/// Discrete normalized distribution of beam velocities.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityDistribution {
    samples: Vec<VelocitySample>,
}

impl VelocityDistribution {
    /// Normalizes `(β, weight)` pairs. Weights must be positive and every
    /// `|β|` strictly below 1.
    pub fn from_samples(samples: impl IntoIterator<Item = (Vec3, f64)>) -> Result<Self> {
        let raw: Vec<(Vec3, f64)> = samples.into_iter().collect();
        if raw.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        let mut checked = Vec::with_capacity(raw.len());
        for (i, (beta, weight)) in raw.into_iter().enumerate() {
            validate_row(i + 1, &beta, weight)?;
            checked.push((beta, weight));
        }
        let total: CompensatedSum = checked.iter().map(|(_, w)| *w).collect();
        let total = total.value();
        Ok(VelocityDistribution {
            samples: checked
                .into_iter()
                .map(|(beta, weight)| VelocitySample {
                    beta: BeamVelocity::new(beta).expect("validated"),
                    weight: weight / total,
                })
                .collect(),
        })
    }

    /// All pairs at one velocity.
    pub fn delta(beta: BeamVelocity) -> Self {
        VelocityDistribution {
            samples: vec![VelocitySample { beta, weight: 1.0 }],
        }
    }

    /// `w·first + (1-w)·second`, with `w` in `(0, 1)`.
    pub fn mix(first: &Self, second: &Self, w: f64) -> Result<Self> {
        if !(w > 0.0 && w < 1.0) {
            return Err(Error::InvalidOption("mixing weight must lie in (0, 1)"));
        }
        let rows = first
            .samples
            .iter()
            .map(|s| (s.beta.vector(), s.weight * w))
            .chain(
                second
                    .samples
                    .iter()
                    .map(|s| (s.beta.vector(), s.weight * (1.0 - w))),
            );
        Self::from_samples(rows)
    }

    pub fn samples(&self) -> &[VelocitySample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

fn validate_row(line: usize, beta: &Vec3, weight: f64) -> Result<()> {
    if !beta.iter().all(|c| c.is_finite()) || !weight.is_finite() {
        return Err(Error::ParseError {
            line,
            message: "non-finite value".to_string(),
        });
    }
    if !(weight > 0.0) {
        return Err(Error::ParseError {
            line,
            message: format!("weight {weight} must be positive"),
        });
    }
    let beta_mag = beta.norm();
    if beta_mag >= 1.0 {
        return Err(Error::SuperluminalSample { line, beta_mag });
    }
    Ok(())
}

/// Parses CSV with header `beta_x,beta_y,beta_z,weight`. Line numbers in
/// errors count the header as line 1.
pub fn load_distribution<R: Read>(source: R) -> Result<VelocityDistribution> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let header = reader.headers().map_err(|e| Error::ParseError {
        line: 1,
        message: e.to_string(),
    })?;
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::ParseError {
            line: 1,
            message: format!("expected header `{}`", CSV_HEADER.join(",")),
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::ParseError {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() != 4 {
            return Err(Error::ParseError {
                line,
                message: format!("expected 4 fields, found {}", record.len()),
            });
        }
        let mut values = [0.0; 4];
        for (slot, field) in values.iter_mut().zip(record.iter()) {
            *slot = field.parse::<f64>().map_err(|e| Error::ParseError {
                line,
                message: format!("`{field}`: {e}"),
            })?;
        }
        let beta = Vec3::new(values[0], values[1], values[2]);
        validate_row(line, &beta, values[3])?;
        rows.push((beta, values[3]));
    }
    if rows.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    VelocityDistribution::from_samples(rows)
}

pub fn load_distribution_str(source: &str) -> Result<VelocityDistribution> {
    load_distribution(source.as_bytes())
}

fn per_sample_chsh(d: &VelocityDistribution, s: &ChshSettings) -> Result<Vec<f64>> {
    d.samples
        .iter()
        .enumerate()
        .map(|(index, sample)| {
            chsh_value(s, &sample.beta).map_err(|e| Error::DegenerateSample {
                index,
                source: Box::new(e),
            })
        })
        .collect()
}

/// `Σ_k w_k c(s, β_k)`.
pub fn expected_chsh(d: &VelocityDistribution, s: &ChshSettings) -> Result<f64> {
    let values = per_sample_chsh(d, s)?;
    let sum: CompensatedSum = d
        .samples
        .iter()
        .zip(values)
        .map(|(sample, c)| sample.weight * c)
        .collect();
    Ok(sum.value())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    NoAlarm,
    FalseAlarmRisk,
}

fn sig17<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return s.serialize_none();
    }
    let raw = RawValue::from_string(format!("{x:.16e}")).map_err(S::Error::custom)?;
    raw.serialize(s)
}

fn sig17_triple<S: Serializer>(v: &[f64; 3], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(3))?;
    for x in v {
        let raw = RawValue::from_string(format!("{x:.16e}")).map_err(S::Error::custom)?;
        seq.serialize_element(&raw)?;
    }
    seq.end()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleContribution {
    #[serde(serialize_with = "sig17_triple")]
    pub beta: [f64; 3],
    #[serde(serialize_with = "sig17")]
    pub weight: f64,
    #[serde(serialize_with = "sig17")]
    pub chsh: f64,
    /// `weight · chsh`.
    #[serde(serialize_with = "sig17")]
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    #[serde(serialize_with = "sig17")]
    pub expected_chsh: f64,
    /// CHSH value of the same settings at rest.
    #[serde(serialize_with = "sig17")]
    pub ideal_chsh: f64,
    /// `|ideal_chsh| - |expected_chsh|`.
    #[serde(serialize_with = "sig17")]
    pub degradation: f64,
    #[serde(serialize_with = "sig17")]
    pub alarm_threshold: f64,
    pub verdict: Verdict,
    pub threshold_note: &'static str,
    pub samples: Vec<SampleContribution>,
}

impl AuditReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Expected CHSH under `d`, compared against its rest-frame value and the
/// alarm threshold. `FalseAlarmRisk` iff `|expected| < alarm_threshold`.
pub fn audit(d: &VelocityDistribution, s: &ChshSettings, alarm_threshold: f64) -> Result<AuditReport> {
    if !(alarm_threshold > 0.0 && alarm_threshold <= TSIRELSON) {
        return Err(Error::InvalidThreshold(alarm_threshold));
    }
    let values = per_sample_chsh(d, s)?;
    let samples: Vec<SampleContribution> = d
        .samples
        .iter()
        .zip(values)
        .map(|(sample, c)| SampleContribution {
            beta: sample.beta.to_array(),
            weight: sample.weight,
            chsh: c,
            contribution: sample.weight * c,
        })
        .collect();
    let expected: CompensatedSum = samples.iter().map(|c| c.contribution).collect();
    let expected_chsh = expected.value();
    let ideal_chsh = chsh_value(s, &BeamVelocity::rest())?;
    let verdict = if expected_chsh.abs() < alarm_threshold {
        Verdict::FalseAlarmRisk
    } else {
        Verdict::NoAlarm
    };
    Ok(AuditReport {
        expected_chsh,
        ideal_chsh,
        degradation: ideal_chsh.abs() - expected_chsh.abs(),
        alarm_threshold,
        verdict,
        threshold_note: THRESHOLD_NOTE,
        samples,
    })
}
