//! Wilson score intervals, bound-compliance verdicts and report emission.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::borel_cantelli::EmpiricalTail;
use crate::bounds::BoundSpec;
use crate::special::inverse_normal_cdf;

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error("need 0 <= successes <= trials, got {successes}/{trials}")]
    CountDomain { successes: u64, trials: u64 },
    #[error("confidence must lie in (0,1), got {0}")]
    ConfidenceDomain(f64),
    #[error("bound valid from k = {bound_min} but empirical tail ends at k = {k_max}")]
    DisjointRanges { bound_min: u64, k_max: u64 },
    #[error("serialization failed: {0}")]
    Serialize(String),
}

/// Two-sided Wilson score interval at the given confidence level.
pub fn wilson_interval(
    successes: u64,
    trials: u64,
    confidence: f64,
) -> Result<(f64, f64), ReportError> {
    let z = two_sided_z(confidence)?;
    Ok(wilson_with_z(successes, trials, z)?)
}

/// One-sided Wilson upper confidence bound.
pub fn wilson_upper(successes: u64, trials: u64, confidence: f64) -> Result<f64, ReportError> {
    let z = one_sided_z(confidence)?;
    Ok(wilson_with_z(successes, trials, z)?.1)
}

/// One-sided Wilson lower confidence bound.
pub fn wilson_lower(successes: u64, trials: u64, confidence: f64) -> Result<f64, ReportError> {
    let z = one_sided_z(confidence)?;
    Ok(wilson_with_z(successes, trials, z)?.0)
}

fn two_sided_z(confidence: f64) -> Result<f64, ReportError> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(ReportError::ConfidenceDomain(confidence));
    }
    Ok(inverse_normal_cdf((1.0 + confidence) / 2.0)
        .map_err(|_| ReportError::ConfidenceDomain(confidence))?)
}

fn one_sided_z(confidence: f64) -> Result<f64, ReportError> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(ReportError::ConfidenceDomain(confidence));
    }
    Ok(inverse_normal_cdf(confidence).map_err(|_| ReportError::ConfidenceDomain(confidence))?)
}

fn wilson_with_z(successes: u64, trials: u64, z: f64) -> Result<(f64, f64), ReportError> {
    if trials == 0 || successes > trials {
        return Err(ReportError::CountDomain { successes, trials });
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = p + z2 / (2.0 * n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = ((center - half) / denom).max(0.0);
    let hi = ((center + half) / denom).min(1.0);
    Ok((lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    VacuousPass,
    Fail,
    ShapeOnly,
    Skipped,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Pass => "pass",
            Verdict::VacuousPass => "vacuous-pass",
            Verdict::Fail => "fail",
            Verdict::ShapeOnly => "shape-only",
            Verdict::Skipped => "skipped",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub k: u64,
    pub successes: u64,
    pub trials: u64,
    pub empirical: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub bound: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplianceReport {
    pub schema: String,
    pub experiment: String,
    pub bound_name: String,
    pub bound_params: BTreeMap<String, f64>,
    pub confidence: f64,
    pub rows: Vec<ReportRow>,
    pub notes: Vec<String>,
}

pub const REPORT_SCHEMA: &str = "devfreq-report/1";

impl ComplianceReport {
    pub fn any_failure(&self) -> bool {
        self.rows.iter().any(|r| r.verdict == Verdict::Fail)
    }
}

/// Per-k comparison of the empirical tail against a closed-form bound.
///
/// A row fails only when the one-sided lower confidence bound of the
/// empirical frequency exceeds the bound value; bounds >= 1 pass vacuously
/// and shape-only bounds are marked, not judged.
pub fn compare(
    tail: &EmpiricalTail,
    bound: &BoundSpec,
    confidence: f64,
) -> Result<ComplianceReport, ReportError> {
    let k_max = tail.k_max();
    if bound.valid_k.min > k_max {
        return Err(ReportError::DisjointRanges {
            bound_min: bound.valid_k.min,
            k_max,
        });
    }
    let mut rows = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max {
        let successes = tail.counts_ge[k as usize];
        let trials = tail.samples;
        let (ci_lo, ci_hi) = wilson_interval(successes, trials, confidence)?;
        let value = bound.eval(k);
        let verdict = if !bound.valid_k.contains(k) {
            Verdict::Skipped
        } else if bound.shape_only {
            Verdict::ShapeOnly
        } else if value >= 1.0 {
            Verdict::VacuousPass
        } else if wilson_lower(successes, trials, confidence)? > value {
            Verdict::Fail
        } else {
            Verdict::Pass
        };
        rows.push(ReportRow {
            k,
            successes,
            trials,
            empirical: successes as f64 / trials as f64,
            ci_lo,
            ci_hi,
            bound: value,
            verdict,
        });
    }
    let mut notes = tail.notes.clone();
    if bound.shape_only {
        notes.push(
            "bound carries a user-supplied constant; rows are marked shape-only".to_string(),
        );
    }
    Ok(ComplianceReport {
        schema: REPORT_SCHEMA.to_string(),
        experiment: format!("n = {}..{}, {} samples", tail.n_min, tail.n_max, tail.samples),
        bound_name: bound.name.clone(),
        bound_params: bound.params.clone(),
        confidence,
        rows,
        notes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Json,
    Csv,
    Text,
}

/// Serializes a report with stable field ordering. JSON round-trips to the
/// identical in-memory value.
pub fn emit(report: &ComplianceReport, format: EmitFormat) -> Result<String, ReportError> {
    match format {
        EmitFormat::Json => {
            serde_json::to_string_pretty(report).map_err(|e| ReportError::Serialize(e.to_string()))
        }
        EmitFormat::Csv => {
            let mut out = String::from("k,successes,trials,empirical,ci_lo,ci_hi,bound,verdict\n");
            for r in &report.rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r.k, r.successes, r.trials, r.empirical, r.ci_lo, r.ci_hi, r.bound, r.verdict
                ));
            }
            Ok(out)
        }
        EmitFormat::Text => {
            let mut out = String::new();
            out.push_str(&format!(
                "bound {} at confidence {}\n",
                report.bound_name, report.confidence
            ));
            out.push_str(&format!(
                "{:>5} {:>12} {:>12} {:>12} {:>12} {:>13}\n",
                "k", "empirical", "ci_lo", "ci_hi", "bound", "verdict"
            ));
            for r in &report.rows {
                out.push_str(&format!(
                    "{:>5} {:>12.6} {:>12.6} {:>12.6} {:>12.6e} {:>13}\n",
                    r.k, r.empirical, r.ci_lo, r.ci_hi, r.bound, r.verdict
                ));
            }
            for n in &report.notes {
                out.push_str(&format!("note: {n}\n"));
            }
            Ok(out)
        }
    }
}
