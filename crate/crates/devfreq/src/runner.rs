//! Ties a parsed run configuration to the experiment harness, the default
//! bound for the kind, the compliance report and the output files.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use thiserror::Error;

use crate::borel_cantelli::EmpiricalTail;
use crate::bounds::{self, BoundError, BoundSpec, KRange};
use crate::config::{
    config_hash, to_canonical_text, ConfigError, RunConfig, RunManifest, MANIFEST_SCHEMA,
};
use crate::experiments::{
    estimate_overlap_tail, EventKind, ExperimentError, KcProcess, Level, QvLevel,
};
use crate::report::{compare, emit, ComplianceReport, EmitFormat, ReportError};

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl RunnerError {
    /// Exit-code contract: 2 config/usage, 3 resource, 1 is reserved for
    /// compliance failures (reported by the caller), 0 success.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunnerError::Experiment(ExperimentError::Resource(_)) => 3,
            RunnerError::Experiment(ExperimentError::Path(
                crate::path::PathError::Resource(_),
            )) => 3,
            _ => 2,
        }
    }
}

/// Default compliance bound for each experiment kind, with any notes about
/// the pairing.
pub fn default_bound(cfg: &RunConfig) -> Result<(BoundSpec, Vec<String>), RunnerError> {
    // Explicit override takes precedence.
    if let Some(id) = &cfg.bound_id {
        return Ok((bounds::bound_by_name(id, &cfg.bound_params)?, vec![]));
    }
    let mut notes = Vec::new();
    let mut p: BTreeMap<String, f64> = BTreeMap::new();
    let over = |key: &str, value: f64, params: &mut BTreeMap<String, f64>| {
        params.insert(
            key.to_string(),
            cfg.bound_params.get(key).copied().unwrap_or(value),
        );
    };
    let kind = &cfg.experiment.kind;
    let id: &str = match kind {
        EventKind::LevyOverlap { eps, .. } => {
            over("eps", *eps, &mut p);
            "thm1d"
        }
        EventKind::LevyOverlapRate { theta, .. } => {
            over("theta", *theta, &mut p);
            "thm1e"
        }
        EventKind::LevyStep { alpha } => {
            over("alpha", *alpha, &mut p);
            over("j", cfg.experiment.n_min.saturating_sub(1) as f64, &mut p);
            "thm1c"
        }
        EventKind::Doob { level } => match level {
            Level::Fixed(eps) => {
                over("eps", *eps, &mut p);
                "thm2"
            }
            Level::Schedule(theta) => {
                over("theta", *theta, &mut p);
                "thm2-schedule"
            }
        },
        EventKind::KcDyadic { gamma, process, .. } => match process {
            KcProcess::Bm => {
                over("gamma", *gamma, &mut p);
                over("alpha", cfg.params.get("alpha").copied().unwrap_or(4.0), &mut p);
                "thm3-bm"
            }
            KcProcess::Fbm { hurst } => {
                over("hurst", *hurst, &mut p);
                over("gamma", *gamma, &mut p);
                let default_alpha = if *hurst > *gamma {
                    2.0 / (hurst - gamma)
                } else {
                    cfg.params.get("alpha").copied().unwrap_or(4.0)
                };
                over(
                    "alpha",
                    cfg.params.get("alpha").copied().unwrap_or(default_alpha),
                    &mut p,
                );
                "thm3-fbm"
            }
        },
        EventKind::TotokiSheet { gamma, delta, .. } => {
            over("gamma", *gamma, &mut p);
            over("delta", *delta, &mut p);
            over("alpha", cfg.params.get("alpha").copied().unwrap_or(6.0), &mut p);
            over("c", cfg.params.get("c").copied().unwrap_or(3.0), &mut p);
            "thm4-sheet"
        }
        EventKind::ModulusLower { theta } => {
            over("theta", *theta, &mut p);
            for key in ["eta", "p", "k1"] {
                if let Some(v) = cfg.params.get(key) {
                    over(key, *v, &mut p);
                }
            }
            notes.push(
                "the Gumbel-decay constant K1 is not explicit; the bound is shape-only".into(),
            );
            "thm5-gumbel"
        }
        EventKind::ModulusUpper { theta, eps } => {
            over("theta", *theta, &mut p);
            over("eps", *eps, &mut p);
            "thm5-exp"
        }
        EventKind::Pwz { b } => {
            over("b", *b, &mut p);
            "thm6"
        }
        EventKind::Monotone => "thm7",
        EventKind::QvDyadic { t, level, .. } => match level {
            QvLevel::Fixed(eps) => {
                over("t", *t, &mut p);
                over("eps", *eps, &mut p);
                "thm8-dyadic"
            }
            QvLevel::Schedule { theta } | QvLevel::Gumbel { theta, .. } => {
                over("theta", *theta, &mut p);
                "thm8-schedule"
            }
        },
        EventKind::Khinchin { theta, delta, .. } => {
            over("delta", *delta, &mut p);
            over("theta", *theta, &mut p);
            if let Some(v) = cfg.params.get("p") {
                over("p", *v, &mut p);
            }
            "thm10"
        }
        EventKind::Chung { q, eps, .. } => {
            over("q", *q, &mut p);
            over("eps", *eps, &mut p);
            if let Some(v) = cfg.params.get("p") {
                over("p", *v, &mut p);
            }
            "thm11"
        }
        EventKind::KolmogorovTest { exponent, beta, .. } => {
            if *beta == 4.0 && *exponent > 0.5 {
                over("eps", exponent - 0.5, &mut p);
                "example8"
            } else {
                let b = kolmogorov_truncated_bound(
                    *exponent,
                    *beta,
                    cfg.experiment.n_min,
                    cfg.experiment.n_max,
                );
                notes.push(
                    "bound is the truncated weighted Markov bound for the scanned n-range"
                        .into(),
                );
                return Ok((b, notes));
            }
        }
        EventKind::Strassen { eta, q, level, .. } => match level {
            Level::Schedule(theta) => {
                over("theta", *theta, &mut p);
                "thm13-3c"
            }
            Level::Fixed(eps) => {
                if *eta > 0.5 {
                    over("eta", *eta, &mut p);
                    over("q", *q, &mut p);
                    over("eps", *eps, &mut p);
                    for key in ["vartheta", "p"] {
                        if let Some(v) = cfg.params.get(key) {
                            over(key, *v, &mut p);
                        }
                    }
                    "thm13-3a"
                } else {
                    over("a", cfg.params.get("a").copied().unwrap_or(1.0), &mut p);
                    over(
                        "vartheta",
                        cfg.params.get("vartheta").copied().unwrap_or(0.9 * eta),
                        &mut p,
                    );
                    over("q", *q, &mut p);
                    notes.push(
                        "small energy excess: the constant a is not explicit; shape-only".into(),
                    );
                    "thm13-2"
                }
            }
        },
    };
    Ok((bounds::bound_by_name(id, &p)?, notes))
}

/// Truncated weighted Markov bound for the nested benchmark events on the
/// scanned range: sum_j a_j phi(b_{n_min+j-1}) / S_a(k) with exponential
/// weights; phi is evaluated by quadrature.
fn kolmogorov_truncated_bound(exponent: f64, beta: f64, n_min: u64, n_max: u64) -> BoundSpec {
    let h = move |t: f64| t.powf(exponent);
    let rate = if exponent > 0.5 {
        (exponent - 0.5) * beta.ln() / 2.0
    } else {
        0.25
    };
    let count = n_max - n_min + 1;
    let mut k_sum = 0.0;
    for j in 1..=count {
        let b_n = beta.powi(-((n_min + j - 1) as i32));
        k_sum += (rate * j as f64).exp() * bounds::kolmogorov_phi(&h, b_n);
    }
    let er = rate.exp();
    let s_a = move |k: u64| er * ((rate * k as f64).exp() - 1.0) / (er - 1.0);
    BoundSpec::from_closure(
        "thm12",
        &[("exponent", exponent), ("beta", beta), ("rate", rate), ("k_sum", k_sum)],
        KRange::from_min(1),
        move |k| k_sum / s_a(k),
    )
}

#[derive(Debug)]
pub struct RunOutcome {
    pub tail: EmpiricalTail,
    pub report: ComplianceReport,
    pub failed: bool,
}

/// Runs the experiment and builds the compliance report in memory.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome, RunnerError> {
    let (bound, extra_notes) = default_bound(cfg)?;
    let tail = estimate_overlap_tail(&cfg.experiment, cfg.workers)?;
    let mut report = compare(&tail, &bound, cfg.confidence)?;
    report.notes.extend(extra_notes);
    let failed = report.any_failure();
    Ok(RunOutcome { tail, report, failed })
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// Runs the experiment and writes tail, report and manifest files into
/// `out_dir` (write-then-rename; no partial files on failure).
pub fn run_to_dir(cfg: &RunConfig, out_dir: &Path) -> Result<RunOutcome, RunnerError> {
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let outcome = run(cfg)?;
    fs::create_dir_all(out_dir)?;

    let tail_json = serde_json::to_string_pretty(&outcome.tail)
        .map_err(|e| ReportError::Serialize(e.to_string()))
        .map_err(RunnerError::from)?;
    write_atomic(&out_dir.join("tail.json"), tail_json.as_bytes())?;

    let mut tail_csv = String::from("k,count_ge,freq\n");
    for (k, c) in outcome.tail.counts_ge.iter().enumerate() {
        tail_csv.push_str(&format!(
            "{k},{c},{}\n",
            *c as f64 / outcome.tail.samples as f64
        ));
    }
    write_atomic(&out_dir.join("tail.csv"), tail_csv.as_bytes())?;

    let mut events_csv = String::from("n,fires,freq\n");
    for (i, f) in outcome.tail.event_fires.iter().enumerate() {
        events_csv.push_str(&format!(
            "{},{f},{}\n",
            outcome.tail.n_min + i as u64,
            *f as f64 / outcome.tail.samples as f64
        ));
    }
    write_atomic(&out_dir.join("events.csv"), events_csv.as_bytes())?;

    write_atomic(
        &out_dir.join("report.json"),
        emit(&outcome.report, EmitFormat::Json)?.as_bytes(),
    )?;
    write_atomic(
        &out_dir.join("report.csv"),
        emit(&outcome.report, EmitFormat::Csv)?.as_bytes(),
    )?;
    write_atomic(
        &out_dir.join("report.txt"),
        emit(&outcome.report, EmitFormat::Text)?.as_bytes(),
    )?;

    // Bound snapshot with sampled values, for report embedding.
    let (bound, _) = default_bound(cfg)?;
    let bound_json = serde_json::to_string_pretty(&bound.to_json(cfg.experiment.k_max))
        .map_err(|e| ReportError::Serialize(e.to_string()))
        .map_err(RunnerError::from)?;
    write_atomic(&out_dir.join("bound.json"), bound_json.as_bytes())?;

    let finished = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let manifest = RunManifest {
        schema: MANIFEST_SCHEMA.to_string(),
        config_hash: config_hash(&to_canonical_text(cfg)),
        seed: cfg.experiment.seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        started_unix: started,
        finished_unix: finished,
        outputs: [
            "tail.json",
            "tail.csv",
            "events.csv",
            "report.json",
            "report.csv",
            "report.txt",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
    };
    let manifest_json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| ReportError::Serialize(e.to_string()))
        .map_err(RunnerError::from)?;
    write_atomic(&out_dir.join("manifest.json"), manifest_json.as_bytes())?;
    Ok(outcome)
}

/// Output files that must be byte-identical across worker counts.
pub fn deterministic_outputs(out_dir: &Path) -> Vec<PathBuf> {
    [
        "tail.json",
        "tail.csv",
        "events.csv",
        "report.json",
        "report.csv",
        "report.txt",
        "bound.json",
    ]
    .iter()
    .map(|f| out_dir.join(f))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{default_config, parse_config};

    #[test]
    fn default_bounds_resolve_for_every_kind() {
        for kind in crate::config::KIND_NAMES {
            let cfg = default_config(kind, true).unwrap();
            let (bound, _) = default_bound(&cfg).unwrap();
            assert!(bound.eval(bound.valid_k.min).is_finite(), "{kind}");
        }
    }

    #[test]
    fn bound_override_by_id() {
        let text = "[experiment]\nkind = monotone\n[bound]\nid = thm8-dyadic\neps = 0.5\n";
        let cfg = parse_config(text).unwrap();
        let (bound, _) = default_bound(&cfg).unwrap();
        assert_eq!(bound.name, "thm8-dyadic");
    }

    #[test]
    fn quick_run_writes_outputs() {
        let mut cfg = default_config("monotone", true).unwrap();
        cfg.experiment.samples = 200;
        let dir = std::env::temp_dir().join(format!("devfreq-test-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        let outcome = run_to_dir(&cfg, &dir).unwrap();
        assert!(!outcome.failed);
        for f in deterministic_outputs(&dir) {
            assert!(f.exists(), "{f:?}");
        }
        assert!(dir.join("manifest.json").exists());
        let _ = std::fs::remove_dir_all(&dir);
    }
}
