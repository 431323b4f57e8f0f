//! Command-line driver: `devfreq run`, `devfreq bounds`, `devfreq selftest`.
//!
//! Exit codes: 0 success, 1 bound-compliance failure (report still
//! written), 2 usage/config errors, 3 resource limits.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use devfreq::bounds::{self, constants};
use devfreq::config::{self, parse_config, to_canonical_text};
use devfreq::runner;
use devfreq::selftest::{run_selftest, Level};

const USAGE: &str = "\
devfreq - deviation-frequency experiments for Brownian path approximations

USAGE:
  devfreq run <config-file> [--out DIR] [--workers N]
  devfreq run --preset <kind>[:quick] [--out DIR] [--workers N]
  devfreq run --print-defaults [--kind <kind>]
  devfreq bounds <id> [key=value ...] [--k A..B] [--csv FILE]
  devfreq bounds constants
  devfreq selftest [--full] [--json FILE]

Experiment kinds:
  levy-overlap levy-rate levy-step doob kc-dyadic totoki-sheet
  modulus-lower modulus-upper pwz monotone qv-dyadic khinchin chung
  kolmogorov-test strassen

Bound ids:
  thm1c thm1d thm1e thm2 thm2-schedule thm3 thm3-bm thm3-fbm thm4
  thm4-sheet thm5-gumbel thm5-exp thm6 thm7 thm8-dyadic thm8-dyadic-sharp
  thm8-schedule thm8-gumbel thm10 thm11 example8 thm13-2 thm13-3a
  thm13-3b thm13-3c

The DEVFREQ_WORKERS environment variable supplies the worker count when
--workers is absent (0 means the rayon default).
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let code = match args.first().map(String::as_str) {
        Some("run") => cmd_run(&args[1..]),
        Some("bounds") => cmd_bounds(&args[1..]),
        Some("selftest") => cmd_selftest(&args[1..]),
        Some("--help") | Some("-h") | Some("help") => {
            print!("{USAGE}");
            0
        }
        _ => {
            eprint!("{USAGE}");
            2
        }
    };
    ExitCode::from(code)
}

fn env_workers() -> usize {
    std::env::var("DEVFREQ_WORKERS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(0)
}

fn cmd_run(args: &[String]) -> u8 {
    let mut config_path: Option<PathBuf> = None;
    let mut out_dir = PathBuf::from("devfreq-out");
    let mut workers: Option<usize> = None;
    let mut preset: Option<String> = None;
    let mut print_defaults = false;
    let mut kind_for_defaults = "monotone".to_string();
    let mut i = 0;
    while i < args.len() {
        match args[i].as_str() {
            "--out" | "-o" => {
                i += 1;
                let Some(v) = args.get(i) else {
                    eprintln!("--out needs a directory");
                    return 2;
                };
                out_dir = PathBuf::from(v);
            }
            "--workers" => {
                i += 1;
                match args.get(i).and_then(|v| v.parse().ok()) {
                    Some(n) => workers = Some(n),
                    None => {
                        eprintln!("--workers needs an integer");
                        return 2;
                    }
                }
            }
            "--preset" => {
                i += 1;
                let Some(v) = args.get(i) else {
                    eprintln!("--preset needs a kind name");
                    return 2;
                };
                preset = Some(v.clone());
            }
            "--print-defaults" => print_defaults = true,
            "--kind" => {
                i += 1;
                let Some(v) = args.get(i) else {
                    eprintln!("--kind needs a kind name");
                    return 2;
                };
                kind_for_defaults = v.clone();
            }
            other if !other.starts_with('-') && config_path.is_none() => {
                config_path = Some(PathBuf::from(other));
            }
            other => {
                eprintln!("unknown argument {other:?}");
                return 2;
            }
        }
        i += 1;
    }

    if print_defaults {
        return match config::default_config(&kind_for_defaults, false) {
            Ok(cfg) => {
                print!("{}", to_canonical_text(&cfg));
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
        };
    }

    let mut cfg = if let Some(preset) = preset {
        let (kind, quick) = match preset.split_once(':') {
            Some((k, "quick")) => (k.to_string(), true),
            Some((k, other)) => {
                eprintln!("unknown preset flavor {other:?} for {k}");
                return 2;
            }
            None => (preset, false),
        };
        match config::default_config(&kind, quick) {
            Ok(cfg) => cfg,
            Err(e) => {
                eprintln!("error: {e}");
                return 2;
            }
        }
    } else {
        let Some(path) = config_path else {
            eprintln!("error: missing config file (or --preset)");
            return 2;
        };
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return 2;
            }
        };
        match parse_config(&text) {
            Ok(cfg) => cfg,
            Err(e) => {
                eprintln!("config error: {e}");
                return 2;
            }
        }
    };
    if let Some(w) = workers {
        cfg.workers = w;
    } else if cfg.workers == 0 {
        cfg.workers = env_workers();
    }

    match runner::run_to_dir(&cfg, &out_dir) {
        Ok(outcome) => {
            let fails = outcome
                .report
                .rows
                .iter()
                .filter(|r| r.verdict == devfreq::report::Verdict::Fail)
                .count();
            println!(
                "wrote {} (k rows 0..{}, {} samples); {} failing rows",
                out_dir.display(),
                outcome.tail.k_max(),
                outcome.tail.samples,
                fails
            );
            if outcome.failed {
                1
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code() as u8
        }
    }
}

fn cmd_bounds(args: &[String]) -> u8 {
    let Some(id) = args.first() else {
        eprintln!("usage: devfreq bounds <id> [key=value ...] [--k A..B] [--csv FILE]");
        return 2;
    };
    if id == "constants" {
        let rows = [
            ("C_a", constants::c_a()),
            ("c_1", constants::c_1()),
            ("c_2", constants::c_2()),
            ("C_a c_1", constants::c_a() * constants::c_1()),
            ("C_a c_2", constants::c_a() * constants::c_2()),
            ("C (thm1d)", constants::overlap_c()),
            ("K (thm2)", constants::doob_k()),
            ("c_pi", constants::c_pi()),
            ("24/(5 pi)", constants::chung_leading()),
            ("e^(9/8)", constants::e_nine_eighths()),
        ];
        for (name, value) in rows {
            println!("{name:<10} = {value:<9.4} ({value:.12})");
        }
        return 0;
    }
    let mut params = BTreeMap::new();
    let mut k_range = (1u64, 20u64);
    let mut csv: Option<PathBuf> = None;
    let mut i = 1;
    while i < args.len() {
        match args[i].as_str() {
            "--k" => {
                i += 1;
                let Some(spec) = args.get(i) else {
                    eprintln!("--k needs a range A..B");
                    return 2;
                };
                let Some((a, b)) = spec.split_once("..") else {
                    eprintln!("--k needs a range A..B");
                    return 2;
                };
                match (a.parse(), b.parse()) {
                    (Ok(a), Ok(b)) if a <= b => k_range = (a, b),
                    _ => {
                        eprintln!("bad k range {spec:?}");
                        return 2;
                    }
                }
            }
            "--csv" => {
                i += 1;
                let Some(v) = args.get(i) else {
                    eprintln!("--csv needs a file");
                    return 2;
                };
                csv = Some(PathBuf::from(v));
            }
            kv => {
                let Some((key, value)) = kv.split_once('=') else {
                    eprintln!("expected key=value, got {kv:?}");
                    return 2;
                };
                let Ok(value) = value.parse::<f64>() else {
                    eprintln!("parameter {key} needs a numeric value, got {value:?}");
                    return 2;
                };
                params.insert(key.to_string(), value);
            }
        }
        i += 1;
    }
    let bound = match bounds::bound_by_name(id, &params) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let mut csv_text = String::from("k,bound,in_range\n");
    println!("{} {:?}", bound.name, bound.params);
    println!("{:>5} {:>14} {:>9}", "k", "bound", "in-range");
    for k in k_range.0..=k_range.1 {
        let v = bound.eval(k);
        let in_range = bound.valid_k.contains(k);
        println!("{k:>5} {v:>14.6e} {in_range:>9}");
        csv_text.push_str(&format!("{k},{v},{in_range}\n"));
    }
    if let Some(path) = csv {
        if let Err(e) = std::fs::write(&path, csv_text) {
            eprintln!("error writing {}: {e}", path.display());
            return 2;
        }
    }
    0
}

fn cmd_selftest(args: &[String]) -> u8 {
    let mut level = Level::Quick;
    let mut json_path: Option<PathBuf> = None;
    let mut i = 0;
    while i < args.len() {
        match args[i].as_str() {
            "--full" => level = Level::Full,
            "--json" => {
                i += 1;
                let Some(v) = args.get(i) else {
                    eprintln!("--json needs a file");
                    return 2;
                };
                json_path = Some(PathBuf::from(v));
            }
            other => {
                eprintln!("unknown argument {other:?}");
                return 2;
            }
        }
        i += 1;
    }
    let report = run_selftest(level, None);
    for c in &report.checks {
        println!("{} {}: {}", if c.pass { "ok  " } else { "FAIL" }, c.name, c.detail);
    }
    if let Some(path) = json_path {
        match serde_json::to_string_pretty(&report) {
            Ok(json) => {
                if let Err(e) = std::fs::write(&path, json) {
                    eprintln!("error writing {}: {e}", path.display());
                    return 2;
                }
            }
            Err(e) => {
                eprintln!("serialization error: {e}");
                return 2;
            }
        }
    }
    if report.all_passed() {
        0
    } else {
        1
    }
}
