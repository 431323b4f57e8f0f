//! Event schedules for each path-property approximation, and the Monte
//! Carlo harness that estimates the empirical overlap tail.
//!
//! Each kind evaluates its events on the grids the statements themselves
//! use (dyadic, uniform ceil(e^n), theta^n brackets), so most schedules are
//! exact grid events. Kinds involving a supremum over a continuum carry a
//! one-sided grid bias whose direction is recorded in the run notes.

use rayon::prelude::*;
use thiserror::Error;

use crate::borel_cantelli::EmpiricalTail;
use crate::bounds::{self, BoundError, RateSchedule};
use crate::path::{PathError, PathOnGrid};
use crate::paths;
use crate::rng::{Coefficients, GaussianCoefficients};
use crate::taut_string::{self, TautError};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Taut(#[from] TautError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error("invalid configuration: {0}")]
    Domain(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("partition point {0} is not on the path grid")]
    PartitionNotInGrid(f64),
    #[error("no grid points inside bracket n = {0}")]
    EmptyBracket(u64),
}

/// Fixed error level or a theorem-supplied shrinking schedule keyed by
/// theta (see the per-kind docs).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Level {
    Fixed(f64),
    Schedule(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KcProcess {
    Bm,
    Fbm { hurst: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QvLevel {
    Fixed(f64),
    /// eps_n = sqrt(2 t n^theta |Pi_n|).
    Schedule { theta: f64 },
    /// delta_n = (2 t theta / lambda) ln(2^{1/theta} n) 2^{-n}.
    Gumbel { theta: f64, lambda: f64 },
}

/// One event schedule per quantified statement.
#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    /// ||L^J - L^{J_ref}||_inf > eps on the level-J_ref dyadic grid
    /// (L^{J_ref} stands in for the limit; the residual budget is recorded).
    LevyOverlap { eps: f64, j_ref: u32 },
    /// Same statistic against the close-to-optimal rate delta_J(theta).
    LevyOverlapRate { theta: f64, j_ref: u32 },
    /// ||L^j - L^{j-1}||_inf > eps_j(alpha), evaluated exactly via the
    /// disjoint tooth supports.
    LevyStep { alpha: f64 },
    /// sup_{|s-r| <= 1/n} |W_s - W_r| >= 2 eps on the 4n+1 uniform grid.
    Doob { level: Level },
    /// Max dyadic increment at level n exceeds 2^{-gamma n}.
    KcDyadic { gamma: f64, process: KcProcess, levels: u32 },
    /// Sheet lattice statistic 2^{n gamma} Delta_n >= 2^{-delta n}.
    TotokiSheet { gamma: f64, delta: f64, levels: u32 },
    /// Normalized max increment on the ceil(e^n) grid <= sqrt(1 - theta).
    ModulusLower { theta: f64 },
    /// Normalized increment over window pairs >= 1 + eps.
    ModulusUpper { theta: f64, eps: f64 },
    /// Four consecutive level-n increments all <= 4 b^n 2^{-n}.
    Pwz { b: f64 },
    /// All n increments of the uniform n-grid nonnegative.
    Monotone,
    /// |sum of squared dyadic increments - t| > level.
    QvDyadic { t: f64, level: QvLevel, levels: u32 },
    /// Bracket sup of W_s / sqrt(2 s ln ln(1/s)) > (1 + delta/2) sqrt(theta).
    Khinchin { theta: f64, delta: f64, m_ref: u32 },
    /// Running sup of |W| over [0, q^n] below the Chung threshold.
    Chung { q: f64, eps: f64, grid_pow: u32 },
    /// Nested events sup_{t < b_n} W_t / h(t) >= 1 for h(t) = t^exponent,
    /// b_n = beta^{-n}.
    KolmogorovTest { exponent: f64, beta: f64, m_ref: u32 },
    /// Distance of the rescaled path to the energy ball K(1/2 + eta)
    /// exceeds the level.
    Strassen { eta: f64, q: f64, level: Level, grid_pow: u32 },
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: EventKind,
    pub n_min: u64,
    pub n_max: u64,
    pub samples: u64,
    pub seed: u64,
    pub k_max: u64,
}

/// Work cap for the pairwise modulus statistics.
const MODULUS_WORK_LIMIT: u64 = 1 << 27;
/// Point cap for per-kind union grids.
const GRID_POINT_LIMIT: u64 = 1 << 21;

// ---------------------------------------------------------------------------
// Plans: grids and per-n index structure computed once per run.
// ---------------------------------------------------------------------------

struct GridPlan {
    grid: Vec<f64>,
    /// Per n: indices into `grid` of that schedule's own points, ascending.
    per_n: Vec<Vec<usize>>,
}

enum Plan {
    LevyOverlap {
        thresholds: Vec<f64>,
        j_ref: u32,
        n_min: u64,
    },
    LevyStep {
        thresholds: Vec<f64>,
        n_min: u64,
    },
    Grid(GridPlan, GridEval),
    KcDyadic {
        gamma: f64,
        process: KcProcess,
        levels: u32,
        n_min: u64,
        n_max: u64,
    },
    Sheet {
        gamma: f64,
        delta: f64,
        levels: u32,
        n_min: u64,
        n_max: u64,
    },
    QvDyadic {
        t: f64,
        thresholds: Vec<f64>,
        levels: u32,
        n_min: u64,
    },
    Strassen {
        eta: f64,
        thresholds: Vec<f64>,
        grid: Vec<f64>,
        per_n: Vec<Vec<usize>>,
    },
}

/// What to compute from the sampled path on a shared grid.
enum GridEval {
    Monotone,
    Doob { thresholds: Vec<f64> },
    ModulusLower { theta: f64, scales: Vec<f64> },
    ModulusUpper { eps: f64, scales: Vec<f64>, windows: Vec<u64> },
    Pwz { thresholds: Vec<f64> },
    Khinchin { threshold: f64 },
    Chung { thresholds: Vec<f64>, cutoffs: Vec<usize> },
    KolmogorovTest { exponent: f64, cutoffs: Vec<usize> },
}

fn union_grid(parts: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut grid: Vec<f64> = parts.into_iter().collect();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();
    grid
}

fn find_index(grid: &[f64], t: f64) -> usize {
    grid.partition_point(|x| *x < t)
}

fn build_plan(cfg: &ExperimentConfig) -> Result<(Plan, Vec<String>), ExperimentError> {
    let (n_min, n_max) = (cfg.n_min, cfg.n_max);
    if n_max < n_min {
        return Err(ExperimentError::Domain(format!(
            "n_max = {n_max} below n_min = {n_min}"
        )));
    }
    let count = (n_max - n_min + 1) as usize;
    let mut notes = Vec::new();
    let plan = match &cfg.kind {
        EventKind::LevyOverlap { eps, j_ref } => {
            if !(*eps > 0.0) {
                return Err(ExperimentError::Domain("eps must be positive".into()));
            }
            check_levy_ref(*j_ref, n_max, &mut notes)?;
            Plan::LevyOverlap {
                thresholds: vec![*eps; count],
                j_ref: *j_ref,
                n_min,
            }
        }
        EventKind::LevyOverlapRate { theta, j_ref } => {
            check_levy_ref(*j_ref, n_max, &mut notes)?;
            let sched = bounds::levy_rate_schedule(*theta)?;
            Plan::LevyOverlap {
                thresholds: schedule_values(&sched, n_min, n_max),
                j_ref: *j_ref,
                n_min,
            }
        }
        EventKind::LevyStep { alpha } => {
            if n_min < 1 {
                return Err(ExperimentError::Domain("step events need n_min >= 1".into()));
            }
            let sched = bounds::levy_step_schedule(*alpha)?;
            Plan::LevyStep {
                thresholds: schedule_values(&sched, n_min, n_max),
                n_min,
            }
        }
        EventKind::Doob { level } => {
            if n_min < 1 {
                return Err(ExperimentError::Domain("uniform grids need n_min >= 1".into()));
            }
            let mut pts = vec![];
            for n in n_min..=n_max {
                let m = 4 * n;
                for i in 0..=m {
                    pts.push(i as f64 / m as f64);
                }
            }
            let grid = union_grid(pts);
            let per_n = (n_min..=n_max)
                .map(|n| {
                    let m = 4 * n;
                    (0..=m)
                        .map(|i| find_index(&grid, i as f64 / m as f64))
                        .collect()
                })
                .collect();
            let thresholds = match level {
                Level::Fixed(eps) => {
                    if !(*eps > 0.0) {
                        return Err(ExperimentError::Domain("eps must be positive".into()));
                    }
                    vec![2.0 * eps; count]
                }
                Level::Schedule(theta) => {
                    let sched = bounds::doob_schedule(*theta)?;
                    schedule_values(&sched, n_min, n_max)
                        .into_iter()
                        .map(|e| 2.0 * e)
                        .collect()
                }
            };
            notes.push(
                "sup over rationals with |s-r| <= 1/n approximated on the 4n+1 uniform grid; \
                 the grid statistic understates the sup, so events may underfire"
                    .into(),
            );
            Plan::Grid(GridPlan { grid, per_n }, GridEval::Doob { thresholds })
        }
        EventKind::KcDyadic { gamma, process, levels } => {
            if !(*gamma > 0.0) {
                return Err(ExperimentError::Domain("gamma must be positive".into()));
            }
            if n_max > *levels as u64 || *levels > 24 {
                return Err(ExperimentError::Domain(format!(
                    "need n_max <= levels <= 24, got n_max = {n_max}, levels = {levels}"
                )));
            }
            if let KcProcess::Fbm { hurst } = process {
                if !(*hurst > 0.0 && *hurst < 1.0) {
                    return Err(ExperimentError::Domain("Hurst index outside (0,1)".into()));
                }
                if (1usize << levels) + 1 > paths::MAX_FBM_POINTS {
                    return Err(ExperimentError::Resource(format!(
                        "2^{levels}+1 points exceed the covariance factorization limit"
                    )));
                }
            }
            Plan::KcDyadic {
                gamma: *gamma,
                process: *process,
                levels: *levels,
                n_min,
                n_max,
            }
        }
        EventKind::TotokiSheet { gamma, delta, levels } => {
            if !(*gamma > 0.0 && *delta > 0.0) {
                return Err(ExperimentError::Domain("gamma, delta must be positive".into()));
            }
            if n_max > *levels as u64 {
                return Err(ExperimentError::Domain(format!(
                    "n_max = {n_max} exceeds the sampled lattice depth {levels}"
                )));
            }
            let side = (1u64 << levels) + 1;
            if side * side > paths::MAX_SHEET_CELLS as u64 {
                return Err(ExperimentError::Resource(format!(
                    "lattice {side}x{side} exceeds the sheet limit"
                )));
            }
            Plan::Sheet {
                gamma: *gamma,
                delta: *delta,
                levels: *levels,
                n_min,
                n_max,
            }
        }
        EventKind::ModulusLower { theta } => {
            if !(*theta > 0.0 && *theta < 1.0) {
                return Err(ExperimentError::Domain("theta must lie in (0,1)".into()));
            }
            let plan = exp_grid_plan(n_min, n_max)?;
            let scales = (n_min..=n_max).map(|n| (-(n as f64)).exp()).collect();
            Plan::Grid(plan, GridEval::ModulusLower { theta: *theta, scales })
        }
        EventKind::ModulusUpper { theta, eps } => {
            if !(*theta > 0.0 && *theta < 1.0) {
                return Err(ExperimentError::Domain("theta must lie in (0,1)".into()));
            }
            if !(*eps > 0.0) {
                return Err(ExperimentError::Domain("eps must be positive".into()));
            }
            let n_floor = (1.0 / (1.0 - theta)).ceil() as u64;
            if n_min < n_floor {
                return Err(ExperimentError::Domain(format!(
                    "modulus upper events need n_min >= ceil(1/(1-theta)) = {n_floor}"
                )));
            }
            let plan = exp_grid_plan(n_min, n_max)?;
            let windows: Vec<u64> = (n_min..=n_max)
                .map(|n| ((n as f64) * theta).exp().ceil() as u64)
                .collect();
            let mut work = 0u64;
            for (idx, n) in (n_min..=n_max).enumerate() {
                work += ((n as f64).exp().ceil() as u64).saturating_mul(windows[idx]);
            }
            if work > MODULUS_WORK_LIMIT {
                return Err(ExperimentError::Resource(format!(
                    "pairwise modulus scan needs ~{work} pair evaluations (cap {MODULUS_WORK_LIMIT})"
                )));
            }
            let scales = (n_min..=n_max).map(|n| (-(n as f64)).exp()).collect();
            Plan::Grid(plan, GridEval::ModulusUpper { eps: *eps, scales, windows })
        }
        EventKind::Pwz { b } => {
            if !(*b > 1.0 && *b < 2.0f64.powf(0.25)) {
                return Err(ExperimentError::Domain("b must lie in (1, 2^(1/4))".into()));
            }
            if n_min < 1 || n_max > 24 {
                return Err(ExperimentError::Resource(
                    "dyadic depth must satisfy 1 <= n <= 24".into(),
                ));
            }
            let levels = n_max as u32;
            let grid: Vec<f64> = crate::path::dyadic_grid(levels);
            let per_n = (n_min..=n_max)
                .map(|n| {
                    let stride = 1usize << (levels as u64 - n);
                    (0..=(1usize << n)).map(|k| k * stride).collect()
                })
                .collect();
            let thresholds = (n_min..=n_max)
                .map(|n| 4.0 * b.powi(n as i32) * 2.0f64.powi(-(n as i32)))
                .collect();
            notes.push(
                "existential slow-point events are approximated by the four-consecutive-\
                 increment criterion on the level-n dyadic grid"
                    .into(),
            );
            Plan::Grid(GridPlan { grid, per_n }, GridEval::Pwz { thresholds })
        }
        EventKind::Monotone => {
            if n_min < 1 {
                return Err(ExperimentError::Domain("monotone events need n_min >= 1".into()));
            }
            if n_max > 2000 {
                return Err(ExperimentError::Resource("n_max capped at 2000".into()));
            }
            let mut pts = vec![];
            for n in n_min..=n_max {
                for i in 0..=n {
                    pts.push(i as f64 / n as f64);
                }
            }
            let grid = union_grid(pts);
            let per_n = (n_min..=n_max)
                .map(|n| {
                    (0..=n)
                        .map(|i| find_index(&grid, i as f64 / n as f64))
                        .collect()
                })
                .collect();
            Plan::Grid(GridPlan { grid, per_n }, GridEval::Monotone)
        }
        EventKind::QvDyadic { t, level, levels } => {
            if !(*t > 0.0) {
                return Err(ExperimentError::Domain("t must be positive".into()));
            }
            if n_max > *levels as u64 || *levels > 24 {
                return Err(ExperimentError::Domain(format!(
                    "need n_max <= levels <= 24, got n_max = {n_max}, levels = {levels}"
                )));
            }
            let thresholds: Vec<f64> = match level {
                QvLevel::Fixed(eps) => {
                    if !(*eps > 0.0) {
                        return Err(ExperimentError::Domain("eps must be positive".into()));
                    }
                    vec![*eps; count]
                }
                QvLevel::Schedule { theta } => {
                    let sched = bounds::qv_schedule_dyadic(*t, *theta)?;
                    schedule_values(&sched, n_min, n_max)
                }
                QvLevel::Gumbel { theta, lambda } => {
                    let sched = bounds::qv_gumbel_schedule(*t, *theta, *lambda)?;
                    schedule_values(&sched, n_min, n_max)
                }
            };
            Plan::QvDyadic {
                t: *t,
                thresholds,
                levels: *levels,
                n_min,
            }
        }
        EventKind::Khinchin { theta, delta, m_ref } => {
            if !(*theta > 0.0 && *theta < 1.0) {
                return Err(ExperimentError::Domain("theta must lie in (0,1)".into()));
            }
            if !(*delta > 0.0) {
                return Err(ExperimentError::Domain("delta must be positive".into()));
            }
            if *m_ref == 0 {
                return Err(ExperimentError::Domain("m_ref must be >= 1".into()));
            }
            if theta.powi(n_min as i32) >= (-1.0f64).exp() {
                return Err(ExperimentError::Domain(format!(
                    "ln ln(1/s) needs s < 1/e: bracket top theta^{n_min} is too large"
                )));
            }
            if *m_ref as u64 * count as u64 > GRID_POINT_LIMIT {
                return Err(ExperimentError::Resource("bracket grid too large".into()));
            }
            let mut pts = vec![0.0];
            for n in n_min..=n_max {
                pts.extend(khinchin_bracket(*theta, n, *m_ref));
            }
            let grid = union_grid(pts);
            let per_n = (n_min..=n_max)
                .map(|n| {
                    khinchin_bracket(*theta, n, *m_ref)
                        .into_iter()
                        .map(|t| find_index(&grid, t))
                        .collect()
                })
                .collect();
            notes.push(
                "bracket sup evaluated on m_ref grid points; the statistic is a lower bound \
                 for the true sup, so events may underfire"
                    .into(),
            );
            let threshold = (1.0 + delta / 2.0) * theta.sqrt();
            Plan::Grid(GridPlan { grid, per_n }, GridEval::Khinchin { threshold })
        }
        EventKind::Chung { q, eps, grid_pow } => {
            if !(*q > 1.0) {
                return Err(ExperimentError::Domain("q must exceed 1".into()));
            }
            if !(*eps > 0.0 && *eps < 1.0) {
                return Err(ExperimentError::Domain("eps must lie in (0,1)".into()));
            }
            if n_min as f64 * q.ln() <= 1.0 {
                return Err(ExperimentError::Domain(format!(
                    "need ln ln(q^n) > 0: n_min must exceed 1/ln(q) = {}",
                    1.0 / q.ln()
                )));
            }
            let g = 1u64 << grid_pow;
            if g * count as u64 > GRID_POINT_LIMIT {
                return Err(ExperimentError::Resource("running-sup grid too large".into()));
            }
            let mut pts = vec![0.0];
            for n in n_min..=n_max {
                let horizon = q.powi(n as i32);
                for i in 1..=g {
                    pts.push(horizon * i as f64 / g as f64);
                }
            }
            let grid = union_grid(pts);
            let cutoffs = (n_min..=n_max)
                .map(|n| grid.partition_point(|x| *x <= q.powi(n as i32) * (1.0 + 1e-12)))
                .collect();
            let pi = std::f64::consts::PI;
            let thresholds = (n_min..=n_max)
                .map(|n| {
                    let hn = q.powi(n as i32);
                    (1.0 - eps) * pi / 8.0f64.sqrt() * (hn / hn.ln().ln()).sqrt()
                })
                .collect();
            notes.push(
                "running sup on a finite grid understates the true sup, so these below-\
                 threshold events may overfire; refine grid_pow to tighten"
                    .into(),
            );
            Plan::Grid(
                GridPlan { grid, per_n: vec![] },
                GridEval::Chung { thresholds, cutoffs },
            )
        }
        EventKind::KolmogorovTest { exponent, beta, m_ref } => {
            if !(*exponent > 0.0) {
                return Err(ExperimentError::Domain("exponent must be positive".into()));
            }
            if !(*beta > 1.0) {
                return Err(ExperimentError::Domain("beta must exceed 1".into()));
            }
            if *m_ref == 0 {
                return Err(ExperimentError::Domain("m_ref must be >= 1".into()));
            }
            // Populate (0, b_n) well below the smallest scale of interest.
            let depth = n_max + 8;
            if *m_ref as u64 * (depth - n_min + 1) > GRID_POINT_LIMIT {
                return Err(ExperimentError::Resource("benchmark grid too large".into()));
            }
            let mut pts = vec![0.0];
            for n in n_min..=depth {
                let hi = beta.powi(-(n as i32));
                let lo = hi / beta;
                for i in 1..=*m_ref {
                    pts.push(lo + (hi - lo) * i as f64 / *m_ref as f64);
                }
            }
            let grid = union_grid(pts);
            let cutoffs = (n_min..=n_max)
                .map(|n| grid.partition_point(|x| *x < beta.powi(-(n as i32))))
                .collect();
            notes.push(
                "sup over (0, b_n) evaluated on a geometric grid; the statistic is a lower \
                 bound for the true sup, so events may underfire"
                    .into(),
            );
            Plan::Grid(
                GridPlan { grid, per_n: vec![] },
                GridEval::KolmogorovTest { exponent: *exponent, cutoffs },
            )
        }
        EventKind::Strassen { eta, q, level, grid_pow } => {
            if !(*eta > 0.0) {
                return Err(ExperimentError::Domain("eta must be positive".into()));
            }
            if !(*q > 1.0) {
                return Err(ExperimentError::Domain("q must exceed 1".into()));
            }
            if (n_min as f64) * q.ln() <= 1.0 {
                return Err(ExperimentError::Domain(format!(
                    "rescaling needs q^n > e: n_min must exceed 1/ln(q) = {}",
                    1.0 / q.ln()
                )));
            }
            let g = 1u64 << grid_pow;
            if g * count as u64 > GRID_POINT_LIMIT {
                return Err(ExperimentError::Resource("rescaling grid too large".into()));
            }
            let thresholds = match level {
                Level::Fixed(eps) => {
                    if !(*eps > 0.0) {
                        return Err(ExperimentError::Domain("eps must be positive".into()));
                    }
                    vec![*eps; count]
                }
                Level::Schedule(theta) => {
                    if !(*eta > 0.5) {
                        return Err(ExperimentError::Domain(
                            "the distance schedule needs eta > 1/2".into(),
                        ));
                    }
                    let vartheta = (0.5 + eta) / 2.0;
                    let sched = bounds::strassen_schedule(*eta, vartheta, *theta, *q)?;
                    if n_min < sched.n0 {
                        return Err(ExperimentError::Domain(format!(
                            "schedule is defined from n = {}; raise n_min",
                            sched.n0
                        )));
                    }
                    schedule_values(&sched, n_min, n_max)
                }
            };
            let mut pts = vec![0.0];
            for n in n_min..=n_max {
                let horizon = q.powi(n as i32);
                for i in 1..=g {
                    pts.push(horizon * i as f64 / g as f64);
                }
            }
            let grid = union_grid(pts);
            let per_n = (n_min..=n_max)
                .map(|n| {
                    let horizon = q.powi(n as i32);
                    let mut idx = vec![0usize];
                    for i in 1..=g {
                        idx.push(find_index(&grid, horizon * i as f64 / g as f64));
                    }
                    idx
                })
                .collect();
            notes.push(
                "sup-norm distance computed on the discretized rescaled path; both the path \
                 and the candidate energies are grid quantities"
                    .into(),
            );
            Plan::Strassen {
                eta: *eta,
                thresholds,
                grid,
                per_n,
            }
        }
    };
    Ok((plan, notes))
}

fn check_levy_ref(j_ref: u32, n_max: u64, notes: &mut Vec<String>) -> Result<(), ExperimentError> {
    if j_ref as u64 <= n_max {
        return Err(ExperimentError::Domain(format!(
            "reference level j_ref = {j_ref} must exceed n_max = {n_max}"
        )));
    }
    if j_ref > paths::MAX_DYADIC_LEVEL {
        return Err(ExperimentError::Resource(format!(
            "j_ref = {j_ref} exceeds the dyadic limit {}",
            paths::MAX_DYADIC_LEVEL
        )));
    }
    let residual = bounds::constants::c_a()
        * bounds::constants::c_1()
        * ((j_ref as f64) + 1.0).sqrt()
        * 2.0f64.powf(-(j_ref as f64) / 2.0);
    notes.push(format!(
        "L^{j_ref} stands in for the series limit; L2 residual budget \
         C_a c_1 sqrt(J_ref+1) 2^(-J_ref/2) = {residual:.3e}"
    ));
    if (j_ref as u64) < n_max + 8 {
        notes.push(format!(
            "j_ref = {j_ref} is closer than 8 levels to n_max = {n_max}; the proxy residual \
             is not negligible against the tested thresholds"
        ));
    }
    Ok(())
}

fn schedule_values(sched: &RateSchedule, n_min: u64, n_max: u64) -> Vec<f64> {
    (n_min..=n_max).map(|n| sched.eval(n)).collect()
}

fn khinchin_bracket(theta: f64, n: u64, m_ref: u32) -> Vec<f64> {
    let hi = theta.powi(n as i32);
    let lo = theta.powi(n as i32 + 1);
    (1..=m_ref)
        .map(|i| lo + (hi - lo) * i as f64 / m_ref as f64)
        .collect()
}

fn exp_grid_plan(n_min: u64, n_max: u64) -> Result<GridPlan, ExperimentError> {
    if n_min < 1 {
        return Err(ExperimentError::Domain("exponential grids need n_min >= 1".into()));
    }
    let mut total = 0u64;
    for n in n_min..=n_max {
        total += (n as f64).exp().ceil() as u64 + 1;
    }
    if total > GRID_POINT_LIMIT {
        return Err(ExperimentError::Resource(format!(
            "ceil(e^n) grids hold {total} points (cap {GRID_POINT_LIMIT}); lower n_max"
        )));
    }
    let mut pts = vec![];
    for n in n_min..=n_max {
        let scale = (n as f64).exp();
        let g = scale.ceil() as u64;
        for j in 0..=g {
            pts.push(j as f64 / scale);
        }
    }
    let grid = union_grid(pts);
    let per_n = (n_min..=n_max)
        .map(|n| {
            let scale = (n as f64).exp();
            let g = scale.ceil() as u64;
            (0..=g).map(|j| find_index(&grid, j as f64 / scale)).collect()
        })
        .collect();
    Ok(GridPlan { grid, per_n })
}

// ---------------------------------------------------------------------------
// Per-sample evaluation.
// ---------------------------------------------------------------------------

fn evaluate_plan(plan: &Plan, coeffs: &impl Coefficients) -> Result<Vec<bool>, ExperimentError> {
    match plan {
        Plan::LevyOverlap { thresholds, j_ref, n_min } => {
            let fine = paths::levy_dyadic_values(coeffs, *j_ref)?;
            let mut out = Vec::with_capacity(thresholds.len());
            for (i, thr) in thresholds.iter().enumerate() {
                let level = (*n_min + i as u64) as u32;
                out.push(levy_proxy_sup(&fine, coeffs, level, *j_ref) > *thr);
            }
            Ok(out)
        }
        Plan::LevyStep { thresholds, n_min } => Ok(thresholds
            .iter()
            .enumerate()
            .map(|(i, thr)| paths::levy_step_sup(coeffs, (*n_min + i as u64) as u32) > *thr)
            .collect()),
        Plan::Grid(gp, eval) => {
            let path = paths::sample_bm(coeffs, &gp.grid)?;
            let w = path.values();
            let t = path.times();
            Ok(match eval {
                GridEval::Monotone => gp
                    .per_n
                    .iter()
                    .map(|idx| idx.windows(2).all(|p| w[p[1]] >= w[p[0]]))
                    .collect(),
                GridEval::Doob { thresholds } => gp
                    .per_n
                    .iter()
                    .zip(thresholds)
                    .map(|(idx, thr)| {
                        for a in 0..idx.len() {
                            for b in (a + 1)..idx.len().min(a + 5) {
                                if (w[idx[b]] - w[idx[a]]).abs() >= *thr {
                                    return true;
                                }
                            }
                        }
                        false
                    })
                    .collect(),
                GridEval::ModulusLower { theta, scales } => gp
                    .per_n
                    .iter()
                    .zip(scales)
                    .map(|(idx, scale)| {
                        let mut sup: f64 = 0.0;
                        for p in idx.windows(2) {
                            sup = sup.max((w[p[1]] - w[p[0]]).abs());
                        }
                        sup / bounds::modulus_mu(*scale) <= (1.0 - theta).sqrt()
                    })
                    .collect(),
                GridEval::ModulusUpper { eps, scales, windows } => gp
                    .per_n
                    .iter()
                    .zip(scales.iter().zip(windows))
                    .map(|(idx, (scale, window))| {
                        for a in 0..idx.len() {
                            let top = (a + *window as usize).min(idx.len() - 1);
                            for b in (a + 1)..=top {
                                let gap = (b - a) as f64 * scale;
                                if (w[idx[b]] - w[idx[a]]).abs() / bounds::modulus_mu(gap)
                                    >= 1.0 + eps
                                {
                                    return true;
                                }
                            }
                        }
                        false
                    })
                    .collect(),
                GridEval::Pwz { thresholds } => gp
                    .per_n
                    .iter()
                    .zip(thresholds)
                    .map(|(idx, thr)| {
                        if idx.len() < 5 {
                            return false;
                        }
                        let incr: Vec<f64> =
                            idx.windows(2).map(|p| (w[p[1]] - w[p[0]]).abs()).collect();
                        incr.windows(4).any(|q| q.iter().all(|d| *d <= *thr))
                    })
                    .collect(),
                GridEval::Khinchin { threshold } => gp
                    .per_n
                    .iter()
                    .map(|idx| {
                        let mut sup = f64::NEG_INFINITY;
                        for &i in idx {
                            let s = t[i];
                            sup = sup.max(w[i] / (2.0 * s * (1.0 / s).ln().ln()).sqrt());
                        }
                        sup > *threshold
                    })
                    .collect(),
                GridEval::Chung { thresholds, cutoffs } => {
                    let mut running = vec![0.0f64; w.len()];
                    let mut m: f64 = 0.0;
                    for (i, v) in w.iter().enumerate() {
                        m = m.max(v.abs());
                        running[i] = m;
                    }
                    thresholds
                        .iter()
                        .zip(cutoffs)
                        .map(|(thr, cut)| running[cut - 1] < *thr)
                        .collect()
                }
                GridEval::KolmogorovTest { exponent, cutoffs } => {
                    let mut running = vec![f64::NEG_INFINITY; w.len()];
                    let mut m = f64::NEG_INFINITY;
                    for i in 0..w.len() {
                        if t[i] > 0.0 {
                            m = m.max(w[i] / t[i].powf(*exponent));
                        }
                        running[i] = m;
                    }
                    cutoffs
                        .iter()
                        .map(|cut| *cut > 0 && running[cut - 1] >= 1.0)
                        .collect()
                }
            })
        }
        Plan::KcDyadic { gamma, process, levels, n_min, n_max } => {
            let grid = crate::path::dyadic_grid(*levels);
            let path = match process {
                KcProcess::Bm => paths::sample_bm(coeffs, &grid)?,
                KcProcess::Fbm { hurst } => paths::sample_fbm(coeffs, &grid, *hurst)?,
            };
            let w = path.values();
            let cells = grid.len() - 1;
            let mut out = Vec::new();
            for n in *n_min..=*n_max {
                let stride = cells >> n;
                let mut sup: f64 = 0.0;
                let mut i = 0;
                while i + stride <= cells {
                    sup = sup.max((w[i + stride] - w[i]).abs());
                    i += stride;
                }
                out.push(sup > 2.0f64.powf(-gamma * n as f64));
            }
            Ok(out)
        }
        Plan::Sheet { gamma, delta, levels, n_min, n_max } => {
            let side = (1usize << levels) + 1;
            let ax: Vec<f64> = (0..side).map(|i| i as f64 / (side - 1) as f64).collect();
            let sheet = paths::sample_sheet(coeffs, &ax, &ax)?;
            let mut out = Vec::new();
            for n in *n_min..=*n_max {
                let stride = (side - 1) >> n;
                let mut dmax: f64 = 0.0;
                let mut i = 0;
                while i < side {
                    let mut j = 0;
                    while j < side {
                        if i + stride < side {
                            dmax =
                                dmax.max((sheet.value(i + stride, j) - sheet.value(i, j)).abs());
                        }
                        if j + stride < side {
                            dmax =
                                dmax.max((sheet.value(i, j + stride) - sheet.value(i, j)).abs());
                        }
                        j += stride;
                    }
                    i += stride;
                }
                let scaled = 2.0f64.powf(gamma * n as f64) * dmax;
                out.push(scaled >= 2.0f64.powf(-delta * n as f64));
            }
            Ok(out)
        }
        Plan::QvDyadic { t, thresholds, levels, n_min } => {
            let cells = 1usize << levels;
            let grid: Vec<f64> = (0..=cells).map(|i| i as f64 * t / cells as f64).collect();
            let path = paths::sample_bm(coeffs, &grid)?;
            let w = path.values();
            let mut out = Vec::with_capacity(thresholds.len());
            for (i, thr) in thresholds.iter().enumerate() {
                let n = *n_min + i as u64;
                let stride = cells >> n;
                let mut acc = 0.0;
                let mut p = 0;
                while p + stride <= cells {
                    let dv = w[p + stride] - w[p];
                    acc += dv * dv;
                    p += stride;
                }
                out.push((acc - t).abs() > *thr);
            }
            Ok(out)
        }
        Plan::Strassen { eta, thresholds, grid, per_n } => {
            let path = paths::sample_bm(coeffs, grid)?;
            let w = path.values();
            let mut out = Vec::with_capacity(thresholds.len());
            for (i, idx) in per_n.iter().enumerate() {
                let times: Vec<f64> = idx.iter().map(|&j| grid[j]).collect();
                let values: Vec<f64> = idx.iter().map(|&j| w[j]).collect();
                let sub = PathOnGrid::new(times, values, crate::path::GridKind::Explicit)?;
                let z = taut_string::rescale_strassen(&sub)?;
                let d = taut_string::distance_to_ball(&z, 0.5 + eta, 1e-6)?;
                out.push(d > thresholds[i]);
            }
            Ok(out)
        }
    }
}

/// Sup over the level-`j_ref` dyadic grid of |L^level - L^{j_ref}|, given
/// the fine values of L^{j_ref}. On that grid the values of L^level at the
/// coarse points coincide with the fine values there; between them L^level
/// is their linear interpolation plus the first tent of generation `level`.
fn levy_proxy_sup(fine: &[f64], coeffs: &impl Coefficients, level: u32, j_ref: u32) -> f64 {
    let stride = 1usize << (j_ref - level);
    let cells = 1usize << level;
    let tooth = paths::schauder_weight(1u64 << level) * coeffs.z(1u64 << level);
    let mut sup: f64 = 0.0;
    for c in 0..cells {
        let base = fine[c * stride];
        let top = fine[(c + 1) * stride];
        for r in 1..stride {
            let frac = r as f64 / stride as f64;
            let mut expected = base + (top - base) * frac;
            if c == 0 {
                expected += tooth * paths::tent(frac);
            }
            sup = sup.max((fine[c * stride + r] - expected).abs());
        }
    }
    sup
}

// ---------------------------------------------------------------------------
// Public operations.
// ---------------------------------------------------------------------------

/// Indicator sequence of the kind's events over n in [n_min, n_max] for one
/// coefficient stream. Deterministic in the stream.
pub fn generate_events(
    kind: &EventKind,
    coeffs: &impl Coefficients,
    n_min: u64,
    n_max: u64,
) -> Result<Vec<bool>, ExperimentError> {
    let cfg = ExperimentConfig {
        kind: kind.clone(),
        n_min,
        n_max,
        samples: 1,
        seed: 0,
        k_max: 1,
    };
    let (plan, _) = build_plan(&cfg)?;
    evaluate_plan(&plan, coeffs)
}

/// Monte Carlo estimate of the overlap tail P(O >= k), k = 0..=k_max, over
/// `samples` independent coefficient streams derived from (seed, index).
/// The result does not depend on the worker count.
pub fn estimate_overlap_tail(
    cfg: &ExperimentConfig,
    workers: usize,
) -> Result<EmpiricalTail, ExperimentError> {
    if cfg.samples == 0 {
        return Err(ExperimentError::Domain("samples must be >= 1".into()));
    }
    let (plan, mut notes) = build_plan(cfg)?;
    let n_count = (cfg.n_max - cfg.n_min + 1) as usize;
    let run = || -> Result<(Vec<u64>, Vec<u64>), ExperimentError> {
        (0..cfg.samples)
            .into_par_iter()
            .map(|idx| -> Result<(Vec<u64>, Vec<u64>), ExperimentError> {
                let stream = GaussianCoefficients::new(cfg.seed, idx);
                let events = evaluate_plan(&plan, &stream)?;
                let count = events.iter().filter(|e| **e).count();
                let mut hist = vec![0u64; n_count + 1];
                hist[count] = 1;
                let fires = events.iter().map(|e| u64::from(*e)).collect();
                Ok((hist, fires))
            })
            .try_reduce(
                || (vec![0u64; n_count + 1], vec![0u64; n_count]),
                |mut a, b| {
                    for (x, y) in a.0.iter_mut().zip(&b.0) {
                        *x += y;
                    }
                    for (x, y) in a.1.iter_mut().zip(&b.1) {
                        *x += y;
                    }
                    Ok(a)
                },
            )
    };
    let (hist, fires) = if workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| ExperimentError::Resource(e.to_string()))?
            .install(run)?
    } else {
        run()?
    };
    // Tail counts from the histogram of per-sample overlap counts.
    let k_top = cfg.k_max.min(n_count as u64) as usize;
    let mut counts_ge = vec![0u64; k_top + 1];
    let mut acc = 0u64;
    let mut k = n_count;
    loop {
        acc += hist[k];
        if k <= k_top {
            counts_ge[k] = acc;
        }
        if k == 0 {
            break;
        }
        k -= 1;
    }
    notes.push(format!(
        "counts truncated at n_max = {}; they are lower bounds for the untruncated overlap count",
        cfg.n_max
    ));
    let tail = EmpiricalTail {
        samples: cfg.samples,
        counts_ge,
        event_fires: fires,
        n_min: cfg.n_min,
        n_max: cfg.n_max,
        notes,
    };
    tail.validate()
        .map_err(|e| ExperimentError::Domain(e.to_string()))?;
    Ok(tail)
}

/// Sum of squared increments of the path over the given partition times,
/// which must all lie on the path grid.
pub fn qv_partial_sum(path: &PathOnGrid, partition: &[f64]) -> Result<f64, ExperimentError> {
    if partition.len() < 2 {
        return Err(ExperimentError::Domain(
            "partition needs at least two points".into(),
        ));
    }
    let times = path.times();
    let values = path.values();
    let mut prev: Option<f64> = None;
    let mut acc = 0.0;
    for &t in partition {
        let i = times.partition_point(|x| *x < t);
        if i >= times.len() || times[i] != t {
            return Err(ExperimentError::PartitionNotInGrid(t));
        }
        if let Some(p) = prev {
            let dv = values[i] - p;
            acc += dv * dv;
        }
        prev = Some(values[i]);
    }
    Ok(acc)
}

/// Bracket statistic max over grid points s in (theta^{n+1}, theta^n] of
/// W_s / sqrt(2 s ln ln(1/s)); a lower bound for the continuum sup.
pub fn khinchin_sup_statistic(
    path: &PathOnGrid,
    theta: f64,
    n: u64,
) -> Result<f64, ExperimentError> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(ExperimentError::Domain("theta must lie in (0,1)".into()));
    }
    let hi = theta.powi(n as i32);
    let lo = theta.powi(n as i32 + 1);
    if hi >= (-1.0f64).exp() {
        return Err(ExperimentError::Domain(format!(
            "bracket top theta^{n} = {hi} must be below 1/e"
        )));
    }
    let mut sup = f64::NEG_INFINITY;
    let mut seen = false;
    for (i, &s) in path.times().iter().enumerate() {
        if s > lo && s <= hi {
            seen = true;
            sup = sup.max(path.values()[i] / (2.0 * s * (1.0 / s).ln().ln()).sqrt());
        }
    }
    if !seen {
        return Err(ExperimentError::EmptyBracket(n));
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::GridKind;
    use crate::rng::FixedCoefficients;

    fn fixed(vals: &[f64]) -> FixedCoefficients {
        FixedCoefficients(vals.to_vec())
    }

    #[test]
    fn monotone_event_small_grid() {
        let up = fixed(&[1.0; 64]);
        let ev = generate_events(&EventKind::Monotone, &up, 1, 3).unwrap();
        assert_eq!(ev, vec![true, true, true]);
        let down = fixed(&[-1.0; 64]);
        let ev = generate_events(&EventKind::Monotone, &down, 1, 3).unwrap();
        assert_eq!(ev, vec![false, false, false]);
    }

    #[test]
    fn levy_step_events_match_op() {
        let z = crate::rng::GaussianCoefficients::new(5, 0);
        let sched = bounds::levy_step_schedule(1.0).unwrap();
        let ev = generate_events(&EventKind::LevyStep { alpha: 1.0 }, &z, 1, 8).unwrap();
        for (i, e) in ev.iter().enumerate() {
            let j = (i + 1) as u32;
            assert_eq!(*e, paths::levy_step_sup(&z, j) > sched.eval(j as u64));
        }
    }

    #[test]
    fn zero_coefficients_fire_nothing() {
        let zero = fixed(&[]);
        for kind in [
            EventKind::LevyOverlap { eps: 0.5, j_ref: 8 },
            EventKind::LevyStep { alpha: 1.0 },
            // The zero path has quadratic variation 0, deviation |0 - t| = 1.
            EventKind::QvDyadic { t: 1.0, level: QvLevel::Fixed(2.0), levels: 6 },
        ] {
            let ev = generate_events(&kind, &zero, 1, 4).unwrap();
            assert!(ev.iter().all(|e| !e), "{kind:?}");
        }
        // The zero path never crosses the positive benchmark...
        let ev = generate_events(
            &EventKind::KolmogorovTest { exponent: 0.75, beta: 4.0, m_ref: 16 },
            &zero,
            1,
            4,
        )
        .unwrap();
        assert!(ev.iter().all(|e| !e));
        // ...but stays below the running-sup threshold everywhere.
        let ev =
            generate_events(&EventKind::Chung { q: 4.0, eps: 0.5, grid_pow: 6 }, &zero, 1, 4)
                .unwrap();
        assert!(ev.iter().all(|e| *e));
    }

    #[test]
    fn qv_partial_sum_basics() {
        let times = vec![0.0, 0.25, 0.5, 0.75, 1.0];
        let flat = PathOnGrid::new(times.clone(), vec![1.0; 5], GridKind::Explicit).unwrap();
        assert_eq!(qv_partial_sum(&flat, &[0.0, 0.5, 1.0]).unwrap(), 0.0);
        let path =
            PathOnGrid::new(times, vec![0.0, 0.5, 1.0, 0.5, 2.0], GridKind::Explicit).unwrap();
        // Single interval: W_1^2.
        assert_eq!(qv_partial_sum(&path, &[0.0, 1.0]).unwrap(), 4.0);
        assert!(matches!(
            qv_partial_sum(&path, &[0.0, 0.3, 1.0]),
            Err(ExperimentError::PartitionNotInGrid(_))
        ));
    }

    #[test]
    fn khinchin_statistic_basics() {
        let theta = 0.25f64;
        let s0 = theta.powi(2);
        let path = PathOnGrid::new(
            vec![0.0, theta.powi(3), s0],
            vec![0.0, 0.1, 0.3],
            GridKind::Explicit,
        )
        .unwrap();
        let stat = khinchin_sup_statistic(&path, theta, 2).unwrap();
        let expect = 0.3 / (2.0 * s0 * (1.0 / s0).ln().ln()).sqrt();
        assert!((stat - expect).abs() < 1e-15);
        assert!(matches!(
            khinchin_sup_statistic(&path, theta, 5),
            Err(ExperimentError::EmptyBracket(5))
        ));
        assert!(khinchin_sup_statistic(&path, 0.9, 1).is_err());
    }

    #[test]
    fn tail_estimation_shape_and_determinism() {
        let cfg = ExperimentConfig {
            kind: EventKind::Monotone,
            n_min: 1,
            n_max: 12,
            samples: 400,
            seed: 9,
            k_max: 6,
        };
        let a = estimate_overlap_tail(&cfg, 1).unwrap();
        let b = estimate_overlap_tail(&cfg, 4).unwrap();
        assert_eq!(a.counts_ge, b.counts_ge);
        assert_eq!(a.event_fires, b.event_fires);
        assert_eq!(a.counts_ge[0], 400);
        for w in a.counts_ge.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn config_guards() {
        let bad = ExperimentConfig {
            kind: EventKind::LevyOverlap { eps: 0.5, j_ref: 6 },
            n_min: 0,
            n_max: 8, // j_ref must exceed n_max
            samples: 1,
            seed: 0,
            k_max: 4,
        };
        assert!(matches!(
            estimate_overlap_tail(&bad, 1),
            Err(ExperimentError::Domain(_))
        ));
        let bad = ExperimentConfig {
            kind: EventKind::Chung { q: 4.0, eps: 0.5, grid_pow: 18 },
            n_min: 1,
            n_max: 40,
            samples: 1,
            seed: 0,
            k_max: 4,
        };
        assert!(matches!(
            estimate_overlap_tail(&bad, 1),
            Err(ExperimentError::Resource(_))
        ));
    }

    #[test]
    fn modulus_needs_floor() {
        let err = generate_events(
            &EventKind::ModulusUpper { theta: 0.5, eps: 3.0 },
            &fixed(&[]),
            1,
            3,
        )
        .unwrap_err();
        assert!(err.to_string().contains("ceil(1/(1-theta))"));
    }
}
