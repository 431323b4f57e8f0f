//! Sup-norm projection onto the energy ball: the minimal-energy path
//! through an eps-tube around a sampled path (taut string), and the
//! distance from a rescaled path to the energy ball by bisection over the
//! tube radius.

use thiserror::Error;

use crate::numeric::golden_min;
use crate::path::{GridKind, PathOnGrid};

#[derive(Debug, Error, PartialEq)]
pub enum TautError {
    #[error("anchor infeasible: |w(0)| = {0} exceeds the tube radius")]
    InfeasibleAnchor(f64),
    #[error("tube radius must be >= 0, got {0}")]
    NegativeRadius(f64),
    #[error("path must start at t = 0 with w(0) = 0")]
    BadStart,
    #[error("rescaling requires a final time s > e, got {0}")]
    ScaleTooSmall(f64),
    #[error("energy budget must be positive, got {0}")]
    BadBudget(f64),
}

/// The set of absolutely continuous w with w(0) = 0 and
/// (1/2) int |w'|^2 <= r, discretized as piecewise-linear paths on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBall {
    pub r: f64,
}

impl EnergyBall {
    pub fn new(r: f64) -> Result<Self, TautError> {
        if !(r > 0.0) {
            return Err(TautError::BadBudget(r));
        }
        Ok(Self { r })
    }

    /// Membership with an explicit slack on the energy comparison.
    pub fn contains(&self, path: &PathOnGrid, slack: f64) -> bool {
        path.values()[0] == 0.0 && discrete_energy(path) <= self.r + slack
    }
}

/// Discrete energy (1/2) sum (dv)^2 / dt of a piecewise-linear path.
pub fn discrete_energy(path: &PathOnGrid) -> f64 {
    let t = path.times();
    let v = path.values();
    let mut acc = 0.0;
    for i in 1..t.len() {
        let dv = v[i] - v[i - 1];
        acc += dv * dv / (t[i] - t[i - 1]);
    }
    0.5 * acc
}

/// Fixed-endpoint taut string through interval constraints: the unique
/// piecewise-linear path from (t_0, v0) to (t_n, y) with lo_i <= v_i <= hi_i
/// that minimizes every convex functional of the slope, found by the funnel
/// sweep with restarts at forced contact points.
fn taut_fixed(times: &[f64], lo: &[f64], hi: &[f64], v0: f64, y: f64) -> Vec<f64> {
    let n = times.len() - 1;
    let mut vals = vec![0.0; n + 1];
    vals[0] = v0;
    let mut anchor = 0usize;
    let mut av = v0;
    'outer: while anchor < n {
        let mut lo_s = f64::NEG_INFINITY;
        let mut hi_s = f64::INFINITY;
        let mut lo_i = anchor;
        let mut hi_i = anchor;
        let mut i = anchor + 1;
        loop {
            let dt = times[i] - times[anchor];
            let (l, h) = if i == n { (y, y) } else { (lo[i], hi[i]) };
            let su = (h - av) / dt;
            let sl = (l - av) / dt;
            if su < lo_s {
                // Must bend upward at the lower-boundary contact.
                let bend_v = lo[lo_i];
                emit(times, &mut vals, anchor, lo_i, av, bend_v);
                anchor = lo_i;
                av = bend_v;
                continue 'outer;
            }
            if sl > hi_s {
                // Must bend downward at the upper-boundary contact.
                let bend_v = hi[hi_i];
                emit(times, &mut vals, anchor, hi_i, av, bend_v);
                anchor = hi_i;
                av = bend_v;
                continue 'outer;
            }
            if sl > lo_s {
                lo_s = sl;
                lo_i = i;
            }
            if su < hi_s {
                hi_s = su;
                hi_i = i;
            }
            if i == n {
                emit(times, &mut vals, anchor, n, av, y);
                break 'outer;
            }
            i += 1;
        }
    }
    vals
}

fn emit(times: &[f64], vals: &mut [f64], from: usize, to: usize, v_from: f64, v_to: f64) {
    let slope = (v_to - v_from) / (times[to] - times[from]);
    for m in (from + 1)..to {
        vals[m] = v_from + slope * (times[m] - times[from]);
    }
    vals[to] = v_to;
}

fn energy_of(times: &[f64], vals: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 1..times.len() {
        let dv = vals[i] - vals[i - 1];
        acc += dv * dv / (times[i] - times[i - 1]);
    }
    0.5 * acc
}

fn tube_bounds(w: &PathOnGrid, eps: f64) -> (Vec<f64>, Vec<f64>) {
    let lo = w.values().iter().map(|v| v - eps).collect();
    let hi = w.values().iter().map(|v| v + eps).collect();
    (lo, hi)
}

/// Taut string through the tube [w - eps, w + eps] anchored at v(0) = 0 with
/// the right endpoint free inside the tube.
pub fn taut_string_in_tube(w: &PathOnGrid, eps: f64) -> Result<PathOnGrid, TautError> {
    if eps < 0.0 {
        return Err(TautError::NegativeRadius(eps));
    }
    if w.values()[0].abs() > eps {
        return Err(TautError::InfeasibleAnchor(w.values()[0].abs()));
    }
    let times = w.times();
    let n = times.len() - 1;
    let (lo, hi) = tube_bounds(w, eps);
    let vals = if n == 0 {
        vec![0.0]
    } else {
        // The end value minimizing the energy; E(y) is convex.
        let obj = |y: f64| energy_of(times, &taut_fixed(times, &lo, &hi, 0.0, y));
        let (y_best, _) = golden_min(obj, lo[n], hi[n], 90);
        taut_fixed(times, &lo, &hi, 0.0, y_best)
    };
    Ok(PathOnGrid::new(times.to_vec(), vals, GridKind::Explicit).expect("valid grid"))
}

/// Minimal discrete energy over piecewise-linear paths through the tube
/// [w - eps, w + eps] with v(0) = 0 and free right endpoint.
pub fn min_energy_in_tube(w: &PathOnGrid, eps: f64) -> Result<f64, TautError> {
    let v = taut_string_in_tube(w, eps)?;
    Ok(discrete_energy(&v))
}

/// Certificate data for a distance computation: the returned radius is
/// feasible and shrinking it by the tolerance makes the problem infeasible.
#[derive(Debug, Clone, Copy)]
pub struct DistanceCertificate {
    pub distance: f64,
    pub energy_at_distance: f64,
    pub energy_below: Option<f64>,
}

/// Smallest eps (to absolute tolerance `tol`) such that the tube of radius
/// eps around w contains a path of energy <= r; equals the sup-norm distance
/// from w to the energy ball on the grid. Returns 0 when w itself fits.
pub fn distance_to_ball(w: &PathOnGrid, r: f64, tol: f64) -> Result<f64, TautError> {
    Ok(distance_to_ball_certified(w, r, tol)?.distance)
}

/// Energy comparisons carry this slack, mirroring the bisection tolerance.
pub const ENERGY_SLACK: f64 = 1e-9;

pub fn distance_to_ball_certified(
    w: &PathOnGrid,
    r: f64,
    tol: f64,
) -> Result<DistanceCertificate, TautError> {
    if !(r > 0.0) {
        return Err(TautError::BadBudget(r));
    }
    if w.times()[0] != 0.0 || w.values()[0] != 0.0 {
        return Err(TautError::BadStart);
    }
    let tol = if tol > 0.0 { tol } else { 1e-6 };
    if discrete_energy(w) <= r + ENERGY_SLACK {
        return Ok(DistanceCertificate {
            distance: 0.0,
            energy_at_distance: discrete_energy(w),
            energy_below: None,
        });
    }
    let mut lo = 0.0f64;
    // The zero path fits inside the sup-norm tube.
    let mut hi = w.sup_norm();
    let mut e_hi = min_energy_in_tube(w, hi)?;
    let mut e_lo = f64::INFINITY;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let e = min_energy_in_tube(w, mid)?;
        if e <= r + ENERGY_SLACK {
            hi = mid;
            e_hi = e;
        } else {
            lo = mid;
            e_lo = e;
        }
    }
    Ok(DistanceCertificate {
        distance: hi,
        energy_at_distance: e_hi,
        energy_below: e_lo.is_finite().then_some(e_lo),
    })
}

/// Rescales a path on [0, s] (s > e) to Z(t) = W(s t) / sqrt(2 s ln ln s)
/// on the unit interval image grid.
pub fn rescale_strassen(path: &PathOnGrid) -> Result<PathOnGrid, TautError> {
    let s = *path.times().last().expect("nonempty");
    if !(s > std::f64::consts::E) {
        return Err(TautError::ScaleTooSmall(s));
    }
    if path.times()[0] != 0.0 {
        return Err(TautError::BadStart);
    }
    let norm = (2.0 * s * s.ln().ln()).sqrt();
    let times = path.times().iter().map(|t| t / s).collect();
    let values = path.values().iter().map(|v| v / norm).collect();
    Ok(PathOnGrid::new(times, values, GridKind::Explicit).expect("valid grid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::min_energy_qp;
    use crate::path::uniform_grid;
    use crate::paths::sample_bm;
    use crate::rng::GaussianCoefficients;
    use proptest::prelude::*;

    fn line_path(n: usize, a: f64) -> PathOnGrid {
        let times = uniform_grid(n, 1.0);
        let values = times.iter().map(|t| a * t).collect();
        PathOnGrid::new(times, values, GridKind::Explicit).unwrap()
    }

    #[test]
    fn straight_string_energy() {
        // w linear from 0 to a: energy a^2/2 at eps = 0, smaller for eps > 0.
        let w = line_path(32, 2.0);
        let e0 = min_energy_in_tube(&w, 0.0).unwrap();
        assert!((e0 - 2.0).abs() < 1e-9);
        let e1 = min_energy_in_tube(&w, 0.25).unwrap();
        assert!(e1 <= e0);
        // Wide tube containing zero: energy 0.
        let e = min_energy_in_tube(&w, 2.5).unwrap();
        assert!(e < 1e-12);
    }

    #[test]
    fn infeasible_anchor_rejected() {
        let times = vec![0.0, 1.0];
        let w = PathOnGrid::new(times, vec![0.5, 1.0], GridKind::Explicit).unwrap();
        assert!(matches!(
            min_energy_in_tube(&w, 0.25),
            Err(TautError::InfeasibleAnchor(_))
        ));
    }

    #[test]
    fn matches_qp_oracle_on_random_paths() {
        for seed in 0..6u64 {
            let z = GaussianCoefficients::new(seed, 100);
            let w = sample_bm(&z, &uniform_grid(16, 1.0)).unwrap();
            let eps = 0.1;
            let ts = min_energy_in_tube(&w, eps).unwrap();
            let lo: Vec<f64> = w.values().iter().map(|v| v - eps).collect();
            let hi: Vec<f64> = w.values().iter().map(|v| v + eps).collect();
            let qp = min_energy_qp(w.times(), &lo, &hi, 0.0, 100_000);
            assert!(
                (ts - qp).abs() <= 1e-6 * qp.max(1.0),
                "seed {seed}: taut {ts} vs qp {qp}"
            );
        }
    }

    #[test]
    fn tube_constraint_and_slackness() {
        let z = GaussianCoefficients::new(12, 5);
        let w = sample_bm(&z, &uniform_grid(64, 1.0)).unwrap();
        let eps = 0.15;
        let v = taut_string_in_tube(&w, eps).unwrap();
        let t = v.times();
        let vv = v.values();
        for i in 0..t.len() {
            assert!(
                (vv[i] - w.values()[i]).abs() <= eps + 1e-12,
                "tube violated at {i}"
            );
        }
        // Complementary slackness: strict curvature only at tube contacts.
        for i in 1..t.len() - 1 {
            let s_in = (vv[i] - vv[i - 1]) / (t[i] - t[i - 1]);
            let s_out = (vv[i + 1] - vv[i]) / (t[i + 1] - t[i]);
            if (s_out - s_in).abs() > 1e-7 {
                let gap = (vv[i] - w.values()[i]).abs();
                assert!(
                    (gap - eps).abs() <= 1e-7,
                    "kink off the boundary at {i}: gap {gap}"
                );
            }
        }
    }

    #[test]
    fn distance_basics_and_certificate() {
        // w(t) = t has energy 1/2 <= 1, so distance to the unit ball is 0.
        let w = line_path(64, 1.0);
        assert_eq!(distance_to_ball(&w, 1.0, 1e-6).unwrap(), 0.0);
        // Steeper line: positive distance with a valid certificate.
        let w = line_path(256, 3.0);
        let cert = distance_to_ball_certified(&w, 0.5, 1e-7).unwrap();
        assert!(cert.distance > 0.0);
        assert!(cert.energy_at_distance <= 0.5 + ENERGY_SLACK);
        assert!(cert.energy_below.unwrap() > 0.5 + ENERGY_SLACK);
        // Cross-check against the QP oracle at the returned radius.
        let lo: Vec<f64> = w.values().iter().map(|v| v - cert.distance).collect();
        let hi: Vec<f64> = w.values().iter().map(|v| v + cert.distance).collect();
        let qp = min_energy_qp(w.times(), &lo, &hi, 0.0, 200_000);
        assert!((cert.energy_at_distance - qp).abs() <= 1e-5 * qp.max(1.0));
    }

    #[test]
    fn distance_monotone_in_budget() {
        for seed in 0..10u64 {
            let z = GaussianCoefficients::new(seed, 40);
            let w = sample_bm(&z, &uniform_grid(128, 1.0)).unwrap();
            let d_half = distance_to_ball(&w, 0.5, 1e-6).unwrap();
            let d_one = distance_to_ball(&w, 1.0, 1e-6).unwrap();
            let d_two = distance_to_ball(&w, 2.0, 1e-6).unwrap();
            assert!(d_half + 1e-6 >= d_one, "seed {seed}");
            assert!(d_one + 1e-6 >= d_two, "seed {seed}");
        }
    }

    #[test]
    fn energy_ball_membership() {
        assert!(EnergyBall::new(-1.0).is_err());
        let ball = EnergyBall::new(1.0).unwrap();
        // w(t) = t has energy 1/2.
        assert!(ball.contains(&line_path(16, 1.0), 0.0));
        // w(t) = 2t has energy 2.
        assert!(!ball.contains(&line_path(16, 2.0), 0.0));
        // Paths not anchored at zero are outside.
        let off = PathOnGrid::new(vec![0.0, 1.0], vec![0.5, 0.6], GridKind::Explicit).unwrap();
        assert!(!ball.contains(&off, 0.0));
    }

    #[test]
    fn rescale_basics() {
        let s = std::f64::consts::E.powi(3);
        let times: Vec<f64> = (0..=8).map(|i| i as f64 * s / 8.0).collect();
        let zero = PathOnGrid::new(times.clone(), vec![0.0; 9], GridKind::Explicit).unwrap();
        let z = rescale_strassen(&zero).unwrap();
        assert!(z.values().iter().all(|v| *v == 0.0));
        assert_eq!(z.values()[0], 0.0);
        assert!((z.times()[8] - 1.0).abs() < 1e-15);
        // s <= e rejected.
        let small = PathOnGrid::new(vec![0.0, 1.0], vec![0.0, 1.0], GridKind::Explicit).unwrap();
        assert!(matches!(
            rescale_strassen(&small),
            Err(TautError::ScaleTooSmall(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn energy_monotone_and_feasible(seed in 0u64..1000, eps1 in 0.02f64..0.2, gap in 0.01f64..0.3) {
            let z = GaussianCoefficients::new(seed, 9);
            let w = sample_bm(&z, &uniform_grid(33, 1.0)).unwrap();
            let eps2 = eps1 + gap;
            let e1 = min_energy_in_tube(&w, eps1).unwrap();
            let e2 = min_energy_in_tube(&w, eps2).unwrap();
            prop_assert!(e2 <= e1 + 1e-10, "e({eps2}) = {e2} > e({eps1}) = {e1}");
            // Continuity in eps: small radius change moves energy slightly.
            let e1b = min_energy_in_tube(&w, eps1 + 1e-7).unwrap();
            prop_assert!((e1 - e1b).abs() <= 1e-3 * (1.0 + e1));
        }
    }
}
