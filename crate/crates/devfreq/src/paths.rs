//! Brownian path constructions: the Haar/Schauder series with its exact
//! midpoint-displacement form, the sine-series partial sums, sequential
//! sampling on arbitrary grids, fractional Brownian motion and the Brownian
//! sheet.

use crate::path::{dyadic_grid, GridKind, PathError, PathOnGrid};
use crate::rng::Coefficients;

/// Largest dyadic level accepted by [`levy_exact_dyadic`]; 2^24 + 1 values
/// is 128 MiB and beyond desk scale.
pub const MAX_DYADIC_LEVEL: u32 = 24;

/// Largest grid accepted by the dense covariance factorization in
/// [`sample_fbm`].
pub const MAX_FBM_POINTS: usize = 4096;

/// Largest cell count accepted by [`sample_sheet`].
pub const MAX_SHEET_CELLS: usize = 1 << 22;

/// Mother tent H: 2t on [0, 1/2], 2(1-t) on (1/2, 1], zero outside.
#[inline]
pub fn tent(t: f64) -> f64 {
    if t < 0.0 || t > 1.0 {
        0.0
    } else if t <= 0.5 {
        2.0 * t
    } else {
        2.0 * (1.0 - t)
    }
}

/// Schauder function H_n(t) = H(2^j t - k) for n = 2^j + k, k = 0..2^j - 1.
pub fn schauder_eval(n: u64, t: f64) -> Result<f64, PathError> {
    if n == 0 {
        return Err(PathError::Domain("schauder index must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(PathError::Domain(format!("t = {t} outside [0, 1]")));
    }
    let j = 63 - n.leading_zeros();
    let k = n - (1u64 << j);
    Ok(tent((1u64 << j) as f64 * t - k as f64))
}

/// lambda_n = 2^{-floor(log2 n)/2 - 1} for n >= 1.
#[inline]
pub fn schauder_weight(n: u64) -> f64 {
    let j = 63 - n.leading_zeros();
    (2.0f64).powf(-(j as f64) / 2.0 - 1.0)
}

/// Partial sum L^J(t) = Z_0 t + sum_{n=1}^{2^J} lambda_n Z_n H_n(t).
///
/// Within a generation the tents have disjoint supports, so the sum is
/// evaluated in O(J) per point by walking the one active tent per level.
pub fn levy_eval(coeffs: &impl Coefficients, level: u32, t: f64) -> f64 {
    let mut acc = coeffs.z(0) * t;
    for j in 0..level {
        let pow = 1u64 << j;
        let k = ((pow as f64 * t) as u64).min(pow - 1);
        let h = tent(pow as f64 * t - k as f64);
        if h != 0.0 {
            let n = pow + k;
            acc += schauder_weight(n) * coeffs.z(n) * h;
        }
    }
    // The sum runs to n = 2^J inclusive: the first tent of generation J.
    let pow = 1u64 << level;
    let h = tent(pow as f64 * t);
    if h != 0.0 {
        acc += schauder_weight(pow) * coeffs.z(pow) * h;
    }
    acc
}

/// L^J on an explicit grid in [0, 1].
pub fn levy_partial(
    coeffs: &impl Coefficients,
    level: u32,
    grid: &[f64],
) -> Result<PathOnGrid, PathError> {
    for &t in grid {
        if !(0.0..=1.0).contains(&t) {
            return Err(PathError::Domain(format!("grid point {t} outside [0, 1]")));
        }
    }
    let values = grid.iter().map(|&t| levy_eval(coeffs, level, t)).collect();
    PathOnGrid::new(grid.to_vec(), values, GridKind::Explicit)
}

/// Exact values of L^J at the level-J dyadic points via the midpoint
/// displacement recursion: the midpoint value is the average of its two
/// neighbours plus lambda_n Z_n, with n = 2^{j-1} + k at refinement step j.
///
/// Coarser levels are sub-grids of finer ones, so restricting the output to
/// every second point reproduces the previous level bit for bit.
pub fn levy_exact_dyadic(coeffs: &impl Coefficients, level: u32) -> Result<PathOnGrid, PathError> {
    let values = levy_dyadic_values(coeffs, level)?;
    PathOnGrid::new(dyadic_grid(level), values, GridKind::Dyadic(level))
}

/// The raw value vector of [`levy_exact_dyadic`] (index k holds L^J(k/2^J)).
pub fn levy_dyadic_values(coeffs: &impl Coefficients, level: u32) -> Result<Vec<f64>, PathError> {
    if level > MAX_DYADIC_LEVEL {
        return Err(PathError::Resource(format!(
            "dyadic level {level} exceeds the configured maximum {MAX_DYADIC_LEVEL}"
        )));
    }
    let n = 1usize << level;
    let mut values = vec![0.0; n + 1];
    values[n] = coeffs.z(0);
    // Refine level by level; step j fills the odd multiples of 2^{-j}.
    for j in 1..=level {
        let stride = n >> j;
        let lambda = schauder_weight(1u64 << (j - 1));
        for k in 0..(1usize << (j - 1)) {
            let left = 2 * k * stride;
            let mid = left + stride;
            let right = left + 2 * stride;
            let n_idx = (1u64 << (j - 1)) + k as u64;
            values[mid] = 0.5 * (values[left] + values[right]) + lambda * coeffs.z(n_idx);
        }
    }
    Ok(values)
}

/// Exact sup-norm of L^j - L^{j-1} over the whole interval [0, 1].
///
/// The difference consists of the tents n = 2^{j-1}+1 .. 2^j, which have
/// pairwise disjoint open supports and unit peaks, so the supremum is the
/// largest |lambda_n Z_n| among them.
pub fn levy_step_sup(coeffs: &impl Coefficients, j: u32) -> f64 {
    assert!(j >= 1, "step requires j >= 1");
    let lo = 1u64 << (j - 1);
    let hi = 1u64 << j;
    let mut sup = 0.0f64;
    for n in (lo + 1)..=hi {
        sup = sup.max(schauder_weight(n) * coeffs.z(n).abs());
    }
    sup
}

/// One generation of the tooth decomposition: the coefficients with indices
/// 2^{j-1} .. 2^j - 1 at level j >= 1.
#[derive(Debug, Clone)]
pub struct Generation {
    level: u32,
    weighted: Vec<f64>,
}

impl Generation {
    pub fn from_coefficients(coeffs: &impl Coefficients, level: u32) -> Self {
        assert!(level >= 1);
        let lo = 1u64 << (level - 1);
        let hi = 1u64 << level;
        let weighted = (lo..hi)
            .map(|n| schauder_weight(n) * coeffs.z(n))
            .collect();
        Self { level, weighted }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Sup norm of the generation block: tents have disjoint open supports
    /// and peak value one, so the sup is max_k |lambda_k Z_k|.
    pub fn sup_norm(&self) -> f64 {
        self.weighted.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Sine series W^K(t) = sum_{k=1}^K sin(k pi t) / k * Z_k.
pub fn wiener_partial(
    coeffs: &impl Coefficients,
    terms: u64,
    grid: &[f64],
) -> Result<PathOnGrid, PathError> {
    for &t in grid {
        if !(0.0..=1.0).contains(&t) {
            return Err(PathError::Domain(format!("grid point {t} outside [0, 1]")));
        }
    }
    let pi = std::f64::consts::PI;
    let values = grid
        .iter()
        .map(|&t| {
            (1..=terms)
                .map(|k| (k as f64 * pi * t).sin() / k as f64 * coeffs.z(k))
                .sum()
        })
        .collect();
    PathOnGrid::new(grid.to_vec(), values, GridKind::Explicit)
}

/// Sine series K^N(t) = sqrt(2)/pi sum_{k=0}^N sin((k - 1/2) pi t)/(k - 1/2) Z_k.
pub fn kkl_partial(
    coeffs: &impl Coefficients,
    last_term: u64,
    grid: &[f64],
) -> Result<PathOnGrid, PathError> {
    for &t in grid {
        if !(0.0..=1.0).contains(&t) {
            return Err(PathError::Domain(format!("grid point {t} outside [0, 1]")));
        }
    }
    let pi = std::f64::consts::PI;
    let scale = 2.0f64.sqrt() / pi;
    let values = grid
        .iter()
        .map(|&t| {
            (0..=last_term)
                .map(|k| {
                    let freq = k as f64 - 0.5;
                    (freq * pi * t).sin() / freq * coeffs.z(k)
                })
                .sum::<f64>()
                * scale
        })
        .collect();
    PathOnGrid::new(grid.to_vec(), values, GridKind::Explicit)
}

/// Brownian motion on an arbitrary strictly increasing grid starting at 0,
/// by sequential independent increments: W(t_{i+1}) = W(t_i) + sqrt(dt) z_i.
/// Exact finite-dimensional law on the grid.
pub fn sample_bm(coeffs: &impl Coefficients, grid: &[f64]) -> Result<PathOnGrid, PathError> {
    if grid.is_empty() {
        return Err(PathError::EmptyGrid);
    }
    if grid[0] != 0.0 {
        return Err(PathError::Domain("grid must start at 0".into()));
    }
    let mut values = Vec::with_capacity(grid.len());
    values.push(0.0);
    let mut w = 0.0;
    for i in 1..grid.len() {
        let dt = grid[i] - grid[i - 1];
        if !(dt > 0.0) {
            return Err(PathError::NonMonotoneGrid(i));
        }
        w += dt.sqrt() * coeffs.z((i - 1) as u64);
        values.push(w);
    }
    PathOnGrid::new(grid.to_vec(), values, GridKind::Explicit)
}

/// Fractional Brownian motion with Hurst index H on a grid starting at 0,
/// via a lower-triangular factorization of the covariance
/// Cov(X_s, X_t) = (s^{2H} + t^{2H} - |t-s|^{2H}) / 2 over the positive
/// grid points.
pub fn sample_fbm(
    coeffs: &impl Coefficients,
    grid: &[f64],
    hurst: f64,
) -> Result<PathOnGrid, PathError> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(PathError::Domain(format!("Hurst index {hurst} outside (0, 1)")));
    }
    if grid.is_empty() {
        return Err(PathError::EmptyGrid);
    }
    if grid[0] != 0.0 {
        return Err(PathError::Domain("grid must start at 0".into()));
    }
    if grid.len() > MAX_FBM_POINTS {
        return Err(PathError::Resource(format!(
            "{} grid points exceed the dense factorization limit {MAX_FBM_POINTS}",
            grid.len()
        )));
    }
    let ts = &grid[1..];
    let n = ts.len();
    let two_h = 2.0 * hurst;
    let mut cov = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let c = 0.5
                * (ts[i].powf(two_h) + ts[j].powf(two_h) - (ts[i] - ts[j]).abs().powf(two_h));
            cov[i * n + j] = c;
            cov[j * n + i] = c;
        }
    }
    let chol = cholesky_lower(&mut cov, n)?;
    let mut values = Vec::with_capacity(grid.len());
    values.push(0.0);
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..=i {
            acc += chol[i * n + j] * coeffs.z(j as u64);
        }
        values.push(acc);
    }
    PathOnGrid::new(grid.to_vec(), values, GridKind::Explicit)
}

/// In-place lower Cholesky; `m` is row-major n x n and must be symmetric
/// positive definite up to rounding.
fn cholesky_lower(m: &mut [f64], n: usize) -> Result<&[f64], PathError> {
    let max_diag = (0..n).fold(0.0f64, |a, i| a.max(m[i * n + i]));
    for j in 0..n {
        let mut d = m[j * n + j];
        for k in 0..j {
            d -= m[j * n + k] * m[j * n + k];
        }
        if d <= 0.0 {
            return Err(PathError::Factorization {
                pivot: j,
                suggested_jitter: 1e-12 * max_diag.max(1.0),
            });
        }
        let d = d.sqrt();
        m[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = m[i * n + j];
            for k in 0..j {
                s -= m[i * n + k] * m[j * n + k];
            }
            m[i * n + j] = s / d;
        }
        for i in 0..j {
            m[i * n + j] = 0.0;
        }
    }
    Ok(m)
}

/// Brownian sheet values on a product grid; both axes must start at 0.
#[derive(Debug, Clone)]
pub struct SheetOnGrid {
    pub tx: Vec<f64>,
    pub ty: Vec<f64>,
    /// Row-major: value at (tx[i], ty[j]) is `values[i * ty.len() + j]`.
    pub values: Vec<f64>,
}

impl SheetOnGrid {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ty.len() + j]
    }
}

/// Brownian sheet with Cov = min(t,t') min(s,s'), built from i.i.d. cell
/// increments: X(t_i, s_j) is the rectangle sum of sqrt(cell area) z over
/// all cells below and to the left.
pub fn sample_sheet(
    coeffs: &impl Coefficients,
    tx: &[f64],
    ty: &[f64],
) -> Result<SheetOnGrid, PathError> {
    for axis in [tx, ty] {
        if axis.is_empty() {
            return Err(PathError::EmptyGrid);
        }
        if axis[0] != 0.0 {
            return Err(PathError::Domain("axes must start at 0".into()));
        }
        for i in 1..axis.len() {
            if !(axis[i] > axis[i - 1]) {
                return Err(PathError::NonMonotoneGrid(i));
            }
        }
    }
    let (m, n) = (tx.len(), ty.len());
    if (m - 1) * (n - 1) > MAX_SHEET_CELLS {
        return Err(PathError::Resource(format!(
            "{} cells exceed the sheet limit {MAX_SHEET_CELLS}",
            (m - 1) * (n - 1)
        )));
    }
    let mut values = vec![0.0; m * n];
    for i in 1..m {
        let dx = tx[i] - tx[i - 1];
        for j in 1..n {
            let dy = ty[j] - ty[j - 1];
            let idx = ((i - 1) * (n - 1) + (j - 1)) as u64;
            let cell = (dx * dy).sqrt() * coeffs.z(idx);
            // Inclusion-exclusion on the running rectangle sums.
            values[i * n + j] =
                cell + values[(i - 1) * n + j] + values[i * n + j - 1] - values[(i - 1) * n + j - 1];
        }
    }
    Ok(SheetOnGrid {
        tx: tx.to_vec(),
        ty: ty.to_vec(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::sup_distance;
    use crate::rng::{FixedCoefficients, GaussianCoefficients};
    use proptest::prelude::*;

    #[test]
    fn schauder_values() {
        assert_eq!(schauder_eval(1, 0.5).unwrap(), 1.0);
        assert_eq!(schauder_eval(1, 0.25).unwrap(), 0.5);
        // n = 3 = 2^1 + 1: H(2t - 1) at t = 0.875 -> H(0.75) = 0.5.
        assert_eq!(schauder_eval(3, 0.875).unwrap(), 0.5);
        assert!(schauder_eval(1, 1.5).is_err());
        assert!(schauder_eval(0, 0.5).is_err());
    }

    proptest! {
        #[test]
        fn schauder_support_and_range(n in 1u64..5000, t in 0.0f64..=1.0) {
            let v = schauder_eval(n, t).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
            let j = 63 - n.leading_zeros();
            let k = n - (1u64 << j);
            let lo = k as f64 / (1u64 << j) as f64;
            let hi = (k + 1) as f64 / (1u64 << j) as f64;
            if t < lo || t > hi {
                prop_assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn levy_partial_basics() {
        let z = FixedCoefficients(vec![1.0]);
        // L^0 with z0 = 1 only: the linear interpolation t.
        assert_eq!(levy_eval(&z, 0, 0.0), 0.0);
        assert_eq!(levy_eval(&z, 0, 1.0), 1.0);
        // Any coefficients vanish at t = 0.
        let z = GaussianCoefficients::new(1, 0);
        for level in [0u32, 3, 6] {
            assert_eq!(levy_eval(&z, level, 0.0), 0.0);
        }
    }

    #[test]
    fn dyadic_level_zero_and_one() {
        let z = FixedCoefficients(vec![0.7, -0.4]);
        let p = levy_exact_dyadic(&z, 0).unwrap();
        assert_eq!(p.values(), &[0.0, 0.7]);
        let p = levy_exact_dyadic(&z, 1).unwrap();
        // midpoint = z0/2 + z1/2, matching L^1(1/2).
        assert!((p.values()[1] - (0.35 - 0.2)).abs() < 1e-15);
        assert!((p.values()[1] - levy_eval(&z, 1, 0.5)).abs() < 1e-15);
    }

    #[test]
    fn dyadic_matches_series_and_nests() {
        for seed in 0..10u64 {
            let z = GaussianCoefficients::new(seed, 0);
            for level in 1..=8u32 {
                let exact = levy_exact_dyadic(&z, level).unwrap();
                let series = levy_partial(&z, level, exact.times()).unwrap();
                assert!(
                    sup_distance(&exact, &series).unwrap() <= 1e-12,
                    "seed {seed} level {level}"
                );
                let coarse = levy_exact_dyadic(&z, level - 1).unwrap();
                for (k, cv) in coarse.values().iter().enumerate() {
                    assert_eq!(cv.to_bits(), exact.values()[2 * k].to_bits());
                }
            }
        }
    }

    #[test]
    fn resource_limit_respected() {
        let z = GaussianCoefficients::new(0, 0);
        assert!(matches!(
            levy_exact_dyadic(&z, MAX_DYADIC_LEVEL + 1),
            Err(PathError::Resource(_))
        ));
    }

    #[test]
    fn generation_sup_matches_grid_difference() {
        // On the level-J dyadic grid, L^J - L^{J-1} attains its sup at the
        // peaks of the tents n = 2^{J-1}+1 .. 2^J-1 (the first tent of
        // generation J vanishes on that grid).
        let z = GaussianCoefficients::new(11, 4);
        for level in 2..=7u32 {
            let fine = levy_exact_dyadic(&z, level).unwrap();
            let coarse = levy_partial(&z, level - 1, fine.times()).unwrap();
            let grid_sup = sup_distance(&fine, &coarse).unwrap();
            let lo = 1u64 << (level - 1);
            let hi = 1u64 << level;
            let expected = ((lo + 1)..hi)
                .map(|n| (schauder_weight(n) * z.z(n)).abs())
                .fold(0.0f64, f64::max);
            assert!((grid_sup - expected).abs() < 1e-12, "level {level}");
        }
    }

    #[test]
    fn step_sup_matches_dense_grid() {
        // The exact sup of L^j - L^{j-1} over [0,1] equals the dense-grid sup
        // once the grid contains the tent peaks (level j+1 dyadics).
        let z = GaussianCoefficients::new(3, 9);
        for j in 1..=6u32 {
            let grid = dyadic_grid(j + 1);
            let a = levy_partial(&z, j, &grid).unwrap();
            let b = levy_partial(&z, j - 1, &grid).unwrap();
            let dense = sup_distance(&a, &b).unwrap();
            assert!((levy_step_sup(&z, j) - dense).abs() < 1e-12, "j = {j}");
        }
    }

    #[test]
    fn generation_type_sup() {
        let z = FixedCoefficients(vec![0.0, 0.0, 3.0, -5.0]);
        let g = Generation::from_coefficients(&z, 2);
        // lambda for n in {2, 3} is 2^{-3/2}.
        let expect = 5.0 * (2.0f64).powf(-1.5);
        assert!((g.sup_norm() - expect).abs() < 1e-15);
        assert_eq!(g.level(), 2);
    }

    #[test]
    fn wiener_endpoints_and_peak() {
        let z = GaussianCoefficients::new(8, 1);
        let grid = [0.0, 0.5, 1.0];
        let p = wiener_partial(&z, 25, &grid).unwrap();
        assert_eq!(p.values()[0], 0.0);
        assert!(p.values()[2].abs() < 1e-12);
        let z = FixedCoefficients(vec![0.0, 1.0]);
        let p = wiener_partial(&z, 1, &grid).unwrap();
        assert!((p.values()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kkl_endpoint_value() {
        let z = FixedCoefficients(vec![1.0]);
        let p = kkl_partial(&z, 0, &[0.0, 1.0]).unwrap();
        assert_eq!(p.values()[0], 0.0);
        // sqrt(2)/pi * sin(-pi/2)/(-1/2) = 2 sqrt(2) / pi.
        let expect = 2.0 * 2.0f64.sqrt() / std::f64::consts::PI;
        assert!((p.values()[1] - expect).abs() < 1e-14);
    }

    #[test]
    fn bm_trivial_grids() {
        let z = FixedCoefficients(vec![1.5]);
        let p = sample_bm(&z, &[0.0]).unwrap();
        assert_eq!(p.values(), &[0.0]);
        let p = sample_bm(&z, &[0.0, 1.0]).unwrap();
        assert_eq!(p.values(), &[0.0, 1.5]);
        assert!(sample_bm(&z, &[0.5, 1.0]).is_err());
        assert!(sample_bm(&z, &[0.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn fbm_half_is_bm_increments() {
        // H = 1/2 collapses the covariance to min(s, t); increments must be
        // exactly independent standard scaled, which Cholesky reproduces as
        // the cumulative-sum factor.
        let z = GaussianCoefficients::new(21, 0);
        let grid: Vec<f64> = (0..=16).map(|i| i as f64 / 16.0).collect();
        let p = sample_fbm(&z, &grid, 0.5).unwrap();
        assert_eq!(p.values()[0], 0.0);
        let mut w = 0.0;
        for i in 0..16 {
            w += 0.25 * z.z(i as u64);
            assert!((p.values()[i + 1] - w).abs() < 1e-10);
        }
    }

    #[test]
    fn fbm_guards() {
        let z = GaussianCoefficients::new(0, 0);
        assert!(sample_fbm(&z, &[0.0, 0.5], 1.5).is_err());
        let big: Vec<f64> = (0..=MAX_FBM_POINTS).map(|i| i as f64).collect();
        assert!(matches!(
            sample_fbm(&z, &big, 0.3),
            Err(PathError::Resource(_))
        ));
    }

    #[test]
    fn sheet_boundary_zero() {
        let z = GaussianCoefficients::new(5, 0);
        let ax: Vec<f64> = (0..=8).map(|i| i as f64 / 8.0).collect();
        let sheet = sample_sheet(&z, &ax, &ax).unwrap();
        for i in 0..ax.len() {
            assert_eq!(sheet.value(i, 0), 0.0);
            assert_eq!(sheet.value(0, i), 0.0);
        }
    }
}
