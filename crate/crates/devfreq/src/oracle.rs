//! Independent reference computations used by the self-test command and the
//! acceptance suite: quadrature for Gaussian tails and the incomplete Gamma
//! function, brute-force zeta, a box-constrained QP solver for the tube
//! energy problem, and a two-sample Kolmogorov-Smirnov statistic.
//!
//! Nothing here shares an algorithm with the production path it checks.

use crate::numeric::adaptive_simpson;

/// Gamma(a, z) = int_z^inf t^{a-1} e^{-t} dt by adaptive quadrature.
pub fn gamma_upper_quadrature(a: f64, z: f64) -> f64 {
    // Integrand decays like e^{-t}; beyond z + width the remainder is
    // negligible relative to the leading term.
    let width = 60.0 + 10.0 * a.max(1.0);
    let f = |t: f64| t.powf(a - 1.0) * (-t).exp();
    adaptive_simpson(&f, z, z + width, 1e-15 * (z.powf(a - 1.0) * (-z).exp()).max(1e-280))
}

/// P(Z >= t) for a standard normal, by quadrature of the density. The
/// tolerance scales with the density at t so the relative error stays
/// around 1e-12 deep in the tail.
pub fn normal_upper_tail(t: f64) -> f64 {
    let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let f = |x: f64| norm * (-x * x / 2.0).exp();
    if t >= 0.0 {
        let scale = (norm * (-t * t / 2.0).exp()).max(1e-280);
        adaptive_simpson(&f, t, t + 14.0, 1e-12 * scale)
    } else {
        1.0 - adaptive_simpson(&f, -t, -t + 14.0, 1e-16)
    }
}

/// Brute-force zeta: raw summation of `n_terms` terms plus an integral
/// bracket of the remainder. Returns (estimate, error bound).
pub fn zeta_brute(s: f64, n_terms: u64) -> (f64, f64) {
    let mut sum = 0.0;
    for n in (1..=n_terms).rev() {
        sum += (n as f64).powf(-s);
    }
    let n = n_terms as f64;
    // sum_{m > N} m^{-s} lies between the integrals from N+1 and from N.
    let lo = (n + 1.0).powf(1.0 - s) / (s - 1.0);
    let hi = n.powf(1.0 - s) / (s - 1.0);
    (sum + 0.5 * (lo + hi), 0.5 * (hi - lo))
}

/// Minimal discrete tube energy by an accelerated projected-gradient method
/// (FISTA with adaptive restart) on the box-constrained quadratic program
///
///   minimize 1/2 sum_i (v_{i+1} - v_i)^2 / dt_i
///   subject to lower_i <= v_i <= upper_i (i >= 1), v_0 fixed.
///
/// This is the independent check for the taut-string sweep.
pub fn min_energy_qp(
    times: &[f64],
    lower: &[f64],
    upper: &[f64],
    v0: f64,
    iters: u32,
) -> f64 {
    let n = times.len() - 1;
    assert!(n >= 1 && lower.len() == times.len() && upper.len() == times.len());
    let dt: Vec<f64> = (0..n).map(|i| times[i + 1] - times[i]).collect();
    let inv: Vec<f64> = dt.iter().map(|d| 1.0 / d).collect();
    // Lipschitz constant of the gradient.
    let mut lip: f64 = 0.0;
    for i in 1..=n {
        let row = 2.0 * (inv[i - 1] + if i < n { inv[i] } else { 0.0 });
        lip = lip.max(row);
    }
    let step = 1.0 / lip;

    let clamp = |i: usize, x: f64| x.max(lower[i]).min(upper[i]);
    let mut v: Vec<f64> = (1..=n).map(|i| clamp(i, v0)).collect();
    let mut y = v.clone();
    let mut t_acc = 1.0f64;
    let mut prev_obj = f64::INFINITY;

    let energy = |v: &[f64]| -> f64 {
        let mut e = (v[0] - v0).powi(2) * inv[0];
        for i in 1..n {
            e += (v[i] - v[i - 1]).powi(2) * inv[i];
        }
        0.5 * e
    };

    let mut grad = vec![0.0; n];
    for it in 0..iters {
        // gradient at y
        for i in 1..=n {
            let left = if i == 1 { v0 } else { y[i - 2] };
            let mut g = (y[i - 1] - left) * inv[i - 1];
            if i < n {
                g -= (y[i] - y[i - 1]) * inv[i];
            }
            grad[i - 1] = g;
        }
        let mut v_next = vec![0.0; n];
        for i in 0..n {
            v_next[i] = clamp(i + 1, y[i] - step * grad[i]);
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t_acc * t_acc).sqrt());
        let beta = (t_acc - 1.0) / t_next;
        for i in 0..n {
            y[i] = v_next[i] + beta * (v_next[i] - v[i]);
        }
        v = v_next;
        t_acc = t_next;
        // Restart on objective increase; check occasionally to save time.
        if it % 50 == 0 {
            let obj = energy(&v);
            if obj > prev_obj {
                y.copy_from_slice(&v);
                t_acc = 1.0;
            }
            prev_obj = obj;
        }
    }
    energy(&v)
}

/// Two-sample Kolmogorov-Smirnov statistic (sorts its inputs).
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Critical value for the two-sample KS test at level `alpha`.
pub fn ks_critical(alpha: f64, na: usize, nb: usize) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * ((na + nb) as f64 / (na as f64 * nb as f64)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_quadrature_known_values() {
        // Gamma(1, z) = e^{-z}
        assert!((gamma_upper_quadrature(1.0, 2.0) - (-2.0f64).exp()).abs() < 1e-12);
        // Gamma(2, z) = (z + 1) e^{-z}
        assert!((gamma_upper_quadrature(2.0, 3.0) - 4.0 * (-3.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn normal_tail_known_values() {
        assert!((normal_upper_tail(0.0) - 0.5).abs() < 1e-12);
        assert!((normal_upper_tail(1.0) - 0.158_655_253_931).abs() < 1e-10);
        assert!((normal_upper_tail(3.0) - 1.349_898_031_63e-3).abs() < 1e-12);
    }

    #[test]
    fn qp_straight_string() {
        // Tube wide enough that the zero path fits: energy 0.
        let times: Vec<f64> = (0..=16).map(|i| i as f64 / 16.0).collect();
        let lower: Vec<f64> = times.iter().map(|_| -1.0).collect();
        let upper: Vec<f64> = times.iter().map(|_| 1.0).collect();
        let e = min_energy_qp(&times, &lower, &upper, 0.0, 20_000);
        assert!(e < 1e-10, "energy {e}");
        // Degenerate tube pinning v to the line t -> t: energy 1/2.
        let lower: Vec<f64> = times.clone();
        let upper: Vec<f64> = times.clone();
        let e = min_energy_qp(&times, &lower, &upper, 0.0, 20_000);
        assert!((e - 0.5).abs() < 1e-9, "energy {e}");
    }

    #[test]
    fn ks_identical_samples_zero() {
        let mut a: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let mut b = a.clone();
        assert!(ks_two_sample(&mut a, &mut b) <= 0.01 + 1e-12);
    }
}
