//! Least-squares fits of sampled logical error rates.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::TrialBatch;

/// Points need at least this many failures to enter a fit.
pub const MIN_FAILURES: u64 = 10;

/// Fit of `p_L = A p^r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub r: f64,
    pub r_err: f64,
    /// `ln A`.
    pub intercept: f64,
    /// `(p, ln p_L - fitted)` of the points used.
    pub residuals: Vec<(f64, f64)>,
}

/// Weighted least squares of `ln p_L` on `ln p` over grid points inside `p_range`
/// with enough failures. Weights are inverse delta-method variances.
pub fn fit_exponent(batch: &TrialBatch, p_range: (f64, f64)) -> Result<ExponentFit> {
    let pts: Vec<(f64, f64, f64)> = batch
        .points()
        .filter(|(p, _)| *p >= p_range.0 && *p <= p_range.1 && *p > 0.0)
        .filter(|(_, r)| r.failures >= MIN_FAILURES && r.failures < r.trials)
        .map(|(p, r)| (p.ln(), r.rate().ln(), r.failures as f64 / (1.0 - r.rate())))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} grid points in [{}, {}] have at least {MIN_FAILURES} failures, 3 are needed; increase the trial count",
            pts.len(),
            p_range.0,
            p_range.1
        )));
    }
    let (s, sx, sy, sxx, sxy) = pts.iter().fold((0.0, 0.0, 0.0, 0.0, 0.0), |a, &(x, y, w)| {
        (a.0 + w, a.1 + w * x, a.2 + w * y, a.3 + w * x * x, a.4 + w * x * y)
    });
    let det = s * sxx - sx * sx;
    if det <= 0.0 {
        return Err(Error::Numerical("degenerate exponent fit".into()));
    }
    let r = (s * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;
    let residuals: Vec<(f64, f64)> = pts.iter().map(|&(x, y, _)| (x.exp(), y - intercept - r * x)).collect();
    let chi2: f64 = pts.iter().zip(&residuals).map(|(&(_, _, w), &(_, e))| w * e * e).sum();
    let scale = if pts.len() > 2 { (chi2 / (pts.len() - 2) as f64).max(1.0) } else { 1.0 };
    Ok(ExponentFit { r, r_err: (s / det * scale).sqrt(), intercept, residuals })
}

/// Finite-size scaling fit `p_L = A + B x + C x^2`, `x = (p - p_c) d'^(1/nu)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdFit {
    pub p_c: f64,
    pub p_c_err: f64,
    pub nu: f64,
    pub nu_err: f64,
    /// `[A, B, C]`.
    pub coefficients: [f64; 3],
    pub chi2: f64,
    pub dof: usize,
    /// `(d', p, observed - fitted)` per point.
    pub residuals: Vec<(f64, f64, f64)>,
}

struct ScalingData {
    /// `(p, d', rate, weight)`.
    points: Vec<(f64, f64, f64, f64)>,
}

impl ScalingData {
    /// Weighted quadratic fit for fixed `(p_c, nu)`; returns chi^2 and coefficients.
    fn profile(&self, pc: f64, nu: f64) -> (f64, [f64; 3]) {
        let mut m = [[0.0f64; 4]; 3];
        for &(p, d, y, w) in &self.points {
            let x = (p - pc) * d.powf(1.0 / nu);
            let basis = [1.0, x, x * x];
            for i in 0..3 {
                for j in 0..3 {
                    m[i][j] += w * basis[i] * basis[j];
                }
                m[i][3] += w * basis[i] * y;
            }
        }
        let Some(c) = solve3(m) else { return (f64::INFINITY, [0.0; 3]) };
        let chi2 = self
            .points
            .iter()
            .map(|&(p, d, y, w)| {
                let x = (p - pc) * d.powf(1.0 / nu);
                let e = y - c[0] - c[1] * x - c[2] * x * x;
                w * e * e
            })
            .sum();
        (chi2, c)
    }
}

fn solve3(mut m: [[f64; 4]; 3]) -> Option<[f64; 3]> {
    for c in 0..3 {
        let piv = (c..3).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))?;
        if m[piv][c].abs() < 1e-300 {
            return None;
        }
        m.swap(c, piv);
        let pivot = m[c];
        for (r, row) in m.iter_mut().enumerate() {
            if r != c {
                let f = row[c] / pivot[c];
                for (x, p) in row[c..].iter_mut().zip(&pivot[c..]) {
                    *x -= f * p;
                }
            }
        }
    }
    Some([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

fn nelder_mead(f: impl Fn([f64; 2]) -> f64, start: [f64; 2], step: [f64; 2]) -> [f64; 2] {
    let mut simplex = [start, [start[0] + step[0], start[1]], [start[0], start[1] + step[1]]];
    let mut values = simplex.map(&f);
    for _ in 0..2000 {
        let mut order = [0, 1, 2];
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.map(|i| simplex[i]);
        values = order.map(|i| values[i]);
        if (values[2] - values[0]).abs() <= 1e-12 * (1.0 + values[0].abs()) {
            break;
        }
        let centroid = [(simplex[0][0] + simplex[1][0]) / 2.0, (simplex[0][1] + simplex[1][1]) / 2.0];
        let along = |t: f64| [centroid[0] + t * (simplex[2][0] - centroid[0]), centroid[1] + t * (simplex[2][1] - centroid[1])];
        let reflected = along(-1.0);
        let fr = f(reflected);
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = f(expanded);
            if fe < fr {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
        } else if fr < values[1] {
            simplex[2] = reflected;
            values[2] = fr;
        } else {
            let contracted = if fr < values[2] { along(-0.5) } else { along(0.5) };
            let fc = f(contracted);
            if fc < values[2].min(fr) {
                simplex[2] = contracted;
                values[2] = fc;
            } else {
                for i in 1..3 {
                    simplex[i] = [(simplex[0][0] + simplex[i][0]) / 2.0, (simplex[0][1] + simplex[i][1]) / 2.0];
                    values[i] = f(simplex[i]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    simplex[best]
}

/// Whether the largest code overtakes the smallest somewhere on their common grid.
fn has_crossing(batches: &[TrialBatch]) -> bool {
    let by_size = |pick_max: bool| {
        let it = batches.iter().filter(|b| !b.results.is_empty());
        if pick_max {
            it.max_by(|a, b| a.d_prime.total_cmp(&b.d_prime))
        } else {
            it.min_by(|a, b| a.d_prime.total_cmp(&b.d_prime))
        }
    };
    let (Some(small), Some(large)) = (by_size(false), by_size(true)) else { return false };
    let (mut below, mut above) = (false, false);
    for (p, rl) in large.points() {
        if let Some((_, rs)) = small.points().find(|(q, _)| *q == p) {
            below |= rl.rate() < rs.rate();
            above |= rl.rate() > rs.rate();
        }
    }
    below && above
}

/// Critical-exponent fit over batches of at least three code sizes sharing a noise
/// family. Fails when the sampled rates never cross.
pub fn fit_threshold(batches: &[TrialBatch]) -> Result<ThresholdFit> {
    let sizes: BTreeSet<u64> = batches.iter().map(|b| b.d_prime.to_bits()).collect();
    if sizes.len() < 3 {
        return Err(Error::InsufficientData(format!("{} code sizes given, 3 are needed", sizes.len())));
    }
    let mut points = Vec::new();
    for b in batches {
        for (p, r) in b.points() {
            if r.trials == 0 {
                continue;
            }
            let n = r.trials as f64;
            let smoothed = (r.failures as f64 + 0.5) / (n + 1.0);
            points.push((p, b.d_prime, r.rate(), n / (smoothed * (1.0 - smoothed))));
        }
    }
    if points.len() < 6 {
        return Err(Error::InsufficientData(format!("{} points for a 5-parameter fit", points.len())));
    }
    if !has_crossing(batches) {
        return Err(Error::Numerical("logical error rates of the smallest and largest codes do not cross".into()));
    }
    let data = ScalingData { points };
    let pmin = data.points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let pmax = data.points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let objective = |v: [f64; 2]| {
        if v[0] < pmin || v[0] > pmax || v[1] < 0.2 || v[1] > 10.0 {
            return f64::INFINITY;
        }
        data.profile(v[0], v[1]).0
    };
    let mut start = [pmin, 1.0];
    let mut best = f64::INFINITY;
    for i in 0..=100 {
        let pc = pmin + (pmax - pmin) * i as f64 / 100.0;
        for j in 0..=60 {
            let nu = 0.25 * (4.0f64 * 4.0).powf(j as f64 / 60.0);
            let v = objective([pc, nu]);
            if v < best {
                best = v;
                start = [pc, nu];
            }
        }
    }
    let span = pmax - pmin;
    let opt = nelder_mead(objective, start, [0.01 * span, 0.05 * start[1]]);
    let (chi2, coefficients) = data.profile(opt[0], opt[1]);
    if !(opt[0] > pmin && opt[0] < pmax) || !chi2.is_finite() {
        return Err(Error::Numerical(format!("fitted crossing {} lies outside [{pmin}, {pmax}]", opt[0])));
    }
    let dof = data.points.len() - 5;
    let cov = hessian_covariance(&objective, opt, [1e-3 * span, 1e-3 * opt[1]]);
    let scale = (chi2 / dof.max(1) as f64).max(1.0);
    let residuals = data
        .points
        .iter()
        .map(|&(p, d, y, _)| {
            let x = (p - opt[0]) * d.powf(1.0 / opt[1]);
            (d, p, y - coefficients[0] - coefficients[1] * x - coefficients[2] * x * x)
        })
        .collect();
    Ok(ThresholdFit {
        p_c: opt[0],
        p_c_err: (cov[0][0] * scale).max(0.0).sqrt(),
        nu: opt[1],
        nu_err: (cov[1][1] * scale).max(0.0).sqrt(),
        coefficients,
        chi2,
        dof,
        residuals,
    })
}

/// `2 H^-1` from a central-difference Hessian of the chi^2 surface.
fn hessian_covariance(f: &impl Fn([f64; 2]) -> f64, at: [f64; 2], h: [f64; 2]) -> [[f64; 2]; 2] {
    let e = |i: usize, s: f64| {
        let mut v = at;
        v[i] += s * h[i];
        v
    };
    let f0 = f(at);
    let d2 = |i: usize| (f(e(i, 1.0)) - 2.0 * f0 + f(e(i, -1.0))) / (h[i] * h[i]);
    let mixed = {
        let pp = f([at[0] + h[0], at[1] + h[1]]);
        let pm = f([at[0] + h[0], at[1] - h[1]]);
        let mp = f([at[0] - h[0], at[1] + h[1]]);
        let mm = f([at[0] - h[0], at[1] - h[1]]);
        (pp - pm - mp + mm) / (4.0 * h[0] * h[1])
    };
    let (a, b, c) = (d2(0), mixed, d2(1));
    let det = a * c - b * b;
    if det.is_nan() || det <= 0.0 {
        return [[f64::INFINITY, 0.0], [0.0, f64::INFINITY]];
    }
    [[2.0 * c / det, -2.0 * b / det], [-2.0 * b / det, 2.0 * a / det]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::{DecoderKind, PointResult};
    use crate::noise::NoiseKind;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn synthetic(d_prime: f64, grid: &[f64], results: Vec<PointResult>) -> TrialBatch {
        TrialBatch {
            code_id: format!("synthetic-{d_prime}"),
            n: 0,
            k: 1,
            d_prime,
            omega: 1.0,
            model: NoiseKind::Independent,
            decoder: DecoderKind::Mwpm,
            p_grid: grid.to_vec(),
            trials: results.first().map_or(0, |r| r.trials),
            seed: 0,
            rounds: None,
            results,
        }
    }

    #[test]
    fn recovers_exact_square_law() {
        let grid = [0.01, 0.02, 0.04, 0.08];
        let trials = 1u64 << 50;
        let results = grid.iter().map(|p| PointResult { failures: (p * p * trials as f64).round() as u64, trials }).collect();
        let fit = fit_exponent(&synthetic(5.0, &grid, results), (0.0, 1.0)).unwrap();
        assert!((fit.r - 2.0).abs() < 1e-6, "{}", fit.r);
    }

    #[test]
    fn exponent_needs_failures() {
        let grid = [0.01, 0.02, 0.04];
        let results = vec![PointResult { failures: 3, trials: 100 }; 3];
        assert!(matches!(fit_exponent(&synthetic(5.0, &grid, results), (0.0, 1.0)), Err(Error::InsufficientData(_))));
    }

    fn planted(pc: f64, nu: f64, seed: u64) -> Vec<TrialBatch> {
        let grid: Vec<f64> = (0..11).map(|i| 0.08 + 0.004 * i as f64).collect();
        let trials = 20_000u64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        [5.0, 7.0, 9.0, 11.0]
            .iter()
            .map(|&d: &f64| {
                let results = grid
                    .iter()
                    .map(|&p| {
                        let x = (p - pc) * d.powf(1.0 / nu);
                        let rate: f64 = 0.12 + 0.9 * x + 1.5 * x * x;
                        let failures = (0..trials).filter(|_| rng.gen::<f64>() < rate).count() as u64;
                        PointResult { failures, trials }
                    })
                    .collect();
                synthetic(d, &grid, results)
            })
            .collect()
    }

    #[test]
    fn recovers_planted_threshold() {
        for seed in 0..3 {
            let fit = fit_threshold(&planted(0.1, 1.3, seed)).unwrap();
            assert!((fit.p_c - 0.1).abs() <= 2.0 * fit.p_c_err.max(1e-4), "{fit:?}");
            assert!(fit.p_c_err < 0.005);
        }
    }

    #[test]
    fn threshold_requires_crossing_and_sizes() {
        let mut b = planted(0.1, 1.3, 1);
        b.truncate(2);
        assert!(matches!(fit_threshold(&b), Err(Error::InsufficientData(_))));
        let grid = [0.1, 0.2, 0.3];
        let flat = |d: f64, r: u64| synthetic(d, &grid, vec![PointResult { failures: r, trials: 1000 }; 3]);
        let no_cross = vec![flat(3.0, 300), flat(5.0, 200), flat(7.0, 100)];
        assert!(matches!(fit_threshold(&no_cross), Err(Error::Numerical(_))));
    }
}
