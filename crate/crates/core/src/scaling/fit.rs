use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{PercError, Result};

/// One point of a log-log fit. `weight` is the inverse variance of `ln y`
/// (1 for unweighted fits).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub x: f64,
    pub y: f64,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    /// 95% percentile bootstrap interval, widened if needed to contain the slope.
    pub bootstrap_ci: (f64, f64),
    pub points: Vec<FitPoint>,
    /// Weighted residual sum of squares.
    pub chi2: f64,
}

impl ExponentFit {
    pub fn ci_contains(&self, value: f64) -> bool {
        self.bootstrap_ci.0 <= value && value <= self.bootstrap_ci.1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub bootstrap: u32,
    pub seed: u64,
    /// Lack-of-fit p-value below which the smallest-scale point is dropped.
    pub lack_of_fit_alpha: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            bootstrap: 2000,
            seed: 0x5eed,
            lack_of_fit_alpha: 0.01,
        }
    }
}

struct Line {
    slope: f64,
    intercept: f64,
    stderr: f64,
    chi2: f64,
}

fn weighted_line(pts: &[(f64, f64, f64)], weighted: bool) -> Option<Line> {
    if pts.iter().all(|p| p.0 == pts[0].0) {
        return None;
    }
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let mx = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let my = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 || !sxx.is_finite() {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let chi2: f64 = pts
        .iter()
        .map(|p| p.2 * (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let dof = pts.len().saturating_sub(2).max(1) as f64;
    // Known variances: 1/Sxx. Unit weights: scale by the residual variance.
    let stderr = if weighted {
        (1.0 / sxx).sqrt()
    } else {
        (chi2 / dof / sxx).sqrt()
    };
    Some(Line {
        slope,
        intercept,
        stderr,
        chi2,
    })
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn fit_points(points: Vec<FitPoint>, weighted: bool, opts: &FitOptions) -> Result<ExponentFit> {
    if points.len() < 3 {
        return Err(PercError::InsufficientData(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    if points.windows(2).any(|w| w[0].x >= w[1].x) {
        return Err(PercError::InvalidInput(
            "x values must be strictly increasing".into(),
        ));
    }
    if points
        .iter()
        .any(|p| !(p.x > 0.0 && p.y > 0.0 && p.weight > 0.0) || !p.y.is_finite())
    {
        return Err(PercError::InvalidInput(
            "fit needs positive finite x, y and weights".into(),
        ));
    }
    let logs: Vec<(f64, f64, f64)> = points.iter().map(|p| (p.x.ln(), p.y.ln(), p.weight)).collect();
    let line = weighted_line(&logs, weighted).expect("distinct x values");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut slopes = Vec::with_capacity(opts.bootstrap as usize);
    let mut resample = Vec::with_capacity(logs.len());
    for _ in 0..opts.bootstrap {
        resample.clear();
        resample.extend((0..logs.len()).map(|_| logs[rng.gen_range(0..logs.len())]));
        if let Some(l) = weighted_line(&resample, weighted) {
            slopes.push(l.slope);
        }
    }
    let bootstrap_ci = if slopes.is_empty() {
        (line.slope, line.slope)
    } else {
        slopes.sort_by(f64::total_cmp);
        let lo = percentile(&slopes, 0.025).min(line.slope);
        let hi = percentile(&slopes, 0.975).max(line.slope);
        (lo, hi)
    };
    Ok(ExponentFit {
        slope: line.slope,
        intercept: line.intercept,
        stderr: line.stderr,
        bootstrap_ci,
        points,
        chi2: line.chi2,
    })
}

/// Ordinary least squares of `ln y` on `ln x`.
pub fn fit_exponent(points: &[(f64, f64)], opts: &FitOptions) -> Result<ExponentFit> {
    let pts = points
        .iter()
        .map(|&(x, y)| FitPoint { x, y, weight: 1.0 })
        .collect();
    fit_points(pts, false, opts)
}

/// Weighted least squares with weights `1/σ²` for `σ = stderr(y)/y`, the
/// delta-method error of `ln y`.
pub fn fit_exponent_weighted(points: &[(f64, f64, f64)], opts: &FitOptions) -> Result<ExponentFit> {
    let pts = points
        .iter()
        .map(|&(x, y, se)| {
            let rel = se / y;
            let weight = if rel > 0.0 && rel.is_finite() {
                1.0 / (rel * rel)
            } else {
                0.0
            };
            FitPoint { x, y, weight }
        })
        .collect::<Vec<_>>();
    if pts.iter().any(|p| p.weight <= 0.0) {
        return Err(PercError::InvalidInput(
            "weighted fit needs positive standard errors".into(),
        ));
    }
    fit_points(pts, true, opts)
}

/// A weighted fit over all points and, when the lack-of-fit test rejects
/// it, over the points left after dropping the smallest scales one at a
/// time until the test passes or three points remain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub full: ExponentFit,
    pub full_p_value: f64,
    pub trimmed: Option<ExponentFit>,
    pub trimmed_p_value: Option<f64>,
}

impl ScalingFit {
    /// The trimmed fit when there is one, else the full fit.
    pub fn preferred(&self) -> &ExponentFit {
        self.trimmed.as_ref().unwrap_or(&self.full)
    }
}

pub fn lack_of_fit_p_value(fit: &ExponentFit) -> f64 {
    let dof = fit.points.len() as f64 - 2.0;
    if dof < 1.0 {
        return 1.0;
    }
    let chi = ChiSquared::new(dof).expect("positive degrees of freedom");
    1.0 - chi.cdf(fit.chi2)
}

pub fn fit_scaling(points: &[(f64, f64, f64)], opts: &FitOptions) -> Result<ScalingFit> {
    let full = fit_exponent_weighted(points, opts)?;
    let full_p_value = lack_of_fit_p_value(&full);
    let mut trimmed = None;
    let mut trimmed_p_value = None;
    let mut p_value = full_p_value;
    let mut start = 0;
    while p_value < opts.lack_of_fit_alpha && points.len() - start > 3 {
        start += 1;
        let fit = fit_exponent_weighted(&points[start..], opts)?;
        p_value = lack_of_fit_p_value(&fit);
        trimmed = Some(fit);
        trimmed_p_value = Some(p_value);
    }
    Ok(ScalingFit {
        full,
        full_p_value,
        trimmed,
        trimmed_p_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Uniform multiplicative noise in `[1 - a, 1 + a]`.
    fn noise(rng: &mut impl Rng, a: f64) -> f64 {
        1.0 + a * (2.0 * rng.gen::<f64>() - 1.0)
    }

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = [1.0, 2.0, 4.0, 8.0, 16.0].iter().map(|&x| (x, x * x)).collect();
        let f = fit_exponent(&pts, &FitOptions::default()).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!(f.stderr < 1e-12);
        assert!(f.ci_contains(f.slope));
    }

    #[test]
    fn constant_has_zero_slope() {
        let pts: Vec<(f64, f64)> = (1..6).map(|x| (x as f64, 3.0)).collect();
        let f = fit_exponent(&pts, &FitOptions::default()).unwrap();
        assert!(f.slope.abs() < 1e-12);
    }

    #[test]
    fn noisy_power_law_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let pts: Vec<(f64, f64)> = (0..10)
            .map(|k| {
                let x = 2f64.powi(k + 2);
                (x, x.powf(1.5) * noise(&mut rng, 0.1))
            })
            .collect();
        let f = fit_exponent(&pts, &FitOptions::default()).unwrap();
        assert!(f.ci_contains(1.5), "{:?}", f.bootstrap_ci);
        assert!(f.bootstrap_ci.0 <= f.slope && f.slope <= f.bootstrap_ci.1);
    }

    #[test]
    fn repeated_abscissa_has_no_line() {
        let x = 16f64.ln();
        assert!(weighted_line(&[(x, 1.0, 3.0), (x, 2.0, 0.7), (x, 0.5, 1.1)], true).is_none());
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(
            fit_exponent(&[(1.0, 1.0), (2.0, 2.0)], &FitOptions::default()),
            Err(PercError::InsufficientData(_))
        ));
        assert!(fit_exponent(&[], &FitOptions::default()).is_err());
        assert!(fit_exponent(&[(1.0, 1.0), (1.0, 2.0), (3.0, 2.0)], &FitOptions::default()).is_err());
    }

    #[test]
    fn trimming_drops_curved_small_scales() {
        // y = x^{-1}(1 + 4/x): strong correction at small x, tiny errors.
        let pts: Vec<(f64, f64, f64)> = (0..7)
            .map(|k| {
                let x = 2f64.powi(k + 3);
                let y = (1.0 + 4.0 / x) / x;
                (x, y, y * 1e-3)
            })
            .collect();
        let s = fit_scaling(&pts, &FitOptions::default()).unwrap();
        assert!(s.full_p_value < 0.01);
        let t = s.trimmed.as_ref().unwrap();
        assert!(t.points.len() < 7);
        assert!((s.preferred().slope + 1.0).abs() < (s.full.slope + 1.0).abs());
    }

    #[test]
    fn weighted_fit_ignores_noisy_outlier() {
        let mut pts: Vec<(f64, f64, f64)> = (1..=6).map(|k| (k as f64, (k as f64).powi(3), 0.01)).collect();
        pts[2].1 *= 3.0;
        pts[2].2 = 1e3;
        let f = fit_exponent_weighted(&pts, &FitOptions::default()).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-3);
    }
}
