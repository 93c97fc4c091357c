use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{PercError, Result};
use crate::front::stats::WIDTH_EXPONENT;
use crate::front::{extract_front, front_stats, outer_boundary, BoundarySide};
use crate::sampling::{sample, StripSpec};
use crate::scaling::fit::{fit_scaling, FitOptions, ScalingFit};

/// Strip length as a function of the half-width `N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EllRule {
    /// `ℓ = ⌈factor · N⌉`
    Linear {
        factor: f64,
    },
    /// `ℓ = ⌈factor · N^exponent⌉`
    Power {
        exponent: f64,
        factor: f64,
    },
    Constant {
        value: u32,
    },
}

impl EllRule {
    pub fn ell(&self, n: u32) -> u32 {
        let n = n as f64;
        match *self {
            EllRule::Linear { factor } => (factor * n).ceil() as u32,
            EllRule::Power { exponent, factor } => (factor * n.powf(exponent)).ceil() as u32,
            EllRule::Constant { value } => value,
        }
    }

    /// The strip must be long compared to the front width: `ℓ_N` grows
    /// strictly faster than `N^{4/7}` and is at least `N^{4/7}` at every `N`
    /// in the sweep.
    pub fn validate(&self, sweep: &[u32]) -> Result<()> {
        let grows = match *self {
            EllRule::Linear { factor } => factor > 0.0,
            EllRule::Power { exponent, factor } => factor > 0.0 && exponent > WIDTH_EXPONENT,
            EllRule::Constant { .. } => false,
        };
        if !grows {
            return Err(PercError::InvalidParameter(format!(
                "ell rule {self:?} violates the standing assumption ell_N >= N^(4/7 + delta) for some delta > 0"
            )));
        }
        for &n in sweep {
            if (self.ell(n) as f64) < (n as f64).powf(WIDTH_EXPONENT) {
                return Err(PercError::InvalidParameter(format!(
                    "ell rule gives ell = {} < N^(4/7) at N = {n}, violating the standing assumption ell_N >= N^(4/7 + delta)",
                    self.ell(n)
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    /// Half-widths `N`, strictly increasing.
    pub sweep: Vec<u32>,
    pub replicas: u64,
    pub seed: u64,
    pub ell_rule: EllRule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.sweep.is_empty() {
            return Err(PercError::InsufficientData("sweep list is empty".into()));
        }
        if self.sweep.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PercError::InvalidParameter(
                "sweep values must be strictly increasing".into(),
            ));
        }
        if self.sweep[0] < 1 {
            return Err(PercError::InvalidParameter("N must be >= 1".into()));
        }
        if self.replicas == 0 {
            return Err(PercError::InvalidParameter("replicas must be >= 1".into()));
        }
        self.ell_rule.validate(&self.sweep)
    }
}

/// Per-replica front measurements. Height statistics are absent when the
/// front is empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontRecord {
    #[serde(rename = "N")]
    pub n: u32,
    pub ell: u32,
    pub seed: u64,
    pub replica: u64,
    pub front_length: usize,
    pub unique: bool,
    pub mean_height: Option<f64>,
    pub std_height: Option<f64>,
    pub min_height: Option<f64>,
    pub max_height: Option<f64>,
    pub u_plus_length: usize,
    pub u_minus_length: usize,
}

pub fn measure_front(spec: &StripSpec, seed: u64, replica: u64) -> Result<FrontRecord> {
    let c = sample(&spec.field(), spec.region(), seed, replica);
    let f = extract_front(&c)?;
    let stats = front_stats(&f, spec, 0.0).ok();
    Ok(FrontRecord {
        n: spec.half_width,
        ell: spec.ell,
        seed,
        replica,
        front_length: f.length,
        unique: f.unique,
        mean_height: stats.as_ref().map(|s| s.mean_height),
        std_height: stats.as_ref().map(|s| s.std_height),
        min_height: stats.as_ref().map(|s| s.min_height),
        max_height: stats.as_ref().map(|s| s.max_height),
        u_plus_length: outer_boundary(&c, BoundarySide::Upper)?.length,
        u_minus_length: outer_boundary(&c, BoundarySide::Lower)?.length,
    })
}

pub fn measure_fronts(
    spec: &StripSpec,
    seed: u64,
    replicas: std::ops::Range<u64>,
) -> Result<Vec<FrontRecord>> {
    replicas
        .into_par_iter()
        .map(|k| measure_front(spec, seed, k))
        .collect()
}

/// Mean and its standard error.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn of(values: &[f64]) -> Estimate {
        let n = values.len() as f64;
        if values.is_empty() {
            return Estimate {
                mean: f64::NAN,
                stderr: f64::NAN,
            };
        }
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Estimate {
            mean,
            stderr: (var / n).sqrt(),
        }
    }
}

/// Unbiased sample variance with its jackknife standard error.
pub fn jackknife_variance(values: &[f64]) -> Estimate {
    let n = values.len();
    if n < 3 {
        return Estimate {
            mean: f64::NAN,
            stderr: f64::NAN,
        };
    }
    let nf = n as f64;
    let s1: f64 = values.iter().sum();
    let s2: f64 = values.iter().map(|v| v * v).sum();
    let var = |s1: f64, s2: f64, m: f64| (s2 - s1 * s1 / m) / (m - 1.0);
    let full = var(s1, s2, nf);
    let leave_out: Vec<f64> = values.iter().map(|v| var(s1 - v, s2 - v * v, nf - 1.0)).collect();
    let mean_lo = leave_out.iter().sum::<f64>() / nf;
    let se = ((nf - 1.0) / nf * leave_out.iter().map(|t| (t - mean_lo).powi(2)).sum::<f64>()).sqrt();
    Estimate {
        mean: full,
        stderr: se,
    }
}

/// Aggregates for one half-width.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontSummary {
    #[serde(rename = "N")]
    pub n: u32,
    pub ell: u32,
    pub replicas: u64,
    pub mean_length: f64,
    pub mean_length_se: f64,
    pub var_length: f64,
    pub var_length_se: f64,
    /// `std(T_N) / mean(T_N)`
    pub relative_fluctuation: f64,
    pub mean_std_height: f64,
    pub mean_std_height_se: f64,
    pub mean_u_plus: f64,
    pub mean_u_plus_se: f64,
    pub mean_u_minus: f64,
    pub mean_u_minus_se: f64,
    pub unique_fraction: f64,
}

/// Records keyed by `(N, replica)`. Aggregates are computed from the
/// records in key order, so they do not depend on how the replicas were
/// batched or scheduled.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentTable {
    pub records: BTreeMap<(u32, u64), FrontRecord>,
}

impl ExperimentTable {
    pub fn insert(&mut self, r: FrontRecord) {
        self.records.insert((r.n, r.replica), r);
    }

    pub fn merge(mut self, other: ExperimentTable) -> ExperimentTable {
        self.records.extend(other.records);
        self
    }

    pub fn half_widths(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.records.keys().map(|k| k.0).collect();
        v.dedup();
        v
    }

    pub fn summary(&self, n: u32) -> Option<FrontSummary> {
        let recs: Vec<&FrontRecord> = self
            .records
            .range((n, 0)..=(n, u64::MAX))
            .map(|(_, r)| r)
            .collect();
        let first = recs.first()?;
        let lengths: Vec<f64> = recs.iter().map(|r| r.front_length as f64).collect();
        let widths: Vec<f64> = recs.iter().filter_map(|r| r.std_height).collect();
        let ups: Vec<f64> = recs.iter().map(|r| r.u_plus_length as f64).collect();
        let downs: Vec<f64> = recs.iter().map(|r| r.u_minus_length as f64).collect();
        let len = Estimate::of(&lengths);
        let var = jackknife_variance(&lengths);
        let width = Estimate::of(&widths);
        let up = Estimate::of(&ups);
        let down = Estimate::of(&downs);
        Some(FrontSummary {
            n,
            ell: first.ell,
            replicas: recs.len() as u64,
            mean_length: len.mean,
            mean_length_se: len.stderr,
            var_length: var.mean,
            var_length_se: var.stderr,
            relative_fluctuation: var.mean.sqrt() / len.mean,
            mean_std_height: width.mean,
            mean_std_height_se: width.stderr,
            mean_u_plus: up.mean,
            mean_u_plus_se: up.stderr,
            mean_u_minus: down.mean,
            mean_u_minus_se: down.stderr,
            unique_fraction: recs.iter().filter(|r| r.unique).count() as f64 / recs.len() as f64,
        })
    }

    pub fn summaries(&self) -> Vec<FrontSummary> {
        self.half_widths()
            .into_iter()
            .filter_map(|n| self.summary(n))
            .collect()
    }

    pub fn fits(&self, opts: &FitOptions) -> Result<FrontFits> {
        let s = self.summaries();
        let series = |f: &dyn Fn(&FrontSummary) -> (f64, f64)| -> Vec<(f64, f64, f64)> {
            s.iter()
                .map(|x| {
                    let (m, se) = f(x);
                    (x.n as f64, m, se)
                })
                .collect()
        };
        Ok(FrontFits {
            length: fit_scaling(&series(&|x| (x.mean_length, x.mean_length_se)), opts)?,
            width: fit_scaling(&series(&|x| (x.mean_std_height, x.mean_std_height_se)), opts)?,
            u_plus: fit_scaling(&series(&|x| (x.mean_u_plus, x.mean_u_plus_se)), opts)?,
            u_minus: fit_scaling(&series(&|x| (x.mean_u_minus, x.mean_u_minus_se)), opts)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontFits {
    pub length: ScalingFit,
    pub width: ScalingFit,
    pub u_plus: ScalingFit,
    pub u_minus: ScalingFit,
}

pub fn run_front_experiment(spec: &ExperimentSpec) -> Result<ExperimentTable> {
    run_front_experiment_range(spec, 0..spec.replicas)
}

/// Runs the replicas in `replicas` only; tables of disjoint ranges merge
/// into the table of their union.
pub fn run_front_experiment_range(
    spec: &ExperimentSpec,
    replicas: std::ops::Range<u64>,
) -> Result<ExperimentTable> {
    spec.validate()?;
    let mut table = ExperimentTable::default();
    for &n in &spec.sweep {
        let strip = StripSpec::new(n, spec.ell_rule.ell(n))?;
        for r in measure_fronts(&strip, spec.seed, replicas.clone())? {
            table.insert(r);
        }
    }
    Ok(table)
}
