use serde::{Deserialize, Serialize};

use crate::connectivity::{crossing_tally, Color, CrossingQuery, Orientation, Tally};
use crate::error::{PercError, Result};
use crate::lattice::Region;
use crate::sampling::ProbabilityField;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharLengthParams {
    pub eps0: f64,
    /// Configurations per probe.
    pub samples: u64,
    /// A probe counts as below threshold when `estimate + z·stderr ≤ eps0`.
    pub confidence: f64,
    /// Largest side length probed before giving up.
    pub max_n: u32,
}

impl Default for CharLengthParams {
    fn default() -> Self {
        CharLengthParams {
            eps0: 0.05,
            samples: 2000,
            confidence: 4.0,
            max_n: 4096,
        }
    }
}

impl CharLengthParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps0 > 0.0 && self.eps0 < 0.5) {
            return Err(PercError::InvalidParameter(format!(
                "eps0 = {} not in (0, 1/2)",
                self.eps0
            )));
        }
        if self.samples == 0 {
            return Err(PercError::InvalidParameter("samples must be >= 1".into()));
        }
        if self.confidence.is_nan() || self.confidence < 0.0 {
            return Err(PercError::InvalidParameter(
                "confidence multiplier must be >= 0".into(),
            ));
        }
        if self.max_n < 4 {
            return Err(PercError::InvalidParameter("max_n must be >= 4".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub n: u32,
    pub tally: Tally,
    pub below: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharLength {
    pub p: f64,
    /// `L(p, ε₀)`, or the probe cap when the threshold was never reached.
    pub length: u32,
    pub beyond_horizon: bool,
    /// Estimates at `L − 1` and `L` (absent for `L − 1` below the first probe).
    pub at_previous: Option<Tally>,
    pub at_length: Option<Tally>,
    pub probes: Vec<Probe>,
}

/// Crossing probability of the rhombus `[0, n] × [0, n]` in the colour that
/// is subcritical at `p`: occupied for `p < 1/2`, vacant otherwise.
pub fn crossing_estimate(p: f64, n: u32, samples: u64, seed: u64) -> Result<Tally> {
    let field = ProbabilityField::homogeneous(p)?;
    let color = if p < 0.5 { Color::Occupied } else { Color::Vacant };
    let q = CrossingQuery::new(Region::square(n as i64)?, Orientation::Horizontal, color)?;
    crossing_tally(&field, &q, 0..samples, seed)
}

/// `L(p, ε₀)`: doubling from `n = 4` until a probe falls below the
/// threshold, then bisection between the last two probes. Every probe reuses
/// the same replicas, so probes at different `n` (and at different `p`)
/// share their random numbers.
pub fn characteristic_length(p: f64, params: &CharLengthParams, seed: u64) -> Result<CharLength> {
    params.validate()?;
    ProbabilityField::homogeneous(p)?;
    let mut probes: Vec<Probe> = Vec::new();
    let probe = |n: u32, probes: &mut Vec<Probe>| -> Result<bool> {
        if let Some(done) = probes.iter().find(|q| q.n == n) {
            return Ok(done.below);
        }
        let tally = crossing_estimate(p, n, params.samples, seed)?;
        let below = tally.estimate() + params.confidence * tally.stderr() <= params.eps0;
        probes.push(Probe { n, tally, below });
        Ok(below)
    };
    let horizon = |probes: Vec<Probe>| CharLength {
        p,
        length: params.max_n,
        beyond_horizon: true,
        at_previous: None,
        at_length: None,
        probes,
    };
    if p == 0.5 {
        return Ok(horizon(probes));
    }
    let mut lo = 0u32;
    let mut hi = 4u32;
    loop {
        if probe(hi, &mut probes)? {
            break;
        }
        if hi >= params.max_n {
            return Ok(horizon(probes));
        }
        lo = hi;
        hi = (2 * hi).min(params.max_n);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if probe(mid, &mut probes)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let at = |n: u32| probes.iter().find(|q| q.n == n).map(|q| q.tally);
    Ok(CharLength {
        p,
        length: hi,
        beyond_horizon: false,
        at_previous: at(hi - 1),
        at_length: at(hi),
        probes: probes.clone(),
    })
}
