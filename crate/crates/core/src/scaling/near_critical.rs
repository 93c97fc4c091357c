//! Consistency checks between near-critical and critical quantities.
//!
//! For each subcritical `p` the report measures
//! (a) `|p − 1/2| · L(p)² · P_{1/2}(A⁴(4, L(p)))`, which should vary only by
//!     a bounded factor across `p`;
//! (b) the crossing probability at `n = L, 2L, 3L`, which should decay at
//!     least like `e^{−n/L}`;
//! (c) `L(p, ε₀/2) / L(p, ε₀)`, which should stay bounded;
//! (d) `P_p(Γ₂(0, S_L)) / P_{1/2}(Γ₂(0, S_L))`, which should stay bounded.
//!
//! The gates are empirical and supplied by the caller.

use serde::{Deserialize, Serialize};

use crate::arms::{arm_probability, two_arm_probability, ArmQuery};
use crate::connectivity::Tally;
use crate::error::{PercError, Result};
use crate::lattice::SiteCoord;
use crate::scaling::charlen::{characteristic_length, crossing_estimate, CharLengthParams};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearCriticalGates {
    /// Upper bound on max/min of the product in (a).
    pub product_ratio_max: f64,
    /// Lower bound on `P(C_H at L) / P(C_H at 3L)`.
    pub decay_factor_min: f64,
    /// Bounds on the length ratio in (c).
    pub eps_ratio: (f64, f64),
    /// Bounds on the two-arm ratio in (d).
    pub two_arm_ratio: (f64, f64),
}

impl Default for NearCriticalGates {
    fn default() -> Self {
        NearCriticalGates {
            product_ratio_max: 4.0,
            decay_factor_min: std::f64::consts::E,
            eps_ratio: (1.0, 8.0),
            two_arm_ratio: (0.25, 4.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearCriticalParams {
    pub charlen: CharLengthParams,
    pub arm_samples: u64,
    pub decay_samples: u64,
    pub two_arm_samples: u64,
    pub gates: NearCriticalGates,
}

impl Default for NearCriticalParams {
    fn default() -> Self {
        NearCriticalParams {
            charlen: CharLengthParams::default(),
            arm_samples: 4000,
            decay_samples: 4000,
            two_arm_samples: 4000,
            gates: NearCriticalGates::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearCriticalRow {
    pub p: f64,
    pub length: u32,
    pub length_half_eps: u32,
    pub four_arm: Tally,
    pub product: f64,
    /// Crossing tallies at `n = L, 2L, 3L`.
    pub decay: [Tally; 3],
    /// `P(L) / P(3L)`, with `P(3L)` replaced by `3/trials` when it has no hits.
    pub decay_factor: f64,
    pub eps_ratio: f64,
    pub two_arm_near: Tally,
    pub two_arm_critical: Tally,
    pub two_arm_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateCheck {
    pub name: String,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub pass: bool,
}

impl GateCheck {
    fn new(name: String, value: f64, lo: f64, hi: f64) -> Self {
        GateCheck {
            name,
            value,
            lo,
            hi,
            pass: lo <= value && value <= hi,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearCriticalReport {
    pub rows: Vec<NearCriticalRow>,
    pub checks: Vec<GateCheck>,
    pub pass: bool,
}

pub fn measure_row(p: f64, params: &NearCriticalParams, seed: u64) -> Result<NearCriticalRow> {
    if !(p > 0.0 && p < 0.5) {
        return Err(PercError::InvalidParameter(format!("p = {p} is not subcritical")));
    }
    let lp = characteristic_length(p, &params.charlen, seed)?;
    let half = CharLengthParams {
        eps0: params.charlen.eps0 / 2.0,
        ..params.charlen
    };
    let lh = characteristic_length(p, &half, seed)?;
    if lp.beyond_horizon || lh.beyond_horizon {
        return Err(PercError::InvalidParameter(format!(
            "L({p}) is beyond the probe horizon {}",
            params.charlen.max_n
        )));
    }
    let l = lp.length;
    if l <= 4 {
        return Err(PercError::InvalidParameter(format!(
            "L({p}) = {l} is too small for the four-arm annulus"
        )));
    }
    let four_arm = arm_probability(
        0.5,
        &ArmQuery::new(SiteCoord::ORIGIN, 4, l, 4)?,
        params.arm_samples,
        seed,
    )?;
    let product = (p - 0.5).abs() * (l as f64).powi(2) * four_arm.estimate();
    let decay = [
        crossing_estimate(p, l, params.decay_samples, seed)?,
        crossing_estimate(p, 2 * l, params.decay_samples, seed)?,
        crossing_estimate(p, 3 * l, params.decay_samples, seed)?,
    ];
    // With no hits at 3L, 3/trials is a 95% upper bound on P(3L).
    let far = decay[2].estimate().max(if decay[2].successes == 0 {
        3.0 / decay[2].trials as f64
    } else {
        0.0
    });
    let decay_factor = decay[0].estimate() / far;
    let two_arm_near = two_arm_probability(p, l, params.two_arm_samples, seed)?;
    let two_arm_critical = two_arm_probability(0.5, l, params.two_arm_samples, seed)?;
    Ok(NearCriticalRow {
        p,
        length: l,
        length_half_eps: lh.length,
        four_arm,
        product,
        decay,
        decay_factor,
        eps_ratio: lh.length as f64 / l as f64,
        two_arm_near,
        two_arm_critical,
        two_arm_ratio: two_arm_near.estimate() / two_arm_critical.estimate(),
    })
}

pub fn check_near_critical_relations(
    p_list: &[f64],
    params: &NearCriticalParams,
    seed: u64,
) -> Result<NearCriticalReport> {
    if p_list.len() < 2 {
        return Err(PercError::InsufficientData(
            "need at least two values of p".into(),
        ));
    }
    let rows = p_list
        .iter()
        .map(|&p| measure_row(p, params, seed))
        .collect::<Result<Vec<_>>>()?;
    let g = &params.gates;
    let products: Vec<f64> = rows.iter().map(|r| r.product).collect();
    let max = products.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = products.iter().copied().fold(f64::INFINITY, f64::min);
    let mut checks = vec![GateCheck::new(
        "product max/min".into(),
        max / min,
        1.0,
        g.product_ratio_max,
    )];
    for r in &rows {
        checks.push(GateCheck::new(
            format!("decay P(L)/P(3L) at p={}", r.p),
            r.decay_factor,
            g.decay_factor_min,
            f64::MAX,
        ));
        checks.push(GateCheck::new(
            format!("L(eps0/2)/L(eps0) at p={}", r.p),
            r.eps_ratio,
            g.eps_ratio.0,
            g.eps_ratio.1,
        ));
        checks.push(GateCheck::new(
            format!("two-arm ratio at p={}", r.p),
            r.two_arm_ratio,
            g.two_arm_ratio.0,
            g.two_arm_ratio.1,
        ));
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(NearCriticalReport { rows, checks, pass })
}
