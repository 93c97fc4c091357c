use serde::{Deserialize, Serialize};

use crate::error::{PercError, Result};
use crate::front::FrontResult;
use crate::sampling::StripSpec;

/// Width exponent of the front: heights spread over `N^{4/7}` rows.
pub const WIDTH_EXPONENT: f64 = 4.0 / 7.0;

/// Height statistics of a front, in raw lattice rows measured from `y = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontStats {
    pub length: usize,
    pub mean_height: f64,
    pub std_height: f64,
    pub min_height: f64,
    pub max_height: f64,
    /// `N^{4/7+δ}`
    pub outer_band: f64,
    /// `N^{4/7−δ}`
    pub inner_band: f64,
    abs_heights: Vec<f64>,
}

impl FrontStats {
    /// Fraction of front edges whose height exceeds `band_halfwidth` in
    /// absolute value.
    pub fn fraction_outside(&self, band_halfwidth: f64) -> f64 {
        let inside = self.abs_heights.partition_point(|&h| h <= band_halfwidth);
        (self.abs_heights.len() - inside) as f64 / self.abs_heights.len() as f64
    }

    pub fn fraction_outside_outer_band(&self) -> f64 {
        self.fraction_outside(self.outer_band)
    }

    /// Whether some front edge leaves the band `[±N^{4/7−δ}]`.
    pub fn escapes_inner_band(&self) -> bool {
        self.fraction_outside(self.inner_band) > 0.0
    }
}

pub fn front_stats(f: &FrontResult, spec: &StripSpec, delta: f64) -> Result<FrontStats> {
    if f.edges.is_empty() {
        return Err(PercError::InvalidInput("front has no edges".into()));
    }
    if f.spec != *spec {
        return Err(PercError::InvalidInput(format!(
            "front extracted on {:?}, not {spec:?}",
            f.spec
        )));
    }
    let heights: Vec<f64> = f.edges.iter().map(|e| e.mid_height()).collect();
    let n = heights.len() as f64;
    let mean = heights.iter().sum::<f64>() / n;
    let var = heights.iter().map(|h| (h - mean).powi(2)).sum::<f64>() / n;
    let mut abs_heights: Vec<f64> = heights.iter().map(|h| h.abs()).collect();
    abs_heights.sort_by(f64::total_cmp);
    let big_n = spec.half_width as f64;
    Ok(FrontStats {
        length: f.length,
        mean_height: mean,
        std_height: var.sqrt(),
        min_height: heights.iter().copied().fold(f64::INFINITY, f64::min),
        max_height: heights.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        outer_band: big_n.powf(WIDTH_EXPONENT + delta),
        inner_band: big_n.powf(WIDTH_EXPONENT - delta),
        abs_heights,
    })
}
