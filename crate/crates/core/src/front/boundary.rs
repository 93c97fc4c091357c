//! Outer (accessible) boundaries of the front.
//!
//! The upper boundary is the lowest self-avoiding vacant crossing of the
//! strip. It is read off the vacant side of the lowest-vacant-crossing walk
//! and loop-erased, which removes the fjords the walk enters and leaves
//! through a one-site passage. The lower boundary is the mirror image:
//! the highest self-avoiding occupied crossing, from the occupied side of
//! the highest-occupied-crossing walk.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{PercError, Result};
use crate::front::exploration::{highest_occupied_crossing, lowest_vacant_crossing};
use crate::front::strip_of;
use crate::lattice::SiteCoord;
use crate::sampling::Configuration;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundarySide {
    Upper,
    Lower,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryResult {
    pub side: BoundarySide,
    /// Self-avoiding site path from the left side to the right side.
    pub sites: Vec<SiteCoord>,
    /// Number of sites on the path (`U_N^+` or `U_N^−`).
    pub length: usize,
}

/// Chronological loop erasure of a nearest-neighbour site walk.
pub fn loop_erase(walk: impl IntoIterator<Item = SiteCoord>) -> Vec<SiteCoord> {
    let mut path: Vec<SiteCoord> = Vec::new();
    let mut position: HashMap<SiteCoord, usize> = HashMap::new();
    for z in walk {
        if let Some(&k) = position.get(&z) {
            for removed in path.drain(k + 1..) {
                position.remove(&removed);
            }
        } else {
            position.insert(z, path.len());
            path.push(z);
        }
    }
    path
}

pub fn outer_boundary(c: &Configuration, side: BoundarySide) -> Result<BoundaryResult> {
    strip_of(c)?;
    let sites = match side {
        BoundarySide::Upper => loop_erase(lowest_vacant_crossing(c)?.vacant_sites()),
        BoundarySide::Lower => loop_erase(highest_occupied_crossing(c)?.occupied_sites()),
    };
    if sites.is_empty() {
        return Err(PercError::NoBoundary(format!(
            "no {side:?} boundary crossing found"
        )));
    }
    Ok(BoundaryResult {
        side,
        length: sites.len(),
        sites,
    })
}
