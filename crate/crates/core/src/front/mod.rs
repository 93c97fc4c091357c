//! The gradient-percolation front and its outer boundaries.
//!
//! On a strip whose bottom row is occupied and top row vacant, the front is
//! the set of dual edges from which two arms start: one occupied arm to the
//! bottom row and one vacant arm to the top row. It is computed from the two
//! clusters directly; the exploration walks in [`exploration`] trace the
//! extremal interfaces `ρ_N` and `ρ_N*` independently, and the front is
//! unique exactly when the two walks coincide.

pub mod boundary;
pub mod exploration;
pub mod stats;

use serde::{Deserialize, Serialize};

use crate::connectivity::flood;
use crate::error::{PercError, Result};
use crate::lattice::{DualEdge, Region, SiteCoord};
use crate::sampling::{Configuration, StripSpec};

pub use boundary::{outer_boundary, BoundaryResult, BoundarySide};
pub use exploration::{highest_occupied_crossing, lowest_vacant_crossing, DualPath, InterfaceEdge};
pub use stats::{front_stats, FrontStats};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontResult {
    pub spec: StripSpec,
    /// Front edges, sorted.
    pub edges: Vec<DualEdge>,
    pub length: usize,
    pub unique: bool,
    /// `ρ_N`
    pub rho_upper: DualPath,
    /// `ρ_N*`
    pub rho_lower: DualPath,
    /// Midpoint heights of the front edges, grouped by the column of each
    /// edge's representative site.
    pub height_profile: Vec<Vec<f64>>,
}

/// Checks that `c` lives on a strip with an occupied bottom row and a
/// vacant top row.
pub fn strip_of(c: &Configuration) -> Result<StripSpec> {
    let spec = StripSpec::from_region(c.region())?;
    let r = spec.region();
    for i in r.a1..=r.a2 {
        if !c.is_occupied(SiteCoord::new(i, r.b1)) || c.is_occupied(SiteCoord::new(i, r.b2)) {
            return Err(PercError::InvalidInput(format!(
                "column {i}: strip rows -N/+N must be occupied/vacant"
            )));
        }
    }
    Ok(spec)
}

fn row(r: &Region, j: i64) -> impl Iterator<Item = SiteCoord> + '_ {
    (r.a1..=r.a2).map(move |i| SiteCoord::new(i, j))
}

/// Sites of the occupied cluster of the bottom row and of the vacant
/// cluster of the top row.
pub fn spanning_clusters(c: &Configuration) -> (Vec<bool>, Vec<bool>) {
    let r = *c.region();
    let bottom = flood(&r, row(&r, r.b1), |k| c.occupied_at(k));
    let top = flood(&r, row(&r, r.b2), |k| !c.occupied_at(k));
    (bottom, top)
}

/// Two-arm edges between the bottom occupied and the top vacant clusters.
pub fn front_edges(c: &Configuration) -> Vec<DualEdge> {
    let r = *c.region();
    let (bottom, top) = spanning_clusters(c);
    let mut edges = Vec::new();
    for (k, _) in bottom.iter().enumerate().filter(|(_, &b)| b) {
        let z = r.site_at(k);
        for w in z.neighbors() {
            if let Some(wk) = r.index_checked(w) {
                if top[wk] {
                    edges.push(DualEdge::between(z, w));
                }
            }
        }
    }
    edges.sort_unstable();
    edges
}

pub fn extract_front(c: &Configuration) -> Result<FrontResult> {
    let spec = strip_of(c)?;
    let edges = front_edges(c);
    let rho_upper = highest_occupied_crossing(c)?;
    let rho_lower = lowest_vacant_crossing(c)?;
    let unique = rho_upper == rho_lower;
    let mut height_profile = vec![Vec::new(); spec.ell as usize + 1];
    for e in &edges {
        height_profile[e.lo().i as usize].push(e.mid_height());
    }
    Ok(FrontResult {
        spec,
        length: edges.len(),
        edges,
        unique,
        rho_upper,
        rho_lower,
        height_profile,
    })
}

/// Whether `ρ_N` and `ρ_N*` coincide.
pub fn check_uniqueness(c: &Configuration) -> Result<bool> {
    strip_of(c)?;
    Ok(highest_occupied_crossing(c)? == lowest_vacant_crossing(c)?)
}

/// Front edges as `[i1, j1, i2, j2]` rows, for rendering.
pub fn edge_dump(edges: &[DualEdge]) -> Vec<[i64; 4]> {
    edges
        .iter()
        .map(|e| [e.lo().i, e.lo().j, e.hi().i, e.hi().j])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::sample;
    use std::collections::BTreeSet;

    fn flat(n: u32, ell: u32) -> Configuration {
        let r = StripSpec::new(n, ell).unwrap().region();
        Configuration::from_fn(r, |z| z.j <= 0)
    }

    /// Front of the flat interface, enumerated by hand: each column `i`
    /// contributes the pair ((i,0),(i,1)) and, for i >= 1, ((i,0),(i-1,1)).
    fn flat_front_by_hand(ell: i64) -> BTreeSet<DualEdge> {
        let mut set = BTreeSet::new();
        for i in 0..=ell {
            set.insert(DualEdge::new(SiteCoord::new(i, 0), SiteCoord::new(i, 1)).unwrap());
            if i >= 1 {
                set.insert(DualEdge::new(SiteCoord::new(i, 0), SiteCoord::new(i - 1, 1)).unwrap());
            }
        }
        set
    }

    #[test]
    fn flat_interface_front() {
        let c = flat(4, 6);
        let f = extract_front(&c).unwrap();
        let by_hand = flat_front_by_hand(6);
        assert_eq!(by_hand.len(), 13);
        assert_eq!(f.length, 13);
        assert_eq!(f.edges.iter().copied().collect::<BTreeSet<_>>(), by_hand);
        assert!(f.unique);
        assert_eq!(f.rho_upper.dual_edges().collect::<BTreeSet<_>>(), by_hand);
    }

    #[test]
    fn flat_interface_walk_by_hand() {
        // Four columns: the walk enters between (0,1) and (0,0), then zig-zags
        // (0,1)|(1,0), (1,1)|(1,0), (1,1)|(2,0), ... and leaves after (3,1)|(3,0).
        let c = flat(3, 3);
        let rho = highest_occupied_crossing(&c).unwrap();
        let mut want = vec![InterfaceEdge {
            vacant: SiteCoord::new(0, 1),
            occupied: SiteCoord::new(0, 0),
        }];
        for i in 1..=3 {
            want.push(InterfaceEdge {
                vacant: SiteCoord::new(i - 1, 1),
                occupied: SiteCoord::new(i, 0),
            });
            want.push(InterfaceEdge {
                vacant: SiteCoord::new(i, 1),
                occupied: SiteCoord::new(i, 0),
            });
        }
        assert_eq!(rho.steps, want);
        assert_eq!(lowest_vacant_crossing(&c).unwrap(), rho);
    }

    #[test]
    fn all_occupied_front_hugs_top() {
        let spec = StripSpec::new(5, 7).unwrap();
        let c = Configuration::from_fn(spec.region(), |z| z.j < 5);
        let f = extract_front(&c).unwrap();
        assert!(f.unique);
        assert!(f.edges.iter().all(|e| e.hi().j == 5 && e.lo().j == 4));
        let rho = highest_occupied_crossing(&c).unwrap();
        assert!(rho.vacant_sites().all(|z| z.j == 5));
    }

    #[test]
    fn all_vacant_interior_lowest_crossing_on_bottom() {
        let spec = StripSpec::new(5, 7).unwrap();
        let c = Configuration::from_fn(spec.region(), |z| z.j == -5);
        let rho = lowest_vacant_crossing(&c).unwrap();
        assert!(rho.occupied_sites().all(|z| z.j == -5));
        assert!(check_uniqueness(&c).unwrap());
    }

    #[test]
    fn layered_configuration_has_two_fronts() {
        let spec = StripSpec::new(6, 5).unwrap();
        let c = Configuration::from_fn(spec.region(), |z| z.j <= 0 || z.j == 2);
        let upper = highest_occupied_crossing(&c).unwrap();
        let lower = lowest_vacant_crossing(&c).unwrap();
        assert!(upper.occupied_sites().all(|z| z.j == 2));
        assert!(upper.vacant_sites().all(|z| z.j == 3));
        assert!(lower.occupied_sites().all(|z| z.j == 0));
        assert!(lower.vacant_sites().all(|z| z.j == 1));
        assert!(!check_uniqueness(&c).unwrap());
        let f = extract_front(&c).unwrap();
        assert!(!f.unique);
        // Neither row 0 nor row 2 touches both spanning clusters.
        assert_eq!(f.length, 0);
    }

    #[test]
    fn rejects_non_strip_input() {
        let spec = StripSpec::new(4, 4).unwrap();
        let c = Configuration::from_fn(spec.region(), |_| true);
        assert!(matches!(extract_front(&c), Err(PercError::InvalidInput(_))));
        let off = Configuration::from_fn(Region::new(1, 5, -4, 4).unwrap(), |z| z.j < 0);
        assert!(extract_front(&off).is_err());
    }

    #[test]
    fn random_fronts_are_consistent() {
        for n in [8u32, 16, 32] {
            let spec = StripSpec::new(n, 2 * n).unwrap();
            for rep in 0..40 {
                let c = sample(&spec.field(), spec.region(), 11, rep);
                let f = extract_front(&c).unwrap();
                let (bottom, top) = spanning_clusters(&c);
                let r = spec.region();
                for e in &f.edges {
                    let (a, b) = (r.index(e.lo()), r.index(e.hi()));
                    assert!((bottom[a] && top[b]) || (bottom[b] && top[a]));
                }
                if f.unique {
                    let walk: BTreeSet<_> = f.rho_upper.dual_edges().collect();
                    assert_eq!(walk.len(), f.rho_upper.len());
                    assert_eq!(walk, f.edges.iter().copied().collect());
                    assert!(f.length >= spec.ell as usize);
                }
                assert_eq!(f.length > 0, f.unique);
            }
        }
    }
}
