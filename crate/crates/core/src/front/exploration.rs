//! Exploration walks along the occupied/vacant interface of a strip.
//!
//! The walk lives on the hexagonal dual lattice. Its state is a directed
//! edge with a vacant cell on the left and an occupied cell on the right;
//! at each step it looks at the third cell touching the edge's head and
//! turns 60 degrees towards or away from it depending on that cell's
//! colour. Cells outside the strip get a fixed exterior colouring that
//! decides which interface is traced; the edges that touch the exterior
//! are dropped, so the strip's left and right sides behave as transparent.

use serde::{Deserialize, Serialize};

use crate::error::{PercError, Result};
use crate::lattice::{direction_between, DualEdge, Region, SiteCoord};
use crate::sampling::Configuration;

/// One step of an interface: the edge between a vacant and an occupied cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InterfaceEdge {
    pub vacant: SiteCoord,
    pub occupied: SiteCoord,
}

impl InterfaceEdge {
    pub fn dual_edge(&self) -> DualEdge {
        DualEdge::between(self.vacant, self.occupied)
    }
}

/// A path on the dual lattice, traversed from the left side to the right
/// side with vacant cells on its left (above) and occupied cells on its
/// right (below).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualPath {
    pub steps: Vec<InterfaceEdge>,
}

impl DualPath {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn dual_edges(&self) -> impl Iterator<Item = DualEdge> + '_ {
        self.steps.iter().map(InterfaceEdge::dual_edge)
    }

    pub fn vacant_sites(&self) -> impl Iterator<Item = SiteCoord> + '_ {
        self.steps.iter().map(|e| e.vacant)
    }

    pub fn occupied_sites(&self) -> impl Iterator<Item = SiteCoord> + '_ {
        self.steps.iter().map(|e| e.occupied)
    }
}

/// Which extremal interface to trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Extremal {
    /// Upper boundary of the highest occupied crossing: starts top-left,
    /// the exterior is vacant above the strip and occupied elsewhere.
    HighestOccupied,
    /// Lower boundary of the lowest vacant crossing: starts bottom-left,
    /// the exterior is occupied below the strip and vacant elsewhere.
    LowestVacant,
}

struct Walk<'a> {
    c: &'a Configuration,
    region: Region,
    kind: Extremal,
}

impl Walk<'_> {
    #[inline]
    fn occupied(&self, z: SiteCoord) -> bool {
        if let Some(k) = self.region.index_checked(z) {
            return self.c.occupied_at(k);
        }
        match self.kind {
            Extremal::HighestOccupied => z.j <= self.region.b2,
            Extremal::LowestVacant => z.j < self.region.b1,
        }
    }

    fn run(&self) -> Result<DualPath> {
        let r = self.region;
        let (mut vacant, mut occupied) = match self.kind {
            Extremal::HighestOccupied => (SiteCoord::new(r.a1 - 1, r.b2 + 1), SiteCoord::new(r.a1 - 1, r.b2)),
            Extremal::LowestVacant => (SiteCoord::new(r.a1 - 1, r.b1), SiteCoord::new(r.a1, r.b1 - 1)),
        };
        let mut dir = direction_between(vacant, occupied).expect("start cells are adjacent");
        let mut steps = Vec::new();
        let cap = 6 * r.len() + 64;
        for _ in 0..cap {
            let ahead = vacant.step(dir + 1);
            if self.occupied(ahead) {
                occupied = ahead;
                dir = (dir + 1) % 6;
            } else {
                vacant = ahead;
                dir = (dir + 5) % 6;
            }
            // The exterior cell on the strip's sides is the occupied one for
            // the top-down walk and the vacant one for the bottom-up walk.
            let side_cell = match self.kind {
                Extremal::HighestOccupied => occupied,
                Extremal::LowestVacant => vacant,
            };
            if side_cell.i > r.a2 {
                return Ok(DualPath { steps });
            }
            if side_cell.i < r.a1 {
                steps.clear();
                continue;
            }
            if r.contains(vacant) && r.contains(occupied) {
                steps.push(InterfaceEdge { vacant, occupied });
            } else {
                let escaped = match self.kind {
                    Extremal::HighestOccupied => occupied.j < r.b1,
                    Extremal::LowestVacant => vacant.j > r.b2,
                };
                if escaped {
                    return Err(PercError::NoCrossing(
                        "exploration left the strip before reaching the right side".into(),
                    ));
                }
            }
        }
        Err(PercError::NoCrossing(
            "exploration walk did not reach the right side".into(),
        ))
    }
}

/// `ρ_N`: the dual path bordering the highest occupied left-right crossing
/// from above, found by exploring from the strip's top-left corner.
pub fn highest_occupied_crossing(c: &Configuration) -> Result<DualPath> {
    Walk {
        c,
        region: *c.region(),
        kind: Extremal::HighestOccupied,
    }
    .run()
}

/// `ρ_N*`: the dual path bordering the lowest vacant left-right crossing
/// from below, found by exploring from the strip's bottom-left corner.
pub fn lowest_vacant_crossing(c: &Configuration) -> Result<DualPath> {
    Walk {
        c,
        region: *c.region(),
        kind: Extremal::LowestVacant,
    }
    .run()
}
