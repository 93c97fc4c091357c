//! Triangular-lattice geometry in oblique coordinates.
//!
//! A site `(i, j)` sits at `i·1 + j·e^{iπ/3}` in the complex plane. Every
//! site has six neighbours; the six unit steps are listed in
//! counter-clockwise order starting from `(1, 0)`, which is what the
//! exploration walks rely on when they turn by 60 degrees.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{PercError, Result};

/// Largest coordinate magnitude accepted by [`Region::new`]. Keeps every
/// site addressable by the per-site random streams.
pub const COORD_LIMIT: i64 = 1 << 30;

/// The six unit steps, counter-clockwise, starting at angle 0.
pub const DIRECTIONS: [(i64, i64); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

/// A site of the triangular lattice in oblique coordinates.
///
/// Sites order by `(j, i)`, i.e. row-major from the bottom row up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SiteCoord {
    pub i: i64,
    pub j: i64,
}

impl SiteCoord {
    pub const ORIGIN: SiteCoord = SiteCoord { i: 0, j: 0 };

    pub const fn new(i: i64, j: i64) -> Self {
        SiteCoord { i, j }
    }

    /// Unit step number `dir` (taken modulo 6) from this site.
    #[inline]
    pub fn step(self, dir: usize) -> SiteCoord {
        let (di, dj) = DIRECTIONS[dir % 6];
        SiteCoord::new(self.i + di, self.j + dj)
    }

    /// The six neighbours in counter-clockwise order.
    #[inline]
    pub fn neighbors(self) -> [SiteCoord; 6] {
        std::array::from_fn(|d| self.step(d))
    }

    /// Infinity norm with respect to the oblique basis.
    pub fn norm(self) -> i64 {
        self.i.abs().max(self.j.abs())
    }

    pub fn distance(self, other: SiteCoord) -> i64 {
        (self - other).norm()
    }

    pub fn is_adjacent(self, other: SiteCoord) -> bool {
        direction_between(self, other).is_some()
    }
}

/// Index into [`DIRECTIONS`] of the step leading from `from` to `to`, if
/// the two sites are neighbours.
pub fn direction_between(from: SiteCoord, to: SiteCoord) -> Option<usize> {
    let d = (to.i - from.i, to.j - from.j);
    DIRECTIONS.iter().position(|&s| s == d)
}

impl Ord for SiteCoord {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.j, self.i).cmp(&(other.j, other.i))
    }
}

impl PartialOrd for SiteCoord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::ops::Add for SiteCoord {
    type Output = SiteCoord;
    fn add(self, rhs: SiteCoord) -> SiteCoord {
        SiteCoord::new(self.i + rhs.i, self.j + rhs.j)
    }
}

impl std::ops::Sub for SiteCoord {
    type Output = SiteCoord;
    fn sub(self, rhs: SiteCoord) -> SiteCoord {
        SiteCoord::new(self.i - rhs.i, self.j - rhs.j)
    }
}

impl fmt::Display for SiteCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

/// Neighbours of `z`. Free-function form of [`SiteCoord::neighbors`].
pub fn neighbors(z: SiteCoord) -> [SiteCoord; 6] {
    z.neighbors()
}

/// Parallelogram `[a1, a2] × [b1, b2]`, inclusive on all four bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Region {
    pub a1: i64,
    pub a2: i64,
    pub b1: i64,
    pub b2: i64,
}

impl Region {
    pub fn new(a1: i64, a2: i64, b1: i64, b2: i64) -> Result<Self> {
        if a1 > a2 || b1 > b2 {
            return Err(PercError::InvalidParameter(format!(
                "region [{a1}, {a2}] x [{b1}, {b2}] has inverted bounds"
            )));
        }
        if [a1, a2, b1, b2].iter().any(|c| c.abs() > COORD_LIMIT) {
            return Err(PercError::InvalidParameter(format!(
                "region [{a1}, {a2}] x [{b1}, {b2}] exceeds the coordinate limit {COORD_LIMIT}"
            )));
        }
        Ok(Region { a1, a2, b1, b2 })
    }

    /// The rhombus `[0, n] × [0, n]`.
    pub fn square(n: i64) -> Result<Self> {
        Region::new(0, n, 0, n)
    }

    pub fn width(&self) -> usize {
        (self.a2 - self.a1 + 1) as usize
    }

    pub fn height(&self) -> usize {
        (self.b2 - self.b1 + 1) as usize
    }

    pub fn len(&self) -> usize {
        self.width() * self.height()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn contains(&self, z: SiteCoord) -> bool {
        z.i >= self.a1 && z.i <= self.a2 && z.j >= self.b1 && z.j <= self.b2
    }

    pub fn contains_region(&self, other: &Region) -> bool {
        other.a1 >= self.a1 && other.a2 <= self.a2 && other.b1 >= self.b1 && other.b2 <= self.b2
    }

    #[inline]
    pub fn is_interior(&self, z: SiteCoord) -> bool {
        z.i > self.a1 && z.i < self.a2 && z.j > self.b1 && z.j < self.b2
    }

    #[inline]
    pub fn is_boundary(&self, z: SiteCoord) -> bool {
        self.contains(z) && !self.is_interior(z)
    }

    /// Interior sites as a region, or `None` when the interior is empty.
    pub fn interior(&self) -> Option<Region> {
        if self.a2 - self.a1 >= 2 && self.b2 - self.b1 >= 2 {
            Some(Region {
                a1: self.a1 + 1,
                a2: self.a2 - 1,
                b1: self.b1 + 1,
                b2: self.b2 - 1,
            })
        } else {
            None
        }
    }

    /// Row-major index (rows of constant `j`, bottom row first).
    #[inline]
    pub fn index(&self, z: SiteCoord) -> usize {
        debug_assert!(self.contains(z), "{z} outside {self:?}");
        (z.j - self.b1) as usize * self.width() + (z.i - self.a1) as usize
    }

    #[inline]
    pub fn index_checked(&self, z: SiteCoord) -> Option<usize> {
        self.contains(z).then(|| self.index(z))
    }

    #[inline]
    pub fn site_at(&self, index: usize) -> SiteCoord {
        let w = self.width();
        SiteCoord::new(self.a1 + (index % w) as i64, self.b1 + (index / w) as i64)
    }

    /// All sites in row-major order.
    pub fn sites(&self) -> impl Iterator<Item = SiteCoord> + '_ {
        (self.b1..=self.b2).flat_map(move |j| (self.a1..=self.a2).map(move |i| SiteCoord::new(i, j)))
    }

    pub fn boundary_sites(&self) -> impl Iterator<Item = SiteCoord> + '_ {
        self.sites().filter(move |&z| self.is_boundary(z))
    }
}

/// The rhombus `S_n(z)`: all sites within distance `n` of `z`.
pub fn box_region(z: SiteCoord, n: u32) -> Region {
    let n = n as i64;
    Region {
        a1: z.i - n,
        a2: z.i + n,
        b1: z.j - n,
        b2: z.j + n,
    }
}

/// Edge of the hexagonal dual lattice, identified by the two sites whose
/// cells it separates. `lo` precedes `hi` in `(j, i)` order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DualEdge {
    lo: SiteCoord,
    hi: SiteCoord,
}

impl DualEdge {
    pub fn new(a: SiteCoord, b: SiteCoord) -> Result<Self> {
        if !a.is_adjacent(b) {
            return Err(PercError::InvalidParameter(format!(
                "{a} and {b} are not neighbours"
            )));
        }
        Ok(DualEdge::between(a, b))
    }

    /// Caller guarantees adjacency.
    #[inline]
    pub(crate) fn between(a: SiteCoord, b: SiteCoord) -> Self {
        debug_assert!(a.is_adjacent(b));
        if a < b {
            DualEdge { lo: a, hi: b }
        } else {
            DualEdge { lo: b, hi: a }
        }
    }

    pub fn lo(&self) -> SiteCoord {
        self.lo
    }

    pub fn hi(&self) -> SiteCoord {
        self.hi
    }

    /// Vertical position of the edge midpoint, in rows.
    pub fn mid_height(&self) -> f64 {
        (self.lo.j + self.hi.j) as f64 / 2.0
    }
}

/// The fixed representative site `x_e` of a dual edge.
pub fn x_of_edge(e: &DualEdge) -> SiteCoord {
    e.lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    #[test]
    fn neighbors_of_origin() {
        let got: HashSet<_> = neighbors(SiteCoord::ORIGIN).into_iter().collect();
        let want: HashSet<_> = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)]
            .into_iter()
            .map(|(i, j)| SiteCoord::new(i, j))
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn neighbors_translate() {
        let z = SiteCoord::new(5, -2);
        for (a, b) in neighbors(z).iter().zip(neighbors(SiteCoord::ORIGIN)) {
            assert_eq!(*a, b + z);
            assert_eq!(z.distance(*a), 1);
        }
    }

    #[test]
    fn box_sizes() {
        let b0 = box_region(SiteCoord::ORIGIN, 0);
        assert_eq!(b0.len(), 1);
        assert_eq!(b0.sites().next(), Some(SiteCoord::ORIGIN));
        for n in 1..8u32 {
            let b = box_region(SiteCoord::new(3, -4), n);
            assert_eq!(b.len(), ((2 * n + 1) * (2 * n + 1)) as usize);
            assert_eq!(b.boundary_sites().count(), 8 * n as usize);
            assert!(b
                .boundary_sites()
                .all(|z| z.distance(SiteCoord::new(3, -4)) == n as i64));
        }
    }

    #[test]
    fn edge_representative() {
        let e = DualEdge::new(SiteCoord::new(0, 1), SiteCoord::new(0, 0)).unwrap();
        assert_eq!(x_of_edge(&e), SiteCoord::new(0, 0));
        let e = DualEdge::new(SiteCoord::new(3, 2), SiteCoord::new(4, 1)).unwrap();
        assert_eq!(x_of_edge(&e), SiteCoord::new(4, 1));
        assert!(DualEdge::new(SiteCoord::new(0, 0), SiteCoord::new(1, 1)).is_err());
    }

    #[test]
    fn region_rejects_inverted_bounds() {
        assert!(Region::new(2, 1, 0, 0).is_err());
        assert!(Region::new(0, 0, 3, 2).is_err());
        assert!(Region::new(0, COORD_LIMIT + 1, 0, 0).is_err());
    }

    #[test]
    fn index_roundtrip() {
        let r = Region::new(-3, 4, 2, 6).unwrap();
        for (k, z) in r.sites().enumerate() {
            assert_eq!(r.index(z), k);
            assert_eq!(r.site_at(k), z);
        }
    }

    fn site() -> impl Strategy<Value = SiteCoord> {
        (-50i64..50, -50i64..50).prop_map(|(i, j)| SiteCoord::new(i, j))
    }

    proptest! {
        #[test]
        fn neighbor_symmetry(z in site(), w in site()) {
            let zw = neighbors(z).contains(&w);
            let wz = neighbors(w).contains(&z);
            prop_assert_eq!(zw, wz);
        }

        #[test]
        fn metric_axioms(a in site(), b in site(), c in site()) {
            prop_assert_eq!(a.distance(b), b.distance(a));
            prop_assert_eq!(a.distance(b) == 0, a == b);
            prop_assert!(a.distance(c) <= a.distance(b) + b.distance(c));
        }

        #[test]
        fn box_nesting(z in site(), w in site(), m in 0u32..10, n in 0u32..10) {
            let (m, n) = (m.min(n), m.max(n));
            let small = box_region(z, m);
            let big = box_region(z, n);
            prop_assert!(big.contains_region(&small));
            prop_assert_eq!(big.contains(w), z.distance(w) <= n as i64);
            if m != n {
                prop_assert!(!(small.is_boundary(w) && big.is_boundary(w)));
            }
        }

        #[test]
        fn interior_and_boundary_partition(a1 in -5i64..5, w in 0i64..6, b1 in -5i64..5, h in 0i64..6) {
            let r = Region::new(a1, a1 + w, b1, b1 + h).unwrap();
            for z in r.sites() {
                prop_assert!(r.is_interior(z) ^ r.is_boundary(z));
            }
            let inner = r.interior().map_or(0, |q| q.len());
            prop_assert_eq!(inner + r.boundary_sites().count(), r.len());
        }

        #[test]
        fn dual_edge_canonical(z in site(), d in 0usize..6) {
            let w = z.step(d);
            let e = DualEdge::new(z, w).unwrap();
            prop_assert_eq!(e, DualEdge::new(w, z).unwrap());
            prop_assert!(e.lo() < e.hi());
            prop_assert!(e.hi().is_adjacent(e.lo()));
        }
    }
}
