//! Cluster labelling, crossing events and crossing-probability estimates.
//!
//! Crossings follow the relaxed-endpoint convention: a horizontal crossing
//! of `R` is a path from the left side to the right side whose sites, except
//! its two extremities, lie in the interior of `R` and have the queried
//! colour. The extremities themselves may have any colour.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{PercError, Result};
use crate::lattice::{Region, SiteCoord};
use crate::sampling::{sample, Configuration, ProbabilityField};
use crate::union_find::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Color {
    Occupied,
    Vacant,
}

impl Color {
    #[inline]
    pub fn matches(self, occupied: bool) -> bool {
        occupied == (self == Color::Occupied)
    }

    pub fn opposite(self) -> Color {
        match self {
            Color::Occupied => Color::Vacant,
            Color::Vacant => Color::Occupied,
        }
    }

    pub fn of(occupied: bool) -> Color {
        if occupied {
            Color::Occupied
        } else {
            Color::Vacant
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// Cluster label per site; `-1` marks sites of the other colour.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterLabels {
    region: Region,
    labels: Vec<i64>,
    count: usize,
}

impl ClusterLabels {
    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn label(&self, z: SiteCoord) -> Option<usize> {
        let l = self.labels[self.region.index(z)];
        (l >= 0).then_some(l as usize)
    }

    pub fn raw(&self) -> &[i64] {
        &self.labels
    }

    pub fn cluster_count(&self) -> usize {
        self.count
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count];
        for &l in &self.labels {
            if l >= 0 {
                sizes[l as usize] += 1;
            }
        }
        sizes
    }
}

/// Labels the clusters of `color` under six-neighbour adjacency inside the
/// configuration's region. Labels are dense and numbered in row-major order
/// of each cluster's first site.
pub fn label_clusters(c: &Configuration, color: Color) -> ClusterLabels {
    let region = *c.region();
    let mut uf = UnionFind::new(region.len());
    for (k, z) in region.sites().enumerate() {
        if !color.matches(c.occupied_at(k)) {
            continue;
        }
        // Three forward neighbours are enough to see every edge once.
        for d in [0, 1, 2] {
            if let Some(w) = region.index_checked(z.step(d)) {
                if color.matches(c.occupied_at(w)) {
                    uf.union(k, w);
                }
            }
        }
    }
    let mut root_label = vec![-1i64; region.len()];
    let mut labels = vec![-1i64; region.len()];
    let mut count = 0usize;
    for (k, label) in labels.iter_mut().enumerate() {
        if !color.matches(c.occupied_at(k)) {
            continue;
        }
        let r = uf.find(k);
        if root_label[r] < 0 {
            root_label[r] = count as i64;
            count += 1;
        }
        *label = root_label[r];
    }
    ClusterLabels {
        region,
        labels,
        count,
    }
}

/// Breadth-first reference implementation of [`label_clusters`].
pub fn label_clusters_bfs(c: &Configuration, color: Color) -> ClusterLabels {
    let region = *c.region();
    let mut labels = vec![-1i64; region.len()];
    let mut count = 0usize;
    let mut queue = VecDeque::new();
    for start in 0..region.len() {
        if labels[start] >= 0 || !color.matches(c.occupied_at(start)) {
            continue;
        }
        labels[start] = count as i64;
        queue.push_back(start);
        while let Some(k) = queue.pop_front() {
            for w in region.site_at(k).neighbors() {
                if let Some(wk) = region.index_checked(w) {
                    if labels[wk] < 0 && color.matches(c.occupied_at(wk)) {
                        labels[wk] = count as i64;
                        queue.push_back(wk);
                    }
                }
            }
        }
        count += 1;
    }
    ClusterLabels {
        region,
        labels,
        count,
    }
}

/// Sites reachable from `seeds` through sites accepted by `passable`, all
/// inside `region`. Seeds are included only if passable.
pub fn flood(
    region: &Region,
    seeds: impl IntoIterator<Item = SiteCoord>,
    passable: impl Fn(usize) -> bool,
) -> Vec<bool> {
    let mut seen = vec![false; region.len()];
    let mut stack = Vec::new();
    for s in seeds {
        if let Some(k) = region.index_checked(s) {
            if !seen[k] && passable(k) {
                seen[k] = true;
                stack.push(k);
            }
        }
    }
    while let Some(k) = stack.pop() {
        for w in region.site_at(k).neighbors() {
            if let Some(wk) = region.index_checked(w) {
                if !seen[wk] && passable(wk) {
                    seen[wk] = true;
                    stack.push(wk);
                }
            }
        }
    }
    seen
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingQuery {
    pub region: Region,
    pub orientation: Orientation,
    pub color: Color,
}

impl CrossingQuery {
    pub fn new(region: Region, orientation: Orientation, color: Color) -> Result<Self> {
        let span = match orientation {
            Orientation::Horizontal => region.a2 - region.a1,
            Orientation::Vertical => region.b2 - region.b1,
        };
        if span < 1 {
            return Err(PercError::InvalidParameter(format!(
                "{region:?} has no extent in the {orientation:?} direction"
            )));
        }
        Ok(CrossingQuery {
            region,
            orientation,
            color,
        })
    }

    /// `(start side, end side)` membership tests.
    fn on_start(&self, z: SiteCoord) -> bool {
        let r = &self.region;
        r.contains(z)
            && match self.orientation {
                Orientation::Horizontal => z.i == r.a1,
                Orientation::Vertical => z.j == r.b1,
            }
    }

    fn on_end(&self, z: SiteCoord) -> bool {
        let r = &self.region;
        r.contains(z)
            && match self.orientation {
                Orientation::Horizontal => z.i == r.a2,
                Orientation::Vertical => z.j == r.b2,
            }
    }

    fn start_side(&self) -> Vec<SiteCoord> {
        let r = self.region;
        match self.orientation {
            Orientation::Horizontal => (r.b1..=r.b2).map(|j| SiteCoord::new(r.a1, j)).collect(),
            Orientation::Vertical => (r.a1..=r.a2).map(|i| SiteCoord::new(i, r.b1)).collect(),
        }
    }
}

fn check_inside(c: &Configuration, q: &CrossingQuery) -> Result<()> {
    if !c.region().contains_region(&q.region) {
        return Err(PercError::RegionMismatch(format!(
            "query region {:?} is not inside configuration region {:?}",
            q.region,
            c.region()
        )));
    }
    Ok(())
}

/// Whether the relaxed-endpoint crossing described by `q` exists.
///
/// Union-find over the interior sites of the queried colour, with a virtual
/// source joined to every such site touching the start side and a virtual
/// sink joined to every such site touching the end side.
pub fn has_crossing(c: &Configuration, q: &CrossingQuery) -> Result<bool> {
    check_inside(c, q)?;
    // Two extremities adjacent to each other: nothing in between to check.
    if q.start_side()
        .iter()
        .any(|&s| s.neighbors().iter().any(|&w| q.on_end(w)))
    {
        return Ok(true);
    }
    let Some(inner) = q.region.interior() else {
        return Ok(false);
    };
    let source = inner.len();
    let sink = inner.len() + 1;
    let mut uf = UnionFind::new(inner.len() + 2);
    for (k, z) in inner.sites().enumerate() {
        if !q.color.matches(c.is_occupied(z)) {
            continue;
        }
        for w in z.neighbors() {
            if let Some(wk) = inner.index_checked(w) {
                if wk > k && q.color.matches(c.is_occupied(w)) {
                    uf.union(k, wk);
                }
            } else {
                if q.on_start(w) {
                    uf.union(k, source);
                }
                if q.on_end(w) {
                    uf.union(k, sink);
                }
            }
        }
    }
    Ok(uf.connected(source, sink))
}

/// Breadth-first reference implementation of [`has_crossing`].
pub fn has_crossing_bfs(c: &Configuration, q: &CrossingQuery) -> Result<bool> {
    check_inside(c, q)?;
    let r = q.region;
    let starts = q.start_side();
    let mut seen = vec![false; r.len()];
    let mut queue: VecDeque<SiteCoord> = VecDeque::new();
    for &s in &starts {
        seen[r.index(s)] = true;
        queue.push_back(s);
    }
    while let Some(z) = queue.pop_front() {
        for w in z.neighbors() {
            if !r.contains(w) {
                continue;
            }
            // From an interior site (or a start extremity) the path may end
            // on the far side whatever the colour there.
            if q.on_end(w) {
                return Ok(true);
            }
            let k = r.index(w);
            if !seen[k] && r.is_interior(w) && q.color.matches(c.is_occupied(w)) {
                seen[k] = true;
                queue.push_back(w);
            }
        }
    }
    Ok(false)
}

/// Success/trial counts; merging is exact, associative and commutative.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub trials: u64,
    pub successes: u64,
}

impl Tally {
    pub fn record(&mut self, success: bool) {
        self.trials += 1;
        self.successes += success as u64;
    }

    pub fn merge(self, other: Tally) -> Tally {
        Tally {
            trials: self.trials + other.trials,
            successes: self.successes + other.successes,
        }
    }

    pub fn estimate(&self) -> f64 {
        if self.trials == 0 {
            return f64::NAN;
        }
        self.successes as f64 / self.trials as f64
    }

    /// Binomial standard error of [`Tally::estimate`].
    pub fn stderr(&self) -> f64 {
        let p = self.estimate();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

impl FromIterator<bool> for Tally {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut t = Tally::default();
        for s in iter {
            t.record(s);
        }
        t
    }
}

/// Monte Carlo estimate of a crossing probability; replica `k` of the run is
/// the configuration sampled with `(seed, k)`.
pub fn crossing_probability(
    field: &ProbabilityField,
    q: &CrossingQuery,
    samples: u64,
    seed: u64,
) -> Result<Tally> {
    crossing_tally(field, q, 0..samples, seed)
}

/// Crossing counts over an explicit replica range, for splitting work.
pub fn crossing_tally(
    field: &ProbabilityField,
    q: &CrossingQuery,
    replicas: std::ops::Range<u64>,
    seed: u64,
) -> Result<Tally> {
    if replicas.is_empty() {
        return Err(PercError::InvalidParameter("samples must be >= 1".into()));
    }
    field.validate()?;
    replicas
        .into_par_iter()
        .map(|k| {
            let c = sample(field, q.region, seed, k);
            has_crossing(&c, q).map(|hit| Tally {
                trials: 1,
                successes: hit as u64,
            })
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))
}

/// One line of a crossing-probability sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingSweepRow {
    pub p: f64,
    pub n: i64,
    pub orientation: Orientation,
    pub color: Color,
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    pub stderr: f64,
}

impl CrossingSweepRow {
    pub fn new(p: f64, n: i64, q: &CrossingQuery, tally: Tally) -> Self {
        CrossingSweepRow {
            p,
            n,
            orientation: q.orientation,
            color: q.color,
            trials: tally.trials,
            successes: tally.successes,
            estimate: tally.estimate(),
            stderr: tally.stderr(),
        }
    }
}
