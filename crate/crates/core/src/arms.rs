//! Polychromatic arm events in annuli and two-arm events.
//!
//! `A^j(m, n)` asks for `j` vertex-disjoint monochromatic paths from
//! `∂S_m` to `∂S_n`, not all of the same colour. Paths of opposite colours
//! never share a site, so the event holds iff the maximal numbers `k_occ`
//! and `k_vac` of disjoint occupied and vacant arms satisfy
//! `k_occ ≥ 1`, `k_vac ≥ 1` and `k_occ + k_vac ≥ j`. Each maximum is a
//! vertex-disjoint path count, obtained by augmenting paths on the
//! vertex-split graph of one colour class and capped at `j − 1`.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connectivity::{flood, Color, Tally};
use crate::error::{PercError, Result};
use crate::lattice::{box_region, Region, SiteCoord};
use crate::sampling::{sample_masked, Configuration, ProbabilityField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArmQuery {
    pub center: SiteCoord,
    pub m: u32,
    pub n: u32,
    pub j: u32,
}

impl ArmQuery {
    pub fn new(center: SiteCoord, m: u32, n: u32, j: u32) -> Result<Self> {
        if !(2..=4).contains(&j) {
            return Err(PercError::InvalidParameter(format!("arm count {j} not in 2..=4")));
        }
        if m < j {
            return Err(PercError::InvalidParameter(format!(
                "inner radius {m} must be at least the arm count {j}"
            )));
        }
        if n <= m {
            return Err(PercError::InvalidParameter(format!(
                "outer radius {n} must exceed inner radius {m}"
            )));
        }
        Ok(ArmQuery { center, m, n, j })
    }

    pub fn outer_box(&self) -> Region {
        box_region(self.center, self.n)
    }
}

/// Maximal numbers of disjoint arms of each colour, capped.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArmCounts {
    pub occupied: u32,
    pub vacant: u32,
}

impl ArmCounts {
    pub fn polychromatic(&self, j: u32) -> bool {
        self.occupied >= 1 && self.vacant >= 1 && self.occupied + self.vacant >= j
    }
}

const NONE: u32 = u32::MAX;
const SOURCE: u32 = u32::MAX - 1;
const SINK: u32 = u32::MAX - 2;

/// Reusable buffers for disjoint-arm counting on one region.
pub struct ArmSolver {
    region: Region,
    succ: Vec<u32>,
    pred: Vec<u32>,
    from_source: Vec<bool>,
    touched: Vec<u32>,
    stamp: u32,
    seen: Vec<u32>,
    parent: Vec<u32>,
    queue: VecDeque<u32>,
}

impl ArmSolver {
    pub fn new(region: Region) -> Self {
        let len = region.len();
        ArmSolver {
            region,
            succ: vec![NONE; len],
            pred: vec![NONE; len],
            from_source: vec![false; len],
            touched: Vec::new(),
            stamp: 0,
            seen: vec![0; 2 * len],
            parent: vec![NONE; 2 * len],
            queue: VecDeque::new(),
        }
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            self.succ[v as usize] = NONE;
            self.pred[v as usize] = NONE;
            self.from_source[v as usize] = false;
        }
        self.touched.clear();
    }

    fn refresh_pred(&mut self) {
        for &v in &self.touched {
            self.pred[v as usize] = NONE;
        }
        for k in 0..self.touched.len() {
            let v = self.touched[k] as usize;
            if self.from_source[v] {
                self.pred[v] = SOURCE;
            }
            let s = self.succ[v];
            if s != NONE && s != SINK {
                self.pred[s as usize] = v as u32;
            }
        }
    }

    fn touch(&mut self, v: usize) {
        if self.succ[v] == NONE && self.pred[v] == NONE && !self.from_source[v] {
            self.touched.push(v as u32);
        }
    }

    /// Maximal number (capped at `cap`) of vertex-disjoint paths of `color`
    /// from `∂S_m(center)` to `∂S_n(center)` inside the annulus.
    pub fn disjoint_arms(
        &mut self,
        c: &Configuration,
        center: SiteCoord,
        m: u32,
        n: u32,
        color: Color,
        cap: u32,
    ) -> u32 {
        debug_assert_eq!(*c.region(), self.region);
        let (m, n) = (m as i64, n as i64);
        self.reset();
        let region = self.region;
        let ring = box_region(center, m as u32);
        let inner: Vec<usize> = ring
            .boundary_sites()
            .chain((m == 0).then_some(center))
            .filter_map(|z| region.index_checked(z))
            .filter(|&k| color.matches(c.occupied_at(k)))
            .collect();
        let usable = |k: usize| -> bool {
            let d = region.site_at(k).distance(center);
            d >= m && d <= n && color.matches(c.occupied_at(k))
        };
        let mut flow = 0;
        while flow < cap {
            if !self.augment(&inner, &usable, center, n) {
                break;
            }
            flow += 1;
            self.refresh_pred();
        }
        flow
    }

    /// One breadth-first search in the residual graph. States are
    /// `2·v` (entering v) and `2·v + 1` (leaving v).
    fn augment(
        &mut self,
        inner: &[usize],
        usable: &impl Fn(usize) -> bool,
        center: SiteCoord,
        n: i64,
    ) -> bool {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.seen.iter_mut().for_each(|s| *s = 0);
            self.stamp = 1;
        }
        let stamp = self.stamp;
        self.queue.clear();
        for &v in inner {
            if !self.from_source[v] {
                let s = 2 * v;
                if self.seen[s] != stamp {
                    self.seen[s] = stamp;
                    self.parent[s] = SOURCE;
                    self.queue.push_back(s as u32);
                }
            }
        }
        let region = self.region;
        let mut end = NONE;
        'search: while let Some(state) = self.queue.pop_front() {
            let v = (state / 2) as usize;
            let leaving = state % 2 == 1;
            let mut next: [u32; 8] = [NONE; 8];
            let mut count = 0;
            if !leaving {
                if self.pred[v] == NONE {
                    next[count] = (2 * v + 1) as u32;
                    count += 1;
                } else if self.pred[v] != SOURCE {
                    next[count] = 2 * self.pred[v] + 1;
                    count += 1;
                }
            } else {
                let z = region.site_at(v);
                if z.distance(center) == n && self.succ[v] != SINK {
                    end = state;
                    break 'search;
                }
                for w in z.neighbors() {
                    if let Some(wk) = region.index_checked(w) {
                        if self.succ[v] != wk as u32 && usable(wk) {
                            next[count] = (2 * wk) as u32;
                            count += 1;
                        }
                    }
                }
                if self.pred[v] != NONE {
                    next[count] = (2 * v) as u32;
                    count += 1;
                }
            }
            for &s in &next[..count] {
                let si = s as usize;
                if self.seen[si] != stamp {
                    self.seen[si] = stamp;
                    self.parent[si] = state;
                    self.queue.push_back(s);
                }
            }
        }
        if end == NONE {
            return false;
        }
        // Walk back from the sink, rewriting arc flows.
        let last = (end / 2) as usize;
        self.touch(last);
        self.succ[last] = SINK;
        let mut state = end;
        loop {
            let prev = self.parent[state as usize];
            let v = (state / 2) as usize;
            if prev == SOURCE {
                self.touch(v);
                self.from_source[v] = true;
                break;
            }
            let u = (prev / 2) as usize;
            let prev_leaving = prev % 2 == 1;
            let cur_leaving = state % 2 == 1;
            match (prev_leaving, cur_leaving) {
                // out(u) -> in(v): new forward arc u -> v.
                (true, false) if u != v => {
                    self.touch(u);
                    self.succ[u] = v as u32;
                }
                // in(u) -> out(v) with v = pred(u): cancel arc v -> u.
                (false, true) if u != v && self.succ[v] == u as u32 => {
                    self.succ[v] = NONE;
                }
                // in(v) -> out(v) or out(v) -> in(v): vertex flow only.
                _ => {}
            }
            state = prev;
        }
        true
    }
}

/// Disjoint-arm counts of both colours across the annulus
/// `S_n(center) \ S̊_m(center)`, each capped at `cap`.
pub fn arm_counts(c: &Configuration, center: SiteCoord, m: u32, n: u32, cap: u32) -> Result<ArmCounts> {
    let outer = box_region(center, n);
    if !c.region().contains_region(&outer) {
        return Err(PercError::RegionMismatch(format!(
            "annulus {outer:?} is not inside {:?}",
            c.region()
        )));
    }
    let mut solver = ArmSolver::new(*c.region());
    Ok(ArmCounts {
        occupied: solver.disjoint_arms(c, center, m, n, Color::Occupied, cap),
        vacant: solver.disjoint_arms(c, center, m, n, Color::Vacant, cap),
    })
}

/// Whether `A^j(m, n)` holds around `q.center`.
pub fn has_polychromatic_arms(c: &Configuration, q: &ArmQuery) -> Result<bool> {
    Ok(arm_counts(c, q.center, q.m, q.n, q.j - 1)?.polychromatic(q.j))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoArmQuery {
    pub site: SiteCoord,
    pub region: Region,
}

impl TwoArmQuery {
    pub fn new(site: SiteCoord, region: Region) -> Result<Self> {
        if !region.is_interior(site) {
            return Err(PercError::InvalidParameter(format!(
                "{site} is not in the interior of {region:?}"
            )));
        }
        Ok(TwoArmQuery { site, region })
    }
}

/// `Γ₂(v, R)`: an occupied path and a vacant path, each starting at a
/// neighbour of `v` and reaching `∂R` inside `R`.
pub fn has_two_arms(c: &Configuration, q: &TwoArmQuery) -> Result<bool> {
    if !c.region().contains_region(&q.region) {
        return Err(PercError::RegionMismatch(format!(
            "{:?} is not inside {:?}",
            q.region,
            c.region()
        )));
    }
    let r = q.region;
    let hole = r.index(q.site);
    let reaches = |color: Color| {
        let seen = flood(&r, q.site.neighbors(), |k| {
            k != hole && color.matches(c.is_occupied(r.site_at(k)))
        });
        seen.iter()
            .enumerate()
            .any(|(k, &s)| s && r.is_boundary(r.site_at(k)))
    };
    Ok(reaches(Color::Occupied) && reaches(Color::Vacant))
}

/// Samples only the annulus sites of `q` (the hole stays vacant and unused).
pub fn sample_annulus(
    p: f64,
    center: SiteCoord,
    m: u32,
    n: u32,
    seed: u64,
    replica: u64,
) -> Result<Configuration> {
    let field = ProbabilityField::homogeneous(p)?;
    let m = m as i64;
    Ok(sample_masked(&field, box_region(center, n), seed, replica, |z| {
        z.distance(center) >= m
    }))
}

/// Monte Carlo estimate of `P_p(A^j(m, n))`.
pub fn arm_probability(p: f64, q: &ArmQuery, samples: u64, seed: u64) -> Result<Tally> {
    if samples == 0 {
        return Err(PercError::InvalidParameter("samples must be >= 1".into()));
    }
    ProbabilityField::homogeneous(p)?;
    (0..samples)
        .into_par_iter()
        .map(|k| {
            let c = sample_annulus(p, q.center, q.m, q.n, seed, k)?;
            Ok(Tally {
                trials: 1,
                successes: has_polychromatic_arms(&c, q)? as u64,
            })
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))
}

/// Monte Carlo estimate of `P_p(Γ₂(0, S_n))`.
pub fn two_arm_probability(p: f64, n: u32, samples: u64, seed: u64) -> Result<Tally> {
    if samples == 0 {
        return Err(PercError::InvalidParameter("samples must be >= 1".into()));
    }
    let field = ProbabilityField::homogeneous(p)?;
    let q = TwoArmQuery::new(SiteCoord::ORIGIN, box_region(SiteCoord::ORIGIN, n))?;
    (0..samples)
        .into_par_iter()
        .map(|k| {
            let c = sample_masked(&field, q.region, seed, k, |z| z != SiteCoord::ORIGIN);
            Ok(Tally {
                trials: 1,
                successes: has_two_arms(&c, &q)? as u64,
            })
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))
}

/// One line of an arm-probability sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmSweepRow {
    pub j: u32,
    pub m: u32,
    pub n: u32,
    pub p: f64,
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    pub stderr: f64,
}

/// Arm probabilities for every `(j, n)` pair, with `m = j`.
///
/// Each replica samples one annulus around the origin out to the largest
/// radius and every event is evaluated on it, so the estimates are exactly
/// nonincreasing in `n` replica by replica.
pub fn arm_sweep(p: f64, js: &[u32], radii: &[u32], samples: u64, seed: u64) -> Result<Vec<ArmSweepRow>> {
    arm_sweep_range(p, js, radii, 0..samples, seed)
}

pub fn arm_sweep_range(
    p: f64,
    js: &[u32],
    radii: &[u32],
    replicas: std::ops::Range<u64>,
    seed: u64,
) -> Result<Vec<ArmSweepRow>> {
    if replicas.is_empty() {
        return Err(PercError::InvalidParameter("samples must be >= 1".into()));
    }
    if radii.is_empty() || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(PercError::InvalidParameter(
            "radii must be strictly increasing".into(),
        ));
    }
    let queries: Vec<Vec<ArmQuery>> = js
        .iter()
        .map(|&j| {
            radii
                .iter()
                .map(|&n| ArmQuery::new(SiteCoord::ORIGIN, j, n, j))
                .collect()
        })
        .collect::<Result<_>>()?;
    ProbabilityField::homogeneous(p)?;
    let n_max = *radii.last().unwrap();
    let m_min = *js.iter().min().unwrap();
    let region = box_region(SiteCoord::ORIGIN, n_max);
    let width = js.len() * radii.len();
    let totals: Vec<u64> = replicas
        .clone()
        .into_par_iter()
        .map_init(
            || ArmSolver::new(region),
            |solver, k| {
                let c = sample_annulus(p, SiteCoord::ORIGIN, m_min, n_max, seed, k)
                    .expect("probability validated");
                js.iter()
                    .flat_map(|&j| {
                        let mask = radius_hits(solver, &c, j, radii);
                        (0..radii.len()).map(move |r| (mask >> r) & 1)
                    })
                    .collect::<Vec<u64>>()
            },
        )
        .reduce(
            || vec![0; width],
            |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect(),
        );
    let hits: Vec<&[u64]> = totals.chunks(radii.len()).collect();
    let trials = replicas.end - replicas.start;
    let mut rows = Vec::new();
    for (qs, counts) in queries.iter().zip(hits) {
        for (q, &successes) in qs.iter().zip(counts) {
            let t = Tally { trials, successes };
            rows.push(ArmSweepRow {
                j: q.j,
                m: q.m,
                n: q.n,
                p,
                trials,
                successes,
                estimate: t.estimate(),
                stderr: t.stderr(),
            });
        }
    }
    Ok(rows)
}

/// Bitmask over `radii` of the radii at which `A^j(j, n)` holds.
fn radius_hits(solver: &mut ArmSolver, c: &Configuration, j: u32, radii: &[u32]) -> u64 {
    let cap = j - 1;
    let mut mask = 0u64;
    let mut occ = 0u32;
    let mut vac = 0u32;
    // Counts only grow as n shrinks; once both saturate, smaller radii follow.
    for (r, &n) in radii.iter().enumerate().rev() {
        if occ < cap {
            occ = solver.disjoint_arms(c, SiteCoord::ORIGIN, j, n, Color::Occupied, cap);
        }
        if vac < cap {
            vac = solver.disjoint_arms(c, SiteCoord::ORIGIN, j, n, Color::Vacant, cap);
        }
        if (ArmCounts {
            occupied: occ,
            vacant: vac,
        })
        .polychromatic(j)
        {
            mask |= 1 << r;
        }
    }
    mask
}

#[cfg(test)]
mod tests {
    use super::*;

    fn annulus_config(n: u32, f: impl Fn(SiteCoord) -> bool) -> Configuration {
        Configuration::from_fn(box_region(SiteCoord::ORIGIN, n), f)
    }

    #[test]
    fn query_validation() {
        assert!(ArmQuery::new(SiteCoord::ORIGIN, 1, 5, 2).is_err());
        assert!(ArmQuery::new(SiteCoord::ORIGIN, 2, 2, 2).is_err());
        assert!(ArmQuery::new(SiteCoord::ORIGIN, 5, 9, 5).is_err());
        assert!(ArmQuery::new(SiteCoord::ORIGIN, 4, 9, 4).is_ok());
    }

    #[test]
    fn monochrome_annulus_has_no_polychromatic_arms() {
        let c = annulus_config(8, |_| true);
        for j in 2..=4 {
            let q = ArmQuery::new(SiteCoord::ORIGIN, j, 8, j).unwrap();
            assert!(!has_polychromatic_arms(&c, &q).unwrap());
        }
        let counts = arm_counts(&c, SiteCoord::ORIGIN, 2, 8, 10).unwrap();
        // Every site of the 16-site inner ring starts its own radial arm.
        assert_eq!(
            counts,
            ArmCounts {
                occupied: 10,
                vacant: 0
            }
        );
        assert_eq!(arm_counts(&c, SiteCoord::ORIGIN, 2, 8, 100).unwrap().occupied, 16);
    }

    #[test]
    fn half_plane_gives_two_arms() {
        let c = annulus_config(10, |z| z.i >= 0);
        let q = ArmQuery::new(SiteCoord::ORIGIN, 2, 10, 2).unwrap();
        assert!(has_polychromatic_arms(&c, &q).unwrap());
    }

    #[test]
    fn quadrants_give_four_arms() {
        let c = annulus_config(9, |z| (z.i >= 0) == (z.j >= 0));
        let q = ArmQuery::new(SiteCoord::ORIGIN, 4, 9, 4).unwrap();
        assert!(has_polychromatic_arms(&c, &q).unwrap());
    }

    #[test]
    fn thin_spokes_count_once_each() {
        // Three one-site-wide occupied spokes in a vacant background.
        let spokes =
            |z: SiteCoord| (z.j == 0 && z.i > 0) || (z.i == 0 && z.j > 0) || (z.i == -z.j && z.i > 0);
        let c = annulus_config(7, spokes);
        let counts = arm_counts(&c, SiteCoord::ORIGIN, 2, 7, 5).unwrap();
        assert_eq!(counts.occupied, 3);
        assert!(counts.vacant >= 3);
    }

    #[test]
    fn region_mismatch() {
        let c = annulus_config(5, |_| true);
        let q = ArmQuery::new(SiteCoord::ORIGIN, 2, 6, 2).unwrap();
        assert!(matches!(
            has_polychromatic_arms(&c, &q),
            Err(PercError::RegionMismatch(_))
        ));
    }

    #[test]
    fn two_arm_cases() {
        let r = box_region(SiteCoord::ORIGIN, 4);
        let q = TwoArmQuery::new(SiteCoord::ORIGIN, r).unwrap();
        assert!(!has_two_arms(&Configuration::from_fn(r, |_| true), &q).unwrap());
        assert!(has_two_arms(&Configuration::from_fn(r, |z| z.i > 0), &q).unwrap());
        assert!(TwoArmQuery::new(SiteCoord::new(4, 0), r).is_err());
    }

    #[test]
    fn four_arms_imply_two_and_colour_swap_symmetry() {
        for k in 0..200 {
            let c = sample_annulus(0.5, SiteCoord::ORIGIN, 2, 12, 3, k).unwrap();
            let q4 = ArmQuery::new(SiteCoord::ORIGIN, 4, 12, 4).unwrap();
            let q2 = ArmQuery::new(SiteCoord::ORIGIN, 4, 12, 2).unwrap();
            let four = has_polychromatic_arms(&c, &q4).unwrap();
            assert!(!four || has_polychromatic_arms(&c, &q2).unwrap());
            // Swapping colours inside the annulus leaves the event unchanged.
            let swapped = Configuration::from_fn(*c.region(), |z| {
                z.distance(SiteCoord::ORIGIN) >= 2 && !c.is_occupied(z)
            });
            assert_eq!(four, has_polychromatic_arms(&swapped, &q4).unwrap());
        }
    }

    #[test]
    fn sweep_matches_direct_estimates_and_nests() {
        let rows = arm_sweep(0.5, &[2, 3], &[6, 9, 14], 150, 21).unwrap();
        assert_eq!(rows.len(), 6);
        for w in rows.chunks(3) {
            assert!(w[0].successes >= w[1].successes && w[1].successes >= w[2].successes);
        }
        for row in &rows {
            let q = ArmQuery::new(SiteCoord::ORIGIN, row.m, row.n, row.j).unwrap();
            let direct: u64 = (0..150)
                .map(|k| {
                    let c = sample_annulus(0.5, SiteCoord::ORIGIN, 2, 14, 21, k).unwrap();
                    has_polychromatic_arms(&c, &q).unwrap() as u64
                })
                .sum();
            assert_eq!(direct, row.successes, "j={} n={}", row.j, row.n);
        }
    }
}
