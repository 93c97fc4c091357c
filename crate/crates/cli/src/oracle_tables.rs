//! Exhaustive comparisons between the fast detectors and the brute-force
//! oracles, with exact event probabilities from the enumeration.

use std::collections::BTreeSet;

use gradperc::arms::{has_polychromatic_arms, has_two_arms, ArmQuery, TwoArmQuery};
use gradperc::front::{outer_boundary, BoundarySide};
use gradperc::oracle;
use gradperc::sampling::sample_masked;
use gradperc::{
    box_region, has_crossing, Color, Configuration, CrossingQuery, Orientation, ProbabilityField, Region,
    SiteCoord, StripSpec,
};
use serde::{Deserialize, Serialize};

/// Probabilities at which the exact tables are evaluated.
pub const TABLE_P: [f64; 3] = [0.4, 0.5, 0.6];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub check: String,
    pub instance: String,
    pub free_sites: usize,
    pub configurations: u64,
    pub disagreements: u64,
    pub p: f64,
    pub exact_probability: f64,
}

/// Result of enumerating every assignment of the free sites.
pub struct Enumeration {
    pub free_sites: usize,
    pub configurations: u64,
    pub disagreements: u64,
    /// `hits[k]`: assignments with `k` occupied free sites where the event holds.
    pub hits: Vec<u64>,
}

impl Enumeration {
    pub fn probability(&self, p: f64) -> f64 {
        let f = self.free_sites as i32;
        self.hits
            .iter()
            .enumerate()
            .map(|(k, &h)| h as f64 * p.powi(k as i32) * (1.0 - p).powi(f - k as i32))
            .sum::<f64>()
            .min(1.0)
    }
}

/// Runs `detector` and `oracle` on all `2^free.len()` completions of `base`.
pub fn enumerate(
    base: &Configuration,
    free: &[SiteCoord],
    detector: impl Fn(&Configuration) -> bool,
    oracle: impl Fn(&Configuration) -> bool,
) -> Enumeration {
    assert!(free.len() <= 16, "instances are limited to 2^16 configurations");
    let mut c = base.clone();
    let mut hits = vec![0u64; free.len() + 1];
    let mut disagreements = 0;
    for bits in 0u32..1 << free.len() {
        for (k, &z) in free.iter().enumerate() {
            c.set(z, bits >> k & 1 == 1);
        }
        let fast = detector(&c);
        if fast != oracle(&c) {
            disagreements += 1;
        }
        if fast {
            hits[bits.count_ones() as usize] += 1;
        }
    }
    Enumeration {
        free_sites: free.len(),
        configurations: 1 << free.len(),
        disagreements,
        hits,
    }
}

fn rows(check: &str, instance: String, e: &Enumeration) -> Vec<OracleRow> {
    TABLE_P
        .iter()
        .map(|&p| OracleRow {
            check: check.into(),
            instance: instance.clone(),
            free_sites: e.free_sites,
            configurations: e.configurations,
            disagreements: e.disagreements,
            p,
            exact_probability: e.probability(p),
        })
        .collect()
}

pub fn crossing_instances() -> Vec<(Region, Orientation, Color)> {
    let mut out = Vec::new();
    for (w, h) in [(1, 1), (2, 2), (3, 3), (1, 3), (3, 1), (1, 7)] {
        let r = Region::new(0, w, 0, h).unwrap();
        for o in [Orientation::Horizontal, Orientation::Vertical] {
            for c in [Color::Occupied, Color::Vacant] {
                out.push((r, o, c));
            }
        }
    }
    out
}

pub fn crossing_enumeration(r: Region, o: Orientation, color: Color) -> Enumeration {
    let q = CrossingQuery::new(r, o, color).unwrap();
    let base = Configuration::from_fn(r, |_| false);
    let free: Vec<SiteCoord> = r.sites().collect();
    enumerate(
        &base,
        &free,
        |c| has_crossing(c, &q).unwrap(),
        |c| oracle::crossing_by_search(c, r, o == Orientation::Horizontal, color == Color::Occupied),
    )
}

pub fn crossing_rows() -> Vec<OracleRow> {
    crossing_instances()
        .into_iter()
        .flat_map(|(r, o, c)| {
            let e = crossing_enumeration(r, o, c);
            rows(
                "crossing",
                format!("[{},{}]x[{},{}] {o:?} {c:?}", r.a1, r.a2, r.b1, r.b2),
                &e,
            )
        })
        .collect()
}

pub fn two_arm_instances() -> Vec<Region> {
    vec![
        box_region(SiteCoord::ORIGIN, 1),
        Region::new(-1, 2, -1, 2).unwrap(),
        Region::new(-1, 1, -1, 3).unwrap(),
    ]
}

pub fn two_arm_enumeration(r: Region) -> Enumeration {
    let q = TwoArmQuery::new(SiteCoord::ORIGIN, r).unwrap();
    let base = Configuration::from_fn(r, |_| false);
    let free: Vec<SiteCoord> = r.sites().filter(|&z| z != SiteCoord::ORIGIN).collect();
    enumerate(
        &base,
        &free,
        |c| has_two_arms(c, &q).unwrap(),
        |c| oracle::two_arms_by_search(c, SiteCoord::ORIGIN, r),
    )
}

pub fn two_arm_rows() -> Vec<OracleRow> {
    two_arm_instances()
        .into_iter()
        .flat_map(|r| {
            let e = two_arm_enumeration(r);
            rows("two_arm", format!("[{},{}]x[{},{}]", r.a1, r.a2, r.b1, r.b2), &e)
        })
        .collect()
}

/// Sixteen free annulus sites in a wedge to the right of the centre.
pub fn arm_free_sites(m: u32, n: u32) -> Vec<SiteCoord> {
    let (m, n) = (m as i64, n as i64);
    let mut v: Vec<SiteCoord> = (m..=n)
        .flat_map(|i| (-3..=4).map(move |j| SiteCoord::new(i, j)))
        .filter(|z| z.norm() >= m && z.norm() <= n)
        .collect();
    v.sort_by_key(|z| (z.norm(), z.j.abs(), z.j, z.i));
    v.truncate(16);
    v
}

/// Annulus `(j, m, n)` with a background drawn at `p = 1/2` from `seed`.
pub fn arm_instances() -> Vec<(u32, u32, u32)> {
    vec![(2, 2, 4), (3, 3, 5), (4, 4, 5)]
}

pub fn arm_background(m: u32, n: u32, seed: u64) -> Configuration {
    let field = ProbabilityField::homogeneous(0.5).unwrap();
    let m = m as i64;
    sample_masked(&field, box_region(SiteCoord::ORIGIN, n), seed, 0, |z| {
        z.norm() >= m
    })
}

pub fn arm_enumeration(j: u32, m: u32, n: u32, seed: u64) -> Enumeration {
    let q = ArmQuery::new(SiteCoord::ORIGIN, m, n, j).unwrap();
    let base = arm_background(m, n, seed);
    enumerate(
        &base,
        &arm_free_sites(m, n),
        |c| has_polychromatic_arms(c, &q).unwrap(),
        |c| oracle::polychromatic_arms_by_search(c, SiteCoord::ORIGIN, m, n, j),
    )
}

pub fn arm_rows(seed: u64) -> Vec<OracleRow> {
    arm_instances()
        .into_iter()
        .flat_map(|(j, m, n)| {
            let e = arm_enumeration(j, m, n, seed);
            rows("arms", format!("j={j} m={m} n={n} background={seed}"), &e)
        })
        .collect()
}

pub fn boundary_instances() -> Vec<StripSpec> {
    vec![
        StripSpec::new(2, 3).unwrap(),
        StripSpec::new(2, 4).unwrap(),
        StripSpec::new(1, 7).unwrap(),
        StripSpec::new(3, 2).unwrap(),
    ]
}

/// Strip rows `±N` are fixed by the gradient; every other site is free.
/// Counts configurations whose upper boundary is nonempty and agrees
/// with the three-arm characterisation, for both boundaries.
pub fn boundary_enumeration(spec: StripSpec) -> Enumeration {
    let r = spec.region();
    let base = Configuration::from_fn(r, |z| z.j == r.b1);
    let free: Vec<SiteCoord> = r.sites().filter(|z| z.j != r.b1 && z.j != r.b2).collect();
    let sites = |c: &Configuration, side| -> BTreeSet<SiteCoord> {
        outer_boundary(c, side).unwrap().sites.into_iter().collect()
    };
    enumerate(
        &base,
        &free,
        |c| {
            sites(c, BoundarySide::Upper) == oracle::boundary_by_arms(c, true)
                && sites(c, BoundarySide::Lower) == oracle::boundary_by_arms(c, false)
        },
        |_| true,
    )
}

pub fn boundary_rows() -> Vec<OracleRow> {
    boundary_instances()
        .into_iter()
        .flat_map(|s| {
            let e = boundary_enumeration(s);
            rows("outer_boundary", format!("N={} ell={}", s.half_width, s.ell), &e)
        })
        .collect()
}
