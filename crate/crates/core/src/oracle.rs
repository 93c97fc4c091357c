//! Brute-force reference implementations.
//!
//! Everything here works on coordinates and explicit path enumeration,
//! shares no code with the fast detectors it is used to check, and is only
//! meant for small regions.

use std::collections::{BTreeSet, HashSet};

use crate::lattice::{Region, SiteCoord};
use crate::sampling::Configuration;

const OFFSETS: [(i64, i64); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

fn adjacent(z: SiteCoord) -> impl Iterator<Item = SiteCoord> {
    OFFSETS.iter().map(move |&(di, dj)| SiteCoord {
        i: z.i + di,
        j: z.j + dj,
    })
}

fn inside(r: &Region, z: SiteCoord) -> bool {
    (r.a1..=r.a2).contains(&z.i) && (r.b1..=r.b2).contains(&z.j)
}

fn strictly_inside(r: &Region, z: SiteCoord) -> bool {
    r.a1 < z.i && z.i < r.a2 && r.b1 < z.j && z.j < r.b2
}

/// Depth-first search over simple paths from `starts` through sites
/// accepted by `step`; true when some path reaches a site accepted by `goal`
/// (goal sites need not pass `step`).
fn path_exists(
    starts: &[SiteCoord],
    step: impl Fn(SiteCoord) -> bool,
    goal: impl Fn(SiteCoord) -> bool,
) -> bool {
    let mut visited: HashSet<SiteCoord> = HashSet::new();
    let mut stack: Vec<SiteCoord> = Vec::new();
    for &s in starts {
        if visited.insert(s) {
            stack.push(s);
        }
    }
    while let Some(z) = stack.pop() {
        for w in adjacent(z) {
            if goal(w) {
                return true;
            }
            if step(w) && visited.insert(w) {
                stack.push(w);
            }
        }
    }
    false
}

/// Crossing of `region` by a path whose first site lies on the start side,
/// whose last site lies on the end side and whose other sites are interior
/// sites of colour `occupied`. Horizontal crossings go from `i = a1` to
/// `i = a2`, vertical ones from `j = b1` to `j = b2`.
pub fn crossing_by_search(c: &Configuration, region: Region, horizontal: bool, occupied: bool) -> bool {
    let on_start = |z: SiteCoord| {
        inside(&region, z)
            && if horizontal {
                z.i == region.a1
            } else {
                z.j == region.b1
            }
    };
    let on_end = |z: SiteCoord| {
        inside(&region, z)
            && if horizontal {
                z.i == region.a2
            } else {
                z.j == region.b2
            }
    };
    let starts: Vec<SiteCoord> = (region.b1..=region.b2)
        .flat_map(|j| (region.a1..=region.a2).map(move |i| SiteCoord { i, j }))
        .filter(|&z| on_start(z))
        .collect();
    path_exists(
        &starts,
        |z| strictly_inside(&region, z) && c.is_occupied(z) == occupied,
        on_end,
    )
}

/// Occupied and vacant paths from neighbours of `v` to the boundary of
/// `region`, avoiding `v`.
pub fn two_arms_by_search(c: &Configuration, v: SiteCoord, region: Region) -> bool {
    let arm = |occupied: bool| {
        let starts: Vec<SiteCoord> = adjacent(v).filter(|&w| c.is_occupied(w) == occupied).collect();
        if starts.iter().any(|&w| !strictly_inside(&region, w)) {
            return true;
        }
        path_exists(
            &starts,
            |z| z != v && strictly_inside(&region, z) && c.is_occupied(z) == occupied,
            |z| z != v && inside(&region, z) && !strictly_inside(&region, z) && c.is_occupied(z) == occupied,
        )
    };
    arm(true) && arm(false)
}

/// Sites of the annulus `m ≤ d(z, center) ≤ n` in a fixed order.
pub fn annulus_sites(center: SiteCoord, m: u32, n: u32) -> Vec<SiteCoord> {
    let (m, n) = (m as i64, n as i64);
    let mut out = Vec::new();
    for dj in -n..=n {
        for di in -n..=n {
            if di.abs().max(dj.abs()) >= m {
                out.push(SiteCoord {
                    i: center.i + di,
                    j: center.j + dj,
                });
            }
        }
    }
    out
}

/// All chordless monochromatic paths of colour `occupied` whose first site
/// is on the inner ring, whose last site is on the outer ring, and whose
/// other sites lie strictly between the rings. Every arm contains such a
/// path, so disjoint arms exist iff disjoint paths from this list do.
/// Returned as bitmasks over [`annulus_sites`]; needs at most 128 sites.
pub fn chordless_arms(c: &Configuration, center: SiteCoord, m: u32, n: u32, occupied: bool) -> Vec<u128> {
    let sites = annulus_sites(center, m, n);
    assert!(sites.len() <= 128, "annulus too large for the oracle");
    let dist = |z: SiteCoord| (z.i - center.i).abs().max((z.j - center.j).abs());
    let slot = |z: SiteCoord| sites.iter().position(|&s| s == z);
    let (m, n) = (m as i64, n as i64);
    let mut found = Vec::new();

    fn extend(
        path: &mut Vec<SiteCoord>,
        mask: u128,
        ctx: &dyn Fn(SiteCoord) -> Option<(usize, i64)>,
        m: i64,
        n: i64,
        found: &mut Vec<u128>,
    ) {
        let last = *path.last().unwrap();
        for w in adjacent(last) {
            let Some((k, d)) = ctx(w) else { continue };
            if mask >> k & 1 == 1 {
                continue;
            }
            // Chordless: w touches no earlier path site except `last`.
            let earlier = &path[..path.len() - 1];
            if adjacent(w).any(|x| earlier.contains(&x)) {
                continue;
            }
            if d == n {
                found.push(mask | 1 << k);
            } else if d > m {
                path.push(w);
                extend(path, mask | 1 << k, ctx, m, n, found);
                path.pop();
            }
        }
    }

    let ctx = |z: SiteCoord| -> Option<(usize, i64)> {
        let k = slot(z)?;
        (c.is_occupied(z) == occupied).then_some((k, dist(z)))
    };
    for &s in &sites {
        if dist(s) != m || c.is_occupied(s) != occupied {
            continue;
        }
        let k = slot(s).unwrap();
        let mut path = vec![s];
        extend(&mut path, 1 << k, &ctx, m, n, &mut found);
    }
    found.sort_unstable();
    found.dedup();
    found
}

/// Largest number (at most `cap`) of pairwise disjoint masks.
pub fn max_disjoint(paths: &[u128], cap: u32) -> u32 {
    fn go(paths: &[u128], used: u128, depth: u32, cap: u32) -> u32 {
        if depth == cap {
            return depth;
        }
        let mut best = depth;
        for (k, &p) in paths.iter().enumerate() {
            if p & used == 0 {
                best = best.max(go(&paths[k + 1..], used | p, depth + 1, cap));
                if best == cap {
                    break;
                }
            }
        }
        best
    }
    go(paths, 0, 0, cap)
}

/// `A^j(m, n)` by path enumeration.
pub fn polychromatic_arms_by_search(c: &Configuration, center: SiteCoord, m: u32, n: u32, j: u32) -> bool {
    let occ = max_disjoint(&chordless_arms(c, center, m, n, true), j);
    let vac = max_disjoint(&chordless_arms(c, center, m, n, false), j);
    occ >= 1 && vac >= 1 && occ + vac >= j
}

/// Simple path of colour `occupied` through `v` from the left side to the
/// right side of the strip region, found by enumerating paths from `v` to
/// the left side and searching the remainder for the right side.
fn on_crossing(c: &Configuration, r: &Region, v: SiteCoord, occupied: bool) -> bool {
    let colored = |z: SiteCoord| inside(r, z) && c.is_occupied(z) == occupied;
    fn left(
        c: &dyn Fn(SiteCoord) -> bool,
        r: &Region,
        path: &mut Vec<SiteCoord>,
        done: &mut dyn FnMut(&[SiteCoord]) -> bool,
    ) -> bool {
        let last = *path.last().unwrap();
        if last.i == r.a1 {
            return done(path);
        }
        for w in adjacent(last) {
            if c(w) && !path.contains(&w) {
                path.push(w);
                let hit = left(c, r, path, done);
                path.pop();
                if hit {
                    return true;
                }
            }
        }
        false
    }
    let mut right = |path: &[SiteCoord]| {
        let blocked: HashSet<SiteCoord> = path[1..].iter().copied().collect();
        v.i == r.a2
            || path_exists(
                &[v],
                |z| colored(z) && !blocked.contains(&z),
                |z| colored(z) && !blocked.contains(&z) && z.i == r.a2,
            )
    };
    left(&colored, r, &mut vec![v], &mut right)
}

/// Sites of the strip satisfying the three-arm characterisation of an
/// outer boundary. Upper: vacant, on a self-avoiding vacant left-right
/// crossing, with an occupied neighbour joined to the bottom row. Lower: the
/// same with colours and top/bottom exchanged.
pub fn boundary_by_arms(c: &Configuration, upper: bool) -> BTreeSet<SiteCoord> {
    let r = *c.region();
    let own = !upper;
    let target_row = if upper { r.b1 } else { r.b2 };
    let mut out = BTreeSet::new();
    for j in r.b1..=r.b2 {
        for i in r.a1..=r.a2 {
            let v = SiteCoord { i, j };
            if c.is_occupied(v) != own {
                continue;
            }
            let other = |z: SiteCoord| inside(&r, z) && c.is_occupied(z) != own;
            let starts: Vec<SiteCoord> = adjacent(v).filter(|&w| other(w)).collect();
            let reaches = starts.iter().any(|w| w.j == target_row)
                || path_exists(&starts, other, |z| other(z) && z.j == target_row);
            if reaches && on_crossing(c, &r, v, own) {
                out.insert(v);
            }
        }
    }
    out
}

/// Exact probability of `event` when the sites in `free` are resampled
/// independently with occupation probability `p` and all other sites of
/// `base` are held fixed. Enumerates all `2^free.len()` assignments.
pub fn exact_probability(
    base: &Configuration,
    free: &[SiteCoord],
    p: f64,
    event: impl Fn(&Configuration) -> bool,
) -> f64 {
    assert!(free.len() <= 24, "too many free sites to enumerate");
    let mut c = base.clone();
    let mut total = 0.0;
    for bits in 0u32..1 << free.len() {
        let mut weight = 1.0;
        for (k, &z) in free.iter().enumerate() {
            let occ = bits >> k & 1 == 1;
            c.set(z, occ);
            weight *= if occ { p } else { 1.0 - p };
        }
        if event(&c) {
            total += weight;
        }
    }
    total
}
